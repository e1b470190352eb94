/** Browser reader: document grid, page/text views on a canvas, effect
 * application (highlights, pans, pulses, clips), and progressive fetching.
 * All reading state lives in the engine; the UI only issues commands and
 * mirrors the returned state and effects. */

import type { Command, PlaybackState, UIEvent } from "./engine.js";
import { ReaderEngine } from "./engine.js";
import type { Box, Manifest } from "./types.js";
import { parseManifest } from "./types.js";
import { DeliveryClient } from "./net.js";
import type { DocInfo, FetchItem, FetchKey } from "./planner.js";
import { docInfoFromManifest, keyOf, planFetches } from "./planner.js";
import { beep, speak, vibrate } from "./speech.js";

interface PanAnimation {
  from: Box;
  to: Box;
  startedAt: number;
  durationMs: number;
}

export class ReaderApp {
  private readonly client: DeliveryClient;
  private readonly canvas: HTMLCanvasElement;
  private readonly grid: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly status: HTMLElement;

  private docs: DocInfo[] = [];
  private manifests = new Map<string, Manifest>();
  private images = new Map<FetchKey, HTMLImageElement>();
  private fetched = new Set<FetchKey>();
  private keyphrases = new Map<string, string>();

  private engine: ReaderEngine | null = null;
  private state: PlaybackState | null = null;

  private highlightSentenceRegion: string | null = null;
  private highlightRegion: string | null = null;
  private highlightLinkTarget: string | null = null;
  private pan: PanAnimation | null = null;
  private lastFrame = 0;

  constructor(root: HTMLElement, serverBase: string) {
    this.client = new DeliveryClient(serverBase);
    this.grid = root.querySelector("#grid") as HTMLElement;
    this.canvas = root.querySelector("#page") as HTMLCanvasElement;
    this.banner = root.querySelector("#banner") as HTMLElement;
    this.status = root.querySelector("#status") as HTMLElement;
  }

  async start(): Promise<void> {
    const listing = await this.client.listDocs();
    this.docs = listing.map((entry) => ({
      docId: entry.id,
      title: entry.title,
      pageCount: null,
      sentencePages: [],
    }));
    await this.runPlan(planFetches(this.docs, null, undefined, this.fetched));
    this.renderGrid();
    requestAnimationFrame((t) => this.frame(t));
  }

  /** Fetch plan items in priority order, folding results into app state. */
  private async runPlan(plan: FetchItem[]): Promise<void> {
    await this.client.runPlan(plan, (item, data) => {
      this.fetched.add(keyOf(item));
      if (item.kind === "doc_meta") {
        const manifest = parseManifest(JSON.parse(new TextDecoder().decode(data)));
        this.manifests.set(item.docId, manifest);
        const info = docInfoFromManifest(manifest);
        this.docs = this.docs.map((d) => (d.docId === item.docId ? info : d));
      } else if (item.kind === "thumbnail" || item.kind === "page_image") {
        const blob = new Blob([data], { type: "image/png" });
        const image = new Image();
        image.src = URL.createObjectURL(blob);
        this.images.set(keyOf(item), image);
        if (item.kind === "thumbnail") this.renderGrid();
      }
      this.status.textContent = `fetched ${this.fetched.size} resources`;
    });
  }

  private renderGrid(): void {
    if (this.engine) {
      this.grid.style.display = "none";
      return;
    }
    this.grid.style.display = "grid";
    this.grid.replaceChildren(
      ...this.docs.map((doc) => {
        const card = document.createElement("button");
        card.className = "card";
        const img = this.images.get(keyOf({ kind: "thumbnail", docId: doc.docId, number: null }));
        if (img) card.appendChild(img.cloneNode() as HTMLImageElement);
        const label = document.createElement("div");
        label.textContent = doc.title || doc.docId;
        card.appendChild(label);
        card.addEventListener("click", () => void this.open(doc.docId));
        return card;
      }),
    );
  }

  async open(docId: string): Promise<void> {
    const manifest = this.manifests.get(docId);
    if (!manifest) return;
    this.engine = new ReaderEngine(manifest, { screenAspect: this.canvas.width / this.canvas.height });
    this.state = this.engine.initialState();
    this.keyphrases = new Map(manifest.keyphrases.map((k) => [k.region, k.phrase]));
    this.dispatch({ kind: "select_document", docId });
    this.grid.style.display = "none";
    this.canvas.style.display = "block";
    // background acquisition: current page image first, audio later
    void this.runPlan(planFetches(this.docs, docId, { page: 0, sentence: 0 }, this.fetched));
  }

  dispatch(command: Command): void {
    if (!this.engine || !this.state) return;
    const [state, effects] = this.engine.apply(this.state, command);
    this.state = state;
    this.applyEffects(effects);
    this.render();
  }

  /** Advance the script clock; called from the animation loop while playing. */
  private frame(now: number): void {
    const dt = this.lastFrame ? now - this.lastFrame : 0;
    this.lastFrame = now;
    if (this.engine && this.state?.playing) {
      const [state, effects] = this.engine.advance(
        this.state,
        Math.round(this.state.clockMs + dt),
      );
      this.state = state;
      this.applyEffects(effects);
    }
    this.render(now);
    requestAnimationFrame((t) => this.frame(t));
  }

  private applyEffects(effects: UIEvent[]): void {
    for (const effect of effects) {
      switch (effect.kind) {
        case "highlight_sentence": {
          const info = this.engine?.sentenceInfo(effect.sentenceIndex);
          this.highlightSentenceRegion = info ? info.regionId : null;
          break;
        }
        case "highlight_region":
          this.highlightRegion = effect.regionId;
          break;
        case "highlight_link": {
          const manifest = this.engine?.manifest;
          const link = manifest?.links.find((l) => l.id === effect.linkId);
          this.highlightLinkTarget = link ? link.target : null;
          break;
        }
        case "vibrate":
          vibrate(effect.durationMs, () => this.pulse(effect.durationMs));
          break;
        case "pan_to":
          this.pan = {
            from: this.pan?.to ?? effect.viewport,
            to: effect.viewport,
            startedAt: performance.now(),
            durationMs: effect.animateMs,
          };
          break;
        case "play_clip":
          if (effect.clip.kind === "keyphrase") {
            speak(this.keyphrases.get(effect.clip.regionId) ?? "untitled region");
          } else if (effect.clip.kind === "notice") {
            beep(effect.clip.notice === "page_boundary" ? 520 : 330, 140);
          }
          break;
        case "show_warning":
          this.banner.textContent = "Warning, upcoming TTS may be unintelligible";
          this.banner.style.display = "block";
          setTimeout(() => (this.banner.style.display = "none"), 2500);
          break;
      }
    }
  }

  /** 150 ms visual pulse standing in for haptics. */
  private pulse(durationMs: number): void {
    this.canvas.classList.add("pulse");
    setTimeout(() => this.canvas.classList.remove("pulse"), Math.max(150, durationMs));
  }

  private currentViewport(now: number): Box | null {
    if (!this.state || this.state.view.kind !== "text") return null;
    const target = this.state.view.viewport;
    if (!this.pan) return target;
    const progress = Math.min(1, (now - this.pan.startedAt) / this.pan.durationMs);
    const ease = 1 - (1 - progress) * (1 - progress);
    const lerp = (a: number, b: number) => a + (b - a) * ease;
    if (progress >= 1) return target;
    return {
      x: lerp(this.pan.from.x, this.pan.to.x),
      y: lerp(this.pan.from.y, this.pan.to.y),
      w: lerp(this.pan.from.w, this.pan.to.w),
      h: lerp(this.pan.from.h, this.pan.to.h),
    };
  }

  render(now = performance.now()): void {
    if (!this.engine || !this.state) return;
    const view = this.state.view;
    if (view.kind === "document") {
      this.renderGrid();
      return;
    }
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const manifest = this.engine.manifest;
    const page = manifest.document.pages[view.pageIndex];
    ctx.fillStyle = "#f3f2ee";
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);

    // window from page coordinates onto the canvas
    const window_: Box =
      view.kind === "text"
        ? this.currentViewport(now) ?? { x: 0, y: 0, w: page.width, h: page.height }
        : { x: 0, y: 0, w: page.width, h: page.height };
    const scale = Math.min(this.canvas.width / window_.w, this.canvas.height / window_.h);
    const toCanvas = (box: Box): Box => ({
      x: (box.x - window_.x) * scale,
      y: (box.y - window_.y) * scale,
      w: box.w * scale,
      h: box.h * scale,
    });

    const img = this.images.get(
      keyOf({ kind: "page_image", docId: manifest.document.id, number: view.pageIndex }),
    );
    const pageBox = toCanvas({ x: 0, y: 0, w: page.width, h: page.height });
    if (img && img.complete) {
      ctx.drawImage(img, pageBox.x, pageBox.y, pageBox.w, pageBox.h);
    } else {
      ctx.strokeStyle = "#bbb";
      ctx.strokeRect(pageBox.x, pageBox.y, pageBox.w, pageBox.h);
    }

    const outline = (regionId: string | null, color: string, width = 2) => {
      if (!regionId) return;
      const region = page.regions.find((r) => r.id === regionId);
      if (!region) return;
      const box = toCanvas({ x: region.bbox[0], y: region.bbox[1], w: region.bbox[2], h: region.bbox[3] });
      ctx.lineWidth = width;
      ctx.strokeStyle = color;
      ctx.strokeRect(box.x, box.y, box.w, box.h);
    };
    outline(this.highlightSentenceRegion, "#2266dd", 3);
    outline(this.highlightRegion, "#22aa55", 3);
    outline(this.highlightLinkTarget, "#dd6622", 4);

    if (this.state.wheel.active) {
      ctx.beginPath();
      ctx.strokeStyle = "#888";
      ctx.setLineDash([6, 6]);
      ctx.arc(this.canvas.width / 2, this.canvas.height / 2, 120, 0, 2 * Math.PI);
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }
}
