/** Reader state machine, one-to-one with the compiler's playback engine.
 *
 * Same command/event contract and the same arithmetic, so replaying a
 * recorded command/clock trace here emits effects identical (including
 * formatted trace lines) to the reference engine's golden output.
 */

import { clampViewport, containsPoint, fitRegion } from "./geometry.js";
import type { Box, Manifest, WireEvent, WireLink, WireRegion } from "./types.js";
import { eventTime } from "./types.js";

export interface PlayerConfig {
  screenAspect: number;
  marginFrac: number;
  wheelStepDegrees: number;
  sentenceVibrateMs: number;
  linkVibrateMs: number;
  panAnimateMs: number;
}

export const DEFAULT_CONFIG: PlayerConfig = {
  screenAspect: 0.5625,
  marginFrac: 0.05,
  wheelStepDegrees: 30,
  sentenceVibrateMs: 40,
  linkVibrateMs: 200,
  panAnimateMs: 400,
};

export type ViewState =
  | { kind: "document"; selectedDoc: string | null }
  | { kind: "page"; pageIndex: number }
  | { kind: "text"; pageIndex: number; viewport: Box };

export interface WheelState {
  accumulatedDegrees: number;
  cursorSentence: number;
  active: boolean;
  pinned: boolean;
}

export interface PlaybackState {
  clockMs: number;
  eventCursor: number;
  playing: boolean;
  view: ViewState;
  currentSentence: number | null;
  wheel: WheelState;
}

export type Clip =
  | { kind: "keyphrase"; regionId: string }
  | { kind: "sentence"; index: number }
  | { kind: "notice"; notice: "page_boundary" | "document_boundary" };

export type UIEvent =
  | { kind: "highlight_sentence"; t: number; sentenceIndex: number }
  | { kind: "highlight_region"; t: number; regionId: string }
  | { kind: "vibrate"; t: number; durationMs: number }
  | { kind: "highlight_link"; t: number; linkId: string }
  | { kind: "pan_to"; t: number; viewport: Box; animateMs: number }
  | { kind: "play_clip"; t: number; clip: Clip }
  | { kind: "show_warning"; t: number; regionId: string };

export type Command =
  | { kind: "select_document"; docId: string }
  | { kind: "select_region"; regionId: string }
  | { kind: "press_at"; x: number; y: number }
  | { kind: "toggle_play" }
  | { kind: "zoom_toggle" }
  | { kind: "flick"; direction: "next" | "prev" }
  | { kind: "wheel_move"; deltaDegrees: number }
  | { kind: "wheel_release" };

interface SentenceInfo {
  regionId: string;
  pageIndex: number;
  tStart: number;
}

function lowerBound(times: number[], t: number): number {
  let lo = 0;
  let hi = times.length;
  while (lo < hi) {
    const mid = (lo + hi) >> 1;
    if (times[mid] < t) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

export class ReaderEngine {
  readonly manifest: Manifest;
  readonly config: PlayerConfig;
  readonly sentenceCount: number;
  readonly endTime: number;

  private readonly events: WireEvent[];
  private readonly times: number[];
  private readonly links = new Map<string, WireLink>();
  private readonly regions = new Map<string, WireRegion & { pageIndex: number }>();
  private readonly sentences = new Map<number, SentenceInfo>();
  private readonly sentenceOrder: number[];

  constructor(manifest: Manifest, config: Partial<PlayerConfig> = {}) {
    this.manifest = manifest;
    this.config = { ...DEFAULT_CONFIG, ...config };
    this.events = manifest.script.events;
    this.times = this.events.map(eventTime);
    for (const link of manifest.links) this.links.set(link.id, link);
    manifest.document.pages.forEach((page, pageIndex) => {
      for (const region of page.regions) this.regions.set(region.id, { ...region, pageIndex });
    });
    for (const event of this.events) {
      if (event.type === "speak" && !this.sentences.has(event.sentence)) {
        const region = this.mustRegion(event.span.region);
        this.sentences.set(event.sentence, {
          regionId: region.id,
          pageIndex: region.pageIndex,
          tStart: event.t_start,
        });
      }
    }
    this.sentenceCount = this.sentences.size;
    this.sentenceOrder = [...this.sentences.keys()].sort((a, b) => a - b);
    this.endTime = this.events.length ? eventTime(this.events[this.events.length - 1]) : 0;
  }

  private mustRegion(id: string): WireRegion & { pageIndex: number } {
    const region = this.regions.get(id);
    if (!region) throw new Error(`unknown region ${id}`);
    return region;
  }

  regionBox(id: string): Box {
    const [x, y, w, h] = this.mustRegion(id).bbox;
    return { x, y, w, h };
  }

  regionPage(id: string): number {
    return this.mustRegion(id).pageIndex;
  }

  sentenceInfo(index: number): SentenceInfo | undefined {
    return this.sentences.get(index);
  }

  initialState(): PlaybackState {
    return {
      clockMs: 0,
      eventCursor: 0,
      playing: false,
      view: { kind: "document", selectedDoc: null },
      currentSentence: null,
      wheel: { accumulatedDegrees: 0, cursorSentence: 0, active: false, pinned: false },
    };
  }

  private page(index: number) {
    return this.manifest.document.pages[index];
  }

  private fit(target: Box, pageIndex: number): Box {
    return fitRegion(target, this.page(pageIndex), this.config.screenAspect, this.config.marginFrac);
  }

  // --- clock-driven progression -------------------------------------------

  advance(state: PlaybackState, newClockMs: number): [PlaybackState, UIEvent[]] {
    if (newClockMs < state.clockMs) {
      throw new Error(`clock moved backwards: ${state.clockMs} -> ${newClockMs}`);
    }
    if (!state.playing) return [state, []];

    const effects: UIEvent[] = [];
    let cursor = state.eventCursor;
    let view = state.view;
    let playing: boolean = state.playing;
    let current = state.currentSentence;
    let endedAt: number | null = null;

    while (cursor < this.events.length && this.times[cursor] <= newClockMs) {
      const event = this.events[cursor];
      cursor += 1;
      switch (event.type) {
        case "speak":
          if (event.sentence !== current) {
            current = event.sentence;
            effects.push({ kind: "highlight_sentence", t: event.t_start, sentenceIndex: current });
          }
          break;
        case "sentence_boundary":
          if (state.wheel.active) {
            effects.push({ kind: "vibrate", t: event.t, durationMs: this.config.sentenceVibrateMs });
          }
          break;
        case "link_trigger":
          view = this.triggerLink(event.t, event.link, view, effects);
          break;
        case "warning":
          effects.push({ kind: "show_warning", t: event.t_start, regionId: event.region });
          break;
        case "page_boundary":
          if (view.kind === "page") {
            view = { kind: "page", pageIndex: event.page };
          } else if (view.kind === "text") {
            view = {
              kind: "text",
              pageIndex: event.page,
              viewport: clampViewport(view.viewport, this.page(event.page)),
            };
          }
          break;
        case "document_end":
          playing = false;
          endedAt = event.t;
          break;
        case "region_start":
          break;
      }
    }

    return [
      {
        ...state,
        // clock is the audio position: it cannot run past the document end
        clockMs: endedAt === null ? newClockMs : endedAt,
        eventCursor: cursor,
        playing,
        view,
        currentSentence: current,
      },
      effects,
    ];
  }

  private triggerLink(t: number, linkId: string, view: ViewState, effects: UIEvent[]): ViewState {
    const link = this.links.get(linkId);
    if (!link) throw new Error(`unknown link ${linkId}`);
    effects.push({ kind: "vibrate", t, durationMs: this.config.linkVibrateMs });
    if (view.kind === "text") {
      const target = this.mustRegion(link.target);
      const viewport = this.fit(this.regionBox(link.target), target.pageIndex);
      effects.push({ kind: "pan_to", t, viewport, animateMs: this.config.panAnimateMs });
      return { kind: "text", pageIndex: target.pageIndex, viewport };
    }
    effects.push({ kind: "highlight_link", t, linkId });
    return view;
  }

  // --- commands --------------------------------------------------------------

  apply(state: PlaybackState, command: Command): [PlaybackState, UIEvent[]] {
    switch (command.kind) {
      case "select_document":
        return this.selectDocument(state, command.docId);
      case "select_region":
        return this.selectRegion(state, command.regionId);
      case "press_at":
        return this.pressAt(state, command.x, command.y);
      case "toggle_play":
        return [{ ...state, playing: !state.playing }, []];
      case "zoom_toggle":
        return [this.zoomToggle(state), []];
      case "flick":
        return [this.flick(state, command.direction), []];
      case "wheel_move":
        return this.wheelMove(state, command.deltaDegrees);
      case "wheel_release":
        return this.wheelRelease(state);
    }
  }

  private selectDocument(state: PlaybackState, docId: string): [PlaybackState, UIEvent[]] {
    if (docId !== this.manifest.document.id) throw new Error(`unknown document ${docId}`);
    if (!this.manifest.document.pages.length) {
      return [{ ...state, view: { kind: "document", selectedDoc: docId } }, []];
    }
    return [{ ...state, view: { kind: "page", pageIndex: 0 } }, []];
  }

  private firstSentenceOfRegion(regionId: string): number | null {
    for (const index of this.sentenceOrder) {
      if (this.sentences.get(index)!.regionId === regionId) return index;
    }
    return null;
  }

  private firstSentenceOnPage(pageIndex: number): number | null {
    for (const index of this.sentenceOrder) {
      if (this.sentences.get(index)!.pageIndex === pageIndex) return index;
    }
    return null;
  }

  private selectRegion(state: PlaybackState, regionId: string): [PlaybackState, UIEvent[]] {
    this.mustRegion(regionId);
    const effects: UIEvent[] = [{ kind: "highlight_region", t: state.clockMs, regionId }];
    const first = this.firstSentenceOfRegion(regionId);
    if (first === null) return [state, effects];
    const seeked = this.seek(state, this.sentences.get(first)!.tStart);
    return [{ ...seeked, playing: true }, effects];
  }

  private pressAt(state: PlaybackState, x: number, y: number): [PlaybackState, UIEvent[]] {
    if (state.view.kind === "document") {
      return this.selectDocument(state, this.manifest.document.id);
    }
    const page = this.page(state.view.pageIndex);
    const hits = page.regions.filter((r) =>
      containsPoint({ x: r.bbox[0], y: r.bbox[1], w: r.bbox[2], h: r.bbox[3] }, x, y),
    );
    if (!hits.length) return [state, []];
    hits.sort((a, b) => {
      const areaA = a.bbox[2] * a.bbox[3];
      const areaB = b.bbox[2] * b.bbox[3];
      return areaA !== areaB ? areaA - areaB : a.id < b.id ? -1 : 1;
    });
    return this.selectRegion(state, hits[0].id);
  }

  private zoomToggle(state: PlaybackState): PlaybackState {
    const view = state.view;
    if (view.kind === "text") return { ...state, view: { kind: "page", pageIndex: view.pageIndex } };
    if (view.kind !== "page") return state;
    const page = this.page(view.pageIndex);
    let target: Box = { x: 0, y: 0, w: page.width, h: page.height };
    const current = state.currentSentence;
    if (current !== null && this.sentences.get(current)!.pageIndex === view.pageIndex) {
      target = this.regionBox(this.sentences.get(current)!.regionId);
    } else {
      const fallback = this.firstSentenceOnPage(view.pageIndex);
      if (fallback !== null) target = this.regionBox(this.sentences.get(fallback)!.regionId);
    }
    return {
      ...state,
      view: { kind: "text", pageIndex: view.pageIndex, viewport: this.fit(target, view.pageIndex) },
    };
  }

  private flick(state: PlaybackState, direction: "next" | "prev"): PlaybackState {
    const view = state.view;
    const pageCount = this.manifest.document.pages.length;
    if (view.kind === "document" || !pageCount) return state;
    const delta = direction === "next" ? 1 : -1;
    const pageIndex = Math.min(Math.max(view.pageIndex + delta, 0), pageCount - 1);
    if (view.kind === "page") return { ...state, view: { kind: "page", pageIndex } };
    return {
      ...state,
      view: {
        kind: "text",
        pageIndex,
        viewport: clampViewport(view.viewport, this.page(pageIndex)),
      },
    };
  }

  private wheelMove(state: PlaybackState, deltaDegrees: number): [PlaybackState, UIEvent[]] {
    if (state.view.kind === "document") return [state, []];
    let wheel = state.wheel;
    let playing = state.playing;
    if (!wheel.active) {
      // Engaging the wheel pauses playback and picks up the scrub cursor at
      // the sentence currently being read.
      const cursor = state.currentSentence !== null ? state.currentSentence : wheel.cursorSentence;
      wheel = { accumulatedDegrees: 0, cursorSentence: cursor, active: true, pinned: false };
      playing = false;
    }

    const effects: UIEvent[] = [];
    let acc = wheel.accumulatedDegrees + deltaDegrees;
    let cursor = wheel.cursorSentence;
    let pinned = wheel.pinned;
    const quantum = this.config.wheelStepDegrees;
    while (acc >= quantum) {
      acc -= quantum;
      [cursor, pinned] = this.wheelStep(state, cursor, +1, pinned, effects);
    }
    while (acc <= -quantum) {
      acc += quantum;
      [cursor, pinned] = this.wheelStep(state, cursor, -1, pinned, effects);
    }

    return [
      {
        ...state,
        playing,
        wheel: { accumulatedDegrees: acc, cursorSentence: cursor, active: true, pinned },
      },
      effects,
    ];
  }

  private wheelStep(
    state: PlaybackState,
    cursor: number,
    direction: 1 | -1,
    pinned: boolean,
    effects: UIEvent[],
  ): [number, boolean] {
    const t = state.clockMs;
    const next = cursor + direction;
    if (this.sentenceCount === 0 || next < 0 || next >= this.sentenceCount) {
      if (!pinned) {
        effects.push({ kind: "play_clip", t, clip: { kind: "notice", notice: "document_boundary" } });
      }
      return [cursor, true];
    }
    effects.push({ kind: "vibrate", t, durationMs: this.config.sentenceVibrateMs });
    const oldInfo = this.sentences.get(cursor);
    const newInfo = this.sentences.get(next)!;
    if (!oldInfo || newInfo.regionId !== oldInfo.regionId) {
      effects.push({ kind: "play_clip", t, clip: { kind: "keyphrase", regionId: newInfo.regionId } });
    }
    if (oldInfo && newInfo.pageIndex !== oldInfo.pageIndex) {
      effects.push({ kind: "play_clip", t, clip: { kind: "notice", notice: "page_boundary" } });
    }
    return [next, false];
  }

  private wheelRelease(state: PlaybackState): [PlaybackState, UIEvent[]] {
    const wheel = state.wheel;
    if (!wheel.active) return [state, []];
    const reset: WheelState = {
      accumulatedDegrees: 0,
      cursorSentence: wheel.cursorSentence,
      active: false,
      pinned: false,
    };
    if (this.sentenceCount === 0) return [{ ...state, wheel: reset }, []];
    const info = this.sentences.get(wheel.cursorSentence)!;
    const seeked = this.seek(state, info.tStart);
    return [{ ...seeked, playing: true, wheel: reset }, []];
  }

  private seek(state: PlaybackState, t: number): PlaybackState {
    return { ...state, clockMs: t, eventCursor: lowerBound(this.times, t), currentSentence: null };
  }
}

/** Python-repr-compatible float rendering (shortest round trip, ".0" kept). */
function fmtNum(value: number): string {
  return Number.isInteger(value) ? `${value}.0` : `${value}`;
}

/** One-line rendering identical to the reference engine's trace format. */
export function formatUiEvent(event: UIEvent): string {
  switch (event.kind) {
    case "highlight_sentence":
      return `${event.t} highlight_sentence sentence=${event.sentenceIndex}`;
    case "highlight_region":
      return `${event.t} highlight_region region=${event.regionId}`;
    case "vibrate":
      return `${event.t} vibrate ms=${event.durationMs}`;
    case "highlight_link":
      return `${event.t} highlight_link link=${event.linkId}`;
    case "pan_to": {
      const v = event.viewport;
      return (
        `${event.t} pan_to x=${fmtNum(v.x)} y=${fmtNum(v.y)}` +
        ` w=${fmtNum(v.w)} h=${fmtNum(v.h)} animate_ms=${event.animateMs}`
      );
    }
    case "play_clip": {
      const clip = event.clip;
      if (clip.kind === "keyphrase") return `${event.t} play_clip keyphrase region=${clip.regionId}`;
      if (clip.kind === "sentence") return `${event.t} play_clip sentence index=${clip.index}`;
      return `${event.t} play_clip notice kind=${clip.notice}`;
    }
    case "show_warning":
      return `${event.t} show_warning region=${event.regionId}`;
  }
}

/** Parse a command/clock trace in the CLI's text format. */
export function parseCommandTrace(
  text: string,
): Array<{ kind: "clock"; ms: number } | { kind: "apply"; command: Command }> {
  const steps: Array<{ kind: "clock"; ms: number } | { kind: "apply"; command: Command }> = [];
  for (const raw of text.split("\n")) {
    const line = raw.split("#", 1)[0].trim();
    if (!line) continue;
    const [verb, ...rest] = line.split(/\s+/);
    switch (verb) {
      case "clock":
        steps.push({ kind: "clock", ms: Number(rest[0]) });
        break;
      case "select_document":
        steps.push({ kind: "apply", command: { kind: "select_document", docId: rest[0] } });
        break;
      case "select_region":
        steps.push({ kind: "apply", command: { kind: "select_region", regionId: rest[0] } });
        break;
      case "press_at":
        steps.push({
          kind: "apply",
          command: { kind: "press_at", x: Number(rest[0]), y: Number(rest[1]) },
        });
        break;
      case "toggle_play":
        steps.push({ kind: "apply", command: { kind: "toggle_play" } });
        break;
      case "zoom_toggle":
        steps.push({ kind: "apply", command: { kind: "zoom_toggle" } });
        break;
      case "flick":
        steps.push({
          kind: "apply",
          command: { kind: "flick", direction: rest[0] as "next" | "prev" },
        });
        break;
      case "wheel_move":
        steps.push({ kind: "apply", command: { kind: "wheel_move", deltaDegrees: Number(rest[0]) } });
        break;
      case "wheel_release":
        steps.push({ kind: "apply", command: { kind: "wheel_release" } });
        break;
      default:
        throw new Error(`unknown command ${verb}`);
    }
  }
  return steps;
}
