/** Client-side prefetch planner: priority-ordered acquisition of bundle
 * resources. Metadata and thumbnails come first; once a document is open,
 * its current page image, then remaining pages by distance, then audio for
 * the current page, then the rest of the audio as background work. */

import type { Manifest } from "./types.js";

export const PRIORITY = {
  docMeta: 0,
  thumbnail: 1,
  currentPageImage: 2,
  otherPageImage: 3,
  nearAudio: 4,
  farAudio: 5,
} as const;

export type FetchKind = "doc_meta" | "thumbnail" | "page_image" | "audio_clip";

export interface FetchItem {
  kind: FetchKind;
  docId: string;
  priorityClass: number;
  number: number | null;
  distance: number;
}

export type FetchKey = string;

export function keyOf(item: Pick<FetchItem, "kind" | "docId" | "number">): FetchKey {
  return `${item.kind}:${item.docId}:${item.number ?? ""}`;
}

export interface DocInfo {
  docId: string;
  title: string;
  pageCount: number | null;
  sentencePages: number[];
}

export interface PlanCursor {
  page: number;
  sentence: number;
}

export function docInfoFromManifest(manifest: Manifest): DocInfo {
  const regionPages = new Map<string, number>();
  manifest.document.pages.forEach((page, pageIndex) => {
    for (const region of page.regions) regionPages.set(region.id, pageIndex);
  });
  const firstPage = new Map<number, number>();
  for (const event of manifest.script.events) {
    if (event.type === "speak" && !firstPage.has(event.sentence)) {
      firstPage.set(event.sentence, regionPages.get(event.span.region) ?? 0);
    }
  }
  const sentencePages = [...firstPage.keys()].sort((a, b) => a - b).map((i) => firstPage.get(i)!);
  return {
    docId: manifest.document.id,
    title: manifest.document.title,
    pageCount: manifest.document.pages.length,
    sentencePages,
  };
}

export function planFetches(
  docs: DocInfo[],
  openedDoc: string | null = null,
  cursor: PlanCursor = { page: 0, sentence: 0 },
  fetched: ReadonlySet<FetchKey> = new Set(),
): FetchItem[] {
  const weighted: Array<{ order: number[]; item: FetchItem }> = [];
  const add = (item: FetchItem, order: number[]) => {
    if (!fetched.has(keyOf(item))) weighted.push({ order: [item.priorityClass, ...order], item });
  };

  if (openedDoc === null) {
    docs.forEach((doc, pos) => {
      add({ kind: "doc_meta", docId: doc.docId, priorityClass: PRIORITY.docMeta, number: null, distance: 0 }, [pos]);
      add({ kind: "thumbnail", docId: doc.docId, priorityClass: PRIORITY.thumbnail, number: null, distance: 0 }, [pos]);
    });
  } else {
    const doc = docs.find((d) => d.docId === openedDoc);
    if (!doc) throw new Error(`unknown document ${openedDoc}`);
    add({ kind: "doc_meta", docId: doc.docId, priorityClass: PRIORITY.docMeta, number: null, distance: 0 }, [0]);
    add({ kind: "thumbnail", docId: doc.docId, priorityClass: PRIORITY.thumbnail, number: null, distance: 0 }, [0]);
    if (doc.pageCount !== null) {
      for (let page = 0; page < doc.pageCount; page++) {
        if (page === cursor.page) {
          add(
            { kind: "page_image", docId: doc.docId, priorityClass: PRIORITY.currentPageImage, number: page, distance: 0 },
            [0, page],
          );
        } else {
          const distance = Math.abs(page - cursor.page);
          add(
            { kind: "page_image", docId: doc.docId, priorityClass: PRIORITY.otherPageImage, number: page, distance },
            [distance, page],
          );
        }
      }
      doc.sentencePages.forEach((page, sentence) => {
        const distance = Math.abs(sentence - cursor.sentence);
        const priorityClass = page === cursor.page ? PRIORITY.nearAudio : PRIORITY.farAudio;
        add(
          { kind: "audio_clip", docId: doc.docId, priorityClass, number: sentence, distance },
          [distance, sentence],
        );
      });
    }
  }

  weighted.sort((a, b) => {
    for (let i = 0; i < Math.max(a.order.length, b.order.length); i++) {
      const diff = (a.order[i] ?? 0) - (b.order[i] ?? 0);
      if (diff !== 0) return diff;
    }
    return 0;
  });
  return weighted.map((entry) => entry.item);
}
