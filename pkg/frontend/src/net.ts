/** Delivery client: resolves plan items to endpoint URLs and fetches them in
 * plan order with a bounded number of in-flight requests. */

import type { FetchItem, FetchKey } from "./planner.js";
import { keyOf } from "./planner.js";
import type { DocListing } from "./types.js";

export type FetchFn = (url: string) => Promise<Response>;

export class DeliveryClient {
  readonly baseUrl: string;
  readonly maxInFlight: number;
  readonly issued: FetchKey[] = [];
  private readonly fetchFn: FetchFn;

  constructor(baseUrl: string, maxInFlight = 2, fetchFn: FetchFn = (url) => fetch(url)) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.maxInFlight = maxInFlight;
    this.fetchFn = fetchFn;
  }

  urlFor(item: FetchItem): string {
    switch (item.kind) {
      case "doc_meta":
        return `${this.baseUrl}/docs/${item.docId}/meta`;
      case "thumbnail":
        return `${this.baseUrl}/docs/${item.docId}/thumb`;
      case "page_image":
        return `${this.baseUrl}/docs/${item.docId}/pages/${item.number}/image`;
      case "audio_clip":
        return `${this.baseUrl}/docs/${item.docId}/audio/${item.number}`;
    }
  }

  async listDocs(): Promise<DocListing[]> {
    const response = await this.fetchFn(`${this.baseUrl}/docs`);
    if (!response.ok) throw new Error(`listing failed: ${response.status}`);
    return (await response.json()) as DocListing[];
  }

  async fetchItem(item: FetchItem): Promise<ArrayBuffer> {
    this.issued.push(keyOf(item));
    const response = await this.fetchFn(this.urlFor(item));
    if (!response.ok) throw new Error(`${this.urlFor(item)} failed: ${response.status}`);
    return response.arrayBuffer();
  }

  /** Consume the plan strictly in order, keeping at most maxInFlight open.
   * Results are reported through onItem as they land. */
  async runPlan(
    plan: FetchItem[],
    onItem?: (item: FetchItem, data: ArrayBuffer) => void,
  ): Promise<Map<FetchKey, ArrayBuffer>> {
    const results = new Map<FetchKey, ArrayBuffer>();
    const pending: Array<Promise<void>> = [];
    for (const item of plan) {
      if (pending.length >= this.maxInFlight) {
        await pending.shift();
      }
      const task = this.fetchItem(item).then((data) => {
        results.set(keyOf(item), data);
        onItem?.(item, data);
      });
      pending.push(task);
    }
    await Promise.all(pending);
    return results;
  }
}
