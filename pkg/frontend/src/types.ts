/** Wire-format types for bundle manifests served by the delivery endpoints. */

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export type RegionKind =
  | "paragraph"
  | "figure"
  | "table"
  | "caption"
  | "heading"
  | "footnote"
  | "reference_entry"
  | "other";

export interface WireRegion {
  id: string;
  kind: RegionKind;
  bbox: [number, number, number, number];
  text: string;
  ocr_confidence?: number;
}

export interface WirePage {
  width: number;
  height: number;
  regions: WireRegion[];
}

export interface WireDocument {
  id: string;
  title: string;
  source_kind: "digital" | "scanned";
  reading_order: string[];
  pages: WirePage[];
}

export interface WireSpan {
  region: string;
  start: number;
  end: number;
}

export interface WireLink {
  id: string;
  source: WireSpan;
  target: string;
  kind: "figure_ref" | "table_ref" | "section_ref" | "citation";
  label: string;
  confidence: number;
}

export interface WireKeyphrase {
  region: string;
  phrase: string;
  score: number;
}

export type WireEvent =
  | { type: "speak"; t_start: number; t_end: number; span: WireSpan; sentence: number }
  | { type: "sentence_boundary"; t: number; sentence: number }
  | { type: "link_trigger"; t: number; link: string }
  | { type: "warning"; t_start: number; t_end: number; region: string; text: string }
  | { type: "region_start"; t: number; region: string }
  | { type: "page_boundary"; t: number; page: number }
  | { type: "document_end"; t: number };

export interface WireScript {
  document_id: string;
  timing: Record<string, unknown>;
  warning_threshold: number;
  events: WireEvent[];
}

export interface Manifest {
  bundle_version: number;
  document: WireDocument;
  links: WireLink[];
  keyphrases: WireKeyphrase[];
  script: WireScript;
}

export interface DocListing {
  id: string;
  title: string;
  pages: number;
  clips: number;
}

export function eventTime(event: WireEvent): number {
  return "t" in event ? event.t : event.t_start;
}

export function parseManifest(raw: unknown): Manifest {
  const manifest = raw as Manifest;
  if (!manifest || manifest.bundle_version !== 1) {
    throw new Error(`unsupported bundle_version: ${manifest?.bundle_version}`);
  }
  return manifest;
}
