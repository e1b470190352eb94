"""Layout interchange parsing, reading-order inference, sentence segmentation.

The layout file is the structured-text output of an upstream segmentation
step: document metadata, per-page dimensions, and per-region kind/bbox/text.
See docs/layout-format.md for the schema. Everything in this module is a pure
function; documents can be processed in parallel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .model import (
    TEXT_KINDS,
    BoundingBox,
    Document,
    Page,
    Region,
    RegionKind,
    SourceKind,
    TextSpan,
    validate,
)

LAYOUT_VERSION = 1

# Column split is accepted when the gap between midpoint clusters exceeds
# this fraction of the page width.
COLUMN_GAP_FRAC = 0.10

# Trailing '.' of these never terminates a sentence. Matching is
# case-sensitive ("No. 5" is numbering; "...the answer is no." is an end).
ABBREVIATIONS = ("Fig.", "Dr.", "et al.", "e.g.", "i.e.", "vs.", "pp.", "No.")

_TERMINATORS = ".!?"


class LayoutError(ValueError):
    """Raised when a layout file is syntactically or semantically invalid."""


@dataclass(frozen=True)
class Sentence:
    """A sentence span; ``index`` counts across the whole reading order."""

    index: int
    span: TextSpan


def _require(obj: dict, key: str, kind: type, where: str) -> Any:
    if key not in obj:
        raise LayoutError(f"{where}: missing required field {key!r}")
    value = obj[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise LayoutError(f"{where}: field {key!r} must be a number")
        return float(value)
    if not isinstance(value, kind):
        raise LayoutError(f"{where}: field {key!r} must be {kind.__name__}")
    return value


def parse_layout(data: bytes | str) -> Document:
    """Parse layout bytes into a validated Document with inferred reading order."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LayoutError(
            f"layout syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(payload, dict):
        raise LayoutError("layout root must be an object")

    version = payload.get("layout_version")
    if version != LAYOUT_VERSION:
        raise LayoutError(f"unsupported layout_version {version!r}, expected {LAYOUT_VERSION}")

    doc_id = _require(payload, "id", str, "document")
    title = _require(payload, "title", str, "document")
    source_raw = _require(payload, "source_kind", str, "document")
    try:
        source_kind = SourceKind(source_raw)
    except ValueError:
        raise LayoutError(
            f"document: source_kind {source_raw!r} not one of "
            f"{[k.value for k in SourceKind]}"
        ) from None

    pages_raw = _require(payload, "pages", list, "document")
    pages: list[Page] = []
    for page_index, page_raw in enumerate(pages_raw):
        where = f"page {page_index}"
        if not isinstance(page_raw, dict):
            raise LayoutError(f"{where}: must be an object")
        width = _require(page_raw, "width", float, where)
        height = _require(page_raw, "height", float, where)
        regions: list[Region] = []
        for region_pos, region_raw in enumerate(page_raw.get("regions", [])):
            rwhere = f"{where}, region {region_pos}"
            if not isinstance(region_raw, dict):
                raise LayoutError(f"{rwhere}: must be an object")
            region_id = _require(region_raw, "id", str, rwhere)
            kind_raw = _require(region_raw, "kind", str, rwhere)
            try:
                kind = RegionKind(kind_raw)
            except ValueError:
                raise LayoutError(
                    f"{rwhere}: kind {kind_raw!r} not one of "
                    f"{[k.value for k in RegionKind]}"
                ) from None
            bbox_raw = _require(region_raw, "bbox", list, rwhere)
            if len(bbox_raw) != 4 or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in bbox_raw
            ):
                raise LayoutError(f"{rwhere}: bbox must be [x, y, w, h] numbers")
            confidence = region_raw.get("ocr_confidence")
            if confidence is not None and (
                not isinstance(confidence, (int, float)) or isinstance(confidence, bool)
            ):
                raise LayoutError(f"{rwhere}: ocr_confidence must be a number")
            regions.append(
                Region(
                    id=region_id,
                    page_index=page_index,
                    bbox=BoundingBox(*(float(v) for v in bbox_raw)),
                    kind=kind,
                    text=region_raw.get("text", ""),
                    ocr_confidence=None if confidence is None else float(confidence),
                )
            )
        pages.append(Page(index=page_index, width=width, height=height, regions=tuple(regions)))

    order: list[str] = []
    for page in pages:
        order.extend(infer_reading_order(page))
    document = Document(
        id=doc_id,
        title=title,
        source_kind=source_kind,
        pages=tuple(pages),
        reading_order=tuple(order),
    )
    violations = validate(document)
    if violations:
        raise LayoutError(
            "layout failed validation:\n  " + "\n  ".join(violations)
        )
    return document


def serialize_layout(document: Document) -> bytes:
    """Write a Document back to layout bytes (reading order is re-inferred on parse)."""
    payload: dict[str, Any] = {
        "layout_version": LAYOUT_VERSION,
        "id": document.id,
        "title": document.title,
        "source_kind": document.source_kind.value,
        "pages": [],
    }
    for page in document.pages:
        page_obj: dict[str, Any] = {"width": page.width, "height": page.height, "regions": []}
        for region in page.regions:
            region_obj: dict[str, Any] = {
                "id": region.id,
                "kind": region.kind.value,
                "bbox": [region.bbox.x, region.bbox.y, region.bbox.w, region.bbox.h],
                "text": region.text,
            }
            if region.ocr_confidence is not None:
                region_obj["ocr_confidence"] = region.ocr_confidence
            page_obj["regions"].append(region_obj)
        payload["pages"].append(page_obj)
    return (json.dumps(payload, indent=2, ensure_ascii=True) + "\n").encode("utf-8")


def _mid_x(region: Region) -> float:
    return region.bbox.x + region.bbox.w / 2.0


def _split_columns(regions: list[Region], page_width: float) -> list[list[Region]]:
    """Split into at most two columns at the widest midpoint gap, if wide enough."""
    if len(regions) < 2:
        return [regions]
    ordered = sorted(regions, key=lambda r: (_mid_x(r), r.id))
    best_gap = -1.0
    best_cut = 0
    for i in range(len(ordered) - 1):
        gap = _mid_x(ordered[i + 1]) - _mid_x(ordered[i])
        if gap > best_gap:
            best_gap = gap
            best_cut = i + 1
    if best_gap > COLUMN_GAP_FRAC * page_width:
        return [ordered[:best_cut], ordered[best_cut:]]
    return [regions]


def infer_reading_order(page: Page) -> list[str]:
    """Deterministic narration order for a page's text-bearing regions.

    Body regions read column-major (left column fully before the right one)
    and top-to-bottom within a column; footnotes follow the body so a linear
    narration does not interrupt paragraph flow.
    """
    text_regions = [r for r in page.regions if r.kind in TEXT_KINDS]
    body = [r for r in text_regions if r.kind is not RegionKind.FOOTNOTE]
    footnotes = [r for r in text_regions if r.kind is RegionKind.FOOTNOTE]

    order: list[Region] = []
    for column in _split_columns(body, page.width):
        order.extend(sorted(column, key=lambda r: (r.bbox.y, r.bbox.x, r.id)))
    order.extend(sorted(footnotes, key=lambda r: (r.bbox.y, r.bbox.x, r.id)))
    return [r.id for r in order]


def _ends_with_abbreviation(text: str, dot_index: int) -> bool:
    head = text[: dot_index + 1]
    for abbr in ABBREVIATIONS:
        if head.endswith(abbr):
            prev = dot_index - len(abbr)
            if prev < 0 or not head[prev].isalnum():
                return True
    return False


def _is_boundary(text: str, i: int) -> bool:
    """Terminator at ``i`` ends a sentence iff followed by ws+uppercase or region end."""
    j = i + 1
    k = j
    while k < len(text) and text[k].isspace():
        k += 1
    if k == len(text):
        return True
    return k > j and text[k].isupper()


def split_sentence_spans(text: str) -> list[tuple[int, int]]:
    """Character spans of sentences within one region's text.

    Spans start and end on non-whitespace and jointly cover every
    non-whitespace character of the region.
    """
    boundaries: list[int] = []
    for i, ch in enumerate(text):
        if ch not in _TERMINATORS:
            continue
        if ch == "." and _ends_with_abbreviation(text, i):
            continue
        if _is_boundary(text, i):
            boundaries.append(i)

    spans: list[tuple[int, int]] = []
    cursor = 0
    for boundary in boundaries:
        start = cursor
        while start <= boundary and text[start].isspace():
            start += 1
        if start <= boundary:
            spans.append((start, boundary + 1))
        cursor = boundary + 1
    # Trailing text with no terminator still forms a final sentence.
    start = cursor
    while start < len(text) and text[start].isspace():
        start += 1
    if start < len(text):
        end = len(text)
        while text[end - 1].isspace():
            end -= 1
        spans.append((start, end))
    return spans


def segment_sentences(document: Document) -> list[Sentence]:
    """Sentences of the whole document, indexed in reading order."""
    by_id = {r.id: r for r in document.iter_regions()}
    sentences: list[Sentence] = []
    for region_id in document.reading_order:
        region = by_id[region_id]
        for start, end in split_sentence_spans(region.text):
            sentences.append(
                Sentence(index=len(sentences), span=TextSpan(region_id, start, end))
            )
    return sentences
