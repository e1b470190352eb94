"""Core document model: pages, typed regions, links, and structural validation.

Everything here is immutable after construction and safe to share across
threads. ``validate`` is total: it reports invariant violations as data and
never raises on structurally well-typed input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class SourceKind(str, Enum):
    DIGITAL = "digital"
    SCANNED = "scanned"


class RegionKind(str, Enum):
    PARAGRAPH = "paragraph"
    FIGURE = "figure"
    TABLE = "table"
    CAPTION = "caption"
    HEADING = "heading"
    FOOTNOTE = "footnote"
    REFERENCE_ENTRY = "reference_entry"
    OTHER = "other"


#: Region kinds that carry narratable text and belong in the reading order.
TEXT_KINDS = frozenset(
    {
        RegionKind.PARAGRAPH,
        RegionKind.HEADING,
        RegionKind.FOOTNOTE,
        RegionKind.REFERENCE_ENTRY,
        RegionKind.CAPTION,
    }
)


class LinkKind(str, Enum):
    FIGURE_REF = "figure_ref"
    TABLE_REF = "table_ref"
    SECTION_REF = "section_ref"
    CITATION = "citation"


# Slack for floating-point containment checks on page geometry.
_GEOM_EPS = 1e-9


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned rectangle in page units; origin top-left, y grows down."""

    x: float
    y: float
    w: float
    h: float

    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def expanded(self, margin_frac: float) -> "BoundingBox":
        """Grow by margin_frac of the box's own size on every side."""
        mx = self.w * margin_frac
        my = self.h * margin_frac
        return BoundingBox(self.x - mx, self.y - my, self.w + 2 * mx, self.h + 2 * my)

    def contains_point(self, px: float, py: float) -> bool:
        return self.x <= px <= self.x + self.w and self.y <= py <= self.y + self.h

    def contains_box(self, other: "BoundingBox", eps: float = _GEOM_EPS) -> bool:
        return (
            other.x >= self.x - eps
            and other.y >= self.y - eps
            and other.x + other.w <= self.x + self.w + eps
            and other.y + other.h <= self.y + self.h + eps
        )

    def distance_to(self, other: "BoundingBox") -> float:
        ax, ay = self.center()
        bx, by = other.center()
        return math.hypot(ax - bx, ay - by)


@dataclass(frozen=True)
class Region:
    """A typed rectangular subarea of a page."""

    id: str
    page_index: int
    bbox: BoundingBox
    kind: RegionKind
    text: str = ""
    ocr_confidence: float | None = None

    @property
    def is_text_bearing(self) -> bool:
        return self.kind in TEXT_KINDS


@dataclass(frozen=True)
class Page:
    index: int
    width: float
    height: float
    regions: tuple[Region, ...] = ()


@dataclass(frozen=True)
class Document:
    """A laid-out document plus the explicit order in which text is narrated.

    ``reading_order`` lists every text-bearing region exactly once and never
    contains figure or table pixel regions; it is stored rather than recomputed
    so ingest decisions stay auditable.
    """

    id: str
    title: str
    source_kind: SourceKind
    pages: tuple[Page, ...] = ()
    reading_order: tuple[str, ...] = ()

    def iter_regions(self):
        for page in self.pages:
            yield from page.regions

    def region(self, region_id: str) -> Region:
        for region in self.iter_regions():
            if region.id == region_id:
                return region
        raise KeyError(region_id)

    def page_of(self, region_id: str) -> Page:
        return self.pages[self.region(region_id).page_index]

    def text_regions(self) -> list[Region]:
        return [r for r in self.iter_regions() if r.is_text_bearing]


@dataclass(frozen=True)
class TextSpan:
    """Half-open character range [char_start, char_end) inside a region's text."""

    region_id: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class Link:
    """A resolved reference: a text span bound to the region it denotes."""

    id: str
    source: TextSpan
    target_region: str
    kind: LinkKind
    label: str
    confidence: float = 1.0


@dataclass(frozen=True)
class Keyphrase:
    """Short extract announced when the wheel cursor enters ``region_id``."""

    region_id: str
    phrase: str
    score: float


def validate(document: Document) -> list[str]:
    """Check every structural invariant; return one message per violation.

    Violations are data, not failures: the function never raises for any
    well-typed document, however inconsistent its values.
    """
    violations: list[str] = []

    if not document.id:
        violations.append("document: id must be non-empty")

    seen_ids: set[str] = set()
    for position, page in enumerate(document.pages):
        if page.index != position:
            violations.append(
                f"page at position {position}: index {page.index} breaks contiguity"
            )
        if page.width <= 0 or page.height <= 0:
            violations.append(f"page {page.index}: width and height must be > 0")
        for region in page.regions:
            name = f"region {region.id}"
            if region.id in seen_ids:
                violations.append(f"{name}: duplicate region id")
            seen_ids.add(region.id)
            if region.page_index != page.index:
                violations.append(
                    f"{name}: page_index {region.page_index} != containing page {page.index}"
                )
            box = region.bbox
            if box.w <= 0:
                violations.append(f"{name}: bbox requires w > 0")
            if box.h <= 0:
                violations.append(f"{name}: bbox requires h > 0")
            if box.x < -_GEOM_EPS or box.y < -_GEOM_EPS:
                violations.append(f"{name}: bbox origin must be >= 0")
            if box.x + box.w > page.width + _GEOM_EPS:
                violations.append(f"{name}: bbox exceeds page width (x+w <= width)")
            if box.y + box.h > page.height + _GEOM_EPS:
                violations.append(f"{name}: bbox exceeds page height (y+h <= height)")
            if region.ocr_confidence is not None:
                if document.source_kind is not SourceKind.SCANNED:
                    violations.append(
                        f"{name}: ocr_confidence allowed only in scanned documents"
                    )
                elif not 0.0 <= region.ocr_confidence <= 1.0:
                    violations.append(f"{name}: ocr_confidence must be in [0, 1]")

    by_id = {r.id: r for r in document.iter_regions()}
    counts: dict[str, int] = {}
    for region_id in document.reading_order:
        counts[region_id] = counts.get(region_id, 0) + 1
        region = by_id.get(region_id)
        if region is None:
            violations.append(f"reading_order: unknown region id {region_id!r}")
        elif not region.is_text_bearing:
            violations.append(
                f"reading_order: region {region_id} has kind {region.kind.value}, "
                "only text-bearing regions are narrated"
            )
    for region_id, count in counts.items():
        if count > 1:
            violations.append(f"reading_order: region {region_id} listed {count} times")
    for region in document.iter_regions():
        if region.is_text_bearing and region.id not in counts:
            violations.append(
                f"reading_order: text-bearing region {region.id} missing from order"
            )

    return violations


def validate_links(document: Document, links: list[Link] | tuple[Link, ...]) -> list[str]:
    """Check link invariants against a document (used before bundling)."""
    violations: list[str] = []
    by_id = {r.id: r for r in document.iter_regions()}
    for link in links:
        name = f"link {link.id}"
        source = by_id.get(link.source.region_id)
        if source is None:
            violations.append(f"{name}: source region {link.source.region_id!r} missing")
            continue
        if link.target_region not in by_id:
            violations.append(f"{name}: target region {link.target_region!r} missing")
        if link.source.region_id == link.target_region:
            violations.append(f"{name}: source and target region must differ")
        if not link.label:
            violations.append(f"{name}: label must be non-empty")
        if not 0.0 < link.confidence <= 1.0:
            violations.append(f"{name}: confidence must be in (0, 1]")
        if not 0 <= link.source.char_start < link.source.char_end <= len(source.text):
            violations.append(f"{name}: source span out of bounds for region text")
    return violations
