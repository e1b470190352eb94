"""Reference extraction and low-ambiguity resolution to target regions.

Mentions like "Figure 2", "Table 1", "Section 3.1", or "[12]" in body text are
matched against definition sites (captions, headings, reference entries). Only
unambiguous matches produce links: any key defined twice is dropped rather
than guessed at.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import Document, Link, LinkKind, Region, RegionKind, TextSpan

# Body-text mention grammar: keyword + whitespace + dotted ordinal. The
# lookbehind keeps "subsection 3" from matching as "section 3".
_MENTION_RE = re.compile(
    r"(?<![A-Za-z0-9])(Figure|Fig\.|Table|Section|Sec\.|§)\s+(\d+(?:\.\d+)*)",
    re.IGNORECASE,
)
_CITATION_RE = re.compile(r"\[(\d+)\]")

# Definition sites: caption/heading/reference-entry openings.
_CAPTION_HEAD_RE = re.compile(r"^\s*(Figure|Fig\.|Table)\s+(\d+(?:\.\d+)*)", re.IGNORECASE)
_HEADING_HEAD_RE = re.compile(r"^\s*(\d+(?:\.\d+)*)(?=$|[\s.:)\-])")
_REFENTRY_HEAD_RE = re.compile(r"^\s*\[(\d+)\]")

# Mentions inside these regions are definitions, not references.
_EXCLUDED_SOURCE_KINDS = (RegionKind.CAPTION, RegionKind.REFERENCE_ENTRY)


def _kind_for_keyword(keyword: str) -> LinkKind:
    lowered = keyword.lower()
    if lowered.startswith("fig"):
        return LinkKind.FIGURE_REF
    if lowered.startswith("table"):
        return LinkKind.TABLE_REF
    return LinkKind.SECTION_REF


@dataclass(frozen=True)
class ReferenceMention:
    """A reference phrase found in body text."""

    span: TextSpan
    kind: LinkKind
    ordinal: str
    text: str


@dataclass
class TargetIndex:
    """Map from (kind, ordinal) to the region a mention of that key denotes.

    Keys defined more than once live in ``ambiguous`` and never in ``targets``.
    """

    targets: dict[tuple[LinkKind, str], str] = field(default_factory=dict)
    ambiguous: set[tuple[LinkKind, str]] = field(default_factory=set)


def extract_mentions(document: Document) -> list[ReferenceMention]:
    """All reference mentions in body text, in reading order then char offset."""
    by_id = {r.id: r for r in document.iter_regions()}
    mentions: list[ReferenceMention] = []
    for region_id in document.reading_order:
        region = by_id[region_id]
        if region.kind in _EXCLUDED_SOURCE_KINDS:
            continue
        found: list[tuple[int, int, LinkKind, str]] = []
        for match in _MENTION_RE.finditer(region.text):
            found.append(
                (match.start(), match.end(), _kind_for_keyword(match.group(1)), match.group(2))
            )
        for match in _CITATION_RE.finditer(region.text):
            found.append((match.start(), match.end(), LinkKind.CITATION, match.group(1)))
        found.sort(key=lambda item: item[0])
        for start, end, kind, ordinal in found:
            mentions.append(
                ReferenceMention(
                    span=TextSpan(region_id, start, end),
                    kind=kind,
                    ordinal=ordinal,
                    text=region.text[start:end],
                )
            )
    return mentions


def _nearest_of_kind(anchor: Region, page_regions: tuple[Region, ...], kind: RegionKind) -> str | None:
    candidates = [r for r in page_regions if r.kind is kind and r.id != anchor.id]
    if not candidates:
        return None
    best = min(candidates, key=lambda r: (anchor.bbox.distance_to(r.bbox), r.id))
    return best.id


def build_target_index(document: Document) -> TargetIndex:
    """Index definition sites: captions, numbered headings, reference entries.

    A figure/table caption's target is the nearest region of the matching kind
    on the same page (bbox-center distance); with none present the caption is
    its own target so the link still pans somewhere useful.
    """
    entries: list[tuple[tuple[LinkKind, str], str]] = []
    for page in document.pages:
        for region in page.regions:
            if region.kind is RegionKind.CAPTION:
                match = _CAPTION_HEAD_RE.match(region.text)
                if not match:
                    continue
                kind = _kind_for_keyword(match.group(1))
                wanted = RegionKind.FIGURE if kind is LinkKind.FIGURE_REF else RegionKind.TABLE
                target = _nearest_of_kind(region, page.regions, wanted) or region.id
                entries.append(((kind, match.group(2)), target))
            elif region.kind is RegionKind.HEADING:
                match = _HEADING_HEAD_RE.match(region.text)
                if match:
                    entries.append(((LinkKind.SECTION_REF, match.group(1)), region.id))
            elif region.kind is RegionKind.REFERENCE_ENTRY:
                match = _REFENTRY_HEAD_RE.match(region.text)
                if match:
                    entries.append(((LinkKind.CITATION, match.group(1)), region.id))

    index = TargetIndex()
    for key, target in entries:
        if key in index.ambiguous:
            continue
        if key in index.targets:
            del index.targets[key]
            index.ambiguous.add(key)
        else:
            index.targets[key] = target
    return index


def resolve(mentions: list[ReferenceMention], index: TargetIndex) -> list[Link]:
    """One link per mention with a unique target; ambiguous keys yield nothing."""
    links: list[Link] = []
    for mention in mentions:
        target = index.targets.get((mention.kind, mention.ordinal))
        if target is None:
            continue
        if target == mention.span.region_id:
            # A link must leave its own region; e.g. a numbered heading
            # mentioning its own ordinal.
            continue
        links.append(
            Link(
                id=f"link-{len(links)}",
                source=mention.span,
                target_region=target,
                kind=mention.kind,
                label=mention.text,
                confidence=1.0,
            )
        )
    return links


def extract_links(document: Document) -> list[Link]:
    """Convenience: extract mentions, index targets, resolve."""
    return resolve(extract_mentions(document), build_target_index(document))
