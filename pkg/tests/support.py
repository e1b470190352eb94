"""Shared builders for tests: hand-built documents, a randomized generator,
and the independent geometric checker for viewport fitting."""

from __future__ import annotations

import random

from readalong.ingest import infer_reading_order
from readalong.model import (
    BoundingBox,
    Document,
    Page,
    Region,
    RegionKind,
    SourceKind,
)
from readalong.pipeline import CompileOptions, compile_document
from readalong.playback import PlayerConfig, ReaderEngine

VOCAB = [
    "data", "stream", "sensor", "panel", "survey", "ledger", "sample",
    "margin", "anchor", "render", "packet", "vector", "sketch", "window",
    "filter", "bound", "plate", "route", "signal", "buffer",
]


def region(
    region_id: str,
    kind: RegionKind | str,
    x: float,
    y: float,
    w: float,
    h: float,
    text: str = "",
    page_index: int = 0,
    ocr: float | None = None,
) -> Region:
    return Region(
        id=region_id,
        page_index=page_index,
        bbox=BoundingBox(x, y, w, h),
        kind=RegionKind(kind),
        text=text,
        ocr_confidence=ocr,
    )


def page(index: int, regions: list[Region], width: float = 612.0, height: float = 792.0) -> Page:
    fixed = tuple(
        Region(
            id=r.id,
            page_index=index,
            bbox=r.bbox,
            kind=r.kind,
            text=r.text,
            ocr_confidence=r.ocr_confidence,
        )
        for r in regions
    )
    return Page(index=index, width=width, height=height, regions=fixed)


def doc(
    pages_: list[Page],
    doc_id: str = "doc-test",
    title: str = "Test Document",
    source: SourceKind | str = SourceKind.DIGITAL,
    order: list[str] | None = None,
) -> Document:
    if order is None:
        order = []
        for p in pages_:
            order.extend(infer_reading_order(p))
    return Document(
        id=doc_id,
        title=title,
        source_kind=SourceKind(source),
        pages=tuple(pages_),
        reading_order=tuple(order),
    )


def simple_doc(text: str, doc_id: str = "doc-simple", source: str = "digital", ocr: float | None = None) -> Document:
    return doc(
        [page(0, [region("r0", "paragraph", 50, 50, 500, 100, text=text, ocr=ocr)])],
        doc_id=doc_id,
        source=source,
    )


def compile_doc(document: Document, **options):
    return compile_document(document, CompileOptions(**options))


def engine_for(compiled, aspect: float = 1.0, margin: float = 0.0, **cfg) -> ReaderEngine:
    return ReaderEngine(
        compiled.document,
        compiled.links,
        compiled.keyphrases,
        compiled.script,
        config=PlayerConfig(screen_aspect=aspect, margin_frac=margin, **cfg),
    )


def check_script_invariants(document, compiled):
    """Assert every contract a compiled script must honor: monotone times,
    text coverage, boundary placement, link anchoring, warning alignment."""
    from readalong import narrator
    from readalong.narrator import event_time

    script = compiled.script
    events = script.events
    spans = [e for e in events if isinstance(e, narrator.SpeakSpan)]

    times = [event_time(e) for e in events]
    assert all(t >= 0 for t in times)
    assert times == sorted(times)
    for e in events:
        if isinstance(e, (narrator.SpeakSpan, narrator.OcrWarning)):
            assert e.t_end > e.t_start

    by_id = {r.id: r for r in document.iter_regions()}
    spoken: dict[int, list[str]] = {}
    for s in spans:
        spoken.setdefault(s.sentence_index, []).append(
            by_id[s.span.region_id].text[s.span.char_start : s.span.char_end]
        )
    for sentence in compiled.sentences:
        text = by_id[sentence.span.region_id].text[
            sentence.span.char_start : sentence.span.char_end
        ]
        assert " ".join(spoken[sentence.index]) == " ".join(text.split())

    boundaries = {
        e.sentence_index: e.t for e in events if isinstance(e, narrator.SentenceBoundary)
    }
    assert sorted(boundaries) == [s.index for s in compiled.sentences]
    for index, t in boundaries.items():
        assert t == max(s.t_end for s in spans if s.sentence_index == index)

    ends = [e for e in events if isinstance(e, narrator.DocumentEnd)]
    assert len(ends) == 1
    assert ends[0].t == max(times)

    triggers = [e for e in events if isinstance(e, narrator.LinkTrigger)]
    assert len(triggers) == len(compiled.links)
    links = {link.id: link for link in compiled.links}
    for trigger in triggers:
        link = links[trigger.link_id]
        holders = [
            s
            for s in spans
            if s.span.region_id == link.source.region_id
            and s.span.char_start <= link.source.char_start < s.span.char_end
        ]
        assert len(holders) == 1
        assert trigger.t == holders[0].t_start

    warnings = [e for e in events if isinstance(e, narrator.OcrWarning)]
    if document.source_kind is not SourceKind.SCANNED:
        assert warnings == []
    for warning in warnings:
        r = by_id[warning.region_id]
        assert r.ocr_confidence is not None and r.ocr_confidence < script.warning_threshold
        assert warning.text == "Warning, upcoming TTS may be unintelligible"
        first = min(
            (s for s in spans if s.span.region_id == warning.region_id),
            key=lambda s: s.t_start,
        )
        assert warning.t_end == first.t_start


def check_fit_geometry(target, page_, aspect, margin, got, eps=1e-6):
    """Independent checker for viewport fitting: aspect, size, containment
    (when the margin-expanded box fits the page at all), minimality, and
    in-page clamping. Raises AssertionError on any breach."""
    expanded = target.expanded(margin)
    assert abs(got.w / got.h - aspect) <= 1e-9 * max(1.0, aspect), "aspect broken"
    # Never shrunk below the expanded target's size.
    assert got.w >= expanded.w - eps and got.h >= expanded.h - eps

    fits_w = got.w <= page_.width + eps
    fits_h = got.h <= page_.height + eps
    if fits_w:
        assert got.x >= -eps and got.x + got.w <= page_.width + eps, "x clamp broken"
        if expanded.x >= -eps and expanded.x + expanded.w <= page_.width + eps:
            assert got.x - eps <= expanded.x
            assert expanded.x + expanded.w <= got.x + got.w + eps
    else:
        assert abs(got.x - (page_.width - got.w) / 2) <= eps, "x overflow not centered"
    if fits_h:
        assert got.y >= -eps and got.y + got.h <= page_.height + eps, "y clamp broken"
        if expanded.y >= -eps and expanded.y + expanded.h <= page_.height + eps:
            assert got.y - eps <= expanded.y
            assert expanded.y + expanded.h <= got.y + got.h + eps
    else:
        assert abs(got.y - (page_.height - got.h) / 2) <= eps, "y overflow not centered"

    gx, gy = got.center()
    ex, ey = expanded.center()
    if abs(gx - ex) < eps and abs(gy - ey) < eps:
        # minimality: any 1%-smaller aspect-true rectangle loses containment
        shrunk = BoundingBox(
            gx - got.w * 0.495, gy - got.h * 0.495, got.w * 0.99, got.h * 0.99
        )
        assert not shrunk.contains_box(expanded, eps=-eps), "not minimal"


def random_sentence(rng: random.Random, allow_mention: bool = True) -> str:
    words = [rng.choice(VOCAB) for _ in range(rng.randint(1, 6))]
    words[0] = words[0].capitalize()
    if allow_mention and rng.random() < 0.35:
        mention = rng.choice(
            [
                f"Figure {rng.randint(1, 4)}",
                f"Fig. {rng.randint(1, 4)}",
                f"Table {rng.randint(1, 3)}",
                f"Section {rng.randint(1, 3)}",
                f"[{rng.randint(1, 5)}]",
            ]
        )
        words.insert(rng.randint(1, len(words)), mention)
    return " ".join(words) + rng.choice([".", ".", ".", "!", "?"])


def random_text(rng: random.Random, max_sentences: int = 3) -> str:
    return " ".join(random_sentence(rng) for _ in range(rng.randint(1, max_sentences)))


def random_document(rng: random.Random, doc_id: str = "doc-gen", scanned: bool | None = None) -> Document:
    """A small valid document: stacked bands, occasional two-column pages,
    captions paired with figures/tables, mentions that may or may not resolve."""
    if scanned is None:
        scanned = rng.random() < 0.5
    width, height = 612.0, 792.0
    pages_: list[Page] = []
    n_pages = rng.randint(1, 3)
    counter = 0

    for p in range(n_pages):
        regions: list[Region] = []
        two_col = rng.random() < 0.3
        columns = [(50.0, 240.0), (322.0, 240.0)] if two_col else [(50.0, 500.0)]
        for col_x, col_w in columns:
            y = 40.0
            for _ in range(rng.randint(0, 4)):
                h = rng.uniform(30.0, 80.0)
                if y + h > height - 20.0:
                    break
                kind = rng.choices(
                    [
                        RegionKind.PARAGRAPH,
                        RegionKind.HEADING,
                        RegionKind.FIGURE,
                        RegionKind.TABLE,
                        RegionKind.FOOTNOTE,
                        RegionKind.REFERENCE_ENTRY,
                    ],
                    weights=[50, 12, 14, 6, 8, 10],
                )[0]
                counter += 1
                rid = f"g{p}-{counter}"
                ocr = round(rng.uniform(0.1, 1.0), 2) if scanned else None
                if kind is RegionKind.HEADING:
                    text = f"{rng.randint(1, 3)} {rng.choice(VOCAB).capitalize()}"
                elif kind is RegionKind.FIGURE or kind is RegionKind.TABLE:
                    text = ""
                elif kind is RegionKind.REFERENCE_ENTRY:
                    text = f"[{rng.randint(1, 5)}] {random_sentence(rng, allow_mention=False)}"
                else:
                    text = random_text(rng)
                regions.append(region(rid, kind, col_x, y, col_w, h, text=text, ocr=ocr))
                y += h + rng.uniform(6.0, 16.0)
                # Figures and tables usually get a caption right below.
                if kind in (RegionKind.FIGURE, RegionKind.TABLE) and rng.random() < 0.8:
                    label = "Figure" if kind is RegionKind.FIGURE else "Table"
                    ch = 24.0
                    if y + ch <= height - 20.0:
                        counter += 1
                        regions.append(
                            region(
                                f"g{p}-{counter}",
                                RegionKind.CAPTION,
                                col_x,
                                y,
                                col_w,
                                ch,
                                text=f"{label} {rng.randint(1, 4)}: {random_sentence(rng, allow_mention=False)}",
                                ocr=round(rng.uniform(0.1, 1.0), 2) if scanned else None,
                            )
                        )
                        y += ch + rng.uniform(6.0, 16.0)
        pages_.append(page(p, regions, width=width, height=height))

    return doc(
        pages_,
        doc_id=doc_id,
        title="Generated Document",
        source="scanned" if scanned else "digital",
    )
