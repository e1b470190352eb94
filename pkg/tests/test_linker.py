from __future__ import annotations

from support import doc, page, region

from readalong.linker import (
    build_target_index,
    extract_links,
    extract_mentions,
    resolve,
)
from readalong.model import LinkKind

# Hand-enumerated oracle for the fixture corpus:
# (source region, mention text, target region, kind). Char offsets are located
# by searching the fixture text for the mention's unique occurrence.
GOLDEN_LINKS = {
    "doc-stream": [
        ("s-p1", "Figure 1", "s-f1", LinkKind.FIGURE_REF),
        ("s-p1", "Section 2", "s-h2", LinkKind.SECTION_REF),
        ("s-p2", "Table 1", "s-t1", LinkKind.TABLE_REF),
        ("s-p2", "[1]", "s-r1", LinkKind.CITATION),
        ("s-p3", "[2]", "s-r2", LinkKind.CITATION),
        ("s-p3", "Fig. 1", "s-f1", LinkKind.FIGURE_REF),
        ("s-p3", "Section 1", "s-h1", LinkKind.SECTION_REF),
    ],
    "doc-scan": [
        ("c-p1", "Figure 2", "c-f1", LinkKind.FIGURE_REF),
        ("c-p2", "[3]", "c-r1", LinkKind.CITATION),
    ],
    "doc-ambig": [
        ("a-p1", "Section 1", "a-h1", LinkKind.SECTION_REF),
        ("a-p2", "Table 2", "a-t1", LinkKind.TABLE_REF),
        ("a-p3", "Section 1", "a-h1", LinkKind.SECTION_REF),
        ("a-p3", "Figure 5", "a-c5", LinkKind.FIGURE_REF),
    ],
}

# Mentions whose (kind, ordinal) was deliberately defined twice.
GOLDEN_AMBIGUOUS = {
    "doc-stream": [],
    "doc-scan": [],
    "doc-ambig": [
        (LinkKind.FIGURE_REF, "3"),
        (LinkKind.SECTION_REF, "7"),
        (LinkKind.CITATION, "4"),
    ],
}


def expected_links_with_spans(document, doc_id):
    by_id = {r.id: r for r in document.iter_regions()}
    expected = []
    for source_id, mention_text, target_id, kind in GOLDEN_LINKS[doc_id]:
        text = by_id[source_id].text
        start = text.index(mention_text)
        assert text.find(mention_text, start + 1) == -1, "oracle mention must be unique"
        expected.append((source_id, start, start + len(mention_text), mention_text, target_id, kind))
    return expected


def test_golden_corpus_links_exact(corpus_documents):
    for doc_id, document in corpus_documents.items():
        links = extract_links(document)
        got = [
            (
                link.source.region_id,
                link.source.char_start,
                link.source.char_end,
                link.label,
                link.target_region,
                link.kind,
            )
            for link in links
        ]
        assert got == expected_links_with_spans(document, doc_id), doc_id
        assert all(link.confidence == 1.0 for link in links)


def test_golden_corpus_ambiguous_keys(corpus_documents):
    for doc_id, document in corpus_documents.items():
        index = build_target_index(document)
        assert set(GOLDEN_AMBIGUOUS[doc_id]) == index.ambiguous, doc_id


def test_mention_from_paper_phrase():
    document = doc(
        [page(0, [region("p", "paragraph", 50, 40, 500, 30, text="as shown in Figure 2")])]
    )
    mentions = extract_mentions(document)
    assert len(mentions) == 1
    mention = mentions[0]
    assert mention.kind is LinkKind.FIGURE_REF
    assert mention.ordinal == "2"
    assert mention.text == "Figure 2"
    assert (mention.span.char_start, mention.span.char_end) == (12, 20)


def test_caption_text_produces_no_mentions():
    document = doc(
        [page(0, [region("c", "caption", 50, 40, 500, 30, text="Figure 2: Data flow")])]
    )
    assert extract_mentions(document) == []


def test_keyword_without_ordinal_is_not_a_mention():
    document = doc(
        [page(0, [region("p", "paragraph", 50, 40, 500, 30, text="Figures are useful")])]
    )
    assert extract_mentions(document) == []


def test_mention_grammar_variants():
    text = "See Fig. 3, Sec. 2.1, § 4 and Table 12; also [7]. Subsection 9 is not section-ish."
    document = doc([page(0, [region("p", "paragraph", 50, 40, 500, 30, text=text)])])
    mentions = extract_mentions(document)
    got = [(m.kind, m.ordinal, m.text) for m in mentions]
    assert got == [
        (LinkKind.FIGURE_REF, "3", "Fig. 3"),
        (LinkKind.SECTION_REF, "2.1", "Sec. 2.1"),
        (LinkKind.SECTION_REF, "4", "§ 4"),
        (LinkKind.TABLE_REF, "12", "Table 12"),
        (LinkKind.CITATION, "7", "[7]"),
    ]


def test_case_insensitive_keyword():
    document = doc(
        [page(0, [region("p", "paragraph", 50, 40, 500, 30, text="see figure 2 and TABLE 1")])]
    )
    kinds = [(m.kind, m.ordinal) for m in extract_mentions(document)]
    assert kinds == [(LinkKind.FIGURE_REF, "2"), (LinkKind.TABLE_REF, "1")]


def test_caption_targets_nearest_figure_by_center_distance():
    near = region("fig-near", "figure", 60, 100, 200, 100)
    far = region("fig-far", "figure", 60, 500, 200, 100)
    caption = region("cap", "caption", 60, 210, 200, 20, text="Figure 2: Data flow for digital documents")
    document = doc([page(0, [near, far, caption])])
    index = build_target_index(document)
    assert index.targets[(LinkKind.FIGURE_REF, "2")] == "fig-near"


def test_caption_without_figure_targets_itself():
    caption = region("cap", "caption", 60, 210, 200, 20, text="Figure 3: missing")
    document = doc([page(0, [caption])])
    index = build_target_index(document)
    assert index.targets[(LinkKind.FIGURE_REF, "3")] == "cap"


def test_figure_caption_ignores_tables():
    table = region("tab", "table", 60, 100, 200, 100)
    caption = region("cap", "caption", 60, 210, 200, 20, text="Figure 1: mislabeled")
    document = doc([page(0, [table, caption])])
    index = build_target_index(document)
    assert index.targets[(LinkKind.FIGURE_REF, "1")] == "cap"


def test_duplicate_keys_move_to_ambiguous():
    c1 = region("c1", "caption", 60, 100, 200, 20, text="Figure 1: one")
    c2 = region("c2", "caption", 60, 200, 200, 20, text="figure 1: two")
    document = doc([page(0, [c1, c2])])
    index = build_target_index(document)
    assert (LinkKind.FIGURE_REF, "1") in index.ambiguous
    assert (LinkKind.FIGURE_REF, "1") not in index.targets
    assert index.targets.keys().isdisjoint(index.ambiguous)


def test_heading_ordinal_requires_boundary():
    h1 = region("h1", "heading", 60, 50, 200, 20, text="3 Results")
    h2 = region("h2", "heading", 60, 100, 200, 20, text="4.2 Deep Dive")
    h3 = region("h3", "heading", 60, 150, 200, 20, text="5everything stuck")
    document = doc([page(0, [h1, h2, h3])])
    index = build_target_index(document)
    assert index.targets[(LinkKind.SECTION_REF, "3")] == "h1"
    assert index.targets[(LinkKind.SECTION_REF, "4.2")] == "h2"
    assert (LinkKind.SECTION_REF, "5") not in index.targets


def test_resolve_skips_ambiguous_and_unindexed():
    p = region("p", "paragraph", 50, 40, 500, 30, text="See Figure 1 and Figure 9.")
    c1 = region("c1", "caption", 50, 100, 500, 20, text="Figure 1: one")
    c2 = region("c2", "caption", 50, 140, 500, 20, text="Figure 1: two")
    document = doc([page(0, [p, c1, c2])])
    mentions = extract_mentions(document)
    assert [(m.kind, m.ordinal) for m in mentions] == [
        (LinkKind.FIGURE_REF, "1"),
        (LinkKind.FIGURE_REF, "9"),
    ]
    assert resolve(mentions, build_target_index(document)) == []


def test_resolve_empty_mentions():
    assert resolve([], build_target_index(doc([page(0, [])]))) == []


def test_no_self_links_from_numbered_headings():
    h = region("h", "heading", 60, 50, 200, 20, text="3 Results for Section 3 readers")
    document = doc([page(0, [h])])
    links = extract_links(document)
    assert links == []


def test_determinism_on_corpus(corpus_documents):
    for document in corpus_documents.values():
        assert extract_links(document) == extract_links(document)


def test_precision_by_construction_on_random_documents():
    # Re-read every emitted link's definition site: the target (or its paired
    # caption) must open with the mention's keyword + ordinal, and no link may
    # originate inside a caption or reference entry.
    import random
    import re

    from support import random_document
    from readalong.model import RegionKind

    rng = random.Random(1618)
    checked = 0
    for _ in range(250):
        document = random_document(rng)
        by_id = {r.id: r for r in document.iter_regions()}
        mentions = {
            (m.span.region_id, m.span.char_start): m for m in extract_mentions(document)
        }
        for link in extract_links(document):
            source = by_id[link.source.region_id]
            assert source.kind not in (RegionKind.CAPTION, RegionKind.REFERENCE_ENTRY)
            mention = mentions[(link.source.region_id, link.source.char_start)]
            target = by_id[link.target_region]
            if link.kind is LinkKind.SECTION_REF:
                assert target.kind is RegionKind.HEADING
                assert re.match(rf"\s*{re.escape(mention.ordinal)}(?=$|[\s.:)\-])", target.text)
            elif link.kind is LinkKind.CITATION:
                assert target.kind is RegionKind.REFERENCE_ENTRY
                assert target.text.lstrip().startswith(f"[{mention.ordinal}]")
            else:
                keyword = "figure" if link.kind is LinkKind.FIGURE_REF else "table"
                if target.kind is RegionKind.CAPTION:
                    caption = target  # fallback: caption is its own target
                else:
                    assert target.kind in (RegionKind.FIGURE, RegionKind.TABLE)
                    page = document.pages[target.page_index]
                    captions = [
                        r
                        for r in page.regions
                        if r.kind is RegionKind.CAPTION
                        and r.text.lstrip().lower().startswith(
                            (f"{keyword} {mention.ordinal}", f"fig. {mention.ordinal}")
                        )
                    ]
                    assert captions, f"no caption pairs {link.label!r} with {target.id}"
                    caption = captions[0]
                head = caption.text.lstrip().lower()
                assert head.startswith((f"{keyword} {mention.ordinal}", f"fig. {mention.ordinal}"))
            checked += 1
    assert checked > 30
