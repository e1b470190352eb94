from __future__ import annotations

import random
from dataclasses import replace

import pytest
from support import (
    check_fit_geometry,
    compile_doc,
    doc,
    engine_for,
    page,
    random_document,
    region,
    simple_doc,
)

from readalong.model import BoundingBox, Page
from readalong.playback import (
    ClockRegressionError,
    DocumentView,
    Flick,
    HighlightLink,
    HighlightRegion,
    HighlightSentence,
    KeyphraseClip,
    Notice,
    PageView,
    PanTo,
    PlayClip,
    PressAt,
    SelectDocument,
    SelectRegion,
    ShowWarning,
    TextView,
    TogglePlay,
    UnknownRegionError,
    Vibrate,
    WheelMove,
    WheelRelease,
    ZoomToggle,
    fit_region,
    format_ui_event,
)


def playing_state(engine, view=None):
    state = engine.initial_state()
    view = view if view is not None else PageView(page_index=0)
    return replace(state, view=view, playing=True)


def end_time(engine):
    return engine.script.events[-1].t + 1


def linked_doc():
    """Two-page doc with a link on each page; target on page 0."""
    body0 = region("p0", "paragraph", 50, 40, 500, 60, text="Intro text. See Figure 1 now.")
    fig = region("f0", "figure", 50, 120, 500, 200)
    cap = region("c0", "caption", 50, 330, 500, 20, text="Figure 1: the artifact")
    body1 = region("p1", "paragraph", 50, 40, 500, 60, text="Later page. Figure 1 again here.", page_index=1)
    return compile_doc(doc([page(0, [body0, fig, cap]), page(1, [body1])]))


# --- fit_region --------------------------------------------------------------


def test_fit_region_frozen_example():
    page_ = Page(index=0, width=612, height=792)
    got = fit_region(BoundingBox(100, 100, 200, 100), page_, 1.0, 0.0)
    assert got == BoundingBox(100, 50, 200, 200)


def test_fit_region_identity_when_aspect_matches():
    page_ = Page(index=0, width=612, height=792)
    target = BoundingBox(10, 20, 100, 200)
    assert fit_region(target, page_, 0.5, 0.0) == target


def test_fit_region_rejects_bad_preconditions():
    page_ = Page(index=0, width=100, height=100)
    with pytest.raises(ValueError):
        fit_region(BoundingBox(90, 90, 20, 20), page_, 1.0, 0.0)  # outside page
    with pytest.raises(ValueError):
        fit_region(BoundingBox(10, 10, 20, 20), page_, 0.0, 0.0)
    with pytest.raises(ValueError):
        fit_region(BoundingBox(10, 10, 20, 20), page_, 1.0, 0.5)


def test_fit_region_randomized_properties():
    rng = random.Random(77)
    for _ in range(2500):
        pw = rng.uniform(100, 1000)
        ph = rng.uniform(100, 1000)
        page_ = Page(index=0, width=pw, height=ph)
        w = rng.uniform(1, pw)
        h = rng.uniform(1, ph)
        x = rng.uniform(0, pw - w)
        y = rng.uniform(0, ph - h)
        aspect = rng.uniform(0.2, 5.0)
        margin = rng.uniform(0.0, 0.45)
        target = BoundingBox(x, y, w, h)
        got = fit_region(target, page_, aspect, margin)
        check_fit_geometry(target, page_, aspect, margin, got)


# --- advance -----------------------------------------------------------------


def test_clock_regression_raises():
    engine = engine_for(compile_doc(simple_doc("Hi there.")))
    state = playing_state(engine)
    state, _ = engine.advance(state, 500)
    with pytest.raises(ClockRegressionError):
        engine.advance(state, 100)


def test_paused_advance_is_noop():
    engine = engine_for(compile_doc(simple_doc("Hi there.")))
    state = engine.initial_state()
    new_state, effects = engine.advance(state, 10_000)
    assert new_state == state
    assert effects == []


def test_crossing_no_events_changes_clock_only():
    engine = engine_for(compile_doc(simple_doc("Hi there.")))
    state = playing_state(engine)
    state, _ = engine.advance(state, 100)  # inside the first word
    before = state
    state, effects = engine.advance(state, 150)
    assert effects == []
    assert state == replace(before, clock_ms=150)


def test_pageview_link_crossing_vibrates_and_highlights():
    compiled = linked_doc()
    engine = engine_for(compiled)
    state, effects = engine.advance(playing_state(engine), end_time(engine))
    vibrates = [e for e in effects if isinstance(e, Vibrate) and e.duration_ms == 200]
    highlights = [e for e in effects if isinstance(e, HighlightLink)]
    pans = [e for e in effects if isinstance(e, PanTo)]
    assert len(vibrates) == len(compiled.links) == 2
    assert len(highlights) == 2
    assert pans == []
    assert not state.playing  # document ended


def test_textview_link_crossing_pans_to_target():
    compiled = linked_doc()
    engine = engine_for(compiled, aspect=1.0, margin=0.1)
    page0 = compiled.document.pages[0]
    start_view = TextView(page_index=0, viewport=BoundingBox(0, 0, 100, 100))
    state, effects = engine.advance(playing_state(engine, view=start_view), end_time(engine))
    pans = [e for e in effects if isinstance(e, PanTo)]
    assert len(pans) == 2
    assert not [e for e in effects if isinstance(e, HighlightLink)]
    target = compiled.document.region("f0").bbox
    for pan in pans:
        assert pan.animate_ms == 400
        assert pan.viewport.contains_box(target.expanded(0.1), eps=1e-6)
        assert pan.viewport.w / pan.viewport.h == pytest.approx(1.0)
    # Cross-page link on page 1 pans back to the page-0 target.
    assert isinstance(state.view, TextView)
    assert state.view.page_index == 0


def test_sentence_highlight_on_new_sentence_only():
    engine = engine_for(compile_doc(simple_doc("One two. Three.")))
    state, effects = engine.advance(playing_state(engine), end_time(engine))
    highlights = [e for e in effects if isinstance(e, HighlightSentence)]
    assert [h.sentence_index for h in highlights] == [0, 1]
    boundaries = [e for e in effects if isinstance(e, Vibrate)]
    assert boundaries == []  # no boundary vibration outside wheel scrubbing


def test_warning_crossing_shows_warning():
    low = region("low", "paragraph", 50, 40, 500, 60, text="Bad scan text.", ocr=0.2)
    engine = engine_for(compile_doc(doc([page(0, [low])], source="scanned")))
    _, effects = engine.advance(playing_state(engine), end_time(engine))
    warnings = [e for e in effects if isinstance(e, ShowWarning)]
    assert [w.region_id for w in warnings] == ["low"]


def test_page_boundary_advances_view_page():
    compiled = linked_doc()
    engine = engine_for(compiled)
    state, _ = engine.advance(playing_state(engine), end_time(engine))
    assert isinstance(state.view, PageView)
    assert state.view.page_index == 1


# --- apply -------------------------------------------------------------------


def test_select_region_highlights_seeks_and_plays():
    compiled = linked_doc()
    engine = engine_for(compiled)
    state = replace(engine.initial_state(), view=PageView(page_index=1))
    state, effects = engine.apply(state, SelectRegion("p1"))
    assert effects == [HighlightRegion(t=0, region_id="p1")]
    assert state.playing
    first_sentence = next(s for s in compiled.sentences if s.span.region_id == "p1")
    info_t = state.clock_ms
    # next advance highlights that sentence first
    _, effects = engine.advance(state, info_t)
    highlights = [e for e in effects if isinstance(e, HighlightSentence)]
    assert highlights and highlights[0].sentence_index == first_sentence.index


def test_select_region_unknown_id_errors():
    engine = engine_for(compile_doc(simple_doc("Hi.")))
    with pytest.raises(UnknownRegionError):
        engine.apply(engine.initial_state(), SelectRegion("nope"))


def test_select_region_without_sentences_only_highlights():
    compiled = linked_doc()
    engine = engine_for(compiled)
    state = replace(engine.initial_state(), view=PageView(page_index=0))
    new_state, effects = engine.apply(state, SelectRegion("f0"))
    assert [type(e) for e in effects] == [HighlightRegion]
    assert not new_state.playing


def test_toggle_play_flips():
    engine = engine_for(compile_doc(simple_doc("Hi.")))
    state = engine.initial_state()
    state, _ = engine.apply(state, TogglePlay())
    assert state.playing
    state, _ = engine.apply(state, TogglePlay())
    assert not state.playing


def test_zoom_toggle_round_trip_fits_current_sentence():
    compiled = linked_doc()
    engine = engine_for(compiled, aspect=1.0, margin=0.0)
    state = replace(engine.initial_state(), view=PageView(page_index=0), playing=True)
    state, _ = engine.advance(state, 100)  # inside sentence 0 (region p0)
    state, _ = engine.apply(state, ZoomToggle())
    assert isinstance(state.view, TextView)
    expected = fit_region(
        compiled.document.region("p0").bbox, compiled.document.pages[0], 1.0, 0.0
    )
    assert state.view.viewport == expected
    state, _ = engine.apply(state, ZoomToggle())
    assert state.view == PageView(page_index=0)


def test_flick_changes_page_and_clamps():
    compiled = linked_doc()
    engine = engine_for(compiled)
    state = replace(engine.initial_state(), view=PageView(page_index=0))
    state, _ = engine.apply(state, Flick("prev"))
    assert state.view.page_index == 0  # clamped at start
    state, _ = engine.apply(state, Flick("next"))
    assert state.view.page_index == 1
    state, _ = engine.apply(state, Flick("next"))
    assert state.view.page_index == 1  # clamped at end


def test_press_at_selects_smallest_region_under_point():
    compiled = linked_doc()
    engine = engine_for(compiled)
    state = replace(engine.initial_state(), view=PageView(page_index=0))
    state, effects = engine.apply(state, PressAt(60, 50))
    assert effects == [HighlightRegion(t=0, region_id="p0")]
    assert state.playing


def test_press_at_in_document_view_opens_document():
    compiled = linked_doc()
    engine = engine_for(compiled)
    state, _ = engine.apply(engine.initial_state(), PressAt(10, 10))
    assert state.view == PageView(page_index=0)


def test_select_document_enters_page_view():
    compiled = linked_doc()
    engine = engine_for(compiled)
    state, effects = engine.apply(engine.initial_state(), SelectDocument(compiled.document.id))
    assert state.view == PageView(page_index=0)
    assert effects == []
    with pytest.raises(UnknownRegionError):
        engine.apply(engine.initial_state(), SelectDocument("other-doc"))


# --- wheel -------------------------------------------------------------------


def wheel_doc():
    sentences_a = " ".join(f"Alpha item number {i} here." for i in range(1, 15))  # 14 sentences
    sentences_b = "Beta starts now. Beta continues. Beta ends."
    a = region("ra", "paragraph", 50, 40, 500, 300, text=sentences_a)
    b = region("rb", "paragraph", 50, 40, 500, 200, text=sentences_b, page_index=1)
    return compile_doc(doc([page(0, [a]), page(1, [b])]))


def test_full_circle_advances_twelve_sentences():
    engine = engine_for(wheel_doc())
    state = replace(engine.initial_state(), view=PageView(page_index=0))
    total_vibrates = 0
    for delta in [95.0, 85.0, 60.0, 120.0]:  # 360 degrees in uneven chunks
        state, effects = engine.apply(state, WheelMove(delta))
        total_vibrates += sum(isinstance(e, Vibrate) for e in effects)
    assert state.wheel.cursor_sentence == 12
    assert total_vibrates == 12


def test_wheel_region_entry_plays_keyphrase_and_page_notice():
    compiled = wheel_doc()
    engine = engine_for(compiled)
    state = replace(engine.initial_state(), view=PageView(page_index=0))
    # place the cursor on the last sentence of region ra (index 13)
    state = replace(state, current_sentence=13)
    state, effects = engine.apply(state, WheelMove(30.0))
    assert state.wheel.cursor_sentence == 14
    clips = [e.clip for e in effects if isinstance(e, PlayClip)]
    assert KeyphraseClip(region_id="rb") in clips
    assert Notice(kind="page_boundary") in clips


def test_wheel_backward_motion():
    engine = engine_for(wheel_doc())
    state = replace(engine.initial_state(), view=PageView(page_index=0), current_sentence=5)
    state, effects = engine.apply(state, WheelMove(-65.0))
    assert state.wheel.cursor_sentence == 3
    assert sum(isinstance(e, Vibrate) for e in effects) == 2


def test_document_boundary_notice_fires_once_per_excursion():
    engine = engine_for(wheel_doc())
    last = engine.sentence_count - 1
    state = replace(engine.initial_state(), view=PageView(page_index=0), current_sentence=last)
    state, effects = engine.apply(state, WheelMove(30.0))
    assert [e.clip for e in effects if isinstance(e, PlayClip)] == [Notice(kind="document_boundary")]
    assert state.wheel.cursor_sentence == last
    # continuing past the end stays silent
    state, effects = engine.apply(state, WheelMove(90.0))
    assert effects == []
    # stepping back in-range, then out again, is a new crossing
    state, effects = engine.apply(state, WheelMove(-30.0))
    assert sum(isinstance(e, Vibrate) for e in effects) == 1
    state, effects = engine.apply(state, WheelMove(30.0))
    assert any(
        isinstance(e, PlayClip) and e.clip == Notice(kind="document_boundary") for e in effects
    ) is False  # moving forward lands back on the last sentence, in range
    state, effects = engine.apply(state, WheelMove(30.0))
    assert [e.clip for e in effects if isinstance(e, PlayClip)] == [Notice(kind="document_boundary")]


def test_wheel_release_resumes_at_cursor():
    compiled = wheel_doc()
    engine = engine_for(compiled)
    state = replace(engine.initial_state(), view=PageView(page_index=0))
    state, _ = engine.apply(state, WheelMove(95.0))  # cursor 3
    assert not state.playing
    state, _ = engine.apply(state, WheelRelease())
    assert state.playing
    assert not state.wheel.active
    third = [s for s in compiled.sentences if s.index == 3][0]
    spans = [
        e
        for e in compiled.script.events
        if type(e).__name__ == "SpeakSpan" and e.sentence_index == 3
    ]
    assert state.clock_ms == spans[0].t_start
    _, effects = engine.advance(state, state.clock_ms)
    assert any(
        isinstance(e, HighlightSentence) and e.sentence_index == third.index for e in effects
    )


def test_wheel_engagement_pauses_and_syncs_cursor():
    engine = engine_for(wheel_doc())
    state = replace(engine.initial_state(), view=PageView(page_index=0), playing=True)
    state, _ = engine.advance(state, engine.script.events[-1].t // 2)
    mid_sentence = state.current_sentence
    assert mid_sentence is not None and mid_sentence > 0
    state, _ = engine.apply(state, WheelMove(5.0))
    assert not state.playing
    assert state.wheel.active
    assert state.wheel.cursor_sentence == mid_sentence


def test_wheel_cursor_pure_function_of_degrees():
    engine = engine_for(wheel_doc())
    for chunks in ([360.0], [90.0] * 4, [30.0] * 12, [7.5] * 48):
        state = replace(engine.initial_state(), view=PageView(page_index=0))
        for delta in chunks:
            state, _ = engine.apply(state, WheelMove(delta))
        assert state.wheel.cursor_sentence == 12, chunks


def test_wheel_in_document_view_is_noop():
    engine = engine_for(wheel_doc())
    state = engine.initial_state()
    new_state, effects = engine.apply(state, WheelMove(90.0))
    assert new_state == state
    assert effects == []


# --- replay & determinism ----------------------------------------------------


def test_advance_partition_equivalence():
    rng = random.Random(31337)
    for _ in range(30):
        compiled = compile_doc(random_document(rng))
        engine = engine_for(compiled)
        end = end_time(engine)
        base_state = playing_state(engine)
        full_state, full_effects = engine.advance(base_state, end)
        cuts = sorted(rng.randint(0, end) for _ in range(rng.randint(1, 6)))
        state = base_state
        effects = []
        for cut in cuts + [end]:
            state, step = engine.advance(state, cut)
            effects.extend(step)
        assert effects == full_effects
        assert state == full_state


def test_identical_runs_identical_traces():
    compiled = wheel_doc()
    engine = engine_for(compiled)

    def run():
        state = engine.initial_state()
        trace = []
        for step in [
            ("apply", SelectDocument(compiled.document.id)),
            ("apply", SelectRegion("ra")),
            ("clock", 4000),
            ("apply", ZoomToggle()),
            ("clock", 9000),
            ("apply", WheelMove(95.0)),
            ("apply", WheelMove(-40.0)),
            ("apply", WheelRelease()),
            ("clock", 12_000),
        ]:
            if step[0] == "clock":
                state, effects = engine.advance(state, step[1])
            else:
                state, effects = engine.apply(state, step[1])
            trace.extend(format_ui_event(e) for e in effects)
        return trace, state

    t1, s1 = run()
    t2, s2 = run()
    assert t1 == t2
    assert s1 == s2
