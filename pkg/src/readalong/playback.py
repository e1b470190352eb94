"""Deterministic reader engine: script + clock + commands in, UI effects out.

The engine never touches a real clock or screen. ``advance`` consumes script
events up to a new clock value; ``apply`` handles navigation commands. Both
return a new state plus a list of UI effect values, so identical inputs always
produce identical traces and any interval of playback can be replayed in any
partition with the same result.

Link behavior follows the view mode: while zoomed out to the page, a link
crossing vibrates and highlights the target; while zoomed into the text it
vibrates and auto-pans the viewport to frame the target region.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field, replace
from typing import Union

from .model import BoundingBox, Document, Keyphrase, Link, Page
from .narrator import (
    DocumentEnd,
    LinkTrigger,
    OcrWarning,
    PageBoundary,
    ReadingScript,
    SentenceBoundary,
    SpeakSpan,
    event_time,
)


class ClockRegressionError(ValueError):
    """advance() was asked to move the clock backwards."""


class UnknownRegionError(KeyError):
    """A command referenced a region id that is not in the document."""


# --- view states -----------------------------------------------------------


@dataclass(frozen=True)
class DocumentView:
    selected_doc: str | None = None


@dataclass(frozen=True)
class PageView:
    page_index: int


@dataclass(frozen=True)
class TextView:
    page_index: int
    viewport: BoundingBox


ViewState = Union[DocumentView, PageView, TextView]


@dataclass(frozen=True)
class WheelState:
    """Scrub wheel bookkeeping; ``pinned`` latches a boundary excursion so the
    end-of-document notice fires once per crossing, not once per step."""

    accumulated_degrees: float = 0.0
    cursor_sentence: int = 0
    active: bool = False
    pinned: bool = False


@dataclass(frozen=True)
class PlaybackState:
    clock_ms: int = 0
    event_cursor: int = 0
    playing: bool = False
    view: ViewState = DocumentView()
    current_sentence: int | None = None
    wheel: WheelState = WheelState()


# --- UI effects ------------------------------------------------------------


@dataclass(frozen=True)
class KeyphraseClip:
    region_id: str


@dataclass(frozen=True)
class SentenceClip:
    index: int


@dataclass(frozen=True)
class Notice:
    kind: str  # "page_boundary" | "document_boundary"


Clip = Union[KeyphraseClip, SentenceClip, Notice]


@dataclass(frozen=True)
class HighlightSentence:
    t: int
    sentence_index: int


@dataclass(frozen=True)
class HighlightRegion:
    t: int
    region_id: str


@dataclass(frozen=True)
class Vibrate:
    t: int
    duration_ms: int


@dataclass(frozen=True)
class HighlightLink:
    t: int
    link_id: str


@dataclass(frozen=True)
class PanTo:
    t: int
    viewport: BoundingBox
    animate_ms: int


@dataclass(frozen=True)
class PlayClip:
    t: int
    clip: Clip


@dataclass(frozen=True)
class ShowWarning:
    t: int
    region_id: str


UIEvent = Union[
    HighlightSentence, HighlightRegion, Vibrate, HighlightLink, PanTo, PlayClip, ShowWarning
]


# --- commands --------------------------------------------------------------


@dataclass(frozen=True)
class SelectDocument:
    doc_id: str


@dataclass(frozen=True)
class SelectRegion:
    region_id: str


@dataclass(frozen=True)
class PressAt:
    x: float
    y: float


@dataclass(frozen=True)
class TogglePlay:
    pass


@dataclass(frozen=True)
class ZoomToggle:
    pass


@dataclass(frozen=True)
class Flick:
    direction: str  # "next" | "prev"


@dataclass(frozen=True)
class WheelMove:
    delta_degrees: float


@dataclass(frozen=True)
class WheelRelease:
    pass


Command = Union[
    SelectDocument, SelectRegion, PressAt, TogglePlay, ZoomToggle, Flick, WheelMove, WheelRelease
]


@dataclass(frozen=True)
class PlayerConfig:
    screen_aspect: float = 0.5625  # w/h, portrait phone
    margin_frac: float = 0.05
    wheel_step_degrees: float = 30.0
    sentence_vibrate_ms: int = 40
    link_vibrate_ms: int = 200
    pan_animate_ms: int = 400


def fit_region(
    target: BoundingBox, page: Page, screen_aspect: float, margin_frac: float
) -> BoundingBox:
    """Smallest screen-aspect rectangle framing ``target`` plus margin.

    Centered on the margin-expanded target, then translated (never shrunk)
    into the page; a dimension larger than the page is centered on the page
    in that dimension instead.
    """
    if screen_aspect <= 0:
        raise ValueError("screen_aspect must be > 0")
    if not 0 <= margin_frac < 0.5:
        raise ValueError("margin_frac must be in [0, 0.5)")
    page_box = BoundingBox(0.0, 0.0, page.width, page.height)
    if not page_box.contains_box(target):
        raise ValueError("target must lie within the page")

    expanded = target.expanded(margin_frac)
    if expanded.w / expanded.h >= screen_aspect:
        w = expanded.w
        h = expanded.w / screen_aspect
    else:
        h = expanded.h
        w = expanded.h * screen_aspect
    cx, cy = expanded.center()
    x = cx - w / 2.0
    y = cy - h / 2.0
    if w >= page.width:
        x = (page.width - w) / 2.0
    else:
        x = min(max(x, 0.0), page.width - w)
    if h >= page.height:
        y = (page.height - h) / 2.0
    else:
        y = min(max(y, 0.0), page.height - h)
    return BoundingBox(x, y, w, h)


def _clamp_viewport(viewport: BoundingBox, page: Page) -> BoundingBox:
    x, y, w, h = viewport.x, viewport.y, viewport.w, viewport.h
    x = (page.width - w) / 2.0 if w >= page.width else min(max(x, 0.0), page.width - w)
    y = (page.height - h) / 2.0 if h >= page.height else min(max(y, 0.0), page.height - h)
    return BoundingBox(x, y, w, h)


@dataclass
class _SentenceInfo:
    region_id: str
    page_index: int
    t_start: int


class ReaderEngine:
    """State machine over one compiled document.

    The compiled inputs are immutable; states are frozen values, so the engine
    can be shared and any (state, inputs) pair replayed at will.
    """

    def __init__(
        self,
        document: Document,
        links: list[Link],
        keyphrases: list[Keyphrase],
        script: ReadingScript,
        config: PlayerConfig = PlayerConfig(),
    ):
        self.document = document
        self.config = config
        self.script = script
        self.links = {link.id: link for link in links}
        self.keyphrases = {kp.region_id: kp for kp in keyphrases}
        self.regions = {r.id: r for r in document.iter_regions()}
        self._times = [event_time(ev) for ev in script.events]

        self._sentences: dict[int, _SentenceInfo] = {}
        for ev in script.events:
            if isinstance(ev, SpeakSpan) and ev.sentence_index not in self._sentences:
                region = self.regions[ev.span.region_id]
                self._sentences[ev.sentence_index] = _SentenceInfo(
                    region_id=region.id, page_index=region.page_index, t_start=ev.t_start
                )
        self.sentence_count = len(self._sentences)

    # -- construction helpers ------------------------------------------

    def initial_state(self) -> PlaybackState:
        return PlaybackState()

    def _first_sentence_on_page(self, page_index: int) -> int | None:
        for index in sorted(self._sentences):
            if self._sentences[index].page_index == page_index:
                return index
        return None

    def _fit(self, target: BoundingBox, page: Page) -> BoundingBox:
        return fit_region(target, page, self.config.screen_aspect, self.config.margin_frac)

    # -- clock-driven progression ----------------------------------------

    def advance(self, state: PlaybackState, new_clock_ms: int) -> tuple[PlaybackState, list[UIEvent]]:
        """Emit effects for every script event in (last clock, new clock]."""
        if new_clock_ms < state.clock_ms:
            raise ClockRegressionError(
                f"clock moved backwards: {state.clock_ms} -> {new_clock_ms}"
            )
        if not state.playing:
            return state, []

        effects: list[UIEvent] = []
        cursor = state.event_cursor
        view = state.view
        playing = state.playing
        current = state.current_sentence
        ended_at: int | None = None
        events = self.script.events

        while cursor < len(events) and self._times[cursor] <= new_clock_ms:
            event = events[cursor]
            cursor += 1
            if isinstance(event, SpeakSpan):
                if event.sentence_index != current:
                    current = event.sentence_index
                    effects.append(HighlightSentence(t=event.t_start, sentence_index=current))
            elif isinstance(event, SentenceBoundary):
                # Boundary haptics belong to wheel scrubbing, not normal playback.
                if state.wheel.active:
                    effects.append(Vibrate(t=event.t, duration_ms=self.config.sentence_vibrate_ms))
            elif isinstance(event, LinkTrigger):
                view = self._trigger_link(event, view, effects)
            elif isinstance(event, OcrWarning):
                effects.append(ShowWarning(t=event.t_start, region_id=event.region_id))
            elif isinstance(event, PageBoundary):
                if isinstance(view, PageView):
                    view = PageView(page_index=event.page_index)
                elif isinstance(view, TextView):
                    page = self.document.pages[event.page_index]
                    view = TextView(
                        page_index=event.page_index,
                        viewport=_clamp_viewport(view.viewport, page),
                    )
            elif isinstance(event, DocumentEnd):
                playing = False
                ended_at = event.t

        new_state = replace(
            state,
            # The clock is the audio position: it cannot run past the end of
            # the document, which keeps advance() partition-invariant.
            clock_ms=new_clock_ms if ended_at is None else ended_at,
            event_cursor=cursor,
            playing=playing,
            view=view,
            current_sentence=current,
        )
        return new_state, effects

    def _trigger_link(self, event: LinkTrigger, view: ViewState, effects: list[UIEvent]) -> ViewState:
        link = self.links[event.link_id]
        effects.append(Vibrate(t=event.t, duration_ms=self.config.link_vibrate_ms))
        if isinstance(view, TextView):
            target = self.regions[link.target_region]
            page = self.document.pages[target.page_index]
            viewport = self._fit(target.bbox, page)
            effects.append(PanTo(t=event.t, viewport=viewport, animate_ms=self.config.pan_animate_ms))
            return TextView(page_index=target.page_index, viewport=viewport)
        effects.append(HighlightLink(t=event.t, link_id=event.link_id))
        return view

    # -- commands ----------------------------------------------------------

    def apply(self, state: PlaybackState, command: Command) -> tuple[PlaybackState, list[UIEvent]]:
        if isinstance(command, SelectDocument):
            return self._select_document(state, command)
        if isinstance(command, SelectRegion):
            return self._select_region(state, command.region_id)
        if isinstance(command, PressAt):
            return self._press_at(state, command)
        if isinstance(command, TogglePlay):
            return replace(state, playing=not state.playing), []
        if isinstance(command, ZoomToggle):
            return self._zoom_toggle(state), []
        if isinstance(command, Flick):
            return self._flick(state, command.direction), []
        if isinstance(command, WheelMove):
            return self._wheel_move(state, command.delta_degrees)
        if isinstance(command, WheelRelease):
            return self._wheel_release(state)
        raise TypeError(f"unknown command {command!r}")

    def _select_document(self, state: PlaybackState, command: SelectDocument) -> tuple[PlaybackState, list[UIEvent]]:
        if command.doc_id != self.document.id:
            raise UnknownRegionError(command.doc_id)
        if not self.document.pages:
            return replace(state, view=DocumentView(selected_doc=command.doc_id)), []
        return replace(state, view=PageView(page_index=0)), []

    def _select_region(self, state: PlaybackState, region_id: str) -> tuple[PlaybackState, list[UIEvent]]:
        region = self.regions.get(region_id)
        if region is None:
            raise UnknownRegionError(region_id)
        effects: list[UIEvent] = [HighlightRegion(t=state.clock_ms, region_id=region_id)]
        first = None
        for index in sorted(self._sentences):
            if self._sentences[index].region_id == region_id:
                first = index
                break
        if first is None:
            # Figures, tables, and empty regions have nothing to read.
            return state, effects
        new_state = self._seek(state, self._sentences[first].t_start)
        return replace(new_state, playing=True), effects

    def _press_at(self, state: PlaybackState, command: PressAt) -> tuple[PlaybackState, list[UIEvent]]:
        if isinstance(state.view, DocumentView):
            return self._select_document(state, SelectDocument(self.document.id))
        page = self.document.pages[state.view.page_index]
        hits = [r for r in page.regions if r.bbox.contains_point(command.x, command.y)]
        if not hits:
            return state, []
        target = min(hits, key=lambda r: (r.bbox.w * r.bbox.h, r.id))
        return self._select_region(state, target.id)

    def _zoom_toggle(self, state: PlaybackState) -> PlaybackState:
        view = state.view
        if isinstance(view, TextView):
            return replace(state, view=PageView(page_index=view.page_index))
        if isinstance(view, PageView):
            page = self.document.pages[view.page_index]
            target = self._zoom_target(state, view.page_index, page)
            return replace(
                state, view=TextView(page_index=view.page_index, viewport=self._fit(target, page))
            )
        return state

    def _zoom_target(self, state: PlaybackState, page_index: int, page: Page) -> BoundingBox:
        sentence = state.current_sentence
        if sentence is not None and self._sentences[sentence].page_index == page_index:
            return self.regions[self._sentences[sentence].region_id].bbox
        fallback = self._first_sentence_on_page(page_index)
        if fallback is not None:
            return self.regions[self._sentences[fallback].region_id].bbox
        return BoundingBox(0.0, 0.0, page.width, page.height)

    def _flick(self, state: PlaybackState, direction: str) -> PlaybackState:
        view = state.view
        if isinstance(view, DocumentView) or not self.document.pages:
            return state
        delta = 1 if direction == "next" else -1
        page_index = min(max(view.page_index + delta, 0), len(self.document.pages) - 1)
        if isinstance(view, PageView):
            return replace(state, view=PageView(page_index=page_index))
        page = self.document.pages[page_index]
        return replace(
            state,
            view=TextView(page_index=page_index, viewport=_clamp_viewport(view.viewport, page)),
        )

    def _wheel_move(self, state: PlaybackState, delta_degrees: float) -> tuple[PlaybackState, list[UIEvent]]:
        if isinstance(state.view, DocumentView):
            return state, []
        wheel = state.wheel
        playing = state.playing
        if not wheel.active:
            # Engaging the wheel takes over navigation: pause and pick up
            # the scrub cursor at the sentence currently being read.
            cursor = state.current_sentence if state.current_sentence is not None else wheel.cursor_sentence
            wheel = WheelState(accumulated_degrees=0.0, cursor_sentence=cursor, active=True)
            playing = False

        effects: list[UIEvent] = []
        acc = wheel.accumulated_degrees + delta_degrees
        cursor = wheel.cursor_sentence
        pinned = wheel.pinned
        quantum = self.config.wheel_step_degrees
        while acc >= quantum:
            acc -= quantum
            cursor, pinned = self._wheel_step(state, cursor, +1, pinned, effects)
        while acc <= -quantum:
            acc += quantum
            cursor, pinned = self._wheel_step(state, cursor, -1, pinned, effects)

        new_wheel = WheelState(
            accumulated_degrees=acc, cursor_sentence=cursor, active=True, pinned=pinned
        )
        return replace(state, wheel=new_wheel, playing=playing), effects

    def _wheel_step(
        self,
        state: PlaybackState,
        cursor: int,
        direction: int,
        pinned: bool,
        effects: list[UIEvent],
    ) -> tuple[int, bool]:
        t = state.clock_ms
        nxt = cursor + direction
        if self.sentence_count == 0 or nxt < 0 or nxt >= self.sentence_count:
            if not pinned:
                effects.append(PlayClip(t=t, clip=Notice(kind="document_boundary")))
            return cursor, True
        effects.append(Vibrate(t=t, duration_ms=self.config.sentence_vibrate_ms))
        old_info = self._sentences[cursor] if cursor in self._sentences else None
        new_info = self._sentences[nxt]
        if old_info is None or new_info.region_id != old_info.region_id:
            effects.append(PlayClip(t=t, clip=KeyphraseClip(region_id=new_info.region_id)))
        if old_info is not None and new_info.page_index != old_info.page_index:
            effects.append(PlayClip(t=t, clip=Notice(kind="page_boundary")))
        return nxt, False

    def _wheel_release(self, state: PlaybackState) -> tuple[PlaybackState, list[UIEvent]]:
        wheel = state.wheel
        if not wheel.active:
            return state, []
        reset = WheelState(
            accumulated_degrees=0.0, cursor_sentence=wheel.cursor_sentence, active=False
        )
        if self.sentence_count == 0:
            return replace(state, wheel=reset), []
        info = self._sentences[wheel.cursor_sentence]
        new_state = self._seek(state, info.t_start)
        return replace(new_state, playing=True, wheel=reset), []

    def _seek(self, state: PlaybackState, t: int) -> PlaybackState:
        cursor = bisect.bisect_left(self._times, t)
        return replace(state, clock_ms=t, event_cursor=cursor, current_sentence=None)


# --- trace formatting -------------------------------------------------------


def _fmt_num(value: float) -> str:
    return repr(float(value))


def format_ui_event(event: UIEvent) -> str:
    """One-line stable rendering of a UI effect, used by the play CLI."""
    if isinstance(event, HighlightSentence):
        return f"{event.t} highlight_sentence sentence={event.sentence_index}"
    if isinstance(event, HighlightRegion):
        return f"{event.t} highlight_region region={event.region_id}"
    if isinstance(event, Vibrate):
        return f"{event.t} vibrate ms={event.duration_ms}"
    if isinstance(event, HighlightLink):
        return f"{event.t} highlight_link link={event.link_id}"
    if isinstance(event, PanTo):
        box = event.viewport
        return (
            f"{event.t} pan_to x={_fmt_num(box.x)} y={_fmt_num(box.y)}"
            f" w={_fmt_num(box.w)} h={_fmt_num(box.h)} animate_ms={event.animate_ms}"
        )
    if isinstance(event, PlayClip):
        clip = event.clip
        if isinstance(clip, KeyphraseClip):
            return f"{event.t} play_clip keyphrase region={clip.region_id}"
        if isinstance(clip, SentenceClip):
            return f"{event.t} play_clip sentence index={clip.index}"
        return f"{event.t} play_clip notice kind={clip.kind}"
    if isinstance(event, ShowWarning):
        return f"{event.t} show_warning region={event.region_id}"
    raise TypeError(f"unknown UI event {event!r}")
