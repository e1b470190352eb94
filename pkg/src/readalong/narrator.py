"""Compile a document into a timed reading script.

The script is the single timing authority for playback: word-level speak
spans, sentence boundaries, link triggers anchored to the word that utters the
reference, and advance warnings before poorly recognized scanned regions. A
pluggable timing model supplies durations; the default is a deterministic
linear model so compilation is byte-reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Protocol, Union, runtime_checkable

from .ingest import Sentence
from .model import Document, Keyphrase, Link, SourceKind, TextSpan

WARNING_TEXT = "Warning, upcoming TTS may be unintelligible"
DEFAULT_WARNING_THRESHOLD = 0.6

_WORD_RE = re.compile(r"\S+")


@runtime_checkable
class TtsTiming(Protocol):
    """Duration model for synthesized speech; must be deterministic."""

    inter_word_gap: int
    inter_sentence_pause: int
    warning_duration: int

    def word_duration(self, word: str) -> int: ...

    def config(self) -> dict: ...


@dataclass(frozen=True)
class LinearTtsTiming:
    """Default mock timing: a flat base plus a per-character cost."""

    base_ms: int = 100
    per_char_ms: int = 50
    inter_word_gap: int = 30
    inter_sentence_pause: int = 300
    warning_duration: int = 2000

    def word_duration(self, word: str) -> int:
        return self.base_ms + self.per_char_ms * len(word)

    def config(self) -> dict:
        return {
            "model": "linear",
            "base_ms": self.base_ms,
            "per_char_ms": self.per_char_ms,
            "inter_word_gap": self.inter_word_gap,
            "inter_sentence_pause": self.inter_sentence_pause,
            "warning_duration": self.warning_duration,
        }


DEFAULT_TIMING = LinearTtsTiming()


@dataclass(frozen=True)
class SpeakSpan:
    """One word being spoken over [t_start, t_end)."""

    t_start: int
    t_end: int
    span: TextSpan
    sentence_index: int


@dataclass(frozen=True)
class SentenceBoundary:
    t: int
    sentence_index: int


@dataclass(frozen=True)
class LinkTrigger:
    t: int
    link_id: str


@dataclass(frozen=True)
class OcrWarning:
    """Advance notice occupying [t_start, t_end) right before a shaky region."""

    t_start: int
    t_end: int
    region_id: str
    text: str


@dataclass(frozen=True)
class RegionStart:
    t: int
    region_id: str


@dataclass(frozen=True)
class PageBoundary:
    t: int
    page_index: int


@dataclass(frozen=True)
class DocumentEnd:
    t: int


ScriptEvent = Union[
    SpeakSpan, SentenceBoundary, LinkTrigger, OcrWarning, RegionStart, PageBoundary, DocumentEnd
]

# Rank for deterministic ordering of events sharing a primary time.
_EVENT_RANK = {
    PageBoundary: 0,
    OcrWarning: 1,
    RegionStart: 2,
    LinkTrigger: 3,
    SpeakSpan: 4,
    SentenceBoundary: 5,
    DocumentEnd: 6,
}


def event_time(event: ScriptEvent) -> int:
    """Primary (start) time of any script event."""
    return event.t_start if isinstance(event, (SpeakSpan, OcrWarning)) else event.t


@dataclass(frozen=True)
class ReadingScript:
    """Time-ordered event stream for one document, plus the timing it assumed."""

    document_id: str
    timing: dict
    warning_threshold: float
    events: tuple[ScriptEvent, ...]


@dataclass(frozen=True)
class ClipSpan:
    """Audio chunk boundaries for one sentence."""

    sentence_index: int
    t_start: int
    t_end: int


class CompileError(ValueError):
    """Raised when script inputs are mutually inconsistent."""


def _word_spans(text: str, start: int, end: int) -> list[tuple[int, int]]:
    return [(m.start() + start, m.end() + start) for m in _WORD_RE.finditer(text[start:end])]


def compile_script(
    document: Document,
    sentences: list[Sentence],
    links: Iterable[Link] = (),
    keyphrases: Iterable[Keyphrase] = (),
    timing: TtsTiming = DEFAULT_TIMING,
    warning_threshold: float = DEFAULT_WARNING_THRESHOLD,
) -> ReadingScript:
    """Lay the document's sentences onto a timeline and anchor links to it.

    Keyphrases are carried in the bundle for wheel announcements; they occupy
    no script time. Scanned regions whose OCR confidence falls below
    ``warning_threshold`` get a warning event ending exactly where the
    region's speech begins.
    """
    links = list(links)
    keyphrases = list(keyphrases)
    by_id = {r.id: r for r in document.iter_regions()}

    by_region: dict[str, list[Sentence]] = {}
    for sentence in sentences:
        by_region.setdefault(sentence.span.region_id, []).append(sentence)

    events: list[ScriptEvent] = []
    speak_spans: list[SpeakSpan] = []
    pages_marked: set[int] = set()
    t = 0
    scanned = document.source_kind is SourceKind.SCANNED

    for region_id in document.reading_order:
        region = by_id[region_id]
        region_sentences = by_region.get(region_id, [])
        if not region_sentences:
            continue

        if region.page_index != 0 and region.page_index not in pages_marked:
            events.append(PageBoundary(t=t, page_index=region.page_index))
        pages_marked.add(region.page_index)

        if (
            scanned
            and region.ocr_confidence is not None
            and region.ocr_confidence < warning_threshold
        ):
            events.append(
                OcrWarning(
                    t_start=t,
                    t_end=t + timing.warning_duration,
                    region_id=region_id,
                    text=WARNING_TEXT,
                )
            )
            t += timing.warning_duration

        events.append(RegionStart(t=t, region_id=region_id))

        for sentence in region_sentences:
            words = _word_spans(region.text, sentence.span.char_start, sentence.span.char_end)
            for i, (w_start, w_end) in enumerate(words):
                duration = timing.word_duration(region.text[w_start:w_end])
                if duration <= 0:
                    raise CompileError(
                        f"timing model produced non-positive duration {duration}"
                    )
                span = SpeakSpan(
                    t_start=t,
                    t_end=t + duration,
                    span=TextSpan(region_id, w_start, w_end),
                    sentence_index=sentence.index,
                )
                events.append(span)
                speak_spans.append(span)
                t += duration
                if i < len(words) - 1:
                    t += timing.inter_word_gap
            events.append(SentenceBoundary(t=t, sentence_index=sentence.index))
            t += timing.inter_sentence_pause

    events.append(DocumentEnd(t=t if speak_spans else 0))

    spans_by_region: dict[str, list[SpeakSpan]] = {}
    for span in speak_spans:
        spans_by_region.setdefault(span.span.region_id, []).append(span)
    for link in links:
        anchor = None
        for span in spans_by_region.get(link.source.region_id, []):
            if span.span.char_start <= link.source.char_start < span.span.char_end:
                anchor = span
                break
        if anchor is None:
            raise CompileError(
                f"link {link.id} ({link.label!r}) starts outside every spoken span "
                f"of region {link.source.region_id}"
            )
        events.append(LinkTrigger(t=anchor.t_start, link_id=link.id))

    events.sort(key=lambda ev: (event_time(ev), _EVENT_RANK[type(ev)]))
    return ReadingScript(
        document_id=document.id,
        timing=dict(timing.config()),
        warning_threshold=warning_threshold,
        events=tuple(events),
    )


def sentence_clip_plan(script: ReadingScript) -> list[ClipSpan]:
    """Per-sentence audio chunk boundaries: first speak start to boundary time."""
    starts: dict[int, int] = {}
    ends: dict[int, int] = {}
    for event in script.events:
        if isinstance(event, SpeakSpan) and event.sentence_index not in starts:
            starts[event.sentence_index] = event.t_start
        elif isinstance(event, SentenceBoundary):
            ends[event.sentence_index] = event.t
    return [
        ClipSpan(sentence_index=index, t_start=starts[index], t_end=ends[index])
        for index in sorted(starts)
    ]
