"""Bundle (de)serialization: the compiled on-disk/wire form of a document.

``write_bundle``/``read_bundle`` handle the manifest bytes (documents, links,
keyphrases, script) with byte-deterministic output; ``write_bundle_dir``/
``read_bundle_dir`` handle the full directory layout including placeholder
page rasters and per-sentence audio clips. Schema in docs/bundle-format.md.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from . import narrator
from .model import (
    BoundingBox,
    Document,
    Keyphrase,
    Link,
    LinkKind,
    Page,
    Region,
    RegionKind,
    SourceKind,
    TextSpan,
    validate,
    validate_links,
)
from .narrator import ReadingScript, ScriptEvent, sentence_clip_plan

BUNDLE_VERSION = 1

BundleParts = tuple[Document, list[Link], list[Keyphrase], ReadingScript]


class BundleError(Exception):
    """Base class for bundle (de)serialization failures."""


class BundleParseError(BundleError):
    """Malformed bundle bytes; ``offset`` locates the failure when known."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class BundleVersionError(BundleError):
    """The bundle was written by an incompatible schema version."""


def _span_to_obj(span: TextSpan) -> dict:
    return {"region": span.region_id, "start": span.char_start, "end": span.char_end}


def _event_to_obj(event: ScriptEvent) -> dict:
    if isinstance(event, narrator.SpeakSpan):
        return {
            "type": "speak",
            "t_start": event.t_start,
            "t_end": event.t_end,
            "span": _span_to_obj(event.span),
            "sentence": event.sentence_index,
        }
    if isinstance(event, narrator.SentenceBoundary):
        return {"type": "sentence_boundary", "t": event.t, "sentence": event.sentence_index}
    if isinstance(event, narrator.LinkTrigger):
        return {"type": "link_trigger", "t": event.t, "link": event.link_id}
    if isinstance(event, narrator.OcrWarning):
        return {
            "type": "warning",
            "t_start": event.t_start,
            "t_end": event.t_end,
            "region": event.region_id,
            "text": event.text,
        }
    if isinstance(event, narrator.RegionStart):
        return {"type": "region_start", "t": event.t, "region": event.region_id}
    if isinstance(event, narrator.PageBoundary):
        return {"type": "page_boundary", "t": event.t, "page": event.page_index}
    if isinstance(event, narrator.DocumentEnd):
        return {"type": "document_end", "t": event.t}
    raise BundleError(f"unknown script event type {type(event).__name__}")


def write_bundle(
    document: Document,
    links: list[Link],
    keyphrases: list[Keyphrase],
    script: ReadingScript,
) -> bytes:
    """Serialize to manifest bytes; identical inputs yield identical bytes."""
    violations = validate(document) + validate_links(document, links)
    if violations:
        raise BundleError("cannot write invalid bundle:\n  " + "\n  ".join(violations))

    payload: dict[str, Any] = {
        "bundle_version": BUNDLE_VERSION,
        "document": {
            "id": document.id,
            "title": document.title,
            "source_kind": document.source_kind.value,
            "reading_order": list(document.reading_order),
            "pages": [
                {
                    "width": page.width,
                    "height": page.height,
                    "regions": [
                        {
                            "id": region.id,
                            "kind": region.kind.value,
                            "bbox": [
                                region.bbox.x,
                                region.bbox.y,
                                region.bbox.w,
                                region.bbox.h,
                            ],
                            "text": region.text,
                            **(
                                {"ocr_confidence": region.ocr_confidence}
                                if region.ocr_confidence is not None
                                else {}
                            ),
                        }
                        for region in page.regions
                    ],
                }
                for page in document.pages
            ],
        },
        "links": [
            {
                "id": link.id,
                "source": _span_to_obj(link.source),
                "target": link.target_region,
                "kind": link.kind.value,
                "label": link.label,
                "confidence": link.confidence,
            }
            for link in links
        ],
        "keyphrases": [
            {"region": kp.region_id, "phrase": kp.phrase, "score": kp.score}
            for kp in keyphrases
        ],
        "script": {
            "document_id": script.document_id,
            "timing": script.timing,
            "warning_threshold": script.warning_threshold,
            "events": [_event_to_obj(event) for event in script.events],
        },
    }
    # No trailing newline: every strict prefix of the bytes must fail to parse.
    return json.dumps(payload, indent=2, ensure_ascii=True).encode("utf-8")


def _expect(obj: Any, key: str, where: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise BundleParseError(f"{where}: missing field {key!r}")
    return obj[key]


def _span_from_obj(obj: Any, where: str) -> TextSpan:
    return TextSpan(
        region_id=_expect(obj, "region", where),
        char_start=int(_expect(obj, "start", where)),
        char_end=int(_expect(obj, "end", where)),
    )


def _event_from_obj(obj: Any, where: str) -> ScriptEvent:
    kind = _expect(obj, "type", where)
    if kind == "speak":
        return narrator.SpeakSpan(
            t_start=int(_expect(obj, "t_start", where)),
            t_end=int(_expect(obj, "t_end", where)),
            span=_span_from_obj(_expect(obj, "span", where), where),
            sentence_index=int(_expect(obj, "sentence", where)),
        )
    if kind == "sentence_boundary":
        return narrator.SentenceBoundary(
            t=int(_expect(obj, "t", where)), sentence_index=int(_expect(obj, "sentence", where))
        )
    if kind == "link_trigger":
        return narrator.LinkTrigger(t=int(_expect(obj, "t", where)), link_id=_expect(obj, "link", where))
    if kind == "warning":
        return narrator.OcrWarning(
            t_start=int(_expect(obj, "t_start", where)),
            t_end=int(_expect(obj, "t_end", where)),
            region_id=_expect(obj, "region", where),
            text=_expect(obj, "text", where),
        )
    if kind == "region_start":
        return narrator.RegionStart(t=int(_expect(obj, "t", where)), region_id=_expect(obj, "region", where))
    if kind == "page_boundary":
        return narrator.PageBoundary(t=int(_expect(obj, "t", where)), page_index=int(_expect(obj, "page", where)))
    if kind == "document_end":
        return narrator.DocumentEnd(t=int(_expect(obj, "t", where)))
    raise BundleParseError(f"{where}: unknown event type {kind!r}")


def read_bundle(data: bytes) -> BundleParts:
    """Parse manifest bytes back into (document, links, keyphrases, script)."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise BundleParseError(f"bundle is not valid UTF-8: {exc.reason}", offset=exc.start) from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleParseError(
            f"bundle parse error at byte {exc.pos}: {exc.msg}", offset=exc.pos
        ) from exc
    if not isinstance(payload, dict):
        raise BundleParseError("bundle root must be an object")

    version = payload.get("bundle_version")
    if version != BUNDLE_VERSION:
        raise BundleVersionError(
            f"bundle_version {version!r} unsupported, expected {BUNDLE_VERSION}"
        )

    try:
        doc_obj = _expect(payload, "document", "bundle")
        pages: list[Page] = []
        for page_index, page_obj in enumerate(_expect(doc_obj, "pages", "document")):
            where = f"page {page_index}"
            regions = []
            for region_obj in _expect(page_obj, "regions", where):
                bbox = _expect(region_obj, "bbox", where)
                if not isinstance(bbox, list) or len(bbox) != 4:
                    raise BundleParseError(f"{where}: bbox must be [x, y, w, h]")
                confidence = region_obj.get("ocr_confidence")
                regions.append(
                    Region(
                        id=_expect(region_obj, "id", where),
                        page_index=page_index,
                        bbox=BoundingBox(*(float(v) for v in bbox)),
                        kind=RegionKind(_expect(region_obj, "kind", where)),
                        text=_expect(region_obj, "text", where),
                        ocr_confidence=None if confidence is None else float(confidence),
                    )
                )
            pages.append(
                Page(
                    index=page_index,
                    width=float(_expect(page_obj, "width", where)),
                    height=float(_expect(page_obj, "height", where)),
                    regions=tuple(regions),
                )
            )
        document = Document(
            id=_expect(doc_obj, "id", "document"),
            title=_expect(doc_obj, "title", "document"),
            source_kind=SourceKind(_expect(doc_obj, "source_kind", "document")),
            pages=tuple(pages),
            reading_order=tuple(_expect(doc_obj, "reading_order", "document")),
        )

        links = [
            Link(
                id=_expect(obj, "id", "link"),
                source=_span_from_obj(_expect(obj, "source", "link"), "link"),
                target_region=_expect(obj, "target", "link"),
                kind=LinkKind(_expect(obj, "kind", "link")),
                label=_expect(obj, "label", "link"),
                confidence=float(_expect(obj, "confidence", "link")),
            )
            for obj in _expect(payload, "links", "bundle")
        ]
        keyphrases = [
            Keyphrase(
                region_id=_expect(obj, "region", "keyphrase"),
                phrase=_expect(obj, "phrase", "keyphrase"),
                score=float(_expect(obj, "score", "keyphrase")),
            )
            for obj in _expect(payload, "keyphrases", "bundle")
        ]
        script_obj = _expect(payload, "script", "bundle")
        script = ReadingScript(
            document_id=_expect(script_obj, "document_id", "script"),
            timing=dict(_expect(script_obj, "timing", "script")),
            warning_threshold=float(_expect(script_obj, "warning_threshold", "script")),
            events=tuple(
                _event_from_obj(obj, f"script event {i}")
                for i, obj in enumerate(_expect(script_obj, "events", "script"))
            ),
        )
    except BundleParseError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise BundleParseError(f"bundle structure invalid: {exc}") from exc

    return document, links, keyphrases, script


MANIFEST_NAME = "manifest.json"
THUMB_NAME = "thumb.png"
AUDIO_DIR = "audio"


def page_image_name(page_index: int) -> str:
    return f"page-{page_index}.png"


def write_bundle_dir(
    out_dir: str | Path,
    document: Document,
    links: list[Link],
    keyphrases: list[Keyphrase],
    script: ReadingScript,
    page_px_width: int = 306,
    thumb_px_width: int = 64,
) -> Path:
    """Write the full bundle directory: manifest, rasters, audio placeholders."""
    from . import raster

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / MANIFEST_NAME).write_bytes(write_bundle(document, links, keyphrases, script))
    (out / THUMB_NAME).write_bytes(raster.render_thumb(document, px_width=thumb_px_width))
    for page in document.pages:
        (out / page_image_name(page.index)).write_bytes(
            raster.render_page_image(page, px_width=page_px_width)
        )
    audio = out / AUDIO_DIR
    audio.mkdir(exist_ok=True)
    for clip in sentence_clip_plan(script):
        (audio / str(clip.sentence_index)).write_bytes(
            placeholder_clip_bytes(clip.sentence_index, clip.t_start, clip.t_end)
        )
    return out


def read_bundle_dir(path: str | Path) -> BundleParts:
    manifest = Path(path) / MANIFEST_NAME
    if not manifest.is_file():
        raise BundleError(f"no {MANIFEST_NAME} in bundle directory {path}")
    return read_bundle(manifest.read_bytes())


def placeholder_clip_bytes(sentence_index: int, t_start: int, t_end: int) -> bytes:
    """Stand-in audio payload whose length tracks the clip duration."""
    header = f"clip {sentence_index} {t_start} {t_end}\n".encode("ascii")
    size = max(len(header), (t_end - t_start) // 10)
    return header + b"." * (size - len(header))
