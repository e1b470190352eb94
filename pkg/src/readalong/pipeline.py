"""End-to-end compilation: layout bytes -> narrated, linked, timed bundle."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .bundle import write_bundle, write_bundle_dir
from .ingest import Sentence, parse_layout, segment_sentences
from .linker import build_target_index, extract_mentions, resolve
from .model import Document, Keyphrase, Link
from .narrator import (
    DEFAULT_WARNING_THRESHOLD,
    LinearTtsTiming,
    ReadingScript,
    TtsTiming,
    compile_script,
)
from .summarizer import corpus_stats, summarize_document


@dataclass(frozen=True)
class CompileOptions:
    timing: TtsTiming = field(default_factory=LinearTtsTiming)
    warning_threshold: float = DEFAULT_WARNING_THRESHOLD
    page_px_width: int = 306
    thumb_px_width: int = 64


@dataclass(frozen=True)
class CompiledDocument:
    document: Document
    sentences: list[Sentence]
    links: list[Link]
    keyphrases: list[Keyphrase]
    script: ReadingScript

    def manifest_bytes(self) -> bytes:
        return write_bundle(self.document, self.links, self.keyphrases, self.script)


def compile_document(document: Document, options: CompileOptions = CompileOptions()) -> CompiledDocument:
    """Run the analysis stages over an already-parsed document."""
    sentences = segment_sentences(document)
    links = resolve(extract_mentions(document), build_target_index(document))
    keyphrases = summarize_document(document, corpus_stats(document))
    script = compile_script(
        document,
        sentences,
        links,
        keyphrases,
        timing=options.timing,
        warning_threshold=options.warning_threshold,
    )
    return CompiledDocument(
        document=document,
        sentences=sentences,
        links=links,
        keyphrases=keyphrases,
        script=script,
    )


def compile_layout(data: bytes | str, options: CompileOptions = CompileOptions()) -> CompiledDocument:
    return compile_document(parse_layout(data), options)


def compile_to_dir(
    layout_path: str | Path, out_dir: str | Path, options: CompileOptions = CompileOptions()
) -> CompiledDocument:
    """Compile a layout file and write the complete bundle directory."""
    compiled = compile_layout(Path(layout_path).read_bytes(), options)
    write_bundle_dir(
        out_dir,
        compiled.document,
        compiled.links,
        compiled.keyphrases,
        compiled.script,
        page_px_width=options.page_px_width,
        thumb_px_width=options.thumb_px_width,
    )
    return compiled
