"""Document narration compiler and synchronized reader engine.

Turns pre-segmented layout documents into timed reading scripts that bind
spoken text to visual regions, plays them back through a deterministic state
machine, and serves compiled bundles progressively to a reader client.
"""

from .bundle import (
    BundleError,
    BundleParseError,
    BundleVersionError,
    read_bundle,
    read_bundle_dir,
    write_bundle,
    write_bundle_dir,
)
from .delivery import BundleClient, Cursor, DocInfo, FetchItem, plan_fetches, serve
from .ingest import (
    LayoutError,
    Sentence,
    infer_reading_order,
    parse_layout,
    segment_sentences,
    serialize_layout,
)
from .linker import ReferenceMention, TargetIndex, build_target_index, extract_mentions, resolve
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
)
from .narrator import (
    LinearTtsTiming,
    ReadingScript,
    compile_script,
    sentence_clip_plan,
)
from .pipeline import CompileOptions, CompiledDocument, compile_document, compile_layout, compile_to_dir
from .playback import PlaybackState, PlayerConfig, ReaderEngine, fit_region
from .summarizer import corpus_stats, summarize_document, summarize_region

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "BundleClient",
    "BundleError",
    "BundleParseError",
    "BundleVersionError",
    "CompileOptions",
    "CompiledDocument",
    "Cursor",
    "DocInfo",
    "Document",
    "FetchItem",
    "Keyphrase",
    "LayoutError",
    "LinearTtsTiming",
    "Link",
    "LinkKind",
    "Page",
    "PlaybackState",
    "PlayerConfig",
    "ReaderEngine",
    "ReadingScript",
    "ReferenceMention",
    "Region",
    "RegionKind",
    "Sentence",
    "SourceKind",
    "TargetIndex",
    "TextSpan",
    "build_target_index",
    "compile_document",
    "compile_layout",
    "compile_script",
    "compile_to_dir",
    "corpus_stats",
    "extract_mentions",
    "fit_region",
    "infer_reading_order",
    "parse_layout",
    "plan_fetches",
    "read_bundle",
    "read_bundle_dir",
    "resolve",
    "segment_sentences",
    "sentence_clip_plan",
    "serialize_layout",
    "serve",
    "summarize_document",
    "summarize_region",
    "validate",
    "write_bundle",
    "write_bundle_dir",
]
