"""Command-line entry point: compile, inspect, simulate, and serve bundles.

Subcommands: validate, link, summarize, script, compile, play, serve.
Exit codes: 0 success, 1 input error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bundle import BundleError, read_bundle_dir
from .ingest import LayoutError, parse_layout
from .linker import build_target_index, extract_mentions, resolve
from .model import validate
from .narrator import CompileError, LinearTtsTiming, event_time
from . import narrator
from .delivery import serve
from .pipeline import CompileOptions, compile_to_dir
from .playback import (
    Flick,
    PlayerConfig,
    PressAt,
    ReaderEngine,
    SelectDocument,
    SelectRegion,
    TogglePlay,
    WheelMove,
    WheelRelease,
    ZoomToggle,
    format_ui_event,
)
from .summarizer import corpus_stats, summarize_document


class InputError(ValueError):
    """User-facing input problem; maps to exit code 1."""


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"config file {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise InputError(f"config file {path}: root must be an object")
    return payload


def _timing_from(config: dict, timing_path: str | None) -> LinearTtsTiming:
    settings = dict(config.get("timing", {}))
    if timing_path:
        try:
            settings.update(json.loads(Path(timing_path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"timing config {timing_path}: {exc}") from exc
    settings.pop("model", None)
    try:
        return LinearTtsTiming(**settings)
    except TypeError as exc:
        raise InputError(f"timing config: {exc}") from exc


def _read_layout(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read layout {path}: {exc}") from exc
    return parse_layout(data)


def _cmd_validate(args, config) -> int:
    try:
        data = Path(args.layout).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read layout {args.layout}: {exc}") from exc
    try:
        parse_layout(data)
    except LayoutError as exc:
        print(exc, file=sys.stdout)
        return 1
    return 0


def _cmd_link(args, config) -> int:
    document = _read_layout(args.layout)
    mentions = extract_mentions(document)
    if args.dump_mentions:
        for m in mentions:
            span = m.span
            print(f"{m.kind.value}\t{m.ordinal}\t{span.region_id}[{span.char_start}:{span.char_end}]\t{m.text}")
        return 0
    for link in resolve(mentions, build_target_index(document)):
        span = link.source
        print(f"{link.label}\t{span.region_id}[{span.char_start}:{span.char_end}]\t{link.target_region}")
    return 0


def _cmd_summarize(args, config) -> int:
    document = _read_layout(args.layout)
    for keyphrase in summarize_document(document, corpus_stats(document)):
        print(f"{keyphrase.region_id}\t{keyphrase.phrase}")
    return 0


def _format_script_event(event) -> str:
    t = event_time(event)
    if isinstance(event, narrator.SpeakSpan):
        span = event.span
        return (
            f"{t} speak t_end={event.t_end} sentence={event.sentence_index}"
            f" region={span.region_id} chars=[{span.char_start},{span.char_end})"
        )
    if isinstance(event, narrator.SentenceBoundary):
        return f"{t} sentence_boundary sentence={event.sentence_index}"
    if isinstance(event, narrator.LinkTrigger):
        return f"{t} link_trigger link={event.link_id}"
    if isinstance(event, narrator.OcrWarning):
        return f"{t} warning t_end={event.t_end} region={event.region_id}"
    if isinstance(event, narrator.RegionStart):
        return f"{t} region_start region={event.region_id}"
    if isinstance(event, narrator.PageBoundary):
        return f"{t} page_boundary page={event.page_index}"
    return f"{t} document_end"


def _options_from(args, config) -> CompileOptions:
    threshold = config.get("warning_threshold", narrator.DEFAULT_WARNING_THRESHOLD)
    if getattr(args, "warning_threshold", None) is not None:
        threshold = args.warning_threshold
    return CompileOptions(
        timing=_timing_from(config, getattr(args, "timing", None)),
        warning_threshold=threshold,
    )


def _cmd_script(args, config) -> int:
    from .pipeline import compile_layout

    try:
        data = Path(args.layout).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read layout {args.layout}: {exc}") from exc
    compiled = compile_layout(data, _options_from(args, config))
    for event in compiled.script.events:
        print(_format_script_event(event))
    return 0


def _cmd_compile(args, config) -> int:
    compiled = compile_to_dir(args.layout, args.out, _options_from(args, config))
    print(f"compiled {compiled.document.id}: "
          f"{len(compiled.document.pages)} pages, "
          f"{len(compiled.sentences)} sentences, "
          f"{len(compiled.links)} links, "
          f"{len(compiled.keyphrases)} keyphrases -> {args.out}")
    return 0


def _parse_commands(path: str):
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read command trace {path}: {exc}") from exc
    steps = []
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        verb, rest = parts[0], parts[1:]
        try:
            if verb == "clock":
                steps.append(("clock", int(rest[0])))
            elif verb == "select_document":
                steps.append(("apply", SelectDocument(rest[0])))
            elif verb == "select_region":
                steps.append(("apply", SelectRegion(rest[0])))
            elif verb == "press_at":
                steps.append(("apply", PressAt(float(rest[0]), float(rest[1]))))
            elif verb == "toggle_play":
                steps.append(("apply", TogglePlay()))
            elif verb == "zoom_toggle":
                steps.append(("apply", ZoomToggle()))
            elif verb == "flick":
                if rest[0] not in ("next", "prev"):
                    raise ValueError(rest[0])
                steps.append(("apply", Flick(rest[0])))
            elif verb == "wheel_move":
                steps.append(("apply", WheelMove(float(rest[0]))))
            elif verb == "wheel_release":
                steps.append(("apply", WheelRelease()))
            else:
                raise ValueError(f"unknown command {verb!r}")
        except (IndexError, ValueError) as exc:
            raise InputError(f"{path}:{number}: bad command line {line!r} ({exc})") from exc
    return steps


def _cmd_play(args, config) -> int:
    document, links, keyphrases, script = read_bundle_dir(args.bundle)
    engine = ReaderEngine(
        document,
        links,
        keyphrases,
        script,
        config=PlayerConfig(
            screen_aspect=args.screen_aspect
            if args.screen_aspect is not None
            else config.get("screen_aspect", PlayerConfig.screen_aspect),
            margin_frac=args.margin
            if args.margin is not None
            else config.get("margin_frac", PlayerConfig.margin_frac),
        ),
    )
    state = engine.initial_state()
    for kind, payload in _parse_commands(args.commands):
        if kind == "clock":
            state, effects = engine.advance(state, payload)
        else:
            state, effects = engine.apply(state, payload)
        for effect in effects:
            print(format_ui_event(effect))
    return 0


def _cmd_serve(args, config) -> int:
    host = args.host or config.get("server_host", "127.0.0.1")
    port = args.port if args.port is not None else config.get("server_port", 8000)
    server = serve(args.root, host=host, port=port, quiet=False)
    print(f"serving bundles from {args.root} at {server.base_url}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.stop()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="readalong")
    parser.add_argument("--config", help="JSON config file with defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse a layout file and report violations")
    p.add_argument("--layout", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("link", help="print resolved links for a layout")
    p.add_argument("--layout", required=True)
    p.add_argument("--dump-mentions", action="store_true")
    p.set_defaults(func=_cmd_link)

    p = sub.add_parser("summarize", help="print region keyphrases for a layout")
    p.add_argument("--layout", required=True)
    p.set_defaults(func=_cmd_summarize)

    p = sub.add_parser("script", help="print the timed reading script")
    p.add_argument("--layout", required=True)
    p.add_argument("--timing", help="JSON timing model overrides")
    p.add_argument("--warning-threshold", type=float)
    p.set_defaults(func=_cmd_script)

    p = sub.add_parser("compile", help="compile a layout into a bundle directory")
    p.add_argument("--layout", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--timing", help="JSON timing model overrides")
    p.add_argument("--warning-threshold", type=float)
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("play", help="headless playback simulation over a bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--commands", required=True)
    p.add_argument("--screen-aspect", type=float, default=None)
    p.add_argument("--margin", type=float, default=None)
    p.set_defaults(func=_cmd_play)

    p = sub.add_parser("serve", help="serve compiled bundles over HTTP")
    p.add_argument("--root", required=True)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except (InputError, LayoutError, BundleError, CompileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
