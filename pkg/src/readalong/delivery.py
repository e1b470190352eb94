"""Progressive bundle delivery: HTTP service, fetch planner, and client.

The service is read-only and stateless over immutable bundle directories;
every resource carries a strong content-hash validator. The planner is the
client side: given what has been fetched so far it produces a priority-ordered
acquisition queue — metadata, then thumbnails, then the page under the cursor,
remaining pages, audio for the current page, and finally the rest of the
audio as background work.

Endpoints:
    GET /docs                        document listing
    GET /docs/{id}/meta              bundle manifest
    GET /docs/{id}/thumb             thumbnail PNG
    GET /docs/{id}/pages/{n}/image   page raster PNG
    GET /docs/{id}/audio/{sentence}  per-sentence audio clip
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Collection, Sequence
from urllib.request import urlopen

from .bundle import (
    AUDIO_DIR,
    MANIFEST_NAME,
    THUMB_NAME,
    BundleError,
    page_image_name,
    read_bundle,
)
from .narrator import SpeakSpan, sentence_clip_plan

# Priority classes, strictly ordered; lower fetches first.
PRIORITY_DOC_META = 0
PRIORITY_THUMBNAIL = 1
PRIORITY_CURRENT_PAGE_IMAGE = 2
PRIORITY_OTHER_PAGE_IMAGE = 3
PRIORITY_NEAR_AUDIO = 4
PRIORITY_FAR_AUDIO = 5

KIND_DOC_META = "doc_meta"
KIND_THUMBNAIL = "thumbnail"
KIND_PAGE_IMAGE = "page_image"
KIND_AUDIO_CLIP = "audio_clip"

FetchKey = tuple[str, str, int | None]


@dataclass(frozen=True)
class FetchItem:
    kind: str
    doc_id: str
    priority_class: int
    number: int | None = None  # page index or sentence index
    distance: int = 0

    @property
    def key(self) -> FetchKey:
        return (self.kind, self.doc_id, self.number)


FetchPlan = list[FetchItem]


@dataclass(frozen=True)
class Cursor:
    page: int = 0
    sentence: int = 0


@dataclass(frozen=True)
class DocInfo:
    """What the client knows about one document.

    Until the metadata is fetched only the id and title are known;
    ``page_count`` / ``sentence_pages`` arrive with the manifest.
    """

    doc_id: str
    title: str = ""
    page_count: int | None = None
    sentence_pages: tuple[int, ...] = ()

    @property
    def meta_known(self) -> bool:
        return self.page_count is not None


def doc_info_from_bundle(document, script) -> DocInfo:
    """Build client-side knowledge from a parsed manifest."""
    regions = {r.id: r for r in document.iter_regions()}
    first_page: dict[int, int] = {}
    for event in script.events:
        if isinstance(event, SpeakSpan) and event.sentence_index not in first_page:
            first_page[event.sentence_index] = regions[event.span.region_id].page_index
    return DocInfo(
        doc_id=document.id,
        title=document.title,
        page_count=len(document.pages),
        sentence_pages=tuple(first_page[i] for i in sorted(first_page)),
    )


def plan_fetches(
    docs: Sequence[DocInfo],
    opened_doc: str | None = None,
    cursor: Cursor | None = None,
    fetched: Collection[FetchKey] = (),
) -> FetchPlan:
    """Priority-ordered queue of everything still missing for the current scope.

    With no document open the scope is every document's metadata and
    thumbnail; with one open it is every item of that document.
    """
    fetched = set(fetched)
    items: list[tuple[tuple, FetchItem]] = []

    def add(item: FetchItem, order: tuple) -> None:
        if item.key not in fetched:
            items.append(((item.priority_class, *order), item))

    if opened_doc is None:
        for pos, doc in enumerate(docs):
            add(FetchItem(KIND_DOC_META, doc.doc_id, PRIORITY_DOC_META), (pos,))
            add(FetchItem(KIND_THUMBNAIL, doc.doc_id, PRIORITY_THUMBNAIL), (pos,))
        items.sort(key=lambda pair: pair[0])
        return [item for _, item in items]

    doc = next((d for d in docs if d.doc_id == opened_doc), None)
    if doc is None:
        raise KeyError(f"unknown document {opened_doc!r}")
    at = cursor if cursor is not None else Cursor()

    add(FetchItem(KIND_DOC_META, doc.doc_id, PRIORITY_DOC_META), (0,))
    add(FetchItem(KIND_THUMBNAIL, doc.doc_id, PRIORITY_THUMBNAIL), (0,))
    if not doc.meta_known:
        # Page/audio inventory is unknown until the manifest arrives.
        items.sort(key=lambda pair: pair[0])
        return [item for _, item in items]

    for page in range(doc.page_count or 0):
        if page == at.page:
            add(FetchItem(KIND_PAGE_IMAGE, doc.doc_id, PRIORITY_CURRENT_PAGE_IMAGE, number=page), (0, page))
        else:
            distance = abs(page - at.page)
            add(
                FetchItem(KIND_PAGE_IMAGE, doc.doc_id, PRIORITY_OTHER_PAGE_IMAGE, number=page, distance=distance),
                (distance, page),
            )
    for sentence, page in enumerate(doc.sentence_pages):
        distance = abs(sentence - at.sentence)
        priority = PRIORITY_NEAR_AUDIO if page == at.page else PRIORITY_FAR_AUDIO
        add(
            FetchItem(KIND_AUDIO_CLIP, doc.doc_id, priority, number=sentence, distance=distance),
            (distance, sentence),
        )

    items.sort(key=lambda pair: pair[0])
    return [item for _, item in items]


# --- service ----------------------------------------------------------------


@dataclass
class _BundleFiles:
    doc_id: str
    title: str
    directory: Path
    page_count: int
    clip_count: int


_ROUTE_META = re.compile(r"^/docs/([^/]+)/meta$")
_ROUTE_THUMB = re.compile(r"^/docs/([^/]+)/thumb$")
_ROUTE_PAGE = re.compile(r"^/docs/([^/]+)/pages/(\d+)/image$")
_ROUTE_AUDIO = re.compile(r"^/docs/([^/]+)/audio/(\d+)$")


def scan_bundles(root: str | Path) -> dict[str, _BundleFiles]:
    """Load and verify every bundle under ``root``; corrupt ones fail startup."""
    root = Path(root)
    found: dict[str, _BundleFiles] = {}
    for child in sorted(root.iterdir() if root.is_dir() else []):
        manifest = child / MANIFEST_NAME
        if not manifest.is_file():
            continue
        try:
            document, _, _, script = read_bundle(manifest.read_bytes())
        except BundleError as exc:
            raise BundleError(f"bundle {child.name}: {exc}") from exc
        found[document.id] = _BundleFiles(
            doc_id=document.id,
            title=document.title,
            directory=child,
            page_count=len(document.pages),
            clip_count=len(sentence_clip_plan(script)),
        )
    if not found:
        raise BundleError(f"no valid bundles under {root}")
    return found


class _Handler(BaseHTTPRequestHandler):
    server_version = "readalong-delivery/1"
    bundles: dict[str, _BundleFiles] = {}
    listing: bytes = b"[]"
    quiet = True

    def log_message(self, fmt, *args):  # noqa: A003 - BaseHTTPRequestHandler API
        if not self.quiet:
            super().log_message(fmt, *args)

    def do_GET(self):
        self._respond(head_only=False)

    def do_HEAD(self):
        self._respond(head_only=True)

    def _respond(self, head_only: bool) -> None:
        resolved = self._resolve()
        if resolved is None:
            self._send(404, b'{"error": "not found"}', "application/json", head_only)
            return
        body, content_type = resolved
        self._send(200, body, content_type, head_only)

    def _resolve(self) -> tuple[bytes, str] | None:
        path = self.path.split("?", 1)[0]
        if path == "/docs":
            return self.listing, "application/json"
        for route, resolver in (
            (_ROUTE_META, self._meta),
            (_ROUTE_THUMB, self._thumb),
            (_ROUTE_PAGE, self._page),
            (_ROUTE_AUDIO, self._audio),
        ):
            match = route.match(path)
            if match:
                return resolver(*match.groups())
        return None

    def _file(self, bundle: _BundleFiles | None, name: str, content_type: str):
        if bundle is None:
            return None
        target = bundle.directory / name
        if not target.is_file():
            return None
        return target.read_bytes(), content_type

    def _meta(self, doc_id: str):
        return self._file(self.bundles.get(doc_id), MANIFEST_NAME, "application/json")

    def _thumb(self, doc_id: str):
        return self._file(self.bundles.get(doc_id), THUMB_NAME, "image/png")

    def _page(self, doc_id: str, page: str):
        bundle = self.bundles.get(doc_id)
        if bundle is None or int(page) >= bundle.page_count:
            return None
        return self._file(bundle, page_image_name(int(page)), "image/png")

    def _audio(self, doc_id: str, sentence: str):
        return self._file(
            self.bundles.get(doc_id), f"{AUDIO_DIR}/{int(sentence)}", "application/octet-stream"
        )

    def _send(self, status: int, body: bytes, content_type: str, head_only: bool) -> None:
        etag = '"' + hashlib.sha256(body).hexdigest() + '"'
        if status == 200 and self.headers.get("If-None-Match") == etag:
            self.send_response(304)
            self.send_header("ETag", etag)
            self.end_headers()
            return
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("ETag", etag)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        if not head_only:
            self.wfile.write(body)


class DeliveryServer:
    """A running (or startable) delivery service over one bundle root."""

    def __init__(self, root: str | Path, host: str = "127.0.0.1", port: int = 0, quiet: bool = True):
        bundles = scan_bundles(root)
        listing = json.dumps(
            [
                {"id": b.doc_id, "title": b.title, "pages": b.page_count, "clips": b.clip_count}
                for b in sorted(bundles.values(), key=lambda b: b.doc_id)
            ],
            indent=2,
        ).encode("utf-8")

        handler = type(
            "BoundHandler", (_Handler,), {"bundles": bundles, "listing": listing, "quiet": quiet}
        )
        self.httpd = ThreadingHTTPServer((host, port), handler)
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    @property
    def base_url(self) -> str:
        host = self.httpd.server_address[0]
        return f"http://{host}:{self.port}"

    def start(self) -> "DeliveryServer":
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self.httpd.serve_forever()

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self) -> "DeliveryServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def serve(bundle_root: str | Path, host: str = "127.0.0.1", port: int = 0, quiet: bool = True) -> DeliveryServer:
    """Construct a service over ``bundle_root``; call .start() or .serve_forever()."""
    return DeliveryServer(bundle_root, host=host, port=port, quiet=quiet)


# --- client -----------------------------------------------------------------


class BundleClient:
    """Pull-based client: fetches plan items in order, bounded concurrency."""

    def __init__(self, base_url: str, max_in_flight: int = 2):
        self.base_url = base_url.rstrip("/")
        self.max_in_flight = max_in_flight
        self.issued: list[FetchKey] = []

    def url_for(self, item: FetchItem) -> str:
        if item.kind == KIND_DOC_META:
            return f"{self.base_url}/docs/{item.doc_id}/meta"
        if item.kind == KIND_THUMBNAIL:
            return f"{self.base_url}/docs/{item.doc_id}/thumb"
        if item.kind == KIND_PAGE_IMAGE:
            return f"{self.base_url}/docs/{item.doc_id}/pages/{item.number}/image"
        if item.kind == KIND_AUDIO_CLIP:
            return f"{self.base_url}/docs/{item.doc_id}/audio/{item.number}"
        raise ValueError(f"unknown fetch kind {item.kind!r}")

    def list_docs(self) -> list[dict]:
        with urlopen(f"{self.base_url}/docs") as response:
            return json.loads(response.read().decode("utf-8"))

    def _get(self, url: str) -> bytes:
        with urlopen(url) as response:
            return response.read()

    def fetch(self, item: FetchItem) -> bytes:
        self.issued.append(item.key)
        return self._get(self.url_for(item))

    def run_plan(self, plan: FetchPlan) -> dict[FetchKey, bytes]:
        """Issue requests in plan order with at most ``max_in_flight`` open."""
        results: dict[FetchKey, bytes] = {}
        if self.max_in_flight <= 1:
            for item in plan:
                results[item.key] = self.fetch(item)
            return results
        with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
            pending = []
            for item in plan:
                if len(pending) >= self.max_in_flight:
                    key, future = pending.pop(0)
                    results[key] = future.result()
                # Record at submission: submission order is consumption order.
                self.issued.append(item.key)
                pending.append((item.key, pool.submit(self._get, self.url_for(item))))
            for key, future in pending:
                results[key] = future.result()
        return results
