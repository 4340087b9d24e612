"""Labeled corpus handling: directory layout, validation, train/test splits.

A corpus directory holds a `manifest` JSON document plus one HTML file
and one label file per page:

    <corpus>/
      manifest              {"format": "navseg-corpus", "version": 1,
                             "pages": [{"page_id", "html", "labels", "sha256"}, ...]}
      pages/<id>.html
      labels/<id>.labels    {"page_id": ..., "labels": [
                              {"index": 12, "block_id": 1, "category": "menu"}, ...]}

Labels are keyed by hyperlink DFS index, recomputed from the HTML at
load time: every hyperlink of the parsed page must be labeled exactly
once, and all members of a block must share one category.  Editing a
page's HTML therefore invalidates its labels loudly instead of silently
shifting them.  Manifest hashes identify the exact corpus version in
evaluation reports; they are provenance, not an integrity gate.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path

from .clustering import BlockPartition
from .dom import IndexedDom, parse_page
from .errors import CorpusValidationError

CATEGORIES = ("menu", "list", "content", "other")
NAV_CATEGORIES = frozenset({"menu", "list"})

MANIFEST_FORMAT = "navseg-corpus"
MANIFEST_VERSION = 1


@dataclass(frozen=True)
class LabelEntry:
    index: int
    block_id: int
    category: str


@dataclass
class PageRecord:
    page_id: str
    html_path: Path
    labels: list[LabelEntry]
    dom: IndexedDom

    def truth_partition(self) -> BlockPartition:
        blocks: dict[int, set[int]] = {}
        for entry in self.labels:
            blocks.setdefault(entry.block_id, set()).add(entry.index)
        return BlockPartition.from_blocks(self.page_id, blocks.values())

    def truth_nav_indices(self) -> frozenset[int]:
        return frozenset(e.index for e in self.labels
                         if e.category in NAV_CATEGORIES)

    def all_link_indices(self) -> frozenset[int]:
        return frozenset(h.index for h in self.dom.hyperlinks)

    def block_count(self) -> int:
        return len({e.block_id for e in self.labels})


@dataclass(frozen=True)
class SplitSpec:
    seed: int
    train_ids: frozenset[str]
    test_ids: frozenset[str]


def _fail(page_id: str, message: str):
    raise CorpusValidationError(f"page {page_id!r}: {message}")


def _load_labels(page_id: str, path: Path) -> list[LabelEntry]:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        _fail(page_id, f"cannot read labels {path}: {exc}")
    entries = []
    for raw in doc.get("labels", []):
        try:
            entry = LabelEntry(int(raw["index"]), int(raw["block_id"]),
                               str(raw["category"]))
        except (KeyError, TypeError, ValueError) as exc:
            _fail(page_id, f"malformed label entry {raw!r}: {exc}")
        if entry.category not in CATEGORIES:
            _fail(page_id, f"unknown category {entry.category!r} at index {entry.index}")
        entries.append(entry)
    return entries


def _validate_record(record: PageRecord) -> None:
    page_links = record.all_link_indices()
    seen: set[int] = set()
    block_category: dict[int, str] = {}
    for entry in record.labels:
        if entry.index not in page_links:
            _fail(record.page_id,
                  f"label references nonexistent hyperlink index {entry.index}")
        if entry.index in seen:
            _fail(record.page_id, f"hyperlink index {entry.index} labeled twice")
        seen.add(entry.index)
        previous = block_category.setdefault(entry.block_id, entry.category)
        if previous != entry.category:
            _fail(record.page_id,
                  f"block {entry.block_id} mixes categories "
                  f"{previous!r} and {entry.category!r}")
    unlabeled = page_links - seen
    if unlabeled:
        _fail(record.page_id,
              f"hyperlinks without labels: {sorted(unlabeled)[:8]}")


def load_corpus(directory) -> list[PageRecord]:
    """Load and validate every page of a corpus directory, ordered by page id."""
    root = Path(directory)
    manifest_path = root / "manifest"
    if not manifest_path.is_file():
        raise CorpusValidationError(f"no manifest at {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusValidationError(f"manifest is not valid JSON: {exc}") from exc
    if manifest.get("format") != MANIFEST_FORMAT:
        raise CorpusValidationError("manifest format is not navseg-corpus")
    records = []
    seen_ids: set[str] = set()
    for page in manifest.get("pages", []):
        page_id = str(page.get("page_id", ""))
        if not page_id:
            raise CorpusValidationError("manifest page without page_id")
        if page_id in seen_ids:
            raise CorpusValidationError(f"duplicate page_id {page_id!r}")
        seen_ids.add(page_id)
        html_path = root / page.get("html", f"pages/{page_id}.html")
        labels_path = root / page.get("labels", f"labels/{page_id}.labels")
        if not html_path.is_file():
            _fail(page_id, f"missing HTML file {html_path}")
        if not labels_path.is_file():
            _fail(page_id, f"missing labels file {labels_path}")
        record = PageRecord(
            page_id=page_id,
            html_path=html_path,
            labels=_load_labels(page_id, labels_path),
            dom=parse_page(html_path.read_bytes()),
        )
        _validate_record(record)
        records.append(record)
    records.sort(key=lambda r: r.page_id)
    return records


def save_corpus(directory, pages: list[tuple[str, bytes, list[LabelEntry]]]) -> None:
    """Write pages as a corpus directory: (page_id, html bytes, labels) each."""
    root = Path(directory)
    (root / "pages").mkdir(parents=True, exist_ok=True)
    (root / "labels").mkdir(parents=True, exist_ok=True)
    manifest_pages = []
    for page_id, html, labels in sorted(pages, key=lambda p: p[0]):
        html_rel = f"pages/{page_id}.html"
        labels_rel = f"labels/{page_id}.labels"
        (root / html_rel).write_bytes(html)
        label_doc = {
            "page_id": page_id,
            "labels": [{"index": e.index, "block_id": e.block_id,
                        "category": e.category} for e in labels],
        }
        (root / labels_rel).write_text(
            json.dumps(label_doc, indent=1, sort_keys=True) + "\n",
            encoding="utf-8")
        manifest_pages.append({
            "page_id": page_id,
            "html": html_rel,
            "labels": labels_rel,
            "sha256": hashlib.sha256(html).hexdigest(),
        })
    manifest = {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "pages": manifest_pages,
    }
    (root / "manifest").write_text(
        json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def corpus_digest(directory) -> str:
    """Hash of the manifest bytes, identifying the exact corpus version."""
    return hashlib.sha256((Path(directory) / "manifest").read_bytes()).hexdigest()


def split_corpus(records: list[PageRecord], seed: int) -> SplitSpec:
    """Deterministic 50/50 split by page count; train gets the odd page."""
    if len(records) < 2:
        raise CorpusValidationError("a split needs at least two pages")
    ids = sorted(r.page_id for r in records)
    rng = random.Random(seed)
    rng.shuffle(ids)
    cut = (len(ids) + 1) // 2
    return SplitSpec(seed=seed,
                     train_ids=frozenset(ids[:cut]),
                     test_ids=frozenset(ids[cut:]))
