"""HTML ingestion: parse a page into a depth-first indexed DOM tree.

The tree keeps element nodes and non-whitespace text leaves; both kinds
receive a depth-first index starting at 1, so a parent's index is always
smaller than every index in its subtree and sibling subtrees occupy
disjoint, ordered index ranges.  Anchor (``<a>``) elements are collected
in document order as the page's hyperlinks.

Parsing is built on the stdlib tokenizer with the error-recovery rules
that matter for link geometry: an ``html``/``head``/``body`` skeleton is
always synthesized, void elements never take children, ``<li>``/``<p>``/
``<a>`` and table cells are implicitly closed the way browsers close
them (a new ``<a>`` closes an open one, so nested anchors come out as
distinct sibling hyperlinks), stray end tags are ignored, and everything
still open at end of input is closed.  No content is removed or cleaned
beyond dropping whitespace-only text leaves, which carry no words and
would make index distances depend on source indentation.

Word counting is whitespace tokenization.  Text inside ``script`` and
``style`` contributes zero words (it is never rendered); everything
else counts, punctuation attached.
"""

from __future__ import annotations

import codecs
import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Iterable

from .errors import ContractViolation, DecodeError

ANCHOR_TAG = "a"
TEXT_TAG = "#text"

_VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link",
    "meta", "param", "source", "track", "wbr",
})

# Start tags that belong in <head> while the body has not opened yet.
_HEAD_ELEMENTS = frozenset({
    "base", "basefont", "bgsound", "link", "meta", "noscript", "script",
    "style", "template", "title",
})

# A start tag in this set closes an open <p> first (HTML5 in-body rules).
_CLOSES_P = frozenset({
    "address", "article", "aside", "blockquote", "details", "dialog",
    "dir", "div", "dl", "fieldset", "figcaption", "figure", "footer",
    "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hgroup",
    "hr", "main", "menu", "nav", "ol", "p", "pre", "section", "summary",
    "table", "ul",
})

# tag -> (tags it implicitly closes, ancestors bounding the search)
_IMPLIED_CLOSES = {
    "li": ({"li"}, {"ul", "ol", "menu"}),
    "dt": ({"dt", "dd"}, {"dl"}),
    "dd": ({"dt", "dd"}, {"dl"}),
    "tr": ({"tr", "td", "th"}, {"table"}),
    "td": ({"td", "th"}, {"tr", "table"}),
    "th": ({"td", "th"}, {"tr", "table"}),
    "option": ({"option"}, {"select"}),
    "a": ({"a"}, set()),
}

_RAW_TEXT_ELEMENTS = frozenset({"script", "style"})

_SCOPE_BOUNDARY = frozenset({"html", "body", "table", "td", "th", "caption"})


def count_words(text: str) -> int:
    """Number of maximal whitespace-separated tokens in `text`."""
    return len(text.split())


@dataclass
class DomNode:
    """One DOM node: an element, or a text leaf (tag == ``#text``)."""

    tag: str
    attrs: dict[str, str] = field(default_factory=dict)
    children: list["DomNode"] = field(default_factory=list)
    text: str = ""
    own_text_words: int = 0
    # Assigned by the indexing pass:
    index: int = 0
    last_index: int = 0          # largest index inside this subtree
    subtree_words: int = 0
    subtree_anchor_words: int = 0

    @property
    def is_text(self) -> bool:
        return self.tag == TEXT_TAG

    @property
    def is_anchor(self) -> bool:
        return self.tag == ANCHOR_TAG

    def iter_subtree(self) -> Iterable["DomNode"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def __repr__(self) -> str:  # pragma: no cover - debug helper
        if self.is_text:
            return f"DomNode(#text {self.text!r} @{self.index})"
        return f"DomNode(<{self.tag}> @{self.index}..{self.last_index})"


@dataclass(frozen=True)
class HyperlinkRef:
    """One anchor element: its DFS index, target, and anchor-text size."""

    index: int
    href: str
    anchor_words: int
    text: str


class IndexedDom:
    """Parsed page with DFS node indices and per-subtree word statistics."""

    def __init__(self, root: DomNode):
        self.root = root
        self.by_index: dict[int, DomNode] = {}
        self.hyperlinks: list[HyperlinkRef] = []
        self.body: DomNode | None = None
        self._index_tree()
        self._hyperlink_indices = [h.index for h in self.hyperlinks]

    def _index_tree(self) -> None:
        counter = 0
        anchors: list[DomNode] = []
        # Iterative DFS: pre-order assigns indices, post-order folds word sums.
        stack: list[tuple[DomNode, int]] = [(self.root, 0)]
        while stack:
            node, child_pos = stack[-1]
            if child_pos == 0:
                counter += 1
                node.index = counter
                self.by_index[counter] = node
                if node.is_anchor:
                    anchors.append(node)
                if self.body is None and node.tag == "body":
                    self.body = node
            if child_pos < len(node.children):
                stack[-1] = (node, child_pos + 1)
                stack.append((node.children[child_pos], 0))
                continue
            stack.pop()
            node.last_index = counter
            words = node.own_text_words
            anchor_words = 0
            for child in node.children:
                words += child.subtree_words
                anchor_words += child.subtree_anchor_words
            node.subtree_words = words
            # Everything under an anchor counts as anchor text exactly once,
            # including text of (invalid) nested anchors.
            node.subtree_anchor_words = words if node.is_anchor else anchor_words
        for a in anchors:  # pre-order collection keeps ascending index order
            raw = " ".join(n.text for n in a.iter_subtree() if n.is_text)
            self.hyperlinks.append(HyperlinkRef(
                index=a.index,
                href=a.attrs.get("href", ""),
                anchor_words=a.subtree_words,
                text=" ".join(raw.split()),
            ))

    def node(self, index: int) -> DomNode:
        try:
            return self.by_index[index]
        except KeyError:
            raise ContractViolation(f"no node with index {index}") from None

    def hyperlinks_in(self, node: DomNode) -> list[HyperlinkRef]:
        """Hyperlinks whose DFS index falls inside `node`'s subtree range."""
        lo = bisect_left(self._hyperlink_indices, node.index)
        hi = bisect_right(self._hyperlink_indices, node.last_index)
        return self.hyperlinks[lo:hi]

    def subtree_word_counts(self, roots: Iterable[DomNode]) -> tuple[int, int]:
        """(anchor_words, all_words) summed over pairwise-disjoint subtrees."""
        ordered = sorted(roots, key=lambda n: n.index)
        prev_last = 0
        anchor_words = 0
        all_words = 0
        for node in ordered:
            if self.by_index.get(node.index) is not node:
                raise ContractViolation(
                    f"node @{node.index} does not belong to this page")
            if node.index <= prev_last:
                raise ContractViolation(
                    f"overlapping subtree roots at index {node.index}")
            prev_last = node.last_index
            anchor_words += node.subtree_anchor_words
            all_words += node.subtree_words
        return anchor_words, all_words


def subtree_word_counts(dom: IndexedDom, roots: Iterable[DomNode]) -> tuple[int, int]:
    return dom.subtree_word_counts(roots)


class _TreeBuilder(HTMLParser):
    """Builds the recovered element tree; see the module docstring."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = DomNode("html")
        self.head = DomNode("head")
        self.body: DomNode | None = None
        self.root.children.append(self.head)
        self._stack: list[DomNode] = [self.root]
        self._body_open = False

    # -- insertion helpers ------------------------------------------------

    def _current(self) -> DomNode:
        return self._stack[-1]

    def _open_body(self) -> DomNode:
        if self.body is None:
            self.body = DomNode("body")
            self.root.children.append(self.body)
        if not self._body_open:
            # Anything left open at head level stays there; content goes to body.
            del self._stack[1:]
            self._stack.append(self.body)
            self._body_open = True
        return self.body

    def _in_head_context(self) -> bool:
        return not self._body_open

    def _pop_through(self, tag: str, boundaries: set[str]) -> None:
        """Close up to and including the nearest open `tag`, if any.

        The search stops (without popping) at boundary tags and at the
        synthesized html/head/body elements.
        """
        for depth in range(len(self._stack) - 1, 0, -1):
            t = self._stack[depth].tag
            if t == tag:
                del self._stack[depth:]
                return
            if t in boundaries or t in ("html", "head", "body"):
                return

    def _implied_end_tags(self, incoming: str) -> None:
        if incoming in _CLOSES_P:
            self._pop_through("p", _SCOPE_BOUNDARY - {"html", "body"})
        closes = _IMPLIED_CLOSES.get(incoming)
        if closes is not None:
            targets, bounds = closes
            for target in targets:
                self._pop_through(target, bounds)

    # -- tokenizer callbacks ----------------------------------------------

    def handle_starttag(self, tag, attrs):
        attr_map = {k: (v if v is not None else "") for k, v in attrs}
        if tag == "html":
            self.root.attrs.update(attr_map)
            return
        if tag == "head":
            self.head.attrs.update(attr_map)
            return
        if tag == "body":
            self._open_body().attrs.update(attr_map)
            return
        if self._in_head_context() and tag in _HEAD_ELEMENTS and self._current() in (self.root, self.head):
            parent = self.head
            node = DomNode(tag, attr_map)
            parent.children.append(node)
            if tag not in _VOID_ELEMENTS:
                if self._current() is self.root:
                    self._stack.append(self.head)
                self._stack.append(node)
            return
        self._open_body()
        self._implied_end_tags(tag)
        node = DomNode(tag, attr_map)
        self._current().children.append(node)
        if tag not in _VOID_ELEMENTS:
            self._stack.append(node)

    def handle_startendtag(self, tag, attrs):
        if tag in _VOID_ELEMENTS:
            self.handle_starttag(tag, attrs)
        else:
            # Recovery treats <x/> on a normal element as <x></x>.
            self.handle_starttag(tag, attrs)
            self.handle_endtag(tag)

    def handle_endtag(self, tag):
        if tag in _VOID_ELEMENTS:
            return
        if tag == "html":
            return
        if tag in ("head", "body"):
            # Further content will reopen/continue the body.
            if tag == "head" and not self._body_open:
                del self._stack[1:]
            return
        for depth in range(len(self._stack) - 1, 0, -1):
            node = self._stack[depth]
            if node.tag == tag:
                del self._stack[depth:]
                return
            if node.tag in ("html", "head", "body"):
                break
        # No matching open element: stray end tag, ignored.

    def handle_data(self, data):
        if not data.strip():
            return  # whitespace-only text carries no words; not materialized
        current = self._current()
        if self._in_head_context() and current in (self.root, self.head):
            self._open_body()
            current = self._current()
        in_raw = any(n.tag in _RAW_TEXT_ELEMENTS for n in self._stack)
        last = current.children[-1] if current.children else None
        if last is not None and last.is_text:
            last.text += data
            last.own_text_words = 0 if in_raw else count_words(last.text)
            return
        words = 0 if in_raw else count_words(data)
        current.children.append(DomNode(TEXT_TAG, text=data, own_text_words=words))

    def finish(self) -> DomNode:
        self.close()
        if self.body is None:
            self._open_body()
        return self.root


_META_CHARSET_RE = re.compile(
    rb"""<meta[^>]+charset\s*=\s*["']?\s*([a-zA-Z0-9._:-]+)""", re.IGNORECASE)


def _sniff_encoding(data: bytes) -> str | None:
    if data.startswith(codecs.BOM_UTF8):
        return "utf-8-sig"
    if data.startswith(codecs.BOM_UTF16_LE) or data.startswith(codecs.BOM_UTF16_BE):
        return "utf-16"
    match = _META_CHARSET_RE.search(data[:1024])
    if match:
        return match.group(1).decode("ascii", "replace")
    return None


def decode_page(data: bytes) -> str:
    """Decode page bytes, honoring a declared meta charset.

    A declared encoding is applied strictly: undecodable input raises
    DecodeError carrying the byte offset.  Without a declaration (or with
    an unrecognized label) the page decodes as UTF-8 with replacement.
    """
    declared = _sniff_encoding(data)
    if declared is not None:
        try:
            codec = codecs.lookup(declared)
        except LookupError:
            codec = None  # unknown label: fall through to the default
        if codec is not None:
            try:
                return data.decode(codec.name)
            except UnicodeDecodeError as exc:
                raise DecodeError(
                    f"cannot decode page as {codec.name!r}: byte offset {exc.start}",
                    offset=exc.start) from exc
    return data.decode("utf-8", errors="replace")


def parse_page(html: bytes | str) -> IndexedDom:
    """Parse raw HTML (bytes or text) into an IndexedDom.

    Malformed markup is repaired, never rejected; the only failure mode
    is undecodable bytes under a declared encoding.
    """
    text = decode_page(html) if isinstance(html, (bytes, bytearray)) else html
    builder = _TreeBuilder()
    builder.feed(text)
    return IndexedDom(builder.finish())


def parse_file(path) -> IndexedDom:
    with open(path, "rb") as fh:
        return parse_page(fh.read())


def build_dom(root: DomNode) -> IndexedDom:
    """Index a hand-constructed tree (useful for fixtures and generators)."""
    return IndexedDom(root)
