"""Deterministic synthetic corpus generator for desk-scale validation.

Pages are assembled from realistic section templates with exactly known
block structure: a site menu, page-specific link lists, prose articles
with embedded content links, image-only ad links, and footer links.
The markup is compact (no inter-tag whitespace), which makes node
geometry exact: hyperlinks inside one block sit three index steps
apart, while consecutive blocks are separated by heading/prose nodes
that keep cross-block link distances at five or more.

Content links are labeled as singleton blocks.  When a paragraph holds
several links, index gaps cannot separate them, so their prose runs are
sized (by a small integer fixpoint, before any text is rendered) to keep
every within-paragraph link span well below the page-level hyperlink
density; the density rule, not the gap rule, has to split them.

Generation is a pure function of (spec, seed): numeric structure is
drawn first, then words are rendered in document order, so the emitted
corpus is byte-identical across runs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import LabelEntry, save_corpus
from .dom import parse_page
from .errors import NavsegError

_WORDS = (
    "news report local sports weather update market stocks health science "
    "travel culture review opinion video photo world business politics "
    "economy school city council game season team player coach match "
    "festival music film book art food recipe garden house energy climate "
    "research study result official plan project street river park museum "
    "library history story reader editor morning evening weekly daily "
    "special feature series guide analysis summary detail question answer"
).split()

_MENU_WORDS = (
    "home news sports business opinion culture video photos weather travel "
    "health science technology politics economy world local events contact "
    "about archive subscribe"
).split()

_DENSITY_MARGIN = 0.8   # within-paragraph spans stay below this share of hdt


@dataclass(frozen=True)
class GeneratorSpec:
    """Knobs for page synthesis; all ranges are inclusive (lo, hi)."""

    pages: int = 20
    menu_links: tuple[int, int] = (6, 12)
    menu_words: tuple[int, int] = (1, 3)
    navlists_per_page: tuple[int, int] = (1, 2)
    navlist_links: tuple[int, int] = (5, 10)
    navlist_words: tuple[int, int] = (2, 5)
    articles_per_page: tuple[int, int] = (1, 2)
    link_paragraphs_per_article: tuple[int, int] = (1, 1)
    links_per_paragraph: tuple[int, int] = (1, 1)
    content_link_words: tuple[int, int] = (4, 8)
    prose_words: tuple[int, int] = (25, 45)
    filler_sections: tuple[int, int] = (1, 2)
    filler_paragraphs: tuple[int, int] = (1, 3)
    ads_per_page: tuple[int, int] = (0, 1)
    ads_links: tuple[int, int] = (2, 3)
    footer_links: tuple[int, int] = (2, 3)


def default_spec() -> GeneratorSpec:
    return GeneratorSpec()


def prose_heavy_spec() -> GeneratorSpec:
    """Variant with long prose and multi-link paragraphs.

    Index gaps alone cannot separate links sharing a paragraph, so this
    corpus rewards the density rule.
    """
    return GeneratorSpec(
        navlists_per_page=(1, 2),
        navlist_links=(6, 10),
        navlist_words=(3, 5),
        articles_per_page=(2, 3),
        link_paragraphs_per_article=(1, 2),
        links_per_paragraph=(2, 3),
        content_link_words=(3, 6),
        prose_words=(30, 55),
        filler_sections=(1, 2),
        filler_paragraphs=(2, 4),
    )


@dataclass
class _Paragraph:
    prose: list[int]        # word counts; len(prose) = len(link_words) + 1
    link_words: list[int]


@dataclass
class _Section:
    kind: str                                   # menu/navlist/filler/article/ads/footer
    heading_words: int = 0
    link_words: list[int] = field(default_factory=list)
    paragraphs: list[_Paragraph] = field(default_factory=list)   # articles
    plain_paragraphs: list[int] = field(default_factory=list)    # prose word counts


def _pick(rng: random.Random, bounds: tuple[int, int]) -> int:
    return rng.randint(bounds[0], bounds[1])


# -- phase 1: numeric structure ---------------------------------------------


def _plan_page(spec: GeneratorSpec, rng: random.Random) -> list[_Section]:
    sections = [_Section("menu", link_words=[
        _pick(rng, spec.menu_words) for _ in range(_pick(rng, spec.menu_links))])]
    middle: list[_Section] = []
    for _ in range(_pick(rng, spec.navlists_per_page)):
        middle.append(_Section("navlist", heading_words=2, link_words=[
            _pick(rng, spec.navlist_words)
            for _ in range(_pick(rng, spec.navlist_links))]))
    for _ in range(_pick(rng, spec.articles_per_page)):
        paragraphs = []
        for _ in range(_pick(rng, spec.link_paragraphs_per_article)):
            n_links = _pick(rng, spec.links_per_paragraph)
            paragraphs.append(_Paragraph(
                prose=[_pick(rng, spec.prose_words) for _ in range(n_links + 1)],
                link_words=[_pick(rng, spec.content_link_words)
                            for _ in range(n_links)]))
        middle.append(_Section("article", heading_words=4, paragraphs=paragraphs,
                               plain_paragraphs=[_pick(rng, spec.prose_words)]))
    for _ in range(_pick(rng, spec.filler_sections)):
        middle.append(_Section("filler", heading_words=3, plain_paragraphs=[
            _pick(rng, spec.prose_words)
            for _ in range(_pick(rng, spec.filler_paragraphs))]))
    rng.shuffle(middle)
    sections.extend(middle)
    for _ in range(_pick(rng, spec.ads_per_page)):
        sections.append(_Section("ads", heading_words=1, link_words=[
            0 for _ in range(_pick(rng, spec.ads_links))]))
    sections.append(_Section("footer", heading_words=4, link_words=[
        1 for _ in range(_pick(rng, spec.footer_links))]))
    return sections


# -- phase 2: density-margin fixpoint ---------------------------------------


def _body_word_totals(sections: list[_Section]) -> tuple[int, int]:
    anchors = 0
    words = 0
    for s in sections:
        anchors += sum(s.link_words)
        words += sum(s.link_words) + s.heading_words + sum(s.plain_paragraphs)
        for p in s.paragraphs:
            anchors += sum(p.link_words)
            words += sum(p.link_words) + sum(p.prose)
    return anchors, words


def _enforce_density_margins(sections: list[_Section]) -> None:
    """Pad multi-link paragraphs so every link span is density-splittable."""
    multi = [p for s in sections for p in s.paragraphs if len(p.link_words) > 1]
    if not multi:
        return
    for _ in range(200):
        anchors, words = _body_word_totals(sections)
        hdt = anchors / words
        ok = True
        for p in multi:
            for k in range(2, len(p.link_words) + 1):
                span_anchor = sum(p.link_words[:k])
                span_words = span_anchor + sum(p.prose[:k])
                if span_anchor / span_words >= _DENSITY_MARGIN * hdt:
                    p.prose = [w + 6 for w in p.prose]
                    ok = False
                    break
        if ok:
            return
    raise NavsegError(
        "density margins did not converge; content links dominate the page")


# -- phase 3: rendering ------------------------------------------------------


class _Renderer:
    def __init__(self, rng: random.Random, page_no: int):
        self.rng = rng
        self.page_no = page_no
        self.link_no = 0

    def words(self, n: int, pool=_WORDS) -> str:
        return " ".join(pool[self.rng.randrange(len(pool))] for _ in range(n))

    def href(self, kind: str) -> str:
        self.link_no += 1
        return f"/{kind}/{self.page_no}-{self.link_no}"

    def render(self, s: _Section) -> str:
        if s.kind == "menu":
            items = []
            for k, lw in enumerate(s.link_words):
                href = "/home" if k == 0 else self.href("nav")
                items.append(f'<li><a href="{href}">'
                             f'{self.words(lw, _MENU_WORDS)}</a></li>')
            return f'<nav><ul>{"".join(items)}</ul></nav>'
        if s.kind == "navlist":
            items = [f'<li><a href="{self.href("story")}">{self.words(lw)}</a></li>'
                     for lw in s.link_words]
            return (f"<section><h3>{self.words(s.heading_words)}</h3>"
                    f'<ul>{"".join(items)}</ul></section>')
        if s.kind == "filler":
            paragraphs = "".join(f"<p>{self.words(w)}</p>"
                                 for w in s.plain_paragraphs)
            return (f"<section><h2>{self.words(s.heading_words)}</h2>"
                    f"{paragraphs}</section>")
        if s.kind == "article":
            chunks = [f"<article><h4>{self.words(s.heading_words)}</h4>"]
            for p in s.paragraphs:
                bits = []
                for k, lw in enumerate(p.link_words):
                    bits.append(self.words(p.prose[k]))
                    bits.append(f'<a href="{self.href("read")}">'
                                f"{self.words(lw)}</a>")
                bits.append(self.words(p.prose[-1]))
                chunks.append(f"<p>{' '.join(bits)}</p>")
            for w in s.plain_paragraphs:
                chunks.append(f"<p>{self.words(w)}</p>")
            chunks.append("</article>")
            return "".join(chunks)
        if s.kind == "ads":
            items = "".join(
                f'<li><a href="{self.href("ad")}">'
                f'<img src="/img/banner{k}.png"></a></li>'
                for k in range(len(s.link_words)))
            return f"<div><p>sponsored</p><ul>{items}</ul></div>"
        if s.kind == "footer":
            items = []
            for k in range(len(s.link_words)):
                href = "/home" if k == 0 else self.href("meta")
                items.append(f'<li><a href="{href}">'
                             f"{self.words(1, _MENU_WORDS)}</a></li>")
            return (f"<footer><p>{self.words(s.heading_words)}</p>"
                    f'<ul>{"".join(items)}</ul></footer>')
        raise NavsegError(f"unknown section kind {s.kind!r}")


def _blocks_plan(sections: list[_Section]) -> list[tuple[str, int]]:
    """(category, link count) per ground-truth block, in document order."""
    plan: list[tuple[str, int]] = []
    for s in sections:
        if s.kind == "menu":
            plan.append(("menu", len(s.link_words)))
        elif s.kind == "navlist":
            plan.append(("list", len(s.link_words)))
        elif s.kind == "article":
            for p in s.paragraphs:
                plan.extend(("content", 1) for _ in p.link_words)
        elif s.kind in ("ads", "footer"):
            plan.append(("other", len(s.link_words)))
    return plan


def _render_page(sections: list[_Section], rng: random.Random,
                 page_no: int) -> str:
    renderer = _Renderer(rng, page_no)
    title = renderer.words(3)
    body = "".join(renderer.render(s) for s in sections)
    return ('<!DOCTYPE html><html><head><meta charset="utf-8">'
            f"<title>{title}</title></head><body>{body}</body></html>")


def generate_synthetic_corpus(spec: GeneratorSpec, seed: int, out_dir) -> Path:
    """Write a corpus with exactly known ground truth; returns the directory."""
    rng = random.Random(seed)
    pages = []
    for page_no in range(1, spec.pages + 1):
        page_id = f"p{page_no:03d}"
        sections = _plan_page(spec, rng)
        _enforce_density_margins(sections)
        html = _render_page(sections, rng, page_no)
        plan = _blocks_plan(sections)
        dom = parse_page(html.encode())
        expected = sum(n for _, n in plan)
        if len(dom.hyperlinks) != expected:
            raise NavsegError(
                f"generator bug on {page_id}: planned {expected} links, "
                f"parsed {len(dom.hyperlinks)}")
        labels = []
        cursor = 0
        for block_id, (category, n) in enumerate(plan, start=1):
            for link in dom.hyperlinks[cursor:cursor + n]:
                labels.append(LabelEntry(link.index, block_id, category))
            cursor += n
        pages.append((page_id, html.encode(), labels))
    out = Path(out_dir)
    save_corpus(out, pages)
    return out
