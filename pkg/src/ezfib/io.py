"""Text formats for presheaves and morphisms.

Presheaf files (``.psh``)::

    shape cube
    truncation 1
    sections
      0: a b
      1: aa ab ba bb
    action
      d1_0 1: aa->a ab->a ba->b bb->b
      d1_1 1: aa->a ab->b ba->a bb->b
      s1 0: a->aa b->bb
      s2 0: a->aa b->bb

Every generator between dimensions ``<= truncation`` appears once per
target dimension, in the canonical generator order; a table lists every
section of that dimension in order.  Morphism files (``.map``)::

    source codiscrete2.psh
    target point.psh
    level 0: a->* b->*
    level 1: aa->* ab->* ba->* bb->*

Paths are relative to the morphism file.  Ids are nonempty and contain no
whitespace, ``:`` or ``->``.  Printing a parsed file gives the same bytes.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass

from . import shape as sh
from .presheaf import Presheaf, PresheafError, PresheafMorphism, validate_presheaf

_ID = re.compile(r"^(?!.*->)[^\s:]+$")


class ParseError(ValueError):
    def __init__(self, path, line: int, col: int, msg: str):
        self.path, self.line, self.col = path, line, col
        super().__init__(f"{path}:{line}:{col}: {msg}")


class FunctorialityError(PresheafError):
    """Tables parse but do not define a functor."""


class NaturalityError(PresheafError):
    pass


# -- printing ---------------------------------------------------------------------

def _gens(kind: str, N: int):
    return [g for g in sh.generators(kind, N) if g.source <= N and g.target <= N]


def format_presheaf(X: Presheaf) -> str:
    out = [f"shape {X.kind}", f"truncation {X.N}", "sections"]
    for d in range(X.N + 1):
        out.append(f"  {d}:" + "".join(" " + s for s in X.ids[d]))
    out.append("action")
    for g in _gens(X.kind, X.N):
        t = X.table(g)
        pairs = "".join(f" {X.ids[g.target][j]}->{X.ids[g.source][t[j]]}"
                        for j in range(X.size(g.target)))
        out.append(f"  {g.name} {g.target}:{pairs}")
    return "\n".join(out) + "\n"


def format_morphism(f: PresheafMorphism, source_path: str, target_path: str) -> str:
    out = [f"source {source_path}", f"target {target_path}"]
    X, Y = f.source, f.target
    for d in range(X.N + 1):
        pairs = "".join(f" {X.ids[d][j]}->{Y.ids[d][f.levels[d][j]]}" for j in range(X.size(d)))
        out.append(f"level {d}:{pairs}")
    return "\n".join(out) + "\n"


# -- parsing ----------------------------------------------------------------------

class _Lines:
    def __init__(self, text: str, path):
        self.path = path
        if text and not text.endswith("\n"):
            raise ParseError(path, text.count("\n") + 1, 1, "file must end with a newline")
        self.lines = text.split("\n")[:-1] if text else []
        self.pos = 0

    def error(self, msg, col=1, line=None):
        return ParseError(self.path, line or self.pos, col, msg)

    def peek(self):
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def take(self, what):
        line = self.peek()
        if line is None:
            raise ParseError(self.path, self.pos + 1, 1, f"unexpected end of file, expected {what}")
        self.pos += 1
        return line


def _keyword(lines: _Lines, key: str) -> str:
    line = lines.take(key)
    if not line.startswith(key + " "):
        raise lines.error(f"expected '{key} <value>'")
    return line[len(key) + 1:]


def _split_entries(lines: _Lines, line: str, start: int):
    """Space-separated tokens after a ``:`` at ``start``, with their columns."""
    rest = line[start:]
    if rest and not rest.startswith(" "):
        raise lines.error("expected a space after ':'", start + 1)
    if rest.endswith(" ") or "  " in rest:
        raise lines.error("stray whitespace", start + 1)
    toks, col = [], start + 2
    for tok in rest.split(" ")[1:]:
        toks.append((tok, col))
        col += len(tok) + 1
    return toks


def _pair(lines: _Lines, tok: str, col: int):
    if tok.count("->") != 1:
        raise lines.error(f"expected 'id->id', got {tok!r}", col)
    a, b = tok.split("->")
    for part, c in ((a, col), (b, col + len(a) + 2)):
        if not _ID.match(part):
            raise lines.error(f"malformed id {part!r}", c)
    return a, b


def parse_presheaf(text: str, path="<string>", validate: bool = True) -> Presheaf:
    lines = _Lines(text, path)
    kind = _keyword(lines, "shape")
    if kind not in sh.KINDS:
        raise lines.error(f"unknown shape {kind!r}", 7)
    raw = _keyword(lines, "truncation")
    if not raw.isdigit() or (raw != "0" and raw.startswith("0")):
        raise lines.error(f"bad truncation {raw!r}", 12)
    N = int(raw)
    if lines.take("sections") != "sections":
        raise lines.error("expected 'sections'")
    ids, index = [], []
    for d in range(N + 1):
        line = lines.take(f"sections of dimension {d}")
        head = f"  {d}:"
        if not line.startswith(head):
            raise lines.error(f"expected '{head}'")
        level = []
        for tok, col in _split_entries(lines, line, len(head)):
            if not _ID.match(tok):
                raise lines.error(f"malformed id {tok!r}", col)
            if tok in level:
                raise lines.error(f"duplicate id {tok!r} in dimension {d}", col)
            level.append(tok)
        ids.append(tuple(level))
        index.append({s: j for j, s in enumerate(level)})
    if lines.take("action") != "action":
        raise lines.error("expected 'action'")
    gen_tables: dict = {}
    for g in _gens(kind, N):
        line = lines.take(f"action of {g.name} on dimension {g.target}")
        head = f"  {g.name} {g.target}:"
        if not line.startswith(head):
            raise lines.error(f"expected '{head.strip()}'")
        table = [None] * len(ids[g.target])
        for tok, col in _split_entries(lines, line, len(head)):
            a, b = _pair(lines, tok, col)
            j = index[g.target].get(a)
            if j is None:
                raise lines.error(f"{a!r} is not a section of dimension {g.target}", col)
            if table[j] is not None:
                raise lines.error(f"{g.name} given twice on {a!r}", col)
            k = index[g.source].get(b)
            if k is None:
                raise lines.error(f"{g.name}({a}) = {b!r} is not a section of dimension "
                                  f"{g.source}", col + len(a) + 2)
            table[j] = k
        missing = [ids[g.target][j] for j, v in enumerate(table) if v is None]
        if missing:
            raise lines.error(f"{g.name} undefined on {missing[0]!r}", len(line) + 1)
        gen_tables.setdefault(g.name, {})[g.target] = tuple(table)
    if lines.peek() is not None:
        raise ParseError(path, lines.pos + 1, 1, "trailing content")
    X = Presheaf.from_generator_tables(kind, N, ids, gen_tables)
    if validate:
        report = validate_presheaf(X)
        if not report.passed:
            raise FunctorialityError(f"{path}: {report.failures[0]}")
    return X


@dataclass
class MorphismFile:
    morphism: PresheafMorphism
    source_path: str
    target_path: str

    def format(self) -> str:
        return format_morphism(self.morphism, self.source_path, self.target_path)


def parse_morphism(text: str, path="<string>", load=None) -> MorphismFile:
    """Parse a morphism file; ``load(relpath)`` returns the named presheaf."""
    lines = _Lines(text, path)
    src = _keyword(lines, "source")
    tgt = _keyword(lines, "target")
    if load is None:
        base = os.path.dirname(str(path))
        load = lambda rel: read_presheaf(os.path.join(base, rel))  # noqa: E731
    X, Y = load(src), load(tgt)
    if X.kind != Y.kind or X.N != Y.N:
        raise lines.error("source and target differ in shape or truncation")
    levels = []
    yindex = [{s: j for j, s in enumerate(Y.ids[d])} for d in range(Y.N + 1)]
    xindex = [{s: j for j, s in enumerate(X.ids[d])} for d in range(X.N + 1)]
    for d in range(X.N + 1):
        line = lines.take(f"level {d}")
        head = f"level {d}:"
        if not line.startswith(head):
            raise lines.error(f"expected '{head}'")
        row = [None] * X.size(d)
        for tok, col in _split_entries(lines, line, len(head)):
            a, b = _pair(lines, tok, col)
            j = xindex[d].get(a)
            if j is None:
                raise lines.error(f"{a!r} is not a source section of dimension {d}", col)
            if row[j] is not None:
                raise lines.error(f"{a!r} mapped twice", col)
            k = yindex[d].get(b)
            if k is None:
                raise lines.error(f"{b!r} is not a target section of dimension {d}",
                                  col + len(a) + 2)
            row[j] = k
        missing = [X.ids[d][j] for j, v in enumerate(row) if v is None]
        if missing:
            raise lines.error(f"no image for {missing[0]!r}", len(line) + 1)
        levels.append(tuple(row))
    if lines.peek() is not None:
        raise ParseError(path, lines.pos + 1, 1, "trailing content")
    f = PresheafMorphism(X, Y, tuple(levels))
    bad = f.naturality_failures()
    if bad:
        raise NaturalityError(f"{path}: not natural at {bad[0]}")
    return MorphismFile(f, src, tgt)


def read_presheaf(path) -> Presheaf:
    with open(path, encoding="utf-8") as fh:
        return parse_presheaf(fh.read(), path)


def read_morphism(path) -> PresheafMorphism:
    with open(path, encoding="utf-8") as fh:
        return parse_morphism(fh.read(), path).morphism


def write_presheaf(X: Presheaf, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_presheaf(X))


def write_morphism(f: PresheafMorphism, path, source_path: str, target_path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_morphism(f, source_path, target_path))
