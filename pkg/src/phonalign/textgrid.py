"""Praat TextGrid reading and writing.

Writing produces the long ("ooTextFile") text format.  Reading accepts
both the long and the short text format: the file is tokenized into
strings, numbers and existence flags, and the labels (``xmin =``,
``intervals [3]:``) that only the long format carries are skipped.
Point tiers are read past and dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ParseError

__all__ = [
    "Interval",
    "AlignedTier",
    "write_textgrid",
    "format_textgrid",
    "read_textgrid",
    "parse_textgrid",
]

# tolerance for contiguity checks, seconds
_EPS = 1e-9


@dataclass(frozen=True)
class Interval:
    label: str
    start: float
    end: float


@dataclass(frozen=True)
class AlignedTier:
    """Named, ordered list of labelled intervals."""

    name: str
    segments: tuple[Interval, ...] = field(default_factory=tuple)

    def __post_init__(self):
        segs = tuple(
            s if isinstance(s, Interval) else Interval(str(s[0]), float(s[1]), float(s[2]))
            for s in self.segments
        )
        object.__setattr__(self, "segments", segs)

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.segments]

    @property
    def boundaries(self) -> list[float]:
        """Interior boundary times (end of every segment but the last)."""
        return [s.end for s in self.segments[:-1]]

    @property
    def xmin(self) -> float:
        return self.segments[0].start if self.segments else 0.0

    @property
    def xmax(self) -> float:
        return self.segments[-1].end if self.segments else 0.0

    def is_contiguous(self, duration: float | None = None) -> bool:
        segs = self.segments
        if not segs or abs(segs[0].start) > _EPS:
            return False
        if any(abs(a.end - b.start) > _EPS for a, b in zip(segs, segs[1:])):
            return False
        if any(s.end < s.start for s in segs):
            return False
        return duration is None or abs(segs[-1].end - duration) <= _EPS


def _quote(text: str) -> str:
    return '"' + text.replace('"', '""') + '"'


def _num(x: float, precision: int | None) -> str:
    if precision is None:
        return repr(float(x))
    return f"{x:.{precision}f}"


def format_textgrid(
    tiers: Sequence[AlignedTier],
    duration: float | None = None,
    precision: int | None = None,
) -> str:
    """Long-format TextGrid text.

    Times are written with ``repr`` (exact round trip) unless
    ``precision`` fixes the number of decimals.
    """
    xmin = min((t.xmin for t in tiers), default=0.0)
    xmax = duration if duration is not None else max((t.xmax for t in tiers), default=0.0)
    f = lambda x: _num(x, precision)  # noqa: E731
    out = [
        'File type = "ooTextFile"',
        'Object class = "TextGrid"',
        "",
        f"xmin = {f(xmin)} ",
        f"xmax = {f(xmax)} ",
        "tiers? <exists> ",
        f"size = {len(tiers)} ",
        "item []: ",
    ]
    for n, tier in enumerate(tiers, start=1):
        out += [
            f"    item [{n}]:",
            '        class = "IntervalTier" ',
            f"        name = {_quote(tier.name)} ",
            f"        xmin = {f(xmin)} ",
            f"        xmax = {f(xmax)} ",
            f"        intervals: size = {len(tier.segments)} ",
        ]
        for m, seg in enumerate(tier.segments, start=1):
            out += [
                f"        intervals [{m}]:",
                f"            xmin = {f(seg.start)} ",
                f"            xmax = {f(seg.end)} ",
                f"            text = {_quote(seg.label)} ",
            ]
    return "\n".join(out) + "\n"


def write_textgrid(tiers, path, duration=None, precision=None) -> None:
    Path(path).write_text(format_textgrid(tiers, duration, precision), encoding="utf-8")


_TOKEN = re.compile(
    r"""
      (?P<str>"(?:[^"]|"")*")
    | (?P<skip>\[\s*\d*\s*\]\s*:?|[A-Za-z_][\w?]*|[=:])
    | (?P<flag><exists>|<absent>)
    | (?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
    | (?P<comment>![^\n]*)
    | (?P<ws>\s+)
    | (?P<bad>.)
    """,
    re.VERBOSE,
)


def _tokens(text: str):
    line = 1
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        value = m.group()
        if kind == "bad":
            raise ParseError(f"unexpected character {value!r}", line=line)
        if kind in ("str", "num", "flag"):
            yield kind, value, line
        line += value.count("\n")


class _Stream:
    def __init__(self, text):
        self._toks = list(_tokens(text))
        self._pos = 0
        self._last_line = text.count("\n") + 1

    def _next(self, kind, what):
        if self._pos >= len(self._toks):
            raise ParseError(f"unexpected end of file, expected {what}", line=self._last_line)
        k, v, line = self._toks[self._pos]
        if k != kind:
            raise ParseError(f"expected {what}, got {v!r}", line=line)
        self._pos += 1
        return v, line

    def string(self, what="a string"):
        v, _ = self._next("str", what)
        return v[1:-1].replace('""', '"')

    def number(self, what="a number"):
        v, _ = self._next("num", what)
        return float(v)

    def count(self, what):
        v, line = self._next("num", what)
        x = float(v)
        if x != int(x) or x < 0:
            raise ParseError(f"{what} must be a non-negative integer, got {v}", line=line)
        return int(x)

    def flag(self):
        if self._pos < len(self._toks) and self._toks[self._pos][0] == "flag":
            self._pos += 1
            return self._toks[self._pos - 1][1] == "<exists>"
        return None


def parse_textgrid(text: str) -> list[AlignedTier]:
    """Parse long- or short-format TextGrid text into interval tiers."""
    text = text.lstrip("﻿")
    s = _Stream(text)
    if s.string("file type") != "ooTextFile":
        raise ParseError("not an ooTextFile", line=1)
    if s.string("object class") != "TextGrid":
        raise ParseError("object class is not TextGrid", line=2)
    s.number("xmin")
    s.number("xmax")
    if s.flag() is False:
        return []
    tiers = []
    for _ in range(s.count("tier count")):
        cls = s.string("tier class")
        name = s.string("tier name")
        s.number("tier xmin")
        s.number("tier xmax")
        n = s.count("item count")
        if cls == "IntervalTier":
            segs = []
            for _ in range(n):
                a = s.number("interval xmin")
                b = s.number("interval xmax")
                segs.append(Interval(s.string("interval text"), a, b))
            tiers.append(AlignedTier(name, tuple(segs)))
        elif cls == "TextTier":
            for _ in range(n):
                s.number("point time")
                s.string("point mark")
        else:
            raise ParseError(f"unknown tier class {cls!r}")
    return tiers


def read_textgrid(path) -> list[AlignedTier]:
    raw = Path(path).read_bytes()
    if raw.startswith((b"\xff\xfe", b"\xfe\xff")):
        text = raw.decode("utf-16")
    else:
        text = raw.decode("utf-8")
    return parse_textgrid(text)


def tiers_by_name(tiers: Iterable[AlignedTier]) -> dict[str, AlignedTier]:
    return {t.name: t for t in tiers}
