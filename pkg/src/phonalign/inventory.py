"""Phone symbols, label folding and pronunciation lookup.

Phone labels are lower-case (TIMIT/Buckeye style); dictionary words are
upper-case (CMUdict style).  Both conventions are applied on the way in,
so callers may pass either case.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import OOVError, ParseError

__all__ = [
    "PhoneSet",
    "FoldingTable",
    "PronunciationDictionary",
    "DEFAULT_PHONES",
    "fold_label",
    "parse_folding_table",
    "load_folding_table",
    "buckeye_folding",
    "timit_folding",
    "parse_dictionary",
    "load_dictionary",
    "lookup_pronunciation",
    "fold_sequence",
]

# Union of the folded TIMIT and Buckeye label sets.
DEFAULT_PHONES = (
    "aa ae ah ao aw ay b ch d dh dx eh er ey f g hh ih iy jh k l m n ng "
    "ow oy p q r s sh sil t th uh uw v w y z zh"
).split()

_STRESS = re.compile(r"\d+$")
_VARIANT = re.compile(r"\(\d+\)$")


@dataclass(frozen=True)
class PhoneSet:
    """Ordered, duplicate-free phone inventory; position is the class id."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise ValueError("phone set must not be empty")
        if len(set(symbols)) != len(symbols):
            dupes = sorted({s for s in symbols if symbols.count(s) > 1})
            raise ValueError(f"duplicate phone labels: {dupes}")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(symbols)})

    @classmethod
    def default(cls) -> "PhoneSet":
        return cls(tuple(DEFAULT_PHONES))

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, label):
        return label in self._index

    def __getitem__(self, i):
        return self.symbols[i]

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"phone {label!r} is not in the phone set") from None

    def encode(self, labels: Iterable[str]) -> list[int]:
        return [self.index(lab) for lab in labels]

    def decode(self, indices: Iterable[int]) -> list[str]:
        return [self.symbols[i] for i in indices]


@dataclass(frozen=True)
class FoldingTable:
    """Many-to-one map from corpus labels to phone-set labels.

    Targets must be fixed points of the map, which makes folding
    idempotent.
    """

    mapping: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        mapping = dict(self.mapping)
        loops = sorted(t for t in set(mapping.values()) if mapping.get(t, t) != t)
        if loops:
            raise ValueError(f"folding targets are not fixed points: {loops}")
        object.__setattr__(self, "mapping", MappingProxyType(mapping))

    def __len__(self):
        return len(self.mapping)

    def __call__(self, label: str) -> str:
        return fold_label(label, self)

    def targets(self) -> set[str]:
        return set(self.mapping.values())

    def check(self, phone_set: PhoneSet) -> None:
        """Raise ValueError if some target is missing from ``phone_set``."""
        missing = sorted(t for t in self.targets() if t not in phone_set)
        if missing:
            raise ValueError(f"folding targets missing from phone set: {missing}")


def fold_label(label: str, table: FoldingTable | None) -> str:
    """Fold ``label`` through ``table``; labels absent from the table pass through."""
    if not label:
        raise ValueError("label must be a non-empty string")
    if table is None:
        return label
    return table.mapping.get(label, label)


def parse_folding_table(text: str) -> FoldingTable:
    """Parse ``source<TAB>target`` lines.  ``#`` lines and blank lines are skipped.

    A source listed twice keeps its last target.
    """
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not all(f.strip() for f in fields):
            raise ParseError(
                f"expected 'source<TAB>target', got {raw!r}", line=lineno
            )
        mapping[fields[0].strip()] = fields[1].strip()
    try:
        return FoldingTable(mapping)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def load_folding_table(path) -> FoldingTable:
    return parse_folding_table(Path(path).read_text(encoding="utf-8"))


def _packaged(name: str) -> str:
    return resources.files("phonalign").joinpath("data", name).read_text(encoding="utf-8")


def buckeye_folding() -> FoldingTable:
    """The 26 Buckeye foldings shipped with the package."""
    return parse_folding_table(_packaged("buckeye_folding.tsv"))


def timit_folding() -> FoldingTable:
    """TIMIT folding: common 39-class convention, closures kept with their stops."""
    return parse_folding_table(_packaged("timit_folding.tsv"))


def _normalize_phone(phone: str) -> str:
    return _STRESS.sub("", phone).lower()


@dataclass(frozen=True)
class PronunciationDictionary:
    """Word to pronunciation lookup with an optional active folding table.

    ``entries`` maps upper-cased words to one or more phone sequences;
    the first sequence is the one used for alignment.
    """

    entries: Mapping[str, tuple[tuple[str, ...], ...]]
    folding: FoldingTable | None = None
    phone_set: PhoneSet | None = None

    def __post_init__(self):
        entries = {}
        for word, prons in self.entries.items():
            if not word:
                raise ValueError("dictionary words must be non-empty")
            if prons and isinstance(prons[0], str):
                prons = [prons]
            key = word.upper()
            entries.setdefault(key, ())
            entries[key] += tuple(
                tuple(_normalize_phone(p) for p in pron) for pron in prons
            )
        object.__setattr__(self, "entries", MappingProxyType(entries))
        if self.phone_set is not None:
            bad = sorted(
                {
                    fold_label(p, self.folding)
                    for prons in entries.values()
                    for pron in prons
                    for p in pron
                }
                - set(self.phone_set)
            )
            if bad:
                raise ValueError(f"dictionary uses phones outside the phone set: {bad}")

    def __contains__(self, word):
        return word.upper() in self.entries

    def __len__(self):
        return len(self.entries)

    def with_folding(self, folding: FoldingTable | None) -> "PronunciationDictionary":
        return PronunciationDictionary(self.entries, folding, self.phone_set)


def parse_dictionary(
    text: str,
    folding: FoldingTable | None = None,
    phone_set: PhoneSet | None = None,
) -> PronunciationDictionary:
    """Parse CMUdict-style ``WORD PH1 PH2 ...`` lines.

    Stress digits are stripped from phones.  Alternate pronunciations
    written ``WORD(2)`` are appended to ``WORD`` in file order.
    """
    entries: dict[str, list[tuple[str, ...]]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";;;"):
            continue
        fields = line.split()
        if len(fields) < 2:
            raise ParseError(f"entry has no phones: {raw!r}", line=lineno)
        word = _VARIANT.sub("", fields[0]).upper()
        entries.setdefault(word, []).append(tuple(fields[1:]))
    return PronunciationDictionary(
        {w: tuple(p) for w, p in entries.items()}, folding, phone_set
    )


def load_dictionary(path, folding=None, phone_set=None) -> PronunciationDictionary:
    return parse_dictionary(Path(path).read_text(encoding="utf-8"), folding, phone_set)


def lookup_pronunciation(word: str, dictionary: PronunciationDictionary) -> list[str]:
    """First listed pronunciation of ``word``, folded through the dictionary's table."""
    try:
        pron = dictionary.entries[word.upper()][0]
    except (KeyError, IndexError):
        raise OOVError(word) from None
    return [fold_label(p, dictionary.folding) for p in pron]


def fold_sequence(labels: Sequence[str], table: FoldingTable | None) -> list[str]:
    return [fold_label(lab, table) for lab in labels]
