"""Monotone DP decoding of a posteriorgram against a phone sequence.

The decoder is a restricted dynamic time warping between the target
symbols and the frames: each frame is assigned to exactly one symbol,
symbols are consumed in order, none is skipped.  Local cost is the
absolute log probability of the symbol at the frame.

Boundaries are placed at frame transitions and can optionally be
refined below the frame step by intersecting two lines fit through the
2x2 block of the cumulative cost matrix that straddles the transition.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InfeasibleAlignmentError, ParseError
from .inventory import PhoneSet

__all__ = [
    "COST_CEILING",
    "Posteriorgram",
    "CostMatrix",
    "BoundarySet",
    "cost_matrix",
    "decode",
    "path_cost",
    "boundary_time",
    "interpolate_crossing",
    "refine_boundaries",
    "read_posteriorgram",
    "write_posteriorgram",
    "parse_posteriorgram",
    "format_posteriorgram",
]

log = logging.getLogger(__name__)

# |log| of the smallest positive double is ~744.4
COST_CEILING = 745.0

_PGRAM_MAGIC = "PGRAM1"


@dataclass(frozen=True)
class Posteriorgram:
    """k x T per-frame class probabilities with the phone set naming the rows.

    ``mode`` selects the column check: ``"softmax"`` columns must sum to
    one, ``"sigmoid"`` columns to at most k, ``None`` checks range only.
    """

    probs: np.ndarray
    phone_set: PhoneSet
    mode: str | None = None

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 2:
            raise ValueError("posteriorgram must be a k x T matrix")
        if probs.shape[0] != len(self.phone_set):
            raise ValueError(
                f"{probs.shape[0]} rows but {len(self.phone_set)} phone symbols"
            )
        if not np.all(np.isfinite(probs)) or np.any(probs < 0) or np.any(probs > 1):
            raise ValueError("probabilities must be finite and in [0, 1]")
        if self.mode == "softmax":
            if not np.allclose(probs.sum(axis=0), 1.0, rtol=0, atol=1e-6):
                raise ValueError("softmax posteriorgram columns must sum to 1")
        elif self.mode not in (None, "sigmoid"):
            raise ValueError(f"unknown mode {self.mode!r}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def num_frames(self) -> int:
        return self.probs.shape[1]

    @property
    def num_classes(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True)
class CostMatrix:
    """Local costs ``O`` (k x T) and the padded cumulative matrix ``M`` ((n+1) x (T+1)).

    ``M[0, 0] = 0``; the rest of row 0 and column 0 is infinite.
    ``M[i, t]`` is the cheapest way to put symbols ``0..i-1`` on frames
    ``0..t-1``.  ``targets`` are the class indices that were aligned.
    """

    O: np.ndarray
    M: np.ndarray
    targets: tuple[int, ...]

    @property
    def total(self) -> float:
        return float(self.M[-1, -1])


@dataclass(frozen=True)
class BoundarySet:
    """Segment end times in seconds: n-1 interior boundaries then the utterance end.

    ``offsets[j]`` is the sub-frame fraction added to interior boundary
    ``j`` (``None`` when no interpolation was applied).
    """

    times: tuple[float, ...]
    offsets: tuple[float | None, ...]
    clamped: int = 0
    repaired: int = 0

    @property
    def interior(self) -> tuple[float, ...]:
        return self.times[:-1]


def cost_matrix(probs, ceiling: float = COST_CEILING) -> np.ndarray:
    """``|log p|`` capped at ``ceiling``.

    Every probability at or below ``exp(-ceiling)``, zero included,
    costs exactly ``ceiling``.
    """
    p = np.asarray(getattr(probs, "probs", probs), dtype=float)
    with np.errstate(divide="ignore"):
        cost = np.abs(np.log(p))
    cost = np.minimum(cost, ceiling)
    cost[p <= math.exp(-ceiling)] = ceiling
    return cost


def decode(O, s: Sequence[int]) -> tuple[np.ndarray, CostMatrix]:
    """Align target sequence ``s`` to the frames of local-cost matrix ``O``.

    Returns the frame-wise path (position into ``s`` for every frame)
    and the cost matrices.  When both predecessors of a cell tie during
    backtracking the path stays on the current symbol.
    """
    O = np.asarray(O, dtype=float)
    s = [int(x) for x in s]
    if O.ndim != 2:
        raise ValueError("cost matrix must be k x T")
    k, T = O.shape
    n = len(s)
    if n == 0:
        raise ValueError("target sequence is empty")
    if n > T:
        raise InfeasibleAlignmentError(
            f"{n} target symbols cannot be aligned to {T} frames"
        )
    if any(not 0 <= x < k for x in s):
        raise IndexError(f"target index out of range for {k} classes")
    if not np.all(np.isfinite(O)):
        raise ValueError("cost matrix must be finite")

    # local[i, t]: cost of symbol s[i] at frame t
    local = O[s, :]
    M = np.full((n + 1, T + 1), np.inf)
    M[0, 0] = 0.0
    for t in range(1, T + 1):
        prev = M[:, t - 1]
        M[1:, t] = local[:, t - 1] + np.minimum(prev[:-1], prev[1:])

    path = np.empty(T, dtype=int)
    i = n
    for t in range(T, 0, -1):
        path[t - 1] = i - 1
        if t > 1 and M[i - 1, t - 1] < M[i, t - 1]:
            i -= 1
    return path, CostMatrix(O, M, tuple(s))


def path_cost(O, s: Sequence[int], path: Sequence[int]) -> float:
    """Total local cost of assigning frame ``t`` to ``s[path[t]]``."""
    O = np.asarray(O, dtype=float)
    cls = np.asarray(s)[np.asarray(path)]
    return float(O[cls, np.arange(len(path))].sum())


def boundary_time(i: int, window: float = 0.025, step: float = 0.010) -> float:
    """Time in seconds of a boundary after 1-based frame ``i``.

    That is the end of frame ``i``'s analysis window:
    ``window + (i - 1) * step``, i.e. ``0.015 + 0.01 i`` at 25/10 ms.
    """
    if i < 1:
        raise ValueError(f"frame index must be >= 1, got {i}")
    return (window - step) + step * i


def interpolate_crossing(A) -> float | None:
    """Crossing point in [0, 1] of the lines through the two rows of ``A``.

    Row r defines the line ``A[r, 0] + (A[r, 1] - A[r, 0]) * x``.
    Returns ``None`` for parallel lines, non-finite entries, or a
    crossing outside the unit interval.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2):
        raise ValueError("A must be 2 x 2")
    if not np.all(np.isfinite(A)):
        return None
    d = A[:, 1] - A[:, 0]
    # -d1 x + y = A11 ; -d2 x + y = A21
    denom = d[0] - d[1]
    if denom == 0:
        return None
    chi = (A[1, 0] - A[0, 0]) / denom
    if not 0.0 <= chi <= 1.0:
        return None
    return float(chi)


def _crossing_block(costs: CostMatrix, j: int, i: int, source: str):
    """2x2 block for the transition from symbol j to j+1 after 1-based frame i."""
    if source == "M":
        return costs.M[j + 1 : j + 3, i : i + 2]
    if source == "O":
        rows = [costs.targets[j], costs.targets[j + 1]]
        return costs.O[np.ix_(rows, [i - 1, i])]
    raise ValueError(f"source must be 'M' or 'O', got {source!r}")


def refine_boundaries(
    path,
    costs: CostMatrix,
    config=None,
    duration: float | None = None,
    interpolation: bool = False,
    source: str = "M",
) -> BoundarySet:
    """Convert a decoded path into boundary times.

    ``config`` supplies ``window_length`` and ``frame_step`` (defaults
    25/10 ms).  With ``interpolation`` on, each interior boundary gets
    ``frame_step * chi`` added when a crossing exists.  ``source``
    picks the matrix the 2x2 block comes from: cumulative ``"M"``
    (default) or local ``"O"``.  The last segment ends at ``duration``
    (default: end of the last frame's window).
    """
    window = getattr(config, "window_length", 0.025)
    step = getattr(config, "frame_step", 0.010)
    path = np.asarray(path)
    T = path.size
    if duration is None:
        duration = boundary_time(T, window, step)

    frames = np.flatnonzero(np.diff(path)) + 1  # 1-based last frame of each segment
    times, offsets = [], []
    for i in frames:
        j = int(path[i - 1])
        t = boundary_time(int(i), window, step)
        chi = None
        if interpolation:
            chi = interpolate_crossing(_crossing_block(costs, j, int(i), source))
            if chi is not None:
                t += step * chi
        times.append(t)
        offsets.append(chi)

    # right to left: an offset that reaches the next boundary (or the
    # utterance end) is dropped; bases are >= one step apart, so this holds
    repaired = 0
    fence = duration
    for b in range(len(times) - 1, -1, -1):
        if offsets[b] is not None and times[b] >= fence:
            times[b] = boundary_time(int(frames[b]), window, step)
            offsets[b] = None
            repaired += 1
        fence = times[b]

    clamped = 0
    for b, t in enumerate(times):
        if t > duration:
            times[b] = duration
            clamped += 1
    if clamped:
        log.warning("%d boundary time(s) clamped to the utterance end %.6f", clamped, duration)
    return BoundarySet(tuple(times) + (float(duration),), tuple(offsets), clamped, repaired)


def format_posteriorgram(pgram: Posteriorgram) -> str:
    k, T = pgram.probs.shape
    lines = [_PGRAM_MAGIC, f"{k} {T}", " ".join(pgram.phone_set.symbols)]
    for col in pgram.probs.T:
        lines.append(" ".join(repr(float(v)) for v in col))
    return "\n".join(lines) + "\n"


def write_posteriorgram(pgram: Posteriorgram, path) -> None:
    Path(path).write_text(format_posteriorgram(pgram), encoding="utf-8")


def parse_posteriorgram(text: str, mode: str | None = None) -> Posteriorgram:
    lines = text.splitlines()
    if not lines or lines[0].strip() != _PGRAM_MAGIC:
        raise ParseError(f"missing {_PGRAM_MAGIC} header", line=1)
    try:
        k, T = (int(v) for v in lines[1].split())
    except (IndexError, ValueError):
        raise ParseError("expected 'k T'", line=2) from None
    if len(lines) < 3:
        raise ParseError("missing symbol line", line=3)
    symbols = lines[2].split()
    if len(symbols) != k:
        raise ParseError(f"expected {k} symbols, got {len(symbols)}", line=3)
    rows = [ln for ln in lines[3:]]
    while rows and not rows[-1].strip():
        rows.pop()
    if len(rows) != T:
        raise ParseError(f"expected {T} frame lines, got {len(rows)}", line=3 + len(rows))
    probs = np.empty((k, T))
    for t, ln in enumerate(rows):
        lineno = t + 4
        fields = ln.split()
        if len(fields) != k:
            raise ParseError(f"expected {k} values, got {len(fields)}", line=lineno)
        try:
            vals = [float(v) for v in fields]
        except ValueError:
            raise ParseError(f"non-numeric value in {ln!r}", line=lineno) from None
        if any(not math.isfinite(v) or v < 0 or v > 1 for v in vals):
            raise ParseError("probabilities must be finite and in [0, 1]", line=lineno)
        probs[:, t] = vals
    try:
        return Posteriorgram(probs, PhoneSet(tuple(symbols)), mode)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_posteriorgram(path, mode: str | None = None) -> Posteriorgram:
    return parse_posteriorgram(Path(path).read_text(encoding="utf-8"), mode)
