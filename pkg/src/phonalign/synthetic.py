"""Synthetic posteriorgrams with planted segmentations.

Each planted boundary sits ``f * step`` after the window end of the
last frame of its left segment, with ``f`` drawn uniformly from [0, 1).
In the crisp profile every frame puts ``correct_prob`` on its own
symbol.  In the ramped profile the first frame of each right-hand
segment also carries ``f``: the right symbol gets ``correct_prob *
(1 - f/2)`` and the left symbol the rest of ``correct_prob``, so the
confusion grows linearly as the true boundary moves later.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decoder import Posteriorgram, boundary_time
from .features import FeatureConfig
from .inventory import PhoneSet

__all__ = ["PlantedUtterance", "planted_utterance"]


@dataclass(frozen=True)
class PlantedUtterance:
    pgram: Posteriorgram
    targets: tuple[int, ...]
    boundaries: tuple[float, ...]  # interior boundaries, seconds
    last_frames: tuple[int, ...]  # 1-based last frame of each non-final segment
    duration: float


def planted_utterance(
    rng: np.random.Generator,
    num_classes: int = 8,
    num_segments: int | tuple[int, int] = (5, 10),
    frames_per_segment: tuple[int, int] = (3, 8),
    correct_prob: float = 0.9,
    ramp: bool = False,
    config: FeatureConfig | None = None,
) -> PlantedUtterance:
    if num_classes < 3:
        raise ValueError("need at least 3 classes")
    config = config or FeatureConfig()
    if isinstance(num_segments, tuple):
        num_segments = int(rng.integers(num_segments[0], num_segments[1] + 1))
    lo, hi = frames_per_segment
    lengths = rng.integers(lo, hi + 1, size=num_segments)

    targets = [int(rng.integers(num_classes))]
    while len(targets) < num_segments:
        c = int(rng.integers(num_classes - 1))
        targets.append(c + (c >= targets[-1]))  # never repeat the previous symbol

    T = int(lengths.sum())
    rest = (1.0 - correct_prob) / (num_classes - 1)
    probs = np.full((num_classes, T), rest)
    ends = np.cumsum(lengths)
    starts = ends - lengths
    for sym, a, b in zip(targets, starts, ends):
        probs[sym, a:b] = correct_prob

    window, step = config.window_length, config.frame_step
    frac = rng.uniform(0.0, 1.0, size=num_segments - 1)
    bounds = []
    for j, (i, f) in enumerate(zip(ends[:-1], frac)):
        bounds.append(boundary_time(int(i), window, step) + step * f)
        if ramp:
            col = np.full(num_classes, (1.0 - correct_prob) / (num_classes - 2))
            col[targets[j + 1]] = correct_prob * (1.0 - f / 2)
            col[targets[j]] = correct_prob * f / 2
            probs[:, i] = col  # column i is 1-based frame i + 1

    phones = PhoneSet(tuple(f"p{c}" for c in range(num_classes)))
    duration = boundary_time(T, window, step)
    return PlantedUtterance(
        Posteriorgram(probs, phones, "softmax"),
        tuple(targets),
        tuple(bounds),
        tuple(int(i) for i in ends[:-1]),
        duration,
    )
