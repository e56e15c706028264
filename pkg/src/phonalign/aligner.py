"""Transcription-to-TextGrid alignment pipeline.

words -> dictionary lookup + folding -> target symbols
audio -> features -> acoustic scorer -> posteriorgram
(targets, posteriorgram) -> decode -> boundaries -> tier
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .decoder import (
    COST_CEILING,
    Posteriorgram,
    cost_matrix,
    decode,
    read_posteriorgram,
    refine_boundaries,
)
from .errors import InfeasibleAlignmentError, OOVError
from .features import FeatureConfig, FeatureMatrix, compute_features
from .inventory import (
    FoldingTable,
    PhoneSet,
    PronunciationDictionary,
    lookup_pronunciation,
)
from .loss import LinearScorer
from .textgrid import AlignedTier, Interval

__all__ = [
    "SILENCE_TOKENS",
    "AcousticScorer",
    "PosteriorgramFileScorer",
    "LinearAcousticScorer",
    "transcription_to_targets",
    "align_posteriorgram",
    "align_utterance",
    "posteriorgram_duration",
]

# transcript tokens passed straight through as phone labels
SILENCE_TOKENS = frozenset({"sil", "<sil>"})


@runtime_checkable
class AcousticScorer(Protocol):
    """Anything that maps a feature matrix to a posteriorgram with the same T."""

    phone_set: PhoneSet

    def score(self, features: FeatureMatrix) -> Posteriorgram: ...


@dataclass(frozen=True)
class PosteriorgramFileScorer:
    """Scorer backed by a precomputed posteriorgram file; features are ignored."""

    path: str

    @property
    def phone_set(self) -> PhoneSet:
        return self.load().phone_set

    def load(self) -> Posteriorgram:
        return read_posteriorgram(self.path)

    def score(self, features: FeatureMatrix | None = None) -> Posteriorgram:
        pgram = self.load()
        if features is not None and len(features) != pgram.num_frames:
            raise ValueError(
                f"posteriorgram has {pgram.num_frames} frames, features have {len(features)}"
            )
        return pgram


@dataclass(frozen=True)
class LinearAcousticScorer:
    """Adapts a :class:`LinearScorer` to the scorer interface."""

    model: LinearScorer
    phone_set: PhoneSet

    def __post_init__(self):
        if self.model.num_classes != len(self.phone_set):
            raise ValueError("scorer class count does not match the phone set")

    def score(self, features: FeatureMatrix) -> Posteriorgram:
        probs = self.model.probabilities(features.frames).T
        return Posteriorgram(np.clip(probs, 0.0, 1.0), self.phone_set)


def transcription_to_targets(
    words: Sequence[str],
    dictionary: PronunciationDictionary,
    folding: FoldingTable | None = None,
) -> list[str]:
    """Concatenate the folded pronunciations of ``words``.

    Silence tokens (``sil``) are emitted as-is; no silence is inserted
    between words.  Every missing word is reported in a single
    :class:`OOVError`.
    """
    if folding is not None:
        dictionary = dictionary.with_folding(folding)
    out, missing = [], []
    for word in words:
        if word.lower() in SILENCE_TOKENS:
            out.append("sil")
            continue
        try:
            out.extend(lookup_pronunciation(word, dictionary))
        except OOVError:
            if word not in missing:
                missing.append(word)
    if missing:
        raise OOVError(missing)
    return out


def posteriorgram_duration(T: int, config: FeatureConfig | None = None) -> float:
    """End of the last analysis window: ``T * step + window - step``."""
    config = config or FeatureConfig()
    return T * config.frame_step + config.window_length - config.frame_step


def _encode(targets, phone_set):
    if all(isinstance(t, (int, np.integer)) for t in targets):
        return [int(t) for t in targets]
    missing = sorted({t for t in targets if t not in phone_set})
    if missing:
        raise KeyError(f"target phones not produced by the acoustic model: {missing}")
    return phone_set.encode(targets)


def align_posteriorgram(
    pgram: Posteriorgram,
    targets: Sequence,
    *,
    interpolation: bool = False,
    config: FeatureConfig | None = None,
    duration: float | None = None,
    tier_name: str = "phones",
    source: str = "M",
    ceiling: float = COST_CEILING,
) -> AlignedTier:
    """Align ``targets`` (labels or class indices) against ``pgram``."""
    config = config or FeatureConfig()
    s = _encode(list(targets), pgram.phone_set)
    if not s:
        raise ValueError("target sequence is empty")
    T = pgram.num_frames
    if len(s) > T:
        raise InfeasibleAlignmentError(
            f"{len(s)} target symbols but only {T} frames; use a finer frame step "
            "or a shorter transcription"
        )
    if duration is None:
        duration = posteriorgram_duration(T, config)
    path, costs = decode(cost_matrix(pgram, ceiling), s)
    bounds = refine_boundaries(path, costs, config, duration, interpolation, source)
    starts = (0.0,) + bounds.times[:-1]
    labels = pgram.phone_set.decode(s)
    segs = tuple(Interval(lab, a, b) for lab, a, b in zip(labels, starts, bounds.times))
    return AlignedTier(tier_name, segs)


def align_utterance(
    source,
    targets: Sequence,
    scorer: AcousticScorer | None = None,
    *,
    interpolation: bool = False,
    config: FeatureConfig | None = None,
    sample_rate: int | None = None,
    tier_name: str = "phones",
) -> AlignedTier:
    """Align one utterance given audio samples or a ready posteriorgram.

    ``source`` is either a :class:`Posteriorgram` (``scorer`` unused)
    or a 1-D sample array, which is featurized and passed to
    ``scorer``.  For audio the last segment ends at the audio duration.
    """
    if isinstance(source, Posteriorgram):
        return align_posteriorgram(
            source, targets, interpolation=interpolation, config=config, tier_name=tier_name
        )
    if scorer is None:
        raise ValueError("audio input needs an acoustic scorer")
    config = config or FeatureConfig(sample_rate=sample_rate or 16000)
    if sample_rate is not None and sample_rate != config.sample_rate:
        raise ValueError("sample_rate disagrees with the feature config")
    samples = np.asarray(source, dtype=float)
    feats = compute_features(samples, config)
    pgram = scorer.score(feats)
    if pgram.num_frames != len(feats):
        raise ValueError("scorer changed the number of frames")
    return align_posteriorgram(
        pgram,
        targets,
        interpolation=interpolation,
        config=config,
        duration=samples.size / config.sample_rate,
        tier_name=tier_name,
    )
