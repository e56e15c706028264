"""
From transcript to TextGrid
===========================

Look up a transcript in a small dictionary, fold the labels, score audio
with a linear model over MFCC frames and write the alignment out as a
TextGrid.  The model here is untrained, so the boundaries only show the
plumbing, not accuracy.
"""

import tempfile
from pathlib import Path

import numpy as np

from phonalign import (
    LinearAcousticScorer,
    LinearScorer,
    PhoneSet,
    align_utterance,
    buckeye_folding,
    parse_dictionary,
    transcription_to_targets,
    write_textgrid,
)
from phonalign.textgrid import read_textgrid

dictionary = parse_dictionary("CAT K AE1 T\nSAT S AE1 T\n")
targets = transcription_to_targets(["sil", "cat", "sat", "sil"], dictionary, buckeye_folding())
print("targets:", targets)

phones = PhoneSet(("sil", "k", "ae", "t", "s"))
rng = np.random.default_rng(3)
scorer = LinearAcousticScorer(LinearScorer(rng.normal(0, 0.05, (len(phones), 39))), phones)

audio = rng.normal(0, 1000, 16000)  # one second of noise at 16 kHz
tier = align_utterance(audio, targets, scorer, interpolation=True)
for seg in tier:
    print(f"{seg.label:>4}  {seg.start:.4f}  {seg.end:.4f}")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "utt.TextGrid"
    write_textgrid([tier], path)
    print("\n".join(path.read_text().splitlines()[:16]))
    assert read_textgrid(path)[0].labels == tier.labels
