"""On-disk fixtures for CLI runs: dictionary, posteriorgrams, manifests, WAVs."""

import wave
from pathlib import Path

import numpy as np

from phonalign.decoder import Posteriorgram, write_posteriorgram
from phonalign.inventory import PhoneSet

PHONES = PhoneSet(("sil", "k", "ae", "t", "d", "ao", "g"))
DICT_TEXT = "CAT K AE1 T\nDOG D AO1 G\n"
PRONS = {"cat": ["k", "ae", "t"], "dog": ["d", "ao", "g"], "sil": ["sil"]}


def pgram_for(words, rng, correct=0.9):
    labels = [p for w in words for p in PRONS[w]]
    lengths = rng.integers(3, 8, size=len(labels))
    k = len(PHONES)
    probs = np.full((k, int(lengths.sum())), (1 - correct) / (k - 1))
    t = 0
    for lab, n in zip(labels, lengths):
        probs[PHONES.index(lab), t : t + n] = correct
        t += n
    return Posteriorgram(probs, PHONES, "softmax")


def write_corpus(root: Path, rng, transcripts=("cat dog", "dog sil cat", "cat")):
    """Write dictionary, one posteriorgram per transcript and a manifest."""
    root.mkdir(parents=True, exist_ok=True)
    (root / "dict.txt").write_text(DICT_TEXT)
    lines = []
    for u, text in enumerate(transcripts):
        write_posteriorgram(pgram_for(text.split(), rng), root / f"u{u}.pgram")
        lines.append(f"u{u}.pgram\t{text}\tout/u{u}.TextGrid")
    (root / "manifest.tsv").write_text("\n".join(lines) + "\n")
    return root / "manifest.tsv"


def write_wav(path, samples, rate=16000, channels=1, width=2):
    with wave.open(str(path), "wb") as w:
        w.setnchannels(channels)
        w.setsampwidth(width)
        w.setframerate(rate)
        if width == 1:
            w.writeframes(np.asarray(samples, dtype=np.uint8).tobytes())
        else:
            w.writeframes(np.asarray(samples, dtype="<i2").tobytes())
