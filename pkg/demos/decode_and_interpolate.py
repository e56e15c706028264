"""
Decoding a posteriorgram against a phone sequence
=================================================

A hand-made three-frame posteriorgram over two symbols, aligned to the
sequence (a, b).  Then a planted utterance where the true boundaries
fall between frames, decoded with and without sub-frame interpolation.
"""

import numpy as np

from phonalign import PhoneSet, Posteriorgram, align_posteriorgram, cost_matrix, decode
from phonalign.synthetic import planted_utterance

###############################################################################
# Local costs are |log p|.  Frame 0 clearly belongs to ``a``, frames 1-2
# to ``b``.

O = np.array([[0.1, 1.0, 1.0], [1.0, 0.1, 0.1]])
pg = Posteriorgram(np.exp(-O), PhoneSet(("a", "b")))
path, costs = decode(cost_matrix(pg), [0, 1])
print("path:", path, "total cost:", round(costs.total, 6))
print("cumulative matrix M:\n", np.round(costs.M, 3))

tier = align_posteriorgram(pg, ["a", "b"])
for seg in tier:
    print(f"{seg.label}: {seg.start:.3f} - {seg.end:.3f} s")

###############################################################################
# Planted boundaries.  Each true boundary sits somewhere inside the 10 ms
# after a frame's window end, and the first frame of the next segment
# is confused in proportion to how late the boundary is.

rng = np.random.default_rng(7)
errs = {False: [], True: []}
for _ in range(50):
    pu = planted_utterance(rng, ramp=True)
    for interp in (False, True):
        t = align_posteriorgram(pu.pgram, pu.targets, interpolation=interp)
        errs[interp].extend(np.abs(np.array(t.boundaries) - pu.boundaries) * 1000)

for interp, e in errs.items():
    print(f"interpolation={interp!s:5}  mean {np.mean(e):.2f} ms  max {np.max(e):.2f} ms")
