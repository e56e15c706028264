"""
Frame features and frame labels
===============================

MFCCs with deltas for one second of synthetic audio, and the labels a
frame inherits from a segmentation.
"""

import numpy as np

from phonalign import FeatureConfig, SegmentAnnotation, compute_features, label_frames

cfg = FeatureConfig()
t = np.arange(cfg.sample_rate) / cfg.sample_rate
tone = 8000 * np.sin(2 * np.pi * 1000 * t)

feats = compute_features(tone, cfg)
print("frames x dims:", feats.frames.shape)
print("c0 (log energy) of the first frames:", np.round(feats.frames[:3, 0], 3))
# A steady tone has no dynamics once past the pre-emphasis edge
deltas = np.abs(feats.frames[:, 13:26]).max(axis=1)
print("max |delta| per frame, first frames:", np.round(deltas[:4], 3))
print("max |delta| in the interior:", float(deltas[5:-5].max()))

###############################################################################
# Frame ``u`` covers [10u, 10u + 25] ms and takes the label of the
# segment it overlaps most.

segs = [SegmentAnnotation("sil", 0.0, 0.042), SegmentAnnotation("k", 0.042, 0.1),
        SegmentAnnotation("ae", 0.1, 0.2)]
print(label_frames(segs, 10, cfg))
