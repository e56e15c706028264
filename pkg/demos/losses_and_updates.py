"""
Crisp and sparse training signals
=================================

How one gradient step moves a linear scorer under the categorical
(softmax) and the multilabel (sigmoid) objectives, on a toy problem with
three classes (k, g, s) and two input features (velar, sibilant).
"""

import numpy as np

from phonalign import LinearScorer, cce_gradient, bce_gradient, gradient_step, posterior_entropy

w = np.full((3, 2), 0.1)
x = np.array([2.0, 0.0])  # strongly velar, not sibilant

soft = gradient_step(LinearScorer(w, "softmax"), x, 0, alpha=0.1)
print("softmax, target k:")
print("  velar weights", w[:, 0], "->", np.round(soft.weights[:, 0], 4))

# Multilabel: k and g are both acceptable labels for this frame
sig = gradient_step(LinearScorer(w, "sigmoid"), x, np.array([1, 1, 0]), alpha=0.1)
print("sigmoid, targets k and g:")
print("  velar weights", w[:, 0], "->", np.round(sig.weights[:, 0], 4))

###############################################################################
# The gradients themselves.  Softmax pushes every wrong class down,
# sigmoid leaves each class to its own label.

z = np.array([1.0, 0.8, -2.0])
print("cce gradient ", np.round(cce_gradient(z, 0), 4))
print("bce gradient ", np.round(bce_gradient(z, [1, 1, 0]), 4))

# A two-way split between similar sounds carries almost a full bit
print("entropy of (0.65, 0.35):", round(posterior_entropy([0.65, 0.35]), 4), "bits")
