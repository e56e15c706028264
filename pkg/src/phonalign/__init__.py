"""Forced alignment of phone sequences to acoustic posteriorgrams.

Modules
-------
inventory   phone sets, label folding, pronunciation dictionaries
features    MFCC + delta + delta-delta features, frame labeling
loss        softmax/sigmoid heads, cross-entropy losses and gradients
decoder     monotone DP decoding, boundary times, sub-frame interpolation
aligner     transcription -> targets -> alignment -> tier
textgrid    Praat TextGrid reading and writing
evaluation  boundary error statistics and frame tagging metrics
"""

from .aligner import (
    AcousticScorer,
    LinearAcousticScorer,
    PosteriorgramFileScorer,
    align_posteriorgram,
    align_utterance,
    transcription_to_targets,
)
from .decoder import (
    BoundarySet,
    CostMatrix,
    Posteriorgram,
    boundary_time,
    cost_matrix,
    decode,
    interpolate_crossing,
    read_posteriorgram,
    refine_boundaries,
    write_posteriorgram,
)
from .errors import InfeasibleAlignmentError, LabelMismatchError, OOVError, ParseError
from .evaluation import (
    boundary_abs_errors,
    boundary_error_report,
    empirical_cdf,
    frame_metrics,
    summarize_errors,
    tolerance_table,
)
from .features import FeatureConfig, FeatureMatrix, SegmentAnnotation, compute_features, label_frames
from .inventory import (
    FoldingTable,
    PhoneSet,
    PronunciationDictionary,
    buckeye_folding,
    fold_label,
    lookup_pronunciation,
    parse_dictionary,
    parse_folding_table,
    timit_folding,
)
from .loss import (
    LinearScorer,
    bce_gradient,
    bce_loss,
    cce_gradient,
    cce_loss,
    gradient_step,
    posterior_entropy,
    softmax,
    weighted_bce_loss,
)
from .textgrid import AlignedTier, Interval, read_textgrid, write_textgrid

__version__ = "0.1.0"
