"""texpat: texture classification from window-level sub-patterns.

Pipeline: quantized grayscale images are tiled into small windows, each
window gets a co-occurrence descriptor (contrast, correlation, energy,
homogeneity over 2 distances x 4 angles), the windows of one image are
clustered into k patterns whose trimmed averages form the image signature,
and image similarity is the cost of the best matching between two
signatures' pattern sets.  A benchmark harness compares this against the
classical single-descriptor baseline under stratified 10-fold
cross-validation.
"""

from .config import RunConfig, build_config
from .corpus import (CorpusEntry, Manifest, QuantizedImage, load_grayscale,
                     load_video_frames, read_manifest, read_pgm, write_pgm)
from .errors import (DegenerateMatrixError, EmptyCorpusError,
                     EmptyDecompositionError, FormatError, ManifestError,
                     ValidationError)
from .features import (contrast, correlation, describe, descriptor_labels,
                       energy, homogeneity)
from .glcm import ANGLES, Glcm, GlcmSpec, compute_glcm, glcm_marginals
from .kernels import get_backend
from .classify import (AccuracyReport, FoldPlan, MatchResult, image_distance,
                       knn_classify, match_signatures, pattern_distance,
                       plan_folds, run_benchmark)
from .patterns import (ImageSignature, NormalizationStats, PatternSignature,
                       SegmentationMap, build_signature, cluster_windows,
                       fit_normalization, load_signatures, save_signatures,
                       trim_survivors)
from .windows import WindowedImage, decompose, pool_video

__version__ = '0.1.0'
