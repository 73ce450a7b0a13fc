"""Wasserstein-geodesic data augmentation for robust linear classification.

The package splits into:

- `measures`: point-cloud and Gaussian data types, synthetic sampling, CSV io
- `entropic`: log-stabilized Sinkhorn, entropic costs, debiased barycenters
- `gaussian_ot`: closed-form W2 distance, Monge map and geodesic for Gaussians
- `barycentric`: entropic map estimation, interpolation, mixup, worst-case t
- `embedding` / `augment`: affine embeddings and the batch augmentation loop
- `classifier`: linear classifiers, mean estimators, training, FGSM
- `geodesic_reg`: loss curves along the geodesic and the smoothness penalty
- `robustness`: analytic and Monte Carlo error probabilities, gain trials,
  the distributionally-robust worst-case grid check
- `cli`: the `geodaug` command-line front end
"""

from .augment import AugmentConfig, GeodesicAugmenter, augment_batches, batches_to_dataset
from .barycentric import (
    AugmentationBatch,
    BarycentricMap,
    BarycentricMapper,
    estimate_map,
    interpolate,
    mixup_mode,
    worst_case_t,
)
from .classifier import (
    LinearClassifier,
    LinearGeodesicClassifier,
    TrainConfig,
    fgsm_attack,
    load_classifier,
    mean_estimator,
    pooled_estimator,
    save_classifier,
    train,
)
from .embedding import AffineEmbedding
from .entropic import (
    BarycenterResult,
    CostMatrix,
    TransportPlan,
    cost_matrix,
    debiased_barycenter,
    debiased_transport_cost,
    entropic_cost,
    sinkhorn,
    transport_cost,
)
from .gaussian_ot import (
    GaussianGeodesicPoint,
    GaussianMap,
    augmented_gaussian_pair,
    gaussian_geodesic,
    gaussian_monge_map,
    w2_gaussian,
)
from .geodesic_reg import (
    GeodesicLossCurve,
    performance_geodesic,
    smoothness_regularizer,
    smoothness_regularizer_embedded,
)
from .losses import LINEAR_YFX, LOGISTIC, ZERO_ONE, Loss, get_loss
from .measures import (
    ConditionalGaussianModel,
    DiscreteMeasure,
    GaussianParams,
    LabeledDataset,
    load_csv,
    sample_conditional_gaussian,
    save_csv,
    split_by_class,
)
from .robustness import (
    DroCheckResult,
    GainTrial,
    RobustnessReport,
    analytic_report,
    dro_worst_case_check,
    linf_robust_error,
    monte_carlo_error,
    q_function,
    robustness_gain_trial,
    smoothed_error,
    standard_error,
)
from .validation import CsvFormatError, NumericalError

__version__ = "0.1.0"
