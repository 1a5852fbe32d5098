"""Bayesian model-averaged dose-response analysis of efficacy and toxicity."""

__version__ = "0.1.0"

from .averaging import ModelWeightSet, PooledDraws, compute_weights, pool_draws, waic  # noqa: E402
from .categorical import (  # noqa: E402
    CategoryRule,
    assign_category,
    category_distance,
    category_prob_curve,
    distance_curve,
)
from .copulas import CopulaFamily, CopulaSpec, kendall_tau, sample_copula  # noqa: E402
from .data import Dataset, PairedDataset, ingest_csv  # noqa: E402
from .inference import McmcConfig, PosteriorDraws, diagnostics, run_mcmc  # noqa: E402
from .models import (  # noqa: E402
    DoseResponseShape,
    Likelihood,
    LikelihoodKind,
    Link,
    ModelSpec,
    ShapeKind,
    apply_inverse_link,
    default_candidate_set,
    default_priors,
    eval_mean,
    log_likelihood,
)
from .selection import (  # noqa: E402
    DoseGrid,
    DoseInterval,
    EfficacyMin,
    ToxicityMax,
    acceptable_range,
    diff_from_control_curve,
    expected_curve,
    individual_prediction_curve,
    intersect,
    joint_contour,
    success_probability,
)
from .simulation import MarginalSpec, SimConfig, generate_example_dataset  # noqa: E402
