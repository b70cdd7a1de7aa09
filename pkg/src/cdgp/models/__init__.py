"""GP building blocks: kernels, effective kernels, datasets."""

from .kernel import BaseKernel, as_inputs, kernel_eval  # isort:skip
from .linalg import Factor, nearest_psd, stable_cholesky  # isort:skip
from .moments import (  # isort:skip
    ConditionalMoments,
    EffectiveKernel,
    EffectivePartials,
    effective_kernel_sc,
    effective_kernel_se,
    expectation_exp_inner,
    expectation_exp_quadratic,
    mc_oracle_kernel,
    reduced_inverse_identity_check,
)
from .gp import (  # isort:skip
    GramKernel,
    Prediction,
    fit_gram,
    lml_and_gradient,
    log_marginal_likelihood,
    posterior_from_grams,
    posterior_predict,
    sample_prior,
)
from .composition import CompositionSpec
from .dataset import FidelityDataset, FidelityLevel, load_csv, load_query_csv, save_csv
from .normalize import Normalizer

__all__ = [
    "BaseKernel",
    "CompositionSpec",
    "ConditionalMoments",
    "EffectiveKernel",
    "EffectivePartials",
    "Factor",
    "FidelityDataset",
    "FidelityLevel",
    "GramKernel",
    "Normalizer",
    "Prediction",
    "as_inputs",
    "effective_kernel_sc",
    "effective_kernel_se",
    "expectation_exp_inner",
    "expectation_exp_quadratic",
    "fit_gram",
    "kernel_eval",
    "lml_and_gradient",
    "load_csv",
    "load_query_csv",
    "log_marginal_likelihood",
    "mc_oracle_kernel",
    "nearest_psd",
    "posterior_from_grams",
    "posterior_predict",
    "reduced_inverse_identity_check",
    "sample_prior",
    "save_csv",
    "stable_cholesky",
]
