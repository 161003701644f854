"""Laboratory for the critical elephant random walk.

Simulators for the reinforced walk, exact small-horizon enumeration, the
Brownian embedding of the rescaled walk, a deterministic ensemble engine,
and a verification command line.
"""

__version__ = "0.1.0"

from .coeffs import Coefficients, coefficients, martingale_value, second_moment_oracle
from .enumeration import EnumeratedLaw, exact_enumeration
from .walk import WalkParams, WalkState, simulate_walk, step_up_probability
from .observables import (
    EmpiricalDistribution,
    TailEstimate,
    WalkObservables,
    arcsine_cdf,
    arcsine_cdf_half,
    ks_distance,
    tail_estimate,
)
from .embedding import ExitProblem, embed_walk, exit_side_probability, expected_exit_time, sample_exit
from .ensemble import EnsembleSpec, EnsembleSummary, derive_stream, load_summary, persist_summary, run_ensemble

__all__ = [
    "Coefficients",
    "coefficients",
    "martingale_value",
    "second_moment_oracle",
    "EnumeratedLaw",
    "exact_enumeration",
    "WalkParams",
    "WalkState",
    "simulate_walk",
    "step_up_probability",
    "EmpiricalDistribution",
    "TailEstimate",
    "WalkObservables",
    "arcsine_cdf",
    "arcsine_cdf_half",
    "ks_distance",
    "tail_estimate",
    "ExitProblem",
    "embed_walk",
    "exit_side_probability",
    "expected_exit_time",
    "sample_exit",
    "EnsembleSpec",
    "EnsembleSummary",
    "derive_stream",
    "load_summary",
    "persist_summary",
    "run_ensemble",
    "__version__",
]
