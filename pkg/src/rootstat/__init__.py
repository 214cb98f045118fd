"""Simulation and verification laboratory for zeros of random polynomials
and their derivatives: derivative towers, a companion-matrix trace identity
with certified bounds, linear statistics under three scalings, and seeded
reproducible experiment sweeps."""

from .polynomial import (CoefficientPolynomial, PoleProximityError,
                         ZeroConfiguration, coeffs_from_roots,
                         differentiate_coeffs, horner_eval,
                         horner_eval_with_derivative, log_derivative_sums)
from .rootfind import (ConvergenceError, DerivativeTower,
                       critical_points_complex, critical_points_real,
                       derivative_tower, polyroots_coeff)
from .comparison import (ComparisonCertificate, CriticalPointMatrix,
                         build_matrix, c_bound, c_factor, char_poly_residual,
                         jtilde_trace, lemma3_check, matrix_exp_trace, s_tilde)
from .ensembles import (EnsembleSpec, TridiagonalMatrix, UnknownLawError,
                        eigenvalues_sturm, sample_beta_tridiag, sample_kac,
                        sample_type1, semicircle_cdf)
from .stats import (AssumptionReport, LinearStatisticRecord, ScalingPlan,
                    TestFunction, analytic_center, center_statistic,
                    check_assumptions, get_test_function, hull_contains,
                    kolmogorov_distance, levy_distance, linear_statistic,
                    theorem1_bound)
from .harness import (ExperimentConfig, ExperimentResult, ResultRow,
                      config_from_toml, identity_sweep, kac_annulus_experiment,
                      prop2_sweep, run_experiment, semicircle_experiment,
                      tower_sweep, write_csv, write_jsonl)
from .rng import rng_stream, stream_key

__version__ = "0.1.0"
