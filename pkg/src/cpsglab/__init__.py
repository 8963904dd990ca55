"""Desk-scale laboratory for semigroup decay rates under time discretization.

The package evaluates operator norms of holomorphic kernels on spectral
models, computes the derivative-integral norms that control them, and fits
empirical decay exponents for Crank-Nicolson products, inverse-generator
semigroups, and resolvent growth against the predicted rates.
"""

from .calculus_eval import CalcEvalReport, bcalc_apply, dcalc_apply
from .calculus_norms import (F_alpha_q, L_envelope, RateEnvelope, WeightPhiQ,
                             Xi1Result, adjust_omega_min, b0_norm,
                             beta_function, ds_norm, fta_sup_closed,
                             fta_sup_numeric, g_sup_closed, g_sup_numeric,
                             rate_envelope_eval, stirling_ratio,
                             sup_norm_halfplane, weighted_b0_norm, xi1)
from .errors import (ConfigError, CpsgError, DivergenceError, FitError,
                     KernelDomainError, PreThresholdError, QuadratureError,
                     SpectrumError, TruncationWarning)
from .integral_conditions import (ConditionIIIReport, LyapunovForms,
                                  condition_iii_form, condition_iii_value,
                                  lemma_small_large_split, lyapunov_forms,
                                  plancherel_residual, plancherel_sides,
                                  pz_ratio, xi_r)
from .kernels import (CayleyProductKernel, CayleyResolventKernel,
                      ConstantKernel, FracResolventKernel,
                      GeneratorSemigroupKernel, InverseSemigroupKernel,
                      InverseSemigroupResolventKernel, Kernel, OmegaSequence,
                      ProductKernel, ResolventKernel, ResolventRatioKernel,
                      SemigroupKernel, eval_kernel, eval_kernel_derivative,
                      limit_at_infinity_checked, w_kernel)
from .norm_engine import (CurveSample, NormCurve, cayley_decay_curve,
                          matrix_cayley_apply, norm_curve, operator_norm)
from .quadrature import (QuadResult, integrate_semi_infinite, max_on_halfline,
                         sup_on_vertical_line)
from .rate_lab import (BetaEstimate, LowerBoundWitness, RateFit,
                       ScenarioResult, beta_from_resolvent,
                       beta_from_smalltime, cayley_identity_check,
                       cn_decay_experiment, fit_power_law,
                       inverse_gen_experiment, lower_bound_probe,
                       poly_decay_experiment, sector_probe, select_fit_window)
from .spectral_models import (FamilySpec, SpectrumModel, build_spectrum,
                              crandall_pazy_spectrum, diagonal_model,
                              fractional_scale, growth_bound, invert_spectrum,
                              load_custom_list, load_matrix_file, matrix_model,
                              polynomial_decay_spectrum, save_custom_list,
                              save_matrix_file, sector_spectrum)

__version__ = "0.1.0"
