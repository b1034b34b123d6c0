"""Numerical toolkit for ball/sphere integral means of scalar fields.

Computes sphere and ball averages by high-order quadrature, classifies
fields as harmonic or subharmonic through their mean-value behavior
(including contracted-sphere comparisons), solves the torsion problem to
obtain integral Harnack constants of general domains, and generates the
explicit blow-up and radial-power families used as sharpness examples.
"""

from .classify import (BallSampler, ClassificationReport, beardon_threshold,
                       factor_kappa, kappa_beardon, kappa_one,
                       laplacian_sign_estimate, max_principle_check,
                       test_beardon, test_harmonic, test_subharmonic)
from .constructions import (BlowupField, BlowupParams, BlowupRow, PowerFamily,
                            blowup_1d, blowup_1d_means, blowup_sequence,
                            interior_flat_threshold, power_family,
                            verify_blowup)
from .errors import (ConfigError, ConvergenceError, DimensionMismatchError,
                     DomainError, FieldError, MeanfieldError, QuadratureError)
from .fields import (Affine, Constant, ExpHarmonic, FundamentalShift,
                     GridField, MaxField, Monomial, Poly2D, RadialPower,
                     ScalarField, ScaledField, eval_at, harmonic_poly,
                     laplacian_exact, load_grid_field, max_combine,
                     one_d_tent, psi_fundamental, scaled, sphere_area)
from .geometry import (AnnulusDomain, BallSpec, DiscretizedDomain, DiskDomain,
                       DomainSpec, IntervalDomain, RectangleDomain,
                       SdfGridDomain, contains_closed_ball, discretize,
                       exterior_tangent_point, load_sdf_grid, signed_distance)
from .gridfile import GridData, read_grid, write_grid
from .means import (MeanPair, QuadratureSpec, ball_average,
                    ball_average_direct, mean_pair, radial_profile,
                    sphere_average, unit_ball_volume)
from .torsion import (FluxSamples, HarnackCheck, HarnackConstants,
                      TorsionSolution, dump_flux_csv, dump_solution_grid,
                      exact_ball_solution, harnack_constants, harnack_verify,
                      normal_derivative, serrin_deficit, solve_torsion)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
