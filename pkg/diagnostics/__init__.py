from diagnostics.quadrature import adaptive_panels, sqrt_breakpoints, QuadratureResult
from diagnostics.tails import (TailIntegralSpec, tail_integral_A, tail_integral_B, tail_integral_C, tail_integral_D,
                               tail_terms, tail_bound_A, tail_2d_tensor, signed_tail_conditions, palm_dominance,
                               tails_report)
from diagnostics.hilb import HilbSpec, hilb_residual, m_identity_check, residual, log_amplitude, implied_constant
from diagnostics.ibp import TEST_FUNCTIONS, ibp_identity_check, ibp_sides, bump, get_test_function
