from specfun.gamma import gamma_fn, log_gamma, gamma_sign, rgamma, log_binomial, GAMMA_MAX_ARG
from specfun.bessel import bessel_j, x_switch, series_limit
from specfun.laguerre import (laguerre, laguerre_sum, laguerre_scaled, laguerre_monic, monic_norm,
                              weight, log_weight, laguerre_derivative_check, orthonormal_functions,
                              check_order, check_degree, LaguerreTriple, SignedLog)
