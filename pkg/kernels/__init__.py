from kernels.base import Kernel, KernelMatrix, DIAG_THRESHOLD, near_diagonal_blend
from kernels.bessel import BesselKernel, bessel_kernel_eval, bessel_kernel_integral
from kernels.laguerre import (LaguerreKernelN, PalmKernelN, laguerre_kernel_eval, palm_kernel_eval,
                              m_function, diagonal_via_m, EPS_PALM)
from kernels.correlation import (correlation_fn, hadamard_report, kernel_convergence_report, envelope_report,
                                 nystrom_operator_report, trace_report, convergence_grid)
