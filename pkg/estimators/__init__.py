from estimators.density import (BinnedDensity, PairDensity2D, estimate_rho1, estimate_rho2, merge_binned, merge_pair,
                                auto_edges, far_drift_moment)
from estimators.distance import ks_distance, smallest_particles
