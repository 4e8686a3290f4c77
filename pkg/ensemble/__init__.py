from ensemble.configuration import (PointConfiguration, EnsembleSpec, SAMPLERS, log_density, log_density_gradient,
                                    model_to_hardedge, matrix_to_hardedge, hardedge_to_matrix, support_upper)
from ensemble.sampler import sample, sample_batch, tridiagonal_draw, hkpv_draw
from utils.tools import default_workers


def create_ensemble(alpha, N, draws, seed=0, sampler="tridiagonal", workers=None, progress=True, **kwargs):
	spec = EnsembleSpec(alpha, N, seed, sampler)
	workers = default_workers() if workers is None else workers
	configurations = sample_batch(spec, draws, workers=workers, progress=progress)
	return spec, configurations
