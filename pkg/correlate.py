from argparse import ArgumentParser
import sys

import numpy as np
from pathlib2 import Path

from estimators import estimate_rho1, estimate_rho2, auto_edges
from kernels import LaguerreKernelN
from utils.cli import add_common_arguments, command_config, run_command, EXIT_OK
from utils.errors import DomainError
from utils.io import read_configurations
from utils.report import DiagnosticReport
from utils.tools import load_yaml, parse_list, write_manifest


# Gauss-Legendre nodes per bin for the bin-averaged kernel values
OVERLAY_ORDER = 8


def parse_option(argv):
	parser = ArgumentParser(description="Binned correlation functions of saved draws with kernel overlays.")
	parser.add_argument("-i", "--input", type=str, default=None, help="directory or file written by sample.py")
	parser.add_argument("--alpha", type=float, default=None, help="defaults to the input manifest")
	parser.add_argument("--bins", type=str, default=None, help="bin count, or 'auto'")
	parser.add_argument("--edges", type=str, default=None, help="explicit comma separated rho1 edges")
	parser.add_argument("--pair-bins", dest="pair_bins", type=int, default=None)
	parser.add_argument("--pair-range", dest="pair_range", type=float, default=None)
	parser.add_argument("--min-count", dest="min_count", type=int, default=None)
	add_common_arguments(parser)
	return parser.parse_args(argv)


def _input_alpha(config):
	if config.get("alpha") is not None:
		return float(config["alpha"])
	source = Path(config["input"])
	manifest = (source if source.is_dir() else source.parent).joinpath("manifest.yml")
	if not manifest.exists():
		raise DomainError(f"no --alpha given and no manifest beside {source}")
	return float(load_yaml(manifest)["config"]["alpha"])


def _edges(config, configurations):
	if config.get("edges") is not None:
		return np.asarray(parse_list(config["edges"]), dtype=float)
	if str(config["bins"]) == "auto":
		pilot = configurations[:max(1, len(configurations) // 10)]
		return auto_edges(pilot, len(configurations), target=config["min_count"])
	hi = max(float(np.max(c.points)) for c in configurations) * (1.0 + 1e-12)
	return np.linspace(0.0, hi, int(config["bins"]) + 1)


def bin_average(func, edges):
	"""Mean of func over every bin [edges[k], edges[k+1]]."""
	t, w = np.polynomial.legendre.leggauss(OVERLAY_ORDER)
	lo, hi = edges[:-1], edges[1:]
	nodes = 0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * t[None, :]
	return np.sum(func(nodes) * w[None, :], axis=1) / 2.0


def cell_average_rho2(kernel, edges_y, edges_z):
	"""Mean of K(y,y)K(z,z) - K(y,z)^2 over every cell."""
	t, w = np.polynomial.legendre.leggauss(OVERLAY_ORDER // 2)

	def nodes(edges):
		lo, hi = edges[:-1], edges[1:]
		return (0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * t[None, :]).ravel()

	y, z = nodes(edges_y), nodes(edges_z)
	values = np.outer(kernel.diagonal(y), kernel.diagonal(z)) - kernel(y[:, None], z[None, :]) ** 2
	values = values.reshape(edges_y.size - 1, t.size, edges_z.size - 1, t.size)
	return np.einsum("apbq,p,q->ab", values, w, w) / 4.0


def correlate(config):
	"""
	rho1 and rho2 histograms of the saved draws with kernel-exact overlays,
	written as CSV, and a report on the standardized deviations of rho1 over
	bins with at least `min_count` counts.
	"""
	configurations = read_configurations(config["input"])
	if not configurations:
		raise DomainError(f"no configurations in {config['input']}")
	N = len(configurations[0])
	alpha = _input_alpha(config)
	kernel = LaguerreKernelN(alpha, N)
	out = Path(config["out"])
	out.mkdir(parents=True, exist_ok=True)

	edges = _edges(config, configurations)
	rho1 = estimate_rho1(configurations, edges)
	frame = rho1.to_frame()
	frame["exact"] = bin_average(kernel.diagonal, edges)
	se = np.where(rho1.stderr > 0, rho1.stderr, np.inf)
	frame["z"] = (frame["estimate"] - frame["exact"]) / se
	frame.to_csv(str(out.joinpath("rho1.csv")), index=False, float_format="%.17g", lineterminator="\n")

	pair_edges = np.linspace(0.0, float(config["pair_range"]), int(config["pair_bins"]) + 1)
	rho2 = estimate_rho2(configurations, pair_edges)
	pairs = rho2.to_frame()
	pairs["exact"] = cell_average_rho2(kernel, pair_edges, pair_edges).ravel()
	pairs.to_csv(str(out.joinpath("rho2.csv")), index=False, float_format="%.17g", lineterminator="\n")

	report = DiagnosticReport("correlate", {"alpha": alpha, "N": N, "draws": len(configurations),
											"bins": int(edges.size - 1), "min_count": config["min_count"]})
	populated = frame["count"] >= config["min_count"]
	report.add("populated_bins", int(populated.sum()))
	report.add("rho1_max_abs_z", float(frame.loc[populated, "z"].abs().max()) if populated.any() else 0.0,
			   tolerance=3.0)
	report.add("rho1_integral", rho1.integral())
	report.to_json(out.joinpath("report.json"))
	write_manifest(out, "correlate", None, config)
	return report


def main(argv):
	args = parse_option(argv)
	config = command_config("Correlate", args, {"input": args.input, "alpha": args.alpha, "bins": args.bins,
												"edges": args.edges, "pair_bins": args.pair_bins,
												"pair_range": args.pair_range, "min_count": args.min_count})
	print(config)
	report = correlate(config)
	print(report.to_dict())
	return EXIT_OK


def cmd_correlate(argv=None) -> int:
	return run_command(main, argv)


if __name__ == "__main__":
	sys.exit(cmd_correlate())
