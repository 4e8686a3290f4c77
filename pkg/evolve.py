from argparse import ArgumentParser
import json
import math
import sys

from pathlib2 import Path

from dynamics import DriftSpec, IntegratorConfig, evolve, MODES, SCHEMES
from ensemble import EnsembleSpec, sample
from utils.cli import add_common_arguments, command_config, run_command, CONFIG_PATH, EXIT_OK, EXIT_BLOWUP
from utils.errors import IntegratorBlowupError
from utils.io import write_hel1, write_trajectory_csv
from utils.tools import load_yaml, resolve_config, write_manifest


def parse_option(argv):
	parser = ArgumentParser(description="Integrate the particle SDE from an exact ensemble draw.")
	parser.add_argument("--alpha", type=float, default=None)
	parser.add_argument("-n", "--n", dest="N", type=int, default=None)
	parser.add_argument("-T", "--T", dest="T", type=float, default=None)
	parser.add_argument("--mode", type=str, default=None, choices=MODES)
	parser.add_argument("--window", type=int, default=None)
	parser.add_argument("--cutoff", type=float, default=None)
	parser.add_argument("--initial-draw", dest="initial_draw", type=int, default=None)
	parser.add_argument("--save-every", dest="save_every", type=int, default=None)

	# integrator params
	parser.add_argument("--dt-max", dest="dt_max", type=float, default=None)
	parser.add_argument("--dt-min", dest="dt_min", type=float, default=None)
	parser.add_argument("--safety", type=float, default=None)
	parser.add_argument("--origin-floor", dest="origin_floor", type=float, default=None)
	parser.add_argument("--collision-floor", dest="collision_floor", type=float, default=None)
	parser.add_argument("--scheme", type=str, default=None, choices=SCHEMES)
	parser.add_argument("--noise-step", dest="noise_step", type=float, default=None)
	add_common_arguments(parser)
	return parser.parse_args(argv)


def integrator_config(args, file_layer=None):
	flags = {k: getattr(args, k) for k in ("dt_max", "dt_min", "safety", "origin_floor", "collision_floor",
										   "scheme", "noise_step")}
	return resolve_config(load_yaml(CONFIG_PATH).get("Integrator", {}), file_layer, flags)


def run(config):
	"""
	Evolve draw `initial_draw` of the ensemble to time T and write the frames
	(CSV and HEL1), the telemetry summary and the manifest. On blowup the
	telemetry at failure is written before the error propagates.
	"""
	out = Path(config["out"])
	cutoff = math.inf if config.get("cutoff") is None else float(config["cutoff"])
	spec = DriftSpec(config["alpha"], config["mode"], N=config["N"] if config["mode"] == "finite-n" else None,
					 window=config.get("window"), cutoff=cutoff)
	cfg = IntegratorConfig(**config["integrator"])
	initial = sample(EnsembleSpec(config["alpha"], config["N"], config["seed"]), config["initial_draw"])
	write_manifest(out, "evolve", config["seed"], config)

	try:
		bundle = evolve(initial, spec, cfg, config["T"], config["seed"], save_every=config["save_every"],
						progress=config["progress"])
	except IntegratorBlowupError as err:
		summary = {"status": "blowup", "time": err.time, "telemetry": err.telemetry}
		out.joinpath("telemetry.json").write_text(json.dumps(summary, indent=2, default=str) + "\n")
		raise
	write_trajectory_csv(bundle, out.joinpath("trajectory.csv"))
	write_hel1(bundle, out.joinpath("trajectory.hel"))
	summary = {"status": "ok", "time": float(bundle.times[-1]), "telemetry": bundle.telemetry.to_dict()}
	out.joinpath("telemetry.json").write_text(json.dumps(summary, indent=2, default=str) + "\n")
	return bundle


def main(argv):
	args = parse_option(argv)
	config = command_config("Evolve", args, {"alpha": args.alpha, "N": args.N, "T": args.T, "mode": args.mode,
											 "window": args.window, "cutoff": args.cutoff,
											 "initial_draw": args.initial_draw, "save_every": args.save_every})
	config["integrator"] = integrator_config(args, config.get("integrator"))
	print(config)
	try:
		bundle = run(config)
	except IntegratorBlowupError as err:
		print(f"integrator blowup: {err}", file=sys.stderr)
		print(err.telemetry)
		return EXIT_BLOWUP
	print(bundle.telemetry.to_dict())
	return EXIT_OK


def cmd_evolve(argv=None) -> int:
	return run_command(main, argv)


if __name__ == "__main__":
	sys.exit(cmd_evolve())
