from argparse import ArgumentParser
import sys

from pathlib2 import Path

from ensemble import create_ensemble, SAMPLERS
from utils.cli import add_common_arguments, command_config, run_command, EXIT_OK
from utils.io import write_configurations_csv, write_configurations_jsonl
from utils.tools import write_manifest


def parse_option(argv):
	parser = ArgumentParser(description="Exact draws of the N-point hard-edge ensemble.")
	parser.add_argument("--alpha", type=float, default=None)
	parser.add_argument("-n", "--n", dest="N", type=int, default=None)
	parser.add_argument("--draws", type=int, default=None)
	parser.add_argument("--sampler", type=str, default=None, choices=SAMPLERS)
	parser.add_argument("--format", type=str, default=None, choices=["csv", "jsonl"])
	add_common_arguments(parser)
	return parser.parse_args(argv)


def sample(config):
	"""
	Draw `draws` configurations and write them with a manifest.

	Returns:
		path of the configurations file.
	"""
	spec, configurations = create_ensemble(config["alpha"], config["N"], config["draws"], seed=config["seed"],
										   sampler=config["sampler"], workers=config["workers"],
										   progress=config["progress"])
	out = Path(config["out"])
	if config["format"] == "jsonl":
		path = write_configurations_jsonl(configurations, out.joinpath("configurations.jsonl"), seed=spec.seed)
	else:
		path = write_configurations_csv(configurations, out.joinpath("configurations.csv"))
	write_manifest(out, "sample", spec.seed, config)
	return path


def main(argv):
	args = parse_option(argv)
	config = command_config("Sample", args, {"alpha": args.alpha, "N": args.N, "draws": args.draws,
											 "sampler": args.sampler, "format": args.format})
	print(config)
	path = sample(config)
	print(f"wrote {config['draws']} configurations to {path}")
	return EXIT_OK


def cmd_sample(argv=None) -> int:
	return run_command(main, argv)


if __name__ == "__main__":
	sys.exit(cmd_sample())
