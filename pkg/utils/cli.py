"""Pieces shared by the command scripts: common flags, config resolution and exit codes."""
from argparse import ArgumentParser, ArgumentTypeError, BooleanOptionalAction
from typing import Callable, Dict, List, Optional
import sys
import traceback

from pathlib2 import Path

from utils.errors import DomainError, IntegratorBlowupError
from utils.tools import load_yaml, resolve_config, default_workers


ROOT = Path(__file__).resolve().parent.parent
CONFIG_PATH = ROOT.joinpath("config.yml")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_BLOWUP = 3


def seed_type(text: str) -> int:
	"""argparse type for --seed: SeedSequence takes nonnegative integers only."""
	try:
		seed = int(text)
	except ValueError:
		raise ArgumentTypeError(f"seed must be an integer, got {text!r}")
	if seed < 0:
		raise ArgumentTypeError(f"seed must be nonnegative, got {seed}")
	return seed


def add_common_arguments(parser: ArgumentParser) -> ArgumentParser:
	parser.add_argument("--config", type=str, default=None, help="YAML file or manifest of a previous run")
	parser.add_argument("--progress", action=BooleanOptionalAction, default=None)
	parser.add_argument("--workers", type=int, default=None)
	parser.add_argument("--seed", type=seed_type, default=None)
	parser.add_argument("-o", "--out", type=str, default=None)
	return parser


def command_config(section: str, args, flags: Dict) -> Dict:
	"""Resolve flags > --config file > config.yml[section]."""
	defaults = load_yaml(CONFIG_PATH).get(section, {})
	file_config = load_yaml(args.config) if args.config else None
	flags = dict(flags)
	flags.update({"seed": args.seed, "out": args.out, "progress": args.progress, "workers": args.workers})
	config = resolve_config(defaults, file_config, flags)
	if config.get("seed") is not None and int(config["seed"]) < 0:
		raise DomainError(f"seed must be nonnegative, got {config['seed']}")
	if config.get("workers") is None:
		config["workers"] = default_workers()
	if config.get("progress") is None:
		config["progress"] = True
	return config


def run_command(main: Callable[[List[str]], int], argv: Optional[List[str]] = None) -> int:
	"""
	Run `main(argv)` and map failures to exit codes:
	2 for bad flags or domain errors, 3 for integrator blowup, 1 for anything else.
	"""
	argv = sys.argv[1:] if argv is None else list(argv)
	try:
		return main(argv)
	except SystemExit as err:
		return err.code if isinstance(err.code, int) else EXIT_USAGE
	except DomainError as err:
		print(f"error: {err}", file=sys.stderr)
		return EXIT_USAGE
	except IntegratorBlowupError as err:
		print(f"integrator blowup: {err}", file=sys.stderr)
		return EXIT_BLOWUP
	except Exception as err:
		traceback.print_exc()
		print(f"failed: {err}", file=sys.stderr)
		return EXIT_FAILURE
