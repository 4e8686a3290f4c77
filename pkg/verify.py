from argparse import ArgumentParser
import sys

from pathlib2 import Path

from diagnostics import HilbSpec, hilb_residual, m_identity_check, ibp_identity_check, tails_report
from dynamics import DriftSpec, IntegratorConfig, stationarity_test
from kernels import (LaguerreKernelN, kernel_convergence_report, envelope_report, nystrom_operator_report,
                     trace_report)
from utils.cli import add_common_arguments, command_config, run_command, CONFIG_PATH, ROOT, EXIT_OK, EXIT_FAILURE
from utils.errors import DomainError
from utils.report import DiagnosticReport
from utils.tools import load_yaml, parse_list, write_manifest


def kernel_convergence_suite(params, config):
	report = DiagnosticReport("kernel_convergence_suite", params)
	for alpha in params["alpha_list"]:
		report.merge(kernel_convergence_report(alpha, params["N_list"], r=params["r"], n=params["n"],
											   target=params["target"], progress=config["progress"]),
					 prefix=f"alpha{alpha:g}_")
		report.merge(trace_report(alpha, params["trace_N"]), prefix=f"alpha{alpha:g}_trace_")
	return report


def envelope_suite(params, config):
	report = DiagnosticReport("envelope_suite", params)
	for alpha in params["alpha_list"]:
		report.merge(envelope_report(alpha, params["N_list"], omega=params["omega"],
									  tolerance=params["tolerance"]), prefix=f"alpha{alpha:g}_")
	return report


def tails_suite(params, config):
	return tails_report(params["alpha"], params["N_list"], params["x_list"], params["s_list"],
						omega=params["omega"], margin=params["margin"], progress=config["progress"])


def hilb_suite(params, config):
	report = DiagnosticReport("hilb_suite", params)
	for alpha in params["alpha_list"]:
		spec = HilbSpec(alpha, tuple(params["n_list"]), tuple(params["x_range"]), params["points"])
		report.merge(hilb_residual(spec), prefix=f"alpha{alpha:g}_")
		report.merge(m_identity_check(alpha, params["n_list"]), prefix=f"alpha{alpha:g}_m_identity_")
	return report


def ibp_suite(params, config):
	report = DiagnosticReport("ibp_suite", params)
	for name in params["test_functions"]:
		report.merge(ibp_identity_check(params["alpha"], params["N"], name, params["draws"], seed=config["seed"],
										workers=config["workers"], progress=config["progress"]),
					 prefix=f"{name}_")
	return report


def stationarity_suite(params, config):
	spec = DriftSpec(params["alpha"], "finite-n", N=params["N"])
	cfg = IntegratorConfig(**load_yaml(CONFIG_PATH).get("Integrator", {}))
	return stationarity_test(spec, cfg, params["T"], params["draws"], seed=config["seed"],
							 workers=config["workers"], progress=config["progress"])


def operator_bound_suite(params, config):
	return nystrom_operator_report(LaguerreKernelN(params["alpha"], params["N"]), r=params["r"],
								   nodes=params["nodes"])


# suite name -> (profile section, runner)
SUITES = {
	"kernel-convergence": ("KernelConvergence", kernel_convergence_suite),
	"lemma52": ("EdgeEnvelope", envelope_suite),
	"tails": ("Tails", tails_suite),
	"hilb": ("Hilb", hilb_suite),
	"ibp": ("Ibp", ibp_suite),
	"stationarity": ("Stationarity", stationarity_suite),
	"operator-bound": ("OperatorBound", operator_bound_suite),
}


def parse_option(argv):
	parser = ArgumentParser(description="Run a named diagnostic suite; exit 0 iff every check passes.")
	parser.add_argument("--suite", type=str, default=None, choices=sorted(SUITES) + ["all"])
	parser.add_argument("--profile", type=str, default=None, help="quick, full or a profile YAML path")
	parser.add_argument("--alpha", type=float, default=None)
	parser.add_argument("--n-list", dest="n_list", type=str, default=None, help="comma separated sizes")
	parser.add_argument("--draws", type=int, default=None)
	add_common_arguments(parser)
	return parser.parse_args(argv)


def load_profile(profile: str):
	path = ROOT.joinpath("profiles", f"{profile}.yml")
	if not path.exists():
		path = Path(profile)
	if not path.exists():
		raise DomainError(f"Unknown profile: {profile}")
	return load_yaml(path)


def suite_params(section, profile, overrides):
	"""Profile section with --alpha / --n-list / --draws applied."""
	params = dict(profile.get(section, {}))
	if overrides.get("alpha") is not None:
		if "alpha_list" in params:
			params["alpha_list"] = [overrides["alpha"]]
		else:
			params["alpha"] = overrides["alpha"]
	if overrides.get("n_list") is not None:
		key = "n_list" if "n_list" in params else "N_list"
		params[key] = parse_list(overrides["n_list"], int)
	if overrides.get("draws") is not None and "draws" in params:
		params["draws"] = overrides["draws"]
	return params


def verify(config):
	"""
	Run the selected suites, write one report JSON and its tables per suite
	plus a manifest. Returns the reports by suite name.
	"""
	suite = config["suite"]
	if suite != "all" and suite not in SUITES:
		raise DomainError(f"Unknown suite: {suite}")
	names = sorted(SUITES) if suite == "all" else [suite]
	profile = load_profile(config["profile"])
	out = Path(config["out"])
	config.setdefault("seed", 0)

	reports = {}
	for name in names:
		section, runner = SUITES[name]
		params = suite_params(section, profile, config)
		config.setdefault("suites", {})[name] = params
		report = runner(params, config)
		report.to_json(out.joinpath(f"{name}.json"))
		report.write_tables(out.joinpath("tables"))
		print(f"{name}: {report.verdict}")
		reports[name] = report
	write_manifest(out, "verify", config["seed"], config)
	return reports


def main(argv):
	args = parse_option(argv)
	config = command_config("Verify", args, {"suite": args.suite, "profile": args.profile, "alpha": args.alpha,
											 "n_list": args.n_list, "draws": args.draws})
	print(config)
	reports = verify(config)
	return EXIT_OK if all(r.passed for r in reports.values()) else EXIT_FAILURE


def cmd_verify(argv=None) -> int:
	return run_command(main, argv)


if __name__ == "__main__":
	sys.exit(cmd_verify())
