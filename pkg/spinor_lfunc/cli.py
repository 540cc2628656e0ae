"""
Command-line driver.

Exit codes: 0 when every check passes, 1 when at least one coefficient
mismatches (or a sweep instance fails), 2 on invalid input.
"""

import argparse
import json
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, TextIO, Union

from .characters import (CharacterGroup, DominantWeight, NormalizationExponent, SimilitudeFamily, char_so_even,
                         char_sp, freudenthal_char, gl_character, similitude_char)
from .config_manager import ConfigManager, get_config_manager
from .data_models import PASS, RunConfig, SweepReport, VerificationReport
from .error_handler import (ErrorContext, InvalidConfiguration, SingularAlternant, SpinorLFuncError,
                            handle_error)
from .identity import sweep, verify_case_B_factorization, verify_symalg, verify_unramified_identity
from .lfactors import CaseFamily, IdentityCase, SecondRep, l_factor, rankin_selberg_L, second_L
from .logging_system import LogCategory, get_logging_system, initialize_logging
from .parameters import case_tasks, grid_tasks, random_case_a, random_case_b, random_symalg_instance, symalg_task
from .rational import format_rational, parse_matrix_literal, parse_rational_list, to_fraction
from .root_data import GroupKind
from .satake import UnramifiedData, satake_from_data, satake_gl, satake_quasisplit

logger = get_logging_system().get_logger(LogCategory.SYSTEM)

EXIT_PASS = 0
EXIT_MISMATCH = 1
EXIT_INVALID = 2

CASES = [c.value for c in CaseFamily]


class UsageError(Exception):
    """argparse rejected the command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default=None, help="output format")
    common.add_argument("--output", default=None, help="write the result to this path")
    return common


def _run_options() -> argparse.ArgumentParser:
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument("--config", default=None, help="run configuration JSON file")
    options.add_argument("--order", type=int, default=None, help="truncation order R")
    options.add_argument("--seed", type=int, default=None, help="seed for random parameters")
    options.add_argument("--jobs", type=int, default=None, help="concurrent instances (env SPINOR_LFUNC_JOBS)")
    return options


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinor_lfunc",
                     description="Exact verification of unramified GSpin x GL Rankin-Selberg identities.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    common, run = _common_options(), _run_options()

    verify = sub.add_parser("verify", parents=[common, run], help="verify one identity")
    verify.add_argument("--case", choices=CASES)
    verify.add_argument("--n", type=int)
    verify.add_argument("--m", type=int)
    verify.add_argument("--count", type=int, default=None, help="number of consecutive seeds")
    verify.add_argument("--chi0", help="chi0 of pi (case A) or of sigma (case B)")
    verify.add_argument("--chi", help="comma-separated chi_i of pi (case A) or sigma (case B)")
    verify.add_argument("--tau", help="comma-separated Satake eigenvalues of tau")
    verify.add_argument("--omega", help="central character value (case B)")
    verify.add_argument("--a", help="square-class datum of the quasi-split form")
    verify.add_argument("--alpha")
    verify.add_argument("--beta")

    sweep_parser = sub.add_parser("sweep", parents=[common, run], help="run a configured grid of checks")
    sweep_parser.add_argument("--grid", default=None, help="grid name from defaults.json")

    char = sub.add_parser("char", parents=[common], help="print one character value")
    char.add_argument("--group", required=True, choices=["gl", "sp", "so", "gsp", "gso"])
    char.add_argument("--rank", type=int, required=True)
    char.add_argument("--weight", required=True, help="comma-separated dominant weight")
    char.add_argument("--point", required=True, help="comma-separated torus coordinates")
    char.add_argument("--mu", default=None, help="similitude factor (gsp, gso)")
    char.add_argument("--method", choices=["alternant", "freudenthal"], default="alternant")

    lfactor = sub.add_parser("lfactor", parents=[common], help="print L-factor coefficients")
    lfactor.add_argument("--matrix", required=True, help="rows separated by ';', entries by ','")
    lfactor.add_argument("--tensor", default=None, help="second matrix: L(s, M (x) N)")
    lfactor.add_argument("--square", choices=[r.value for r in SecondRep], default=None,
                         help="L(2s, M, R (x) omega) instead")
    lfactor.add_argument("--omega", default="1")
    lfactor.add_argument("--order", type=int, default=None)

    satake = sub.add_parser("satake", parents=[common], help="build and validate a Satake parameter")
    satake.add_argument("--group", required=True, choices=["gl", "gspin-odd", "gspin-even", "gspin-quasi-split"])
    satake.add_argument("--chi0", default="1")
    satake.add_argument("--chi", required=True)
    satake.add_argument("--a")
    satake.add_argument("--alpha")
    satake.add_argument("--beta")

    symalg = sub.add_parser("symalg", parents=[common], help="one symmetric-algebra decomposition check")
    symalg.add_argument("--family", choices=[f.value for f in SimilitudeFamily], default="gsp")
    symalg.add_argument("--m", type=int, required=True)
    symalg.add_argument("--n", type=int, required=True)
    symalg.add_argument("--r", type=int, required=True)
    symalg.add_argument("--seed", type=int, default=None)
    symalg.add_argument("--count", type=int, default=1)
    symalg.add_argument("--jobs", type=int, default=None)
    return parser


# Run configuration

def _rational_strings(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    return [format_rational(x) for x in parse_rational_list(text)]


def _explicit_parameters(args: argparse.Namespace) -> Dict[str, Any]:
    if args.chi is None and args.tau is None:
        return {}
    data: Dict[str, Any] = {"chi0": format_rational(args.chi0 or "1"), "chi": _rational_strings(args.chi) or []}
    for name in ("a", "alpha", "beta"):
        if getattr(args, name) is not None:
            data[name] = format_rational(getattr(args, name))
    parameters: Dict[str, Any] = {"tau": _rational_strings(args.tau) or []}
    if args.case and args.case.startswith("b-"):
        parameters["sigma"] = data
        parameters["omega"] = format_rational(args.omega or data["chi0"])
    else:
        parameters["pi"] = data
    return parameters


def run_config_from_args(args: argparse.Namespace, manager: ConfigManager) -> RunConfig:
    """Merge --config (if any) with explicit flags, then validate through the run-config schema."""
    data: Dict[str, Any] = {}
    if args.config:
        data = {k: v for k, v in manager.load_run_config(args.config).to_dict().items() if v is not None}
        if data["subcommand"] != args.command:
            raise InvalidConfiguration(f"configuration is for {data['subcommand']!r}, not {args.command!r}")
    data["subcommand"] = args.command
    overrides = {
        "order": args.order, "seed": args.seed, "jobs": args.jobs,
        "output": args.output, "format": args.format,
    }
    if args.command == "verify":
        overrides.update(case=args.case, n=args.n, m=args.m, count=args.count)
        parameters = _explicit_parameters(args)
        if parameters:
            overrides.update(parameters=parameters, source="explicit")
    else:
        overrides.update(grid=args.grid)
    data.update({k: v for k, v in overrides.items() if v is not None})

    defaults = manager.load_defaults()
    if args.command == "sweep":
        data.setdefault("grid", "acceptance")
        data.setdefault("order", manager.sweep_grid(data["grid"]).get("order", defaults["order"]))
    else:
        for key in ("case", "n", "m"):
            if key not in data:
                raise InvalidConfiguration(f"verify needs --{key}")
        if data.get("source", "random") == "random":
            data.setdefault("seed", defaults["seed"])
    return manager.load_run_config(data)


# Execution

def _verify_one(case: IdentityCase, config: RunConfig, seed: Optional[int]) -> VerificationReport:
    params = config.parameters
    if config.source == "explicit":
        tau = [to_fraction(x) for x in params.get("tau", [])]
        if case.is_case_a:
            pi_data = UnramifiedData.from_dict(params.get("pi", {}))
            return verify_unramified_identity(case, pi_data, UnramifiedData(1, tuple(tau)), config.order)
        sigma = UnramifiedData.from_dict(params.get("sigma", {}))
        omega = to_fraction(params.get("omega", sigma.chi0))
        return verify_case_B_factorization(case, sigma, omega, tau, config.order)
    if case.is_case_a:
        pi_data, tau_data = random_case_a(case, seed)
        report = verify_unramified_identity(case, pi_data, tau_data, config.order)
    else:
        sigma, omega, tau = random_case_b(case, seed)
        report = verify_case_B_factorization(case, sigma, omega, tau, config.order)
    report.parameters["seed"] = seed
    return report


def execute_verify(config: RunConfig) -> Union[VerificationReport, SweepReport]:
    case = IdentityCase(CaseFamily(config.case), config.n, config.m)
    if config.source == "explicit" or config.count == 1:
        return _verify_one(case, config, config.seed)
    seeds = range(config.seed, config.seed + config.count)
    return sweep(case_tasks(case, seeds, config.order), config.order, config.jobs, grid=f"verify:{case.key}")


def execute_sweep(config: RunConfig, manager: ConfigManager) -> SweepReport:
    tasks = grid_tasks(manager.sweep_grid(config.grid), base_seed=config.seed, order=config.order)
    return sweep(tasks, config.order, config.jobs, grid=config.grid)


def execute_symalg(args: argparse.Namespace, manager: ConfigManager) -> Union[VerificationReport, SweepReport]:
    seed = args.seed if args.seed is not None else manager.load_defaults()["seed"]
    if args.count < 1:
        raise InvalidConfiguration("count must be at least 1")
    if args.count == 1:
        report = verify_symalg(random_symalg_instance(args.family, args.m, args.n, args.r, seed))
        report.parameters["seed"] = seed
        return report
    tasks = [symalg_task(args.family, args.m, args.n, args.r, s) for s in range(seed, seed + args.count)]
    jobs = args.jobs or manager.default_jobs()
    return sweep(tasks, args.r, jobs, grid=f"symalg:{args.family}")


def execute_char(args: argparse.Namespace) -> Dict[str, Any]:
    weight = tuple(int(k) for k in args.weight.split(",") if k.strip())
    if len(weight) > args.rank:
        raise ValueError(f"weight {weight} has more than {args.rank} parts")
    weight = weight + (0,) * (args.rank - len(weight))
    DominantWeight(weight)
    point = parse_rational_list(args.point)
    if len(point) != args.rank:
        raise ValueError(f"point has {len(point)} coordinates, expected {args.rank}")

    method = args.method
    if args.group in ("gsp", "gso"):
        if args.mu is None:
            raise ValueError(f"--mu is required for {args.group}")
        value = similitude_char(SimilitudeFamily(args.group), weight, point, to_fraction(args.mu),
                                NormalizationExponent.HALF)
        method = "weights"
    elif args.group == "gl":
        value = gl_character(weight, point)
    else:
        group = CharacterGroup(args.group)
        value = None
        if method == "alternant":
            try:
                value = char_sp(weight, point) if group is CharacterGroup.SP else char_so_even(weight, point)
            except SingularAlternant:
                logger.warning("alternant denominator vanishes at this point; using the weight table")
                method = "freudenthal"
        if value is None:
            value = freudenthal_char(group, weight, point)
    return {
        "group": args.group,
        "weight": list(weight),
        "point": [format_rational(x) for x in point],
        "method": method,
        "value": format_rational(value),
    }


def execute_lfactor(args: argparse.Namespace, manager: ConfigManager) -> Dict[str, Any]:
    order = args.order if args.order is not None else manager.load_defaults()["order"]
    m = parse_matrix_literal(args.matrix)
    if args.square:
        series = second_L(m, to_fraction(args.omega), SecondRep(args.square), order)
        label = f"L(2s, M, {args.square} x omega)"
    elif args.tensor:
        series = rankin_selberg_L(m, parse_matrix_literal(args.tensor), order)
        label = "L(s, M x N)"
    else:
        series = l_factor(m, order)
        label = "L(s, M)"
    return {"series": label, "order": order, "coefficients": series.coefficients_as_strings()}


def execute_satake(args: argparse.Namespace) -> Dict[str, Any]:
    chi = parse_rational_list(args.chi)
    if args.group == "gl":
        return {"parameter": satake_gl(chi).to_dict()}
    data = UnramifiedData(chi0=to_fraction(args.chi0), chi=tuple(chi),
                          a=args.a, alpha=args.alpha, beta=args.beta)
    if args.group == "gspin-quasi-split":
        if data.a is None:
            raise ValueError("gspin-quasi-split needs --a, --alpha and --beta")
        full, reduced = satake_quasisplit(data)
        return {"parameter": full.to_dict(), "reduced": reduced.to_dict()}
    kind = GroupKind.gspin_odd(len(chi)) if args.group == "gspin-odd" else GroupKind.gspin_even(len(chi))
    return {"parameter": satake_from_data(kind, data).to_dict()}


# Output

def _report_text(report: Dict[str, Any]) -> str:
    if report.get("check") == "sweep":
        lines = [f"sweep {report['grid']} (order {report['order']}): {report['counts']}"]
        for key, value in sorted(report.get("summary", {}).items()):
            lines.append(f"  {key}: {value}")
        for entry in report["entries"]:
            detail = f"  {entry['key']}: {entry['verdict']}"
            if entry.get("error"):
                detail += f" ({entry['error']})"
            lines.append(detail)
        lines.append(f"verdict: {report['verdict']}")
        return "\n".join(lines)
    case = report["case"]
    title = case.get("case") or case.get("family")
    lines = [f"{report['check']} {title} {json.dumps(case, sort_keys=True)}",
             f"normalization exponent: {report['normalization_exponent']}"]
    for c in report["coefficients"]:
        mark = "ok" if c["equal"] else "MISMATCH"
        lines.append(f"  [{c['index']}] lhs={c['lhs']} rhs={c['rhs']} {mark}")
    for note in report.get("notes", []):
        lines.append(f"  note: {note}")
    lines.append(f"verdict: {report['verdict']}")
    return "\n".join(lines)


def _plain_text(command: str, result: Dict[str, Any]) -> str:
    if command == "char":
        return result["value"]
    if command == "lfactor":
        return ", ".join(result["coefficients"])
    lines = []
    for label in ("parameter", "reduced"):
        if label in result:
            param = result[label]
            lines.append(f"{label}: {param['group']} mu={param['mu']}")
            lines.extend("  " + " ".join(row) for row in param["matrix"])
    return "\n".join(lines)


def emit(command: str, result: Dict[str, Any], output_format: str, output: Optional[str],
         stdout: TextIO) -> None:
    if output_format == "json":
        text = json.dumps(result, indent=2, sort_keys=True)
    elif "verdict" in result:
        text = _report_text(result)
    else:
        text = _plain_text(command, result)
    if output:
        os.makedirs(os.path.dirname(os.path.abspath(output)), exist_ok=True)
        with open(output, 'w', encoding='utf-8') as f:
            f.write(text + "\n")
        summary = f"{command}: {result['verdict']}" if "verdict" in result else command
        stdout.write(f"{summary} (written to {output})\n")
    else:
        stdout.write(text + "\n")


def _usage_error(message: str, stderr: TextIO, manager: Optional[ConfigManager]) -> int:
    stderr.write(f"error: {message}\n")
    if manager is not None:
        schema = manager.get_schema("run-config")
        if schema:
            stderr.write("run configuration schema:\n")
            stderr.write(json.dumps(schema, indent=2, sort_keys=True) + "\n")
    return EXIT_INVALID


def run(argv: Sequence[str], stdout: TextIO = sys.stdout, stderr: TextIO = sys.stderr) -> int:
    parser = build_parser()
    manager = get_config_manager()
    try:
        args = parser.parse_args(list(argv))
    except UsageError as e:
        return _usage_error(str(e), stderr, manager)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command is None:
        parser.print_help(stderr)
        return EXIT_INVALID

    try:
        if args.command in ("verify", "sweep"):
            config = run_config_from_args(args, manager)
            if args.command == "verify":
                result = execute_verify(config).to_dict()
            else:
                result = execute_sweep(config, manager).to_dict()
            output_format, output = config.output_format, config.output
        else:
            if args.command == "symalg":
                result = execute_symalg(args, manager).to_dict()
            elif args.command == "char":
                result = execute_char(args)
            elif args.command == "lfactor":
                result = execute_lfactor(args, manager)
            else:
                result = execute_satake(args)
            default_format = "text" if args.command in ("char", "lfactor") else "json"
            output_format, output = args.format or default_format, args.output
    except InvalidConfiguration as e:
        handle_error(e, ErrorContext(operation=args.command), "invalid_parameters")
        return _usage_error(str(e), stderr, manager)
    except (SpinorLFuncError, ValueError, TypeError, ZeroDivisionError) as e:
        handle_error(e, ErrorContext(operation=args.command))
        stderr.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_INVALID

    emit(args.command, result, output_format, output, stdout)
    if "verdict" not in result:
        return EXIT_PASS
    return EXIT_PASS if result["verdict"] == PASS else EXIT_MISMATCH


def main() -> None:
    initialize_logging(log_dir=get_config_manager().log_dir())
    sys.exit(run(sys.argv[1:]))
