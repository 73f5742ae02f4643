#!/usr/bin/env python3
"""
nmlab command line

Every stage of the pipeline is a subcommand:
1. Evaluate formulas, theorems and consequences in an Nmatrix
2. Compute unary clones and decide or search monadicity
3. Run counter machines and compile them to Nmatrices
4. Encode traces, refute non-theorems and search for theorems
5. Monadify an Nmatrix and verify separator sets on it

Each run prints a RunReport (text, json or yaml) ending with the verdict.
Exit codes: 0 for a definite answer, 2 for UNKNOWN or an exhausted cap,
1 for errors.
"""

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import yaml

from nmlab import __version__
from nmlab.config_utils import configure_logging, get_setting, load_environment
from nmlab.errors import NmlabError, ResourceLimitError
from nmlab.formula_core import Formula, parse_formula, subformula_dag
from nmlab.machine import CounterMachine, configurations_from, load_machine, run
from nmlab.monadicity import (
    Verdict,
    decide_monadicity_matrix,
    search_separators,
    unary_clone,
    verify_separator_set,
)
from nmlab.monadify import build_monadify, check_monadify_preconditions, witness_separators_from_theorem
from nmlab.reduction import build_nmatrix, falsify, search_theorems, seq
from nmlab.semantics import (
    Nmatrix,
    dump_nmatrix,
    expressed_multifunction,
    find_countermodel,
    image,
    is_theorem,
    load_nmatrix,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNKNOWN = 2

FORMATS = ("text", "json", "yaml")


@dataclass
class RunReport:
    """
    Result of one CLI run.

    Fields are emitted in a fixed order: command, the payload in insertion
    order, wall time, and the verdict last.
    """

    command: str
    verdict: str = "ERROR"
    payload: Dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0
    exit_code: int = EXIT_ERROR

    def as_dict(self) -> Dict[str, Any]:
        document: Dict[str, Any] = {"command": self.command}
        document.update(self.payload)
        document["wall_time"] = round(self.wall_time, 6)
        document["verdict"] = self.verdict
        return document

    def render(self, fmt: str = "text") -> str:
        document = self.as_dict()
        if fmt == "json":
            return json.dumps(document, indent=2, ensure_ascii=False)
        if fmt == "yaml":
            return yaml.safe_dump(document, sort_keys=False, allow_unicode=True).rstrip("\n")
        lines = []
        for key, value in document.items():
            if isinstance(value, dict):
                lines.append(f"{key}:")
                lines.extend(f"  {k}: {v}" for k, v in value.items())
            elif isinstance(value, (list, tuple)):
                lines.append(f"{key}:")
                lines.extend(f"  - {item}" for item in value)
            else:
                lines.append(f"{key}: {value}")
        return "\n".join(lines)


Outcome = Tuple[str, Dict[str, Any], int]


# === Input helpers ===
def _fmt_set(nmatrix: Nmatrix, values) -> str:
    return "{" + ",".join(nmatrix.sorted_values(values)) + "}"


def _load_target(args: argparse.Namespace) -> Nmatrix:
    """The Nmatrix named by --matrix or compiled from --machine, monadified on request."""
    if getattr(args, "machine", None):
        nmatrix = build_nmatrix(load_machine(args.machine))
    elif getattr(args, "matrix", None):
        nmatrix = load_nmatrix(args.matrix)
    else:
        raise NmlabError("one of --matrix/--nmatrix or --machine is required")
    if getattr(args, "monadify", False):
        nmatrix = build_monadify(nmatrix)
    return nmatrix


def _load_machine(args: argparse.Namespace) -> CounterMachine:
    if not args.machine:
        raise NmlabError("--machine is required")
    return load_machine(args.machine)


def _parse(nmatrix: Nmatrix, text: str) -> Formula:
    return parse_formula(text, nmatrix.signature)


def _pair_key(pair: Tuple[str, str]) -> str:
    return f"{pair[0]}|{pair[1]}"


def _parse_assignment(text: str) -> Dict[str, str]:
    """'p=a,q=b' -> {'p': 'a', 'q': 'b'}."""
    assignment = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        if "=" not in item:
            raise NmlabError(f"expected name=value in --assign, got '{item}'")
        name, value = (side.strip() for side in item.split("=", 1))
        assignment[name] = value
    return assignment


def _parse_configurations(text: str):
    """'qinit,0;q1,1' -> configurations."""
    items = []
    for chunk in filter(None, (part.strip() for part in text.split(";"))):
        state, *counters = (token.strip() for token in chunk.split(","))
        try:
            items.append((state,) + tuple(int(c) for c in counters))
        except ValueError as exc:
            raise NmlabError(f"bad configuration '{chunk}': {exc}") from exc
    return configurations_from(items)


# === Subcommands ===
def cmd_eval(args: argparse.Namespace) -> Outcome:
    nmatrix = _load_target(args)
    formula = _parse(nmatrix, args.formula)
    payload: Dict[str, Any] = {"nmatrix": nmatrix.name, "formula": formula.text}
    if args.assign:
        assignment = _parse_assignment(args.assign)
        payload["assignment"] = assignment
        payload["image"] = _fmt_set(nmatrix, image(nmatrix, formula, assignment))
    else:
        function = expressed_multifunction(nmatrix, formula)
        payload["variables"] = list(function.variables)
        payload["table"] = {",".join(inputs) or "()": _fmt_set(nmatrix, values)
                            for inputs, values in function.table}
    return "EVALUATED", payload, EXIT_OK


def cmd_theorem(args: argparse.Namespace) -> Outcome:
    nmatrix = _load_target(args)
    formula = _parse(nmatrix, args.formula)
    payload: Dict[str, Any] = {"nmatrix": nmatrix.name, "formula": formula.text}
    if is_theorem(nmatrix, formula):
        return "THEOREM", payload, EXIT_OK
    if args.machine and not args.monadify and not subformula_dag(formula).variables:
        refutation = falsify(load_machine(args.machine), formula)
        if refutation is not None:
            payload["valuation"] = refutation.valuation.label
            payload["value"] = refutation.value
            payload["rule"] = refutation.rule
    return "NOT_THEOREM", payload, EXIT_OK


def cmd_consequence(args: argparse.Namespace) -> Outcome:
    nmatrix = _load_target(args)
    premises = [_parse(nmatrix, text) for text in args.premise or []]
    conclusion = _parse(nmatrix, args.conclusion)
    payload: Dict[str, Any] = {
        "nmatrix": nmatrix.name,
        "premises": [f.text for f in premises],
        "conclusion": conclusion.text,
    }
    countermodel = find_countermodel(nmatrix, premises, conclusion, args.cap)
    if countermodel is None:
        return "VALID", payload, EXIT_OK
    payload["countermodel"] = {node.text: value for node, value in countermodel.as_dict().items()}
    return "INVALID", payload, EXIT_OK


def cmd_clone(args: argparse.Namespace) -> Outcome:
    nmatrix = _load_target(args)
    clone = unary_clone(nmatrix)
    functions = sorted(clone.functions.items(), key=lambda item: (item[1].size, item[1].text))
    payload = {
        "nmatrix": nmatrix.name,
        "values": list(nmatrix.values),
        "size": len(clone),
        "rounds": clone.rounds,
        "functions": {"(" + ",".join(fn) + ")": witness.text for fn, witness in functions},
    }
    return "CLONE", payload, EXIT_OK


def cmd_monadic(args: argparse.Namespace) -> Outcome:
    nmatrix = _load_target(args)
    budget = args.budget if args.budget is not None else get_setting("monadicity", "default_budget", 7)
    prune = get_setting("monadicity", "prune", True) and not args.no_prune
    jobs = args.jobs if args.jobs is not None else get_setting("monadicity", "jobs", 1)
    if nmatrix.is_deterministic():
        report = decide_monadicity_matrix(nmatrix)
    else:
        report = search_separators(nmatrix, budget, prune=prune, jobs=jobs)
    payload = {
        "nmatrix": nmatrix.name,
        "certified": report.certified,
        "budget": report.budget,
        "formulas_enumerated": report.formulas_enumerated,
        "witnesses": {_pair_key(pair): f.text for pair, f in report.witnesses.items()},
        "uncovered": [_pair_key(pair) for pair in report.uncovered],
    }
    code = EXIT_UNKNOWN if report.verdict is Verdict.UNKNOWN else EXIT_OK
    return report.verdict.value, payload, code


def cmd_run_machine(args: argparse.Namespace) -> Outcome:
    machine = _load_machine(args)
    max_steps = args.max_steps or get_setting("machine", "default_max_steps", 10000)
    trace = run(machine, max_steps)
    payload: Dict[str, Any] = {
        "counters": machine.n,
        "max_steps": max_steps,
        "steps": len(trace) - 1,
        "halted": trace.halted,
        "last": str(trace.last),
    }
    if args.show_trace:
        payload["trace"] = [str(cfg) for cfg in trace.configurations]
    return ("HALTED", payload, EXIT_OK) if trace.halted else ("UNKNOWN", payload, EXIT_UNKNOWN)


def _counts(nmatrix: Nmatrix) -> Dict[str, Any]:
    return {
        "values": len(nmatrix.values),
        "designated": len(nmatrix.designated),
        "connectives": len(nmatrix.interpretations),
    }


def cmd_compile(args: argparse.Namespace) -> Outcome:
    machine = _load_machine(args)
    nmatrix = build_nmatrix(machine)
    if args.monadify:
        nmatrix = build_monadify(nmatrix)
    payload: Dict[str, Any] = {"states": len(machine.states), "counters": machine.n}
    payload.update(_counts(nmatrix))
    if args.output and not args.lazy:
        payload["output"] = str(dump_nmatrix(nmatrix, args.output))
    return "COMPILED", payload, EXIT_OK


def cmd_monadify(args: argparse.Namespace) -> Outcome:
    args.monadify = False
    base = _load_target(args)
    monadified = build_monadify(base)
    payload: Dict[str, Any] = {"base": base.name, "preconditions": check_monadify_preconditions(base)}
    payload.update(_counts(monadified))
    if args.output:
        payload["output"] = str(dump_nmatrix(monadified, args.output))
    return "MONADIFIED", payload, EXIT_OK


def cmd_encode_trace(args: argparse.Namespace) -> Outcome:
    machine = _load_machine(args)
    if args.configs:
        configurations = _parse_configurations(args.configs)
        halted = None
    else:
        trace = run(machine, args.max_steps or get_setting("machine", "default_max_steps", 10000))
        configurations, halted = trace.configurations, trace.halted
    formula = seq(configurations)
    payload = {
        "configurations": [str(cfg) for cfg in configurations],
        "halted": halted,
        "subformulas": len(subformula_dag(formula).nodes),
        "size": formula.size,
        "formula": formula.text,
    }
    return "ENCODED", payload, EXIT_OK


def cmd_falsify(args: argparse.Namespace) -> Outcome:
    machine = _load_machine(args)
    formula = _parse(build_nmatrix(machine), args.formula)
    refutation = falsify(machine, formula)
    payload: Dict[str, Any] = {"formula": formula.text}
    if refutation is None:
        return "THEOREM", payload, EXIT_OK
    payload.update(valuation=refutation.valuation.label, value=refutation.value, rule=refutation.rule)
    return "REFUTED", payload, EXIT_OK


def cmd_verify_separators(args: argparse.Namespace) -> Outcome:
    if args.from_theorem:
        args.monadify = False
        base = _load_target(args)
        nmatrix = build_monadify(base)
        formulas = witness_separators_from_theorem(base, _parse(base, args.from_theorem))
    else:
        nmatrix = _load_target(args)
        if not args.separator:
            raise NmlabError("give --separator at least once, or --from-theorem")
        formulas = [_parse(nmatrix, text) for text in args.separator]
    report = verify_separator_set(nmatrix, formulas)
    payload = {
        "nmatrix": nmatrix.name,
        "separators": [f.text for f in formulas],
        "pairs": len(report.coverage) + len(report.uncovered),
        "covered": len(report.coverage),
        "uncovered": [_pair_key(pair) for pair in report.uncovered],
    }
    return ("COVERED" if report.ok else "NOT_COVERED"), payload, EXIT_OK


def cmd_search_theorems(args: argparse.Namespace) -> Outcome:
    nmatrix = _load_target(args)
    bound = args.max_subformulas or get_setting("reduction", "theorem_search_max_subformulas", 9)
    cap = args.cap or get_setting("reduction", "theorem_search_cap", None)
    report = search_theorems(nmatrix, bound, cap=cap, prune=not args.no_prune)
    payload = {
        "nmatrix": nmatrix.name,
        "max_subformulas": report.max_subformulas,
        "candidates": report.candidates,
        "pruned": report.pruned,
        "theorems": [f.text for f in report.theorems],
    }
    code = EXIT_OK if report.theorems else EXIT_UNKNOWN
    return report.verdict.value, payload, code


COMMANDS: Dict[str, Callable[[argparse.Namespace], Outcome]] = {
    "eval": cmd_eval,
    "theorem": cmd_theorem,
    "consequence": cmd_consequence,
    "clone": cmd_clone,
    "monadic": cmd_monadic,
    "run-machine": cmd_run_machine,
    "compile": cmd_compile,
    "monadify": cmd_monadify,
    "encode-trace": cmd_encode_trace,
    "falsify": cmd_falsify,
    "verify-separators": cmd_verify_separators,
    "search-theorems": cmd_search_theorems,
}


# === Argument parsing ===
def _add_target(parser: argparse.ArgumentParser, monadify: bool = True) -> None:
    parser.add_argument("--matrix", "--nmatrix", dest="matrix", help="Nmatrix file (.nmx)")
    parser.add_argument("--machine", help="counter machine file (.cm), compiled in process")
    if monadify:
        parser.add_argument("--monadify", action="store_true", help="apply M -> M_m first")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nmlab", description="Finite Nmatrices, monadicity and counter machines")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--format", choices=FORMATS, default=None, help="report format")
    parser.add_argument("--log-level", default=None, help="override the configured log level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="expressed multi-function of a formula")
    _add_target(p)
    p.add_argument("--formula", required=True)
    p.add_argument("--assign", help="only one input, e.g. p=a,q=b")

    p = sub.add_parser("theorem", help="is the formula designated by every valuation")
    _add_target(p)
    p.add_argument("--formula", required=True)

    p = sub.add_parser("consequence", help="check premises |- conclusion")
    _add_target(p)
    p.add_argument("--premise", action="append")
    p.add_argument("--conclusion", required=True)
    p.add_argument("--cap", type=int, help="max variable assignments (default NMLAB_CAP or config)")

    p = sub.add_parser("clone", help="unary clone of a deterministic matrix")
    _add_target(p)

    p = sub.add_parser("monadic", help="decide or search monadicity")
    _add_target(p)
    p.add_argument("--budget", type=int, help="max formula node count for the search")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--jobs", type=int)

    p = sub.add_parser("run-machine", help="run a counter machine")
    p.add_argument("--machine", required=True)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--show-trace", action="store_true")

    p = sub.add_parser("compile", help="compile a counter machine to its Nmatrix")
    p.add_argument("--machine", required=True)
    p.add_argument("--monadify", action="store_true")
    p.add_argument("--output", help="write the Nmatrix file here")
    p.add_argument("--lazy", action="store_true", help="only report counts")

    p = sub.add_parser("monadify", help="build M_m")
    _add_target(p, monadify=False)
    p.add_argument("--output")

    p = sub.add_parser("encode-trace", help="encode a run or a configuration list as a formula")
    p.add_argument("--machine", required=True)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--configs", help="explicit configurations, e.g. 'qinit,0;q1,1'")

    p = sub.add_parser("falsify", help="named valuation refuting a closed formula")
    p.add_argument("--machine", required=True)
    p.add_argument("--formula", required=True)

    p = sub.add_parser("verify-separators", help="check a set of monadic separators")
    _add_target(p)
    p.add_argument("--separator", action="append")
    p.add_argument("--from-theorem", help="theorem of the base; verifies {p} + {f_a(p, theorem)} on M_m")

    p = sub.add_parser("search-theorems", help="bounded search for closed theorems")
    _add_target(p)
    p.add_argument("--max-subformulas", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--no-prune", action="store_true")
    return parser


# === Main ===
def dispatch(args: argparse.Namespace) -> RunReport:
    """Run one parsed command and wrap the outcome in a RunReport."""
    report = RunReport(command=args.command)
    start = time.perf_counter()
    try:
        report.verdict, report.payload, report.exit_code = COMMANDS[args.command](args)
    except ResourceLimitError as e:
        logger.warning(f"{args.command}: {e}")
        report.verdict, report.payload, report.exit_code = "UNKNOWN", {"reason": str(e)}, EXIT_UNKNOWN
    except (NmlabError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        report.verdict, report.payload, report.exit_code = "ERROR", {"error": str(e)}, EXIT_ERROR
    report.wall_time = time.perf_counter() - start
    return report


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``nmlab`` script."""
    load_environment()
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    logger.debug(f"nmlab {__version__}: {args.command}")
    report = dispatch(args)
    print(report.render(args.format or get_setting("reports", "default_format", "text")))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
