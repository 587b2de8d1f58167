"""Command-line driver: ``expq decide | qe | check-oracle | metrics``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .config import Limits, SolveConfig, Strategy, json_lines_sink
from .errors import ContractError, ParseError, ResourceExceeded
from .formula import EXISTS, FORALL, NameSupply, PrenexFormula, all_vars, neg, to_prenex
from .fragments import Fragment
from .master import decide, decide_pres_power, master_procedure
from .metrics import metrics
from .oracle import bounded_witness_search
from .parser import Dialect, parse_file, render_prenex, translate_pres_power

EXIT_VALID, EXIT_INVALID, EXIT_PARSE, EXIT_RESOURCE, EXIT_CONTRACT = 0, 1, 2, 3, 4


@dataclass
class Outcome:
    code: int
    stdout: str
    stderr: str = ""


def _config(args, fragment: Fragment, trace_fh=None) -> SolveConfig:
    limits = Limits(args.max_disjuncts, args.max_coeff_bits, args.max_seconds)
    sink = json_lines_sink(trace_fh) if trace_fh is not None else None
    return SolveConfig(fragment, Strategy.parse(args.strategy), limits, sink)


def _fragment(args, dialect: Dialect) -> Fragment:
    name = getattr(args, "fragment", "auto")
    if name == "auto":
        return Fragment.SEM if dialect is Dialect.PRESPOWER else Fragment.QF
    return Fragment.parse(name)


def _verdict(v: bool) -> Outcome:
    return Outcome(EXIT_VALID if v else EXIT_INVALID, "VALID" if v else "INVALID")


def _eliminate(f, dialect: Dialect, cfg: SolveConfig) -> PrenexFormula:
    names = NameSupply(all_vars(f))
    phi = translate_pres_power(f, names) if dialect is Dialect.PRESPOWER else to_prenex(f, names)
    from .config import Context

    return master_procedure(phi, ctx=Context(cfg, names)).prenex


def _cmd_decide(args, path: str, trace_fh) -> Outcome:
    dialect = Dialect.parse(args.dialect)
    f = parse_file(path, dialect)
    cfg = _config(args, _fragment(args, dialect), trace_fh)
    if f.free_vars():
        return Outcome(EXIT_VALID, render_prenex(_eliminate(f, dialect, cfg)), "open formula: printed the eliminated form")
    if dialect is Dialect.PRESPOWER:
        d = decide_pres_power(f, cfg)
    else:
        d = decide(f, cfg)
    out = _verdict(d.verdict)
    out.stderr = json.dumps({"counters": d.counters, "violations": d.violations}, sort_keys=True)
    return out


def _cmd_qe(args, path: str, trace_fh) -> Outcome:
    dialect = Dialect.parse(args.dialect)
    f = parse_file(path, dialect)
    cfg = _config(args, _fragment(args, dialect), trace_fh)
    return Outcome(EXIT_VALID, render_prenex(_eliminate(f, dialect, cfg)))


def _cmd_check_oracle(args, path: str, trace_fh) -> Outcome:
    dialect = Dialect.parse(args.dialect)
    f = parse_file(path, dialect)
    if f.free_vars():
        raise ContractError("check-oracle needs a sentence")
    cfg = _config(args, _fragment(args, dialect), trace_fh)
    d = decide_pres_power(f, cfg) if dialect is Dialect.PRESPOWER else decide(f, cfg)
    report = {"verdict": "VALID" if d.verdict else "INVALID", "bound": args.bound, "seed": args.seed}
    if dialect is Dialect.PRESPOWER:
        p = translate_pres_power(f)
    else:
        p = to_prenex(f)
    kinds = {k for k, _ in p.prefix}
    agree = True
    if kinds <= {EXISTS}:
        w = bounded_witness_search(p, args.bound)
        report["oracle"] = "witness" if w is not None else "no witness in box"
        report["witness"] = w
        agree = not (w is not None and not d.verdict)
    elif kinds == {FORALL}:
        # a counterexample to a universal sentence is a witness of its negation
        negated = PrenexFormula(tuple((EXISTS, v) for _, v in p.prefix), neg(p.matrix))
        w = bounded_witness_search(negated, args.bound)
        report["oracle"] = "counterexample" if w is not None else "no counterexample in box"
        report["witness"] = w
        agree = not (w is not None and d.verdict)
    else:
        report["oracle"] = "not applicable (alternating prefix)"
    report["agree"] = agree
    code = EXIT_CONTRACT if not agree else (EXIT_VALID if d.verdict else EXIT_INVALID)
    return Outcome(code, json.dumps(report, sort_keys=True))


def _cmd_metrics(args, path: str, trace_fh) -> Outcome:
    f = parse_file(path, Dialect.parse(args.dialect))
    return Outcome(EXIT_VALID, metrics(f).to_json())


_COMMANDS = {
    "decide": _cmd_decide,
    "qe": _cmd_qe,
    "check-oracle": _cmd_check_oracle,
    "metrics": _cmd_metrics,
}


def run_one(args, path: str) -> Outcome:
    trace_fh = None
    try:
        if getattr(args, "trace", None):
            trace_fh = open(args.trace, "w", encoding="utf-8")
        return _COMMANDS[args.command](args, path, trace_fh)
    except ParseError as e:
        return Outcome(EXIT_PARSE, "", f"{path}:{e}")
    except ResourceExceeded as e:
        return Outcome(EXIT_RESOURCE, "", f"resource exceeded ({e.limit}): {e}")
    except ContractError as e:
        return Outcome(EXIT_CONTRACT, "", f"contract violation: {e}")
    except OSError as e:
        return Outcome(EXIT_PARSE, "", f"cannot read input: {e}")
    finally:
        if trace_fh is not None:
            trace_fh.close()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expq", description="Decide and eliminate quantifiers in integer arithmetic with powers of two.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, solver: bool) -> None:
        p.add_argument("inputs", nargs="+", metavar="FILE")
        p.add_argument("--dialect", choices=[d.value for d in Dialect], default="presexp")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1)
        if solver:
            p.add_argument("--strategy", choices=[s.value for s in Strategy], default="exhaustive")
            p.add_argument("--max-disjuncts", type=int, default=Limits.max_disjuncts)
            p.add_argument("--max-coeff-bits", type=int, default=Limits.max_coeff_bits)
            p.add_argument("--max-seconds", type=float, default=Limits.max_seconds)
            p.add_argument("--trace", metavar="FILE")

    for name in ("decide", "qe"):
        p = sub.add_parser(name)
        common(p, True)
        p.add_argument("--fragment", choices=["qf", "sem", "auto"], default="auto")
    p = sub.add_parser("check-oracle")
    common(p, True)
    p.add_argument("--bound", type=int, default=16)
    p = sub.add_parser("metrics")
    common(p, False)
    return ap


def _run_star(item):
    args, path = item
    return run_one(args, path)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    paths = args.inputs
    if getattr(args, "trace", None) and len(paths) > 1:
        print("--trace takes a single input file", file=sys.stderr)
        return EXIT_CONTRACT
    if args.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_run_star, [(args, p) for p in paths]))
    else:
        outcomes = [run_one(args, p) for p in paths]
    for path, out in zip(paths, outcomes):
        if out.stdout:
            print(out.stdout if len(paths) == 1 else f"{path}: {out.stdout}")
        if out.stderr:
            print(out.stderr, file=sys.stderr)
    errors = [o.code for o in outcomes if o.code >= EXIT_PARSE]
    if errors:
        return max(errors)
    return max(o.code for o in outcomes)


if __name__ == "__main__":
    sys.exit(main())
