"""Command line front end: ``validate``, ``solve``, ``query`` and ``export-dot``.

Exit codes: 0 success, 1 validation error, 2 enumeration limit, 3 IO or
parse error, 4 concept/model mismatch, 5 zero-probability evidence.
"""

from __future__ import annotations

import argparse
import sys
import time
from collections.abc import Sequence

from .bayesian_game import BayesianGame, pure_bne
from .cbg import MODES, cbg_pure_bne
from .config import DEFAULT_LIMIT, SolverConfig
from .errors import CausalGamesError, ConceptMismatch, ModelValidationError
from .extensive_form import (
    GameTree,
    backward_induction,
    efg_pure_nash,
    subgame_perfect,
    tree_to_dot,
    validate_efg,
)
from .factors import BayesNet, variable_elimination
from .graph import to_dot
from .intervention import surgery_query, truncated_query
from .maid import Maid, best_response_dynamics, conditional_eu, induce_bn, interventional_eu, maid_pure_nash
from .modelfile import CausalBayesianGame, load_model, load_strategy
from .normal_form import NormalFormGame, mixed_nash_2p, pure_nash
from .report import fmt, format_json, format_text, solve_report

CONCEPTS = {
    "nfg": ("pure-nash", "mixed-nash"),
    "efg": ("pure-nash", "spe", "backward-induction"),
    "bayesian_game": ("bne",),
    "maid": ("pure-nash", "best-response"),
    "cbg": ("bne",),
}
ALIASES = {"~": "¬", "!": "¬"}


def _solve(doc, concept: str, mode: str, config: SolverConfig):
    model = doc.model
    allowed = CONCEPTS.get(doc.model_type, ())
    if concept not in allowed:
        raise ConceptMismatch(
            f"concept {concept!r} does not apply to a {doc.model_type} model (choose from {list(allowed)})"
        )
    if isinstance(model, NormalFormGame):
        return (pure_nash if concept == "pure-nash" else mixed_nash_2p)(model, config)
    if isinstance(model, GameTree):
        fn = {"pure-nash": efg_pure_nash, "spe": subgame_perfect, "backward-induction": backward_induction}
        return fn[concept](model, config)
    if isinstance(model, BayesianGame):
        return pure_bne(model, config)
    if isinstance(model, Maid):
        if concept == "best-response":
            return best_response_dynamics(model, config=config)
        return maid_pure_nash(model, config)
    return cbg_pure_bne(model.family, model.beliefs, mode, config)


def parse_assignment(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected NODE=STATE, got {text!r}")
    node, state = text.split("=", 1)
    for alias, sym in ALIASES.items():
        if state.startswith(alias):
            state = sym + state[len(alias):]
    return node.strip(), state.strip()


def _distribution(factor) -> str:
    lines = []
    for assignment, p in factor.to_dict().items():
        label = ", ".join(f"{v.name}={s}" for v, s in zip(factor.variables, assignment))
        lines.append(f"{label}: {fmt(p)}\n")
    return "".join(lines)


def cmd_validate(args) -> str:
    doc = load_model(args.file)
    out = f"ok: {doc.model_type}\n"
    if isinstance(doc.model, GameTree):
        for w in validate_efg(doc.model).warnings:
            print(f"warning: {w}", file=sys.stderr)
    return out


def cmd_solve(args) -> str:
    doc = load_model(args.file)
    concept = args.concept or CONCEPTS.get(doc.model_type, ("?",))[0]
    config = SolverConfig(limit=args.limit)
    start = time.perf_counter()
    eqs = _solve(doc, concept, args.mode, config)
    elapsed = time.perf_counter() - start
    for key, value in eqs.flags.items():
        if key != "mode":
            print(f"flag {key}={str(value).lower()}", file=sys.stderr)
    if not eqs.equilibria:
        print("no equilibrium found", file=sys.stderr)
    if args.format == "json":
        return format_json(solve_report(doc.model, doc.model_type, eqs, elapsed if args.timing else None))
    if args.timing:
        print(f"time {elapsed:.6f}s", file=sys.stderr)
    return format_text(doc.model, eqs)


def cmd_query(args) -> str:
    doc = load_model(args.file)
    model = doc.model
    given = dict(args.given)
    do = dict(args.do)
    if isinstance(model, Maid):
        if args.strategy is None:
            raise ConceptMismatch("a MAID query needs --strategy")
        profile = load_strategy(args.strategy, model)
        if args.eu:
            if do:
                return fmt(interventional_eu(model, profile, args.eu, do, given)) + "\n"
            return fmt(conditional_eu(model, profile, args.eu, given)) + "\n"
        model = induce_bn(model, profile).bn
    elif not isinstance(model, BayesNet):
        raise ConceptMismatch(f"query needs a bn or maid model, not {doc.model_type}")
    elif args.eu:
        raise ConceptMismatch("--eu needs a maid model")
    if not args.target:
        raise ModelValidationError("query needs --target or --eu")
    if not do:
        return _distribution(variable_elimination(model, args.target, given))
    if args.route == "truncated":
        if given:
            raise ConceptMismatch("the truncated route does not take --given; use --route surgery")
        return _distribution(truncated_query(model, args.target, do))
    return _distribution(surgery_query(model, args.target, do, given))


def cmd_export_dot(args) -> str:
    doc = load_model(args.file)
    model = doc.model
    if isinstance(model, GameTree):
        return tree_to_dot(model)
    if isinstance(model, (BayesNet, Maid)):
        return to_dot(model.graph)
    if isinstance(model, CausalBayesianGame):
        return "".join(to_dot(m.graph, name) for name, m in zip(model.family.names, model.family.maids))
    raise ConceptMismatch(f"{doc.model_type} models have no graph to export")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="causalgames", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="parse and check a model file")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("solve", help="enumerate equilibria")
    s.add_argument("file")
    s.add_argument("--concept", choices=sorted({c for cs in CONCEPTS.values() for c in cs}))
    s.add_argument("--mode", choices=MODES, default="per-graph", help="causal Bayesian game reading")
    s.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="enumeration cap")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.add_argument("--timing", action="store_true")
    s.set_defaults(func=cmd_solve)

    q = sub.add_parser("query", help="conditional, interventional or expected-utility queries")
    q.add_argument("file")
    q.add_argument("--target", action="append", default=[])
    q.add_argument("--given", action="append", type=parse_assignment, default=[])
    q.add_argument("--do", action="append", type=parse_assignment, default=[])
    q.add_argument("--route", choices=("surgery", "truncated"), default="surgery")
    q.add_argument("--eu", help="utility node or agent whose expected utility to report")
    q.add_argument("--strategy", help="strategy file or corpus name (MAID queries)")
    q.set_defaults(func=cmd_query)

    d = sub.add_parser("export-dot", help="Graphviz rendering of a graph or tree")
    d.add_argument("file")
    d.set_defaults(func=cmd_export_dot)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    for stream in (sys.stdout, sys.stderr):
        if hasattr(stream, "reconfigure"):
            stream.reconfigure(encoding="utf-8")
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except CausalGamesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
