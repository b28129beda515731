"""Solve every bundled deterrence model and print the headline numbers."""

from __future__ import annotations

import argparse

from causalgames.bayesian_game import pure_bne
from causalgames.cbg import cbg_pure_bne
from causalgames.config import SolverConfig
from causalgames.extensive_form import backward_induction, efg_pure_nash, subgame_perfect, to_strategic_form
from causalgames.factors import variable_elimination
from causalgames.intervention import surgery_query, truncated_query
from causalgames.maid import conditional_eu, interventional_eu, maid_pure_nash
from causalgames.modelfile import load_model, load_strategy
from causalgames.normal_form import mixed_nash_2p, pure_nash
from causalgames.report import fmt, format_text


def section(title: str) -> None:
    print(f"\n== {title}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--limit", type=int, default=10**7)
    config = SolverConfig(limit=parser.parse_args().limit)

    g = load_model("table1_nfg").model
    section("normal form: pure and mixed Nash")
    print(format_text(g, pure_nash(g, config)), end="")
    print(format_text(g, mixed_nash_2p(g, config)), end="")

    t3 = load_model("efg_example3").model
    section("shared information set: strategic form equals the matrix game")
    print("identical payoffs:", bool((to_strategic_form(t3).payoffs == g.payoffs).all()))

    t4 = load_model("efg_example4").model
    section("perfect information: Nash vs subgame perfect")
    print(format_text(t4, efg_pure_nash(t4, config)), end="")
    print("spe:", format_text(t4, subgame_perfect(t4, config)), end="")
    print("backward induction:", format_text(t4, backward_induction(t4, config)), end="")

    b = load_model("bayes_example5").model
    section("Bayesian game")
    print(format_text(b, pure_bne(b, config)), end="")

    bn = load_model("deter_causal").model
    section("observational vs interventional")
    see = variable_elimination(bn, ["X_A"], {"X_D": "d"})[{"X_A": "a"}]
    do_t = truncated_query(bn, ["X_A"], {"X_D": "d"})[{"X_A": "a"}]
    do_s = surgery_query(bn, ["X_A"], {"X_D": "d"})[{"X_A": "a"}]
    print(f"P(a | d) = {fmt(see)}  P(a | do(d)) = {fmt(do_t)} (truncated) {fmt(do_s)} (surgery)")

    m6 = load_model("influence_example6").model
    section("single-agent influence diagram")
    print(format_text(m6, maid_pure_nash(m6, config)), end="")

    m7 = load_model("maid_example7").model
    section("MAID equilibria")
    eqs = maid_pure_nash(m7, config)
    print(f"{len(eqs)} equilibria")
    print(format_text(m7, eqs), end="")
    s = load_strategy("sigma_hat", m7)
    print(f"E[U1 | D_D=d] = {fmt(conditional_eu(m7, s, 'U1', {'D_D': 'd'}))}")
    print(f"E[U1 | do(D_D=d)] = {fmt(interventional_eu(m7, s, 'U1', {'D_D': 'd'}))}")

    for name in ("cbg_example8", "cbg_example8_prose"):
        c = load_model(name).model
        for mode in ("per-graph", "ex-ante"):
            section(f"{name} ({mode})")
            print(format_text(c, cbg_pure_bne(c.family, c.beliefs, mode, config)), end="")


if __name__ == "__main__":
    main()
