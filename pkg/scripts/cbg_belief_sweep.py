"""How the deterrer's belief in the access graph changes the causal Bayesian game equilibria."""

from __future__ import annotations

import argparse

import numpy as np

from causalgames.cbg import BeliefProfile, cbg_pure_bne
from causalgames.modelfile import load_model
from causalgames.report import format_text

# deterrer ¬d in both graphs, adversary plays ¬a everywhere
NO_ATTACK = (((1,),), ((1,),)), (((1, 1),), ((1,),))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=5)
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args()

    c = load_model("cbg_example8").model
    print("mu_D(G1)  per-graph  ex-ante   (no-attack profile contained?)")
    for w in np.linspace(0.0, 1.0, args.steps):
        first = c.beliefs.first_order.copy()
        second = c.beliefs.second_order.copy()
        first[0] = second[0] = [w, 1 - w]
        beliefs = BeliefProfile(first, second)
        row = []
        for mode in ("per-graph", "ex-ante"):
            eqs = cbg_pure_bne(c.family, beliefs, mode)
            row.append("yes" if eqs.contains(NO_ATTACK) else "no")
            if args.verbose:
                print(format_text(c, eqs), end="")
        print(f"{w:.2f}      {row[0]:<9}  {row[1]}")


if __name__ == "__main__":
    main()
