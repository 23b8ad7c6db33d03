"""Trading away envy among equal-priority students.

Starting from a stable random assignment, students of equal priority who
envy one another swap probability shares until no envy cycle remains.
"""
import random

from eqtrade import build_envy_graph, run_fdat_trading, trim_to_cyclic_core
from eqtrade.generators import random_fdat_input


def main(seed=0):
    rng = random.Random(seed)
    while True:
        inp = random_fdat_input(rng, tie_prob=0.8, max_copies=1)
        core = trim_to_cyclic_core(build_envy_graph(inp.assignment, inp.priorities, inp.preferences))
        if core.nodes:
            break
    print("envy cycle among", sorted(core.nodes))
    p, trace = run_fdat_trading(inp)
    print(f"{len(trace)} trading steps")
    for i in p.agents:
        before = "  ".join(f"{o}={inp.assignment[i, o]}" for o in p.objects)
        after = "  ".join(f"{o}={p[i, o]}" for o in p.objects)
        print(f"  {i}: {before}   ->   {after}")
    left = trim_to_cyclic_core(build_envy_graph(p, inp.priorities, inp.preferences))
    print("remaining cycle:", sorted(left.nodes) or "none")


if __name__ == "__main__":
    main()
