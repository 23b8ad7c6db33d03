"""Equal-BTA on the five-agent market, one step at a time.

Prints each step's favorites, which nodes form absorbing sets, the traded
amounts and the binding quota, then the final assignment.
"""
from eqtrade import lambda_equal, load_fixture, run_bta
from eqtrade.properties import check_bounded_envy, check_eene, check_ir, check_ordinal_efficiency


def show(p):
    for i in p.agents:
        print(f"  {i}: " + "  ".join(f"{o}={p[i, o]}" for o in p.objects))


def main():
    problem = load_fixture("example1")
    p, trace = run_bta(problem, lambda_equal)
    print("endowments")
    show(problem.endowment_assignment())
    for step in trace.steps:
        print(f"\nstep {step.index}: favorites {dict(step.favorites)}")
        for b in step.blocks:
            print("  absorbing set", ", ".join(f"{kind[0]}{v}" for kind, v in b))
        traded = {f"{kind[0]}{v}": str(x) for (kind, v), x in step.x.items() if x}
        print("  traded", traded)
        print("  binding", ", ".join(f"{kind[0]}{v}" for nodes in step.binding for kind, v in nodes))
    print("\nfinal assignment")
    show(p)
    omega, prefs = problem.endowments, problem.preferences
    for rep in (check_ir(p, omega, prefs), check_ordinal_efficiency(p, prefs),
                check_eene(p, omega, prefs), check_bounded_envy(p, omega, prefs)):
        print(f"{rep.name}: {'holds' if rep.ok else rep.witnesses}")


if __name__ == "__main__":
    main()
