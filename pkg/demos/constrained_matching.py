"""Doctors and hospitals under a regional cap and a hospital floor.

The equal endowment spreads each doctor evenly over the largest feasible
hospital counts; trading then improves everyone without leaving the region
limits.
"""
from eqtrade import ConstrainedMatchProblem, LaminarConstraints, check_feasible, efficient_equal_endowment, run_eae
from eqtrade.eae import hospital_counts
from eqtrade.properties import check_envy_free

doctors = ["d1", "d2", "d3", "d4"]
hospitals = ["north1", "north2", "south"]
preferences = {"d1": ["north1", "south", "north2"], "d2": ["north1", "north2", "south"],
               "d3": ["south", "north1", "north2"], "d4": ["north2", "north1", "south"]}
constraints = LaminarConstraints([({"north1", "north2"}, 1, 2), ({"south"}, 1, 2)], {"north1": 1})


def main():
    problem = ConstrainedMatchProblem(doctors, hospitals, preferences, constraints)
    print("hospital counts", {h: str(c) for h, c in hospital_counts(problem).items()})
    omega = efficient_equal_endowment(problem)
    print("each doctor starts with", {h: str(omega["d1", h]) for h in hospitals})
    p, _ = run_eae(problem)
    for d in doctors:
        print(f"  {d}: " + "  ".join(f"{h}={p[d, h]}" for h in hospitals))
    print("feasible:", check_feasible(p, constraints)[0], " envy-free:", check_envy_free(p, preferences).ok)


if __name__ == "__main__":
    main()
