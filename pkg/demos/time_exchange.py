"""Time exchange between three services with reservations and ceilings.

Each service keeps a reserved slice of its own time and cannot use more of
another's time than its ceiling allows. Whatever nobody can take is left
unsold rather than forced on someone.
"""
from fractions import Fraction as F

from eqtrade import FeeProblem, TimeExchangeProblem, lambda_equal, run_time_exchange

agents = ["clinic", "lab", "radiology"]
objects = ["c", "l", "r"]
endowments = {"clinic": {"c": 1}, "lab": {"l": 1}, "radiology": {"r": 1}}
preferences = {"clinic": ["l", "r", "c"], "lab": ["r", "c", "l"], "radiology": ["l", "c", "r"]}
upper = {"clinic": {"l": F(1, 2), "r": F(1, 4)}, "radiology": {"l": F(1, 3)}}
lower = {"clinic": {"c": F(1, 4)}, "lab": {"l": F(1, 2)}}


def main():
    problem = TimeExchangeProblem(FeeProblem(agents, objects, endowments, preferences), upper, lower)
    p, trace = run_time_exchange(problem, lambda_equal)
    for step in trace.steps:
        moved = ", ".join(f"{i} gets {v} of {o}" for i, o, v in step.assignment_delta if v > 0)
        print(f"step {step.index}: {moved}")
    print()
    for i in agents:
        row = "  ".join(f"{o}={p[i, o]}" for o in objects)
        print(f"{i:>9}: {row}")
    print("unsold:", [(i, o, str(v)) for i, o, v in trace.meta["unsold"]] or "nothing")


if __name__ == "__main__":
    main()
