"""How much a single agent gains by lying as the market grows.

Each agent is cloned ``n`` times; the best misreport of one clone is found
by trying every strict order.
"""
from eqtrade import lambda_equal, load_fixture, run_bta
from eqtrade.oracles import is_nonincreasing, replication_series, series_maxima


def main(ns=(1, 2, 4, 8)):
    base = load_fixture("replication_base")
    rows = replication_series(base, lambda q: run_bta(q, lambda_equal)[0], ns)
    for n, agent, eps in rows:
        print(f"n={n:<2} agent {agent}: gain {eps}")
    maxima = series_maxima(rows)
    print("largest gain per n:", {n: str(v) for n, v in maxima.items()})
    print("shrinking:", is_nonincreasing(maxima[n] for n in ns))


if __name__ == "__main__":
    main()
