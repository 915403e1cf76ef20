"""Randomized cross-check of the Steiner solver against the brute-force oracle.

Generates networks small enough for the oracle's power-set sweep, asks
both engines for the top k explanations of a random observation set,
and reports any disagreement.  Also prints cumulative wall time per
engine, which is where the solver earns its keep as networks grow.

Usage: python scripts/oracle_vs_solver.py [--networks 500] [--k 3] [--multi]
"""

import argparse
import random
import sys
import time
from dataclasses import dataclass

from abducer import add_top, best_explanations_bruteforce, explain
from abducer.synth import random_network, random_observations


@dataclass
class SweepConfig:
    networks: int = 500
    k: int = 3
    seed: int = 0
    max_events: int = 12
    max_causal: int = 14
    max_isa: int = 8
    multi: bool = False


def compare_one(cfg: SweepConfig, seed: int) -> tuple[str | None, float, float]:
    """Returns (mismatch description or None, solver seconds, oracle seconds)."""
    rng = random.Random(seed)
    net = random_network(
        rng, max_events=cfg.max_events, max_causal=cfg.max_causal, max_isa=cfg.max_isa
    )
    obs = random_observations(rng, net)
    if not obs:
        return None, 0.0, 0.0

    t0 = time.perf_counter()
    got = explain(net, obs, k=cfg.k, multi=cfg.multi)
    t1 = time.perf_counter()
    if cfg.multi:
        work = net if net.top else add_top(net)
        want = best_explanations_bruteforce(work, obs, cfg.k, culprit=work.top)
    else:
        want = best_explanations_bruteforce(net, obs, cfg.k)
    t2 = time.perf_counter()

    if [r.scenario for r in got] != [r.scenario for r in want]:
        return (
            f"seed {seed}, obs {sorted(obs)}: solver {[r.scenario for r in got]} "
            f"vs oracle {[r.scenario for r in want]}",
            t1 - t0,
            t2 - t1,
        )
    for g_, w_ in zip(got, want):
        if abs(g_.log_weight - w_.log_weight) > 1e-9:
            return (
                f"seed {seed}: rank {g_.rank} weight gap {abs(g_.log_weight - w_.log_weight):g}",
                t1 - t0,
                t2 - t1,
            )
    return None, t1 - t0, t2 - t1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--networks", type=int, default=500)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--multi", action="store_true")
    ns = ap.parse_args(argv)
    cfg = SweepConfig(networks=ns.networks, k=ns.k, seed=ns.seed, multi=ns.multi)

    mismatches = []
    solver_s = oracle_s = 0.0
    compared = 0
    for i in range(cfg.networks):
        bad, ts, to = compare_one(cfg, cfg.seed + i)
        solver_s += ts
        oracle_s += to
        if ts or to:
            compared += 1
        if bad:
            mismatches.append(bad)
            print(f"MISMATCH {bad}", file=sys.stderr)

    mode = "multi" if cfg.multi else "single"
    print(
        f"{compared} networks compared ({mode} mode, k={cfg.k}): "
        f"{len(mismatches)} mismatches"
    )
    print(f"solver {solver_s:.2f}s total, oracle {oracle_s:.2f}s total")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
