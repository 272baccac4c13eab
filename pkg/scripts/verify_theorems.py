"""Simulation checks of the interconnection bound and of module condensation.

Draws random Metzler networks, checks the trajectory envelope in the
matched metric norm, then simulates random condensable module systems and
compares the fitted full-system rate with the condensed margin.

    python scripts/verify_theorems.py --networks 200 --systems 50
"""

from dataclasses import dataclass

import numpy as np

from _common import out_dir, parse_config
from motifcloss.condensation import condensed_matrix, verify_condensation
from motifcloss.dynamics import TestNode, check_bound
from motifcloss.measures import spectral_abscissa
from motifcloss.synthetic import random_module_system


@dataclass
class Config:
    networks: int = 200
    max_nodes: int = 20
    systems: int = 50
    trials: int = 5
    seed: int = 0
    out: str = "results/verify"


def main(cfg: Config):
    path = out_dir(cfg)
    rng = np.random.default_rng(cfg.seed)
    rows = ["kind,index,size,delta,worst_ratio_or_rate,passed"]
    fails = 0
    for k in range(cfg.networks):
        N = int(rng.integers(2, cfg.max_nodes + 1))
        A = rng.uniform(0, 1, (N, N)) * (rng.random((N, N)) < 3 / N)
        np.fill_diagonal(A, 0)
        nodes = [TestNode.with_rate(spectral_abscissa(A) + r, float(g))
                 for r, g in zip(rng.uniform(0.1, 2, N), rng.uniform(-0.5, 0.5, N))]
        rep = check_bound(nodes, A, cfg.trials, seed=k)
        fails += rep.failures
        rows.append(f"bound,{k},{N},{rep.delta!r},{rep.worst_ratio!r},{rep.passed}")
    print(f"bound: {cfg.networks} networks, {fails} envelope failures")
    done, worst = 0, np.inf
    while done < cfg.systems:
        modules, blocks = random_module_system(rng, siso=bool(done % 2))
        system = condensed_matrix(modules, blocks)
        if not system.verdict:
            continue
        check = verify_condensation(system, blocks, trials=1, seed=done)
        worst = min(worst, check.min_rate / system.margin)
        rows.append(f"condensation,{done},{len(modules)},{system.margin!r},{check.min_rate!r},"
                    f"{check.passed()}")
        done += 1
    print(f"condensation: {cfg.systems} systems, worst fitted rate / margin = {worst:.3f}")
    (path / "verify.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
