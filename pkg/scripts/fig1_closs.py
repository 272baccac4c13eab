"""Mean contraction loss of every 3- and 4-node class, grouped by density class.

Writes ``closs.csv`` (plot data) and prints the minimal classes of each
density class together with their seed stability.

    python scripts/fig1_closs.py --samples 10000 --seeds 5
"""

from dataclasses import dataclass

from _common import out_dir, parse_config
from motifcloss.closs import closs_csv, closs_table


@dataclass
class Config:
    samples: int = 10_000
    a_max: float = 1.0
    measure: str = "spectral"
    seed: int = 0
    seeds: int = 5
    threads: int = 1
    out: str = "results/fig1"


def main(cfg: Config):
    path = out_dir(cfg)
    tables = [closs_table((3, 4), cfg.measure, cfg.samples, cfg.a_max, cfg.seed + k, cfg.threads)
              for k in range(cfg.seeds)]
    (path / "closs.csv").write_text(closs_csv(tables[0]))
    mins = [t.minimal_classes() for t in tables]
    print(f"{'density':>8}  {'minimal classes (seed 0)':<40} stable")
    for dc in sorted(mins[0]):
        labels = sorted(c.label for c in mins[0][dc])
        stable = len({frozenset(m[dc]) for m in mins}) == 1
        print(f"{str(dc):>8}  {', '.join(labels)[:40]:<40} {stable}")
    for c in sorted(c for t in tables[:1] for c in t.relative):
        if c.motif_catalog_id:
            s = tables[0].for_class(c)
            r = tables[0].relative[c].r
            print(f"{c.motif_catalog_id:>4} {c.class_id:>5}  mean {s.mean:.4f}  std {s.std:.4f}  "
                  f"r {'undefined' if r is None else f'{r:.3f}'}")


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
