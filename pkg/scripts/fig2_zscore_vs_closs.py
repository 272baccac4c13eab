"""Normalized Z-score against relative contraction loss.

Defaults to the bundled planted feed-forward-loop network. Pass an edge
list (e.g. a transcription network) with ``--input`` to run on real data.

    python scripts/fig2_zscore_vs_closs.py --input @planted --ensemble 1000
"""

from dataclasses import dataclass

from _common import out_dir, parse_config
from motifcloss.closs import closs_table
from motifcloss.reports import load_graph
from motifcloss.significance import motifs_csv, zscore_vs_closs, zscores_multi


@dataclass
class Config:
    input: str = "@planted"
    sizes: tuple = (3, 4)
    ensemble: int = 1000
    samples: int = 10_000
    measure: str = "spectral"
    seed: int = 0
    threads: int = 1
    out: str = "results/fig2"


def main(cfg: Config):
    path = out_dir(cfg)
    g = load_graph(cfg.input)
    stats = zscores_multi(g, cfg.sizes, cfg.ensemble, cfg.seed, threads=cfg.threads)
    rel = closs_table(cfg.sizes, cfg.measure, cfg.samples, seed=cfg.seed, threads=cfg.threads).relative
    (path / "motifs.csv").write_text(motifs_csv([s for n in cfg.sizes for s in stats[n]], rel))
    for n in cfg.sizes:
        join = zscore_vs_closs(stats[n], rel, n)
        print(f"n={n}: {len(join.rows)} classes with defined Z and r, "
              f"pearson {join.pearson}, spearman {join.spearman}")
        for cls, z, r in sorted(join.rows, key=lambda row: -row[1]):
            print(f"  {cls.label:>8}  Z_norm {z:+.3f}  r {r:.3f}")


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
