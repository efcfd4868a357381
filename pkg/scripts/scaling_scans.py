"""Monte Carlo scaling scans for the iterative presets.

Writes one JSON report per preset into ``--out-dir`` and prints the fits.

    python3 scripts/scaling_scans.py --trials 2000 --out-dir runs/scans
"""
import argparse
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from phasebounds.cli import dumps
from phasebounds.estimator import scaling_scan


@dataclass
class ScanConfig:
    preset: str
    K: tuple[int, ...]
    M: int
    fit: str
    q: int | None = None


@dataclass
class Config:
    trials: int = 2000
    seed: int = 0
    threads: int = 1
    out_dir: Path = Path("runs/scans")
    scans: list[ScanConfig] = field(default_factory=lambda: [
        ScanConfig("quadratic_iterative", tuple(range(3, 10)), 32, "power"),
        ScanConfig("power_q_iterative", tuple(range(3, 9)), 16, "power", q=3),
        ScanConfig("roy_iterative", tuple(range(4, 11)), 8, "exp-sqrt"),
        ScanConfig("linear_multipass", tuple(range(3, 9)), 4, "exp"),
    ])


def run(cfg: Config) -> list[dict]:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out = []
    for sc in cfg.scans:
        rep = scaling_scan(sc.preset, sc.K, M=sc.M, trials=cfg.trials, seed=cfg.seed, fit=sc.fit, q=sc.q, threads=cfg.threads)
        doc = {"scan": asdict(sc), "trials": cfg.trials, "seed": cfg.seed, "result": rep.to_dict()}
        (cfg.out_dir / f"{sc.preset}_M{sc.M}.json").write_text(dumps(doc) + "\n")
        print(f"{sc.preset:22s} M={sc.M:<3d} fit={sc.fit:9s} slope={rep.slope:8.4f}  R^2={rep.r_squared:.4f}")
        for row in rep.rows:
            print(f"    K={row['K']:<3d} n={row['n']:<6d} eps={row['epsilon']:.3e}  bound={row['bound']:.3e}")
        out.append(doc)
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=Config.trials)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--threads", type=int, default=Config.threads)
    p.add_argument("--out-dir", type=Path, default=Config.out_dir)
    args = p.parse_args()
    run(Config(trials=args.trials, seed=args.seed, threads=args.threads, out_dir=args.out_dir))


if __name__ == "__main__":
    main()
