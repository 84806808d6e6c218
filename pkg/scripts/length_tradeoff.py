"""Inner/outer length trade-off at total length about 2^14 and total rate 1/2.

Each split fixes the RS field width ``t``, the inner polar length ``n`` and
its information length ``k``; the outer radii are fitted to rate 1/2 from a
genie estimate at 2 dB.  If the listed k misses the rate, every multiple of
t is tried.  With a 2 dB genie estimate only the 512-bit inner code reaches
rate 1/2; the shorter splits are skipped with a warning.  This is a long job
(hours) and is not part of the test suite.

    python3 scripts/length_tradeoff.py --points 1.75,2.0,2.25 --min-errors 50
"""

from __future__ import annotations

import argparse
import logging
from dataclasses import dataclass
from pathlib import Path

from rspolar import channel as ch
from rspolar.concat import InfeasibleDesignError, design_for_k, rate_targeted_design
from rspolar.polar import mc_bitchannel_estimate
from rspolar.sim import SimConfig, run_bler, save_spec, write_csv

log = logging.getLogger("length_tradeoff")

# (t, n, k): RS(2^t - 1) outer codes over an n-bit polar inner code
SPLITS = ((5, 512, 295), (6, 256, 144), (7, 128, 70), (10, 16, 10))


@dataclass
class TradeoffConfig:
    splits: tuple = SPLITS
    rate: float = 0.5
    design_ebn0: float = 2.0
    trials: int = 100_000
    points: tuple = (1.75, 2.0, 2.25)
    decoder: str = "sc-gmd"
    min_errors: int = 100
    max_frames: int = 100_000
    seed: int = 11
    allow_zero: bool = True    # rate 1/2 is out of reach if every group needs tau >= 1


def run(cfg: TradeoffConfig, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for t, n, k in cfg.splits:
        name = f"rs{(1 << t) - 1}-polar{n}"
        quality = mc_bitchannel_estimate(n, ch.AwgnBpsk(cfg.design_ebn0, cfg.rate),
                                         cfg.trials, seed=1)
        design = design_for_k(quality, k, t, cfg.rate, allow_zero=cfg.allow_zero)
        if design is None:
            # the listed k may miss the rate under this estimate; search every k
            try:
                design = rate_targeted_design(quality, t, cfg.rate, range(t, n + 1, t),
                                              allow_zero=cfg.allow_zero)
            except InfeasibleDesignError:
                log.warning("%s: no k reaches rate %.3f", name, cfg.rate)
                continue
            log.info("%s: k=%d misses rate %.3f, using k=%d", name, k, cfg.rate,
                     design.spec.polar.k)
        save_spec(out_dir / f"{name}.json", design.spec,
                  {"predicted_fep": design.predicted_fep, "trials": cfg.trials})
        sim = SimConfig(design.spec, ch.AwgnBpsk(cfg.points[0], design.spec.rate), cfg.decoder,
                        cfg.points, cfg.max_frames, cfg.min_errors, cfg.seed)
        report = run_bler(sim)
        write_csv(report, out_dir / f"{name}.csv")
        for p in report.points:
            log.info("%-14s rate %.4f  %.2f dB  BLER %.4g  (%d/%d)", name, design.spec.rate,
                     p.point, p.bler, p.frame_errors, p.frames)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", default="1.75,2.0,2.25")
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--decoder", default="sc-gmd")
    ap.add_argument("--min-errors", type=int, default=100)
    ap.add_argument("--max-frames", type=int, default=100_000)
    ap.add_argument("--out-dir", type=Path, default=Path("results/tradeoff"))
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    run(TradeoffConfig(trials=args.trials, points=tuple(float(x) for x in args.points.split(",")),
                       decoder=args.decoder, min_errors=args.min_errors,
                       max_frames=args.max_frames), args.out_dir)


if __name__ == "__main__":
    main()
