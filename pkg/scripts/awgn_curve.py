"""Block error rate versus Eb/N0 for a plain polar code and the rate-adaptive
concatenated code decoded with every joint decoder.

Defaults reproduce the n=512, t=4, rate-1/3 operating point.  One CSV per
decoder is written to ``--out-dir``, plus the design's spec file.

    python3 scripts/awgn_curve.py --points 1.5,2.0,2.5 --min-errors 100
"""

from __future__ import annotations

import argparse
import logging
from dataclasses import dataclass
from pathlib import Path

from rspolar import channel as ch
from rspolar.concat import MODES, rate_targeted_design
from rspolar.polar import PolarCodeSpec, mc_bitchannel_estimate, select_info_set
from rspolar.sim import SimConfig, run_bler, save_spec, write_csv

log = logging.getLogger("awgn_curve")


@dataclass
class CurveConfig:
    n: int = 512
    t: int = 4
    rate: float = 1 / 3
    design_ebn0: float = 2.0
    trials: int = 100_000
    design_seed: int = 1
    k_range: tuple = tuple(range(172, 257, 4))
    allow_zero: bool = True
    points: tuple = (1.0, 1.5, 2.0, 2.5)
    min_errors: int = 200
    max_frames: int = 1_000_000
    seed: int = 5
    decoders: tuple = ("polar-only",) + MODES


def run(cfg: CurveConfig, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    design_model = ch.AwgnBpsk(cfg.design_ebn0, cfg.rate)
    log.info("genie estimate: %d trials at %.2f dB", cfg.trials, cfg.design_ebn0)
    quality = mc_bitchannel_estimate(cfg.n, design_model, cfg.trials, cfg.design_seed)
    design = rate_targeted_design(quality, cfg.t, cfg.rate, cfg.k_range,
                                  allow_zero=cfg.allow_zero)
    meta = {"channel": ch.format_channel(design_model), "trials": cfg.trials,
            "seed": cfg.design_seed, "predicted_fep": design.predicted_fep}
    save_spec(out_dir / "concat_spec.json", design.spec, meta)
    log.info("picked k=%d, rate %.4f, predicted FEP %.3g", design.spec.polar.k,
             design.spec.rate, design.predicted_fep)
    polar = PolarCodeSpec(cfg.n, select_info_set(quality, round(cfg.n * cfg.rate)))
    save_spec(out_dir / "polar_spec.json", polar, meta)

    for decoder in cfg.decoders:
        spec = polar if decoder == "polar-only" else design.spec
        sim = SimConfig(spec, ch.AwgnBpsk(cfg.points[0], spec.rate), decoder, cfg.points,
                        cfg.max_frames, cfg.min_errors, cfg.seed)
        report = run_bler(sim, lambda p, f, e: log.debug("%s %.2f dB: %d/%d", decoder, p, e, f))
        write_csv(report, out_dir / f"{decoder}.csv")
        for p in report.points:
            log.info("%-11s %.2f dB  BLER %.4g  (%d/%d)", decoder, p.point, p.bler,
                     p.frame_errors, p.frames)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", default="1.0,1.5,2.0,2.5")
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--min-errors", type=int, default=200)
    ap.add_argument("--max-frames", type=int, default=1_000_000)
    ap.add_argument("--decoders", default=",".join(("polar-only",) + MODES))
    ap.add_argument("--seed", type=int, default=5)
    ap.add_argument("--out-dir", type=Path, default=Path("results/awgn"))
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    cfg = CurveConfig(trials=args.trials, points=tuple(float(x) for x in args.points.split(",")),
                      min_errors=args.min_errors, max_frames=args.max_frames, seed=args.seed,
                      decoders=tuple(args.decoders.split(",")))
    run(cfg, args.out_dir)


if __name__ == "__main__":
    main()
