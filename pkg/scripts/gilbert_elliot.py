"""Concatenated code against a long plain polar code on a bursty
Gilbert-Elliot erasure channel.

Both codes have total rate about 1/2 and are built for the good state's
BEC.  The inner polar length stays short (512) so a bad-state burst only
wipes a few inner codewords, which the RS layer then recovers.

    python3 scripts/gilbert_elliot.py --frames 10000
"""

from __future__ import annotations

import argparse
import logging
from dataclasses import dataclass
from pathlib import Path

from rspolar import channel as ch
from rspolar.concat import ConcatSpec
from rspolar.polar import PolarCodeSpec, bec_construct, select_info_set
from rspolar.sim import SimConfig, run_bler, write_csv

log = logging.getLogger("gilbert_elliot")


@dataclass
class GEConfig:
    P: float = 0.9999          # stay in the good state
    Q: float = 0.99            # stay in the bad state
    good_eps: float = 0.1
    inner_n: int = 512
    inner_k: int = 348         # inner rate 0.68
    t: int = 4
    tau: int = 2               # RS(15, 11)
    plain_n: int = 8192
    frames: int = 10_000
    seed: int = 8
    decoder: str = "sc-gmd-aml"


def build(cfg: GEConfig):
    s_in = cfg.inner_n.bit_length() - 1
    inner = PolarCodeSpec(cfg.inner_n, select_info_set(bec_construct(s_in, cfg.good_eps),
                                                       cfg.inner_k))
    concat = ConcatSpec(inner, cfg.t, (cfg.tau,) * (cfg.inner_k // cfg.t))
    s_pl = cfg.plain_n.bit_length() - 1
    plain = PolarCodeSpec(cfg.plain_n, select_info_set(bec_construct(s_pl, cfg.good_eps),
                                                       cfg.plain_n // 2))
    return concat, plain


def run(cfg: GEConfig, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    model = ch.GilbertElliot(cfg.P, cfg.Q, ch.BEC(cfg.good_eps))
    concat, plain = build(cfg)
    for name, spec, decoder in (("concat", concat, cfg.decoder),
                                ("plain", plain, "polar-only")):
        sim = SimConfig(spec, model, decoder, max_frames=cfg.frames,
                        min_frame_errors=cfg.frames + 1, seed=cfg.seed)
        report = run_bler(sim)
        write_csv(report, out_dir / f"{name}.csv")
        p = report.points[0]
        log.info("%-6s rate %.4f  FEP %.4g  [%.3g, %.3g]  (%d/%d)", name, spec.rate, p.bler,
                 p.ci_low, p.ci_high, p.frame_errors, p.frames)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=8)
    ap.add_argument("--decoder", default="sc-gmd-aml")
    ap.add_argument("--out-dir", type=Path, default=Path("results/ge"))
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    run(GEConfig(frames=args.frames, seed=args.seed, decoder=args.decoder), args.out_dir)


if __name__ == "__main__":
    main()
