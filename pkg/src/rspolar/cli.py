"""Command-line interface: ``rspolar design|simulate|burst|bounds``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import bounds as bd
from . import channel as ch
from .concat import ConcatSpec, InfeasibleDesignError, design_for_k, profile_for, \
    rate_adaptive_design, rate_targeted_design
from .gf import FieldSpec
from .polar import PolarCodeSpec, bec_construct, mc_bitchannel_estimate, select_info_set
from .sim import DECODERS, SimConfig, read_spec_file, run_bler, run_burst_experiment, \
    save_spec, write_csv

log = logging.getLogger("rspolar")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            a, b, *step = (int(x) for x in part.split(":"))
            out.extend(range(a, b, step[0] if step else 1))
        elif part:
            out.append(int(part))
    return out


def _quality(n: int, descriptor: str, trials: int, seed: int, rate: float, bit_reversed: bool):
    model = ch.parse_channel(descriptor, rate)
    if isinstance(model, ch.BEC):
        return bec_construct(n.bit_length() - 1, model.eps)
    return mc_bitchannel_estimate(n, model, trials, seed, bit_reversed)


def cmd_design(args) -> int:
    n = args.n
    if n < 2 or n & (n - 1):
        raise SystemExit(f"--n must be a power of two, got {n}")
    bit_reversed = not args.natural_order
    design_rate = args.rate if args.rate is not None else (args.k / n if args.k else 0.5)
    quality = _quality(n, args.design_channel, args.trials, args.seed, design_rate, bit_reversed)
    meta = {"channel": args.design_channel, "trials": args.trials, "seed": args.seed}
    if args.t is None:
        k = args.k if args.k is not None else round(design_rate * n)
        spec = PolarCodeSpec(n, select_info_set(quality, k), bit_reversed)
    elif args.fep is not None:
        if args.k is None:
            raise SystemExit("--fep needs --k")
        gf = FieldSpec(args.t)
        info = select_info_set(quality, args.k)
        taus = rate_adaptive_design(profile_for(quality, info, args.t), gf.group_order,
                                    args.t, args.k, args.fep, args.allow_zero_tau)
        spec = ConcatSpec(PolarCodeSpec(n, info, bit_reversed), args.t, taus, gf)
        meta["target_fep"] = args.fep
    else:
        if args.rate is None:
            raise SystemExit("a concatenated design needs --rate or --fep")
        if args.k is not None:
            res = design_for_k(quality, args.k, args.t, args.rate, bit_reversed=bit_reversed,
                               allow_zero=args.allow_zero_tau)
            if res is None:
                raise InfeasibleDesignError(f"k={args.k} cannot reach rate {args.rate}")
        else:
            k_range = _ints(args.k_range) if args.k_range else range(
                -(-int(n * args.rate) // args.t) * args.t, n + 1, args.t)
            res = rate_targeted_design(quality, args.t, args.rate, k_range,
                                       bit_reversed=bit_reversed, allow_zero=args.allow_zero_tau)
        spec = res.spec
        meta["target_fep"] = res.target_fep
        meta["predicted_fep"] = res.predicted_fep
    digest = save_spec(args.out, spec, meta)
    summary = {"out": args.out, "hash": digest, "n": n, "k": (spec.polar if args.t else spec).k,
               "rate": spec.rate}
    if args.t is not None:
        summary["taus"] = list(spec.taus)
    print(json.dumps(summary))
    return 0


def cmd_simulate(args) -> int:
    spec = read_spec_file(args.spec).spec
    model = ch.parse_channel(args.channel, spec.rate)
    points = tuple(_floats(args.points)) if args.points else (None,)
    cfg = SimConfig(spec, model, args.decoder, points, args.max_frames, args.min_errors,
                    args.seed, args.workers, args.chunk, args.metric)

    def progress(point, frames, errors):
        log.info("point %s: %d frames, %d errors", point, frames, errors)

    report = run_bler(cfg, progress)
    write_csv(report, args.out or sys.stdout)
    return 0


def cmd_burst(args) -> int:
    spec = read_spec_file(args.spec).spec
    frame = spec.N if isinstance(spec, ConcatSpec) else spec.n
    lengths = _ints(args.lengths)
    if args.offsets == "all":
        offsets = None
    elif args.offsets.startswith("spread:"):
        offsets = int(args.offsets.split(":")[1])
    else:
        offsets = _ints(args.offsets)
    base = ch.parse_channel(args.base)
    rows = []
    for length in lengths:
        if offsets is None:
            offs = range(frame - length + 1)
        elif isinstance(offsets, int):
            offs = sorted({int(x) for x in np.linspace(0, frame - length, offsets).round()})
        else:
            offs = offsets
        rows += run_burst_experiment(spec, [length], offs, base, args.decoder, args.seed,
                                     args.messages)
    fails = 0
    for r in rows:
        fails += not r.success
        print(json.dumps({"length": r.length, "offset": r.offset, "success": r.success,
                          "zero_llr": r.zero_llr}))
    log.info("%d of %d bursts failed", fails, len(rows))
    return 0


def cmd_bounds(args) -> int:
    if args.spec:
        sf = read_spec_file(args.spec)
        spec = sf.spec
        polar = spec.polar if isinstance(spec, ConcatSpec) else spec
        eps = None
        model = sf.design.get("channel")
        if model:
            parsed = ch.parse_channel(model)
            if isinstance(parsed, ch.BEC):
                eps = parsed.eps
        if eps is None:
            eps = args.bec
        quality = bec_construct(polar.s, eps)
        m = spec.m if isinstance(spec, ConcatSpec) else args.m
        r_o = (sum(spec.kappas) / (spec.r * spec.m)) if isinstance(spec, ConcatSpec) else args.ro
        rep = bd.report(polar.n, m, r_o, args.eps, polar.rate, args.pe, quality, polar.info_set)
    else:
        if None in (args.n, args.m, args.ro):
            raise SystemExit("bounds needs --spec or all of --n --m --ro")
        rep = bd.report(args.n, args.m, args.ro, args.eps, args.ri, args.pe)
    print(json.dumps(rep.to_dict(), indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rspolar", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="construct a code and write a spec file")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--t", type=int, help="RS symbol width; omit for a plain polar code")
    d.add_argument("--k", type=int, help="fix the inner information length")
    d.add_argument("--k-range", help="candidate k values, e.g. 172:257:4")
    d.add_argument("--rate", type=float, help="target total rate")
    d.add_argument("--fep", type=float, help="target frame error probability (needs --k)")
    d.add_argument("--design-channel", default="awgn:2.0")
    d.add_argument("--trials", type=int, default=100_000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--allow-zero-tau", action="store_true",
                   help="let the strongest groups go without outer redundancy")
    d.add_argument("--natural-order", action="store_true",
                   help="transmit u G^{(x)s} without the bit-reversal permutation")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_design)

    s = sub.add_parser("simulate", help="Monte Carlo block error rate")
    s.add_argument("--spec", required=True)
    s.add_argument("--channel", required=True)
    s.add_argument("--decoder", choices=DECODERS, default="sc")
    s.add_argument("--metric", choices=("hamming", "product"))
    s.add_argument("--points", help="comma-separated values of the channel parameter")
    s.add_argument("--max-frames", type=int, default=1_000_000)
    s.add_argument("--min-errors", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--chunk", type=int, default=500)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("burst", help="erasure-burst sweep over a noiseless base channel")
    b.add_argument("--spec", required=True)
    b.add_argument("--lengths", required=True)
    b.add_argument("--offsets", default="all", help="'all', 'spread:K' or a list")
    b.add_argument("--decoder", choices=DECODERS)
    b.add_argument("--base", default="noiseless")
    b.add_argument("--messages", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_burst)

    o = sub.add_parser("bounds", help="analytic bounds as JSON")
    o.add_argument("--spec")
    o.add_argument("--n", type=int)
    o.add_argument("--m", type=int)
    o.add_argument("--ro", type=float)
    o.add_argument("--ri", type=float)
    o.add_argument("--pe", type=float)
    o.add_argument("--eps", type=float, default=0.0)
    o.add_argument("--bec", type=float, default=0.5,
                   help="erasure probability for the union bound when the code spec file has no BEC design")
    o.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ValueError, InfeasibleDesignError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
