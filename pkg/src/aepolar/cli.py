"""Command line entry point: ``aepolar design | analyze | perms | simulate``."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import autgroup, construct, formats, gf2, monomial, sim


def _structure(text: str) -> gf2.BlockStructure:
    parts = text.replace(",", " ").split()
    try:
        return gf2.BlockStructure(tuple(int(p) for p in parts))
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _floats(text: str) -> list[float]:
    # "1.0,1.5,2.0" or "start:stop:step"
    if ":" in text:
        lo, hi, step = (float(v) for v in text.split(":"))
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return [round(lo + k * step, 10) for k in range(count)]
    return [float(v) for v in text.split(",") if v]


def cmd_design(args) -> int:
    try:
        profile = construct.design_profile(
            args.N, args.K, args.structure, args.snr_min, args.snr_step, args.snr_max, crc_bits=args.crc
        )
    except construct.DesignFailure as e:
        print(f"design failure: {e}", file=sys.stderr)
        return 2
    text = formats.dump_profile(profile)
    if args.output:
        formats.save_profile(profile, args.output)
    else:
        sys.stdout.write(text)
    return 0


def cmd_analyze(args) -> int:
    profile = formats.load_profile(args.profile)
    g = profile.monomials()
    s = monomial.block_structure(g)
    au, ap = autgroup.count_au_ap(s)
    print(f"N: {profile.N}")
    print(f"K: {profile.K}")
    print(f"decreasing: {monomial.is_decreasing(g)}")
    print(f"structure: {s}")
    print(f"I_min: {' '.join(map(str, monomial.min_info_set(g).indices()))}")
    print(f"blta_size: {gf2.blta_size(s)}")
    print(f"ec_count: {autgroup.ec_count(s) if s.sizes[0] > 1 else 'n/a (s_1 = 1)'}")
    print(f"A_U: {au}")
    print(f"A_P: {ap}")
    return 0


def cmd_perms(args) -> int:
    profile = formats.load_profile(args.profile)
    s = monomial.block_structure(profile.monomials())
    rng = np.random.default_rng(args.seed)
    try:
        reps = autgroup.generate_representatives(s, args.M, (args.du, args.dp), rng)
    except autgroup.SelectionExhausted as e:
        print(f"selection failed: {e}", file=sys.stderr)
        return 2
    text = formats.dump_representatives(reps, s)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate(args) -> int:
    profile = formats.load_profile(args.profile)
    if args.reps:
        _, reps = formats.load_representatives(args.reps)
        if args.M:
            reps = reps[: args.M]
        decoder = sim.DecoderConfig("ae", reps=reps, exact=args.exact, ml_list_size=args.ml_list)
    elif args.list_size > 1:
        decoder = sim.DecoderConfig("scl", list_size=args.list_size, exact=args.exact, ml_list_size=args.ml_list)
    else:
        decoder = sim.DecoderConfig("sc", exact=args.exact, ml_list_size=args.ml_list)
    results = sim.run_bler(
        profile, decoder, args.ebn0, args.min_errors, args.max_frames, args.seed, args.workers
    )
    text = sim.results_csv(results)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aepolar", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="design a code with a prescribed block structure")
    d.add_argument("--N", type=int, required=True)
    d.add_argument("--K", type=int, required=True)
    d.add_argument("--structure", "-S", type=_structure, required=True, help="block sizes, e.g. 3,5")
    d.add_argument("--snr-min", type=float, default=0.0)
    d.add_argument("--snr-step", type=float, default=construct.DEFAULT_SNR_STEP_DB)
    d.add_argument("--snr-max", type=float, default=None)
    d.add_argument("--crc", type=int, choices=(0, 6), default=0)
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_design)

    a = sub.add_parser("analyze", help="report block structure and group sizes")
    a.add_argument("profile")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("perms", help="draw non-redundant automorphism representatives")
    r.add_argument("profile")
    r.add_argument("--M", type=int, required=True)
    r.add_argument("--du", type=int, default=0)
    r.add_argument("--dp", type=int, default=0)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_perms)

    s = sub.add_parser("simulate", help="Monte-Carlo BLER over AWGN, CSV output")
    s.add_argument("profile")
    s.add_argument("--reps", help="representative file; enables AE decoding")
    s.add_argument("--M", type=int, default=0, help="use only the first M representatives")
    s.add_argument("--list-size", "-L", type=int, default=1)
    s.add_argument("--exact", action="store_true", help="exact check-node update instead of min-sum")
    s.add_argument("--ml-list", type=int, default=0, help="also bound ML with an SCL decoder of this list size")
    s.add_argument("--ebn0", type=_floats, required=True, help="list 1,1.5,2 or range 1:3:0.5")
    s.add_argument("--min-errors", type=int, default=sim.DEFAULT_MIN_ERRORS)
    s.add_argument("--max-frames", type=int, default=sim.DEFAULT_MAX_FRAMES)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
