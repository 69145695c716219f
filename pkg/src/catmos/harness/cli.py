"""Command line entry point: ``catmos run | tables | compress | merge-demo``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .. import codec as codecs
from ..errors import CatmosError
from ..qmerge import QuerySetState, admit, write_decision_log
from .experiment import run_experiment
from .scenario import load_scenario
from .tables import diff_cells, factor_cells, reproduce_tables


def _seed_list(text: str) -> list[int]:
    """Parse ``"1-10"`` or ``"1,3,5"`` into a list of seeds."""
    seeds: list[int] = []
    try:
        for part in text.split(","):
            lo, sep, hi = part.partition("-")
            seeds.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("empty seed list")
    return seeds


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seeds:
        seeds = args.seeds
    elif args.seed is not None:
        seeds = [args.seed]
    else:
        seeds = [scenario.seed]
    report = run_experiment(scenario, seeds, args.out)
    for line in report.summary_lines():
        print(line)
    print(f"wrote CSVs to {args.out}")
    return 0


def cmd_tables(args) -> int:
    paths = reproduce_tables(args.out)
    f, d = factor_cells(), diff_cells()
    print(f"factor table: {sum(c.ok for c in f)}/{len(f)} factor cells match")
    for c in f:
        if not c.ok:
            print(f"  row {c.row} {c.codec}: computed {c.computed:.6f}, reference {c.reference}")
    print(f"static-variable difference table: {sum(c.ok for c in d)}/{len(d)} difference cells match")
    for p in paths.values():
        print(f"wrote {p}")
    return 0


def cmd_compress(args) -> int:
    data = Path(args.input).read_bytes()
    blob = codecs.encode(args.codec, data, args.mode, envelope_bytes=args.envelope)
    if codecs.decode(blob) != data:
        raise CatmosError("round trip failed")
    print(f"original_bytes={len(data)}")
    print(f"compressed_bytes={blob.total_bytes}")
    print(f"factor={codecs.compression_factor(len(data), blob.total_bytes):.6f}")
    return 0


def cmd_merge_demo(args) -> int:
    scenario = load_scenario(args.scenario)
    model = scenario.cost_model()
    state = QuerySetState()
    decisions = []
    order = sorted(zip(scenario.arrivals, range(len(scenario.queries)), scenario.queries))
    for t, _, q in order:
        d = admit(state, q, model, t, args.policy or scenario.merge_policy)
        decisions.append(d)
        print(f"t={t} query {d.query_id}: {d.kind} -> synthetic {d.sid}, "
              f"gain {d.gain:.6e} J/s, active {d.active_size}")
    for s in state.active():
        print(f"synthetic {s.sid}: {s.query.min_value}..{s.query.max_value} every "
              f"{s.query.epoch_s}s, members {sorted(s.members)}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with (out / "decisions.csv").open("w", newline="", encoding="utf-8") as fh:
            write_decision_log(decisions, fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="catmos",
                                description="Sensor-network compression and query merging.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate baseline, compress-only and catmos modes")
    r.add_argument("--scenario", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--seeds", type=_seed_list, help="seed list such as 1-10 or 1,4,7")
    r.add_argument("--out", default="out")
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("tables", help="recompute the reference factor tables")
    t.add_argument("--out", default="out")
    t.set_defaults(func=cmd_tables)

    c = sub.add_parser("compress", help="compress a file and report its factor")
    c.add_argument("--codec", required=True, choices=codecs.CODEC_IDS)
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--mode", default="payload", choices=codecs.MODES)
    c.add_argument("--envelope", type=int, default=codecs.DEFAULT_ENVELOPE_BYTES,
                   help="deflate envelope bytes")
    c.set_defaults(func=cmd_compress)

    m = sub.add_parser("merge-demo", help="print admission decisions for a scenario")
    m.add_argument("--scenario", required=True)
    m.add_argument("--policy", choices=("gain", "always", "off"))
    m.add_argument("--out")
    m.set_defaults(func=cmd_merge_demo)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CatmosError, OSError) as exc:
        print(f"catmos: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
