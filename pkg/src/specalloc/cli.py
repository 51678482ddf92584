"""Command-line pipeline: gen, label, encode, augment, pretrain-gen,
baseline, multisu, eval, fit-alpha.

Every subcommand is rerunnable with identical output given identical
inputs. Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

from .augment import FarPuConfig
from .baselines import ipb_allocate, lbt_allocate
from .config import ConfigError, RunConfig, default_config, load_config
from .datasetio import (
    DatasetFormatError,
    read_dataset,
    read_predictions,
    write_manifest,
    write_multisu_labels,
    write_predictions,
    write_scenarios,
)
from .metrics import fairness, report, score, total_power_w
from .multisu import binary_alloc, greedy_order, partition_channels, sequential_alloc
from .pipeline import RunProfile, augment, encode, generate, label, pretrain
from .propagation import fit_alpha
from .sampling import sample_scenario

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _profile(cfg: RunConfig) -> RunProfile:
    return RunProfile(
        region=cfg.region,
        sampler=cfg.sampler,
        propagation=cfg.propagation,
        oracle=cfg.oracle,
        sheets=cfg.sheets,
        conservative=cfg.conservative,
    )


def _build_parser() -> _Parser:
    p = _Parser(prog="specalloc", description=__doc__, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    subparsers = p.add_subparsers(dest="command", required=True)

    class _Sub:
        def add_parser(self, name, **kw):
            return subparsers.add_parser(name, formatter_class=argparse.ArgumentDefaultsHelpFormatter, **kw)

    sub = _Sub()

    def common(sp, out_required=True):
        sp.add_argument("--config", help="run config file (TOML-style sections)")
        sp.add_argument("--seed", type=int, help="override the run seed (sampling + propagation noise)")
        sp.add_argument("--jobs", type=int, default=None, help="worker processes for data-parallel stages (default: config, then logical cores)")
        if out_required:
            sp.add_argument("--out", required=True, help="output directory or file")

    sp = sub.add_parser("gen", help="sample scenarios into a dataset directory")
    common(sp)
    sp.add_argument("--count", type=int, required=True, help="number of scenarios")

    sp = sub.add_parser("label", help="write labels.csv for a dataset")
    common(sp, out_required=False)
    sp.add_argument("--dataset", required=True, help="dataset directory")
    sp.add_argument("--conservative", action="store_true", help="also write small-scale-conservative labels")

    sp = sub.add_parser("encode", help="render image tensors for a dataset")
    common(sp, out_required=False)
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--sheets", type=int, default=None, help="PU sheet count (overrides config)")
    sp.add_argument("--size", type=int, default=None, help="image height/width in pixels (overrides config)")

    sp = sub.add_parser("augment", help="append synthetic samples to a labeled dataset")
    common(sp)
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--rotations", default="", help="comma list from {90,180,270}")
    sp.add_argument("--far-pu", action="store_true", help="far-transmitter power-reduction synthetics")
    sp.add_argument("--far-pu-count", type=int, default=2, help="synthetics per sample for --far-pu")
    sp.add_argument("--d-far", type=float, default=500.0, help="meters from the binding PU")
    sp.add_argument("--delta-db", type=float, default=10.0, help="max power reduction draw")
    sp.add_argument("--idw", type=int, default=0, help="interpolated sensors to add per sample")

    sp = sub.add_parser("pretrain-gen", help="streamed scenario+label+image generation")
    common(sp)
    sp.add_argument("--count", type=int, required=True)

    sp = sub.add_parser("baseline", help="run a non-learning allocator over a dataset")
    common(sp)
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--algo", choices=["lbt", "ipb"], required=True)

    sp = sub.add_parser("multisu", help="concurrent-SU labeling over fresh scenarios")
    common(sp)
    sp.add_argument("--algo", choices=["binary", "greedy"], required=True)
    sp.add_argument("--count", type=int, default=1, help="number of scenarios")
    sp.add_argument("--n-sus", type=int, default=10)
    sp.add_argument("--channels", type=int, default=1)
    sp.add_argument("--threshold-db", type=float, default=0.1)
    sp.add_argument(
        "--per-su-images",
        action="store_true",
        help="also render one image per (scenario, SU): the SU drawn power-scaled by its stand-alone grant",
    )

    sp = sub.add_parser("eval", help="score a predictions file against dataset labels")
    common(sp, out_required=False)
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--pred", required=True, help="predictions.csv")
    sp.add_argument("--report", required=True, help="report output path")
    sp.add_argument("--format", choices=["csv", "md"], default="csv")

    sp = sub.add_parser("fit-alpha", help="least-squares path-loss exponent from samples")
    common(sp, out_required=False)
    sp.add_argument("--samples", required=True, help="CSV with header distance_m,loss_db")
    sp.add_argument("--pl0", type=float, default=None, help="reference loss dB (default: config propagation)")
    sp.add_argument("--d0", type=float, default=None, help="reference distance m (default: config propagation)")
    return p


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else default_config()
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _jobs(args, cfg: RunConfig) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    if cfg.jobs > 0:
        return cfg.jobs
    return os.cpu_count() or 1


def _cmd_gen(args) -> int:
    cfg = _load(args)
    generate(args.out, _profile(cfg), args.count, jobs=_jobs(args, cfg))
    return 0


def _cmd_label(args) -> int:
    import dataclasses

    cfg = _load(args)
    profile = _profile(cfg)
    if args.conservative and profile.conservative is None:
        from .labeling import ConservativeConfig

        profile = dataclasses.replace(profile, conservative=ConservativeConfig())
    elif not args.conservative:
        profile = dataclasses.replace(profile, conservative=None)
    label(args.dataset, profile, jobs=_jobs(args, cfg))
    return 0


def _cmd_encode(args) -> int:
    cfg = _load(args)
    import dataclasses

    sheets = cfg.sheets
    if args.sheets is not None:
        sheets = dataclasses.replace(sheets, n_pu_sheets=args.sheets)
    if args.size is not None:
        sheets = dataclasses.replace(sheets, image_px=args.size)
    profile = dataclasses.replace(_profile(cfg), sheets=sheets)
    encode(args.dataset, profile, jobs=_jobs(args, cfg))
    manifest = read_dataset(args.dataset).manifest
    manifest["sheets"] = dataclasses.asdict(sheets)
    manifest["tensor"] = {"s": sheets.n_sheets, "h": sheets.image_px, "w": sheets.image_px}
    write_manifest(args.dataset, manifest)
    return 0


def _cmd_augment(args) -> int:
    cfg = _load(args)
    rotations = [int(x) for x in args.rotations.split(",") if x.strip()]
    far = (
        FarPuConfig(d_far_m=args.d_far, delta_db=args.delta_db, per_sample=args.far_pu_count)
        if args.far_pu
        else None
    )
    augment(args.dataset, args.out, _profile(cfg), rotations=rotations, far_pu=far, idw_locations=args.idw)
    return 0


def _cmd_pretrain(args) -> int:
    cfg = _load(args)
    pretrain(args.out, _profile(cfg), args.count, jobs=_jobs(args, cfg))
    return 0


def _cmd_baseline(args) -> int:
    cfg = _load(args)
    ds = read_dataset(args.dataset)
    rows = []
    for i, s in enumerate(ds.scenarios):
        su = s.sus[0]
        if args.algo == "lbt":
            d = lbt_allocate(s, su, cfg.propagation, cfg.oracle, cfg.lbt)
        else:
            d = ipb_allocate(s, su, cfg.oracle, cfg.ipb)
        rows.append((i, d.power_dbm, args.algo))
    write_predictions(args.out, rows)
    return 0


def _cmd_multisu(args) -> int:
    cfg = _load(args)
    import dataclasses

    from .datasetio import write_independent_grants, write_su_image
    from .imaging import encode_image
    from .oracle import optimal_power, sensor_readings

    sampler = dataclasses.replace(cfg.sampler, n_sus=args.n_sus)
    os.makedirs(args.out, exist_ok=True)
    scenarios = []
    rows = []
    independent = []
    for i in range(args.count):
        s = sample_scenario(sampler, cfg.region, i, cfg.propagation, cfg.oracle)
        s = s.with_sensors(sensor_readings(s, cfg.propagation, cfg.oracle))
        scenarios.append(s)
        for su in sorted(s.sus, key=lambda u: u.id):
            alone = dataclasses.replace(s, sus=(su,))
            p_i = optimal_power(alone, su, cfg.propagation, cfg.oracle)
            independent.append((i, su.id, p_i.power_dbm))
            if args.per_su_images:
                # the SU rendered as a power-scaled disk at its stand-alone
                # grant (floor brightness when denied), no other SUs drawn
                render_power = p_i.power_dbm if p_i.is_granted else cfg.sheets.pu_p_min_dbm
                variant = dataclasses.replace(s, sus=(), active_sus=((su, render_power),))
                write_su_image(args.out, i, su.id, encode_image(variant, cfg.sheets))
        channels = partition_channels(list(s.sus), args.channels, seed=s.seed)
        for ch, members in enumerate(channels):
            if not members:
                continue
            if args.algo == "binary":
                alloc = binary_alloc(s, members, cfg.propagation, cfg.oracle, threshold_db=args.threshold_db)
            else:
                ordered = greedy_order(s, members)
                alloc = sequential_alloc(s, ordered, cfg.propagation, cfg.oracle)
            for su_id, decision in sorted(alloc.grants):
                rows.append((i, su_id, decision.power_dbm, ch))
    write_scenarios(args.out, scenarios)
    write_multisu_labels(args.out, rows)
    write_independent_grants(args.out, independent)
    profile = RunProfile(
        region=cfg.region, sampler=sampler, propagation=cfg.propagation, oracle=cfg.oracle, sheets=cfg.sheets
    )
    manifest = profile.manifest(args.count)
    manifest["multisu"] = {
        "algo": args.algo,
        "n_sus": args.n_sus,
        "channels": args.channels,
        "per_su_images": bool(args.per_su_images),
    }
    write_manifest(args.out, manifest)
    grants = [q for _, _, q, _ in rows]
    granted = [q for q in grants if q is not None]
    print(f"allocated {len(granted)}/{len(grants)} SU requests; total {total_power_w(grants):.6g} W", end="")
    print(f"; fairness {fairness(grants):.4g}" if granted else "")
    return 0


def _cmd_eval(args) -> int:
    cfg = _load(args)
    ds = read_dataset(args.dataset)
    if not ds.labels:
        raise DatasetFormatError(f"dataset {args.dataset} has no labels.csv")
    labels = [(row.sample_id, row.decision.power_dbm) for row in ds.labels]
    preds = read_predictions(args.pred)
    by_algo: dict[str, list[tuple[int, float | None]]] = {}
    for sid, q, algo in preds:
        by_algo.setdefault(algo, []).append((sid, q))
    reports = []
    for algo in sorted(by_algo):
        rep = score(by_algo[algo], labels, cfg.oracle, algo=algo, dataset=os.path.basename(os.path.normpath(args.dataset)))
        reports.append(rep)
        print(f"{algo}: n={rep.n_samples} a_err={rep.a_err_db:.4f} dB a_fp={rep.a_fp_db:.4f} dB fp_rate={rep.fp_rate:.4f}")
    report(reports, args.report, args.format)
    return 0


def _cmd_fit_alpha(args) -> int:
    cfg = _load(args)
    pl0 = args.pl0 if args.pl0 is not None else cfg.propagation.pl0_db
    d0 = args.d0 if args.d0 is not None else cfg.propagation.d0_m
    samples = []
    with open(args.samples, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ["distance_m", "loss_db"]:
            raise DatasetFormatError(f"expected header distance_m,loss_db in {args.samples}")
        for d, loss in reader:
            samples.append((float(d), float(loss)))
    alpha = fit_alpha(samples, pl0_db=pl0, d0_m=d0)
    print(repr(alpha))
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "label": _cmd_label,
    "encode": _cmd_encode,
    "augment": _cmd_augment,
    "pretrain-gen": _cmd_pretrain,
    "baseline": _cmd_baseline,
    "multisu": _cmd_multisu,
    "eval": _cmd_eval,
    "fit-alpha": _cmd_fit_alpha,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, DatasetFormatError) as exc:
        print(f"specalloc: {exc}", file=sys.stderr)
        return DATA_ERROR
    except (ValueError, OSError) as exc:
        print(f"specalloc: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
