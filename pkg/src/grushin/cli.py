"""Command-line experiment runner.

Subcommands build grids and fields, run the bilinear means and the
verification probes, and emit CSV/plot data plus a run manifest.  Every
run is replayable: the manifest records the fully resolved flat
key-value configuration, and replaying it reproduces bit-identical
outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .dims import Dims
from .fields import lp_norm, synthesize, write_field_binary, write_field_csv
from .grid import GRID_KEYS, GridSpec, format_flat_config, make_grid, \
    parse_flat_config
from .report import ProbeReport
from .riesz import (bilinear_apply_direct, bilinear_apply_separated,
                    build_expansion, dilation_covariance_check)
from .symbols import (DyadicPiece, RieszParams, builtin_symbol_1d,
                      builtin_symbol_2d, dyadic_piece_symbol, riesz_symbol)
from .thresholds import threshold_table
from .verifier import (DecayProbeSpec, coefficient_decay_probe,
                       dyadic_decay_probe, family_fields, live_eigenvalues,
                       mixed_norm_decay_probe, pointwise_kernel_probe,
                       probe_grid, restriction_probe,
                       weighted_plancherel_probe)

WORKERS_ENV = "GRUSHIN_WORKERS"


def _resolve_config(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg.update(parse_flat_config(fh.read()))
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        cfg[key.strip()] = val.strip()
    return cfg


def config_hash(cfg: dict) -> str:
    canon = format_flat_config({k: str(v) for k, v in sorted(cfg.items())})
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _grid_from_config(cfg: dict):
    missing = [k for k in ("d1", "d2") if k not in cfg]
    if missing:
        raise SystemExit(f"missing required config key: {missing[0]}")
    spec = GridSpec.from_mapping(cfg)
    return make_grid(Dims(spec.d1, spec.d2), spec)


def _write_manifest(path: str, command: str, cfg: dict, outputs: list[str],
                    verdicts: dict, started: float):
    record = dict(cfg)
    record["command"] = command
    record["config_hash"] = config_hash(cfg)
    record["library_version"] = __version__
    record["wall_clock_s"] = f"{time.time() - started:.3f}"
    record["outputs"] = ";".join(outputs)
    for name, verdict in verdicts.items():
        record[f"verdict_{name}"] = verdict
    with open(path, "w") as fh:
        fh.write(format_flat_config({k: str(v) for k, v in record.items()}))


def _report_csv(report: ProbeReport, path: str, cfg_hash: str):
    with open(path, "w") as fh:
        fh.write(report.to_csv([f"config_hash={cfg_hash}"]))


def _workers(cfg: dict) -> int:
    if "workers" in cfg:
        return max(1, int(cfg["workers"]))
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


# ---------------------------------------------------------------------------
# subcommands

def cmd_grid(args) -> int:
    cfg = _resolve_config(args)
    grid = _grid_from_config(cfg)
    out = args.out or "grid.cfg"
    resolved = {k: getattr(grid.resolved, k) for k in GRID_KEYS}
    with open(out, "w") as fh:
        fh.write(f"# config_hash={config_hash(cfg)}\n")
        fh.write(format_flat_config({k: str(v) for k, v in resolved.items()}))
    _write_manifest(out + ".manifest", "grid", cfg, [out], {}, args._t0)
    print(f"grid written to {out} "
          f"({grid.n_x1} x {grid.resolved.x2_count} spatial nodes, "
          f"{grid.n_lambda} frequency nodes)")
    return 0


def cmd_field(args) -> int:
    cfg = _resolve_config(args)
    grid = _grid_from_config(cfg)
    family = cfg.get("family", "hermite-bump")
    seed = int(cfg.get("seed", 0))
    f = family_fields(family, grid, seed,
                      max_degree=int(cfg.get("max_degree", 4)))
    h = synthesize(f, grid)
    out = args.out or "field"
    chash = config_hash(cfg)
    write_field_binary(h, out + ".grsh")
    write_field_csv(h, out + ".csv", [f"config_hash={chash}"])
    _write_manifest(out + ".manifest", "field", cfg,
                    [out + ".grsh", out + ".csv"], {}, args._t0)
    print(f"field ({family}, seed {seed}) written to {out}.grsh / {out}.csv")
    return 0


def cmd_riesz(args) -> int:
    cfg = _resolve_config(args)
    grid = _grid_from_config(cfg)
    alpha = float(cfg.get("alpha", 1.0))
    big_r = float(cfg.get("R", 1.0))
    family = cfg.get("family", "hermite-bump")
    seed = int(cfg.get("seed", 0))
    band = (float(cfg.get("band_lo", 1.0 / 8.0)),
            float(cfg.get("band_hi", 0.45)))
    f = family_fields(family, grid, seed, band=band)
    g = family_fields(family, grid, seed + 1, band=band)
    chash = config_hash(cfg)
    out = args.out or "riesz_out"
    verdicts = {}
    if "j" in cfg:
        piece = DyadicPiece(int(cfg["j"]), alpha)
        direct = bilinear_apply_direct(dyadic_piece_symbol(piece), f, g, grid)
        exp = build_expansion(piece, eta1_samples=live_eigenvalues(f))
        sep = bilinear_apply_separated(exp, f, g, grid)
        den = math.sqrt(float(np.sum(np.abs(direct.values) ** 2))) or 1.0
        dev = math.sqrt(float(np.sum(np.abs(sep.values - direct.values) ** 2)))
        verdicts["separation_rel_l2"] = repr(dev / den)
        verdicts["separation_truncation"] = str(exp.truncation)
        verdicts["separation_tail"] = repr(exp.tail_bound)
        result = direct
    else:
        result = bilinear_apply_direct(
            riesz_symbol(RieszParams(alpha, big_r, grid.dims)), f, g, grid)
    write_field_binary(result, out + ".grsh")
    write_field_csv(result, out + ".csv", [f"config_hash={chash}"])
    _write_manifest(out + ".manifest", "riesz", cfg,
                    [out + ".grsh", out + ".csv"], verdicts, args._t0)
    print(f"bilinear mean written to {out}.grsh; "
          + (f"separated-path deviation {verdicts['separation_rel_l2']}"
             if verdicts else f"norm {lp_norm(result, 2.0):.6e}"))
    return 0


def cmd_kernel(args) -> int:
    cfg = _resolve_config(args)
    grid = _grid_from_config(cfg)
    name = cfg.get("symbol", "riesz")
    params = {k.split(".", 1)[1]: v for k, v in cfg.items()
              if k.startswith("symbol.")}
    chash = config_hash(cfg)
    out = args.out or "kernel.csv"
    n = int(cfg.get("n_points", 16))
    rng = np.random.default_rng(int(cfg.get("seed", 0)))
    pts = [((rng.uniform(-2, 2, grid.dims.d1), rng.uniform(-4, 4, grid.dims.d2)),
            (rng.uniform(-2, 2, grid.dims.d1), rng.uniform(-4, 4, grid.dims.d2)),
            (rng.uniform(-2, 2, grid.dims.d1), rng.uniform(-4, 4, grid.dims.d2)))
           for _ in range(n)]
    from .calculus import bilinear_kernel_batch, linear_kernel_batch
    with open(out, "w") as fh:
        fh.write(f"# config_hash={chash}\n")
        try:
            sym2 = builtin_symbol_2d(name, **params)
            vals = bilinear_kernel_batch(sym2, [p[0] for p in pts],
                                         [p[1] for p in pts],
                                         [p[2] for p in pts], grid)
            fh.write("x1,x2,y1,y2,z1,z2,re,im\n")
            for (x, y, z), v in zip(pts, vals):
                fh.write(f"{x[0][0]!r},{x[1][0]!r},{y[0][0]!r},{y[1][0]!r},"
                         f"{z[0][0]!r},{z[1][0]!r},{v.real!r},{v.imag!r}\n")
        except KeyError:
            sym1 = builtin_symbol_1d(name, **{k: float(v)
                                              for k, v in params.items()})
            vals = linear_kernel_batch(sym1, [p[0] for p in pts],
                                       [p[1] for p in pts], grid)
            fh.write("x1,x2,y1,y2,re,im\n")
            for (x, y, _), v in zip(pts, vals):
                fh.write(f"{x[0][0]!r},{x[1][0]!r},{y[0][0]!r},{y[1][0]!r},"
                         f"{v.real!r},{v.imag!r}\n")
    _write_manifest(out + ".manifest", "kernel", cfg, [out], {}, args._t0)
    print(f"kernel samples written to {out}")
    return 0


SUITES = ("core", "kernel", "plancherel", "decay", "all")


def _run_suite(suite: str, cfg: dict) -> dict[str, ProbeReport]:
    workers = _workers(cfg)
    seed = int(cfg.get("seed", 0))
    reports: dict[str, ProbeReport] = {}

    if suite in ("core", "all"):
        reports["core/partition"] = _partition_report()
        reports["core/roundtrip"] = _roundtrip_report()
    if suite in ("kernel", "all"):
        for (b1, b2) in ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0)):
            for variant in ("xx", "yz"):
                key = f"kernel/b{b1:g}-{b2:g}-{variant}"
                reports[key] = pointwise_kernel_probe(
                    1.0, b1, b2, variant=variant, seed=seed, workers=workers)
    if suite in ("plancherel", "all"):
        reports["plancherel/first-layer"] = weighted_plancherel_probe(
            "linear_first_layer", gamma1=0.25, workers=workers)
        reports["plancherel/bilinear"] = weighted_plancherel_probe(
            "bilinear", workers=workers)
        reports["plancherel/second-layer"] = weighted_plancherel_probe(
            "second_layer", gamma1=0.25, gamma2=0.4, workers=workers)
        reports["plancherel/truncated"] = weighted_plancherel_probe(
            "truncated", n1=1.0, n2=0.0, workers=workers)
        reports["plancherel/restriction"] = restriction_probe(0.0)
    if suite in ("decay", "all"):
        alpha = float(cfg.get("alpha", 0.5))
        reports["decay/coefficient"] = coefficient_decay_probe(
            1.0, 0.05, workers=workers)
        reports["decay/2-2-1"] = dyadic_decay_probe(
            DecayProbeSpec(alpha=alpha, p1=2, p2=2, p=1, seed=seed),
            workers=workers)
        reports["decay/mixed"] = mixed_norm_decay_probe(
            float(cfg.get("alpha_mixed", 1.6)), seed=seed, workers=workers)
    return reports


def _partition_report() -> ProbeReport:
    from .symbols import dyadic_piece_symbol as piece_sym, truncated_power
    e1 = np.linspace(0, 1, 201)
    e2 = np.linspace(0, 1, 199)
    E1, E2 = np.meshgrid(e1, e2, indexing="ij")
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0):
        total = np.zeros_like(E1, dtype=complex)
        for j in range(13):
            total += piece_sym(DyadicPiece(j, alpha))(E1, E2)
        target = truncated_power(1.0 - E1 - E2, alpha)
        s = 1.0 - E1 - E2
        mask = (s >= 2.0 ** -12) | (s <= 0)
        worst = max(worst, float(np.max(np.abs(total - target)[mask])))
    report = ProbeReport.from_samples([0.0], [np.log2(max(worst, 1e-300))],
                                      max_ratio=worst)
    report.verdict = "PASS" if worst <= 1e-10 else "FAIL"
    return report


def _roundtrip_report() -> ProbeReport:
    from .fields import analyze
    grid = probe_grid("default")
    f = family_fields("hermite-bump", grid, 0, band=(1.25, 2.0), max_degree=16)
    back = analyze(synthesize(f, grid), 16, lambda_support=f.lambda_support)
    err = float(np.max(np.abs(back.coeffs - f.coeffs))
                / np.max(np.abs(f.coeffs)))
    report = ProbeReport.from_samples([0.0], [np.log2(max(err, 1e-300))],
                                      max_ratio=err)
    report.verdict = "PASS" if err <= 1e-6 else "FAIL"
    return report


def cmd_verify(args) -> int:
    cfg = _resolve_config(args)
    suite = cfg.get("suite", getattr(args, "suite", None) or "core")
    if suite not in SUITES:
        raise SystemExit(f"unknown suite {suite!r}; available: {SUITES}")
    cfg["suite"] = suite
    chash = config_hash(cfg)
    out = args.out or f"verify_{suite}"
    started = args._t0
    reports = _run_suite(suite, cfg)
    os.makedirs(out, exist_ok=True)
    verdicts = {}
    lines = []
    for name, rep in sorted(reports.items()):
        safe = name.replace("/", "_")
        _report_csv(rep, os.path.join(out, safe + ".csv"), chash)
        verdicts[safe] = rep.verdict
        lines.append(f"{name},{rep.verdict},{rep.slope!r},{rep.max_ratio!r}")
    agg = all(rep.passed for rep in reports.values())
    with open(os.path.join(out, "verdicts.csv"), "w") as fh:
        fh.write(f"# config_hash={chash}\n")
        fh.write("probe,verdict,slope,max_ratio\n")
        fh.write("\n".join(lines) + "\n")
        fh.write(f"aggregate,{'PASS' if agg else 'FAIL'},,\n")
    _write_manifest(os.path.join(out, "manifest.txt"), "verify", cfg,
                    [out], verdicts, started)
    for name, rep in sorted(reports.items()):
        print(f"{name}: {rep.verdict}")
    print(f"aggregate: {'PASS' if agg else 'FAIL'}")
    return 0 if agg else 1


def cmd_thresholds(args) -> int:
    cfg = _resolve_config(args)
    d1 = int(cfg.get("d1", 1))
    d2 = int(cfg.get("d2", 1))
    variant = cfg.get("variant", "general")
    resolution = int(cfg.get("resolution", 20))
    table = threshold_table(Dims(d1, d2), variant, resolution)
    out = args.out or "thresholds.csv"
    with open(out, "w") as fh:
        fh.write(f"# config_hash={config_hash(cfg)}\n")
        fh.write(table)
    _write_manifest(out + ".manifest", "thresholds", cfg, [out], {}, args._t0)
    print(f"threshold table ({variant}, resolution {resolution}) "
          f"written to {out}")
    return 0


PROBES = ("kernel", "plancherel", "coefficient", "decay", "mixed",
          "dilation", "weight-integral")


def cmd_probe(args) -> int:
    cfg = _resolve_config(args)
    name = cfg.get("probe", getattr(args, "probe", None) or "decay")
    cfg["probe"] = name
    workers = _workers(cfg)
    seed = int(cfg.get("seed", 0))
    if name == "kernel":
        rep = pointwise_kernel_probe(
            float(cfg.get("alpha", 1.0)), float(cfg.get("beta1", 0.0)),
            float(cfg.get("beta2", 0.0)), variant=cfg.get("variant", "xx"),
            seed=seed, workers=workers)
    elif name == "plancherel":
        rep = weighted_plancherel_probe(
            cfg.get("kind", "second_layer"),
            gamma1=float(cfg.get("gamma1", 0.25)),
            gamma2=float(cfg.get("gamma2", 0.25)),
            n1=float(cfg.get("N1", 1.0)), n2=float(cfg.get("N2", 0.0)),
            workers=workers)
    elif name == "coefficient":
        rep = coefficient_decay_probe(float(cfg.get("alpha", 1.0)),
                                      float(cfg.get("beta", 0.05)),
                                      workers=workers)
    elif name == "decay":
        p1 = float(cfg.get("p1", 2)); p2 = float(cfg.get("p2", 2))
        inv = (0 if math.isinf(p1) else 1 / p1) + \
            (0 if math.isinf(p2) else 1 / p2)
        p = math.inf if inv == 0 else 1.0 / inv
        rep = dyadic_decay_probe(DecayProbeSpec(
            alpha=float(cfg.get("alpha", 0.5)), p1=p1, p2=p2, p=p, seed=seed),
            workers=workers)
    elif name == "mixed":
        rep = mixed_norm_decay_probe(float(cfg.get("alpha", 1.6)), seed=seed,
                                     workers=workers)
    elif name == "dilation":
        grid = probe_grid("dilation")
        band = (0.25, 0.75)
        f = family_fields("hermite-bump", grid, seed, band=band, max_degree=2)
        g = family_fields("hermite-bump", grid, seed + 1, band=band,
                          max_degree=2)
        t = float(cfg.get("t", 2.0))
        rep = dilation_covariance_check(
            RieszParams(float(cfg.get("alpha", 1.0)), t * t, grid.dims),
            f, g, t, grid)
    elif name == "weight-integral":
        from .geometry import Point, weight_integral_check
        rep = weight_integral_check(
            Point([float(cfg.get("a1", 0.0))], [float(cfg.get("a2", 0.0))]),
            [0.25, 0.5, 1.0, 2.0, 4.0], float(cfg.get("gamma", 0.5)),
            cfg.get("layer", "first"))
    else:
        raise SystemExit(f"unknown probe {name!r}; available: {PROBES}")
    out = args.out or f"probe_{name}.csv"
    _report_csv(rep, out, config_hash(cfg))
    _write_manifest(out + ".manifest", "probe", cfg, [out],
                    {name: rep.verdict}, args._t0)
    print(f"{name}: {rep.verdict} (slope {rep.slope!r}, "
          f"max_ratio {rep.max_ratio!r})")
    return 0 if rep.passed else 1


def cmd_replay(args) -> int:
    with open(args.manifest) as fh:
        record = parse_flat_config(fh.read())
    command = record.get("command")
    if command not in ("grid", "field", "riesz", "kernel", "verify",
                       "thresholds", "probe"):
        raise SystemExit(f"manifest has no replayable command: {command!r}")
    drop = {"command", "config_hash", "library_version", "wall_clock_s",
            "outputs"}
    cfg = {k: v for k, v in record.items()
           if k not in drop and not k.startswith("verdict_")}
    ns = argparse.Namespace(config=None, set=[f"{k}={v}"
                                              for k, v in cfg.items()],
                            out=args.out, suite=None, probe=None,
                            _t0=time.time())
    return _DISPATCH[command](ns)


_DISPATCH = {
    "grid": cmd_grid,
    "field": cmd_field,
    "riesz": cmd_riesz,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
    "thresholds": cmd_thresholds,
    "probe": cmd_probe,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grushin",
        description="Spectral calculus and bilinear summability experiments "
                    "for the degenerate two-layer operator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
            ("grid", "build and validate a grid from a flat config"),
            ("field", "generate a family field and write it out"),
            ("riesz", "apply the bilinear mean (direct and separated)"),
            ("kernel", "sample multiplier kernels at random points"),
            ("verify", "run a named probe suite"),
            ("thresholds", "emit the smoothness-threshold table"),
            ("probe", "run a single probe"),
            ("replay", "re-run a recorded manifest")):
        p = sub.add_parser(name, help=helptext)
        if name == "replay":
            p.add_argument("manifest")
        else:
            p.add_argument("--config", help="flat key=value config file")
            p.add_argument("--set", action="append", metavar="KEY=VALUE",
                           help="override a config key")
        if name == "verify":
            p.add_argument("--suite", choices=SUITES)
        if name == "probe":
            p.add_argument("--probe", choices=PROBES)
        p.add_argument("--out", help="output path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args._t0 = time.time()
    if args.command == "replay":
        return cmd_replay(args)
    return _DISPATCH[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
