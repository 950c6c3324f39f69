"""Command-line front end: ``sykmon <command> --config run.json --out table.csv``.

Every command reads one JSON document with an integer ``version`` field (1);
unknown keys anywhere are configuration errors (exit code 2). Sweep commands
write CSV (17 significant digits, fixed column order) or JSON when the output
path ends in ``.json``. Exit code 3 means at least one sweep point failed to
converge from every seed; its row is still written with ``converged=false``.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import framepot, landau, saddle, wkb
from .model import (BoundarySpec, ErrorProfile, ModelParams, SiteInterval, TimeGrid,
                    validate)

log = logging.getLogger("sykmon")

CONFIG_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_NONCONV = 0, 2, 3
BRANCH_LABELS = ("SYMMETRIC", "BROKEN_PLUS", "BROKEN_MINUS",
                 "WALL_ENCLOSES_A", "WALL_ENCLOSES_COMPLEMENT")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- config parsing

def _check_keys(block: dict, allowed, where: str, required=()):
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be an object")
    extra = set(block) - set(allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(extra)}")
    missing = [k for k in required if k not in block]
    if missing:
        raise ConfigError(f"missing key(s) in {where}: {missing}")


def axis_values(spec) -> list:
    """Expand an axis: a list, or {start, stop, count, scale in {linear, log}}."""
    if isinstance(spec, list):
        if not spec:
            raise ConfigError("sweep axis is empty")
        return [float(v) for v in spec]
    _check_keys(spec, ("start", "stop", "count", "scale"), "axis", ("start", "stop", "count"))
    count = int(spec["count"])
    if count < 1:
        raise ConfigError("axis count must be >= 1")
    scale = spec.get("scale", "linear")
    if scale == "linear":
        vals = np.linspace(spec["start"], spec["stop"], count)
    elif scale == "log":
        if spec["start"] <= 0 or spec["stop"] <= 0:
            raise ConfigError("log axis needs positive bounds")
        vals = np.geomspace(spec["start"], spec["stop"], count)
    else:
        raise ConfigError(f"unknown axis scale {scale!r}")
    return [float(v) for v in vals]


MODEL_KEYS = ("J", "U_tilde", "mu_tilde", "q", "L", "N_flavor", "periodic")
GRID_KEYS = ("T", "T_over_L", "dt")
ERR_KEYS = ("gamma", "gamma_prime", "T_h", "erasure_region")
REGION_KEYS = ("start", "length", "fraction")
SOLVER_KEYS = ("mixing", "tol", "max_iter", "anderson_depth", "layer_width")
SWEEP_AXES = ("mu_tilde", "U_tilde", "gamma", "gamma_prime", "T_h", "L", "T")


@dataclass
class PointSpec:
    params: ModelParams
    grid: TimeGrid
    err: ErrorProfile
    region: SiteInterval
    solver: saddle.SolverConfig
    layer_width: float


def _model(block: dict) -> dict:
    _check_keys(block, MODEL_KEYS, "model")
    out = {"J": 1.0, "U_tilde": 0.0, "mu_tilde": 0.5, "q": 4, "L": 8, "N_flavor": 1.0,
           "periodic": True}
    out.update(block)
    return out


def _point(cfg: dict, overrides: dict) -> PointSpec:
    m = _model(cfg.get("model", {}))
    gblk = dict(cfg.get("grid", {}))
    _check_keys(gblk, GRID_KEYS, "grid")
    eblk = dict(cfg.get("errors", {}))
    _check_keys(eblk, ERR_KEYS, "errors")
    rblk = dict(cfg.get("region", {"fraction": 0.5}))
    _check_keys(rblk, REGION_KEYS, "region")
    sblk = dict(cfg.get("solver", {}))
    _check_keys(sblk, SOLVER_KEYS, "solver")

    for k, v in overrides.items():
        if k in ("mu_tilde", "U_tilde", "L"):
            m[k] = v
        elif k in ("gamma", "gamma_prime", "T_h"):
            eblk[k] = v
        elif k == "T":
            gblk.pop("T_over_L", None)
            gblk["T"] = v
    L = int(m["L"])
    J = float(m["J"])
    params = ModelParams.dimensionless(float(m["mu_tilde"]), float(m["U_tilde"]), L=L, J=J,
                                       q=int(m["q"]), N_flavor=float(m["N_flavor"]),
                                       periodic=bool(m["periodic"]))
    dt = float(gblk.get("dt", 0.05 / J))
    if "T" in gblk:
        T = float(gblk["T"])
    else:
        T = float(gblk.get("T_over_L", 1.0)) * L / J
    grid = TimeGrid.from_T(T, dt)
    err = ErrorProfile(gamma_bulk=float(eblk.get("gamma", 0.0)),
                       gamma_boundary=float(eblk.get("gamma_prime", 0.0)),
                       T_h=float(eblk.get("T_h", 0.0)),
                       erasure_region=frozenset(eblk.get("erasure_region", [])))
    if "length" in rblk:
        region = SiteInterval(int(rblk.get("start", 0)), int(rblk["length"]))
    else:
        region = SiteInterval(int(rblk.get("start", 0)),
                              int(round(float(rblk.get("fraction", 0.5)) * L)))
    solver = saddle.SolverConfig(mixing=float(sblk.get("mixing", 0.3)),
                                 tol=float(sblk.get("tol", 1e-9)),
                                 max_iter=int(sblk.get("max_iter", 500)),
                                 anderson_depth=int(sblk.get("anderson_depth", 6)))
    rep = validate(params, grid, err, BoundarySpec.twisted(L, region))
    if not rep.ok:
        raise ConfigError("; ".join(rep.violations))
    return PointSpec(params, grid, err, region, solver,
                     float(sblk.get("layer_width", 1.0 / J)))


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("version") != CONFIG_VERSION:
        raise ConfigError(f"config version must be {CONFIG_VERSION}")
    return cfg


# ---------------------------------------------------------------- output

def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def check_finite(rows: list) -> list:
    """Drop rows carrying NaN/Inf, logging each rejection."""
    good = []
    for r in rows:
        bad = [k for k, v in r.items() if isinstance(v, (float, np.floating)) and not math.isfinite(v)]
        if bad:
            log.error("rejecting row with non-finite values in %s: %s", bad, r)
            continue
        good.append(r)
    return good


def write_table(rows: list, columns: list, out) -> None:
    rows = check_finite(rows)
    out = Path(out)
    if out.suffix == ".json":
        with open(out, "w") as fh:
            json.dump([{c: r.get(c) for c in columns} for r in rows], fh, indent=1)
        return
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in columns])


# ---------------------------------------------------------------- entropy sweeps

ENTROPY_KEYS = ("version", "model", "grid", "errors", "region", "solver", "sweep",
                "continuation", "chunk", "seed")


def _sweep(cfg: dict):
    sw = cfg.get("sweep")
    if sw is None:
        return None, [None]
    _check_keys(sw, ("axis", "values"), "sweep", ("axis", "values"))
    if sw["axis"] not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {sw['axis']!r}")
    vals = axis_values(sw["values"])
    if sw["axis"] == "L":
        vals = [int(v) for v in vals]
    return sw["axis"], vals


def _entropy_row(spec: PointSpec, res, axis, value, wall):
    p = spec.params
    row = {"axis": axis or "", "value": value if value is not None else 0.0,
           "L": p.L, "T": spec.grid.T, "dt": spec.grid.dt, "mu_tilde": p.mu_tilde,
           "U_tilde": p.U_tilde, "gamma": spec.err.gamma_bulk,
           "gamma_prime": spec.err.gamma_boundary, "T_h": spec.err.T_h,
           "A_start": spec.region.start, "A_length": spec.region.length,
           "zeta": saddle.zeta_of_mu(p.mu_tilde, spec.err.gamma_bulk, p.U_tilde),
           "wall_time": wall}
    if res is None:
        row.update(S2=None, converged=False, iterations=0, residual=None)
        for lab in BRANCH_LABELS:
            row[f"S2_{lab}"] = None
        return row
    row.update(S2=res.S2, converged=True,
               iterations=sum(r["iterations"] for r in res.per_saddle_actions),
               residual=max(r["residual"] for r in res.per_saddle_actions if r["converged"]))
    for lab in BRANCH_LABELS:
        row[f"S2_{lab}"] = res.branch(lab)
    return row


ENTROPY_COLUMNS = (["axis", "value", "L", "T", "dt", "mu_tilde", "U_tilde", "gamma",
                    "gamma_prime", "T_h", "A_start", "A_length", "zeta", "S2"]
                   + [f"S2_{lab}" for lab in BRANCH_LABELS]
                   + ["converged", "iterations", "residual", "wall_time"])


def _part_path(parts: Path, idx: int) -> Path:
    return parts / f"point{idx:05d}.json"


def _branch_ckpt(parts: Path, idx: int, label: str) -> Path:
    return parts / f"point{idx:05d}_{label}.sykm"


def _run_chain(cfg: dict, axis, chain: list, parts: str, continuation: bool):
    """Solve the sweep points of one shard in axis order, seeding from the predecessor."""
    parts = Path(parts) if parts else None
    rows = []
    prev = {}
    for idx, value in chain:
        if parts is not None and _part_path(parts, idx).exists():
            row = json.loads(_part_path(parts, idx).read_text())
            rows.append(row)
            prev = {lab: saddle.read_checkpoint(_branch_ckpt(parts, idx, lab)).G
                    for lab in row.get("_branches", [])}
            continue
        spec = _point(cfg, {} if axis is None else {axis: value})
        t0 = time.perf_counter()
        seeds = saddle.default_seed_library(spec.params, spec.grid, spec.err, spec.region,
                                            layer_width=spec.layer_width)
        n = saddle.full_grid(spec.grid, spec.err).n_nodes
        shape = (spec.params.L, n, 8, 8)
        if continuation and prev:
            seeds = [saddle.Seed.array(prev[s.name], label=s.name)
                     if s.name in prev and prev[s.name].shape == shape else s for s in seeds]
        try:
            res = saddle.quasi_entropy(spec.params, spec.grid, spec.err, spec.region,
                                       spec.solver, seeds=seeds)
            # cold-start fallback for branches the continuation seed lost
            missing = [s for s, r in zip(seeds, res.per_saddle_actions)
                       if not r["converged"] and s.kind == "ARRAY"]
            if missing:
                res = saddle.quasi_entropy(spec.params, spec.grid, spec.err, spec.region,
                                           spec.solver)
        except saddle.NonConvergedError as exc:
            log.warning("point %s=%s: %s", axis, value, exc)
            res = None
        row = _entropy_row(spec, res, axis, value, time.perf_counter() - t0)
        branches = {}
        if res is not None:
            branches = _branch_tensors(spec, res, seeds)
        row["_branches"] = sorted(branches)
        if parts is not None:
            for lab, g in branches.items():
                saddle.write_checkpoint(_branch_ckpt(parts, idx, lab), g, np.zeros_like(g),
                                        {"label": lab, "index": idx})
            _part_path(parts, idx).write_text(json.dumps(row))
        prev = branches
        rows.append(row)
        log.info("%s=%s S2=%s", axis, value, row["S2"])
    return rows


def _branch_tensors(spec: PointSpec, res, seeds) -> dict:
    return {r.seed: r.G.equal_time for r in res.candidates if r.converged}


def _shards(points: list, chunk: int) -> list:
    return [points[i:i + chunk] for i in range(0, len(points), chunk)]


def _execute(cfg: dict, axis, values: list, workers: int, parts, continuation: bool,
             chunk: int) -> list:
    points = list(enumerate(values))
    shards = _shards(points, chunk or len(points))
    if workers <= 1 or len(shards) == 1:
        rows = [r for sh in shards for r in _run_chain(cfg, axis, sh, parts, continuation)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_run_chain, cfg, axis, sh, parts, continuation) for sh in shards]
            rows = [r for f in futs for r in f.result()]
    return sorted(rows, key=lambda r: (r["value"], r["L"]))


def cmd_entropy(cfg: dict, out, workers: int = 1, resume: bool = False) -> int:
    _check_keys(cfg, ENTROPY_KEYS, "config")
    axis, values = _sweep(cfg)
    _point(cfg, {} if axis is None else {axis: values[0]})     # validate early
    parts = Path(str(out) + ".parts")
    if not resume and parts.exists():
        for f in parts.iterdir():
            f.unlink()
    parts.mkdir(exist_ok=True)
    rows = _execute(cfg, axis, values, workers, str(parts),
                    bool(cfg.get("continuation", True)), int(cfg.get("chunk", 0)))
    write_table(rows, ENTROPY_COLUMNS, out)
    return EXIT_NONCONV if any(not r["converged"] for r in rows) else EXIT_OK


FIT_KEYS = ENTROPY_KEYS + ("L_values", "points")


def cmd_fit(cfg: dict, out, workers: int = 1, resume: bool = False) -> int:
    """Entropy-density fits: S2 versus L at every sweep value (or given points)."""
    _check_keys(cfg, FIT_KEYS, "config")
    cols = ["axis", "value", "density", "intercept", "r2", "stderr", "n_points", "converged"]
    if "points" in cfg:
        fit = saddle.fit_entropy_density(cfg["points"])
        row = {"axis": "", "value": 0.0, "density": fit.density, "intercept": fit.intercept,
               "r2": fit.r2, "stderr": fit.stderr, "n_points": len(cfg["points"]),
               "converged": True}
        write_table([row], cols, out)
        return EXIT_OK
    Ls = [int(v) for v in cfg.get("L_values", [8, 10, 12])]
    axis, values = _sweep(cfg)
    sub = {k: v for k, v in cfg.items() if k not in ("L_values", "points", "sweep")}
    parts = Path(str(out) + ".parts")
    if not resume and parts.exists():
        for f in parts.iterdir():
            f.unlink()
    parts.mkdir(exist_ok=True)
    rows = []
    status = EXIT_OK
    for vi, value in enumerate(values):
        c = dict(sub)
        if axis is not None:
            c["sweep"] = {"axis": "L", "values": Ls}
            c = _with_override(c, axis, value)
        else:
            c["sweep"] = {"axis": "L", "values": Ls}
        sp = parts / f"value{vi:04d}"
        sp.mkdir(exist_ok=True)
        pts = _execute(c, "L", [float(L) for L in Ls], workers, str(sp), False, 1)
        ok = all(p["converged"] for p in pts)
        row = {"axis": axis or "", "value": value if value is not None else 0.0,
               "n_points": len(pts), "converged": ok}
        if ok:
            fit = saddle.fit_entropy_density([(p["L"], p["S2"]) for p in pts])
            row.update(density=fit.density, intercept=fit.intercept, r2=fit.r2,
                       stderr=fit.stderr)
        else:
            status = EXIT_NONCONV
        for p in pts:
            row[f"S2_L{p['L']}"] = p["S2"]
        rows.append(row)
    write_table(rows, cols + [f"S2_L{L}" for L in Ls], out)
    return status


def _with_override(cfg: dict, axis: str, value) -> dict:
    c = json.loads(json.dumps(cfg))
    if axis in ("mu_tilde", "U_tilde", "L"):
        c.setdefault("model", {})[axis] = value
    elif axis in ("gamma", "gamma_prime", "T_h"):
        c.setdefault("errors", {})[axis] = value
    elif axis == "T":
        c.setdefault("grid", {}).pop("T_over_L", None)
        c["grid"]["T"] = value
    return c


# ---------------------------------------------------------------- single solve

SOLVE_KEYS = ("version", "model", "grid", "errors", "region", "solver", "twisted", "seed",
              "checkpoint")


def cmd_solve(cfg: dict, out, workers: int = 1, resume: bool = False) -> int:
    _check_keys(cfg, SOLVE_KEYS, "config")
    spec = _point(cfg, {})
    L = spec.params.L
    bc = BoundarySpec.twisted(L, spec.region) if cfg.get("twisted", False) \
        else BoundarySpec.untwisted(L)
    seed_name = cfg.get("seed", "BROKEN_PLUS")
    ckpt = Path(cfg.get("checkpoint", str(Path(out).with_suffix(".sykm"))))
    if resume and ckpt.exists():
        seed = saddle.Seed.checkpoint(ckpt)
    elif seed_name in ("SYMMETRIC", "BROKEN_PLUS", "BROKEN_MINUS"):
        seed = saddle.Seed(seed_name)
    else:
        raise ConfigError(f"unknown seed {seed_name!r}")
    s = spec.solver
    scfg = saddle.SolverConfig(s.mixing, s.tol, s.max_iter, seed, s.anderson_depth)
    res = saddle.solve_saddle(spec.params, spec.grid, spec.err, bc, scfg)
    saddle.save_result(ckpt, res, spec.params, spec.grid, spec.err, bc)
    summary = {"converged": res.converged, "iterations": res.iterations,
               "residual": res.residual, "action": res.action, "seed": res.seed,
               "checkpoint": str(ckpt), "wall_time": res.wall_time}
    with open(out, "w") as fh:
        json.dump(summary, fh, indent=1)
    return EXIT_OK if res.converged else EXIT_NONCONV


# ---------------------------------------------------------------- closed-form tables

def cmd_zeta(cfg: dict, out, workers: int = 1, resume: bool = False) -> int:
    _check_keys(cfg, ("version", "mu_tilde", "gamma", "U_tilde"), "config", ("mu_tilde",))
    mus = axis_values(cfg["mu_tilde"])
    gammas = axis_values(cfg.get("gamma", [0.0]))
    U = float(cfg.get("U_tilde", 0.0))
    rows = [{"mu_tilde": m, "gamma": g, "U_tilde": U, "zeta": saddle.zeta_of_mu(m, g, U)}
            for g in gammas for m in mus]
    write_table(rows, ["mu_tilde", "gamma", "U_tilde", "zeta"], out)
    return EXIT_OK


LANDAU_KEYS = ("version", "table", "J", "U_tilde", "mu_tilde", "gamma", "gamma_prime", "T_h",
               "eta", "a", "e", "L", "N_flavor", "field_corrected")


def cmd_landau(cfg: dict, out, workers: int = 1, resume: bool = False) -> int:
    """Tables: ``coefficients`` (per mu), ``threshold_curve`` (per mu) or
    ``mutual_information`` (per erased fraction e)."""
    _check_keys(cfg, LANDAU_KEYS, "config", ("table",))
    table = cfg["table"]
    J = float(cfg.get("J", 1.0))
    U = float(cfg.get("U_tilde", 0.4))
    T_h = float(cfg.get("T_h", 1.0))
    eta = float(cfg.get("eta", 0.0))
    gp = float(cfg.get("gamma_prime", 0.0))
    if table == "coefficients":
        rows = []
        g = float(cfg.get("gamma", 0.0))
        a = float(cfg.get("a", 2 / 3))
        for mt in axis_values(cfg.get("mu_tilde", [0.6])):
            p = ModelParams.dimensionless(mt, U, L=2, J=J)
            c = landau.effective_coeffs(p, g)
            sig = landau.line_tension(c) if c.lam_prime < 0 else 0.0
            geom = landau.WallGeometry(T_h=T_h, a=a)
            h_star = landau.pinning_field(geom, sig) if a > 0.5 else None
            rows.append({"mu_tilde": mt, "gamma": g, "r": c.r, "lambda": c.lam,
                         "lambda_prime": c.lam_prime, "h": c.h, "sigma": sig,
                         "h_star": h_star,
                         "gamma_star": None if h_star is None else landau.field_to_gamma(p, h_star)})
        cols = ["mu_tilde", "gamma", "r", "lambda", "lambda_prime", "h", "sigma", "h_star",
                "gamma_star"]
    elif table == "threshold_curve":
        p = ModelParams.dimensionless(0.5, U, L=2, J=J)
        rows = landau.threshold_curve(axis_values(cfg.get("mu_tilde", [0.5])), eta, gp, T_h, p,
                                      bool(cfg.get("field_corrected", False)))
        for r in rows:
            r["eta"], r["gamma_prime"], r["T_h"] = eta, gp, T_h
        cols = ["mu_tilde", "eta", "gamma_prime", "T_h", "sigma", "h", "e_c", "in_range"]
    elif table == "mutual_information":
        mt = float(cfg.get("mu_tilde", 0.6))
        p = ModelParams.dimensionless(mt, U, L=2, J=J)
        c = landau.effective_coeffs(p, gp)
        sig = landau.line_tension(landau.effective_coeffs(p, 0.0))
        geom = landau.WallGeometry(T_h=T_h, eta=eta, L=float(cfg.get("L", 1.0)),
                                   N_flavor=float(cfg.get("N_flavor", 1.0)))
        rows = [{"e": e, "I2": landau.mutual_information(e, geom, sig, c.h),
                 "I2_hp": landau.hp_mutual_information(e, geom, sig, c.h)}
                for e in axis_values(cfg.get("e", {"start": 0, "stop": 1, "count": 21}))]
        cols = ["e", "I2", "I2_hp"]
    else:
        raise ConfigError(f"unknown landau table {table!r}")
    write_table(rows, cols, out)
    return EXIT_OK


def cmd_wkb(cfg: dict, out, workers: int = 1, resume: bool = False) -> int:
    _check_keys(cfg, ("version", "kind", "sigma", "h", "T_h", "T", "n_max", "grid_points"),
                "config", ("sigma", "h", "T_h", "T"))
    pot = wkb.WallPotential(cfg.get("kind", "PLUS"), float(cfg["sigma"]), float(cfg["h"]),
                            float(cfg["T_h"]), float(cfg["T"]))
    n_max = int(cfg.get("n_max", 10))
    oracle = wkb.grid_diagonalize(pot, int(cfg.get("grid_points", 4000)), n_eig=n_max)
    rows = []
    for i, (branch, e) in enumerate(wkb.wkb_spectrum(pot, n_max)):
        rows.append({"n": i + 1, "branch": branch, "E_wkb": e, "E_oracle": oracle[i],
                     "rel_diff": (e - oracle[i]) / abs(oracle[i])})
    write_table(rows, ["n", "branch", "E_wkb", "E_oracle", "rel_diff"], out)
    return EXIT_OK


def cmd_framepot(cfg: dict, out, workers: int = 1, resume: bool = False) -> int:
    _check_keys(cfg, ("version", "m", "NL", "J", "U", "q", "t", "epsilon"), "config",
                ("m", "NL", "t"))
    rows = []
    for t in axis_values(cfg["t"]):
        inp = framepot.FramePotentialInput(int(cfg["m"]), float(cfg["NL"]),
                                           float(cfg.get("J", 1.0)), float(cfg.get("U", 0.0)),
                                           int(cfg.get("q", 4)), t)
        rows.append({"t": t, "log_F": framepot.log_frame_potential(inp),
                     "log_haar": framepot.log_haar(inp.m)})
    write_table(rows, ["t", "log_F", "log_haar"], out)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "entropy": cmd_entropy, "zeta": cmd_zeta,
            "landau": cmd_landau, "wkb": cmd_wkb, "framepot": cmd_framepot, "fit": cmd_fit}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sykmon", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", required=True)
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--resume", action="store_true")
        sp.add_argument("--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    workers = args.workers
    if workers is None:
        try:
            workers = int(os.environ.get("SYKM_WORKERS", "1"))
        except ValueError:
            print("error: SYKM_WORKERS must be an integer", file=sys.stderr)
            return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args.out, workers=max(1, workers), resume=args.resume)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, TypeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
