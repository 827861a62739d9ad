"""Batch command-line entry point.

Subcommands dispatch one experiment each and write their artifacts under
--out: `summary.json`, CSVs in the per-module schemas, and binary snapshot
directories.  Exit codes: 0 success, 2 usage, 3 data/precondition,
4 numerical failure.

Configuration may come from a flat `key = value` file with sections
[model] [grid] [evolve] [experiment]; every key is mirrored by a --key
flag, and flags override the file.  The environment variable FRACWAVE_SEED
fixes the RNG used for the `noise` datum family.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import diagnostics, evolve, illposed, kernel, models
from .errors import (
    FracwaveError,
    NumericsError,
    PreconditionError,
    UnknownModelError,
)
from .spectral import Grid, sobolev_norm
from .symbols import DispersionKind, SymbolSpec, decay_exponent

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

# key -> (section, type); every key is mirrored by a --key flag
_OPTION_TABLE = {
    "model": ("model", str),
    "kind": ("model", str),
    "alpha": ("model", float),
    "beta": ("model", float),
    "gamma1": ("model", float),
    "gamma2": ("model", float),
    "gamma3": ("model", float),
    "n": ("grid", int),
    "length": ("grid", float),
    "dt": ("evolve", float),
    "t_end": ("evolve", float),
    "integrator": ("evolve", str),
    "blowup_threshold": ("evolve", float),
    "snapshot_every": ("evolve", int),
    "t": ("experiment", float),
    "window_lo": ("experiment", float),
    "window_hi": ("experiment", float),
    "window_fraction": ("experiment", float),
    "datum": ("experiment", str),
    "amplitude": ("experiment", float),
    "width": ("experiment", float),
    "kappa": ("experiment", float),
    "mass": ("experiment", float),
    "s": ("experiment", float),
    "r": ("experiment", float),
    "ns": ("experiment", str),
    "traj": ("experiment", str),
}


def _fmt(v):
    if isinstance(v, float):
        return float(f"{v:.17g}")
    if isinstance(v, dict):
        return {k: _fmt(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_fmt(x) for x in v]
    return v


def _write_summary(out_dir: Path, payload: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "summary.json").write_text(
        json.dumps(_fmt(payload), indent=2, sort_keys=True) + "\n"
    )


class _Options:
    """Config-file values overridden by explicitly passed flags."""

    def __init__(self, args: argparse.Namespace):
        file_vals: dict[str, object] = {}
        if getattr(args, "config", None):
            parser = configparser.ConfigParser()
            read = parser.read(args.config)
            if not read:
                raise PreconditionError(f"config file not found: {args.config}")
            for key, (section, typ) in _OPTION_TABLE.items():
                if parser.has_option(section, key):
                    file_vals[key] = typ(parser.get(section, key))
        self._file = file_vals
        self._args = args

    def get(self, key: str, default=None):
        flag = getattr(self._args, key, None)
        if flag is not None:
            return flag
        return self._file.get(key, default)

    def require(self, key: str, what: str):
        v = self.get(key)
        if v is None:
            raise _UsageError(f"missing required option --{key.replace('_', '-')} ({what})")
        return v


class _UsageError(Exception):
    pass


def _resolve_spec(opts: _Options) -> SymbolSpec:
    name = opts.get("model")
    if name is not None:
        spec = models.preset(name).spec
    else:
        kind = opts.get("kind")
        if kind is None:
            raise _UsageError("provide --model NAME or --kind with --alpha/--beta")
        try:
            dk = DispersionKind(kind)
        except ValueError:
            raise _UsageError(f"unknown kind {kind!r}; use hilbert or laplacian")
        spec = SymbolSpec(
            dk,
            float(opts.require("alpha", "dissipation order")),
            float(opts.require("beta", "anti-dissipation order")),
        )
    overrides = {}
    for key in ("alpha", "beta", "gamma1", "gamma2", "gamma3"):
        v = opts.get(key)
        if v is not None:
            overrides[key] = float(v)
    if overrides:
        spec = replace(spec, **overrides)
    return spec


def _resolve_grid(opts: _Options, default_n=8192, default_len=800.0) -> Grid:
    return Grid(int(opts.get("n", default_n)), float(opts.get("length", default_len)))


def _resolve_datum(opts: _Options, grid: Grid):
    family = str(opts.get("datum", "gaussian"))
    amp = float(opts.get("amplitude", 0.5))
    width = float(opts.get("width", 4.0))
    if family == "gaussian":
        u0 = models.gaussian_datum(grid, amp, width)
    elif family == "wavelet":
        u0 = models.wavelet_datum(grid, amp, width)
    elif family == "even-wavelet":
        u0 = models.even_wavelet_datum(grid, amp, width)
    elif family == "algebraic":
        u0 = models.algebraic_datum(grid, amp, float(opts.require("kappa", "datum decay rate")))
    elif family == "noise":
        seed = int(os.environ.get("FRACWAVE_SEED", "0"))
        u0 = models.noise_datum(grid, amp, seed)
    else:
        raise _UsageError(f"unknown datum family {family!r}")
    mass = opts.get("mass")
    if mass is not None:
        u0 = models.normalize_mass(u0, float(mass))
    return u0


def _spec_dict(spec: SymbolSpec) -> dict:
    return {
        "kind": spec.kind.value,
        "alpha": spec.alpha,
        "beta": spec.beta,
        "gamma1": spec.gamma1,
        "gamma2": spec.gamma2,
        "gamma3": spec.gamma3,
        "decay_exponent": str(decay_exponent(spec)),
        "gwp_eligible": spec.gwp_eligible,
    }


def cmd_list_models(args) -> int:
    for name in models.available_models():
        p = models.preset(name)
        s = p.spec
        print(
            f"{name:8s} kind={s.kind.value:9s} alpha={s.alpha:g} beta={s.beta:g} "
            f"gammas=({s.gamma1:g},{s.gamma2:g},{s.gamma3:g}) "
            f"decay={p.decay} | {p.citation}"
        )
    return EXIT_OK


def cmd_kernel(args) -> int:
    opts = _Options(args)
    spec = _resolve_spec(opts)
    t = float(opts.require("t", "evaluation time"))
    if t <= 0:
        raise PreconditionError(f"kernel time must be positive, got {t}")
    grid = _resolve_grid(opts, default_n=2**14, default_len=2000.0)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    profile = kernel.kernel_profile(spec, t, grid=grid)
    profile.to_csv(out / "profile.csv")
    dvals = kernel.kernel_derivative_grid(spec, t, grid)
    dprof = kernel.KernelProfile(spec, t, grid.x, dvals, "fft", profile.truncation)
    dprof.to_csv(out / "dprofile.csv")

    w_lo = float(opts.get("window_lo", 30.0))
    w_hi = float(opts.get("window_hi", min(300.0, grid.length / 4.0)))
    n_expected = decay_exponent(spec)
    summary = {
        "spec": _spec_dict(spec),
        "t": t,
        "mass": float(np.sum(profile.values) * grid.dx),
        "l1_norm": kernel.kernel_lp_norm(spec, t, 1, grid=grid),
        "l2_norm": kernel.kernel_lp_norm(spec, t, 2, grid=grid),
        "linf_norm": kernel.kernel_lp_norm(spec, t, math.inf, grid=grid),
        "window": [w_lo, w_hi],
        "expected_exponent": str(n_expected),
    }
    try:
        fit = kernel.decay_fit(profile, (w_lo, w_hi))
        summary["fitted_exponent"] = fit.exponent
        summary["r_squared"] = fit.r_squared
        summary["floor_hit"] = fit.floor_hit
        summary["fit_samples"] = fit.n_samples
    except FracwaveError as exc:
        summary["fit_error"] = str(exc)
    _write_summary(out, summary)
    return EXIT_OK


def cmd_simulate(args) -> int:
    opts = _Options(args)
    spec = _resolve_spec(opts)
    grid = _resolve_grid(opts)
    u0 = _resolve_datum(opts, grid)
    cfg = evolve.EvolveConfig(
        dt=float(opts.require("dt", "time step")),
        t_end=float(opts.require("t_end", "final time")),
        integrator=str(opts.get("integrator", "etdrk2")),
        blowup_threshold=float(opts.get("blowup_threshold", math.inf)),
        snapshot_every=int(opts.get("snapshot_every", 1)),
    )
    out = Path(args.out)
    traj = evolve.run(u0, spec, cfg)
    evolve.save_trajectory(traj, spec, cfg, out / "trajectory")
    ledger = diagnostics.build_ledger(traj, spec)
    ledger.to_csv(out / "ledger.csv")
    summary = {
        "spec": _spec_dict(spec),
        "grid": {"n": grid.n, "length": grid.length},
        "dt": cfg.dt,
        "t_end": cfg.t_end,
        "integrator": cfg.integrator,
        "snapshots": len(traj.times),
        "final_time": float(traj.times[-1]),
        "final_l2": sobolev_norm(traj.states[-1], 0.0),
        "blowup_monitor": diagnostics.blowup_monitor(ledger),
        "halted": (
            None
            if traj.halted is None
            else {
                "time": traj.halted.time,
                "reason": traj.halted.reason,
                "monitor": traj.halted.monitor,
            }
        ),
    }
    _write_summary(out, summary)
    return EXIT_OK


def _load_traj(opts: _Options):
    traj_dir = opts.require("traj", "trajectory directory")
    meta = Path(traj_dir) / "meta.json"
    if not meta.exists():
        raise PreconditionError(f"no trajectory at {traj_dir} (missing meta.json)")
    traj, spec, cfg = evolve.load_trajectory(traj_dir)
    if len(traj.times) < 2:
        raise PreconditionError(f"trajectory at {traj_dir} has no post-initial snapshots")
    return traj, spec, cfg


def cmd_decay(args) -> int:
    opts = _Options(args)
    traj, spec, _ = _load_traj(opts)
    kappa = float(opts.get("kappa", 1e9))
    wf = float(opts.get("window_fraction", 0.125))
    n = decay_exponent(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for t, state in zip(traj.times[1:], traj.states[1:]):
        rows.append(diagnostics.decay_track(state, kappa, n, wf, t=float(t)))
    with open(out / "decay.csv", "w") as fh:
        fh.write(diagnostics.DECAY_CSV_HEADER + "\n")
        for rep in rows:
            fh.write(rep.csv_row() + "\n")
    last = rows[-1]
    _write_summary(
        out,
        {
            "spec": _spec_dict(spec),
            "kappa": kappa,
            "window_fraction": wf,
            "times": [float(t) for t in traj.times[1:]],
            "final_fitted_exponent": last.fitted_exponent,
            "final_weighted_sup": last.weighted_sup,
        },
    )
    return EXIT_OK


def cmd_illposed(args) -> int:
    opts = _Options(args)
    spec = _resolve_spec(opts)
    s = float(opts.require("s", "Sobolev index"))
    t = float(opts.get("t", 0.1))
    ns_raw = str(opts.get("ns", "64,128,256,512,1024"))
    try:
        Ns = [int(x) for x in ns_raw.split(",") if x.strip()]
    except ValueError:
        raise _UsageError(f"bad N list {ns_raw!r}; expected comma-separated integers")
    if len(Ns) < 2:
        raise _UsageError(f"need at least two N values, got {ns_raw!r}")
    report = illposed.illposedness_scan(
        spec, s, t, Ns, r=float(opts.get("r", 1.0))
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.to_csv(out / "illposed.csv")
    summary = {"spec": _spec_dict(spec), **report.summary()}
    summary["Ns"] = list(report.Ns)
    summary["norms"] = list(report.norms)
    summary["term_norms"] = {k: list(v) for k, v in report.term_norms.items()}
    _write_summary(out, summary)
    return EXIT_OK


def cmd_profile(args) -> int:
    opts = _Options(args)
    traj, spec, _ = _load_traj(opts)
    t = float(opts.get("t", traj.times[-1]))
    w_lo = float(opts.get("window_lo", 40.0))
    w_hi = float(opts.get("window_hi", traj.grid.length / 8.0))
    ledger = diagnostics.build_ledger(traj, spec)
    coeff = diagnostics.profile_coefficient(traj.states[0], ledger, spec, t)
    ratio_err = diagnostics.profile_verify(traj, spec, t, (w_lo, w_hi))
    _write_summary(
        Path(args.out),
        {
            "spec": _spec_dict(spec),
            "t": t,
            "window": [w_lo, w_hi],
            "profile_coefficient": coeff,
            "ratio_error": ratio_err,
        },
    )
    return EXIT_OK


def _add_option_flags(p: argparse.ArgumentParser, keys) -> None:
    for key in keys:
        _, typ = _OPTION_TABLE[key]
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=typ, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracwave",
        description="Spectral experiments for the dispersive-dissipative equation family",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list-models", help="print the preset catalog")

    model_keys = ["model", "kind", "alpha", "beta", "gamma1", "gamma2", "gamma3"]

    def add(name, keys, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--config", default=None, help="key = value config file")
        _add_option_flags(p, keys)
        return p

    add(
        "kernel",
        model_keys + ["n", "length", "t", "window_lo", "window_hi"],
        "sample the semigroup kernel and fit its decay exponent",
    )
    add(
        "simulate",
        model_keys
        + ["n", "length", "dt", "t_end", "integrator", "blowup_threshold",
           "snapshot_every", "datum", "amplitude", "width", "kappa", "mass"],
        "evolve an initial datum and write trajectory + energy ledger",
    )
    add(
        "decay",
        ["traj", "kappa", "window_fraction"],
        "weighted decay reports across the saved times of a trajectory",
    )
    add(
        "illposed",
        model_keys + ["s", "t", "ns", "r"],
        "flow-map second-derivative growth scan over band-pair data",
    )
    add(
        "profile",
        ["traj", "t", "window_lo", "window_hi"],
        "far-field ratio test of a trajectory against the kernel profile",
    )
    return parser


_COMMANDS = {
    "list-models": cmd_list_models,
    "kernel": cmd_kernel,
    "simulate": cmd_simulate,
    "decay": cmd_decay,
    "illposed": cmd_illposed,
    "profile": cmd_profile,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownModelError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FracwaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
