"""Time evolution of the dispersive-dissipative equation.

Two independent integrators advance the spectral form

    d/dt u_hat = -f(xi) u_hat - N_hat(u),
    N(u) = gamma1 (u^2)_x + gamma2 (u^2)_xx + gamma3 (u_x)^2:

* an exponential time-differencing Runge-Kutta stepper (ETDRK2) that applies
  the stiff linear semigroup exactly and treats the quadratic nonlinearity
  explicitly, and
* the mild-solution fixed-point iteration
      u^{m+1}(t) = K(t) * u0 - int_0^t K(t - tau) * N(u^m)(tau) dtau,
  with the Duhamel integral discretised by composite trapezoid over stored
  time slices (final panel halved once as a graded-mesh concession).

The driver also maintains the continuation monitor int_0^t |u_xx|_inf dtau
and halts when the configured sup-norm threshold is crossed.  The halt is a
threshold heuristic, not a proof of blow-up.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    IntegrationDivergedError,
    MaxIterationsError,
    NonContractionError,
    PreconditionError,
)
from .spectral import (
    Grid,
    NonlinearitySpec,
    SpectralField,
    dx,
    nonlinearity,
    read_field_binary,
    sobolev_norm,
    to_physical,
    write_field_binary,
)
from .symbols import DispersionKind, SymbolSpec, full_symbol, local_time_eta

__all__ = [
    "EvolveConfig",
    "HaltRecord",
    "Trajectory",
    "PicardMeta",
    "lwp_time_bound",
    "rhs",
    "etd_step",
    "EtdStepper",
    "picard_solve",
    "run",
    "save_trajectory",
    "load_trajectory",
]

PHI_TAYLOR_CUT = 1e-5


@dataclass(frozen=True)
class EvolveConfig:
    dt: float
    t_end: float
    integrator: str = "etdrk2"
    picard_max_iter: int = 40
    picard_tol: float = 1e-10
    picard_quad: int = 16
    blowup_threshold: float = math.inf
    snapshot_every: int = 1

    def __post_init__(self):
        if not 0 < self.dt <= self.t_end:
            raise PreconditionError(f"need 0 < dt <= t_end, got dt={self.dt}, t_end={self.t_end}")
        if self.integrator not in ("etdrk2", "picard"):
            raise PreconditionError(f"unknown integrator {self.integrator!r}")
        if not self.picard_tol > 0:
            raise PreconditionError("picard_tol must be positive")
        if self.snapshot_every < 1:
            raise PreconditionError("snapshot_every must be >= 1")


@dataclass(frozen=True)
class HaltRecord:
    time: float
    reason: str
    monitor: float  # running int |u_xx|_inf dtau at the halt


@dataclass
class Trajectory:
    times: np.ndarray
    states: list[SpectralField]
    halted: HaltRecord | None = None
    # per-snapshot running monitor, accumulated with left-endpoint rectangles
    monitor: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.monitor is None:
            self.monitor = np.zeros(len(self.times))
        if len(self.times) != len(self.states):
            raise PreconditionError("times and states must align")
        if len(self.times) == 0 or self.times[0] != 0.0:
            raise PreconditionError("trajectory must start at t = 0")
        if np.any(np.diff(self.times) <= 0):
            raise PreconditionError("trajectory times must be strictly increasing")

    @property
    def grid(self) -> Grid:
        return self.states[0].grid

    def state_at(self, t: float, tol: float = 1e-9) -> SpectralField:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > tol:
            raise PreconditionError(f"no snapshot at t = {t} (closest: {self.times[i]})")
        return self.states[i]


def lwp_time_bound(spec: SymbolSpec, s: float, h_s_norm: float) -> float:
    """A guaranteed local-existence time, strictly below min(4^{-1/eta} |u0|^{-1/eta}, 1)."""
    if not h_s_norm > 0:
        raise PreconditionError("h_s_norm must be positive")
    eta = local_time_eta(spec, s)
    raw = min(1.0 / (4.0 ** (1.0 / eta) * h_s_norm ** (1.0 / eta)), 1.0)
    return raw * (1.0 - 1e-9)


def _nl_of(spec: SymbolSpec) -> NonlinearitySpec:
    return NonlinearitySpec(spec.gamma1, spec.gamma2, spec.gamma3)


def rhs(state: SpectralField, spec: SymbolSpec) -> SpectralField:
    """d/dt u_hat = -f u_hat - N_hat(u), as a spectral field."""
    f = full_symbol(spec, state.grid.xi)
    nl = nonlinearity(state, _nl_of(spec))
    return SpectralField(state.grid, -f * state.coeffs - nl.coeffs)


def _phi1(z: np.ndarray) -> np.ndarray:
    small = np.abs(z) < PHI_TAYLOR_CUT
    zs = np.where(small, 1.0, z)
    with np.errstate(invalid="ignore", over="ignore"):
        main = (np.exp(zs) - 1.0) / zs
    taylor = 1.0 + z / 2.0 + z**2 / 6.0 + z**3 / 24.0
    return np.where(small, taylor, main)


def _phi2(z: np.ndarray) -> np.ndarray:
    small = np.abs(z) < PHI_TAYLOR_CUT
    zs = np.where(small, 1.0, z)
    with np.errstate(invalid="ignore", over="ignore"):
        main = (np.exp(zs) - 1.0 - zs) / zs**2
    taylor = 0.5 + z / 6.0 + z**2 / 24.0 + z**3 / 120.0
    return np.where(small, taylor, main)


class EtdStepper:
    """ETDRK2 with cached semigroup and phi coefficients for a fixed dt."""

    def __init__(self, grid: Grid, spec: SymbolSpec, dt: float):
        if not dt > 0:
            raise PreconditionError("dt must be positive")
        self.grid = grid
        self.spec = spec
        self.dt = dt
        self.nl = _nl_of(spec)
        z = -full_symbol(spec, grid.xi) * dt
        self.exp_lin = np.exp(z)
        self.phi1 = dt * _phi1(z)
        self.phi2 = dt * _phi2(z)

    def step(self, state: SpectralField) -> SpectralField:
        g0 = -nonlinearity(state, self.nl).coeffs
        a = self.exp_lin * state.coeffs + self.phi1 * g0
        g1 = -nonlinearity(SpectralField(self.grid, a), self.nl).coeffs
        out = a + self.phi2 * (g1 - g0)
        if not np.all(np.isfinite(out)):
            raise IntegrationDivergedError("non-finite coefficients after ETD step")
        return SpectralField(self.grid, out)


def etd_step(state: SpectralField, spec: SymbolSpec, dt: float) -> SpectralField:
    """One ETDRK2 step (one-shot convenience wrapper around EtdStepper)."""
    return EtdStepper(state.grid, spec, dt).step(state)


@dataclass(frozen=True)
class PicardMeta:
    distances: tuple[float, ...]
    iterations: int
    converged: bool
    slow_contraction: bool  # some ratio landed in (0.5, 0.9); flagged, not failed


def picard_solve(
    u0: SpectralField,
    spec: SymbolSpec,
    t: float,
    m_quad: int = 16,
    max_iter: int = 40,
    tol: float = 1e-10,
    s: float = 0.0,
) -> tuple[SpectralField, PicardMeta]:
    """Mild-solution fixed point at time t over m_quad trapezoid slices.

    Iterates the Duhamel map on states stored at uniform slice times (plus a
    half node before t), measuring sup-over-slices H^s distance between
    successive sweeps.  Raises NonContractionError after three consecutive
    non-decreasing distances, MaxIterationsError at the cap.
    """
    if not t > 0:
        raise PreconditionError("t must be positive")
    if m_quad < 8:
        raise PreconditionError("m_quad must be >= 8")
    grid = u0.grid
    f = full_symbol(spec, grid.xi)
    nl = _nl_of(spec)

    dtau = t / m_quad
    taus = np.concatenate([np.arange(m_quad) * dtau, [t - 0.5 * dtau, t]])
    m = len(taus)
    semigroup = [np.exp(-f * tau) for tau in taus]
    linear = [sg * u0.coeffs for sg in semigroup]

    # e^{-f (taus[j] - taus[i])} factors, cached by (j, i)
    prop = {}
    for j in range(m):
        for i in range(j + 1):
            prop[(j, i)] = np.exp(-f * (taus[j] - taus[i]))

    def trapezoid_weights(j: int) -> np.ndarray:
        sub = taus[: j + 1]
        w = np.zeros(j + 1)
        d = np.diff(sub)
        w[:-1] += 0.5 * d
        w[1:] += 0.5 * d
        return w

    weights = [trapezoid_weights(j) for j in range(m)]

    iterate = [c.copy() for c in linear]
    distances: list[float] = []
    rise = 0
    for it in range(1, max_iter + 1):
        bhats = [nonlinearity(SpectralField(grid, c), nl).coeffs for c in iterate]
        new = []
        for j in range(m):
            duh = np.zeros(grid.n, dtype=complex)
            w = weights[j]
            for i in range(j + 1):
                if w[i] != 0.0:
                    duh += w[i] * prop[(j, i)] * bhats[i]
            new.append(linear[j] - duh)
        dist = max(
            sobolev_norm(SpectralField(grid, a - b), s)
            for a, b in zip(new, iterate)
        )
        distances.append(dist)
        iterate = new
        if not np.all(np.isfinite(iterate[-1])):
            raise IntegrationDivergedError("picard iterate diverged")
        if dist <= tol:
            ratios = [
                distances[k + 1] / distances[k]
                for k in range(len(distances) - 1)
                if distances[k] > 0
            ]
            slow = any(0.5 < r <= 0.9 for r in ratios)
            meta = PicardMeta(tuple(distances), it, True, slow)
            return SpectralField(grid, iterate[-1]), meta
        if len(distances) >= 2 and distances[-1] >= distances[-2]:
            rise += 1
            if rise >= 3:
                raise NonContractionError(
                    f"distances failed to decrease for 3 iterations: {distances[-4:]}"
                )
        else:
            rise = 0
    raise MaxIterationsError(
        f"picard did not reach tol {tol:g} in {max_iter} iterations "
        f"(last distance {distances[-1]:.3e})"
    )


def run(u0: SpectralField, spec: SymbolSpec, cfg: EvolveConfig) -> Trajectory:
    """Advance to t_end with snapshots every cfg.snapshot_every steps.

    Halts early (reason 'blowup-monitor') when |u_xx|_inf exceeds the
    configured threshold; the crossing state is the last snapshot kept.
    """
    grid = u0.grid
    n_steps = int(round(cfg.t_end / cfg.dt))
    if abs(n_steps * cfg.dt - cfg.t_end) > 1e-9 * max(1.0, cfg.t_end):
        raise PreconditionError("t_end must be an integer multiple of dt")

    stepper = EtdStepper(grid, spec, cfg.dt) if cfg.integrator == "etdrk2" else None

    def dxx_inf(state: SpectralField) -> float:
        return float(np.max(np.abs(to_physical(dx(state, 2)))))

    times = [0.0]
    states = [u0]
    monitors = [0.0]
    state = u0
    monitor = 0.0
    halted = None
    for k in range(1, n_steps + 1):
        prev_dxx = dxx_inf(state)
        try:
            if stepper is not None:
                state = stepper.step(state)
            else:
                state, _ = picard_solve(
                    state, spec, cfg.dt,
                    m_quad=cfg.picard_quad,
                    max_iter=cfg.picard_max_iter,
                    tol=cfg.picard_tol,
                )
        except IntegrationDivergedError as exc:
            raise IntegrationDivergedError(
                str(exc), last_good_time=times[-1]
            ) from exc
        t_k = k * cfg.dt
        monitor += cfg.dt * prev_dxx  # left-endpoint rectangle
        cur_dxx = dxx_inf(state)
        crossing = cur_dxx > cfg.blowup_threshold
        if k % cfg.snapshot_every == 0 or k == n_steps or crossing:
            times.append(t_k)
            states.append(state)
            monitors.append(monitor)
        if crossing:
            halted = HaltRecord(t_k, "blowup-monitor", monitor)
            break
    return Trajectory(np.array(times), states, halted, np.array(monitors))


def save_trajectory(traj: Trajectory, spec: SymbolSpec, cfg: EvolveConfig, out_dir) -> None:
    """Serialize to a directory: meta.json plus one binary snapshot per time."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "kind": spec.kind.value,
        "alpha": spec.alpha,
        "beta": spec.beta,
        "gamma1": spec.gamma1,
        "gamma2": spec.gamma2,
        "gamma3": spec.gamma3,
        "gwp_eligible": spec.gwp_eligible,
        "n": traj.grid.n,
        "length": traj.grid.length,
        "dt": cfg.dt,
        "t_end": cfg.t_end,
        "integrator": cfg.integrator,
        "blowup_threshold": (
            None if math.isinf(cfg.blowup_threshold) else cfg.blowup_threshold
        ),
        "snapshot_every": cfg.snapshot_every,
        "times": [float(t) for t in traj.times],
        "monitor": [float(v) for v in traj.monitor],
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
    (out / "meta.json").write_text(json.dumps(meta, indent=2, allow_nan=False))
    for i, state in enumerate(traj.states):
        write_field_binary(state, out / f"snap_{i:06d}.bin")


def load_trajectory(out_dir) -> tuple[Trajectory, SymbolSpec, EvolveConfig]:
    out = Path(out_dir)
    meta = json.loads((out / "meta.json").read_text())
    spec = SymbolSpec(
        DispersionKind(meta["kind"]),
        meta["alpha"],
        meta["beta"],
        meta["gamma1"],
        meta["gamma2"],
        meta["gamma3"],
    )
    cfg = EvolveConfig(
        dt=meta["dt"],
        t_end=meta["t_end"],
        integrator=meta["integrator"],
        blowup_threshold=(
            math.inf
            if meta["blowup_threshold"] is None
            else meta["blowup_threshold"]
        ),
        snapshot_every=meta["snapshot_every"],
    )
    states = [
        read_field_binary(out / f"snap_{i:06d}.bin") for i in range(len(meta["times"]))
    ]
    halted = None
    if meta["halted"] is not None:
        halted = HaltRecord(
            meta["halted"]["time"], meta["halted"]["reason"], meta["halted"]["monitor"]
        )
    traj = Trajectory(
        np.array(meta["times"]), states, halted, np.array(meta["monitor"])
    )
    return traj, spec, cfg
