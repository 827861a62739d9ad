"""Quantitative diagnostics on trajectories.

Covers the energy identity

    d/dt (1/2)|u|_L2^2 = -int (D^a - D^b)u u dx - (2 g2 - g3) int (u_x)^2 u dx

(the transport and dispersion terms integrate to zero), the global-existence
Gronwall envelope |u(t)|^2 <= |u(t_ref)|^2 e^{2 M^b (t - t_ref)} with
M = 2^{1/(a-b)} in the regime -2 g2 + g3 = 0, the continuation monitor
int |u_xx|_inf dtau, weighted spatial-decay tracking, and the far-field
profile coefficient A(t) = int u0 + g3 int_0^t |u_x|_L2^2 dtau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateWindowError,
    EmptyWindowError,
    PreconditionError,
)
from .kernel import kernel_grid
from .evolve import Trajectory, rhs
from .spectral import SpectralField, dx, inner_product, sobolev_norm, to_physical
from .symbols import DecayExponent, SymbolSpec

__all__ = [
    "EnergyLedger",
    "DecayReport",
    "build_ledger",
    "energy_residual",
    "gwp_bound_check",
    "blowup_monitor",
    "decay_track",
    "profile_coefficient",
    "profile_verify",
]

PROFILE_GUARD_FLOOR = 100.0 * 1e-13  # discard |K| below 100x the quadrature floor


@dataclass
class EnergyLedger:
    """Time series of monitored quantities along a trajectory."""

    times: np.ndarray
    l2_sq: np.ndarray
    hs: np.ndarray
    dxx_inf: np.ndarray
    dxx_inf_integral: np.ndarray
    identity_residual: np.ndarray
    hdot1_sq_integral: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        for name in (
            "l2_sq", "hs", "dxx_inf", "dxx_inf_integral",
            "identity_residual", "hdot1_sq_integral",
        ):
            if len(getattr(self, name)) != n:
                raise PreconditionError(f"ledger column {name} misaligned")

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,l2sq,hs,dxxinf,dxxint,residual,hdot1int\n")
            for row in zip(
                self.times, self.l2_sq, self.hs, self.dxx_inf,
                self.dxx_inf_integral, self.identity_residual,
                self.hdot1_sq_integral,
            ):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def energy_residual(
    state: SpectralField, spec: SymbolSpec, dstate_dt: SpectralField
) -> float:
    """| <u, u_t> + int (D^a - D^b)u u + (2 g2 - g3) int (u_x)^2 u |.

    Zero up to dealiasing error for any state evolved under the equation:
    the transport term and the dispersion contribute nothing after
    integration by parts.
    """
    grid = state.grid
    ddt_half_l2 = inner_product(state, dstate_dt)
    a = np.abs(grid.xi)
    diss = float(
        np.sum((a**spec.alpha - a**spec.beta) * np.abs(state.coeffs) ** 2)
        / grid.length
    )
    ux = to_physical(dx(state))
    u = to_physical(state)
    cubic = float(np.sum(ux**2 * u) * grid.dx)
    return abs(ddt_half_l2 + diss + (2.0 * spec.gamma2 - spec.gamma3) * cubic)


def build_ledger(traj: Trajectory, spec: SymbolSpec, s: float = 0.0) -> EnergyLedger:
    """Populate every ledger column from trajectory snapshots.

    The monitor integral uses left-endpoint rectangles on the snapshot grid
    (matching the driver's accumulation rule); the dissipation-history
    integral int |u_x|^2 dtau uses the trapezoid rule.
    """
    times = traj.times
    l2_sq, hs_col, dxx, resid, hdot1 = [], [], [], [], []
    for state in traj.states:
        l2 = sobolev_norm(state, 0.0)
        l2_sq.append(l2 * l2)
        hs_col.append(sobolev_norm(state, s))
        dxx.append(float(np.max(np.abs(to_physical(dx(state, 2))))))
        resid.append(energy_residual(state, spec, rhs(state, spec)))
        h1 = sobolev_norm(dx(state), 0.0)
        hdot1.append(h1 * h1)
    dxx = np.array(dxx)
    hdot1 = np.array(hdot1)
    dt = np.diff(times)
    dxx_int = np.concatenate([[0.0], np.cumsum(dt * dxx[:-1])])
    hdot1_int = np.concatenate(
        [[0.0], np.cumsum(0.5 * dt * (hdot1[:-1] + hdot1[1:]))]
    )
    return EnergyLedger(
        times,
        np.array(l2_sq),
        np.array(hs_col),
        dxx,
        dxx_int,
        np.array(resid),
        hdot1_int,
    )


def gwp_bound_check(
    ledger: EnergyLedger, spec: SymbolSpec, t_ref_index: int
) -> tuple[bool, float]:
    """Verify the Gronwall envelope from t_ref onward; returns (passed, margin).

    margin is the minimal multiplicative slack bound_j / l2_sq_j over
    j > t_ref_index; margin >= 1 means the bound holds everywhere.
    """
    if not spec.gwp_eligible:
        raise PreconditionError(
            "gwp_bound_check requires -2 gamma2 + gamma3 = 0 "
            f"(got gamma2={spec.gamma2}, gamma3={spec.gamma3})"
        )
    if not 0 <= t_ref_index < len(ledger.times) - 1:
        raise PreconditionError(f"t_ref_index {t_ref_index} out of range")
    M = 2.0 ** (1.0 / (spec.alpha - spec.beta))
    rate = 2.0 * M**spec.beta
    t_ref = ledger.times[t_ref_index]
    ref = ledger.l2_sq[t_ref_index]
    ts = ledger.times[t_ref_index + 1 :]
    vals = ledger.l2_sq[t_ref_index + 1 :]
    bounds = ref * np.exp(rate * (ts - t_ref))
    margin = float(np.min(bounds / np.maximum(vals, 1e-300)))
    return margin >= 1.0, margin


def blowup_monitor(ledger: EnergyLedger) -> float:
    """Final value of the continuation integral int_0^t |u_xx|_inf dtau."""
    return float(ledger.dxx_inf_integral[-1])


@dataclass(frozen=True)
class DecayReport:
    t: float
    kappa: float
    n: DecayExponent
    weighted_sup: float
    fitted_exponent: float

    def csv_row(self) -> str:
        return (
            f"{self.t:.17g},{self.kappa:.17g},{self.n},"
            f"{self.weighted_sup:.17g},{self.fitted_exponent:.17g}"
        )


DECAY_CSV_HEADER = "t,kappa,n,wsup,fitexp"


def decay_track(
    state: SpectralField,
    kappa: float,
    n: DecayExponent,
    window_fraction: float,
    t: float = math.nan,
) -> DecayReport:
    """Weighted sup and far-field log-log fit of |u| over the trusted window.

    The weight exponent is min(kappa, n) on the integer branch of n; the
    Schwartz branch is datum-limited, so kappa alone applies.  The fit uses
    the outer half of the window.
    """
    if not 0.0 < window_fraction <= 0.5:
        raise DegenerateWindowError(
            f"window_fraction must lie in (0, 0.5], got {window_fraction}"
        )
    grid = state.grid
    xs = grid.x
    u = np.abs(to_physical(state))
    x_hi = window_fraction * grid.length
    m_exp = kappa if n.is_schwartz else min(kappa, float(n.n))
    in_win = np.abs(xs) <= x_hi
    weighted_sup = float(np.max((1.0 + np.abs(xs[in_win]) ** m_exp) * u[in_win]))
    far = (np.abs(xs) >= 0.5 * x_hi) & (np.abs(xs) <= x_hi) & (u > 1e-13)
    if int(far.sum()) < 8:
        raise DegenerateWindowError("too few above-floor samples in the far window")
    slope = np.polyfit(np.log(np.abs(xs[far])), np.log(u[far]), 1)[0]
    return DecayReport(t, kappa, n, weighted_sup, -float(slope))


def profile_coefficient(
    u0: SpectralField, ledger: EnergyLedger, spec: SymbolSpec, t: float
) -> float:
    """A(t) = int u0 dx + gamma3 int_0^t |u_x|_L2^2 dtau (trapezoid in time)."""
    if t < 0 or t > ledger.times[-1] + 1e-12:
        raise PreconditionError(f"ledger does not cover t = {t}")
    hist = float(np.interp(t, ledger.times, ledger.hdot1_sq_integral))
    return u0.mass + spec.gamma3 * hist


def profile_verify(
    traj: Trajectory,
    spec: SymbolSpec,
    t: float,
    window: tuple[float, float],
    s: float = 0.0,
) -> float:
    """Median over the window of |u(t,x)/K(t,x) - A(t)| / |A(t)|.

    K is evaluated on the trajectory grid (same periodization as u, so the
    wrap-around tails cancel in the ratio).  Samples where |K| sits near its
    zeros are discarded before taking the median.
    """
    state = traj.state_at(t)
    ledger = build_ledger(traj, spec, s)
    A = profile_coefficient(traj.states[0], ledger, spec, t)
    if A == 0.0:
        raise PreconditionError("profile coefficient vanishes; ratio test undefined")
    grid = state.grid
    K = kernel_grid(spec, t, grid)
    u = to_physical(state)
    x_lo, x_hi = window
    sel = (np.abs(grid.x) >= x_lo) & (np.abs(grid.x) <= x_hi)
    guard = np.abs(K) >= PROFILE_GUARD_FLOOR
    use = sel & guard
    if not np.any(use):
        raise EmptyWindowError("no window samples survive the kernel-zero guard")
    return float(np.median(np.abs(u[use] / K[use] - A) / abs(A)))
