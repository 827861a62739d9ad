"""Flow-map roughness witness below the well-posedness threshold.

For band-pair data whose hats are indicators of [-N, -N+r] and
[N+r, N+2r] (amplitude r^{-1/2} N^{-s}, so the H^s size is ~1), the second
derivative of the flow map at zero has the frequency-side representation

    g(t, xi) = int (g1 i xi - g2 xi^2 - g3 (xi-eta) eta)
               v_hat(xi-eta) w_hat(eta)
               (e^{-(f(eta)+f(xi-eta)) t} - e^{-f(xi) t})
               / (f(xi) - f(eta) - f(xi-eta)) deta,

supported in xi in (r, 3r) where the two shifted bands overlap.  Its H^s
norm grows like N^{2(1-s-alpha/2)} when the strong nonlinear terms are
active (s < 1 - alpha/2) and like N^{2(-s-alpha/2)} in the transport-only
case (s < -alpha/2); the scan fits the exponent over a ladder of N values.

Everything here lives on the frequency side; the sharp-band data are never
realised on a physical grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import PreconditionError
from .symbols import SymbolSpec, full_symbol

__all__ = [
    "BandDatum",
    "IllposednessReport",
    "make_band_pair",
    "band_hs_norm",
    "second_flow_derivative_hat",
    "illposedness_scan",
    "predicted_growth_exponent",
]

_GL = np.polynomial.legendre.leggauss(64)
RESONANCE_GUARD = 1e-8


@dataclass(frozen=True)
class BandDatum:
    """Frequency-side datum: hat = amplitude * indicator(band)."""

    n_scale: int
    r: float
    s: float
    band: tuple[float, float]
    amplitude: float

    @property
    def band_width(self) -> float:
        return self.band[1] - self.band[0]


def band_hs_norm(datum: BandDatum, quad_points: int = 256) -> float:
    """H^s norm of the datum: amplitude * (int_band (1+xi^2)^s dxi)^(1/2)."""
    lo, hi = datum.band
    nodes, weights = np.polynomial.legendre.leggauss(quad_points)
    xi = 0.5 * (hi + lo) + 0.5 * (hi - lo) * nodes
    integral = 0.5 * (hi - lo) * np.sum(weights * (1.0 + xi**2) ** datum.s)
    return float(datum.amplitude * math.sqrt(integral))


def make_band_pair(N: int, r: float, s: float) -> tuple[BandDatum, BandDatum]:
    """Disjoint bands [-N, -N+r] and [N+r, N+2r] with ~unit H^s size."""
    if N < 64:
        raise PreconditionError(f"N must be >= 64, got {N}")
    if not 0.5 <= r <= 2.0:
        raise PreconditionError(f"r must lie in [0.5, 2], got {r}")
    amp = r ** (-0.5) * float(N) ** (-s)
    v = BandDatum(N, r, s, (-float(N), -float(N) + r), amp)
    w = BandDatum(N, r, s, (float(N) + r, float(N) + 2.0 * r), amp)
    for d in (v, w):
        norm = band_hs_norm(d)
        if not 0.5 <= norm <= 2.0:
            raise PreconditionError(
                f"band datum H^s norm {norm:.3f} outside [0.5, 2] (N={N}, s={s})"
            )
    return v, w


def _g_values(
    spec: SymbolSpec,
    t: float,
    pair: tuple[BandDatum, BandDatum],
    xis: np.ndarray,
    quad_points: int,
) -> np.ndarray:
    """Vectorised g(t, xi) over an array of xi (one quadrature row per xi)."""
    v, w = pair
    a1, b1 = v.band
    a2, b2 = w.band
    lo = np.maximum(a2, xis - b1)
    hi = np.minimum(b2, xis - a1)
    live = hi > lo
    out = np.zeros(len(xis), dtype=complex)
    if not np.any(live):
        return out
    nodes, weights = (
        _GL if quad_points == 64 else np.polynomial.legendre.leggauss(quad_points)
    )
    L, H = lo[live], hi[live]
    half = 0.5 * (H - L)
    eta = 0.5 * (H + L)[:, None] + half[:, None] * nodes[None, :]
    xi = xis[live][:, None]
    f_xi = full_symbol(spec, xis[live])[:, None]
    f_eta = full_symbol(spec, eta.ravel()).reshape(eta.shape)
    f_dif = full_symbol(spec, (xi - eta).ravel()).reshape(eta.shape)
    denom = f_xi - f_eta - f_dif
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        ratio = (np.exp(-(f_eta + f_dif) * t) - np.exp(-f_xi * t)) / denom
    # removable singularity: difference quotient -> t e^{-f(xi) t}
    near = np.abs(denom) < RESONANCE_GUARD * np.abs(f_eta)
    if np.any(near):
        limit = t * np.exp(-f_xi * t) * np.ones_like(ratio)
        ratio = np.where(near, limit, ratio)
    poly = spec.gamma1 * 1j * xi - spec.gamma2 * xi**2 - spec.gamma3 * (xi - eta) * eta
    integrand = poly * ratio * (v.amplitude * w.amplitude)
    out[live] = half * (integrand @ weights)
    return out


def second_flow_derivative_hat(
    spec: SymbolSpec,
    t: float,
    pair: tuple[BandDatum, BandDatum],
    xi: float,
    quad_points: int = 64,
) -> complex:
    """2 g(t, xi): frequency-side second flow derivative at frequency xi.

    Zero whenever xi falls outside the band-overlap window.
    """
    if not t > 0:
        raise PreconditionError("t must be positive")
    if quad_points < 64:
        raise PreconditionError("quad_points must be >= 64")
    return 2.0 * complex(_g_values(spec, t, pair, np.array([float(xi)]), quad_points)[0])


def predicted_growth_exponent(spec: SymbolSpec, s: float) -> float:
    """2(1 - s - alpha/2) with the strong terms active, else 2(-s - alpha/2)."""
    if spec.gamma2 != 0.0 or spec.gamma3 != 0.0:
        return 2.0 * (1.0 - s - spec.alpha / 2.0)
    return 2.0 * (-s - spec.alpha / 2.0)


@dataclass(frozen=True)
class IllposednessReport:
    spec: SymbolSpec
    s: float
    t: float
    r: float
    Ns: tuple[int, ...]
    norms: tuple[float, ...]
    term_norms: dict  # per active gamma term: name -> tuple of norms
    fitted_exponent: float
    predicted_exponent: float

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("N,norm,predicted,fitted\n")
            for N, norm in zip(self.Ns, self.norms):
                fh.write(
                    f"{N},{norm:.17g},"
                    f"{self.predicted_exponent:.17g},{self.fitted_exponent:.17g}\n"
                )

    def summary(self) -> dict:
        return {
            "s": self.s,
            "t": self.t,
            "r": self.r,
            "predicted_exponent": self.predicted_exponent,
            "fitted_exponent": self.fitted_exponent,
            "relative_gap": abs(self.fitted_exponent - self.predicted_exponent)
            / abs(self.predicted_exponent),
        }


def _hs_norm_of_g(spec, t, pair, s, r, xi_points, quad_points) -> float:
    xis = (np.arange(1, xi_points + 1) / xi_points) * 4.0 * r
    g = 2.0 * _g_values(spec, t, pair, xis, quad_points)
    dxi = 4.0 * r / xi_points
    # factor 2: the physical-side object is real, |g(-xi)| = |g(xi)|
    return float(np.sqrt(2.0 * np.sum((1.0 + xis**2) ** s * np.abs(g) ** 2) * dxi))


def illposedness_scan(
    spec: SymbolSpec,
    s: float,
    t: float,
    Ns,
    r: float = 1.0,
    xi_points: int = 4096,
    quad_points: int = 128,
) -> IllposednessReport:
    """Fit log |D^2_0 S(t)(v0, w0)|_{H^s} against log N over a ladder of N.

    Refuses s at or above the roughness threshold (no growth is predicted
    there, the flow map being smooth in that regime).
    """
    strong = spec.gamma2 != 0.0 or spec.gamma3 != 0.0
    threshold = 1.0 - spec.alpha / 2.0 if strong else -spec.alpha / 2.0
    if s >= threshold:
        raise PreconditionError(
            f"s = {s} is not below the roughness threshold {threshold} "
            "(growth exponent would be <= 0)"
        )
    Ns = [int(N) for N in Ns]
    if len(Ns) < 2 or any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise PreconditionError("Ns must be at least two strictly increasing integers")

    norms = []
    active = [
        name
        for name, val in (
            ("gamma1", spec.gamma1), ("gamma2", spec.gamma2), ("gamma3", spec.gamma3)
        )
        if val != 0.0
    ]
    term_norms = {name: [] for name in active}
    for N in Ns:
        pair = make_band_pair(N, r, s)
        norms.append(_hs_norm_of_g(spec, t, pair, s, r, xi_points, quad_points))
        for name in active:
            solo = replace(
                spec,
                gamma1=spec.gamma1 if name == "gamma1" else 0.0,
                gamma2=spec.gamma2 if name == "gamma2" else 0.0,
                gamma3=spec.gamma3 if name == "gamma3" else 0.0,
            )
            term_norms[name].append(
                _hs_norm_of_g(solo, t, pair, s, r, xi_points, quad_points)
            )
    fitted = float(np.polyfit(np.log(Ns), np.log(norms), 1)[0])
    return IllposednessReport(
        spec,
        s,
        t,
        r,
        tuple(Ns),
        tuple(norms),
        {k: tuple(v) for k, v in term_norms.items()},
        fitted,
        predicted_growth_exponent(spec, s),
    )
