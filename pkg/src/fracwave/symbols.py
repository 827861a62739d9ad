"""Closed-form Fourier symbols of the dispersive-dissipative equation family.

The equation under study is

    u_t + D(u_x) + (D_x^alpha - D_x^beta) u
        + gamma1 (u^2)_x + gamma2 (u^2)_xx + gamma3 (u_x)^2 = 0,

where D is either the Hilbert-transform dispersion H d_x (symbol m(xi) = |xi|)
or the Laplacian d_x^2 (symbol m(xi) = -|xi|^2), and D_x^a is the fractional
derivative with symbol |xi|^a (normalisation constants fixed to 1).

Fourier convention used throughout the package:

    u_hat(xi) = int e^{-i x xi} u(x) dx,     u(x) = (1/2pi) int e^{i x xi} u_hat(xi) dxi,

so d_x corresponds to multiplication by i*xi.  Under this convention the full
symbol of the linear part is

    f(xi) = i m(xi) xi + (|xi|^alpha - |xi|^beta),

and the linear flow is u_hat(t, xi) = e^{-f(xi) t} u_hat(0, xi).

All functions accept scalars or numpy arrays in ``xi`` and are pure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, SymbolDomainError

__all__ = [
    "DispersionKind",
    "SymbolSpec",
    "DecayExponent",
    "dispersion_symbol",
    "full_symbol",
    "symbol_derivative",
    "decay_exponent",
    "resonance",
    "local_time_eta",
    "dissipation_minimum",
]


class DispersionKind(enum.Enum):
    """Dispersion operator: Hilbert-transform type or local Laplacian type."""

    HILBERT = "hilbert"
    LAPLACIAN = "laplacian"


def _is_even_integer(x: float) -> bool:
    return float(x).is_integer() and int(round(x)) % 2 == 0


@dataclass(frozen=True)
class SymbolSpec:
    """One member of the equation family.

    Validation mirrors the well-posedness hypotheses: alpha > beta >= 1
    always, and alpha > 7/2 whenever one of the strong nonlinear terms
    (gamma2, gamma3) is active, alpha > 2 otherwise.  beta < 1 is rejected
    because the decay machinery assumes beta >= 1.
    """

    kind: DispersionKind
    alpha: float
    beta: float
    gamma1: float = 0.0
    gamma2: float = 0.0
    gamma3: float = 0.0

    def __post_init__(self):
        if not isinstance(self.kind, DispersionKind):
            raise PreconditionError(f"kind must be a DispersionKind, got {self.kind!r}")
        for name in ("alpha", "beta", "gamma1", "gamma2", "gamma3"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise PreconditionError(f"{name} must be finite, got {v!r}")
        if not self.alpha > self.beta:
            raise PreconditionError(
                f"require alpha > beta, got alpha={self.alpha}, beta={self.beta}"
            )
        if self.beta < 1.0:
            raise PreconditionError(
                f"beta < 1 is outside the supported decay range (beta={self.beta})"
            )
        if self.gamma2 != 0.0 or self.gamma3 != 0.0:
            if not self.alpha > 3.5:
                raise PreconditionError(
                    "alpha > 7/2 required when gamma2 or gamma3 is nonzero "
                    f"(alpha={self.alpha})"
                )
        elif not self.alpha > 2.0:
            raise PreconditionError(
                f"alpha > 2 required when gamma2 = gamma3 = 0 (alpha={self.alpha})"
            )

    @property
    def gammas(self) -> tuple[float, float, float]:
        return (self.gamma1, self.gamma2, self.gamma3)

    @property
    def gwp_eligible(self) -> bool:
        """True when -2*gamma2 + gamma3 = 0, the global-existence regime."""
        return abs(-2.0 * self.gamma2 + self.gamma3) < 1e-12


@dataclass(frozen=True)
class DecayExponent:
    """Algebraic far-field decay rate |x|^{-n}, or faster-than-polynomial.

    ``n is None`` encodes the Schwartz branch (smooth symbol, decay faster
    than any polynomial).
    """

    n: int | None

    def __post_init__(self):
        if self.n is not None and self.n < 2:
            raise PreconditionError(f"integer decay exponent must be >= 2, got {self.n}")

    @property
    def is_schwartz(self) -> bool:
        return self.n is None

    def __str__(self):
        return "schwartz" if self.is_schwartz else str(self.n)


SCHWARTZ = DecayExponent(None)


def dispersion_symbol(kind: DispersionKind, xi):
    """m(xi): |xi| for the Hilbert dispersion, -|xi|^2 for the Laplacian."""
    xi = np.asarray(xi, dtype=float)
    if kind is DispersionKind.HILBERT:
        out = np.abs(xi)
    else:
        out = -np.abs(xi) ** 2
    return out if out.ndim else float(out)


def full_symbol(spec: SymbolSpec, xi):
    """f(xi) = i m(xi) xi + (|xi|^alpha - |xi|^beta).

    The real part is the dissipation rate of the mode, the imaginary part
    the dispersion phase speed times xi.
    """
    xi = np.asarray(xi, dtype=float)
    a = np.abs(xi)
    diss = a**spec.alpha - a**spec.beta
    out = 1j * dispersion_symbol(spec.kind, xi) * xi + diss
    return out if out.ndim else complex(out)


def _falling(a: float, p: int) -> float:
    """Falling factorial a (a-1) ... (a-p+1)."""
    out = 1.0
    for k in range(p):
        out *= a - k
    return out


def symbol_derivative(spec: SymbolSpec, xi: float, order: int) -> complex:
    """Closed-form derivative f^(order)(xi) for order in 1..5.

    Branch-correct for xi < 0 and xi > 0.  At xi = 0 the derivative exists
    only when the whole symbol is smooth there (Laplacian dispersion with
    alpha and beta both even integers); otherwise a SymbolDomainError is
    raised rather than returning NaN.
    """
    if not 1 <= order <= 5:
        raise NotImplementedError(
            f"symbol_derivative implements orders 1..5, got {order}"
        )
    xi = float(xi)
    smooth = (
        spec.kind is DispersionKind.LAPLACIAN
        and _is_even_integer(spec.alpha)
        and _is_even_integer(spec.beta)
    )
    if xi == 0.0 and not smooth:
        raise SymbolDomainError(
            "derivative singular at xi = 0 for this symbol (non-smooth branch)"
        )

    sign = 1.0 if xi >= 0.0 else -1.0
    a = abs(xi)

    # |xi|^e = (sign*xi)^e on each branch; d^p gives sign^p falling(e,p) |xi|^(e-p)
    def diss_term(exponent: float) -> float:
        c = _falling(exponent, order)
        if c == 0.0:
            return 0.0
        return (sign**order) * c * a ** (exponent - order)

    diss = diss_term(spec.alpha) - diss_term(spec.beta)

    if spec.kind is DispersionKind.HILBERT:
        # i m(xi) xi = i sign * xi^2
        poly = {1: 2.0 * xi, 2: 2.0}.get(order, 0.0)
        disp = 1j * sign * poly
    else:
        # i m(xi) xi = -i xi^3
        poly = {1: 3.0 * xi**2, 2: 6.0 * xi, 3: 6.0}.get(order, 0.0)
        disp = -1j * poly

    return complex(disp + diss)


def decay_exponent(spec: SymbolSpec) -> DecayExponent:
    """Far-field decay exponent of the semigroup kernel.

    Four branches: Hilbert dispersion caps the exponent at 3; for the
    Laplacian the dissipation exponents control everything, with the fully
    even case yielding faster-than-polynomial (Schwartz) decay.
    """
    if not spec.alpha > spec.beta >= 1.0:
        raise PreconditionError("decay_exponent requires alpha > beta >= 1")
    if spec.kind is DispersionKind.HILBERT:
        return DecayExponent(min(3, int(math.floor(spec.beta)) + 1))
    alpha_even = _is_even_integer(spec.alpha)
    beta_even = _is_even_integer(spec.beta)
    if alpha_even and beta_even:
        return SCHWARTZ
    if beta_even:
        return DecayExponent(int(math.floor(spec.alpha)) + 1)
    return DecayExponent(int(math.floor(spec.beta)) + 1)


def resonance(spec: SymbolSpec, xi, eta):
    """f(xi) - f(eta) - f(xi - eta), the quadratic-interaction denominator."""
    return full_symbol(spec, xi) - full_symbol(spec, eta) - full_symbol(spec, np.asarray(xi) - np.asarray(eta))


def local_time_eta(spec: SymbolSpec, s: float) -> float:
    """Time-integrability exponent eta = s/alpha - 5/(2 alpha) + 1.

    Positive throughout the admissible range s > 1 - alpha/2; a
    non-positive value means s is outside the local theory and raises.
    """
    eta = s / spec.alpha - 5.0 / (2.0 * spec.alpha) + 1.0
    if eta <= 0.0:
        raise PreconditionError(
            f"eta = {eta} <= 0: s = {s} outside the local existence range"
        )
    return eta


def dissipation_minimum(spec: SymbolSpec) -> tuple[float, float]:
    """Location and value of the minimum of |xi|^alpha - |xi|^beta.

    The minimum over xi >= 0 sits at xi* = (beta/alpha)^(1/(alpha-beta));
    this is the most amplified band of the semigroup.
    """
    xi_star = (spec.beta / spec.alpha) ** (1.0 / (spec.alpha - spec.beta))
    return xi_star, xi_star**spec.alpha - xi_star**spec.beta
