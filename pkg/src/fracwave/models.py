"""Named presets mapping the physical model catalog onto SymbolSpec instances.

Each preset records the equation family member, its literature name, and a
desk-scale grid plus initial-datum suggestion.  The dissipation symbol is
always +(|xi|^alpha - |xi|^beta), i.e. the general family's convention; see
the ledgered note on the OST sign mapping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownModelError
from .spectral import Grid, SpectralField, to_spectral
from .symbols import DispersionKind, SymbolSpec, decay_exponent

__all__ = [
    "ModelPreset",
    "preset",
    "available_models",
    "gaussian_datum",
    "wavelet_datum",
    "even_wavelet_datum",
    "algebraic_datum",
    "noise_datum",
    "normalize_mass",
]


@dataclass(frozen=True)
class ModelPreset:
    name: str
    spec: SymbolSpec
    citation: str
    suggested_grid: tuple[int, float]  # (n, L)
    suggested_datum: str

    @property
    def decay(self):
        return decay_exponent(self.spec)


def _build(name: str, alpha=None, beta=None, gamma2=None, gamma3=None) -> ModelPreset:
    H, P = DispersionKind.HILBERT, DispersionKind.LAPLACIAN
    if name == "npbo":
        return ModelPreset(
            name,
            SymbolSpec(H, 3.0, 1.0, 1.0, 0.0, 0.0),
            "nonlocal perturbed Benjamin-Ono equation",
            (8192, 800.0),
            "gaussian(0.5, 4)",
        )
    if name == "plasma":
        return ModelPreset(
            name,
            SymbolSpec(H, 4.0, 1.0, 1.0, 0.0, 0.0),
            "plasma instability model",
            (8192, 800.0),
            "gaussian(0.5, 4)",
        )
    if name == "mbo":
        return ModelPreset(
            name,
            SymbolSpec(H, 4.0 if alpha is None else alpha, 2.5 if beta is None else beta,
                       1.0, 0.0, 0.0),
            "modified Benjamin-Ono equation (free dissipation orders)",
            (8192, 800.0),
            "gaussian(0.5, 4)",
        )
    if name == "mkdv":
        return ModelPreset(
            name,
            SymbolSpec(P, 3.0 if alpha is None else alpha, 1.5 if beta is None else beta,
                       1.0, 0.0, 0.0),
            "modified KdV equation (free dissipation orders)",
            (8192, 800.0),
            "gaussian(0.5, 4)",
        )
    if name == "ost":
        return ModelPreset(
            name,
            SymbolSpec(P, 3.0, 1.0, 1.0, 0.0, 0.0),
            "Ostrovsky-Stepanyams-Tsimring equation",
            (8192, 800.0),
            "gaussian(0.5, 4)",
        )
    if name == "dkv":
        return ModelPreset(
            name,
            SymbolSpec(P, 4.0, 2.0, 0.0,
                       1.0 if gamma2 is None else gamma2,
                       2.0 if gamma3 is None else gamma3),
            "dispersive Kuramoto-Velarde equation",
            (512, 50.0),
            "gaussian(0.5, 2)",
        )
    if name == "ks":
        return ModelPreset(
            name,
            SymbolSpec(P, 4.0, 2.0, 0.0, 0.0,
                       1.0 if gamma3 is None else gamma3),
            "1D Kuramoto-Sivashinsky equation (with third-order dispersion)",
            (512, 50.0),
            "wavelet(0.5, 3)",
        )
    raise UnknownModelError(name, available_models())


_NAMES = ("npbo", "plasma", "mbo", "mkdv", "ost", "dkv", "ks")


def available_models() -> tuple[str, ...]:
    return _NAMES


def preset(name: str, *, alpha=None, beta=None, gamma2=None, gamma3=None) -> ModelPreset:
    """Look up a catalog preset; mbo/mkdv accept alpha/beta, dkv/ks gamma overrides."""
    if name not in _NAMES:
        raise UnknownModelError(name, _NAMES)
    return _build(name, alpha=alpha, beta=beta, gamma2=gamma2, gamma3=gamma3)


def gaussian_datum(grid: Grid, amplitude: float, width: float) -> SpectralField:
    """u0(x) = A exp(-(x/w)^2); superpolynomial spatial decay."""
    x = grid.x
    return to_spectral(grid, amplitude * np.exp(-((x / width) ** 2)))


def wavelet_datum(grid: Grid, amplitude: float, width: float) -> SpectralField:
    """Odd zero-mean datum A (x/w) exp(-(x/w)^2); the mean mode is zeroed exactly."""
    x = grid.x
    f = to_spectral(grid, amplitude * (x / width) * np.exp(-((x / width) ** 2)))
    c = f.coeffs.copy()
    c[0] = 0.0
    return SpectralField(grid, c)


def even_wavelet_datum(grid: Grid, amplitude: float, width: float) -> SpectralField:
    """Even zero-mean datum A (1 - 2 (x/w)^2) exp(-(x/w)^2).

    Both the mean and the first moment vanish, which isolates slow far-field
    contributions built by the dynamics from those inherited from the datum.
    """
    x = grid.x
    y = (x / width) ** 2
    f = to_spectral(grid, amplitude * (1.0 - 2.0 * y) * np.exp(-y))
    c = f.coeffs.copy()
    c[0] = 0.0
    return SpectralField(grid, c)


def algebraic_datum(grid: Grid, amplitude: float, kappa: float) -> SpectralField:
    """u0(x) = A / (1 + |x|^kappa); algebraic decay of rate kappa."""
    x = grid.x
    return to_spectral(grid, amplitude / (1.0 + np.abs(x) ** kappa))


def noise_datum(grid: Grid, amplitude: float, seed: int) -> SpectralField:
    """Zero-mean band-limited noise, reproducible from the seed."""
    rng = np.random.default_rng(seed)
    u = amplitude * rng.standard_normal(grid.n)
    f = to_spectral(grid, u)
    keep = np.abs(grid.k) <= grid.n // 8
    c = f.coeffs * keep
    c[0] = 0.0
    return SpectralField(grid, c)


def normalize_mass(field: SpectralField, target: float = 1.0) -> SpectralField:
    """Rescale so that int u dx = target (mass must be nonzero)."""
    m = field.mass
    if m == 0.0:
        raise ZeroDivisionError("cannot normalize a zero-mass field")
    return field * (target / m)
