"""Periodic pseudo-spectral representation of real fields.

A field lives on a uniform grid of n (power of two) nodes over a period L,
nodes x_j = -L/2 + j L/n, and is stored as the n complex coefficients

    coeffs[k] ~ u_hat(xi_k) = int_period e^{-i x xi_k} u(x) dx,
    xi_k = 2 pi k / L,  k in fftfreq order,

i.e. Riemann-sum approximations of the continuum Fourier transform under the
package convention (see symbols module).  With this normalisation the
discrete Parseval identity reads

    int |u|^2 dx = (1/L) sum_k |coeffs[k]|^2,

and the mean (mass) of the field is coeffs[0].real.

Real fields are kept Hermitian-symmetric (coeffs[-k] = conj(coeffs[k]),
Nyquist real); the symmetry is re-enforced after every nonlinear operation.
Quadratic terms are dealiased by the 2/3 rule: modes with |k| > n//3 are
zeroed before and after physical-space products, which makes products exact
for inputs supported inside the 2/3 ball.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError

__all__ = [
    "Grid",
    "SpectralField",
    "NonlinearitySpec",
    "to_physical",
    "to_spectral",
    "multiplier",
    "dx",
    "nonlinearity",
    "sobolev_norm",
    "inner_product",
    "write_field_csv",
    "write_field_binary",
    "read_field_binary",
]

BINARY_MAGIC = b"FWF1"


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid: n nodes (power of two, >= 16) over period L."""

    n: int
    length: float

    def __post_init__(self):
        if self.n < 16 or (self.n & (self.n - 1)) != 0:
            raise PreconditionError(f"n must be a power of two >= 16, got {self.n}")
        if not self.length > 0:
            raise PreconditionError(f"length must be positive, got {self.length}")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def x(self) -> np.ndarray:
        return -0.5 * self.length + self.dx * np.arange(self.n)

    @property
    def k(self) -> np.ndarray:
        """Integer mode numbers in fftfreq order."""
        return np.rint(np.fft.fftfreq(self.n) * self.n).astype(int)

    @property
    def xi(self) -> np.ndarray:
        """Angular frequencies 2 pi k / L in fftfreq order."""
        return 2.0 * np.pi * self.k / self.length

    @property
    def _phase(self) -> np.ndarray:
        # e^{-i xi_k x_0} with x_0 = -L/2 is exactly (-1)^k
        return np.where(self.k % 2 == 0, 1.0, -1.0)


def _hermitianize(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    n = grid.n
    idx = (-np.arange(n)) % n
    sym = 0.5 * (coeffs + np.conj(coeffs[idx]))
    sym[0] = sym[0].real
    sym[n // 2] = sym[n // 2].real
    return sym


@dataclass(frozen=True)
class SpectralField:
    """Real periodic field stored as Hermitian-symmetric Fourier coefficients.

    Treated as an immutable value: operations return new fields.
    """

    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.grid.n,):
            raise PreconditionError(
                f"coeffs length {c.shape} does not match grid n = {self.grid.n}"
            )
        object.__setattr__(self, "coeffs", c)

    def physical(self) -> np.ndarray:
        return to_physical(self)

    @property
    def mass(self) -> float:
        """int u dx over the period."""
        return float(self.coeffs[0].real)

    def hermitianized(self) -> "SpectralField":
        return SpectralField(self.grid, _hermitianize(self.grid, self.coeffs))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class NonlinearitySpec:
    """Coefficients of gamma1 (u^2)_x + gamma2 (u^2)_xx + gamma3 (u_x)^2."""

    gamma1: float = 0.0
    gamma2: float = 0.0
    gamma3: float = 0.0

    @property
    def is_zero(self) -> bool:
        return self.gamma1 == 0.0 and self.gamma2 == 0.0 and self.gamma3 == 0.0


def to_spectral(grid: Grid, samples) -> SpectralField:
    """Forward transform of physical samples at the grid nodes."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.n,):
        raise PreconditionError(
            f"sample length {samples.shape} does not match grid n = {grid.n}"
        )
    coeffs = grid.dx * grid._phase * np.fft.fft(samples)
    return SpectralField(grid, _hermitianize(grid, coeffs))


def to_physical(field: SpectralField) -> np.ndarray:
    """Inverse transform; the imaginary residue of a Hermitian field is dropped."""
    grid = field.grid
    return np.real(np.fft.ifft(field.coeffs * grid._phase)) / grid.dx


def multiplier(field: SpectralField, symbol) -> SpectralField:
    """Apply a Fourier multiplier symbol(xi) diagonally.

    ``symbol`` is a callable on arrays of frequencies.  Hermitian symmetry is
    re-enforced afterwards, so symbols with the conjugate property map real
    fields to real fields exactly.
    """
    vals = np.asarray(symbol(field.grid.xi), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise PreconditionError("multiplier symbol not finite on grid frequencies")
    return SpectralField(field.grid, _hermitianize(field.grid, field.coeffs * vals))


def dx(field: SpectralField, order: int = 1) -> SpectralField:
    """Spectral derivative d^order/dx^order (Nyquist zeroed for odd orders)."""
    xi = field.grid.xi
    sym = (1j * xi) ** order
    if order % 2 == 1:
        sym = sym.copy()
        sym[field.grid.n // 2] = 0.0
    return SpectralField(field.grid, _hermitianize(field.grid, field.coeffs * sym))


def _dealias_mask(grid: Grid) -> np.ndarray:
    return np.abs(grid.k) <= grid.n // 3


def _truncate(field: SpectralField) -> SpectralField:
    return SpectralField(field.grid, field.coeffs * _dealias_mask(field.grid))


def _product(a: SpectralField, b: SpectralField) -> SpectralField:
    """Dealiased physical-space product of two (already truncated) fields."""
    pa, pb = to_physical(a), to_physical(b)
    prod = to_spectral(a.grid, pa * pb)
    return _truncate(prod)


def nonlinearity(field: SpectralField, nl: NonlinearitySpec) -> SpectralField:
    """gamma1 (u^2)_x + gamma2 (u^2)_xx + gamma3 (u_x)^2, 2/3-rule dealiased."""
    grid = field.grid
    if nl.is_zero:
        return SpectralField(grid, np.zeros(grid.n, dtype=complex))
    u = _truncate(field)
    out = np.zeros(grid.n, dtype=complex)
    if nl.gamma1 != 0.0 or nl.gamma2 != 0.0:
        usq = _product(u, u)
        if nl.gamma1 != 0.0:
            out = out + nl.gamma1 * dx(usq).coeffs
        if nl.gamma2 != 0.0:
            out = out + nl.gamma2 * dx(usq, 2).coeffs
    if nl.gamma3 != 0.0:
        ux = _truncate(dx(u))
        out = out + nl.gamma3 * _product(ux, ux).coeffs
    return SpectralField(grid, _hermitianize(grid, out))


def sobolev_norm(field: SpectralField, s: float = 0.0) -> float:
    """Discrete H^s norm, Parseval-consistent with the continuum integral.

    s = 0 reduces to the L^2 norm of the physical samples.
    """
    w = (1.0 + field.grid.xi**2) ** s
    return float(np.sqrt(np.sum(w * np.abs(field.coeffs) ** 2) / field.grid.length))


def inner_product(a: SpectralField, b: SpectralField) -> float:
    """L^2 inner product int a b dx of two real fields, computed spectrally."""
    return float(np.real(np.sum(np.conj(a.coeffs) * b.coeffs)) / a.grid.length)


def write_field_csv(field: SpectralField, path) -> None:
    """Snapshot as CSV rows `x,u` at full double precision."""
    xs = field.grid.x
    us = field.physical()
    with open(path, "w") as fh:
        fh.write("x,u\n")
        for x, u in zip(xs, us):
            fh.write(f"{x:.17g},{u:.17g}\n")


def write_field_binary(field: SpectralField, path) -> None:
    """Raw snapshot: magic FWF1, then n (int64 LE), L (float64 LE), samples."""
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack("<q", field.grid.n))
        fh.write(struct.pack("<d", field.grid.length))
        fh.write(field.physical().astype("<f8").tobytes())


def read_field_binary(path) -> SpectralField:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != BINARY_MAGIC:
            raise PreconditionError(f"bad magic {magic!r} in {path}")
        n = struct.unpack("<q", fh.read(8))[0]
        length = struct.unpack("<d", fh.read(8))[0]
        samples = np.frombuffer(fh.read(8 * n), dtype="<f8")
    return to_spectral(Grid(int(n), float(length)), np.array(samples))
