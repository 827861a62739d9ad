"""Independent slow oracles used by the test suite.

Each routine deliberately avoids the production code path it checks: the
direct O(n^2) DFT never calls an FFT, the dense kernel quadrature is a flat
trapezoid rule, the nonlinearity oracle convolves coefficient sequences
directly, and the cross-solver discretises space with finite-difference
stencils plus dense DFT sandwiches.  None of this is reachable from the CLI.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import IntegrationDivergedError, PreconditionError
from .kernel import truncation_cutoff
from .spectral import Grid, NonlinearitySpec, SpectralField
from .symbols import DispersionKind, SymbolSpec, full_symbol

__all__ = [
    "dense_dft",
    "dense_idft",
    "dense_kernel",
    "conv_nonlinearity",
    "fd_solve",
]

SIZE_CAP = 4096


def _check_size(n: int) -> None:
    if n > SIZE_CAP:
        raise PreconditionError(f"dense oracle capped at n = {SIZE_CAP}, got {n}")


def _dft_matrix(grid: Grid, sign: float) -> np.ndarray:
    # chunk-free here; the size cap keeps the matrix below ~270 MB
    return np.exp(sign * 1j * np.outer(grid.xi, grid.x))


def dense_dft(grid: Grid, samples) -> SpectralField:
    """Direct-sum forward transform; oracle for to_spectral."""
    _check_size(grid.n)
    samples = np.asarray(samples, dtype=float)
    coeffs = np.zeros(grid.n, dtype=complex)
    xs = grid.x
    for i, xi in enumerate(grid.xi):
        coeffs[i] = grid.dx * np.sum(samples * np.exp(-1j * xi * xs))
    return SpectralField(grid, coeffs)


def dense_idft(field: SpectralField) -> np.ndarray:
    """Direct-sum inverse transform; oracle for to_physical."""
    grid = field.grid
    _check_size(grid.n)
    out = np.zeros(grid.n)
    for j, x in enumerate(grid.x):
        out[j] = np.real(np.sum(field.coeffs * np.exp(1j * grid.xi * x))) / grid.length
    return out


def dense_kernel(spec: SymbolSpec, t: float, x: float, nodes: int = 1_000_001) -> float:
    """Uniform-trapezoid kernel value with ~10^6 nodes; oracle for kernel_point."""
    if t < 0.05:
        raise PreconditionError("dense_kernel supports t >= 0.05")
    cutoff = truncation_cutoff(spec, t)
    xi = np.linspace(-cutoff, cutoff, nodes)
    h = np.exp(1j * x * xi - full_symbol(spec, xi) * t)
    val = np.trapezoid(h, xi) / (2.0 * math.pi)
    if abs(val.imag) > 1e-8:
        raise PreconditionError(f"dense kernel imaginary residue {val.imag:.2e}")
    return float(val.real)


def _ascending(field: SpectralField) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(field.grid.k)
    return field.grid.k[order], field.coeffs[order]


def conv_nonlinearity(field: SpectralField, nl: NonlinearitySpec) -> SpectralField:
    """Coefficient-sequence convolution oracle for the dealiased nonlinearity.

    Products are computed as (1/L) linear convolutions of ascending-order
    coefficient sequences via np.convolve (direct summation), truncated to
    the same 2/3 ball the production path keeps.
    """
    grid = field.grid
    _check_size(grid.n)
    n = grid.n
    kmax = n // 3
    ks, cs = _ascending(field)
    ball = np.abs(ks) <= kmax
    cs = cs * ball

    # product hat: (ab)_hat[k] = (1/L) sum_m a_m b_{k-m}; with ascending
    # sequences the full linear convolution carries mode J - n at index J,
    # so modes [-n/2, n/2-1] live in the slice [n/2, 3n/2).
    full = np.convolve(cs, cs) / grid.length
    usq_asc = full[n // 2 : n // 2 + n]

    xi_asc = 2.0 * math.pi * np.arange(-n // 2, n // 2) / grid.length
    out_asc = np.zeros(n, dtype=complex)
    if nl.gamma1 != 0.0:
        out_asc += nl.gamma1 * (1j * xi_asc) * usq_asc
    if nl.gamma2 != 0.0:
        out_asc += nl.gamma2 * (1j * xi_asc) ** 2 * usq_asc
    if nl.gamma3 != 0.0:
        ux_asc = (1j * xi_asc) * cs
        fullx = np.convolve(ux_asc, ux_asc) / grid.length
        out_asc += nl.gamma3 * fullx[n // 2 : n // 2 + n]
    out_asc *= np.abs(np.arange(-n // 2, n // 2)) <= kmax

    # back to fftfreq order
    ks_asc = np.arange(-n // 2, n // 2)
    coeffs = np.zeros(n, dtype=complex)
    coeffs[ks_asc % n] = out_asc
    return SpectralField(grid, coeffs)


def _stencil_matrix(n: int, offsets, coeffs, scale: float) -> np.ndarray:
    M = np.zeros((n, n))
    for off, c in zip(offsets, coeffs):
        M += c * np.eye(n, k=off)
        if off > 0:
            M += c * np.eye(n, k=off - n)
        elif off < 0:
            M += c * np.eye(n, k=off + n)
    return M * scale


def fd_solve(
    u0: SpectralField, spec: SymbolSpec, dt: float, t_end: float
) -> SpectralField:
    """Method-of-lines cross-solver: 4th-order centered differences for the
    integer-order pieces, dense DFT sandwiches for the fractional symbols,
    classical RK4 in time.  Stability-limited dt is the caller's concern.
    """
    grid = u0.grid
    n = grid.n
    if n > 1024:
        raise PreconditionError("fd_solve capped at n = 1024")
    h = grid.dx

    d1 = _stencil_matrix(n, (-2, -1, 1, 2), (1.0, -8.0, 8.0, -1.0), 1.0 / (12.0 * h))
    d2 = _stencil_matrix(
        n, (-2, -1, 0, 1, 2), (-1.0, 16.0, -30.0, 16.0, -1.0), 1.0 / (12.0 * h * h)
    )

    F = _dft_matrix(grid, -1.0) * grid.dx          # forward: samples -> hats
    Finv = _dft_matrix(grid, +1.0).T / grid.length  # inverse: hats -> samples
    a = np.abs(grid.xi)
    diss = np.real(Finv @ (np.diag(a**spec.alpha - a**spec.beta) @ F))
    if spec.kind is DispersionKind.LAPLACIAN:
        disp = _stencil_matrix(
            n,
            (-3, -2, -1, 1, 2, 3),
            (0.125, -1.0, 1.625, -1.625, 1.0, -0.125),
            1.0 / h**3,
        )
    else:
        disp = np.real(Finv @ (np.diag(1j * a * grid.xi) @ F))

    lin = -(disp + diss)
    g1, g2, g3 = spec.gamma1, spec.gamma2, spec.gamma3

    def f_rhs(u: np.ndarray) -> np.ndarray:
        out = lin @ u
        if g1 != 0.0 or g2 != 0.0:
            usq = u * u
            if g1 != 0.0:
                out = out - g1 * (d1 @ usq)
            if g2 != 0.0:
                out = out - g2 * (d2 @ usq)
        if g3 != 0.0:
            du = d1 @ u
            out = out - g3 * du * du
        return out

    steps = int(round(t_end / dt))
    u = u0.physical().copy()
    for _ in range(steps):
        k1 = f_rhs(u)
        k2 = f_rhs(u + 0.5 * dt * k1)
        k3 = f_rhs(u + 0.5 * dt * k2)
        k4 = f_rhs(u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(u)):
            raise IntegrationDivergedError("fd_solve diverged (stability limit?)")
    from .spectral import to_spectral

    return to_spectral(grid, u)
