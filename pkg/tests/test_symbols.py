import math

import numpy as np
import pytest

from fracwave.errors import PreconditionError, SymbolDomainError
from fracwave.symbols import (
    DispersionKind,
    SymbolSpec,
    decay_exponent,
    dispersion_symbol,
    dissipation_minimum,
    full_symbol,
    local_time_eta,
    resonance,
    symbol_derivative,
)

H = DispersionKind.HILBERT
P = DispersionKind.LAPLACIAN


def test_dispersion_symbol_values():
    assert dispersion_symbol(H, 0.0) == 0.0
    assert dispersion_symbol(P, 0.0) == 0.0
    assert dispersion_symbol(H, -2.0) == 2.0
    assert dispersion_symbol(P, 3.0) == -9.0


def test_full_symbol_values():
    assert full_symbol(SymbolSpec(H, 3, 1, 1), 0.0) == 0.0
    assert full_symbol(SymbolSpec(P, 4, 2, 0, 1, 2), 1.0) == pytest.approx(-1j)
    assert full_symbol(SymbolSpec(H, 3, 1, 1), 2.0) == pytest.approx(6.0 + 4.0j)


def test_full_symbol_conjugate_symmetry():
    rng = np.random.default_rng(7)
    for spec in (SymbolSpec(H, 3.3, 1.2, 1), SymbolSpec(P, 4.1, 2.7, 0, 1, 1)):
        xi = rng.uniform(-20, 20, size=200)
        assert np.allclose(full_symbol(spec, -xi), np.conj(full_symbol(spec, xi)))


def test_symbol_derivative_closed_values():
    spec = SymbolSpec(H, 3, 1, 1)
    assert symbol_derivative(spec, 1.0, 1) == pytest.approx(2.0 + 2.0j)
    assert symbol_derivative(spec, -1.0, 2) == pytest.approx(6.0 - 2.0j)


def _kfold_central(fun, x, k, h):
    coef = [(-1.0) ** j * math.comb(k, j) for j in range(k + 1)]
    vals = [fun(x + (k / 2.0 - j) * h) for j in range(k + 1)]
    return sum(c * v for c, v in zip(coef, vals)) / h**k


def _fd_derivative(fun, x, k, h):
    # one Richardson sweep removes the h^2 term of the centered stencil
    d1 = _kfold_central(fun, x, k, h)
    d2 = _kfold_central(fun, x, k, h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def test_symbol_derivative_order1_finite_difference():
    for spec in (SymbolSpec(H, 3, 1, 1), SymbolSpec(P, 4, 2, 0, 1, 2)):
        exact = symbol_derivative(spec, 0.7, 1)
        h = 1e-6
        fd = (full_symbol(spec, 0.7 + h) - full_symbol(spec, 0.7 - h)) / (2 * h)
        assert abs(fd - exact) <= 1e-6 * abs(exact)


@pytest.mark.parametrize(
    "spec",
    [SymbolSpec(H, 3.6, 1.4, 1), SymbolSpec(P, 4.3, 2.2, 1)],
    ids=["hilbert", "laplacian"],
)
@pytest.mark.parametrize("order", [1, 2, 3, 4, 5])
def test_symbol_derivative_matches_kfold_differences(spec, order):
    rng = np.random.default_rng(11 + order)
    xs = rng.uniform(0.1, 10.0, size=50) * rng.choice([-1.0, 1.0], size=50)
    for x in xs:
        exact = symbol_derivative(spec, x, order)
        fd = _fd_derivative(lambda z: full_symbol(spec, z), x, order, abs(x) / 30.0)
        scale = max(
            abs(exact),
            abs(x) ** (spec.alpha - order) + abs(x) ** (spec.beta - order),
        )
        assert abs(fd - exact) <= 1e-4 * scale, (x, exact, fd)


def test_symbol_derivative_at_origin():
    smooth = SymbolSpec(P, 4, 2, 0, 1, 2)
    assert symbol_derivative(smooth, 0.0, 1) == 0.0
    assert symbol_derivative(smooth, 0.0, 2) == pytest.approx(-2.0)  # -beta! = -2
    with pytest.raises(SymbolDomainError):
        symbol_derivative(SymbolSpec(H, 3, 1, 1), 0.0, 2)
    with pytest.raises(SymbolDomainError):
        symbol_derivative(SymbolSpec(P, 3.5, 1.5, 1), 0.0, 1)


def test_symbol_derivative_order_range():
    with pytest.raises(NotImplementedError):
        symbol_derivative(SymbolSpec(H, 3, 1, 1), 1.0, 6)
    with pytest.raises(NotImplementedError):
        symbol_derivative(SymbolSpec(H, 3, 1, 1), 1.0, 0)


def test_decay_exponent_examples():
    assert decay_exponent(SymbolSpec(H, 3, 1, 1)).n == 2
    assert decay_exponent(SymbolSpec(P, 4, 2, 0, 1, 2)).is_schwartz
    assert decay_exponent(SymbolSpec(P, 3.5, 2, 1)).n == 4
    assert decay_exponent(SymbolSpec(P, 3, 1.5, 1)).n == 2


def test_decay_exponent_branch_table():
    # hilbert caps at 3; laplacian follows the dissipation orders
    assert decay_exponent(SymbolSpec(H, 6, 4.5, 1)).n == 3
    assert decay_exponent(SymbolSpec(H, 4, 2.5, 1)).n == 3
    assert decay_exponent(SymbolSpec(H, 4, 1, 1)).n == 2
    assert decay_exponent(SymbolSpec(P, 6, 4, 1)).is_schwartz
    assert decay_exponent(SymbolSpec(P, 5, 2, 1)).n == 6
    assert decay_exponent(SymbolSpec(P, 4, 3, 1)).n == 4
    assert decay_exponent(SymbolSpec(P, 4, 2.5, 1)).n == 3


def test_resonance_zeros_and_composition():
    spec = SymbolSpec(H, 4, 1, 1)
    for xi in (0.3, -2.0, 11.0):
        assert resonance(spec, xi, 0.0) == 0.0
        assert resonance(spec, xi, xi) == 0.0
    direct = (
        full_symbol(spec, 0.5) - full_symbol(spec, 64.0) - full_symbol(spec, 0.5 - 64.0)
    )
    assert abs(resonance(spec, 0.5, 64.0) - direct) <= 1e-12 * abs(direct)


def test_local_time_eta_values():
    assert local_time_eta(SymbolSpec(P, 4, 2, 0, 1, 2), 0.0) == pytest.approx(0.375)
    assert local_time_eta(SymbolSpec(P, 4, 2, 0, 1, 2), -1.0) == pytest.approx(0.125)
    # direct substitution: 2.5/5 - 5/10 + 1
    assert local_time_eta(SymbolSpec(P, 5, 2, 0, 1, 2), 2.5) == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        local_time_eta(SymbolSpec(P, 4, 2, 0, 1, 2), -2.0)


def test_dissipation_minimum_against_grid_search():
    for spec in (SymbolSpec(H, 3, 1, 1), SymbolSpec(P, 4.5, 2.2, 0, 1, 2)):
        xi_star, v_star = dissipation_minimum(spec)
        xi = np.linspace(1e-6, 2.0, 2_000_001)
        vals = xi**spec.alpha - xi**spec.beta
        i = int(np.argmin(vals))
        assert abs(vals[i] - v_star) <= 1e-8
        assert np.all(np.real(full_symbol(spec, xi)) >= v_star - 1e-12)


def test_dissipation_split_bound():
    rng = np.random.default_rng(3)
    for spec in (SymbolSpec(H, 3, 1, 1), SymbolSpec(P, 4, 2, 0, 1, 2)):
        m = 2.0 ** (1.0 / (spec.alpha - spec.beta))
        xi = rng.uniform(m, 50.0, size=500) * rng.choice([-1.0, 1.0], size=500)
        assert np.all(
            np.real(full_symbol(spec, xi)) >= 0.5 * np.abs(xi) ** spec.alpha - 1e-9
        )


def test_spec_validation():
    with pytest.raises(PreconditionError):
        SymbolSpec(H, 1.0, 2.0, 1)  # alpha <= beta
    with pytest.raises(PreconditionError):
        SymbolSpec(H, 3.0, 0.5, 1)  # beta < 1
    with pytest.raises(PreconditionError):
        SymbolSpec(P, 3.0, 1.0, 0, 1, 0)  # gamma2 active needs alpha > 7/2
    with pytest.raises(PreconditionError):
        SymbolSpec(H, 1.8, 1.0, 1)  # gamma2=gamma3=0 needs alpha > 2
    SymbolSpec(P, 3.6, 1.0, 1, 1, 1)  # boundary-clearing spec is fine
