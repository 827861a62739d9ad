import numpy as np
import pytest

from fracwave.errors import UnknownModelError
from fracwave.models import (
    algebraic_datum,
    available_models,
    even_wavelet_datum,
    gaussian_datum,
    noise_datum,
    normalize_mass,
    preset,
    wavelet_datum,
)
from fracwave.spectral import Grid, sobolev_norm, to_physical
from fracwave.symbols import DispersionKind


def test_catalog_names_and_validation():
    assert available_models() == ("npbo", "plasma", "mbo", "mkdv", "ost", "dkv", "ks")
    for name in available_models():
        p = preset(name)
        assert p.name == name
        assert p.spec.alpha > p.spec.beta >= 1.0
        assert p.citation


def test_catalog_decay_exponents():
    assert preset("npbo").decay.n == 2
    assert preset("plasma").decay.n == 2
    assert preset("ost").decay.n == 2
    assert preset("mbo").decay.n == 3  # alpha=4, beta=2.5 defaults
    assert preset("dkv").decay.is_schwartz
    assert preset("ks").decay.is_schwartz


def test_preset_kinds_and_gammas():
    assert preset("npbo").spec.kind is DispersionKind.HILBERT
    assert preset("ost").spec.kind is DispersionKind.LAPLACIAN
    assert preset("ost").spec.gammas == (1.0, 0.0, 0.0)
    assert preset("dkv").spec.gammas == (0.0, 1.0, 2.0)
    assert preset("ks").spec.gamma2 == 0.0


def test_gwp_eligibility():
    assert preset("dkv", gamma2=1.0, gamma3=2.0).spec.gwp_eligible
    assert not preset("dkv", gamma2=1.0, gamma3=1.0).spec.gwp_eligible
    assert not preset("ks").spec.gwp_eligible  # gamma3 != 0 forces ineligibility
    assert preset("ost").spec.gwp_eligible  # gamma2 = gamma3 = 0


def test_free_order_overrides():
    p = preset("mkdv", alpha=3.0, beta=1.5)
    assert (p.spec.alpha, p.spec.beta) == (3.0, 1.5)
    assert p.decay.n == 2
    q = preset("mbo", alpha=4.0, beta=2.5)
    assert q.decay.n == 3


def test_unknown_model_lists_catalog():
    with pytest.raises(UnknownModelError) as err:
        preset("kdv2")
    assert "npbo" in str(err.value)
    assert "ks" in str(err.value)


def test_datum_factories():
    grid = Grid(512, 100.0)
    g = gaussian_datum(grid, 0.5, 3.0)
    assert g.mass == pytest.approx(0.5 * 3.0 * np.sqrt(np.pi), rel=1e-10)

    w = wavelet_datum(grid, 0.5, 3.0)
    assert w.mass == 0.0
    assert np.max(np.abs(to_physical(w))) > 0.1

    e = even_wavelet_datum(grid, 0.5, 3.0)
    assert e.mass == 0.0
    # first moment also vanishes for the even profile
    assert abs(np.sum(grid.x * to_physical(e)) * grid.dx) < 1e-10

    a = algebraic_datum(grid, 0.5, 1.5)
    assert to_physical(a)[0] == pytest.approx(0.5 / (1 + 50.0**1.5), rel=1e-6)

    n1 = noise_datum(grid, 0.1, seed=42)
    n2 = noise_datum(grid, 0.1, seed=42)
    assert np.allclose(n1.coeffs, n2.coeffs)
    assert n1.mass == 0.0

    m = normalize_mass(gaussian_datum(grid, 0.5, 3.0), 1.0)
    assert m.mass == pytest.approx(1.0)
    with pytest.raises(ZeroDivisionError):
        normalize_mass(w, 1.0)


def test_suggested_grids_are_valid():
    for name in available_models():
        n, L = preset(name).suggested_grid
        Grid(n, L)
        norm = sobolev_norm(gaussian_datum(Grid(n, L), 0.5, 4.0), 0.0)
        assert norm > 0
