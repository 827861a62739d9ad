import math

import numpy as np
import pytest

from fracwave.errors import (
    IntegrationDivergedError,
    NonContractionError,
    PreconditionError,
)
from fracwave.evolve import (
    EtdStepper,
    EvolveConfig,
    etd_step,
    load_trajectory,
    lwp_time_bound,
    picard_solve,
    rhs,
    run,
    save_trajectory,
)
from fracwave.kernel import kernel_hat
from fracwave.models import gaussian_datum, preset
from fracwave.spectral import Grid, SpectralField, sobolev_norm, to_physical
from fracwave.symbols import DispersionKind, SymbolSpec, full_symbol

KV = preset("dkv").spec
LIN_KV = SymbolSpec(DispersionKind.LAPLACIAN, 4, 2, 0, 0, 0)


@pytest.fixture
def grid():
    return Grid(256, 50.0)


def test_lwp_time_bound_reference_value():
    # eta = 3/8, bound = 4^{-8/3} just below the threshold
    b = lwp_time_bound(KV, 0.0, 1.0)
    assert b == pytest.approx(4.0 ** (-8.0 / 3.0), rel=1e-8)
    assert b < 4.0 ** (-8.0 / 3.0)


def test_lwp_time_bound_cap_and_homogeneity():
    assert lwp_time_bound(KV, 0.0, 1e-9) == pytest.approx(1.0, rel=1e-8)
    eta = 0.375
    b1 = lwp_time_bound(KV, 0.0, 3.0)
    b2 = lwp_time_bound(KV, 0.0, 6.0)
    assert b1 / b2 == pytest.approx(2.0 ** (1.0 / eta), rel=1e-10)
    with pytest.raises(PreconditionError):
        lwp_time_bound(KV, 0.0, 0.0)


def test_etd_step_linear_exact(grid):
    u0 = gaussian_datum(grid, 0.5, 3.0)
    dt = 0.01
    stepped = etd_step(u0, LIN_KV, dt)
    exact = u0.coeffs * np.exp(-full_symbol(LIN_KV, grid.xi) * dt)
    assert np.max(np.abs(stepped.coeffs - exact)) < 1e-10


def test_etd_linear_high_band_nonincreasing(grid):
    u0 = gaussian_datum(grid, 0.5, 1.0)
    state = u0
    stepper = EtdStepper(grid, LIN_KV, 0.01)
    band = np.abs(grid.xi) > 1.0
    prev = np.sum(np.abs(u0.coeffs[band]) ** 2)
    for _ in range(20):
        state = stepper.step(state)
        cur = np.sum(np.abs(state.coeffs[band]) ** 2)
        assert cur <= prev + 1e-15
        prev = cur


def test_etd_richardson_ratio(grid):
    u0 = gaussian_datum(grid, 0.5, 2.0)

    def defect(dt):
        one = etd_step(u0, KV, dt)
        two = etd_step(etd_step(u0, KV, dt / 2), KV, dt / 2)
        return sobolev_norm(one - two, 0.0)

    ratio = defect(2e-3) / defect(1e-3)
    assert 6.0 <= ratio <= 10.0


def test_picard_linear_single_iteration(grid):
    u0 = gaussian_datum(grid, 0.5, 3.0)
    sol, meta = picard_solve(u0, LIN_KV, 0.02)
    assert meta.iterations == 1
    assert meta.converged
    exact = u0.coeffs * np.exp(-full_symbol(LIN_KV, grid.xi) * 0.02)
    assert np.max(np.abs(sol.coeffs - exact)) < 1e-12


def test_picard_contraction_ratios(grid):
    u0 = gaussian_datum(grid, 1.0, 2.0)
    u0 = u0 * (1.0 / sobolev_norm(u0, 0.0))
    t = lwp_time_bound(KV, 0.0, 1.0)
    sol, meta = picard_solve(u0, KV, t, m_quad=16, tol=1e-12)
    d = [x for x in meta.distances if x > 1e-13]
    ratios = [b / a for a, b in zip(d, d[1:])]
    assert all(r <= 0.5 for r in ratios[1:])
    assert not meta.slow_contraction


def test_picard_preconditions(grid):
    u0 = gaussian_datum(grid, 0.5, 2.0)
    with pytest.raises(PreconditionError):
        picard_solve(u0, KV, 0.01, m_quad=4)
    with pytest.raises(PreconditionError):
        picard_solve(u0, KV, 0.0)


def test_picard_non_contraction_detected(grid):
    # far beyond the guaranteed window with a large datum the map expands
    u0 = gaussian_datum(grid, 40.0, 2.0)
    with pytest.raises((NonContractionError, IntegrationDivergedError)):
        picard_solve(u0, KV, 2.0, m_quad=8, max_iter=25)


def test_cross_integrator_agreement(grid):
    u0 = gaussian_datum(grid, 0.1, 2.0)
    spec = SymbolSpec(DispersionKind.LAPLACIAN, 4, 2, 0, 1, 1)
    t = 0.02
    pic, _ = picard_solve(u0, spec, t, m_quad=32, tol=1e-12)
    state = u0
    stepper = EtdStepper(grid, spec, t / 512)
    for _ in range(512):
        state = stepper.step(state)
    assert sobolev_norm(state - pic, 0.0) <= 1e-5


def test_run_linear_matches_kernel_path(grid):
    u0 = gaussian_datum(grid, 0.5, 3.0)
    cfg = EvolveConfig(dt=1e-3, t_end=0.5, snapshot_every=100)
    traj = run(u0, LIN_KV, cfg)
    exact = u0.coeffs * kernel_hat(LIN_KV, 0.5, grid.xi)
    assert np.max(np.abs(traj.states[-1].coeffs - exact)) < 1e-8
    assert traj.halted is None
    assert np.all(np.diff(traj.times) > 0)


def test_run_gwp_eligible_reaches_end(grid):
    u0 = gaussian_datum(grid, 0.5, 2.0)
    cfg = EvolveConfig(dt=2e-3, t_end=5.0, snapshot_every=250)
    traj = run(u0, KV, cfg)  # gamma2=1, gamma3=2: -2 g2 + g3 = 0
    assert traj.halted is None
    assert traj.times[-1] == pytest.approx(5.0)


def test_run_halts_on_threshold(grid):
    ks = preset("ks").spec
    u0 = gaussian_datum(grid, 2.0, 3.0)
    free = run(u0, ks, EvolveConfig(dt=1e-3, t_end=1.5, snapshot_every=10))

    def dxx_inf(state):
        from fracwave.spectral import dx

        return float(np.max(np.abs(to_physical(dx(state, 2)))))

    series = np.array([dxx_inf(s) for s in free.states])
    thr = 0.5 * (series.min() + series.max())
    halted = run(u0, ks, EvolveConfig(dt=1e-3, t_end=1.5, snapshot_every=10,
                                      blowup_threshold=thr))
    assert halted.halted is not None
    assert halted.halted.reason == "blowup-monitor"
    assert halted.times[-1] == pytest.approx(halted.halted.time)
    post = np.array([dxx_inf(s) for s in halted.states])
    assert np.all(post[:-1] <= thr)
    assert post[-1] > thr
    assert halted.halted.monitor > 0


def test_trajectory_round_trip(tmp_path, grid):
    u0 = gaussian_datum(grid, 0.5, 2.0)
    cfg = EvolveConfig(dt=1e-3, t_end=0.02, snapshot_every=5)
    traj = run(u0, KV, cfg)
    save_trajectory(traj, KV, cfg, tmp_path / "traj")
    back, spec2, cfg2 = load_trajectory(tmp_path / "traj")
    assert spec2 == KV
    assert cfg2.dt == cfg.dt
    assert np.allclose(back.times, traj.times)
    for a, b in zip(back.states, traj.states):
        assert np.max(np.abs(a.physical() - b.physical())) < 1e-14
    assert np.allclose(back.monitor, traj.monitor)


def test_rhs_matches_linear_symbol(grid):
    u0 = gaussian_datum(grid, 0.5, 2.0)
    r = rhs(u0, LIN_KV)
    expected = -full_symbol(LIN_KV, grid.xi) * u0.coeffs
    assert np.max(np.abs(r.coeffs - expected)) < 1e-12


def test_config_validation():
    with pytest.raises(PreconditionError):
        EvolveConfig(dt=0.2, t_end=0.1)
    with pytest.raises(PreconditionError):
        EvolveConfig(dt=0.1, t_end=1.0, integrator="rk4")
    with pytest.raises(PreconditionError):
        EvolveConfig(dt=0.1, t_end=1.0, picard_tol=0.0)


def test_run_with_picard_integrator(grid):
    u0 = gaussian_datum(grid, 0.2, 2.0)
    cfg = EvolveConfig(dt=5e-3, t_end=0.02, integrator="picard",
                       picard_quad=8, picard_tol=1e-11)
    traj = run(u0, KV, cfg)
    fine = run(u0, KV, EvolveConfig(dt=1e-4, t_end=0.02, snapshot_every=200))
    assert sobolev_norm(traj.states[-1] - fine.states[-1], 0.0) < 1e-6
