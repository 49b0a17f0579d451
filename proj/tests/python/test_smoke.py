"""Smoke tests for the spdelab extension module."""

import math

import pytest
import spdelab as sl

try:
    from scipy.special import erfc as scipy_erfc
except ImportError:  # pragma: no cover
    scipy_erfc = None


def test_gaussian_kernel_values():
    assert sl.gaussian_kernel(1.0, 0.2, 0.2) == pytest.approx(1.0 / math.sqrt(4 * math.pi))
    assert sl.gaussian_kernel(0.25, 0.0, 1.0) == pytest.approx(math.exp(-1) / math.sqrt(math.pi))
    assert sl.gaussian_kernel(1.0, 0.0, 0.0, nu=0.5) == pytest.approx(1.0 / math.sqrt(2 * math.pi))


def test_kernel_ordering_and_symmetry():
    for t in (1e-3, 0.05, 0.3):
        for x, y in ((0.2, 0.7), (0.45, 0.5), (0.05, 0.95)):
            pd = sl.dirichlet_kernel(t, x, y)
            pg = sl.gaussian_kernel(t, x, y)
            pn = sl.neumann_kernel(t, x, y)
            assert pd <= pg + 1e-11
            assert pg <= pn + 1e-11
            assert pd == sl.dirichlet_kernel(t, y, x)
    assert sl.dirichlet_kernel(0.5, 0.0, 0.3) == 0.0
    assert sl.neumann_kernel(10.0, 0.3, 0.7) == pytest.approx(1.0, abs=1e-10)


def test_kernel_mass():
    assert sl.kernel_mass("neumann", 0.2, 0.3) == pytest.approx(1.0, abs=1e-8)
    m = sl.kernel_mass("dirichlet", 0.1, 0.5)
    assert m == pytest.approx(0.474487460379749, abs=1e-4)


@pytest.mark.skipif(scipy_erfc is None, reason="scipy not available")
def test_renewal_closed_form_vs_scipy():
    for a, c, t in ((1.0, 1.0, 1.0), (2.0, 0.3, 0.7), (1.0, 3.0, 0.2)):
        z = c * math.sqrt(math.pi * t)
        expected = a * math.exp(z * z) * scipy_erfc(-z)
        value, log_value = sl.renewal_closed_form(a, c, t)
        assert value == pytest.approx(expected, rel=1e-12)
        assert log_value == pytest.approx(math.log(expected), rel=1e-12)


def test_solver_matches_closed_form():
    sol = sl.solve_renewal(a=1.0, b=1.0, k=1.0, T=1.0, n=1024)
    f_end = math.exp(sol["log_f"][-1])
    exact, _ = sl.renewal_closed_form(1.0, 1.0, 1.0)
    assert f_end == pytest.approx(exact, rel=1e-3)
    assert sol["log_gap_at_T"] < 1e-3


def test_pam_second_moment():
    value, log_value = sl.pam_second_moment(1.0, 1.0, nu=0.5)
    assert value == pytest.approx(1.9523604891825571, rel=1e-12)
    assert log_value == pytest.approx(math.log(value), rel=1e-12)
    assert sl.pam_second_moment(0.0, 2.0)[0] == pytest.approx(1.0)


def test_growth_exponent_synthetic():
    ks = [2.0**i for i in range(1, 8)]
    quartic = sl.growth_exponent(ks, [k**4 for k in ks])
    assert quartic["slope"] == pytest.approx(4.0, abs=1e-9)
    quadratic = sl.growth_exponent(ks, [k**2 for k in ks])
    assert quadratic["slope"] == pytest.approx(2.0, abs=1e-9)


def test_simulation_determinism_and_boundaries():
    cfg = sl.sim_config(bc="dirichlet", nx=63, dt=1e-5, t_end=1e-3, lam=1.0)
    a = sl.simulate_path(cfg, seed=7, output_times=[0.0, 5e-4, 1e-3])
    b = sl.simulate_path(cfg, seed=7, output_times=[0.0, 5e-4, 1e-3])
    assert a == b
    t_last, u_last = a[-1]
    assert t_last == pytest.approx(1e-3)
    assert u_last[0] == 0.0 and u_last[-1] == 0.0
    c = sl.simulate_path(cfg, seed=8, output_times=[1e-3])
    assert c[0][1] != u_last


def test_second_moment_field_noiseless():
    cfg = sl.sim_config(bc="neumann", u0="flat", nx=31, dt=1e-4, t_end=1e-3, lam=0.0)
    fm = sl.second_moment_field(cfg, t=1e-3, n_replicas=4, seed=1)
    assert fm["n_failed"] == 0
    assert all(ci == 0.0 for ci in fm["ci_half"])
    assert all(v == pytest.approx(1.0, abs=1e-12) for v in fm["mean_sq"])


def test_cfl_is_enforced():
    with pytest.raises(Exception, match="CFL"):
        sl.sim_config(nx=255, dt=1e-3, t_end=0.01)


def test_replica_seed_derivation():
    seeds = {sl.derive_replica_seed(42, i) for i in range(1000)}
    assert len(seeds) == 1000
