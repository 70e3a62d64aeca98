import numpy as np
import pytest

from blochlab.arcs import ArcSet
from blochlab.inner import InnerSpec
from blochlab.pipeline import (BlockParams, build_block, plateau_polynomial,
                               simul_approx_disc, simul_approx_polydisc)

TWO_PI = 2.0 * np.pi


def _weak_base():
    # a weak atom keeps the exceptional boundary set tiny
    return InnerSpec.atomic([(1.0 + 0j, 0.02)])


def _two_arcs(measure=0.8):
    half_gap = (1.0 - measure) * np.pi / 2.0
    return ArcSet.from_arcs([(half_gap, np.pi - half_gap),
                             (np.pi + half_gap, TWO_PI - half_gap)])


def test_plateau_polynomial_margin_and_center():
    F = _two_arcs(0.7)
    poly, diag = plateau_polynomial(F, 0.3, 0.25, degree_cap=1024)
    z = np.exp(1j * F.sample(2048))
    assert float(np.max(np.abs(poly(z) - 1.0))) < 0.3 + diag["truncation_tail"] + 0.02
    assert abs(poly(0.0)) == pytest.approx(0.25, abs=0.01)
    assert not diag["center_clamped"]


def test_plateau_polynomial_rejects_full_circle():
    with pytest.raises(ValueError):
        plateau_polynomial(ArcSet.full_circle(), 0.3, 0.0)


def test_build_block_zero_target():
    params = BlockParams(eps1=0.3, eps2=0.2, eta=0.5)
    f, E, rep = build_block(lambda z: np.zeros_like(np.asarray(z)), params,
                            _weak_base())
    assert rep["value_at_zero"] == 0.0
    assert rep["norm"] == 0.0
    assert E.is_full()


def test_build_block_constant_target_budgets():
    params = BlockParams(eps1=0.3, eps2=0.2, eta=0.5)
    f, E, rep = build_block(
        lambda z: np.ones_like(np.asarray(z, dtype=complex)), params, _weak_base())
    # origin, boundary error and measure contracts hold; the norm contract
    # with eta < 1 is out of reach at these budgets and is reported honestly
    assert rep["item1_origin"]
    assert rep["item3_error"]
    assert rep["measure_ok"]
    assert rep["sup_error"] < params.eps1
    assert rep["value_at_zero"] < params.eps1
    assert np.isfinite(rep["norm"])
    assert not rep["item2_norm"]


def test_simul_disc_zero_target():
    res = simul_approx_disc(lambda z: np.zeros_like(np.asarray(z)), 0.5,
                            _weak_base())
    assert res.report["norm"] == 0.0
    assert res.report["measure"] == 1.0
    assert res.E.is_full()


def test_simul_disc_constant_target():
    res = simul_approx_disc(
        lambda z: np.ones_like(np.asarray(z, dtype=complex)), 0.5, _weak_base())
    rep = res.report
    assert rep["error_ok"]
    assert rep["measure_ok"]
    assert rep["sup_error"] < 0.5
    assert rep["measure"] + rep["measure_ci"] >= 0.5
    # canonical and used splits both recorded
    assert rep["split_canonical"]["delta_Q"] == pytest.approx(0.25)
    assert rep["split_used"]["delta_P"] > 0


def test_simul_disc_result_is_polynomial():
    res = simul_approx_disc(
        lambda z: np.ones_like(np.asarray(z, dtype=complex)), 0.5, _weak_base())
    p = res.f_disc
    z = np.exp(1j * res.E.sample(512)) if res.E.arcs else np.zeros(1)
    assert np.all(np.isfinite(p(z)))


def test_simul_polydisc_n1_delegates_to_disc():
    phi = lambda z: np.asarray(z, dtype=complex).real.astype(complex)
    a = simul_approx_disc(phi, 0.5, _weak_base(), seed=17)
    b = simul_approx_polydisc(phi, 0.5, 1, _weak_base(), seed=17)
    assert abs(a.report["norm"] - b.report["norm"]) < 0.05
    assert abs(a.report["sup_error"] - b.report["sup_error"]) < 0.05
    assert abs(a.report["measure"] - b.report["measure"]) < 0.05


def test_simul_polydisc_rejects_large_dim():
    with pytest.raises(Exception):
        simul_approx_polydisc(lambda pts: np.zeros(pts.shape[0]), 0.5, 3,
                              _weak_base())


def test_block_params_validation():
    with pytest.raises(ValueError):
        BlockParams(eps1=0.0, eps2=0.2, eta=0.5)
    with pytest.raises(ValueError):
        BlockParams(eps1=0.3, eps2=0.2, eta=1.5)
    with pytest.raises(ValueError):
        BlockParams(eps1=0.3, eps2=0.2, eta=0.5, trunc_radius=1.0)
