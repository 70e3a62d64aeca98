import numpy as np
import pytest

from blochlab.approximation import (ApproxError, product_decompose, runge_pair,
                                    uniform_fit)
from blochlab.arcs import ArcSet

TWO_PI = 2.0 * np.pi


def _two_arcs(gap=0.8):
    return ArcSet.from_arcs([(gap, np.pi - gap), (np.pi + gap, TWO_PI - gap)])


def test_runge_pair_zero_at_origin():
    rep = runge_pair(_two_arcs(), 0.5, degree_cap=512)
    assert rep.margin_at_zero == 0.0
    assert abs(rep.poly(0.0)) < 1e-12


def test_runge_pair_close_to_one_on_set():
    rep = runge_pair(_two_arcs(), 0.4, degree_cap=1024)
    F = _two_arcs()
    z = np.exp(1j * F.sample(2048))
    assert float(np.max(np.abs(rep.poly(z) - 1.0))) < 0.4 + 1e-9
    assert rep.achieved


def test_runge_pair_rejects_full_circle():
    with pytest.raises(Exception):
        runge_pair(ArcSet.full_circle(), 0.3)


def test_uniform_fit_constant():
    F = _two_arcs()
    fit = uniform_fit(F, lambda z: np.ones_like(z), 0.1)
    assert fit.margin < 0.1
    assert fit.achieved


def test_uniform_fit_real_part_target():
    F = _two_arcs()
    fit = uniform_fit(F, lambda z: z.real.astype(complex), 0.25)
    z = np.exp(1j * F.sample(2048))
    assert float(np.max(np.abs(fit.poly(z) - z.real))) < 0.25 + 1e-9


def test_uniform_fit_error_carries_best():
    # a unimodular winding target cannot be approximated on arcs whose
    # union is nearly everything with a tiny budget at a tiny degree cap
    F = ArcSet.from_arcs([(0.05, TWO_PI - 0.05)])
    try:
        uniform_fit(F, lambda z: np.conj(z), 1e-4, degree_cap=8)
    except ApproxError as exc:
        assert exc.best is not None
        assert exc.best.margin > 1e-4
    else:
        pytest.fail("expected the fit to miss the budget")


def test_product_decompose_separable_target():
    def phi(pts):
        return (pts[..., 0].real * pts[..., 1].real).astype(complex)

    dec = product_decompose(phi, 2, 0.2)
    assert dec.error < 0.2
    assert len(dec.terms) >= 1


def test_product_decompose_evaluation_matches_target():
    def phi(pts):
        return (pts[..., 0].real * pts[..., 1].real).astype(complex)

    dec = product_decompose(phi, 2, 0.1)
    rng = np.random.default_rng(2)
    pts = np.exp(1j * rng.uniform(0, TWO_PI, size=(500, 2)))
    err = np.max(np.abs(dec(pts) - phi(pts)))
    assert err < 0.1 + 1e-6
