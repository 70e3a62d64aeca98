"""Constructive polynomial approximation on arc sets and product tori.

Three builders: a polynomial pinned to 0 at the origin and to 1 on an arc
set (least squares with the origin constraint imposed exactly), a uniform
polynomial fit of a boundary function on an arc set, and a decomposition
of a continuous function on the N-torus into a short sum of products of
one-variable trigonometric polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from blochlab.arcs import ArcSet
from blochlab.expressions import Polynomial1D

GAP_MIN = 2.0 * np.pi / 1000.0

#: verification sampling density: max of this floor and 32 * degree points.
VERIFY_FLOOR = 10_000


class ApproxError(RuntimeError):
    """Target margin unreachable within the degree cap."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


def _verify_count(degree: int) -> int:
    return max(VERIFY_FLOOR, 32 * degree)


#: weight of complement-of-F anchor samples relative to F samples.
_GAP_WEIGHT = 0.3


def _bounded_fit(A_main, b_main, A_gap, t_gap, bound, iters: int = 12):
    """Least squares on the main rows with a modulus cap off the set.

    Main-row weights follow Lawson reweighting (trading mean-square error
    for near-uniform error).  Gap rows are soft anchors whose targets are
    re-clamped each pass to the current fit value, capped at ``bound`` in
    modulus, so they only push back where the polynomial tries to blow up.
    """
    n_main = b_main.size
    w = np.ones(n_main)
    t_gap = np.asarray(t_gap, dtype=complex).copy()
    coef = None
    for _ in range(iters):
        sw = np.sqrt(w)[:, None]
        A = np.vstack([A_main * sw, A_gap * np.sqrt(_GAP_WEIGHT)])
        b = np.concatenate([b_main * sw[:, 0], t_gap * np.sqrt(_GAP_WEIGHT)])
        coef, *_ = scipy.linalg.lstsq(A, b, lapack_driver="gelsy", check_finite=False)
        err = np.abs(A_main @ coef - b_main)
        w = w * np.maximum(err, 1e-15)
        w = np.clip(w / np.mean(w), 1e-6, 1e6)
        if A_gap.shape[0]:
            v = A_gap @ coef
            mod = np.abs(v)
            t_gap = np.where(mod > bound, v * (bound / np.maximum(mod, 1e-300)), v)
    return coef


def _gap_angles(F: ArcSet, count: int) -> np.ndarray:
    comp = F.complement()
    if not comp.arcs:
        return np.array([])
    return comp.sample(count)


def natural_gap_bound(F: ArcSet, slack: float = 1.3) -> float:
    """Smallest workable modulus cap off F for a polynomial vanishing at 0.

    The mean of P over the circle is P(0) = 0 while P is pinned to 1 on F,
    so |P| must average about m(F)/m(gap) over the complement; capping
    below that starves the fit.
    """
    g = max(1.0 - F.measure, 1e-3)
    return slack * max(1.0, F.measure / g)


def _check_proper(F: ArcSet):
    comp = F.complement()
    if not comp.arcs or max(e - s for s, e in comp.arcs) < GAP_MIN:
        raise ApproxError(
            "arc set must leave a complementary gap of length >= 2*pi/1000")


@dataclass(frozen=True)
class RungeReport:
    poly: Polynomial1D
    margin_at_zero: float
    margin_on_set: float
    degree: int
    achieved: bool


def runge_pair(F: ArcSet, delta: float, degree_cap: int = 4096,
               bound: float = None) -> RungeReport:
    """Polynomial P with P(0) = 0 exactly, |P - 1| < delta on F, |P| capped off F.

    Least squares of |P - 1|^2 over F samples with the constant term
    dropped (so the origin constraint is exact, not fitted), doubling the
    degree from 8 until the margin verifies on a dense fresh sampling.
    Off F the modulus is softly capped at ``bound`` (default from the
    mean-value lower limit m(F)/m(gap)), which keeps the downstream
    product Q*(P o J) from exploding on the exceptional set.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if not F.arcs:
        return RungeReport(Polynomial1D.zero(), 0.0, 0.0, 0, True)
    _check_proper(F)
    if bound is None:
        bound = natural_gap_bound(F)
    best = None
    degree = 8
    while degree <= degree_cap:
        th_main = F.sample(max(4 * degree + 16, 256))
        th_gap = _gap_angles(F, max(degree // 2, 64))
        powers = np.arange(1, degree + 1)
        # basis z^1 .. z^degree: the missing constant pins P(0) = 0
        A_main = np.exp(1j * th_main)[:, None] ** powers
        A_gap = np.exp(1j * th_gap)[:, None] ** powers
        coef = _bounded_fit(A_main, np.ones(th_main.size, dtype=complex),
                            A_gap, np.ones(th_gap.size, dtype=complex), bound)
        p = Polynomial1D(np.concatenate([[0.0], coef]))
        zv = np.exp(1j * F.sample(_verify_count(degree)))
        margin = float(np.max(np.abs(p(zv) - 1.0)))
        report = RungeReport(p, 0.0, margin, degree, margin < delta)
        if best is None or margin < best.margin_on_set:
            best = report
        if margin < delta:
            return report
        degree *= 2
    raise ApproxError(
        f"runge margin {best.margin_on_set:.3e} above {delta:.3e} at degree cap", best)


@dataclass(frozen=True)
class UniformFitReport:
    poly: Polynomial1D
    margin: float
    degree: int
    sup_norm: float
    achieved: bool


def _sup_disc(p: Polynomial1D) -> float:
    """Sup of |p| over the closed disc = sup over the circle (max principle)."""
    return p.sup_on_circle(1.0)


def uniform_fit(F: ArcSet, phi, delta: float, degree_cap: int = 4096,
                bound: float = None) -> UniformFitReport:
    """Polynomial Q with |Q - phi| < delta on F; also reports sup |Q| on the disc.

    ``phi`` is a callable on unimodular points, or a Polynomial1D (returned
    unchanged with margin 0).  Off F the modulus is softly capped at
    ``bound`` (default: 1.5 * sup |phi| + 0.5) via clamped anchors.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if isinstance(phi, Polynomial1D):
        if phi.degree > degree_cap:
            raise ApproxError("polynomial target exceeds the degree cap")
        return UniformFitReport(phi, 0.0, phi.degree, _sup_disc(phi), True)
    if not F.arcs:
        return UniformFitReport(Polynomial1D.zero(), 0.0, 0, 0.0, True)
    _check_proper(F)
    best = None
    degree = 8
    while degree <= degree_cap:
        th_main = F.sample(max(4 * degree + 16, 256))
        th_gap = _gap_angles(F, max(degree // 2, 64))
        target = np.asarray(phi(np.exp(1j * th_main)), dtype=complex)
        # anchors start from phi's own values off F, then get re-clamped
        gap_start = np.asarray(phi(np.exp(1j * th_gap)), dtype=complex)
        if bound is None:
            cap = 1.5 * float(np.max(np.abs(target))) + 0.5
        else:
            cap = bound
        powers = np.arange(0, degree + 1)
        A_main = np.exp(1j * th_main)[:, None] ** powers
        A_gap = np.exp(1j * th_gap)[:, None] ** powers
        coef = _bounded_fit(A_main, target, A_gap, gap_start, cap)
        q = Polynomial1D(coef)
        zv = np.exp(1j * F.sample(_verify_count(degree)))
        margin = float(np.max(np.abs(q(zv) - np.asarray(phi(zv), dtype=complex))))
        report = UniformFitReport(q, margin, degree, _sup_disc(q), margin < delta)
        if best is None or margin < best.margin:
            best = report
        if margin < delta:
            return report
        degree *= 2
    raise ApproxError(
        f"uniform fit margin {best.margin:.3e} above {delta:.3e} at degree cap", best)


# ---------------------------------------------------------------------------
# Stone-Weierstrass style product decomposition on the N-torus


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """One-variable trigonometric polynomial sum c_k e^{i k theta}, |k| <= K."""

    coeffs: np.ndarray  # length 2K+1, index k + K

    @property
    def max_freq(self) -> int:
        return (self.coeffs.size - 1) // 2

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        K = self.max_freq
        out = np.zeros(zeta.shape, dtype=complex)
        # negative powers of a unimodular variable are conjugate powers
        for k in range(-K, K + 1):
            c = self.coeffs[k + K]
            if c != 0:
                out += c * (zeta ** k if k >= 0 else np.conj(zeta) ** (-k))
        return out

    @classmethod
    def exponential(cls, k: int, c: complex = 1.0) -> "TrigPoly":
        K = abs(k)
        coeffs = np.zeros(2 * K + 1, dtype=complex)
        coeffs[k + K] = c
        return cls(coeffs)


@dataclass(frozen=True, eq=False)
class ProductTerm:
    """coefficient * f_1(zeta_1) * ... * f_N(zeta_N) with TrigPoly factors."""

    factors: tuple
    coefficient: complex = 1.0

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=complex)
        if len(self.factors) == 1:
            return self.coefficient * self.factors[0](pts)
        out = np.full(pts.shape[:-1], self.coefficient, dtype=complex)
        for j, f in enumerate(self.factors):
            out = out * f(pts[..., j])
        return out


@dataclass(frozen=True)
class DecompositionResult:
    terms: tuple
    error: float
    grid_size: int

    def __call__(self, pts):
        return np.sum([t(pts) for t in self.terms], axis=0)


def _torus_grid(n_dim: int, size: int) -> np.ndarray:
    ang = 2.0 * np.pi * np.arange(size) / size
    axes = np.meshgrid(*([np.exp(1j * ang)] * n_dim), indexing="ij")
    return np.stack(axes, axis=-1)


def product_decompose(phi, n_dim: int, eps: float, m_cap: int = 64,
                      grid_size: int = 256) -> DecompositionResult:
    """Approximate phi on the N-torus by <= m_cap products of TrigPolys.

    Fourier coefficients are measured on a uniform grid; for N = 2 the
    coefficient matrix is cut by singular values, so rank-one structure
    (e.g. Re zeta_1 * Re zeta_2) collapses to a single term.  For other N
    each retained frequency is its own rank-one exponential term.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if n_dim < 1:
        raise ValueError("dimension must be >= 1")
    pts = _torus_grid(n_dim, grid_size)
    if n_dim == 1:
        pts = pts[..., 0]
    vals = np.asarray(phi(pts), dtype=complex)
    coeffs = np.fft.fftn(vals) / vals.size
    freqs = np.fft.fftfreq(grid_size, d=1.0 / grid_size).astype(int)

    def check(terms):
        approx = np.sum([t(pts) for t in terms], axis=0) if terms else np.zeros_like(vals)
        return float(np.max(np.abs(approx - vals)))

    if n_dim == 1:
        K = grid_size // 2 - 1
        tc = np.zeros(2 * K + 1, dtype=complex)
        for i, k in enumerate(freqs):
            if abs(k) <= K:
                tc[k + K] = coeffs[i]
        terms = (ProductTerm((TrigPoly(tc),)),)
        err = check(terms)
        if err >= eps:
            raise ApproxError(f"one-variable synthesis error {err:.3e} >= {eps:.3e}",
                              DecompositionResult(terms, err, grid_size))
        return DecompositionResult(terms, err, grid_size)

    if n_dim == 2:
        K = grid_size // 2 - 1
        C = np.zeros((2 * K + 1, 2 * K + 1), dtype=complex)
        for i1, k1 in enumerate(freqs):
            for i2, k2 in enumerate(freqs):
                if abs(k1) <= K and abs(k2) <= K and coeffs[i1, i2] != 0:
                    C[k1 + K, k2 + K] = coeffs[i1, i2]
        # trim to the occupied frequency window to keep the SVD small
        occ = np.flatnonzero(np.any(np.abs(C) > 1e-15, axis=1))
        occ2 = np.flatnonzero(np.any(np.abs(C) > 1e-15, axis=0))
        if occ.size == 0:
            return DecompositionResult((), check(()), grid_size)
        W = max(K - occ.min(), occ.max() - K, K - occ2.min(), occ2.max() - K)
        C = C[K - W: K + W + 1, K - W: K + W + 1]
        U, s, Vh = np.linalg.svd(C)
        terms = []
        for rank in range(1, min(m_cap, s.size) + 1):
            l = rank - 1
            if s[l] < 1e-15:
                break
            terms.append(ProductTerm(
                (TrigPoly(U[:, l] * s[l]), TrigPoly(Vh[l, :].copy()))))
            err = check(tuple(terms))
            if err < eps:
                return DecompositionResult(tuple(terms), err, grid_size)
        err = check(tuple(terms))
        raise ApproxError(f"decomposition error {err:.3e} >= {eps:.3e} at rank cap",
                          DecompositionResult(tuple(terms), err, grid_size))

    # N >= 3: one exponential product term per retained frequency
    flat = np.abs(coeffs).ravel()
    order = np.argsort(flat)[::-1]
    idx = np.array(np.unravel_index(order, coeffs.shape)).T
    terms = []
    for row in idx[:m_cap]:
        c = coeffs[tuple(row)]
        if abs(c) < 1e-15:
            break
        ks = [freqs[i] for i in row]
        factors = [TrigPoly.exponential(k) for k in ks]
        terms.append(ProductTerm(tuple(factors), c))
        err = check(tuple(terms))
        if err < eps:
            return DecompositionResult(tuple(terms), err, grid_size)
    err = check(tuple(terms))
    raise ApproxError(f"decomposition error {err:.3e} >= {eps:.3e} at term cap",
                      DecompositionResult(tuple(terms), err, grid_size))


def decomposition_csv(result: DecompositionResult) -> str:
    """CSV rows: term index, per-axis dominant frequency, |coefficient|, residual."""
    lines = ["term,frequencies,coefficient_modulus,residual"]
    for i, t in enumerate(result.terms):
        doms = []
        mod = abs(t.coefficient)
        for f in t.factors:
            K = f.max_freq
            k = int(np.argmax(np.abs(f.coeffs))) - K
            doms.append(str(k))
            mod *= float(np.max(np.abs(f.coeffs)))
        lines.append(f"{i},{';'.join(doms)},{mod:.17g},{result.error:.17g}")
    return "\n".join(lines) + "\n"
