"""Concentrating test-function family and its second-order quotient fit.

For the cutoff family u_n = eta * n^{(N-2)/2} w(n r) the quotient

    Q(n) = (int |grad u_n|^2 - lambda int u_n^2) / (int rho^{-sigma} |u_n|^p)^{2/p}

tends to the sharp constant with a second-order correction: c1/n^2 for
N >= 5 and (c1 log n + c2)/n^2 for N = 4, where the divergent moments turn
the coefficient into a log slope.  Each Q(n) is evaluated by dedicated
radial quadrature on panels refined proportionally to 1/n near the pole
(reusing the coarser solver grids would alias the collapsing scale).

``theory_coefficient`` returns the second-order coefficient in the
normalization where the constraint denominator tends to
hs_mass^{2/p}: (S_g(p0) + 6 lambda)/(6N) * r2_dirichlet / D_inf, with the
truncated log slope of r2_dirichlet replacing the divergent moment at
N = 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bubble import bubble_grad, bubble_moments, bubble_value
from .constants import check_sigma, critical_exponent, sphere_area
from .errors import DomainError
from .manifold import ModelManifold, scalar_curvature_at_pole
from .minimizer import smooth_cutoff, smooth_cutoff_deriv

__all__ = ["ExpansionSeries", "ExpansionFit", "quotient_series", "theory_coefficient", "fit_expansion"]


@dataclass
class ExpansionSeries:
    n: np.ndarray
    energy: np.ndarray  # E(u_n)
    denom: np.ndarray  # constraint integral raised to 2/p
    quotient: np.ndarray  # Q(n) = E / denom
    lam: float
    sigma: float
    N: int
    r_cut: float


@dataclass
class ExpansionFit:
    model: str  # "inverse-square" (N>=5) or "log-corrected" (N=4)
    c0: float
    c1: float
    c2: float
    rms_residual: float


def _panel_edges(r_cut: float, n: float, levels_extra: int = 0) -> np.ndarray:
    """Geometric panels from the collapsing scale r_cut/(512 n) up to 2*r_cut."""
    k = int(math.ceil(math.log2(512.0 * n))) + levels_extra
    inner = 2.0 * r_cut * 2.0 ** (-np.arange(k, -1, -1, dtype=float))
    return np.concatenate(([0.0], inner))


def _family_integrals(m: ModelManifold, lam, sigma, n, r_cut, order=24, levels_extra=0):
    nn = m.N
    om = sphere_area(nn - 1)
    p = critical_exponent(sigma, nn)
    amp = n ** ((nn - 2) / 2.0)
    x, wgl = np.polynomial.legendre.leggauss(order)
    edges = _panel_edges(r_cut, n, levels_extra)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    r = (0.5 * (a + b)[:, None] + half[:, None] * x[None, :]).ravel()
    w = (half[:, None] * wgl[None, :]).ravel()

    eta = smooth_cutoff((r - r_cut) / r_cut)
    deta = smooth_cutoff_deriv((r - r_cut) / r_cut) / r_cut
    wv = amp * bubble_value(n * r, nn, sigma)
    wg = amp * n * bubble_grad(n * r, nn, sigma)
    u = eta * wv
    du = deta * wv + eta * wg
    psi = m.warp(r) ** (nn - 1)

    kin = om * float(np.dot(w, du * du * psi))
    mass = om * float(np.dot(w, u * u * psi))
    hs = om * float(np.dot(w, r ** (-sigma) * np.abs(u) ** p * psi))
    energy = kin - lam * mass
    return energy, hs ** (2.0 / p)


def quotient_series(
    m: ModelManifold,
    lam: float,
    sigma: float,
    n_list,
    r_cut: float | None = None,
) -> ExpansionSeries:
    """E, D and Q for each concentration index n (increasing, min 2).

    The quadrature self-checks by re-running with extra panel levels and a
    higher-order rule; disagreement raises rather than returning an
    under-resolved series.
    """
    s = check_sigma(sigma, closed=False)
    if s <= 0.0:
        raise DomainError("quotient_series requires sigma in (0, 2)")
    ns = np.asarray(sorted(float(v) for v in n_list), dtype=float)
    if len(ns) == 0 or ns[0] < 2.0:
        raise DomainError("n_list must be increasing with min(n) >= 2")
    if r_cut is None:
        r_cut = m.r_max / 2.0
    if 2.0 * r_cut > m.r_max * (1.0 + 1e-12):
        raise DomainError("cutoff support 2*r_cut exceeds the domain radius")
    energy = np.empty_like(ns)
    denom = np.empty_like(ns)
    for i, n in enumerate(ns):
        e1, d1 = _family_integrals(m, lam, s, n, r_cut)
        e2, d2 = _family_integrals(m, lam, s, n, r_cut, order=32, levels_extra=2)
        if abs(e1 - e2) > 1e-8 * max(abs(e2), 1.0) or abs(d1 - d2) > 1e-8 * max(abs(d2), 1.0):
            raise DomainError(f"quadrature self-check failed at n={n}; refine the panels")
        energy[i] = e2
        denom[i] = d2
    return ExpansionSeries(
        n=ns, energy=energy, denom=denom, quotient=energy / denom,
        lam=lam, sigma=s, N=m.N, r_cut=float(r_cut),
    )


def theory_coefficient(m: ModelManifold, lam: float, sigma: float) -> float:
    """Predicted second-order coefficient (S_g(p0)+6*lambda)/(6N) * R / D_inf.

    R is the |x|^2-weighted Dirichlet moment of the bubble for N >= 5 and
    its truncated log slope for N = 4 (where the moment diverges like
    log n); D_inf = hs_mass^{2/p} makes the denominator normalization
    explicit.
    """
    s = check_sigma(sigma, closed=False)
    if s <= 0.0:
        raise DomainError("theory_coefficient requires sigma in (0, 2)")
    if lam > 0.0:
        raise DomainError("the expansion regime has lambda <= 0")
    nn = m.N
    if nn < 4:
        raise DomainError("the expansion requires N >= 4")
    mom = bubble_moments(nn, s, tol=1e-10)
    p = critical_exponent(s, nn)
    d_inf = mom.hs_mass.value ** (2.0 / p)
    r2d = mom.r2_dirichlet.log_slope if nn == 4 else mom.r2_dirichlet.value
    sg = scalar_curvature_at_pole(m)
    return (sg + 6.0 * lam) / (6.0 * nn) * r2d / d_inf


def fit_expansion(series: ExpansionSeries, N: int | None = None) -> ExpansionFit:
    """Least squares of Q(n) against {1, 1/n^2} (N >= 5) or
    {1, log n/n^2, 1/n^2} (N = 4); c0 is the fitted limit and c1 the
    second-order coefficient in Q ~ c0 - c1/n^2 (resp. c0 - (c1 log n + c2)/n^2)."""
    nn = series.N if N is None else int(N)
    if nn < 4:
        raise DomainError("fit requires N >= 4")
    n = series.n
    q = series.quotient
    if len(n) < 4:
        raise DomainError("need at least 4 series entries to fit")
    if nn == 4:
        design = np.column_stack([np.ones_like(n), -np.log(n) / n**2, -1.0 / n**2])
        model = "log-corrected"
    else:
        design = np.column_stack([np.ones_like(n), -1.0 / n**2])
        model = "inverse-square"
    coef, _, rank, _ = np.linalg.lstsq(design, q, rcond=None)
    if rank < design.shape[1]:
        raise DomainError("rank-deficient fit design (n_list too short or clustered)")
    resid = q - design @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    c0 = float(coef[0])
    c1 = float(coef[1])
    c2 = float(coef[2]) if nn == 4 else 0.0
    return ExpansionFit(model=model, c0=c0, c1=c1, c2=c2, rms_residual=rms)
