import math

import numpy as np
import pytest

from hardylab.constants import hardy_sobolev_constant, sphere_area
from hardylab.errors import DomainError
from hardylab.eigensolver import smallest_generalized_eigen
from hardylab.forms import (
    assemble_forms,
    build_grid,
    evaluate_quotient,
    hs_functional,
    hs_gradient,
    refine_grid,
    tri_quadform,
)
from hardylab.manifold import euclidean_ball, unit_sphere
from hardylab.minimizer import bubble_init


def test_build_grid_uniform_and_graded():
    g = build_grid(1.0, 8, 1.0, "dirichlet")
    assert np.allclose(g.nodes, np.linspace(0, 1, 9))
    g2 = build_grid(1.0, 8, 2.0, "dirichlet")
    assert g2.nodes[1] == pytest.approx(1.0 / 64)
    assert g2.nodes[0] == 0.0


def test_grid_nesting():
    g = build_grid(2.0, 16, 2.0, "reflected")
    fine = refine_grid(g)
    # every coarse node appears among the fine nodes
    for r in g.nodes:
        assert np.min(np.abs(fine.nodes - r)) < 1e-14


def test_build_grid_validation():
    with pytest.raises(DomainError):
        build_grid(1.0, 4, 2.0, "dirichlet")
    with pytest.raises(DomainError):
        build_grid(1.0, 16, 5.0, "dirichlet")
    with pytest.raises(DomainError):
        build_grid(1.0, 16, 2.0, "clamped")


def test_w2_closed_form_on_constant():
    # euclidean N=3: the sigma=2 weight integrates r^{N-3} = 1, so the
    # quadratic form on the constant equals |S^2| * r_max
    ball = euclidean_ball(3, 1.0)
    grid = build_grid(1.0, 64, 2.0, "reflected")
    forms = assemble_forms(grid, ball, 2.0)
    ones = np.ones(forms.n_nodes)
    got = float(np.dot(forms.w2, ones * ones))
    assert got == pytest.approx(sphere_area(2) * 1.0, rel=1e-10)
    # general N: integral r_max^{N-2}/(N-2)
    for n in (4, 6):
        ball_n = euclidean_ball(n, 1.5)
        forms_n = assemble_forms(build_grid(1.5, 64, 2.0, "reflected"), ball_n, 2.0)
        ones_n = np.ones(forms_n.n_nodes)
        want = sphere_area(n - 1) * 1.5 ** (n - 2) / (n - 2)
        assert float(np.dot(forms_n.w2, ones_n**2)) == pytest.approx(want, rel=1e-10)


def test_stiffness_annihilates_constants():
    s3 = unit_sphere(3)
    forms = assemble_forms(build_grid(math.pi, 32, 2.0, "reflected"), s3, 2.0)
    ones = np.ones(forms.n_nodes)
    assert abs(tri_quadform(forms.kd, forms.ke, ones)) < 1e-12 * np.max(forms.kd)


def test_mass_total_is_volume():
    s3 = unit_sphere(3)
    forms = assemble_forms(build_grid(math.pi, 128, 2.0, "reflected"), s3, 2.0)
    ones = np.ones(forms.n_nodes)
    vol = float(tri_quadform(forms.md, forms.me, ones))
    assert vol == pytest.approx(2 * math.pi**2, rel=1e-8)


def test_form_symmetry_and_positivity():
    # symmetry is structural (one stored off-diagonal); check positivity
    ball = euclidean_ball(4, 1.0)
    forms = assemble_forms(build_grid(1.0, 64, 2.0, "dirichlet"), ball, 1.0)
    assert np.all(forms.w2 > 0)
    assert np.all(forms.md > 0)
    rng = np.random.default_rng(0)
    for _ in range(8):
        u = rng.standard_normal(forms.n_nodes)
        assert tri_quadform(forms.kd, forms.ke, u) >= -1e-10 * np.max(forms.kd)
        assert tri_quadform(forms.md, forms.me, u) > 0


def test_quotient_constant_profile_is_zero_at_lambda0():
    s4 = unit_sphere(4)
    forms = assemble_forms(build_grid(math.pi, 64, 2.0, "reflected"), s4, 1.0)
    ones = np.ones(forms.n_nodes)
    assert abs(evaluate_quotient(forms, ones, 0.0)) < 1e-10


def test_quotient_scale_invariance():
    s4 = unit_sphere(4)
    forms = assemble_forms(build_grid(math.pi, 64, 2.0, "reflected"), s4, 1.0)
    u = bubble_init(forms, 4.0)
    base = evaluate_quotient(forms, u, -1.0)
    for c in (1e-3, 1e3):
        assert evaluate_quotient(forms, c * u, -1.0) == pytest.approx(base, rel=1e-12)


def test_quotient_zero_profile_rejected():
    ball = euclidean_ball(3, 1.0)
    forms = assemble_forms(build_grid(1.0, 32, 2.0, "dirichlet"), ball, 2.0)
    with pytest.raises(DomainError):
        evaluate_quotient(forms, np.zeros(forms.n_nodes), 0.0)


def test_dirichlet_profile_contract():
    ball = euclidean_ball(3, 1.0)
    forms = assemble_forms(build_grid(1.0, 32, 2.0, "dirichlet"), ball, 2.0)
    bad = np.ones(forms.n_nodes)
    with pytest.raises(DomainError):
        evaluate_quotient(forms, bad, 0.0)


def test_assemble_validation():
    ball = euclidean_ball(3, 1.0)
    grid = build_grid(1.0, 32, 2.0, "dirichlet")
    with pytest.raises(DomainError):
        assemble_forms(grid, ball, 0.0)
    with pytest.raises(DomainError):
        assemble_forms(grid, ball, 2.5)
    with pytest.raises(DomainError):
        assemble_forms(build_grid(2.0, 32, 2.0, "dirichlet"), ball, 1.0)


def test_hs_gradient_is_first_variation():
    ball = euclidean_ball(3, 1.0)
    forms = assemble_forms(build_grid(1.0, 48, 2.0, "dirichlet"), ball, 1.0)
    rng = np.random.default_rng(1)
    u = np.abs(rng.standard_normal(forms.n_nodes)) + 0.2
    u[-1] = 0.0
    val, grad = hs_gradient(forms, u)
    assert val == pytest.approx(hs_functional(forms, u), rel=1e-14)
    h = 1e-5
    for idx in (0, 5, 20):
        e = np.zeros_like(u)
        e[idx] = 1.0
        fd = (hs_functional(forms, u + h * e) - hs_functional(forms, u - h * e)) / (2 * h)
        assert grad[idx] == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_quotient_of_eigenvector_reproduces_mu():
    s3 = unit_sphere(3)
    forms = assemble_forms(build_grid(math.pi, 256, 2.0, "reflected"), s3, 2.0)
    res = smallest_generalized_eigen(forms, -1.0)
    assert evaluate_quotient(forms, res.profile, -1.0, sigma=2.0) == pytest.approx(
        res.mu, abs=1e-10
    )


def test_interpolated_bubble_near_sharp_constant():
    # discrete quotient of the near-extremal profile stays within 5% of the
    # sharp constant from above
    ball = euclidean_ball(3, 1.0)
    forms = assemble_forms(build_grid(1.0, 2048, 2.0, "dirichlet"), ball, 1.0)
    s31 = hardy_sobolev_constant(3, 1.0)
    q = evaluate_quotient(forms, bubble_init(forms, 512.0), 0.0)
    assert q >= s31 * (1 - 0.05)
    assert q <= s31 * 1.25


def test_nested_grid_monotonicity_sigma2():
    ball = euclidean_ball(3, 1.0)
    mus = []
    for M in (128, 256, 512):
        forms = assemble_forms(build_grid(1.0, M, 2.0, "dirichlet"), ball, 2.0)
        mus.append(smallest_generalized_eigen(forms, 0.0).mu)
    assert mus[0] >= mus[1] >= mus[2]
