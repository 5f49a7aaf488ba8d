import pytest

from drinfeld_periods.anderson import TateSeries
from drinfeld_periods.errors import ValidationError
from drinfeld_periods.motives import (
    ExtClass,
    MotiveMatrix,
    baer_sum,
    cm_endo_matrix,
    diff_residual,
    ext_matrices,
    ext_psi_row,
    g_at_theta,
    n_matrix,
    perturb,
    phi_rho,
    psi_rho,
    psi_theta_check,
    pushout,
    third_kind_matrices,
)
from drinfeld_periods.periods import log_algebraic

D, I = 40, 3


@pytest.fixture(scope="module")
def psi(lattice):
    return psi_rho(lattice, D, I)


@pytest.fixture(scope="module")
def ext_pairs(ctx, rho, theta):
    alphas = [ctx.one(), theta, theta + ctx.one()]
    return [(a, log_algebraic(rho, a)) for a in alphas]


def test_phi_rho_shape(ctx, rho, theta):
    Phi = phi_rho(rho)
    assert Phi[0, 0].is_exact_zero() and Phi[1, 1].is_exact_zero()
    det = Phi.det2()
    # det = -(t - theta), vanishing at t = theta
    assert det.coeffs == (-TateSeries.t_minus(ctx, theta)).coeffs
    assert det.eval(theta).is_exact_zero()


def test_psi_rho_difference_equation(ctx, rho, psi):
    assert diff_residual(phi_rho(rho), psi) >= ctx.threshold


def test_psi_at_theta(ctx, lattice):
    r = psi_theta_check(lattice, I)
    assert r["specialization"] >= ctx.threshold
    assert r["det"] >= ctx.threshold


def test_identity_has_exact_zero_residual(ctx):
    one = TateSeries.const(ctx, ctx.one())
    z = TateSeries.zero(ctx)
    Id = MotiveMatrix([[one, z], [z, one]], "phi")
    assert diff_residual(Id, MotiveMatrix(Id.rows, "psi")) == float("inf")


def test_fault_injection(ctx, rho, psi):
    Phi = phi_rho(rho)
    bad = diff_residual(Phi, perturb(psi, 1, 0, 0, 1))
    assert bad == 1
    assert diff_residual(Phi, perturb(psi, 0, 1, 3, 1)) < ctx.threshold


@pytest.mark.parametrize("k", [0, 1, 2])
def test_third_kind_matrices(ctx, lattice, theta, k):
    alpha = [ctx.one(), theta, theta + ctx.one()][k]
    Phi, Psi = third_kind_matrices(lattice, alpha, D, I)
    assert diff_residual(Phi, Psi) >= ctx.threshold


def test_third_kind_zero_alpha(ctx, lattice):
    Phi, Psi = third_kind_matrices(lattice, ctx.zero(), D, I)
    assert Psi[2, 0].is_exact_zero() and Psi[2, 1].is_exact_zero()
    assert diff_residual(Phi, Psi) >= ctx.threshold


def test_ext_matrices_and_g(ctx, rho, lattice, ext_pairs):
    for a, u in ext_pairs:
        Phi, Psi = ext_matrices(lattice, a, u, D, I)
        assert diff_residual(Phi, Psi) >= ctx.threshold
        g = g_at_theta(rho, u)
        assert (g[0] - (u - a)).residual_valuation() >= ctx.threshold
        assert (g[1] + rho.ftau_eval(u)).residual_valuation() >= ctx.threshold


def test_ext_zero(ctx, lattice):
    Phi, Psi = ext_matrices(lattice, ctx.zero(), ctx.zero(), D, I)
    assert Phi[2, 0].is_exact_zero() and Psi[2, 0].is_exact_zero()


def test_n_matrix(ctx, lattice, ext_pairs):
    Phi, Psi = n_matrix(lattice, ext_pairs[:2], D, I)
    assert Phi.size == 5
    assert diff_residual(Phi, Psi) >= ctx.threshold
    pattern = Psi.zero_pattern()
    assert all(pattern[i][j] for i in range(2) for j in range(2, 5))
    one = n_matrix(lattice, ext_pairs[:1], D, I)
    two = ext_matrices(lattice, *ext_pairs[0], D, I)
    assert diff_residual(*one) == diff_residual(*two)


def _ext(ctx, lattice, a, u):
    return ExtClass([TateSeries.const(ctx, a), TateSeries.zero(ctx)], ext_psi_row(lattice, u, D, I))


def test_baer_sum_and_pushout(ctx, lattice, ext_pairs):
    x, y = (_ext(ctx, lattice, a, u) for a, u in ext_pairs[:2])
    s = baer_sum(x, y)
    assert diff_residual(*s.matrices(lattice, D, I)) >= ctx.threshold
    zero = ExtClass([TateSeries.zero(ctx), TateSeries.zero(ctx)])
    assert all((a - b).is_exact_zero() for a, b in zip(baer_sum(x, zero).v, x.v))
    neg = ExtClass([-e for e in x.v])
    assert all(all(c.is_exact_zero() for c in e.coeffs) for e in baer_sum(x, neg).v)
    one = TateSeries.const(ctx, ctx.one())
    z = TateSeries.zero(ctx)
    p = pushout([[one, z], [z, one]], x)
    assert all((a - b).coeffs == [] or all(c.is_exact_zero() for c in (a - b).coeffs) for a, b in zip(p.v, x.v))


def test_cm_endomorphism(ctx, lattice, ext_pairs):
    F = ctx.field
    g9 = F.gen() ** 10
    r = cm_endo_matrix(lattice, g9, D, I)
    assert r["commutes_exactly"]
    assert r["eta_twist_residual"] >= ctx.threshold
    assert r["F"][1, 0].is_exact_zero()
    assert r["F"][0, 0].eval(ctx.theta()) == ctx.mono(g9)
    x = _ext(ctx, lattice, *ext_pairs[0])
    y = pushout(r["F"].rows, x, r["eta"].rows)
    assert diff_residual(*y.matrices(lattice, D, I)) >= ctx.threshold


def test_cm_scalar_case(ctx, lattice):
    r = cm_endo_matrix(lattice, ctx.field(2), D, I)
    eta = r["eta"]
    two = ctx.mono(2)
    assert (eta[0, 0].coeff(0) - two).residual_valuation() >= ctx.threshold
    assert eta[0, 1].residual_valuation(D - 1) >= ctx.threshold


def test_cm_rejects_outside_fq2(lattice):
    with pytest.raises(ValidationError):
        cm_endo_matrix(lattice, lattice.module.ctx.field.gen(), D, I)


def test_cm_multiplicative(ctx, lattice):
    F = ctx.field
    a, b = F.gen() ** 10, F.gen() ** 20
    A = cm_endo_matrix(lattice, a, 4, I)["F"]
    B = cm_endo_matrix(lattice, b, 4, I)["F"]
    AB = cm_endo_matrix(lattice, a * b, 4, I)["F"]
    prod = A @ B
    assert all((prod[i, j] - AB[i, j]).is_exact_zero() or all(c.is_exact_zero() for c in (prod[i, j] - AB[i, j]).coeffs)
               for i in range(2) for j in range(2))
