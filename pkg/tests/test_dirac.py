import math
from fractions import Fraction

import numpy as np
import pytest

from spinfock import dirac
from spinfock.models import vector_p, vector_sigma, dot
from spinfock.numoracle import sample_points
from spinfock.opalg import I, OperatorExpr as X

HALF = Fraction(1, 2)


def test_reduction_is_exact():
    rep = dirac.verify_reduction()
    assert rep.passed and rep.residual_terms == 0 and rep.suite == "dirac"


def test_flipped_pauli_term_is_detected():
    rep = dirac.verify_reduction(pauli_sign=-1)
    assert not rep.passed and rep.witness


def test_sigma_p_squares_to_p_squared():
    sp = dot(vector_sigma(), vector_p())
    p2 = dot(vector_p(), vector_p())
    assert (sp * I) * (sp * -I) == p2


def test_rescale_is_an_automorphism():
    x1, p1 = X.x(1), X.p(1)
    lhs = dirac.rescale(x1 * p1, (1, 1, 1))
    assert lhs == dirac.rescale(x1, (1, 1, 1)) * dirac.rescale(p1, (1, 1, 1))
    assert lhs == x1 * p1


@pytest.mark.parametrize("m,alpha,N,expected", [
    (1, 1, Fraction(3, 2), 3 / math.sqrt(13)),
    (2, 1, Fraction(5, 2), 10 / math.sqrt(29)),
    (1, 0, Fraction(7, 2), 1.0),
])
def test_relativistic_energy(m, alpha, N, expected):
    assert dirac.rel_energy(m, alpha, N) == pytest.approx(expected, rel=1e-14)


def test_energy_monotone_and_bounded():
    es = [dirac.rel_energy(1, 0.5, Fraction(2 * k + 3, 2)) for k in range(30)]
    assert all(a < b < 1 for a, b in zip(es, es[1:]))
    assert 1 - es[-1] < 1e-3
    assert dirac.rel_energy(1, 0.5, Fraction(3, 2), negative=True) == -es[0]


@pytest.mark.parametrize("N", [Fraction(3, 2), Fraction(5, 2), Fraction(9, 2)])
def test_energy_consistency_exact(N):
    for m, alpha in ((1, 1), (Fraction(3, 2), Fraction(1, 7))):
        assert dirac.energy_consistency(m, alpha, N) == -1 / (4 * N * N)


def test_bad_level_label():
    with pytest.raises(ValueError):
        dirac.rel_energy(1, 1, 2)
    with pytest.raises(ValueError):
        dirac.rel_energy(1, 1, HALF)


def test_nonrel_gap():
    assert dirac.nonrel_limit_gap(1, 0.01, Fraction(3, 2)) <= 1e-8
    assert dirac.nonrel_limit_gap(1, 0, Fraction(5, 2)) == 0
    for a in (0.1, 0.05):
        ratio = dirac.nonrel_limit_gap(1, a, Fraction(3, 2)) / dirac.nonrel_limit_gap(1, a / 2, Fraction(3, 2))
        assert 14 <= ratio <= 18


def _physical_points(alpha=1.0, m=1.0, j=HALF, n=0, seed=0):
    lam = 2 * alpha * dirac.rel_energy(m, alpha, j + n + 1)
    return sample_points(20, seed) / lam


def test_second_equation_residual_and_convergence():
    pts = _physical_points()
    _, r1 = dirac.reconstruct_xi(1.0, 1.0, HALF, 0, HALF, pts, 1e-3)
    _, r2 = dirac.reconstruct_xi(1.0, 1.0, HALF, 0, HALF, pts, 5e-4)
    assert r1 <= 1e-4
    assert 3.5 <= r1 / r2 <= 4.5


def test_wrong_energy_is_detected():
    pts = _physical_points()
    E = dirac.rel_energy(1, 1, Fraction(3, 2))
    _, res = dirac.reconstruct_xi(1.0, 1.0, HALF, 0, HALF, pts, 1e-3, E=1.01 * E)
    assert res >= 1e-3


def test_excited_and_other_kappa():
    pts = _physical_points(n=1)
    sol, res = dirac.reconstruct_xi(1.0, 1.0, HALF, 1, -HALF, pts, 1e-3)
    assert res <= 1e-4
    assert sol.xi.shape == (20, 2)
    assert np.isfinite(sol.xi_to_psi_ratio())


def test_points_too_close_to_origin():
    with pytest.raises(ValueError):
        dirac.reconstruct_xi(1.0, 1.0, HALF, 0, HALF, np.array([[1e-3, 0, 0]]), 1e-3)
