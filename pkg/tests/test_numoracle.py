import io
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from spinfock import numoracle, susy
from spinfock.models import ModelId, radial_reduce
from spinfock.numoracle import (
    CI_GRID, ConvergenceError, GridFunction, InsufficientStatesError, OracleError, RadialGrid,
    discretize, eigensolve, rayleigh_quotient, residual_3d, sample_points,
)
from spinfock.opalg import RadialOp as R

HALF = Fraction(1, 2)
SMALL = RadialGrid(1e-3, 60.0, 800)


def test_grid_geometry():
    g = RadialGrid(0.0 + 1.0, 3.0, 19)
    assert g.h == pytest.approx(0.1)
    assert g.nodes[0] == pytest.approx(1.1) and g.nodes[-1] == pytest.approx(2.9)
    fine = g.refined()
    np.testing.assert_allclose(fine.nodes[1::2], g.nodes)


@pytest.mark.parametrize("args", [(0.0, 1.0, 100), (2.0, 1.0, 100), (0.1, 1.0, 3)])
def test_invalid_grids(args):
    with pytest.raises(OracleError):
        RadialGrid(*args)


def test_box_spectrum_matches_discrete_formula():
    g = RadialGrid(1.0, 1.0 + math.pi, 200)
    A = discretize(-R.dr(2), g)
    pairs = eigensolve(A, 6, (0.0, 20.0))
    L = g.r_max - g.r_min
    for i, (lam, _) in enumerate(pairs):
        n = i // 2 + 1  # both spinor components decouple
        exact = 4 / g.h ** 2 * math.sin(n * math.pi * g.h / (2 * L)) ** 2
        assert lam == pytest.approx(exact, rel=1e-10)


def test_dense_and_banded_agree():
    A = discretize(radial_reduce("dipole", HALF), RadialGrid(1e-3, 10.0, 40))
    dense = A.to_dense()
    assert np.allclose(dense, dense.T)
    v = np.random.default_rng(0).standard_normal(A.size)
    np.testing.assert_allclose(A.matvec(v), dense @ v, rtol=1e-12, atol=1e-9)


@pytest.mark.parametrize("op", [R.dr(1), R.r() * R.dr(2), R.sigma(2) * R.r(-1), R.dr(2) * R.scalar(1j)])
def test_discretize_rejects_non_symmetric_terms(op):
    with pytest.raises(OracleError):
        discretize(op, SMALL)


def test_dipole_levels_on_ci_grid():
    A = discretize(radial_reduce("dipole", HALF), CI_GRID)
    pairs = eigensolve(A, 2, (-1.0, -1e-6))
    for n, (lam, gf) in enumerate(pairs):
        assert lam == pytest.approx(float(-1 / (4 * (HALF + n + 1) ** 2)), rel=5e-3)
        assert gf.norm() == pytest.approx(1.0)
        assert rayleigh_quotient(A, gf) == pytest.approx(lam, rel=1e-9)


def test_eigenvectors_are_orthonormal_and_deterministic():
    A = discretize(radial_reduce("spin-orbit", HALF), SMALL)
    first = eigensolve(A, 4, (-1.0, -1e-6))
    second = eigensolve(A, 4, (-1.0, -1e-6))
    gram = np.array([[a.inner(b) for _, b in first] for _, a in first])
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-8)
    for (l1, g1), (l2, g2) in zip(first, second):
        assert l1 == l2 and np.array_equal(g1.values, g2.values)


def test_empty_window():
    A = discretize(radial_reduce("dipole", HALF), SMALL)
    with pytest.raises(InsufficientStatesError):
        eigensolve(A, 1, (-5.0, -1.0))


def test_non_convergence_is_reported():
    A = discretize(radial_reduce("dipole", HALF), SMALL)
    with pytest.raises(ConvergenceError):
        eigensolve(A, 1, (-1.0, -1e-6), residual_tol=0.0, max_iter=2)


def test_csv_layout():
    g = RadialGrid(1e-3, 1.0, 16)
    gf = GridFunction(g, np.ones((16, 2), dtype=complex), {"j": HALF})
    buf = io.StringIO()
    text = gf.to_csv(buf, metadata={"model": "DIPOLE"})
    lines = text.splitlines()
    meta = json.loads(lines[0][2:])
    assert meta["j"] == "1/2" and meta["M"] == 16
    assert lines[1] == "r,re_up,im_up,re_down,im_down"
    assert len(lines) == 18
    assert all(len(x.split(",")) == 5 for x in lines[2:])
    assert buf.getvalue() == text


def test_sample_points_reproducible():
    a, b = sample_points(20, 7), sample_points(20, 7)
    assert np.array_equal(a, b)
    r = np.linalg.norm(a, axis=1)
    assert np.all((r >= 0.5) & (r <= 6.0))
    assert not np.array_equal(a, sample_points(20, 8))


def test_residual_sensitivity_to_epsilon():
    psi = susy.assemble_3d(susy.ground_state("dipole", HALF))
    pts = sample_points(20, 0)
    eps = -1 / 9
    base = residual_3d("dipole", psi, eps, pts, 1e-3)
    shifted = residual_3d("dipole", psi, eps + 0.01, pts, 1e-3)
    assert base <= 1e-4
    assert shifted == pytest.approx(0.01 / (1 / 9), rel=0.2)


def test_spin_orbit_residual():
    psi = susy.assemble_3d(susy.laguerre_state(HALF, 0))
    res = residual_3d("spin-orbit", psi, -1 / 9, sample_points(20, 0), 1e-3)
    assert res <= 1e-4


def test_residual_rejects_points_near_origin():
    psi = susy.assemble_3d(susy.ground_state("dipole", HALF))
    with pytest.raises(OracleError):
        residual_3d("dipole", psi, -1 / 9, np.array([[0.1, 0.0, 0.0]]), 1e-3)
