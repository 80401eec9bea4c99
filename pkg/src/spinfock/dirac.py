"""Relativistic layer: Dirac-to-Schrodinger reduction, energies, lower spinor."""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .models import ModelId, dot, vector_p, vector_sigma, vector_x
from .numoracle import spinor_gradient, _SIGMA
from .opalg import I, OperatorExpr
from .susy import analytic_state, assemble_3d
from .symcheck import CheckReport, IdentityId

__all__ = [
    "DiracSolution",
    "verify_reduction",
    "rescale",
    "check_N",
    "rel_energy",
    "energy_consistency",
    "nonrel_limit_gap",
    "reconstruct_xi",
]

_X = OperatorExpr


def rescale(op, factor_exponents):
    """Substitute x -> x / lam, p -> lam p with lam = 2^e2 * alpha^ea * E^eE.

    ``factor_exponents`` is ``(e2, ea, eE)``.  The map preserves [x, p] and
    r^2 = x.x, so it is an algebra automorphism; each term picks up
    lam^(deg_p - deg_x).
    """
    e2, ea, eE = factor_exponents
    out = {}
    for key, c in op.terms.items():
        deg = sum(key[9:]) - (key[0] + key[1] + key[2] + key[3])
        new = list(key)
        new[5] += ea * deg
        new[7] += eE * deg
        out[tuple(new)] = c * Fraction(2) ** (e2 * deg)
    return OperatorExpr(out)


def _reduction_residuals(pauli_sign):
    m, alpha, E = _X.param("m"), _X.param("alpha"), _X.param("E")
    e_inv = _X.param("E", -1)
    sp = dot(vector_sigma(), vector_p())
    sx = dot(vector_sigma(), vector_x())
    p2 = dot(vector_p(), vector_p())
    r_inv2 = _X.r(-2)
    # xi = E^-1 (m - i sigma.p) psi from the first equation, inserted in the second
    sys2 = E - alpha * sx * r_inv2 * (2 * pauli_sign)
    reduced = sys2 - (m + sp * I) * e_inv * (m - sp * I)
    bracket = p2 + alpha * E * sx * r_inv2 * 2 - (E * E - m * m)
    first = reduced + e_inv * bracket
    # r = 2 alpha E x turns the bracket into (2 alpha E)^2 (-Laplacian + sigma.r/r^2 - epsilon)
    lam2 = _X.param("alpha", 2) * _X.param("E", 2) * 4
    eps = (E * E - m * m) * _X.param("alpha", -2) * _X.param("E", -2) * Fraction(1, 4)
    second = rescale(bracket, (1, 1, 1)) - lam2 * (p2 + sx * r_inv2 - eps)
    return first, second


def verify_reduction(pauli_sign=1):
    """Exact check that the two-component Dirac system reduces to the rescaled
    dipole eigenproblem with epsilon = (E^2 - m^2)/(4 alpha^2 E^2).

    ``pauli_sign=-1`` flips the sign of the Pauli term (mutation test).
    """
    first, second = _reduction_residuals(pauli_sign)
    terms = len(first) + len(second)
    passed = terms == 0
    witness = None
    if not passed:
        witness = f"reduction: {first}; rescaling: {second}"
    return CheckReport(
        identity=IdentityId.DIRAC_REDUCE,
        model=ModelId.DIPOLE,
        params={"pauli_sign": pauli_sign},
        passed=passed,
        residual_terms=terms,
        witness=witness,
        suite="dirac",
    )


def check_N(N):
    """N = n + j + 1 with n >= 0 and half-integer j >= 1/2, i.e. a half-integer >= 3/2."""
    N = Fraction(N)
    if N.denominator != 2 or N < Fraction(3, 2):
        raise ValueError(f"N={N} is not of the form n + j + 1 with half-integer j")
    return N


def rel_energy(m, alpha, N, negative=False):
    """E = m / sqrt(1 + alpha^2/N^2); ``negative=True`` gives the other root."""
    N = check_N(N)
    if not m > 0:
        raise ValueError("m must be positive")
    e = float(m) / math.sqrt(1.0 + float(alpha) ** 2 / float(N) ** 2)
    return -e if negative else e


def energy_consistency(m, alpha, N):
    """epsilon(E) = (E^2 - m^2)/(4 alpha^2 E^2) at E^2 from the level formula, exactly."""
    N = check_N(N)
    m, alpha = Fraction(m), Fraction(alpha)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    e2 = m * m / (1 + alpha * alpha / (N * N))
    return (e2 - m * m) / (4 * alpha * alpha * e2)


def nonrel_limit_gap(m, alpha, N):
    """|E_rel - (m - m alpha^2 / (2 N^2))|, which is O(alpha^4)."""
    N = check_N(N)
    nonrel = float(m) - float(m) * float(alpha) ** 2 / (2 * float(N) ** 2)
    return abs(rel_energy(m, alpha, N) - nonrel)


@dataclass
class DiracSolution:
    E: float
    psi: Callable  # physical-coordinate upper spinor
    xi: np.ndarray  # lower spinor at the sample points
    points: np.ndarray
    j: Fraction
    n: int
    kappa: Fraction
    m: float
    alpha: float

    def xi_to_psi_ratio(self):
        return float(np.max(np.linalg.norm(self.xi, axis=1)
                            / np.linalg.norm(self.psi(self.points), axis=1)))


def _sigma_dot_grad(f, points, h):
    grad = spinor_gradient(f, points, h)
    return np.einsum("aij,apj->pi", _SIGMA, grad)


def reconstruct_xi(m, alpha, j, n, kappa, points, h, E=None):
    """Lower spinor from the first Dirac equation and the pointwise residual of the second.

    ``points`` are physical coordinates; the upper spinor is the rescaled
    dipole state evaluated at r = 2 alpha E x.  Returns ``(solution, residual)``
    with residual = max |(E - 2 alpha sigma.x/x^2) psi - (m + i sigma.p) xi| / (|E| |psi|).
    Since i sigma.p = sigma.grad, both equations only need central differences.
    """
    j, kappa = Fraction(j), Fraction(kappa)
    N = check_N(j + n + 1)
    if E is None:
        E = rel_energy(m, alpha, N)
    if E == 0:
        raise ValueError("E must be nonzero")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) < 1:
        raise ValueError("need at least one sample point")
    lam = 2 * float(alpha) * E
    if np.any(np.linalg.norm(points, axis=1) * abs(lam) < 0.5):
        raise ValueError("sample point too close to the origin in rescaled units")
    psi_resc = assemble_3d(analytic_state(ModelId.DIPOLE, j, n, kappa))

    def psi(x):
        return psi_resc(lam * np.atleast_2d(x))

    def xi(x):
        return (m * psi(x) - _sigma_dot_grad(psi, x, h)) / E

    vals = psi(points)
    r2 = np.sum(points ** 2, axis=1)
    sx = np.einsum("aij,pa->pij", _SIGMA, points)
    lhs = E * vals - 2 * alpha * np.einsum("pij,pj->pi", sx, vals) / r2[:, None]
    rhs = m * xi(points) + _sigma_dot_grad(xi, points, h)
    res = np.linalg.norm(lhs - rhs, axis=1) / (abs(E) * np.linalg.norm(vals, axis=1))
    sol = DiracSolution(E=E, psi=psi, xi=xi(points), points=points, j=j, n=n, kappa=kappa,
                        m=float(m), alpha=float(alpha))
    return sol, float(np.max(res))
