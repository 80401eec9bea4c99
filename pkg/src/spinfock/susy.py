"""Closed-form spectra and eigenfunctions from the SUSY ladder (rescaled units).

Radial states are two-component functions u(r) = (u_up, u_down) solving
``(-dr^2 + V_j) u = epsilon u``.  The upper component belongs to the spinor
channel l = j - 1/2 and the lower one to l = j + 1/2; this is the order in
which the matrix potential has centrifugal weights l(l+1).
"""
import enum
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .models import ModelId, build_ladder, build_superpotential, check_quantum_number, parse_model
from .numoracle import GridFunction, OracleError, RadialGrid
from .opalg import RadialOp
from .specfun import bessel_k, laguerre, spherical_spinor

__all__ = [
    "SpectrumEntry",
    "StateTag",
    "AnalyticState",
    "BesselLaurent",
    "UnderResolvedGridError",
    "spectrum",
    "degenerate_pairs",
    "ground_state",
    "ladder_state",
    "excited_state",
    "laguerre_state",
    "analytic_state",
    "assemble_3d",
    "count_nodes",
    "fd_derivative",
]

_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class SpectrumEntry:
    model: ModelId
    j: Fraction
    n: int
    epsilon: Fraction
    N: Fraction
    energy_coefficient: Fraction  # E = energy_coefficient * m * coupling^2
    kappa_degeneracy: int
    partners: tuple = ()

    @property
    def coupling(self):
        return "q" if self.model is ModelId.HA else "alpha"

    @property
    def E_phys(self):
        """Physical energy as a formula string in m and the coupling."""
        return f"{self.energy_coefficient}*m*{self.coupling}^2"

    def energy(self, m=1, coupling=1):
        """E = -m coupling^2 / (2 N^2), exact for rational inputs."""
        return self.energy_coefficient * m * coupling ** 2


def _n_of(model, j):
    return check_quantum_number(model, j)


def degenerate_pairs(N, model=ModelId.DIPOLE):
    """All (n, j) with n + j + 1 = N.

    For the spin models j runs over half-integers and there are N - 1/2
    pairs; for HA, l runs over integers and there are N of them.
    """
    model = parse_model(model)
    N = Fraction(N)
    if model is ModelId.HA:
        if N.denominator != 1 or N < 1:
            raise ValueError(f"N={N} is not reachable as n + l + 1")
        return [(int(N - 1 - l), Fraction(l)) for l in range(int(N))]
    if N.denominator != 2 or N < Fraction(3, 2):
        raise ValueError(f"N={N} is not reachable as n + j + 1 with half-integer j")
    out = []
    j = _HALF
    while j + 1 <= N:
        out.append((int(N - j - 1), j))
        j += 1
    return sorted(out)


def spectrum(model, j, n_max):
    """Closed-form levels epsilon_n = -1/(4 (j + n + 1)^2) for n = 0..n_max."""
    model = parse_model(model)
    j = check_quantum_number(model, j)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    out = []
    for n in range(n_max + 1):
        N = j + n + 1
        out.append(SpectrumEntry(
            model=model,
            j=j,
            n=n,
            epsilon=-1 / (4 * N ** 2),
            N=N,
            energy_coefficient=-1 / (2 * N ** 2),
            kappa_degeneracy=int(2 * j + 1),
            partners=tuple(degenerate_pairs(N, model)),
        ))
    return out


class StateTag(enum.Enum):
    BESSEL_GROUND = "BESSEL_GROUND"
    LADDER = "LADDER"
    LAGUERRE = "LAGUERRE"


class BesselLaurent:
    """Two-component function sum c * r^k * K_nu(b r), nu in {0, 1}, exact coefficients.

    The space is closed under d/dr and under multiplication by Laurent
    polynomials in r, so ladder operators act on it exactly.
    """

    def __init__(self, b, comps):
        self.b = Fraction(b)
        self.comps = [{key: Fraction(c) for key, c in comp.items() if c} for comp in comps]

    def derivative(self):
        b = self.b
        out = []
        for comp in self.comps:
            acc = defaultdict(Fraction)
            for (k, nu), c in comp.items():
                if nu == 0:
                    # (r^k K0)' = k r^(k-1) K0 - b r^k K1
                    acc[k - 1, 0] += c * k
                    acc[k, 1] -= c * b
                else:
                    # (r^k K1)' = (k-1) r^(k-1) K1 - b r^k K0
                    acc[k - 1, 1] += c * (k - 1)
                    acc[k, 0] -= c * b
            out.append(acc)
        return BesselLaurent(b, out)

    def apply(self, op):
        """Apply a RadialOp of derivative order <= 1 with real coefficients."""
        if not isinstance(op, RadialOp):
            raise TypeError("apply expects a RadialOp")
        deriv = None
        acc = [defaultdict(Fraction), defaultdict(Fraction)]
        for (k, pa, pm, mu, d), c in op.terms.items():
            if pa or pm or c.im or mu == 2 or d > 1:
                raise ValueError("only real, parameter-free, first-order operators are supported")
            src = self
            if d == 1:
                deriv = deriv or self.derivative()
                src = deriv
            for target in (0, 1):
                if mu in (0, 3):
                    source, sign = target, (-1 if (mu == 3 and target == 1) else 1)
                else:
                    source, sign = 1 - target, 1
                for (kk, nu), cc in src.comps[source].items():
                    acc[target][kk + k, nu] += sign * c.re * cc
        return BesselLaurent(self.b, acc)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        z = float(self.b) * r
        kv = (bessel_k(0, z), bessel_k(1, z))
        out = np.zeros(r.shape + (2,))
        for i, comp in enumerate(self.comps):
            for (k, nu), c in comp.items():
                out[..., i] += float(c) * r ** k * kv[nu]
        return out


@dataclass
class AnalyticState:
    model: ModelId
    j: Fraction
    n: int
    kappa: Fraction
    evaluate: Callable  # r -> (len(r), 2)
    tag: StateTag
    constants: dict = field(default_factory=dict)
    derivative: Callable = None
    representation: BesselLaurent = None

    @property
    def epsilon(self):
        return -1 / (4 * (self.j + self.n + 1) ** 2)

    def on_grid(self, grid):
        vals = self.evaluate(grid.nodes).astype(complex)
        label = {"model": self.model.name, "j": self.j, "n": self.n, "kappa": self.kappa}
        return GridFunction(grid, vals, label)


def _check_kappa(j, kappa):
    kappa = Fraction(kappa)
    if abs(kappa) > j or (kappa - j).denominator != 1:
        raise ValueError(f"kappa must be in -j..j, got {kappa} for j={j}")
    return kappa


def _bessel_seed(j):
    """Phi^0_j = (r^(j+3/2) K1(r/(2(j+1))), r^(j+3/2) K0(r/(2(j+1)))) for j half-integer.

    j + 3/2 is an integer, so the exponent stays in the Laurent lattice.
    """
    s = int(j + Fraction(3, 2))
    return BesselLaurent(1 / (2 * (j + 1)), [{(s, 1): 1}, {(s, 0): 1}])


def ground_state(model, j, kappa=None):
    """Zero mode of a_j (normalisation constant left at 1)."""
    model = parse_model(model)
    j = check_quantum_number(model, j)
    kappa = _check_kappa(j, j if kappa is None else kappa) if model is not ModelId.HA else Fraction(0)
    if model is ModelId.DIPOLE:
        rep = _bessel_seed(j)
        return AnalyticState(model, j, 0, kappa, rep, StateTag.BESSEL_GROUND,
                             constants={"c_k": Fraction(1)},
                             derivative=rep.derivative(), representation=rep)
    return laguerre_state(j, 0, kappa, model=model)


def ladder_state(j, n, kappa=None):
    """a_j^+ a_{j+1}^+ ... a_{j+n-1}^+ Phi^0_{j+n} for DIPOLE, exact Bessel-Laurent form."""
    j = check_quantum_number(ModelId.DIPOLE, j)
    kappa = _check_kappa(j, j if kappa is None else kappa)
    rep = _bessel_seed(j + n)
    for step in reversed(range(n)):
        _, a_plus, _ = build_ladder(ModelId.DIPOLE, j + step)
        rep = rep.apply(a_plus)
    tag = StateTag.BESSEL_GROUND if n == 0 else StateTag.LADDER
    return AnalyticState(ModelId.DIPOLE, j, n, kappa, rep, tag, constants={"c_k": Fraction(1)},
                         derivative=rep.derivative(), representation=rep)


class UnderResolvedGridError(OracleError):
    pass


def _fd_weights(offsets):
    """First-derivative weights on integer offsets (unit spacing)."""
    offsets = np.asarray(offsets, dtype=float)
    n = len(offsets)
    vander = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[1] = 1.0
    return np.linalg.solve(vander, rhs)


_CENTRAL6 = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0


def fd_derivative(values, h):
    """Sixth-order first derivative along axis 0 (one-sided 7-point stencils at the ends)."""
    v = np.asarray(values)
    n = v.shape[0]
    if n < 7:
        raise OracleError("need at least 7 nodes for the 6th-order stencil")
    out = np.zeros_like(v)
    for w, s in zip(_CENTRAL6, range(-3, 4)):
        if w:
            out[3:n - 3] += w * v[3 + s:n - 3 + s]
    for i in range(3):
        offs = np.arange(7) - i
        out[i] = np.tensordot(_fd_weights(offs), v[0:7], axes=(0, 0))
        offs_r = np.arange(-6, 1) + i
        out[n - 1 - i] = np.tensordot(_fd_weights(offs_r), v[n - 7:n], axes=(0, 0))
    return out / h


def _superpotential_matrix(j, r):
    """W_j(r) as an array of 2x2 real matrices."""
    w = build_superpotential(ModelId.DIPOLE, j)
    mats = np.zeros((len(r), 2, 2))
    for (k, pa, pm, mu, d), c in w.terms.items():
        coeff = float(c.re) * r ** k
        if mu == 0:
            mats[:, 0, 0] += coeff
            mats[:, 1, 1] += coeff
        elif mu == 1:
            mats[:, 0, 1] += coeff
            mats[:, 1, 0] += coeff
        elif mu == 3:
            mats[:, 0, 0] += coeff
            mats[:, 1, 1] -= coeff
    return mats


def annihilation_ratio(j, r):
    """||a_j Phi^0_j|| / ||Phi^0_j|| in floating point on the sample points ``r``.

    The derivative comes from the Bessel recurrences, not from differencing.
    """
    j = check_quantum_number(ModelId.DIPOLE, j)
    r = np.asarray(r, dtype=float)
    seed = _bessel_seed(j)
    vals = seed(r)
    out = seed.derivative()(r) + np.einsum("pij,pj->pi", _superpotential_matrix(j, r), vals)
    return float(np.linalg.norm(out) / np.linalg.norm(vals))


def _ladder_on_grid(j, n, grid):
    r = grid.nodes
    seed = _bessel_seed(j + n)
    vals = seed(r)
    deriv = seed.derivative()(r)
    for step in reversed(range(n)):
        if deriv is None:
            deriv = fd_derivative(vals, grid.h)
        w = _superpotential_matrix(j + step, r)
        vals = -deriv + np.einsum("pij,pj->pi", w, vals)
        deriv = None
    return vals


def excited_state(model, j, n, kappa=None, grid=None, halving_tol=1e-6):
    """n-th excited radial state on ``grid``.

    DIPOLE: the ladder a_j^+ ... a_{j+n-1}^+ applied numerically to the Bessel
    seed of sector j+n.  The first derivative of the seed is exact (Bessel
    recurrences); later derivatives use sixth-order central differences.  The
    result is recomputed on a grid with half the spacing and compared on the
    shared nodes; disagreement above ``halving_tol`` (relative to the maximum)
    raises ``UnderResolvedGridError``.

    SPIN_ORBIT and HA come from the Laguerre closed form.
    """
    model = parse_model(model)
    j = check_quantum_number(model, j)
    if grid is None:
        raise ValueError("a RadialGrid is required")
    if model is not ModelId.DIPOLE:
        return laguerre_state(j, n, kappa, model=model).on_grid(grid)
    kappa = _check_kappa(j, j if kappa is None else kappa)
    if n == 0:
        return ground_state(model, j, kappa).on_grid(grid)
    vals = _ladder_on_grid(j, n, grid)
    fine = _ladder_on_grid(j, n, grid.refined())[1::2]
    scale = np.max(np.abs(vals))
    disagreement = np.max(np.abs(fine - vals)) / scale
    if disagreement > halving_tol:
        raise UnderResolvedGridError(
            f"step-halving disagreement {disagreement:.2e} exceeds {halving_tol:.0e}"
        )
    label = {"model": model.name, "j": j, "n": n, "kappa": kappa}
    return GridFunction(grid, vals.astype(complex), label)


def laguerre_state(j, n, kappa=None, constants=None, model=ModelId.SPIN_ORBIT):
    """psi = y^(j+1) exp(-y/2) L_n^(2j+1)(y), y = r/(n+j+1), in both spinor channels.

    ``constants`` maps the channel index (0: l = j-1/2, 1: l = j+1/2) to
    c_(lambda kappa); default equal weights with sum |c|^2 = 1.  For HA, ``j``
    is the orbital number l and only the upper component is populated.
    """
    model = parse_model(model)
    j = check_quantum_number(model, j)
    if model is ModelId.HA:
        constants = {0: 1.0, 1: 0.0} if constants is None else constants
        kappa = Fraction(0) if kappa is None else Fraction(kappa)
    else:
        kappa = _check_kappa(j, j if kappa is None else kappa)
        if constants is None:
            constants = {0: 1 / math.sqrt(2), 1: 1 / math.sqrt(2)}
    norm = sum(abs(c) ** 2 for c in constants.values())
    if abs(norm - 1) > 1e-12:
        raise ValueError("channel constants must satisfy sum |c|^2 = 1")
    N = j + n + 1
    alpha = 2 * j + 1
    power = float(j + 1)
    c0, c1 = constants.get(0, 0.0), constants.get(1, 0.0)

    def radial(r):
        y = np.asarray(r, dtype=float) / float(N)
        return y ** power * np.exp(-0.5 * y) * laguerre(n, alpha, y)

    def evaluate(r):
        u = radial(r)
        return np.stack([c0 * u, c1 * u], axis=-1)

    return AnalyticState(model, j, n, kappa, evaluate, StateTag.LAGUERRE,
                         constants=dict(constants))


def analytic_state(model, j, n, kappa=None):
    """Pointwise closed-form state: Bessel ladder for DIPOLE, Laguerre otherwise."""
    model = parse_model(model)
    if model is ModelId.DIPOLE:
        return ladder_state(j, n, kappa)
    return laguerre_state(j, n, kappa, model=model)


def assemble_3d(state):
    """psi(x) = (1/r) [u_up(r) Omega_{j,j-1/2,kappa} + u_down(r) Omega_{j,j+1/2,kappa}].

    Returns a function of an (P, 3) array of points giving (P, 2) spinor values.
    """
    if state.model is ModelId.HA:
        raise ValueError("3D assembly is defined for the spin models")
    j, kappa = state.j, state.kappa

    def psi(points):
        points = np.atleast_2d(points)
        r = np.linalg.norm(points, axis=1)
        theta = np.arccos(np.clip(points[:, 2] / r, -1.0, 1.0))
        phi = np.arctan2(points[:, 1], points[:, 0])
        u = state.evaluate(r)
        omega_a = spherical_spinor(j, j - _HALF, kappa, theta, phi).as_array()
        omega_b = spherical_spinor(j, j + _HALF, kappa, theta, phi).as_array()
        return (u[:, 0, None] * omega_a + u[:, 1, None] * omega_b) / r[:, None]

    return psi


def count_nodes(values, rel_floor=1e-6):
    """Sign changes of a sampled real function, ignoring values below rel_floor * max."""
    v = np.real(np.asarray(values))
    big = np.abs(v) > rel_floor * np.max(np.abs(v))
    signs = np.sign(v[big])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))
