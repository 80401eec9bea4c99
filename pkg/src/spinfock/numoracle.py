"""Finite-difference oracle for the 2x2 radial problems and 3D pointwise residuals.

The radial operator ``-dr^2 + V(r)`` is discretised on a uniform grid with
Dirichlet walls at ``r_min`` and ``r_max``.  Unknowns are interleaved
``(u_up(r_0), u_down(r_0), u_up(r_1), ...)`` so the matrix is banded with two
superdiagonals.
"""
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .opalg import RadialOp
from .models import ModelId, parse_model, DEFAULT_SPIN_ORBIT_READING

__all__ = [
    "OracleError",
    "InsufficientStatesError",
    "ConvergenceError",
    "RadialGrid",
    "GridFunction",
    "DiscreteOperator",
    "PRODUCTION_GRID",
    "CI_GRID",
    "discretize",
    "eigensolve",
    "rayleigh_quotient",
    "residual_3d",
    "sample_points",
    "spinor_laplacian",
    "sigma_dot_l",
]

_PAULI = {
    0: np.eye(2),
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


class OracleError(ValueError):
    pass


class InsufficientStatesError(OracleError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    M: int

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max:
            raise OracleError(f"need 0 < r_min < r_max, got {self.r_min}, {self.r_max}")
        if self.M < 16:
            raise OracleError(f"need at least 16 nodes, got {self.M}")

    @property
    def h(self):
        return (self.r_max - self.r_min) / (self.M + 1)

    @property
    def nodes(self):
        return self.r_min + self.h * np.arange(1, self.M + 1)

    def refined(self):
        """Grid with half the spacing whose odd nodes coincide with ours."""
        return RadialGrid(self.r_min, self.r_max, 2 * self.M + 1)


PRODUCTION_GRID = RadialGrid(1e-3, 240.0, 12000)
CI_GRID = RadialGrid(1e-3, 120.0, 3000)


@dataclass
class GridFunction:
    grid: RadialGrid
    values: np.ndarray  # shape (M, 2), complex
    label: dict = field(default_factory=dict)

    def inner(self, other):
        # trapezoid rule; the Dirichlet end values are zero
        return self.grid.h * np.sum(np.conj(self.values) * other.values)

    def norm(self):
        return float(np.sqrt(self.inner(self).real))

    def normalized(self):
        n = self.norm()
        if n == 0:
            raise OracleError("cannot normalise a zero function")
        return GridFunction(self.grid, self.values / n, dict(self.label))

    def overlap(self, other):
        """|<f, g>| / (|f| |g|)."""
        return float(abs(self.inner(other)) / (self.norm() * other.norm()))

    def flat(self):
        return self.values.reshape(-1)

    def to_csv(self, path_or_file, metadata=None):
        """CSV with a ``# {json}`` metadata line, then r, re_up, im_up, re_down, im_down."""
        meta = {
            "r_min": repr(self.grid.r_min),
            "r_max": repr(self.grid.r_max),
            "M": self.grid.M,
        }
        meta.update({k: str(v) for k, v in self.label.items()})
        if metadata:
            meta.update({k: str(v) for k, v in metadata.items()})
        lines = ["# " + json.dumps(meta, sort_keys=True), "r,re_up,im_up,re_down,im_down"]
        r = self.grid.nodes
        v = self.values
        for i in range(self.grid.M):
            lines.append(",".join(
                f"{x:.16e}" for x in (r[i], v[i, 0].real, v[i, 0].imag, v[i, 1].real, v[i, 1].imag)
            ))
        text = "\n".join(lines) + "\n"
        if hasattr(path_or_file, "write"):
            path_or_file.write(text)
        else:
            with open(path_or_file, "w") as fh:
                fh.write(text)
        return text


@dataclass
class DiscreteOperator:
    grid: RadialGrid
    band: np.ndarray  # upper banded storage for scipy.linalg.eig_banded, shape (3, 2M)
    source: str = ""

    @property
    def size(self):
        return self.band.shape[1]

    def to_dense(self):
        n = self.size
        a = np.zeros((n, n))
        u = self.band.shape[0] - 1
        for off in range(u + 1):
            diag = self.band[u - off, off:]
            a += np.diag(diag, off)
            if off:
                a += np.diag(diag, -off)
        return a

    def matvec(self, v):
        u = self.band.shape[0] - 1
        out = self.band[u] * v
        for off in range(1, u + 1):
            d = self.band[u - off, off:]
            out[:-off] += d * v[off:]
            out[off:] += d * v[:-off]
        return out


def _evaluate_coefficient(key, value, r, params):
    k, pa, pm, mu, d = key
    c = complex(value)
    if pa:
        c *= params["alpha"] ** pa
    if pm:
        c *= params["m"] ** pm
    return c * r ** k


def discretize(op, grid, params=None):
    """Second-order central differences for ``op`` (derivative order <= 2).

    Only constant scalar ``dr^2`` terms and real symmetric potential terms are
    accepted; anything else would break the symmetry of the matrix.
    """
    if not isinstance(op, RadialOp):
        raise OracleError("discretize expects a RadialOp")
    params = {"alpha": 1.0, "m": 1.0, **(params or {})}
    r = grid.nodes
    M = grid.M
    h2 = grid.h ** 2
    pot = np.zeros((M, 2, 2), dtype=complex)
    kinetic = 0.0
    for key, value in op.terms.items():
        k, pa, pm, mu, d = key
        if d == 0:
            coeff = _evaluate_coefficient(key, value, r, params)
            pot += coeff[:, None, None] * _PAULI[mu]
        elif d == 2 and k == 0 and mu == 0:
            c = _evaluate_coefficient(key, value, 1.0, params)
            if abs(c.imag) > 0:
                raise OracleError("complex second-derivative coefficient")
            kinetic += c.real
        else:
            raise OracleError(
                f"term r^{k} s{mu} dr^{d} cannot be discretised symmetrically"
            )
    if np.max(np.abs(pot.imag), initial=0.0) > 0:
        raise OracleError("potential is not real")
    pot = pot.real
    if np.max(np.abs(pot[:, 0, 1] - pot[:, 1, 0]), initial=0.0) > 0:
        raise OracleError("potential block is not symmetric")
    n = 2 * M
    band = np.zeros((3, n))
    # c * dr^2 -> c * (f_{i+1} - 2 f_i + f_{i-1}) / h^2
    diag = np.empty(n)
    diag[0::2] = pot[:, 0, 0] - 2 * kinetic / h2
    diag[1::2] = pot[:, 1, 1] - 2 * kinetic / h2
    band[2] = diag
    off1 = np.zeros(n)
    off1[1::2] = pot[:, 0, 1]
    band[1] = off1
    off2 = np.zeros(n)
    off2[2:] = kinetic / h2
    band[0] = off2
    return DiscreteOperator(grid=grid, band=band, source=str(op))


def _fix_sign(vec):
    i = np.argmax(np.abs(vec))
    return vec if vec[i] >= 0 else -vec


def _sparse(A, shift=0.0):
    n = A.size
    u = A.band.shape[0] - 1
    offsets, diags = [0], [A.band[u] - shift]
    for off in range(1, u + 1):
        d = A.band[u - off, off:]
        offsets += [off, -off]
        diags += [d, d]
    return scipy.sparse.diags(diags, offsets, shape=(n, n), format="csc")


def eigensolve(A, k, window, residual_tol=1e-8, max_iter=50):
    """The ``k`` lowest eigenpairs of ``A`` with eigenvalue in ``window = (lo, hi]``.

    Eigenvalues come from LAPACK banded bisection (no eigenvector storage);
    each eigenvector is then found by shift-invert inverse iteration with a
    sparse LU of ``A - shift``.  Degenerate eigenvalues are handled by
    orthogonalising against vectors already found at the same level.
    Vectors are trapezoid-normalised and sign-fixed, so output is deterministic.
    """
    if k < 1:
        raise OracleError("k must be >= 1")
    lo, hi = window
    try:
        w = scipy.linalg.eig_banded(A.band, lower=False, eigvals_only=True, select="v",
                                    select_range=(lo, hi), check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"banded eigensolver failed: {exc}") from exc
    if len(w) < k:
        raise InsufficientStatesError(
            f"only {len(w)} eigenvalues in ({lo}, {hi}], {k} requested"
        )
    w = np.sort(w)[:k]
    rng = np.random.default_rng(12345)
    n = A.size
    M = A.grid.M
    found = []
    out = []
    for lam in w:
        scale = max(1.0, abs(lam))
        cluster = [v for mu, v in found if abs(mu - lam) <= 1e-9 * scale]
        shift = lam - 1e-11 * scale
        lu = scipy.sparse.linalg.splu(_sparse(A, shift))
        vec = rng.standard_normal(n)
        for _ in range(max_iter):
            for c in cluster:
                vec = vec - np.dot(c, vec) * c
            vec = vec / np.linalg.norm(vec)
            nxt = lu.solve(vec)
            for c in cluster:
                nxt = nxt - np.dot(c, nxt) * c
            vec = nxt / np.linalg.norm(nxt)
            res = np.linalg.norm(A.matvec(vec) - lam * vec)
            if res <= residual_tol:
                break
        else:
            raise ConvergenceError(
                f"inverse iteration at {lam:.6e} stalled with residual {res:.3e}"
            )
        found.append((lam, vec))
        vec = _fix_sign(vec)
        gf = GridFunction(A.grid, vec.reshape(M, 2).astype(complex), {"index": len(out)})
        out.append((float(lam), gf.normalized()))
    return out


def rayleigh_quotient(A, f):
    v = f.flat()
    den = np.vdot(v, v).real
    if den == 0:
        raise OracleError("Rayleigh quotient of a zero function")
    av = A.matvec(v.real) + 1j * A.matvec(v.imag)
    return float(np.vdot(v, av).real / den)


# --------------------------------------------------------------------------
# 3D pointwise residuals (rescaled units)

_SIGMA = np.stack([_PAULI[1], _PAULI[2], _PAULI[3]])


def sample_points(n, seed, r_lo=0.5, r_hi=6.0):
    """Seeded sample of points with |x| in [r_lo, r_hi], isotropic directions."""
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1)[:, None]
    rad = rng.uniform(r_lo, r_hi, size=n)
    return d * rad[:, None]


_UNIT = np.eye(3)


def spinor_laplacian(psi, points, h):
    """7-point Laplacian of a spinor field, shape (P, 2)."""
    centre = psi(points)
    lap = -6.0 * centre
    for a in range(3):
        step = h * _UNIT[a]
        lap = lap + psi(points + step) + psi(points - step)
    return lap / h ** 2


def spinor_gradient(psi, points, h):
    """Central-difference gradient, shape (3, P, 2)."""
    return np.stack([
        (psi(points + h * _UNIT[a]) - psi(points - h * _UNIT[a])) / (2 * h) for a in range(3)
    ])


def sigma_dot_l(psi, points, h):
    """(sigma . L) psi with L = -i x cross grad."""
    grad = spinor_gradient(psi, points, h)
    x = points
    # L_a psi = -i eps_abc x_b d_c psi
    lvec = np.stack([
        -1j * (x[:, 1, None] * grad[2] - x[:, 2, None] * grad[1]),
        -1j * (x[:, 2, None] * grad[0] - x[:, 0, None] * grad[2]),
        -1j * (x[:, 0, None] * grad[1] - x[:, 1, None] * grad[0]),
    ])
    return np.einsum("aij,apj->pi", _SIGMA, lvec)


def _potential_apply(model, psi, points, h, reading):
    model = parse_model(model)
    vals = psi(points)
    r = np.linalg.norm(points, axis=1)
    if model is ModelId.DIPOLE:
        sx = np.einsum("aij,pa->pij", _SIGMA, points)
        return np.einsum("pij,pj->pi", sx, vals) / (r ** 2)[:, None]
    if model is ModelId.SPIN_ORBIT:
        if reading != "per_mass":
            raise OracleError("pointwise spin-orbit residual needs the per-mass reading")
        sl = sigma_dot_l(psi, points, h)
        return (sl + 0.75 * vals) / (r ** 2)[:, None] - vals / r[:, None]
    if model is ModelId.HA:
        return -vals / r[:, None]
    raise OracleError(f"unknown model {model}")


def residual_3d(model, psi, epsilon, points, h, psi_floor=1e-10,
                reading=DEFAULT_SPIN_ORBIT_READING):
    """max over points of |(-Laplacian + V - epsilon) psi| / (|epsilon| |psi|).

    ``psi`` maps an (P, 3) array of Cartesian points (rescaled units) to a
    (P, 2) complex array.  The potential is the rescaled one of each model:
    ``sigma.x/r^2`` (DIPOLE), ``(sigma.L + 3/4)/r^2 - 1/r`` (SPIN_ORBIT),
    ``-1/r`` (HA).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.linalg.norm(points, axis=1)
    if np.any(r < 0.5):
        raise OracleError("sample point too close to the origin (|x| < 0.5)")
    vals = psi(points)
    mag = np.linalg.norm(vals, axis=1)
    if np.any(mag < psi_floor):
        raise OracleError("|psi| below floor at a sample point")
    lap = spinor_laplacian(psi, points, h)
    res = -lap + _potential_apply(model, psi, points, h, reading) - epsilon * vals
    return float(np.max(np.linalg.norm(res, axis=1) / (abs(epsilon) * mag)))
