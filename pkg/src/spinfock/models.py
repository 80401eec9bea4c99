"""Operators of the three spin models and their radial reductions.

HA          spin-0 Coulomb problem, H = p^2/2m - q/r
DIPOLE      H = p^2/2m + alpha sigma.x / r^2
SPIN_ORBIT  H = p^2/2m + (sigma.L + 1)/(2m r^2) - alpha/r - 1/(8 m r^2)

Radial operators are in rescaled units (coupling set to 1), where every
model's bound states sit at epsilon = -1/(4 N^2).
"""
import enum
from fractions import Fraction
from functools import lru_cache

from .opalg import OperatorExpr, RadialOp

__all__ = [
    "ModelId",
    "ModelError",
    "OBSERVABLES",
    "SPIN_ORBIT_READINGS",
    "parse_model",
    "vector_x",
    "vector_p",
    "vector_sigma",
    "cross",
    "dot",
    "angular_momentum",
    "total_angular_momentum",
    "hamiltonian_terms",
    "runge_lenz_potential",
    "build_observable",
    "observable_names",
    "check_quantum_number",
    "build_radial_potential",
    "build_superpotential",
    "build_ladder",
    "radial_reduce",
    "spin_orbit_channels",
    "SUPERPOTENTIAL_SIGNS",
]


class ModelId(enum.Enum):
    HA = "ha"
    DIPOLE = "dipole"
    SPIN_ORBIT = "spin-orbit"

    def __str__(self):
        return self.name


class ModelError(ValueError):
    pass


def parse_model(value):
    if isinstance(value, ModelId):
        return value
    key = str(value).strip().lower().replace("_", "-")
    for m in ModelId:
        if key in (m.value, m.name.lower().replace("_", "-")):
            return m
    raise ModelError(f"unknown model {value!r}")


OBSERVABLES = {
    ModelId.HA: ("H", "L1", "L2", "L3", "J1", "J2", "J3", "R1", "R2", "R3"),
    ModelId.DIPOLE: ("H", "L1", "L2", "L3", "J1", "J2", "J3", "Rhat1", "Rhat2", "Rhat3"),
    ModelId.SPIN_ORBIT: (
        "H", "L1", "L2", "L3", "J1", "J2", "J3", "Rhat1", "Rhat2", "Rhat3", "C",
    ),
}

# How the -1/(8x^2) term of the spin-orbit Hamiltonian is normalised:
# "verbatim" keeps it as printed, "per_mass" reads it as -1/(8 m x^2).
# The default is the reading under which the o(4) checks close (see symcheck).
SPIN_ORBIT_READINGS = ("verbatim", "per_mass")
DEFAULT_SPIN_ORBIT_READING = "per_mass"

_X = OperatorExpr


def vector_x():
    return [_X.x(a) for a in (1, 2, 3)]


def vector_p():
    return [_X.p(a) for a in (1, 2, 3)]


def vector_sigma():
    return [_X.sigma(a) for a in (1, 2, 3)]


def cross(u, v):
    """Ordered cross product (u x v)_a = eps_abc u_b v_c."""
    return [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


@lru_cache(maxsize=None)
def angular_momentum():
    return tuple(cross(vector_x(), vector_p()))


@lru_cache(maxsize=None)
def total_angular_momentum():
    half = Fraction(1, 2)
    return tuple(l + s * half for l, s in zip(angular_momentum(), vector_sigma()))


def hamiltonian_terms(model, reading=DEFAULT_SPIN_ORBIT_READING):
    """Named pieces of H as ``[(name, coefficient, operator), ...]``.

    ``H = sum(coefficient * operator)``.  Exposed separately so that tests can
    perturb one coefficient at a time.
    """
    model = parse_model(model)
    m_inv = _X.param("m", -1)
    p = vector_p()
    p2 = dot(p, p)
    kinetic = ("kinetic", Fraction(1, 2), p2 * m_inv)
    if model is ModelId.HA:
        return [kinetic, ("coulomb", Fraction(-1), _X.param("q") * _X.r(-1))]
    if model is ModelId.DIPOLE:
        sx = dot(vector_sigma(), vector_x())
        return [kinetic, ("dipole", Fraction(1), _X.param("alpha") * sx * _X.r(-2))]
    if reading not in SPIN_ORBIT_READINGS:
        raise ModelError(f"unknown spin-orbit reading {reading!r}")
    sl = dot(vector_sigma(), list(angular_momentum()))
    inv_sq = _X.r(-2) * (m_inv if reading == "per_mass" else 1)
    return [
        kinetic,
        ("spin_orbit", Fraction(1, 2), sl * _X.r(-2) * m_inv),
        ("spin_orbit_shift", Fraction(1, 2), _X.r(-2) * m_inv),
        ("coulomb", Fraction(-1), _X.param("alpha") * _X.r(-1)),
        ("inverse_square", Fraction(-1, 8), inv_sq),
    ]


def runge_lenz_potential(model):
    """The potential entering x*V in the (generalised) Runge-Lenz vector."""
    model = parse_model(model)
    if model is ModelId.HA:
        return -_X.param("q") * _X.r(-1)
    if model is ModelId.DIPOLE:
        return _X.param("alpha") * dot(vector_sigma(), vector_x()) * _X.r(-2)
    sl = dot(vector_sigma(), list(angular_momentum()))
    half_m = _X.param("m", -1) * Fraction(1, 2)
    return (sl + 1) * _X.r(-2) * half_m - _X.param("alpha") * _X.r(-1)


def _runge_lenz(model, ordering):
    model = parse_model(model)
    mom = angular_momentum() if model is ModelId.HA else total_angular_momentum()
    p = vector_p()
    x = vector_x()
    v = runge_lenz_potential(model)
    half_m = _X.param("m", -1) * Fraction(1, 2)
    pj = cross(p, list(mom))
    jp = cross(list(mom), p)
    out = []
    for a in range(3):
        if ordering == "left":
            xv = x[a] * v
        elif ordering == "symmetric":
            xv = (x[a] * v + v * x[a]) * Fraction(1, 2)
        else:
            raise ModelError(f"unknown ordering {ordering!r}")
        out.append((pj[a] - jp[a]) * half_m + xv)
    return tuple(out)


@lru_cache(maxsize=None)
def _cached_observable(model, which, reading, ordering):
    if which == "H":
        total = OperatorExpr.zero()
        for _, c, piece in hamiltonian_terms(model, reading):
            total = total + piece * c
        return total
    if which in ("L1", "L2", "L3"):
        return angular_momentum()[int(which[1]) - 1]
    if which in ("J1", "J2", "J3"):
        if model is ModelId.HA:
            # spin-0: J reduces to L
            return angular_momentum()[int(which[1]) - 1]
        return total_angular_momentum()[int(which[1]) - 1]
    if which in ("R1", "R2", "R3", "Rhat1", "Rhat2", "Rhat3"):
        return _runge_lenz(model, ordering)[int(which[-1]) - 1]
    if which == "C":
        sx = dot(vector_sigma(), vector_x())
        return sx * _X.r(-1) * Fraction(1, 2)
    raise ModelError(f"unknown observable {which!r}")


# Ordering of x*V in R-hat.  For SPIN_ORBIT, V contains sigma.L, which does
# not commute with x; the literal product x*V is not Hermitian.
DEFAULT_RUNGE_LENZ_ORDERING = "symmetric"


def build_observable(model, which, *, reading=DEFAULT_SPIN_ORBIT_READING,
                     ordering=DEFAULT_RUNGE_LENZ_ORDERING):
    """Canonical operator for ``which`` in ``model``.

    Legal names per model are listed in ``OBSERVABLES``: ``R1..R3`` belong to
    HA only, ``Rhat1..Rhat3`` to the spin models and ``C`` to SPIN_ORBIT.
    """
    model = parse_model(model)
    if which not in OBSERVABLES[model]:
        raise ModelError(f"observable {which!r} is not defined for model {model.name}")
    return _cached_observable(model, which, reading, ordering)


def observable_names(model, **kwargs):
    """Mapping name -> operator for every observable of ``model`` (parser bindings)."""
    model = parse_model(model)
    return {name: build_observable(model, name, **kwargs) for name in OBSERVABLES[model]}


# --------------------------------------------------------------------------
# radial reduction (rescaled units)

_R = RadialOp
_HALF = Fraction(1, 2)


def check_quantum_number(model, j):
    """Validate and return ``j`` (half-integer >= 1/2) or ``l`` (integer >= 0 for HA)."""
    model = parse_model(model)
    j = Fraction(j)
    if model is ModelId.HA:
        if j.denominator != 1 or j < 0:
            raise ModelError(f"HA needs an integer l >= 0, got {j}")
    elif j.denominator != 2 or j < _HALF:
        raise ModelError(f"{model.name} needs a half-integer j >= 1/2, got {j}")
    return j


def build_radial_potential(model, j):
    model = parse_model(model)
    j = check_quantum_number(model, j)
    if model is ModelId.DIPOLE:
        centrifugal = _R.scalar(j * (j + 1) + Fraction(1, 4)) - _R.sigma(3) * (j + _HALF)
        return centrifugal * _R.r(-2) - _R.sigma(1) * _R.r(-1)
    # SPIN_ORBIT with half-integer j, HA with integer l: the same scalar form
    return _R.r(-2) * (j * (j + 1)) - _R.r(-1)


# Signs (s_const, s_inv_r) in W = s_const/(2(j+1)) + s_inv_r (j+1)/r for the
# scalar models.  The printed superpotentials have s_inv_r = +1, which gives
# +1/r instead of -1/r in a^+ a + c; (+1, -1) is the choice for which
# H_j = a_j^+ a_j + c_j holds exactly.  Frozen; regression-tested.
SUPERPOTENTIAL_SIGNS = (1, -1)


def build_superpotential(model, j, signs=None):
    model = parse_model(model)
    j = check_quantum_number(model, j)
    if model is ModelId.DIPOLE:
        return (_R.sigma(3) * _HALF - (j + 1)) * _R.r(-1) + _R.sigma(1) / (2 * (j + 1))
    s_const, s_inv_r = SUPERPOTENTIAL_SIGNS if signs is None else signs
    return _R.scalar(Fraction(s_const) / (2 * (j + 1))) + _R.r(-1) * (s_inv_r * (j + 1))


def build_ladder(model, j, superpotential=None):
    """Return ``(a, a_plus, c)`` with ``a = dr + W``, ``a_plus = -dr + W``, ``c = -1/(4(j+1)^2)``."""
    model = parse_model(model)
    j = check_quantum_number(model, j)
    w = build_superpotential(model, j) if superpotential is None else superpotential
    a = _R.dr() + w
    a_plus = -_R.dr() + w
    c = -Fraction(1, 4 * (j + 1) ** 2)
    return a, a_plus, c


def spin_orbit_channels(j, reading=DEFAULT_SPIN_ORBIT_READING):
    """Effective radial operators for the two spinor channels l = j -+ 1/2.

    sigma.L is replaced by its eigenvalue, j - 1/2 on l = j - 1/2 and
    -j - 3/2 on l = j + 1/2.  Rescaling r = 2 m alpha x multiplies the
    inverse-square terms of 2m H by 1 and the Coulomb term by 1/(2 m alpha),
    leaving ``-dr^2 + (l(l+1) + sigma.L + 1 - 1/4)/r^2 - 1/r``.  Under the
    verbatim reading the last inverse-square coefficient is ``-m/4``, which
    survives as a parameter.
    """
    j = check_quantum_number(ModelId.SPIN_ORBIT, j)
    inv_sq = (_R.scalar(Fraction(-1, 4)) if reading == "per_mass"
              else _R.param("m") * Fraction(-1, 4))
    out = {}
    for l, sl in ((j - _HALF, j - _HALF), (j + _HALF, -j - Fraction(3, 2))):
        v = (_R.scalar(l * (l + 1) + sl + 1) + inv_sq) * _R.r(-2) - _R.r(-1)
        out[l] = -_R.dr(2) + v
    return out


def radial_reduce(model, j, reading=DEFAULT_SPIN_ORBIT_READING):
    """``-dr^2 + V_j`` for ``model``.

    For SPIN_ORBIT the operator is obtained by inserting the sigma.L
    eigenvalues channel by channel; both channels must agree and must match
    the scalar potential ``j(j+1)/r^2 - 1/r``.
    """
    model = parse_model(model)
    j = check_quantum_number(model, j)
    expected = -_R.dr(2) + build_radial_potential(model, j)
    if model is ModelId.SPIN_ORBIT:
        channels = list(spin_orbit_channels(j, reading).values())
        if channels[0] != channels[1]:
            raise ModelError(f"spin-orbit channels disagree at j={j}: {channels[0]} vs {channels[1]}")
        if channels[0] != expected:
            raise ModelError(
                f"spin-orbit reduction at j={j} gives {channels[0]}, expected {expected}"
            )
    return expected
