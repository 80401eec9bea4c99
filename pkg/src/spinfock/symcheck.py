"""Named operator identities, evaluated exactly and reported one index tuple at a time."""
import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .models import (
    ModelId,
    ModelError,
    build_ladder,
    build_observable,
    parse_model,
    radial_reduce,
    DEFAULT_SPIN_ORBIT_READING,
    SPIN_ORBIT_READINGS,
)
from .opalg import I, OperatorExpr, commutator, is_zero

__all__ = [
    "IdentityId",
    "CheckReport",
    "DEFAULT_J_SETS",
    "ALL",
    "check_identity",
    "check_susy",
    "applicable_identities",
    "run_suite",
    "resolve_spin_orbit_reading",
]


class IdentityId(enum.Enum):
    O4_JJ = "O4_JJ"
    O4_RJ = "O4_RJ"
    O4_RR = "O4_RR"
    CONS_J = "CONS_J"
    CONS_R = "CONS_R"
    CASIMIR_DEF = "CASIMIR_DEF"
    CASIMIR_SQ = "CASIMIR_SQ"
    FACTORIZE = "FACTORIZE"
    INTERTWINE = "INTERTWINE"
    DIRAC_REDUCE = "DIRAC_REDUCE"

    def __str__(self):
        return self.value


ALL = "ALL"

DEFAULT_J_SETS = {
    ModelId.DIPOLE: tuple(Fraction(k, 2) for k in (1, 3, 5, 7, 9)),
    ModelId.SPIN_ORBIT: tuple(Fraction(k, 2) for k in (1, 3, 5, 7, 9)),
    ModelId.HA: tuple(Fraction(l) for l in range(5)),
}

_EPS = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (1, 0, 2): -1, (0, 2, 1): -1, (2, 1, 0): -1}


@dataclass
class CheckReport:
    identity: IdentityId
    model: ModelId
    params: dict
    passed: bool
    residual_terms: int
    witness: str = None
    note: str = None
    suite: str = field(default="symcheck")

    def to_dict(self):
        out = {
            "suite": self.suite,
            "identity": str(self.identity),
            "model": self.model.name,
            "params": {k: str(v) for k, v in self.params.items()},
            "passed": self.passed,
            "residual_terms": self.residual_terms,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note is not None:
            out["note"] = self.note
        return out


def _report(identity, model, params, residual, suite="symcheck", note=None):
    zero = is_zero(residual)
    # the normal form is unique, so the two zero tests must agree
    assert zero == (len(residual) == 0)
    return CheckReport(
        identity=identity,
        model=model,
        params=params,
        passed=zero,
        residual_terms=len(residual),
        witness=None if zero else str(residual),
        note=note,
        suite=suite,
    )


def applicable_identities(model):
    model = parse_model(model)
    ids = [IdentityId.O4_JJ, IdentityId.O4_RJ, IdentityId.O4_RR,
           IdentityId.CONS_J, IdentityId.CONS_R]
    if model is ModelId.SPIN_ORBIT:
        ids += [IdentityId.CASIMIR_DEF, IdentityId.CASIMIR_SQ]
    ids += [IdentityId.FACTORIZE, IdentityId.INTERTWINE]
    if model is ModelId.DIPOLE:
        ids.append(IdentityId.DIRAC_REDUCE)
    return ids


class _Observables:
    def __init__(self, model, overrides, reading):
        self.model = model
        self.overrides = overrides or {}
        self.reading = reading
        self.r_names = (("R1", "R2", "R3") if model is ModelId.HA
                        else ("Rhat1", "Rhat2", "Rhat3"))

    def get(self, name):
        if name in self.overrides:
            return self.overrides[name]
        return build_observable(self.model, name, reading=self.reading)

    @property
    def H(self):
        return self.get("H")

    def J(self, a):
        return self.get(f"J{a + 1}")

    def R(self, a):
        return self.get(self.r_names[a])


def _pairs(indices, distinct):
    if indices == ALL or indices is None:
        return [(a, b) for a in range(3) for b in range(3) if not (distinct and a == b)]
    a, b = indices
    return [(a - 1, b - 1)]


def _singles(indices):
    if indices == ALL or indices is None:
        return [0, 1, 2]
    (a,) = indices if isinstance(indices, tuple) else (indices,)
    return [a - 1]


def check_identity(identity, model, indices=ALL, *, overrides=None,
                   reading=DEFAULT_SPIN_ORBIT_READING, j_set=None):
    """Evaluate ``identity`` for ``model``.

    ``indices`` is ``ALL``, a pair ``(a, b)`` (1-based) for the O4 families or
    a single ``a`` for CONS_*.  ``overrides`` replaces named observables, which
    is how mutation tests inject perturbed Hamiltonians.
    """
    identity = IdentityId(identity)
    model = parse_model(model)
    if identity not in applicable_identities(model):
        raise ModelError(f"{identity} does not apply to {model.name}")
    if identity in (IdentityId.FACTORIZE, IdentityId.INTERTWINE):
        reports = check_susy(model, j_set or DEFAULT_J_SETS[model], reading=reading)
        return [r for r in reports if r.identity is identity]
    if identity is IdentityId.DIRAC_REDUCE:
        from .dirac import verify_reduction
        return [verify_reduction()]

    obs = _Observables(model, overrides, reading)
    out = []
    if identity is IdentityId.O4_JJ:
        for a, b in _pairs(indices, True):
            c = 3 - a - b
            res = commutator(obs.J(a), obs.J(b)) - obs.J(c) * (I * _EPS[a, b, c])
            out.append(_report(identity, model, {"a": a + 1, "b": b + 1}, res))
    elif identity is IdentityId.O4_RJ:
        for a, b in _pairs(indices, False):
            res = commutator(obs.R(a), obs.J(b))
            if a != b:
                c = 3 - a - b
                res = res - obs.R(c) * (I * _EPS[a, b, c])
            out.append(_report(identity, model, {"a": a + 1, "b": b + 1}, res))
    elif identity is IdentityId.O4_RR:
        two_i_over_m = OperatorExpr.param("m", -1) * (2 * I)
        for a, b in _pairs(indices, True):
            c = 3 - a - b
            res = commutator(obs.R(a), obs.R(b)) + two_i_over_m * obs.J(c) * obs.H * _EPS[a, b, c]
            note = None
            if res and model is ModelId.SPIN_ORBIT:
                note = "residual is printed as a witness; not an exact operator identity"
            out.append(_report(identity, model, {"a": a + 1, "b": b + 1}, res, note=note))
    elif identity is IdentityId.CONS_J:
        for a in _singles(indices):
            out.append(_report(identity, model, {"a": a + 1}, commutator(obs.H, obs.J(a))))
    elif identity is IdentityId.CONS_R:
        for a in _singles(indices):
            out.append(_report(identity, model, {"a": a + 1}, commutator(obs.H, obs.R(a))))
    elif identity is IdentityId.CASIMIR_DEF:
        out.append(_casimir_def(model, obs))
    elif identity is IdentityId.CASIMIR_SQ:
        c = obs.get("C")
        out.append(_report(identity, model, {}, c * c - Fraction(1, 4)))
    return out


def _casimir_def(model, obs):
    inv_alpha = OperatorExpr.param("alpha", -1)
    c = obs.get("C")
    sym = OperatorExpr.zero()
    plain = OperatorExpr.zero()
    for a in range(3):
        j, r = obs.J(a), obs.R(a)
        sym = sym + (j * r + r * j) * Fraction(1, 2)
        plain = plain + j * r
    res = c - inv_alpha * sym
    res_plain = c - inv_alpha * plain
    notes = []
    if res_plain == res:
        notes.append("unsymmetrized J.R gives the same residual")
    if not res and not res_plain:
        notes = ["unsymmetrized J.R also gives zero residual"]
    flipped = c + inv_alpha * sym
    if res and not flipped:
        notes.append("C + (1/alpha) J.R = 0 holds exactly: the relation closes with the opposite sign")
    return _report(IdentityId.CASIMIR_DEF, model, {}, res, note="; ".join(notes) or None)


def check_susy(model, j_set=None, *, superpotential=None, reading=DEFAULT_SPIN_ORBIT_READING):
    """FACTORIZE and INTERTWINE reports for every j in ``j_set``.

    ``superpotential`` optionally maps j to a replacement W (mutation tests).
    """
    model = parse_model(model)
    j_set = DEFAULT_J_SETS[model] if j_set is None else j_set
    out = []
    for j in j_set:
        j = Fraction(j)
        w = None if superpotential is None else superpotential(j)
        a, a_plus, c = build_ladder(model, j, superpotential=w)
        h_j = radial_reduce(model, j, reading=reading)
        h_next = radial_reduce(model, j + 1, reading=reading)
        label = "l" if model is ModelId.HA else "j"
        params = {label: j, "c": c}
        out.append(_report(IdentityId.FACTORIZE, model, params, h_j - a_plus * a - c))
        out.append(_report(IdentityId.INTERTWINE, model, {label: j},
                           h_j * a_plus - a_plus * h_next))
    return out


def run_suite(models=tuple(ModelId), j_sets=None, reading=DEFAULT_SPIN_ORBIT_READING):
    """Every applicable identity for every model, in a fixed order."""
    reports = []
    for model in models:
        model = parse_model(model)
        js = (j_sets or {}).get(model, DEFAULT_J_SETS[model])
        for identity in applicable_identities(model):
            if identity is IdentityId.FACTORIZE:
                reports.extend(check_susy(model, js, reading=reading))
            elif identity is IdentityId.INTERTWINE:
                continue
            else:
                reports.extend(check_identity(identity, model, reading=reading))
    return reports


def resolve_spin_orbit_reading():
    """Run CONS_R and O4_RR under both readings of the -1/(8x^2) term.

    Returns ``{reading: passed}``; exactly one reading is expected to close.
    """
    out = {}
    for reading in SPIN_ORBIT_READINGS:
        reports = (check_identity(IdentityId.CONS_R, ModelId.SPIN_ORBIT, reading=reading)
                   + check_identity(IdentityId.O4_RR, ModelId.SPIN_ORBIT, reading=reading))
        out[reading] = all(r.passed for r in reports)
    return out
