"""Special functions: modified Bessel K0/K1, generalized Laguerre polynomials,
spherical harmonics and two-component spherical spinors.

No external special-function library is used; these are the oracles the
analytic states are built from.
"""
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "BesselUnderflowWarning",
    "bessel_k",
    "bessel_k_scaled",
    "bessel_k_derivative",
    "laguerre",
    "spherical_harmonic",
    "SpinorValue",
    "spinor_coefficients",
    "spherical_spinor",
]

EULER_GAMMA = 0.57721566490153286061
_SERIES_CUTOFF = 2.0
_UNDERFLOW_Z = 700.0


class BesselUnderflowWarning(RuntimeWarning):
    pass


def _k_series(z):
    """K0, K1 from the ascending series, accurate for 0 < z <= 2."""
    t = 0.25 * z * z
    log_half = np.log(0.5 * z)
    term0 = np.ones_like(z)  # (z^2/4)^k / (k!)^2
    term1 = np.ones_like(z)  # (z^2/4)^k / (k! (k+1)!)
    i0 = term0.copy()
    i1s = term1.copy()
    harmonic = 0.0
    s0 = np.zeros_like(z)
    # psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
    s1 = (1.0 - 2 * EULER_GAMMA) * term1
    for k in range(1, 40):
        term0 = term0 * t / (k * k)
        term1 = term1 * t / (k * (k + 1))
        harmonic += 1.0 / k
        i0 = i0 + term0
        i1s = i1s + term1
        s0 = s0 + harmonic * term0
        s1 = s1 + (-2 * EULER_GAMMA + 2 * harmonic + 1.0 / (k + 1)) * term1
        if np.all(term0 < 1e-18 * i0):
            break
    k0 = -(log_half + EULER_GAMMA) * i0 + s0
    i1 = 0.5 * z * i1s
    k1 = 1.0 / z + log_half * i1 - 0.25 * z * s1
    return k0, k1


def _k_steed_scaled(z):
    """exp(z) K0, exp(z) K1 by Steed's continued fraction, for z >= 2."""
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(z)
    q2 = np.ones_like(z)
    a1 = 0.25
    q = np.full_like(z, a1)
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 2000):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels) < 1e-17 * np.abs(s)):
            break
    else:  # pragma: no cover
        raise RuntimeError("Bessel K continued fraction did not converge")
    h = a1 * h
    k0 = np.sqrt(np.pi / (2.0 * z)) / s
    k1 = k0 * (z + 0.5 - h) / z
    return k0, k1


def _both_scaled(z):
    small = z <= _SERIES_CUTOFF
    k0 = np.empty_like(z)
    k1 = np.empty_like(z)
    if np.any(small):
        a, b = _k_series(z[small])
        ez = np.exp(z[small])
        k0[small], k1[small] = a * ez, b * ez
    if np.any(~small):
        k0[~small], k1[~small] = _k_steed_scaled(z[~small])
    return k0, k1


def _as_positive_array(z):
    arr = np.asarray(z, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("bessel_k needs z > 0")
    return arr


def bessel_k_scaled(order, z):
    """exp(z) * K_order(z) for order 0 or 1."""
    if order not in (0, 1):
        raise ValueError("only orders 0 and 1 are supported")
    arr = _as_positive_array(z)
    scaled = _both_scaled(np.atleast_1d(arr))[order]
    return scaled.reshape(arr.shape) if arr.ndim else float(scaled[0])


def bessel_k(order, z):
    """Modified Bessel function of the second kind K_0 or K_1 for z > 0.

    Ascending series for z <= 2, Steed's continued fraction above.  Relative
    accuracy is close to machine precision on [1e-6, 700].  For z > 700 the
    result underflows to 0 and a ``BesselUnderflowWarning`` is issued.
    """
    if order not in (0, 1):
        raise ValueError("only orders 0 and 1 are supported")
    arr = np.atleast_1d(_as_positive_array(z))
    scaled = _both_scaled(arr)[order]
    big = arr > _UNDERFLOW_Z
    with np.errstate(under="ignore"):
        out = np.where(big, 0.0, scaled * np.exp(-np.minimum(arr, _UNDERFLOW_Z)))
    if np.any(big):
        warnings.warn("bessel_k underflow for z > 700, returning 0", BesselUnderflowWarning,
                      stacklevel=2)
    return out.reshape(np.shape(z)) if np.ndim(z) else float(out[0])


def bessel_k_derivative(order, z):
    """K0' = -K1 and K1' = -K0 - K1/z."""
    if order == 0:
        return -bessel_k(1, z)
    if order == 1:
        return -bessel_k(0, z) - bessel_k(1, z) / np.asarray(z, dtype=float)
    raise ValueError("only orders 0 and 1 are supported")


def laguerre(n, a, y):
    """Generalized Laguerre polynomial L_n^(a)(y) by the three-term recurrence.

    Exact when ``a`` and ``y`` are Fractions; works elementwise on arrays.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if isinstance(y, (Fraction, int)) and isinstance(a, (Fraction, int)):
        one = Fraction(1)
    else:
        one = 1.0
        a = float(a)
        y = np.asarray(y, dtype=float) if np.ndim(y) else float(y)
    prev = 0 * y
    cur = one + 0 * y
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 + a - y) * cur - (k + a) * prev) / (k + 1)
    return cur


def _legendre_normalized(l, m, x):
    """Orthonormal associated Legendre function, Condon-Shortley phase, m >= 0."""
    x = np.asarray(x, dtype=float)
    sin_t = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    pmm = np.full_like(x, math.sqrt(1.0 / (4 * math.pi)))
    for k in range(1, m + 1):
        pmm = -pmm * math.sqrt((2 * k + 1) / (2 * k)) * sin_t
    if l == m:
        return pmm
    pm1 = math.sqrt(2 * m + 3) * x * pmm
    if l == m + 1:
        return pm1
    p_lm2, p_lm1 = pmm, pm1
    for ll in range(m + 2, l + 1):
        a = math.sqrt((4 * ll * ll - 1) / (ll * ll - m * m))
        b = math.sqrt(((ll - 1) ** 2 - m * m) / (4 * (ll - 1) ** 2 - 1))
        p_lm2, p_lm1 = p_lm1, a * (x * p_lm1 - b * p_lm2)
    return p_lm1


def spherical_harmonic(l, m, theta, phi):
    """Orthonormal Y_lm(theta, phi) with the Condon-Shortley phase."""
    if l < 0 or abs(m) > l:
        raise ValueError(f"invalid harmonic labels l={l}, m={m}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    p = _legendre_normalized(l, abs(m), np.cos(theta))
    y = p * np.exp(1j * abs(m) * phi)
    if m < 0:
        y = (-1) ** abs(m) * np.conj(y)
    return y


@dataclass
class SpinorValue:
    up: np.ndarray
    down: np.ndarray
    j: Fraction
    l: int
    kappa: Fraction

    def as_array(self):
        """Components stacked on a trailing axis of length 2."""
        return np.stack([np.asarray(self.up), np.asarray(self.down)], axis=-1)


def _check_spinor_labels(j, l, kappa):
    j, kappa = Fraction(j), Fraction(kappa)
    if j.denominator != 2 or j < Fraction(1, 2):
        raise ValueError(f"j must be a positive half-integer, got {j}")
    if l not in (j - Fraction(1, 2), j + Fraction(1, 2)):
        raise ValueError(f"l must be j -+ 1/2, got l={l} for j={j}")
    if abs(kappa) > j or (kappa - j).denominator != 1:
        raise ValueError(f"kappa must be in -j..j, got {kappa}")
    return j, int(l), kappa


def spinor_coefficients(j, l, kappa):
    """Exact squared Clebsch-Gordan weights with signs.

    Returns ``((sign_up, weight_up, m_up), (sign_down, weight_down, m_down))``
    so that the spinor is ``(sign*sqrt(weight)*Y_{l,m_up}, ...)``.
    """
    j, l, kappa = _check_spinor_labels(j, l, kappa)
    half = Fraction(1, 2)
    if l == j - half:
        up = (1, (j + kappa) / (2 * j), kappa - half)
        down = (1, (j - kappa) / (2 * j), kappa + half)
    else:
        up = (-1, (j - kappa + 1) / (2 * j + 2), kappa - half)
        down = (1, (j + kappa + 1) / (2 * j + 2), kappa + half)
    return up, down


def spherical_spinor(j, l, kappa, theta, phi):
    """Spherical spinor Omega_{j,l,kappa}(theta, phi) for l = j -+ 1/2."""
    j, l, kappa = _check_spinor_labels(j, l, kappa)
    comps = []
    for sign, weight, m in spinor_coefficients(j, l, kappa):
        m = int(m)
        if weight == 0 or abs(m) > l:
            comps.append(np.zeros(np.broadcast(np.asarray(theta), np.asarray(phi)).shape,
                                  dtype=complex))
        else:
            comps.append(sign * math.sqrt(weight) * spherical_harmonic(l, m, theta, phi))
    return SpinorValue(up=comps[0], down=comps[1], j=j, l=l, kappa=kappa)
