"""
Elliptic Functions Module
Complete elliptic integrals, Jacobi elliptic functions and the composed
second-kind integral E(p) = E(am p, k) used by every Maxwell-time equation
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import special

from config import Config
from utils.errors import DivergenceError, DomainError

Real = Union[float, np.ndarray]


@dataclass(frozen=True)
class Modulus:
    """Elliptic modulus k with 0 <= k <= 1"""

    k: float

    def __post_init__(self):
        if not np.isfinite(self.k) or not 0.0 <= self.k <= 1.0:
            raise DomainError(f"elliptic modulus must lie in [0, 1], got {self.k!r}")

    @property
    def m(self) -> float:
        """Parameter m = k^2"""
        return self.k * self.k

    @property
    def complementary(self) -> float:
        """k' = sqrt(1 - k^2), computed without cancellation"""
        return float(np.sqrt((1.0 - self.k) * (1.0 + self.k)))

    def __float__(self) -> float:
        return float(self.k)


@dataclass(frozen=True)
class EllipticValues:
    """
    sn, cn, dn and eps = E(am p, k) at one argument (or an array of them)
    """

    sn: Real
    cn: Real
    dn: Real
    eps: Real


def _modulus(k: Union[Modulus, float]) -> float:
    """Validate and unwrap a modulus argument"""
    if isinstance(k, Modulus):
        return k.k
    return Modulus(float(k)).k


def _shape_like(p: ArrayLike, value: np.ndarray) -> Real:
    return float(value) if np.ndim(p) == 0 else value


def is_unit(k: float) -> bool:
    """True when k is numerically 1 (the separatrix limit)"""
    return 1.0 - k < Config.K_ONE_THRESHOLD


def complete_K(k: Union[Modulus, float]) -> float:
    """
    Complete elliptic integral of the first kind

    Args:
        k: Modulus in [0, 1)

    Returns:
        float: K(k)

    Raises:
        DivergenceError: If k = 1
        DomainError: If k is outside [0, 1]
    """
    k = _modulus(k)
    if k == 1.0:
        raise DivergenceError("K(k) diverges at k = 1")
    # ellipkm1 takes 1 - m directly, which keeps precision as k -> 1
    return float(special.ellipkm1((1.0 - k) * (1.0 + k)))


def complete_E(k: Union[Modulus, float]) -> float:
    """
    Complete elliptic integral of the second kind

    Args:
        k: Modulus in [0, 1]

    Returns:
        float: E(k), with E(0) = pi/2 and E(1) = 1
    """
    k = _modulus(k)
    return float(special.ellipe(k * k))


def incomplete_E(phi: ArrayLike, k: Union[Modulus, float]) -> Real:
    """
    Incomplete elliptic integral of the second kind E(phi, k)

    The amplitude is reduced to r = phi - n*pi with |r| <= pi/2 and E(r, k)
    comes from the Carlson forms RF and RD, so E(phi) = E(r) + 2n E(k) holds
    on every branch.

    Args:
        phi: Amplitude (scalar or array)
        k: Modulus in [0, 1]

    Returns:
        E(phi, k) with the shape of phi
    """
    k = _modulus(k)
    m = k * k
    phi_arr = np.asarray(phi, dtype=float)

    n = np.round(phi_arr / np.pi)
    r = phi_arr - n * np.pi
    s = np.sin(r)
    x = np.cos(r) ** 2
    y = 1.0 - m * s * s
    reduced = s * special.elliprf(x, y, 1.0) - (m / 3.0) * s ** 3 * special.elliprd(x, y, 1.0)
    return _shape_like(phi, reduced + 2.0 * n * complete_E(k))


def jacobi(p: ArrayLike, k: Union[Modulus, float]) -> EllipticValues:
    """
    Jacobi elliptic functions and the composed second-kind integral

    The argument is reduced modulo 4K before evaluation, so sn, cn, dn are
    exactly 4K-periodic and eps carries the quasi-period 4E per 4K.

    Args:
        p: Argument (scalar or array)
        k: Modulus in [0, 1]; values within K_ONE_THRESHOLD of 1 use the
           hyperbolic limit sn = tanh, cn = dn = sech, eps = tanh

    Returns:
        EllipticValues: sn, cn, dn, eps with the shape of p
    """
    k = _modulus(k)
    p_arr = np.asarray(p, dtype=float)

    if is_unit(k):
        sech = 1.0 / np.cosh(p_arr)
        tanh = np.tanh(p_arr)
        return EllipticValues(
            sn=_shape_like(p, tanh),
            cn=_shape_like(p, sech),
            dn=_shape_like(p, sech.copy()),
            eps=_shape_like(p, tanh.copy()),
        )

    m = k * k
    period = 4.0 * complete_K(k)
    turns = np.floor(p_arr / period)
    reduced = p_arr - turns * period

    sn, cn, dn, ph = special.ellipj(reduced, m)
    eps = incomplete_E(ph, k) + 4.0 * turns * complete_E(k)

    return EllipticValues(
        sn=_shape_like(p, sn),
        cn=_shape_like(p, cn),
        dn=_shape_like(p, dn),
        eps=_shape_like(p, eps),
    )


def amplitude(p: ArrayLike, k: Union[Modulus, float]) -> Real:
    """
    Jacobi amplitude am(p, k), continuous and increasing in p

    Args:
        p: Argument (scalar or array)
        k: Modulus in [0, 1]

    Returns:
        Amplitude with am(p + 2K) = am(p) + pi
    """
    k = _modulus(k)
    p_arr = np.asarray(p, dtype=float)

    if is_unit(k):
        # Gudermannian
        return _shape_like(p, 2.0 * np.arctan(np.tanh(0.5 * p_arr)))

    period = 4.0 * complete_K(k)
    turns = np.floor(p_arr / period)
    _, _, _, ph = special.ellipj(p_arr - turns * period, k * k)
    return _shape_like(p, ph + 2.0 * np.pi * turns)
