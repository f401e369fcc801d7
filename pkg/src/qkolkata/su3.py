"""Strategy operators: a triad-based SU(3) parametrization and its sub-families.

A strategy matrix is built from two orthogonal complex unit vectors x and y:
the columns of U are [x, conj(y), z] with z the complex cross product
``conj(x) x y``, which makes U special unitary for every parameter choice.
Eight angles control the family: phi, theta, chi in [0, pi/2] and five phases
alpha1, alpha2, alpha3, beta1, beta2 in [0, 2*pi].

Sub-families:
  * REDUCED6 pins alpha1 = alpha2 = 0 and keeps a single alpha (stored in
    alpha3), leaving six free angles.
  * SO3 pins all five phases to 0, producing real rotation matrices.

The classical moves are the cyclic-shift permutation matrix ``s`` and its
powers, the order-three group that maps |0> to |k> for move k.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractViolation, NumericalIntegrityError
from .linalg import ATOL_ALGEBRAIC

TWO_PI = 2 * math.pi

# Phases are validated on the closed interval [0, 2*pi]; the endpoint is
# physically identical to 0 and keeps box-constrained optimizer output valid.
_ANGLE_BOXES = {
    "phi": (0.0, math.pi / 2),
    "theta": (0.0, math.pi / 2),
    "chi": (0.0, math.pi / 2),
    "alpha1": (0.0, TWO_PI),
    "alpha2": (0.0, TWO_PI),
    "alpha3": (0.0, TWO_PI),
    "beta1": (0.0, TWO_PI),
    "beta2": (0.0, TWO_PI),
}

_FIELD_ORDER = ("phi", "theta", "chi", "alpha1", "alpha2", "alpha3", "beta1", "beta2")


class StrategyFamily(str, enum.Enum):
    FULL_SU3 = "FULL_SU3"
    REDUCED6 = "REDUCED6"
    SO3 = "SO3"

    @property
    def dim(self) -> int:
        """Number of free angles."""
        return {StrategyFamily.FULL_SU3: 8, StrategyFamily.REDUCED6: 6, StrategyFamily.SO3: 3}[self]

    @property
    def free_fields(self) -> tuple[str, ...]:
        if self is StrategyFamily.FULL_SU3:
            return _FIELD_ORDER
        if self is StrategyFamily.REDUCED6:
            return ("phi", "theta", "chi", "alpha3", "beta1", "beta2")
        return ("phi", "theta", "chi")


@dataclass(frozen=True)
class StrategyParams:
    """Angles selecting one strategy matrix within a family.

    Validation is strict: out-of-range angles are rejected, never wrapped,
    since the declared boxes double as the optimizer's search region.
    """

    family: StrategyFamily
    phi: float
    theta: float
    chi: float
    alpha1: float = 0.0
    alpha2: float = 0.0
    alpha3: float = 0.0
    beta1: float = 0.0
    beta2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", StrategyFamily(self.family))
        for name in _FIELD_ORDER:
            lo, hi = _ANGLE_BOXES[name]
            val = float(getattr(self, name))
            if not (lo <= val <= hi) or not math.isfinite(val):
                raise ContractViolation(f"{name}={val} outside [{lo}, {hi:.6f}]")
            object.__setattr__(self, name, val)
        if self.family is StrategyFamily.REDUCED6 and (self.alpha1 != 0.0 or self.alpha2 != 0.0):
            raise ContractViolation("REDUCED6 requires alpha1 = alpha2 = 0")
        if self.family is StrategyFamily.SO3 and any(
            getattr(self, n) != 0.0 for n in ("alpha1", "alpha2", "alpha3", "beta1", "beta2")
        ):
            raise ContractViolation("SO3 requires all five phases to be 0")

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        d = {"family": self.family.value}
        d.update({name: getattr(self, name) for name in _FIELD_ORDER})
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "StrategyParams":
        """Build from a flat JSON object; omitted phases default to 0."""
        family = StrategyFamily(d["family"])
        kwargs = {name: float(d[name]) for name in _FIELD_ORDER if name in d}
        return cls(family=family, **kwargs)

    # -- flat-vector view (optimizer interface) ---------------------------

    def as_vector(self) -> np.ndarray:
        """Free angles of this family, in field order."""
        return np.array([getattr(self, n) for n in self.family.free_fields])

    @classmethod
    def from_vector(cls, family: StrategyFamily, vec) -> "StrategyParams":
        family = StrategyFamily(family)
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (family.dim,):
            raise ContractViolation(f"{family.value} expects {family.dim} angles, got {vec.shape}")
        return cls(family=family, **dict(zip(family.free_fields, vec)))

    def full_vector(self) -> np.ndarray:
        """All eight angles in field order, with pinned ones at 0."""
        return np.array([getattr(self, n) for n in _FIELD_ORDER])


@dataclass(frozen=True)
class ClassicalStrategy:
    """Exponent of the cyclic-shift generator: move k sends |0> to |k>."""

    power: int

    def __post_init__(self):
        if self.power not in (0, 1, 2):
            raise ContractViolation(f"classical move must be 0, 1 or 2, got {self.power}")


def family_bounds(family: StrategyFamily) -> tuple[np.ndarray, np.ndarray]:
    """(lower, upper) box bounds for the family's free angles."""
    los, his = [], []
    for name in StrategyFamily(family).free_fields:
        lo, hi = _ANGLE_BOXES[name]
        los.append(lo)
        his.append(hi)
    return np.array(los), np.array(his)


# -- vector and matrix construction ---------------------------------------

def unit_vector_x(p: StrategyParams) -> np.ndarray:
    """First triad vector: (sin(t)cos(f)e^{ia1}, sin(t)sin(f)e^{ia2}, cos(t)e^{ia3})."""
    return _unit_x(p.full_vector())


def unit_vector_y(p: StrategyParams) -> np.ndarray:
    """Second triad vector, unit norm and orthogonal to x by construction."""
    return _unit_y(p.full_vector())


def _unit_x(v: np.ndarray) -> np.ndarray:
    phi, theta, _, a1, a2, a3 = v[0], v[1], v[2], v[3], v[4], v[5]
    st, ct = math.sin(theta), math.cos(theta)
    return np.array(
        [
            st * math.cos(phi) * np.exp(1j * a1),
            st * math.sin(phi) * np.exp(1j * a2),
            ct * np.exp(1j * a3),
        ]
    )


def _unit_y(v: np.ndarray) -> np.ndarray:
    phi, theta, chi, a1, a2, a3, b1, b2 = v
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    sc, cc = math.sin(chi), math.cos(chi)
    return np.array(
        [
            cc * ct * cp * np.exp(1j * (b1 - a1)) + sc * sp * np.exp(1j * (b2 - a1)),
            cc * ct * sp * np.exp(1j * (b1 - a2)) - sc * cp * np.exp(1j * (b2 - a2)),
            -cc * st * np.exp(1j * (b1 - a3)),
        ]
    )


def su3_matrix(p: StrategyParams) -> np.ndarray:
    """Strategy matrix with columns [x, conj(y), conj(x) x y].

    Group membership (U+U = I and det U = 1, both to 1e-12) is verified on
    every construction; a violation signals a transcription bug in the triad
    formulas rather than bad user input.
    """
    U = _matrix_from_full(p.full_vector())
    err = np.abs(U.conj().T @ U - np.eye(3)).max()
    det = np.linalg.det(U)
    if err > ATOL_ALGEBRAIC or abs(det - 1.0) > ATOL_ALGEBRAIC:
        raise NumericalIntegrityError(
            f"constructed matrix left SU(3): unitarity {err:.3e}, det {det}"
        )
    if p.family is StrategyFamily.SO3:
        U = U.real.astype(complex)  # imaginary parts are exact zeros for zero phases
    return U


def _matrix_from_full(v: np.ndarray) -> np.ndarray:
    x = _unit_x(v)
    y = _unit_y(v)
    z = np.cross(x.conj(), y)
    return np.column_stack([x, y.conj(), z])


def su3_matrices(full_vectors: np.ndarray) -> np.ndarray:
    """Batched :func:`su3_matrix` on an (N, 8) array of full angle vectors.

    Skips the per-matrix group check (the construction is verified separately
    at scale); intended for optimizer and sweep hot paths.
    """
    P = np.asarray(full_vectors, dtype=float)
    if P.ndim != 2 or P.shape[1] != 8:
        raise ContractViolation(f"expected (N, 8) angle array, got {P.shape}")
    phi, th, ch = P[:, 0], P[:, 1], P[:, 2]
    a1, a2, a3, b1, b2 = P[:, 3], P[:, 4], P[:, 5], P[:, 6], P[:, 7]
    st, ct = np.sin(th), np.cos(th)
    sp, cp = np.sin(phi), np.cos(phi)
    sc, cc = np.sin(ch), np.cos(ch)
    x = np.empty((len(P), 3), dtype=complex)
    x[:, 0] = st * cp * np.exp(1j * a1)
    x[:, 1] = st * sp * np.exp(1j * a2)
    x[:, 2] = ct * np.exp(1j * a3)
    y = np.empty_like(x)
    y[:, 0] = cc * ct * cp * np.exp(1j * (b1 - a1)) + sc * sp * np.exp(1j * (b2 - a1))
    y[:, 1] = cc * ct * sp * np.exp(1j * (b1 - a2)) - sc * cp * np.exp(1j * (b2 - a2))
    y[:, 2] = -cc * st * np.exp(1j * (b1 - a3))
    z = np.cross(x.conj(), y)
    return np.stack([x, y.conj(), z], axis=-1)


# -- classical moves -------------------------------------------------------

CYCLIC_GENERATOR = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)


def classical_operator(k: ClassicalStrategy | int) -> np.ndarray:
    """Power of the cyclic-shift generator, as an exact 0/1 permutation matrix."""
    power = k.power if isinstance(k, ClassicalStrategy) else ClassicalStrategy(int(k)).power
    return np.linalg.matrix_power(CYCLIC_GENERATOR, power)


# -- center quotient -------------------------------------------------------

# Multiplying a strategy matrix by a cube root of unity shifts all three
# alpha phases by 2*pi/3 and changes no payoff, so alpha values spaced by
# 12*pi/18 are one physical strategy.
CENTER_ALPHA_STEP = 12 * math.pi / 18
CANONICAL_ALPHA = 5 * math.pi / 18


def canonicalize_center(p: StrategyParams, atol: float = 1e-7) -> tuple[StrategyParams, bool]:
    """Map equal alphas of the form (5+12n)*pi/18 to the n=0 representative.

    Returns (params, recognized).  Inputs outside the recognized form come
    back unchanged with ``recognized=False``.
    """
    if p.family is not StrategyFamily.FULL_SU3:
        return p, False
    if abs(p.alpha1 - p.alpha2) > atol or abs(p.alpha1 - p.alpha3) > atol:
        return p, False
    n = (p.alpha1 - CANONICAL_ALPHA) / CENTER_ALPHA_STEP
    if abs(n - round(n)) * CENTER_ALPHA_STEP > atol:
        return p, False
    return (
        replace(p, alpha1=CANONICAL_ALPHA, alpha2=CANONICAL_ALPHA, alpha3=CANONICAL_ALPHA),
        True,
    )


# -- reference optima -------------------------------------------------------

#: Full-family optimum: payoff 2/3 on the shared GHZ resource.
OPT_FULL = StrategyParams(
    family=StrategyFamily.FULL_SU3,
    phi=math.pi / 4,
    theta=math.acos(1 / math.sqrt(3)),
    chi=math.pi / 4,
    alpha1=5 * math.pi / 18,
    alpha2=5 * math.pi / 18,
    alpha3=5 * math.pi / 18,
    beta1=math.pi / 3,
    beta2=11 * math.pi / 6,
)

#: Six-angle optimum, payoff-equivalent to :data:`OPT_FULL`.
OPT_REDUCED = StrategyParams(
    family=StrategyFamily.REDUCED6,
    phi=math.pi / 4,
    theta=math.acos(1 / math.sqrt(3)),
    chi=math.pi / 4,
    alpha3=math.pi / 2,
    beta1=math.pi / 3,
    beta2=5 * math.pi / 6,
)

#: Rotation-family optimum, payoff 40/81 (exactly, in double precision).
#: phi = chi = pi/4; the (pi/6, arccos(1/3), pi/6) point is not stationary
#: and scores only ~0.3695.
OPT_ORTHOGONAL = StrategyParams(
    family=StrategyFamily.SO3,
    phi=math.pi / 4,
    theta=math.acos(1 / 3),
    chi=math.pi / 4,
)


def reference_optimum(family: StrategyFamily) -> StrategyParams:
    family = StrategyFamily(family)
    return {
        StrategyFamily.FULL_SU3: OPT_FULL,
        StrategyFamily.REDUCED6: OPT_REDUCED,
        StrategyFamily.SO3: OPT_ORTHOGONAL,
    }[family]


#: REDUCED6 angles that produce the identity matrix (useful as a "do nothing"
#: deviation in equilibrium checks).
IDENTITY_REDUCED = StrategyParams(
    family=StrategyFamily.REDUCED6,
    phi=0.0,
    theta=math.pi / 2,
    chi=math.pi / 2,
    alpha3=0.0,
    beta1=0.0,
    beta2=math.pi,
)
