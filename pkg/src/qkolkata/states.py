"""Initial states and densities for the three-qutrit game.

Pure states are length-27 complex vectors in the |x3 x2 x1> basis (see
``linalg``).  The only mixing channel is the fidelity mixture with the
maximally mixed state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .linalg import ATOL_ALGEBRAIC, basis_index, check_density, index_trits

DIM = 27


@dataclass(frozen=True)
class EntanglementParams:
    """Polar/azimuthal angles of the tunable three-branch superposition."""

    vartheta: float
    varphi: float

    def __post_init__(self):
        if not 0.0 <= self.vartheta <= math.pi:
            raise ContractViolation(f"vartheta={self.vartheta} outside [0, pi]")
        if not 0.0 <= self.varphi <= 2 * math.pi:
            raise ContractViolation(f"varphi={self.varphi} outside [0, 2*pi]")


def _check_normalized(psi: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > ATOL_ALGEBRAIC:
        raise ContractViolation(f"state norm {norm} != 1")
    return psi


def ghz_state() -> np.ndarray:
    """(|000> + |111> + |222>) / sqrt(3), the maximally correlated resource."""
    v = np.zeros(DIM, dtype=complex)
    v[[basis_index(k, k, k) for k in range(3)]] = 1 / math.sqrt(3)
    return v


def product_state_000() -> np.ndarray:
    """|000>: everyone sits on choice 0 by default."""
    v = np.zeros(DIM, dtype=complex)
    v[0] = 1.0
    return v


def aharonov_state() -> np.ndarray:
    """Totally antisymmetric singlet (1/sqrt(6)) * sum eps_{x3 x2 x1} |x3 x2 x1>.

    Sign convention: eps_{012} = +1 with indices ordered (x3, x2, x1).  Any
    global sign is payoff-irrelevant since payoffs are quadratic in the
    amplitudes.
    """
    v = np.zeros(DIM, dtype=complex)
    signs = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (0, 2, 1): -1, (2, 1, 0): -1, (1, 0, 2): -1}
    for trits, sign in signs.items():
        v[basis_index(*trits)] = sign / math.sqrt(6)
    return v


def tunable_state(p: EntanglementParams) -> np.ndarray:
    """sin(vt)cos(vp)|000> + sin(vt)sin(vp)|111> + cos(vt)|222>.

    Unit norm for every angle pair; recovers the GHZ state at
    vartheta = arccos(1/sqrt(3)), varphi = pi/4.
    """
    v = np.zeros(DIM, dtype=complex)
    st = math.sin(p.vartheta)
    v[basis_index(0, 0, 0)] = st * math.cos(p.varphi)
    v[basis_index(1, 1, 1)] = st * math.sin(p.varphi)
    v[basis_index(2, 2, 2)] = math.cos(p.vartheta)
    return _check_normalized(v)


def nine_outcome_state() -> np.ndarray:
    """Even superposition of the six all-distinct outcomes and the three
    all-equal outcomes, amplitude 1/3 each.

    This is the state symmetric optimal play drives the GHZ resource into;
    the all-distinct branches pay every player, the all-equal ones pay none.
    """
    v = np.zeros(DIM, dtype=complex)
    for i in range(DIM):
        x3, x2, x1 = index_trits(i)
        if len({x3, x2, x1}) in (1, 3):
            v[i] = 1 / 3
    return v


def noisy_density(psi: np.ndarray, f: float) -> np.ndarray:
    """Convex mixture f |psi><psi| + (1-f)/27 * I.

    ``f`` is the fidelity of the intended pure state; f = 0 is the maximally
    mixed state, f = 1 the pure projector.
    """
    if not (isinstance(f, (int, float)) and 0.0 <= f <= 1.0):
        raise ContractViolation(f"fidelity must lie in [0, 1], got {f}")
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (DIM,):
        raise ContractViolation(f"state must have length {DIM}, got shape {psi.shape}")
    _check_normalized(psi)
    rho = f * np.outer(psi, psi.conj()) + (1.0 - f) / DIM * np.eye(DIM)
    return check_density(rho)


_FIXED_STATES = {
    "ghz": ghz_state,
    "aharonov": aharonov_state,
    "product000": product_state_000,
}


def resolve_state(name: str) -> np.ndarray:
    """Look up a pure state by CLI name: ghz, aharonov, product000, or
    ``tunable:<vartheta>,<varphi>`` with angles in radians."""
    key = name.strip().lower()
    if key in _FIXED_STATES:
        return _FIXED_STATES[key]()
    if key.startswith("tunable:"):
        try:
            vt_s, vp_s = key[len("tunable:"):].split(",")
            params = EntanglementParams(float(vt_s), float(vp_s))
        except (ValueError, TypeError) as exc:
            raise ContractViolation(f"bad tunable state spec {name!r}: {exc}") from exc
        return tunable_state(params)
    raise ContractViolation(f"unknown state {name!r} (try ghz, aharonov, product000, tunable:vt,vp)")
