"""Dense complex linear algebra for the three-qutrit game.

Everything lives on a 3- or 27-dimensional Hilbert space, so all storage is
dense ``complex128``.  Basis convention for the joint space: the computational
ket |x3 x2 x1> maps to the flat index ``9*x3 + 3*x2 + x1``.  Charlie owns the
most significant trit x3, Bob owns x2, and Alice owns the least significant
trit x1.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractViolation, NumericalIntegrityError

# Tolerance tiers: algebraic identities on exactly-representable inputs get
# the tight bound, optimizer-adjacent quantities the looser one.
ATOL_ALGEBRAIC = 1e-12
ATOL_NUMERIC = 1e-9
ATOL_TRACE_IMAG = 1e-10
ATOL_EIG_FLOOR = 1e-10


def as_operator(m, dim: int | None = None) -> np.ndarray:
    """Coerce to a square complex matrix, optionally pinning its dimension."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractViolation(f"operator must be square, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise ContractViolation(f"operator must be {dim}x{dim}, got {a.shape[0]}x{a.shape[0]}")
    if not np.isfinite(a).all():
        raise ContractViolation("operator entries must be finite")
    return a


def tensor3(a, b, c) -> np.ndarray:
    """Tensor product of three single-qutrit operators.

    ``a`` acts on Alice's trit (least significant), ``b`` on Bob's, ``c`` on
    Charlie's (most significant), so the result is ``kron(c, kron(b, a))`` and
    entry [9i3+3i2+i1, 9j3+3j2+j1] equals c[i3,j3]*b[i2,j2]*a[i1,j1].
    """
    a = as_operator(a, 3)
    b = as_operator(b, 3)
    c = as_operator(c, 3)
    return np.kron(np.kron(c, b), a)


def adjoint(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_operator(m).conj().T


def is_unitary(m, atol: float = ATOL_NUMERIC) -> bool:
    m = as_operator(m)
    return np.abs(m.conj().T @ m - np.eye(m.shape[0])).max() <= atol


def check_density(rho, atol: float = ATOL_ALGEBRAIC) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity of a 27x27 density matrix.

    Eigenvalues may dip to -1e-10 from round-off; anything worse is treated as
    a construction bug, not noise.
    """
    rho = as_operator(rho, 27)
    herm = np.abs(rho - rho.conj().T).max()
    if herm > atol:
        raise NumericalIntegrityError(f"density not Hermitian (residual {herm:.3e})")
    tr = rho.trace()
    if abs(tr - 1.0) > atol:
        raise NumericalIntegrityError(f"density trace {tr} != 1")
    evals = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if evals.min() < -ATOL_EIG_FLOOR:
        raise NumericalIntegrityError(f"density has negative eigenvalue {evals.min():.3e}")
    return rho


def trace_product(p, rho) -> float:
    """Tr(p @ rho) for a Hermitian observable against a density matrix.

    The imaginary residue of the trace must be below 1e-10; it is asserted and
    then discarded.
    """
    p = as_operator(p, 27)
    if np.abs(p - p.conj().T).max() > ATOL_TRACE_IMAG:
        raise ContractViolation("observable must be Hermitian")
    rho = as_operator(rho, 27)
    val = np.einsum("ij,ji->", p, rho)
    if abs(val.imag) > ATOL_TRACE_IMAG:
        raise NumericalIntegrityError(f"trace has imaginary residue {val.imag:.3e}")
    return float(val.real)


def sym_eigenvalues(h, atol_sym: float = 1e-8) -> np.ndarray:
    """Ascending eigenvalues of a small real symmetric matrix (n <= 8).

    The input is symmetrized before solving; asymmetry beyond ``atol_sym``
    is rejected.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ContractViolation(f"matrix must be square, got shape {h.shape}")
    if h.shape[0] > 8:
        raise ContractViolation("sym_eigenvalues is specified for n <= 8")
    skew = np.abs(h - h.T).max()
    if skew > atol_sym:
        raise ContractViolation(f"matrix asymmetric beyond tolerance ({skew:.3e})")
    try:
        return np.linalg.eigvalsh((h + h.T) / 2)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails at n<=8
        raise NumericalIntegrityError(f"eigensolver did not converge: {exc}") from exc


def basis_index(x3: int, x2: int, x1: int) -> int:
    """Flat index of |x3 x2 x1>."""
    return 9 * x3 + 3 * x2 + x1


def index_trits(i: int) -> tuple[int, int, int]:
    """Inverse of :func:`basis_index`: returns (x3, x2, x1)."""
    return i // 9, (i // 3) % 3, i % 3
