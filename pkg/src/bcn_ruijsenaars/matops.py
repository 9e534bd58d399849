"""Dense complex matrix kernel.

Everything downstream works with plain ``numpy`` arrays of ``complex128``
(matrices) and ``float64`` (diagonal data).  This module supplies the
factorizations and transcendental operations the rest of the package
needs at sizes up to a few dozen:

* structural predicates (Hermitian, unitary, triangular-positive,
  pseudo-unitary with respect to an indefinite signature),
* Hermitian eigendecomposition and singular value decomposition with a
  fixed ordering convention,
* the matrix exponential by scaling-and-squaring with a diagonal Pade
  approximant,
* the signature ("indefinite") Cholesky factorizations H = b^dag J b and
  M = b J b^dag with b upper triangular and positive diagonal.

All functions are pure; inputs are never modified.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInput, NotOnLeaf, NumericalFailure

__all__ = [
    "inn",
    "frob",
    "rel_err",
    "is_hermitian",
    "is_unitary",
    "is_upper_triangular_positive",
    "is_pseudo_unitary",
    "hermitian_eig",
    "svd_ordered",
    "expm",
    "indefinite_cholesky_upper",
    "indefinite_cholesky_upper_dual",
]

#: default absolute tolerance for structural predicates, scaled by norm
STRUCT_TOL = 1e-10


def inn(n: int) -> np.ndarray:
    """Signature matrix diag(+1 x n, -1 x n) of size 2n x 2n."""
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)])).astype(complex)


def frob(a: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def rel_err(actual: np.ndarray, target: np.ndarray) -> float:
    """Frobenius deviation of `actual` from `target`, relative to max(1, |target|)."""
    target = np.asarray(target)
    return frob(np.asarray(actual) - target) / max(1.0, frob(target))


def _as_square(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise InvalidInput(f"{name} contains non-finite entries")
    return a


def is_hermitian(m, tol: float = STRUCT_TOL) -> bool:
    a = _as_square(m)
    return frob(a - a.conj().T) <= tol * max(1.0, frob(a))


def is_unitary(m, tol: float = STRUCT_TOL) -> bool:
    a = _as_square(m)
    return frob(a.conj().T @ a - np.eye(a.shape[0])) <= tol * max(1.0, frob(a))


def is_upper_triangular_positive(m, tol: float = STRUCT_TOL) -> bool:
    """Strictly lower entries below tol, diagonal real and positive."""
    a = _as_square(m)
    scale = max(1.0, frob(a))
    lower = a[np.tril_indices_from(a, k=-1)]
    if lower.size and np.max(np.abs(lower)) > tol * scale:
        return False
    d = np.diagonal(a)
    return bool(np.all(np.abs(d.imag) <= tol * scale) and np.all(d.real > 0.0))


def is_pseudo_unitary(m, signature=None, tol: float = STRUCT_TOL) -> bool:
    """Check m^dag J m = J for the signature matrix J (default diag(I, -I))."""
    a = _as_square(m)
    j = inn(a.shape[0] // 2) if signature is None else np.asarray(signature, dtype=complex)
    return frob(a.conj().T @ j @ a - j) <= tol * max(1.0, frob(a) ** 2)


def hermitian_eig(m, tol: float = STRUCT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns (w, u) with w real ascending and m = u diag(w) u^dag up to a
    relative residual of about 1e-12.  Raises InvalidInput when m is not
    Hermitian within `tol`.
    """
    a = _as_square(m)
    if not is_hermitian(a, tol):
        raise InvalidInput("hermitian_eig: input is not Hermitian within tolerance")
    w, u = np.linalg.eigh(a)
    return w, u


def svd_ordered(m):
    """SVD of a square matrix: m = u diag(s) v^dag with s descending.

    Returns (u, s, v); note the third factor is v, not v^dag.
    """
    a = _as_square(m)
    u, s, vh = np.linalg.svd(a)
    return u, s, vh.conj().T


# --- matrix exponential -----------------------------------------------------

# 1-norm thresholds for the diagonal Pade approximants of orders 3,5,7,9,13
_PADE_THETA = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
]
_THETA13 = 5.371920351148152e0


def _pade_coeffs(m: int) -> np.ndarray:
    # numerator coefficients of the (m, m) diagonal approximant of exp;
    # the denominator is the same polynomial evaluated at -x
    f = math.factorial
    return np.array(
        [f(2 * m - j) * f(m) / (f(2 * m) * f(j) * f(m - j)) for j in range(m + 1)]
    )


def _pade(a: np.ndarray, m: int) -> np.ndarray:
    n = a.shape[0]
    b = _pade_coeffs(m)
    eye = np.eye(n, dtype=complex)
    a2 = a @ a
    if m != 13:
        pows = {0: eye, 2: a2}
        for k in range(4, m, 2):
            pows[k] = pows[k - 2] @ a2
        u_poly = sum(b[j] * pows[j - 1] for j in range(1, m + 1, 2))
        u = a @ u_poly
        v = sum(b[j] * pows[j] for j in range(0, m + 1, 2))
    else:
        a4 = a2 @ a2
        a6 = a4 @ a2
        u = a @ (
            a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
            + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * eye
        )
        v = (
            a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
            + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * eye
        )
    return np.linalg.solve(v - u, v + u)


def expm(m) -> np.ndarray:
    """Matrix exponential via scaling-and-squaring with diagonal Pade steps.

    The approximant order and squaring count are chosen from the 1-norm of
    the input; relative accuracy is ~1e-12 for norms up to a few tens.
    Raises NumericalFailure if the result overflows.
    """
    a = _as_square(m)
    norm = float(np.linalg.norm(a, 1)) if a.size else 0.0
    for order, theta in _PADE_THETA:
        if norm <= theta:
            return _pade(a, order)
    s = max(0, int(math.ceil(math.log2(norm / _THETA13))))
    x = _pade(a / (2.0 ** s), 13)
    for _ in range(s):
        x = x @ x
    if not np.all(np.isfinite(x)):
        raise NumericalFailure("expm: overflow during squaring phase")
    return x


# --- signature Cholesky -----------------------------------------------------

def _signature_vector(n: int, signature) -> np.ndarray:
    if signature is None:
        if n % 2:
            raise InvalidInput("default signature needs even dimension")
        return np.concatenate([np.ones(n // 2), -np.ones(n // 2)])
    j = np.asarray(signature, dtype=float)
    if j.ndim == 2:
        j = np.diagonal(j).real.copy()
    if j.shape != (n,) or not np.all(np.abs(j) == 1.0):
        raise InvalidInput("signature must be a vector/diagonal of +-1 entries")
    return j


def indefinite_cholesky_upper(h, signature=None, tol: float = STRUCT_TOL):
    """Factor a Hermitian matrix as h = b^dag J b.

    b is upper triangular with real positive diagonal and J is the
    signature matrix (default diag(I, -I)).  The factorization exists and
    is unique exactly when h lies in the image of b -> b^dag J b; a pivot
    of the wrong sign raises NotOnLeaf.
    """
    a = _as_square(h)
    n = a.shape[0]
    j = _signature_vector(n, signature)
    if not is_hermitian(a, tol):
        raise InvalidInput("indefinite_cholesky_upper: input is not Hermitian")
    b = np.zeros((n, n), dtype=complex)
    for i in range(n):
        d = a[i, i].real - np.sum(j[:i] * np.abs(b[:i, i]) ** 2)
        pivot = j[i] * d
        if pivot <= 0.0:
            raise NotOnLeaf(f"pivot {i} has wrong sign for the signature")
        b[i, i] = math.sqrt(pivot)
        if i + 1 < n:
            s = (j[:i] * b[:i, i].conj()) @ b[:i, i + 1:]
            b[i, i + 1:] = j[i] * (a[i, i + 1:] - s) / b[i, i].real
    return b


def indefinite_cholesky_upper_dual(m, signature=None, tol: float = STRUCT_TOL):
    """Factor a Hermitian matrix as m = b J b^dag (same b conventions).

    This is the mirror of :func:`indefinite_cholesky_upper`, eliminating
    from the lower-right corner upward.
    """
    a = _as_square(m)
    n = a.shape[0]
    j = _signature_vector(n, signature)
    if not is_hermitian(a, tol):
        raise InvalidInput("indefinite_cholesky_upper_dual: input is not Hermitian")
    b = np.zeros((n, n), dtype=complex)
    for k in range(n - 1, -1, -1):
        d = a[k, k].real - np.sum(j[k + 1:] * np.abs(b[k, k + 1:]) ** 2)
        pivot = j[k] * d
        if pivot <= 0.0:
            raise NotOnLeaf(f"pivot {k} has wrong sign for the signature")
        b[k, k] = math.sqrt(pivot)
        if k:
            s = b[:k, k + 1:] @ (j[k + 1:] * b[k, k + 1:].conj())
            b[:k, k] = j[k] * (a[:k, k] - s) / b[k, k].real
    return b
