"""Reconstruction of the constrained group element from reduced coordinates.

Given a reduced point (q, p) and model parameters, this module rebuilds
the full 2n x 2n group element together with every intermediate of the
constraint analysis:

* the non-negative vector v from the residue formula of the determinant
  identity det(Sigma^2 - l) / det(alpha^2 Sigma^2 - l) = 1 + v^T (alpha^2
  Sigma^2 - l)^{-1} v,
* the real orthogonal frame Ttilde whose rows are the normalized vectors
  (Sigma_i^2 - alpha^2 Sigma^2)^{-1} v,
* the reference momentum data sigma (diagonal, det 1) and the rotation
  rho aligning vtilde = Sigma^{-1} v with vhat = |vtilde| e_1,
* the unitary T = P Ttilde with P = exp(i p), the blocks Omega, omega,
  nu, and the two triangular/pseudo-unitary factorizations
  g = k_L b_R = b_L k_R.

`verify_constraints` re-checks every invariant of the construction and
returns a named residual report; it never raises.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ChamberViolation,
    InternalInconsistency,
    SeparationViolation,
)
from .matops import frob, inn, rel_err
from .model import CartanData, ModelParams, ReducedPoint, cartan_from_q

__all__ = [
    "ConstraintData",
    "LeafFactorization",
    "ConstraintReport",
    "solve_v",
    "build_Ttilde",
    "build_sigma_rho",
    "assemble",
    "verify_constraints",
]


@dataclass(frozen=True)
class ConstraintData:
    """Intermediates of the constraint solution at one reduced point."""

    cartan: CartanData
    v: np.ndarray          # non-negative, from the residue formula
    vtilde: np.ndarray     # Sigma^{-1} v
    vhat: np.ndarray       # |vtilde| e_1 (reference gauge)
    Ttilde: np.ndarray     # real orthogonal, rows are the normalized frame vectors
    phases: np.ndarray     # diagonal of P = exp(i p)
    T: np.ndarray          # P Ttilde
    Omega: np.ndarray      # Lambda T
    omega: np.ndarray      # Sigma^{-1} (Omega - x^{-1} Gamma)
    nu: np.ndarray         # rho Sigma^{-1} (y^2 Gamma - x^{-1} Omega^dag)
    rho: np.ndarray        # real special orthogonal, rho vtilde = vhat
    sigma: np.ndarray      # diag(alpha^{1-n}, alpha, ..., alpha)


@dataclass(frozen=True)
class LeafFactorization:
    """The quadruple (k_L, b_R, b_L, k_R) and the element g they factor."""

    g: np.ndarray
    k_L: np.ndarray
    b_R: np.ndarray
    b_L: np.ndarray
    k_R: np.ndarray

    @property
    def n(self) -> int:
        return self.g.shape[0] // 2


def solve_v(Sigma, alpha: float) -> np.ndarray:
    """Solve for v from the residue of the determinant identity.

    v_k^2 = prod_i (Sigma_i^2 - alpha^2 Sigma_k^2) /
            prod_{j != k} alpha^2 (Sigma_j^2 - Sigma_k^2)

    Raises SeparationViolation when any v_k^2 is not strictly positive,
    which happens exactly when the pairwise separation condition fails.
    """
    sigma = np.atleast_1d(np.asarray(Sigma, dtype=float))
    if sigma.size > 1 and not np.all(np.diff(sigma) < 0.0):
        raise ChamberViolation("Sigma must be strictly decreasing and positive")
    if not np.all(sigma > 0.0):
        raise ChamberViolation("Sigma must be positive")
    s = sigma ** 2
    a2 = alpha ** 2
    n = s.size
    v2 = np.empty(n)
    for k in range(n):
        num = np.prod(s - a2 * s[k])
        den = np.prod(np.concatenate([a2 * (s[:k] - s[k]), a2 * (s[k + 1:] - s[k])]))
        v2[k] = num / den
    if not np.all(v2 > 0.0):
        raise SeparationViolation(f"non-positive radicand in v^2 = {v2}")
    return np.sqrt(v2)


def build_Ttilde(Sigma, alpha: float, v) -> np.ndarray:
    """Real orthogonal Ttilde with rows prop. to (Sigma_i^2 - alpha^2 Sigma^2)^{-1} v.

    The rows are normalized with a positive factor, so the diagonal of
    Ttilde is positive and the matrix is uniquely determined.  It
    satisfies Ttilde^T Sigma^2 Ttilde = alpha^2 Sigma^2 + v v^T.
    """
    sigma = np.atleast_1d(np.asarray(Sigma, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if sigma.size > 1 and not np.all(np.diff(sigma) < 0.0):
        raise ChamberViolation("Sigma must be strictly decreasing")
    s = sigma ** 2
    denom = s[:, None] - alpha ** 2 * s[None, :]
    if np.any(denom == 0.0):
        raise SeparationViolation("Sigma_i^2 = alpha^2 Sigma_j^2: separation boundary")
    that = v[None, :] / denom
    return that / np.linalg.norm(that, axis=1)[:, None]


def build_sigma_rho(cdata: CartanData, v, params: ModelParams):
    """Reference momentum data: (sigma, rho, vhat).

    vhat is pinned to |vtilde| e_1, for which the upper-triangular factor
    of alpha^2 I + vhat vhat^dag is the diagonal sigma =
    diag(alpha^{1-n}, alpha, ..., alpha) with det sigma = 1.  rho is the
    real special orthogonal map sending vtilde to vhat (a Householder
    reflection composed with a sign flip to land in SO(n)).
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    n = v.size
    vtilde = v / cdata.Sigma
    norm_sq = float(vtilde @ vtilde)
    if abs(norm_sq - params.vhat_norm_sq) > 1e-8 * max(1.0, params.vhat_norm_sq):
        raise InternalInconsistency(
            f"|vtilde|^2 = {norm_sq} vs expected {params.vhat_norm_sq}")
    nrm = np.sqrt(norm_sq)
    vhat = np.zeros(n)
    vhat[0] = nrm
    sigma = np.diag(np.concatenate([[params.alpha ** (1 - n)],
                                    np.full(n - 1, params.alpha)]))
    # w = vtilde + |vtilde| e_1 never suffers cancellation (vtilde_1 > 0);
    # the reflection along w sends vtilde to -vhat, the sign flip of the
    # first row fixes both the image and the determinant.
    w = vtilde + vhat
    rho = np.eye(n) - 2.0 * np.outer(w, w) / (w @ w)
    rho[0, :] = -rho[0, :]
    return sigma, rho, vhat


def assemble(point: ReducedPoint, params: ModelParams):
    """Build the full constrained element at a reduced point.

    Returns (LeafFactorization, ConstraintData).  Raises
    SeparationViolation / ChamberViolation for inadmissible points.
    """
    if point.n != params.n:
        raise InternalInconsistency(f"point has n={point.n}, params n={params.n}")
    x, y = params.x, params.y
    n = params.n
    cdata = cartan_from_q(point.q, params)
    Sigma, Gamma, Lambda = cdata.Sigma, cdata.Gamma, cdata.Lambda

    v = solve_v(Sigma, params.alpha)
    Ttilde = build_Ttilde(Sigma, params.alpha, v)
    sigma, rho, vhat = build_sigma_rho(cdata, v, params)
    vtilde = v / Sigma

    phases = np.exp(1j * point.p)
    T = phases[:, None] * Ttilde
    Omega = Lambda[:, None] * T
    omega = (Omega - x ** -1 * np.diag(Gamma)) / Sigma[:, None]
    nu = rho @ ((y ** 2 * np.diag(Gamma).astype(complex)
                 - x ** -1 * Omega.conj().T) / Sigma[:, None])

    eye = np.eye(n)
    k_L = np.block([[rho * Gamma[None, :], rho * Sigma[None, :]],
                    [np.diag(Sigma), np.diag(Gamma)]]).astype(complex)
    b_R = np.block([[x * eye, np.zeros((n, n))],
                    [np.zeros((n, n)), eye / x]]).astype(complex)
    b_R[:n, n:] = omega
    b_L = np.block([[sigma / y, np.zeros((n, n))],
                    [np.zeros((n, n)), y * eye]]).astype(complex)
    b_L[:n, n:] = nu / y
    g = k_L @ b_R
    k_R = np.linalg.solve(b_L, g)

    fact = LeafFactorization(g=g, k_L=k_L, b_R=b_R, b_L=b_L, k_R=k_R)
    data = ConstraintData(cartan=cdata, v=v, vtilde=vtilde, vhat=vhat,
                          Ttilde=Ttilde, phases=phases, T=T, Omega=Omega,
                          omega=omega, nu=nu, rho=rho, sigma=sigma)
    return fact, data


@dataclass(frozen=True)
class ConstraintReport:
    """Named residuals for every invariant of the construction."""

    residuals: dict
    max_residual: float
    tol: float
    ok: bool
    violated: tuple

    def worst(self):
        name = max(self.residuals, key=self.residuals.get)
        return name, self.residuals[name]


def verify_constraints(fact: LeafFactorization, cdata: ConstraintData,
                       params: ModelParams, tol: float = 1e-10) -> ConstraintReport:
    """Residual report for every invariant; a pure report, never raises."""
    n = params.n
    x, y, alpha = params.x, params.y, params.alpha
    J = inn(n)
    Sigma, Gamma, Lambda = cdata.cartan.Sigma, cdata.cartan.Gamma, cdata.cartan.Lambda
    s2 = np.diag(Sigma ** 2)
    T, Ttilde, v = cdata.T, cdata.Ttilde, cdata.v
    sig = cdata.sigma
    ssdag = sig @ sig.conj().T if np.iscomplexobj(sig) else sig @ sig.T

    res = {}
    res["v_nonnegative"] = max(0.0, -float(np.min(v)))
    res["vtilde_norm"] = abs(float(cdata.vtilde @ cdata.vtilde) - params.vhat_norm_sq) \
        / max(1.0, params.vhat_norm_sq)
    res["Ttilde_real"] = frob(np.imag(Ttilde)) if np.iscomplexobj(Ttilde) else 0.0
    res["Ttilde_orthogonal"] = rel_err(np.real(Ttilde).T @ np.real(Ttilde), np.eye(n))
    res["T_constraint"] = rel_err(T.conj().T @ s2 @ T,
                                  alpha ** 2 * s2 + np.outer(v, v))
    res["Omega_polar"] = rel_err(cdata.Omega @ cdata.Omega.conj().T,
                                 np.diag(Lambda ** 2))
    res["kks_element"] = rel_err(ssdag, alpha ** 2 * np.eye(n)
                                 + np.outer(cdata.vhat, cdata.vhat))
    res["sigma_det"] = abs(np.linalg.det(sig) - 1.0)
    res["rho_orthogonal"] = rel_err(np.asarray(cdata.rho).T @ cdata.rho, np.eye(n))
    res["rho_maps_vtilde"] = frob(cdata.rho @ cdata.vtilde - cdata.vhat) \
        / max(1.0, frob(cdata.vhat))
    res["momentum_constraint"] = rel_err(
        T.conj().T @ s2 @ T,
        Sigma[:, None] * (cdata.rho.T @ ssdag @ cdata.rho) * Sigma[None, :])

    g, k_L, k_R, b_L, b_R = fact.g, fact.k_L, fact.k_R, fact.b_L, fact.b_R
    res["leaf_left"] = rel_err(k_L @ b_R, g)
    res["leaf_right"] = rel_err(b_L @ k_R, g)
    res["kL_pseudounitary"] = rel_err(k_L.conj().T @ J @ k_L, J)
    res["kR_pseudounitary"] = rel_err(k_R.conj().T @ J @ k_R, J)

    bR_target = b_R.copy()
    bR_target[:n, :n] = x * np.eye(n)
    bR_target[n:, n:] = np.eye(n) / x
    bR_target[n:, :n] = 0.0
    res["bR_structure"] = rel_err(b_R, bR_target)
    bL_target = b_L.copy()
    bL_target[:n, :n] = sig / y
    bL_target[n:, n:] = y * np.eye(n)
    bL_target[n:, :n] = 0.0
    res["bL_structure"] = rel_err(b_L, bL_target)

    res["g_det"] = abs(np.linalg.det(g) - 1.0)
    gJg = g @ J @ g.conj().T
    res["momentum_block_22"] = rel_err(gJg[n:, n:], -y ** 2 * np.eye(n))
    res["momentum_block_12"] = rel_err(gJg[:n, n:], -cdata.nu)

    max_res = max(res.values())
    violated = tuple(k for k, r in res.items() if r >= tol)
    return ConstraintReport(residuals=res, max_residual=max_res, tol=tol,
                            ok=max_res < tol, violated=violated)
