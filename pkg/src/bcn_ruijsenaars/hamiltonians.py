"""The commuting Hamiltonian family and its reduced closed form.

On the group, the family is

    Phi_nu(g) = -(1/(2 nu)) tr (g J g^dag J)^nu,    nu = 1, 2, ...

with J = diag(I, -I); these are real and pairwise Poisson-commuting.
On the reduced space the first member has the closed form (Sigma_i =
exp(q_i)):

    Phi_1 = (x^-2 + y^2)/2 sum_i Sigma_i^-2
            - x^-1 sum_i cos(p_i) sqrt(1 + Sigma_i^-2)
              sqrt(x^2 + y^2 Sigma_i^-2)
              prod_{k != i} sqrt((Sigma_k^2/alpha - alpha Sigma_i^2)
                                 (alpha Sigma_k^2 - Sigma_i^2/alpha))
                            / (Sigma_k^2 - Sigma_i^2),

which in the three-constant form reads

    H = a^2 sum_i e^{-2 q_i}
        - sum_i cos(p_i) [1 + (1 + b^2) e^{-2 q_i} + b^2 e^{-4 q_i}]^(1/2)
          prod_{k != i} [1 - c^2 / (4 sinh^2(q_i - q_k))]^(1/2).

The reduced Poisson bracket carries a factor 1/2 (the reduced symplectic
form is 2 sum dp_i ^ dq_i), so {q_i, p_j} = delta_ij / 2 here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NumericalFailure, SeparationViolation
from .model import ModelParams, ReducedPoint
from .matops import inn
from .reconstruction import assemble

__all__ = [
    "phi_trace",
    "hamiltonian_sigma",
    "hamiltonian_q",
    "phi_reduced",
    "grad_hamiltonian",
    "poisson_bracket_fd",
    "fd_gradient",
    "InvolutionReport",
    "involution_report",
    "WeylReport",
    "weyl_check",
    "spectral_invariants",
]


def phi_trace(g, nu: int) -> float:
    """Phi_nu(g) = -(1/(2 nu)) tr (g J g^dag J)^nu.

    The trace is provably real; an imaginary residue above 1e-8 raises
    NumericalFailure, smaller residues are discarded.
    """
    g = np.asarray(g, dtype=complex)
    if not np.all(np.isfinite(g)):
        raise InvalidInput("phi_trace: non-finite input")
    if nu < 1:
        raise InvalidInput("nu must be a positive integer")
    j = inn(g.shape[0] // 2)
    m = g @ j @ g.conj().T @ j
    val = -np.trace(np.linalg.matrix_power(m, nu)) / (2.0 * nu)
    if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        raise NumericalFailure(f"trace has imaginary part {val.imag}")
    return float(val.real)


def _pair_factors_sq(s, alpha: float):
    """Matrix of (s_k/alpha - alpha s_i)(alpha s_k - s_i/alpha)/(s_k - s_i)^2
    over k != i, with s_i = Sigma_i^2; entries on the diagonal are 1."""
    n = s.size
    if n == 1:
        return np.ones((1, 1))
    sk, si = s[None, :], s[:, None]
    diff = sk - si
    if np.any(diff[~np.eye(n, dtype=bool)] == 0.0):
        raise SeparationViolation("coinciding Sigma_i^2: particle collision")
    fac = np.ones((n, n))
    mask = ~np.eye(n, dtype=bool)
    fac[mask] = ((sk / alpha - alpha * si) * (alpha * sk - si / alpha))[mask] \
        / diff[mask] ** 2
    return fac


def hamiltonian_sigma(Sigma, p, params: ModelParams) -> float:
    """Closed form of the reduced Phi_1 in the (Sigma, p) chart.

    The formula depends on Sigma only through Sigma^2, so it is even in
    each Sigma_i and symmetric under simultaneous permutations of the
    (Sigma_i, p_i) pairs; Sigma need not be ordered here.  Raises
    SeparationViolation when a pair radicand is non-positive.
    """
    sigma = np.atleast_1d(np.asarray(Sigma, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any(sigma == 0.0):
        raise InvalidInput("Sigma entries must be non-zero")
    x, y, alpha = params.x, params.y, params.alpha
    s = sigma ** 2
    fac = _pair_factors_sq(s, alpha)
    if np.any(fac <= 0.0):
        raise SeparationViolation("non-positive interaction radicand")
    w = (np.sqrt((1.0 + 1.0 / s) * (x ** 2 + y ** 2 / s)) / x
         * np.prod(np.sqrt(fac), axis=1))
    return float(0.5 * (x ** -2 + y ** 2) * np.sum(1.0 / s)
                 - np.sum(np.cos(p) * w))


def hamiltonian_q(q, p, a2: float, b2: float, c2: float) -> float:
    """Three-constant form of the Hamiltonian in the (q, p) chart."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    u = np.exp(-2.0 * q)
    n = q.size
    bracket = np.sqrt(1.0 + (1.0 + b2) * u + b2 * u ** 2)
    prod = np.ones(n)
    if n > 1:
        d = q[:, None] - q[None, :]
        mask = ~np.eye(n, dtype=bool)
        fac = np.ones((n, n))
        fac[mask] = 1.0 - c2 / (4.0 * np.sinh(d[mask]) ** 2)
        if np.any(fac <= 0.0):
            raise SeparationViolation("non-positive interaction radicand")
        prod = np.prod(np.sqrt(fac), axis=1)
    return float(a2 * np.sum(u) - np.sum(np.cos(p) * bracket * prod))


def phi_reduced(point: ReducedPoint, params: ModelParams, nu: int) -> float:
    """Phi_nu evaluated through the reconstructed group element."""
    fact, _ = assemble(point, params)
    return phi_trace(fact.g, nu)


def grad_hamiltonian(point: ReducedPoint, params: ModelParams):
    """Analytic partials (dPhi1/dq, dPhi1/dp) of the closed form."""
    q, p = point.q, point.p
    x, y, alpha = params.x, params.y, params.alpha
    c2 = (alpha - 1.0 / alpha) ** 2
    n = q.size
    u = np.exp(-2.0 * q)
    b = np.sqrt((1.0 + u) * (x ** 2 + y ** 2 * u)) / x
    db = b * (-u) * (1.0 / (1.0 + u) + y ** 2 / (x ** 2 + y ** 2 * u))

    if n > 1:
        d = q[:, None] - q[None, :]
        mask = ~np.eye(n, dtype=bool)
        f2 = np.ones((n, n))
        f2[mask] = 1.0 - c2 / (4.0 * np.sinh(d[mask]) ** 2)
        if np.any(f2 <= 0.0):
            raise SeparationViolation("non-positive interaction radicand")
        f = np.sqrt(f2)
        # df[i, k] = d f_{ik} / d q_i  (= -d f_{ik} / d q_k)
        df = np.zeros((n, n))
        df[mask] = c2 * np.cosh(d[mask]) / (2.0 * np.sinh(d[mask]) ** 3) \
            / (2.0 * f[mask])
        pi_prod = np.prod(f, axis=1)
    else:
        f = np.ones((1, 1))
        df = np.zeros((1, 1))
        pi_prod = np.ones(1)

    w = b * pi_prod
    dphi_dp = np.sin(p) * w

    cosp = np.cos(p)
    dphi_dq = -(x ** -2 + y ** 2) * u
    # own-coordinate derivative of W_i
    dw_own = db * pi_prod + b * pi_prod * np.sum(
        np.divide(df, f, out=np.zeros_like(df), where=f != 0.0), axis=1)
    dphi_dq = dphi_dq - cosp * dw_own
    if n > 1:
        # cross terms: d W_i / d q_j = -B_i (df[i, j] / f[i, j]) Pi_i
        cross = -(b * pi_prod)[:, None] * np.divide(
            df, f, out=np.zeros_like(df), where=f != 0.0)
        dphi_dq = dphi_dq - cosp @ cross
    return dphi_dq, dphi_dp


def fd_gradient(func, point: ReducedPoint, params: ModelParams, h0: float = None):
    """Central-difference gradient with one Richardson step (h0, h0/2).

    `func(point, params) -> float`.  Returns (df_dq, df_dp).  Stencil
    evaluation failures (e.g. a chamber violation) propagate.
    """
    q, p = point.q, point.p
    if h0 is None:
        h0 = 1e-4 * max(1.0, float(np.max(np.abs(q))), float(np.max(np.abs(p))))

    def diff(build):
        def central(h):
            return (func(build(h), params) - func(build(-h), params)) / (2.0 * h)
        d1, d2 = central(h0), central(h0 / 2.0)
        return (4.0 * d2 - d1) / 3.0

    dq = np.array([diff(lambda h, i=i: ReducedPoint(
        q + h * np.eye(q.size)[i], p)) for i in range(q.size)])
    dp = np.array([diff(lambda h, i=i: ReducedPoint(
        q, p + h * np.eye(p.size)[i])) for i in range(p.size)])
    return dq, dp


def poisson_bracket_fd(f, h, point: ReducedPoint, params: ModelParams,
                       h0: float = None) -> float:
    """{f, h} = (1/2) sum_i (df/dq_i dh/dp_i - df/dp_i dh/dq_i).

    Partials by central differences with Richardson extrapolation; the
    factor 1/2 reflects the factor 2 in the reduced symplectic form.
    """
    fq, fp = fd_gradient(f, point, params, h0)
    hq, hp = fd_gradient(h, point, params, h0)
    return float(0.5 * (fq @ hp - fp @ hq))


@dataclass(frozen=True)
class InvolutionReport:
    """Worst-case |{Phi_mu, Phi_nu}| estimates over a sample of points."""

    orders: tuple
    bracket_matrix: np.ndarray
    fd_steps: tuple
    extrapolation_order: int
    worst_pair: tuple
    max_abs: float

    def to_dict(self) -> dict:
        return {
            "orders": list(self.orders),
            "bracket_matrix": self.bracket_matrix.tolist(),
            "fd_steps": list(self.fd_steps),
            "extrapolation_order": self.extrapolation_order,
            "worst_pair": list(self.worst_pair),
            "max_abs": self.max_abs,
        }


def involution_report(params: ModelParams, point_samples, max_order: int = 3,
                      h0: float = 2.5e-4) -> InvolutionReport:
    """Estimate |{Phi_mu, Phi_nu}| for mu, nu <= max_order on given points.

    The matrix entry [mu-1, nu-1] is the worst absolute bracket over the
    samples.  The default step balances the rapid growth of the higher
    traces near the separation walls (truncation) against rounding in
    the trace evaluation; the steps used are recorded in the report.
    """
    if max_order > 4:
        raise InvalidInput("max_order > 4 is outside the conditioned regime")
    orders = tuple(range(1, max_order + 1))
    mat = np.zeros((max_order, max_order))
    for pt in point_samples:
        grads = {}
        for nu in orders:
            grads[nu] = fd_gradient(
                lambda z, pr, nu=nu: phi_reduced(z, pr, nu), pt, params, h0)
        for a in orders:
            for b in orders:
                if a >= b:
                    continue
                fq, fp = grads[a]
                hq, hp = grads[b]
                val = abs(0.5 * (fq @ hp - fp @ hq))
                mat[a - 1, b - 1] = max(mat[a - 1, b - 1], val)
                mat[b - 1, a - 1] = mat[a - 1, b - 1]
    idx = np.unravel_index(np.argmax(mat), mat.shape)
    return InvolutionReport(orders=orders, bracket_matrix=mat,
                            fd_steps=(h0, h0 / 2.0), extrapolation_order=4,
                            worst_pair=(int(idx[0]) + 1, int(idx[1]) + 1),
                            max_abs=float(mat[idx]))


@dataclass(frozen=True)
class WeylReport:
    """Invariance of the closed form under the signed-permutation orbit."""

    ok: bool
    max_deviation: float
    orbit_size: int


def weyl_check(Sigma, p, params: ModelParams, tol: float = 1e-12) -> WeylReport:
    """Check invariance under all sign flips of Sigma_i and simultaneous
    permutations of the (Sigma_i, p_i) pairs."""
    from itertools import permutations, product

    sigma = np.atleast_1d(np.asarray(Sigma, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    n = sigma.size
    base = hamiltonian_sigma(sigma, p, params)
    scale = max(1.0, abs(base))
    worst = 0.0
    count = 0
    for perm in permutations(range(n)):
        sp, pp = sigma[list(perm)], p[list(perm)]
        for signs in product((1.0, -1.0), repeat=n):
            val = hamiltonian_sigma(np.array(signs) * sp, pp, params)
            worst = max(worst, abs(val - base) / scale)
            count += 1
    return WeylReport(ok=worst <= tol, max_deviation=worst, orbit_size=count)


def spectral_invariants(g) -> np.ndarray:
    """Eigenvalues of g J g^dag J, sorted by real part then imaginary part.

    These are conserved along the exact flow, and
    -(1/(2 nu)) sum_k lambda_k^nu = Phi_nu(g).  Real parts are quantized
    at 1e-9 relative before sorting so that conjugate pairs (whose real
    parts tie exactly) order stably across evaluations.
    """
    g = np.asarray(g, dtype=complex)
    j = inn(g.shape[0] // 2)
    vals = np.linalg.eigvals(g @ j @ g.conj().T @ j)
    scale = max(1.0, float(np.max(np.abs(vals))))
    key = np.round(vals.real / (1e-9 * scale))
    return vals[np.lexsort((vals.imag, key))]
