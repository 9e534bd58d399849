"""Model parameters, reduced coordinates, and the radial chart.

The model is specified by a deformation parameter ``alpha`` in (0, 1),
two scale parameters ``x, y > 0`` and a particle count ``n``.  Reduced
phase-space points carry strictly decreasing positions ``q`` and angles
``p`` (compared modulo 2*pi).  The radial chart consists of the diagonal
vectors

    Sigma_i = exp(q_i),   Delta_i = asinh(Sigma_i),
    Gamma_i = cosh(Delta_i) = sqrt(1 + Sigma_i^2),
    Lambda_i = sqrt(y^2 + x^2 Sigma_i^2).

The standard three-constant form of the Hamiltonian corresponds to

    a^2 = (x^-2 + y^2)/2,   b^2 = y^2/x^2,   c^2 = (alpha - 1/alpha)^2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ChamberViolation, InvalidInput

__all__ = [
    "ModelParams",
    "ReducedPoint",
    "CartanData",
    "SeparationReport",
    "make_params",
    "cartan_from_q",
    "check_separation",
    "abc_from_params",
    "params_from_abc",
    "wrap_angle",
]


def wrap_angle(p):
    """Reduce angles to the half-open interval (-pi, pi]."""
    r = np.mod(np.asarray(p, dtype=float), 2.0 * np.pi)
    return np.where(r > np.pi, r - 2.0 * np.pi, r)


@dataclass(frozen=True)
class ModelParams:
    """Coupling data.  Use :func:`make_params` to construct.

    ``alpha`` is normalized into (0, 1) (the model is invariant under
    alpha -> 1/alpha), ``epsilon`` is +1 in this normalization, and
    ``vhat_norm_sq = alpha^(2-2n) - alpha^2 > 0`` is the squared length of
    the rank-one deformation vector of the reference momentum value.
    """

    alpha: float
    x: float
    y: float
    n: int
    epsilon: int = 1
    vhat_norm_sq: float = 0.0

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "x": self.x, "y": self.y, "n": self.n}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_dict(d: dict) -> "ModelParams":
        return make_params(d["alpha"], d["x"], d["y"], d["n"])

    @staticmethod
    def from_json(s: str) -> "ModelParams":
        return ModelParams.from_dict(json.loads(s))


def make_params(alpha: float, x: float, y: float, n: int) -> ModelParams:
    """Validate and normalize (alpha, x, y, n) into a ModelParams record."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise InvalidInput(f"n must be a positive integer, got {n!r}")
    alpha, x, y = float(alpha), float(x), float(y)
    if not (alpha > 0.0) or alpha == 1.0:
        raise InvalidInput("alpha must be positive and different from 1")
    if not (x > 0.0 and y > 0.0):
        raise InvalidInput("x and y must be positive")
    if alpha > 1.0:
        alpha = 1.0 / alpha
    vhat_norm_sq = alpha ** (2 - 2 * n) - alpha ** 2
    return ModelParams(alpha=alpha, x=x, y=y, n=int(n),
                       epsilon=1, vhat_norm_sq=vhat_norm_sq)


@dataclass(frozen=True)
class ReducedPoint:
    """Canonical coordinates (q, p) with q strictly decreasing.

    p is stored as given (unwrapped); comparisons are made modulo 2*pi.
    """

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise InvalidInput(f"q and p must be 1-d of equal length, got {q.shape}, {p.shape}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise InvalidInput("q and p must be finite")
        if q.size > 1 and not np.all(np.diff(q) < 0.0):
            raise ChamberViolation(f"q must be strictly decreasing, got {q}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.size

    def to_dict(self) -> dict:
        return {"q": self.q.tolist(), "p": self.p.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_dict(d: dict) -> "ReducedPoint":
        return ReducedPoint(q=np.asarray(d["q"], dtype=float),
                            p=np.asarray(d["p"], dtype=float))

    @staticmethod
    def from_json(s: str) -> "ReducedPoint":
        return ReducedPoint.from_dict(json.loads(s))


@dataclass(frozen=True)
class CartanData:
    """Radial chart derived from q (plus x, y for Lambda)."""

    Delta: np.ndarray
    Sigma: np.ndarray
    Gamma: np.ndarray
    Lambda: np.ndarray


def cartan_from_q(q, params: ModelParams) -> CartanData:
    """Radial chart at positions q; raises ChamberViolation if q unordered."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if q.size > 1 and not np.all(np.diff(q) < 0.0):
        raise ChamberViolation(f"q must be strictly decreasing, got {q}")
    sigma = np.exp(q)
    return CartanData(
        Delta=np.arcsinh(sigma),
        Sigma=sigma,
        Gamma=np.sqrt(1.0 + sigma ** 2),
        Lambda=np.sqrt(params.y ** 2 + params.x ** 2 * sigma ** 2),
    )


@dataclass(frozen=True)
class SeparationReport:
    """Outcome of the pairwise separation check."""

    ok: bool
    coupling_sq: float                    # (alpha - 1/alpha)^2
    margins: np.ndarray = field(repr=False)  # 4 sinh^2(q_i - q_k) - coupling_sq, i < k
    min_margin: float = math.inf


def check_separation(point: ReducedPoint, params: ModelParams) -> SeparationReport:
    """Check 4 sinh^2(q_i - q_k) > (alpha - 1/alpha)^2 for every pair i != k."""
    q = point.q
    c2 = (params.alpha - 1.0 / params.alpha) ** 2
    if q.size < 2:
        return SeparationReport(ok=True, coupling_sq=c2,
                                margins=np.empty(0), min_margin=math.inf)
    diffs = q[:, None] - q[None, :]
    iu = np.triu_indices(q.size, k=1)
    margins = 4.0 * np.sinh(diffs[iu]) ** 2 - c2
    return SeparationReport(ok=bool(np.all(margins > 0.0)), coupling_sq=c2,
                            margins=margins, min_margin=float(np.min(margins)))


def abc_from_params(params: ModelParams):
    """Map (alpha, x, y) to the three positive constants (a^2, b^2, c^2)."""
    a2 = (params.x ** -2 + params.y ** 2) / 2.0
    b2 = params.y ** 2 / params.x ** 2
    c2 = (params.alpha - 1.0 / params.alpha) ** 2
    return a2, b2, c2


def params_from_abc(a2: float, b2: float, c2: float, n: int) -> ModelParams:
    """Invert :func:`abc_from_params`.

    Two (x, y) pairs map to each admissible (a^2, b^2), related by
    (x, y) -> (1/y, 1/x); the branch with x*y >= 1 is returned.  alpha is
    returned on its alpha < 1 branch.  Raises InvalidInput for a
    non-positive triple or a negative discriminant a^4 - b^2.
    """
    if not (a2 > 0.0 and b2 > 0.0 and c2 > 0.0):
        raise InvalidInput("a^2, b^2, c^2 must all be positive")
    disc = a2 * a2 - b2
    if disc < 0.0:
        raise InvalidInput("inconsistent triple: a^4 - b^2 is negative")
    # b2*u^2 - 2*a2*u + 1 = 0 with u = x^2; the '+' root is the x*y >= 1 branch
    u = (a2 + math.sqrt(disc)) / b2
    x = math.sqrt(u)
    y = math.sqrt(b2) * x
    c = math.sqrt(c2)
    alpha = (-c + math.sqrt(c2 + 4.0)) / 2.0
    return make_params(alpha, x, y, n)
