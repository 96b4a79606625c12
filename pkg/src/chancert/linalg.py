"""Dense complex linear algebra on bipartite-indexed spaces.

Index convention, fixed once for the whole package: a bipartite space with
factor dimensions (d_left, d_right) is indexed row-major, i.e.

    composite = left_index * d_right + right_index

so the left factor is the slow (major) index. This is exactly numpy's
row-major reshape of shape ``(d_left, d_right)``, and it makes
``np.kron(A, B)`` the matrix of ``A (x) B``.

All scalars are complex binary64. All functions are pure and never mutate
their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    EigensolverError,
    NonHermitianError,
    NotPositiveSemidefiniteError,
)

SIDES = ("left", "right")

# Fragility window: a rank decision is fragile when some singular value lies
# within a factor of 10 of the cutoff on either side.
FRAGILITY_FACTOR = 10.0


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative tolerances used by every numerical decision.

    psd_tol      eigenvalue negativity allowance, relative to max(1, lambda_max)
    rank_tol     singular value cutoff, relative to sigma_max * max(dims)
    equality_tol matrix equality, relative Frobenius
    """

    psd_tol: float = 1e-9
    rank_tol: float = 1e-8
    equality_tol: float = 1e-9

    def __post_init__(self):
        for name in ("psd_tol", "rank_tol", "equality_tol"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")

    def to_json(self) -> dict:
        return {
            "psd_tol": self.psd_tol,
            "rank_tol": self.rank_tol,
            "equality_tol": self.equality_tol,
        }


DEFAULT_TOLERANCES = ToleranceConfig()


@dataclass(frozen=True)
class BipartiteLayout:
    """Factor dimensions of a bipartite square matrix."""

    d_left: int
    d_right: int

    def __post_init__(self):
        if self.d_left < 1 or self.d_right < 1:
            raise DimensionMismatchError(
                f"factor dimensions must be positive, got ({self.d_left}, {self.d_right})"
            )

    @property
    def dim(self) -> int:
        return self.d_left * self.d_right


def as_matrix(x) -> np.ndarray:
    """Validate and return ``x`` as a finite 2-d complex array."""
    m = np.asarray(x, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-d matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise DimensionMismatchError("matrix entries must be finite (no NaN/Inf)")
    return m


def _require_layout(x: np.ndarray, layout: BipartiteLayout) -> None:
    if x.shape != (layout.dim, layout.dim):
        raise DimensionMismatchError(
            f"matrix shape {x.shape} does not match layout "
            f"({layout.d_left} x {layout.d_right} = {layout.dim})"
        )


def _require_side(side: str) -> None:
    if side not in SIDES:
        raise DimensionMismatchError(f"side must be one of {SIDES}, got {side!r}")


def frobenius(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def close_frobenius(x: np.ndarray, y: np.ndarray, tol: float) -> bool:
    """Symmetric relative Frobenius comparison: ||x - y|| <= tol * max(||x||, ||y||).

    Scale invariant; two zero matrices compare equal.
    """
    scale = max(frobenius(x), frobenius(y))
    return frobenius(x - y) <= tol * scale


def partial_trace(x, layout: BipartiteLayout, side: str) -> np.ndarray:
    """Trace out one tensor factor of a bipartite square matrix.

    ``side`` names the factor that is traced out: ``side="left"`` returns a
    d_right-dimensional matrix, ``side="right"`` a d_left-dimensional one.
    """
    m = as_matrix(x)
    _require_layout(m, layout)
    _require_side(side)
    m4 = m.reshape(layout.d_left, layout.d_right, layout.d_left, layout.d_right)
    if side == "left":
        return np.trace(m4, axis1=0, axis2=2)
    return np.trace(m4, axis1=1, axis2=3)


def partial_transpose(x, layout: BipartiteLayout, side: str) -> np.ndarray:
    """Transpose one tensor factor in the computational basis. Involutive."""
    m = as_matrix(x)
    _require_layout(m, layout)
    _require_side(side)
    m4 = m.reshape(layout.d_left, layout.d_right, layout.d_left, layout.d_right)
    if side == "left":
        m4 = m4.transpose(2, 1, 0, 3)
    else:
        m4 = m4.transpose(0, 3, 2, 1)
    return m4.reshape(layout.dim, layout.dim)


def hermitian_deviation(x: np.ndarray) -> float:
    """Relative Frobenius distance from the Hermitian part, in [0, ~2]."""
    norm = frobenius(x)
    if norm == 0.0:
        return 0.0
    return frobenius(x - x.conj().T) / norm


def hermitian_eigensystem(
    x, cfg: ToleranceConfig = DEFAULT_TOLERANCES
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(w, v)`` with real ``w`` sorted in descending order and
    orthonormal eigenvector columns ``v`` such that x ~ v @ diag(w) @ v^dagger.

    Raises
    ------
    NonHermitianError
        if ``||x - x^dagger||_F > equality_tol * ||x||_F``.
    EigensolverError
        if the LAPACK solver does not converge.
    """
    m = as_matrix(x)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got {m.shape}")
    if hermitian_deviation(m) > cfg.equality_tol:
        raise NonHermitianError(
            f"matrix is not Hermitian within equality_tol={cfg.equality_tol}"
        )
    try:
        w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigensolverError(str(exc)) from exc
    return w[::-1].copy(), v[:, ::-1].copy()


@dataclass(frozen=True)
class RankDecision:
    """Outcome of a numerical rank decision, with its tolerance gap.

    ``smallest_kept`` and ``largest_discarded`` document the gap around the
    cutoff; either is None when the corresponding side is empty. ``fragile``
    is set when any singular value lies within FRAGILITY_FACTOR of the cutoff.
    """

    rank: int
    cutoff: float
    smallest_kept: float | None
    largest_discarded: float | None
    fragile: bool

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "cutoff": self.cutoff,
            "smallest_kept": self.smallest_kept,
            "largest_discarded": self.largest_discarded,
            "fragile": self.fragile,
        }


def rank_decision(x, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> RankDecision:
    """Numerical rank with audit data.

    Counts singular values above ``rank_tol * sigma_max * max(rows, cols)``.
    The zero matrix has rank 0 and is never fragile.
    """
    m = as_matrix(x)
    sigma = np.linalg.svd(m, compute_uv=False)
    sigma_max = float(sigma[0]) if sigma.size else 0.0
    if sigma_max == 0.0:
        return RankDecision(rank=0, cutoff=0.0, smallest_kept=None,
                            largest_discarded=0.0 if sigma.size else None, fragile=False)
    cutoff = cfg.rank_tol * sigma_max * max(m.shape)
    kept = sigma[sigma > cutoff]
    discarded = sigma[sigma <= cutoff]
    near = (sigma > cutoff / FRAGILITY_FACTOR) & (sigma < cutoff * FRAGILITY_FACTOR)
    return RankDecision(
        rank=int(kept.size),
        cutoff=float(cutoff),
        smallest_kept=float(kept[-1]) if kept.size else None,
        largest_discarded=float(discarded[0]) if discarded.size else None,
        fragile=bool(np.any(near)),
    )


def numerical_rank(x, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    return rank_decision(x, cfg).rank


@dataclass(frozen=True)
class PsdCheck:
    """Spectral record of a PSD test, sufficient to re-derive the verdict."""

    psd: bool
    hermitian: bool
    lambda_min: float
    lambda_max: float
    threshold: float

    def to_json(self) -> dict:
        return {
            "psd": self.psd,
            "hermitian": self.hermitian,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "threshold": self.threshold,
        }


def psd_check(x, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> PsdCheck:
    """PSD test with recorded extremal eigenvalues.

    True iff the matrix is Hermitian within ``equality_tol`` and
    ``lambda_min >= -psd_tol * max(1, lambda_max)``. The max(1, .) floor keeps
    unnormalized Choi matrices and tiny matrices on the same footing.
    """
    m = as_matrix(x)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got {m.shape}")
    hermitian = hermitian_deviation(m) <= cfg.equality_tol
    w = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
    lam_min = float(w[0]) if w.size else 0.0
    lam_max = float(w[-1]) if w.size else 0.0
    threshold = -cfg.psd_tol * max(1.0, lam_max)
    return PsdCheck(
        psd=bool(hermitian and lam_min >= threshold),
        hermitian=bool(hermitian),
        lambda_min=lam_min,
        lambda_max=lam_max,
        threshold=threshold,
    )


def is_psd(x, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    return psd_check(x, cfg).psd


def purify(x, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> tuple[np.ndarray, int]:
    """Purify a PSD matrix into a bipartite vector with a rank-sized environment.

    Returns ``(vec, d_env)`` where ``vec`` lives in C^dim (x) C^d_env with
    composite index ``system * d_env + environment``,
    ``d_env = numerical_rank(x)``, and

        vec = sum_k sqrt(lambda_k) |v_k> (x) |k>

    over the eigenpairs above the rank cutoff. Tracing out the environment
    recovers ``x`` within ``equality_tol * ||x||_F``; the environment marginal
    shares the nonzero spectrum of ``x``.
    """
    m = as_matrix(x)
    if not is_psd(m, cfg):
        raise NotPositiveSemidefiniteError("purify requires a PSD matrix")
    d_env = numerical_rank(m, cfg)
    if d_env == 0:
        # Zero matrix: a zero vector with a one-dimensional environment.
        return np.zeros(m.shape[0], dtype=complex), 1
    w, v = hermitian_eigensystem(m, cfg)
    vec = np.zeros((m.shape[0], d_env), dtype=complex)
    for k in range(d_env):
        vec[:, k] = np.sqrt(max(w[k], 0.0)) * v[:, k]
    return vec.reshape(-1), d_env
