"""Numerical linear-algebra kernel.

Rank decisions, null spaces, subspace algebra, orthogonal projectors, and
minimum-norm least squares.  Every feasibility question elsewhere in the
package ("does a vector exist such that ...") reduces to a call into this
module, so the thresholding conventions live here and nowhere else:

* rank decisions count singular values above ``rank_rel`` times the largest
  singular value;
* linear systems are called feasible when the least-squares residual is at
  most ``residual_rel * max(1, ||rhs||)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFinite, RankDeficient

__all__ = [
    "Tol",
    "SubspaceBasis",
    "numerical_rank",
    "null_space",
    "orth_columns",
    "intersect",
    "projector",
    "solve_min_norm",
    "feasible",
]


@dataclass(frozen=True)
class Tol:
    """Tolerance knobs used by every numerical decision.

    Parameters
    ----------
    rank_rel : float
        Relative singular-value cutoff for rank decisions.
    residual_rel : float
        Relative residual cutoff for feasibility decisions.
    """

    rank_rel: float = 1e-10
    residual_rel: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("rank_rel", "residual_rel"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ValueError(f"{name} must lie strictly between 0 and 1, got {v}")


DEFAULT_TOL = Tol()


def _as_matrix(m, name: str = "matrix") -> np.ndarray:
    a = np.atleast_2d(np.asarray(m, dtype=float))
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be two-dimensional, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or infinite entries")
    return a


@dataclass(frozen=True)
class SubspaceBasis:
    """A subspace of real coordinate space, stored as an orthonormal basis.

    Attributes
    ----------
    ambient_dim : int
        Dimension of the surrounding space.
    basis : numpy.ndarray
        ``ambient_dim x dim`` matrix with orthonormal columns.  ``dim == 0``
        encodes the zero subspace.
    """

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self) -> None:
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise DimensionMismatch(
                f"basis shape {b.shape} does not match ambient dim {self.ambient_dim}"
            )
        if b.shape[1]:
            gram = b.T @ b
            if np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e-10:
                raise ValueError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, n: int) -> "SubspaceBasis":
        return cls(n, np.zeros((n, 0)))

    @classmethod
    def full(cls, n: int) -> "SubspaceBasis":
        return cls(n, np.eye(n))

    def project(self, v: np.ndarray) -> np.ndarray:
        """Orthogonal projection of ``v`` onto the subspace."""
        v = np.asarray(v, dtype=float)
        if self.dim == 0:
            return np.zeros_like(v)
        return self.basis @ (self.basis.T @ v)

    def residual_outside(self, v: np.ndarray) -> float:
        """2-norm of the component of ``v`` orthogonal to the subspace."""
        v = np.asarray(v, dtype=float)
        return float(np.linalg.norm(v - self.project(v)))

    def contains(self, v: np.ndarray, tol: Tol = DEFAULT_TOL) -> bool:
        """Thresholded membership test, relative to ``max(1, ||v||)``."""
        v = np.asarray(v, dtype=float)
        return self.residual_outside(v) <= tol.residual_rel * max(1.0, float(np.linalg.norm(v)))


def numerical_rank(m, tol: Tol = DEFAULT_TOL) -> int:
    """Number of singular values above ``rank_rel`` times the largest one.

    The zero matrix has rank 0 by convention.
    """
    a = _as_matrix(m)
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    smax = sv[0] if sv.size else 0.0
    if smax == 0.0:
        return 0
    return int(np.sum(sv > tol.rank_rel * smax))


def null_space(m, tol: Tol = DEFAULT_TOL, scale_floor: float = 0.0) -> SubspaceBasis:
    """Orthonormal basis of ``{x : m @ x = 0}``.

    Parameters
    ----------
    m : array_like
        Matrix whose kernel is wanted.  A matrix with zero rows has the full
        space as its kernel.
    tol : Tol
        Rank threshold.
    scale_floor : float
        Lower bound applied to the largest singular value before the relative
        cutoff is formed.  Matrices that are structurally tiny (for example
        differences of projectors, whose entries are pure rounding noise when
        the true difference is zero) need their threshold anchored at the
        natural scale of the construction rather than at the noise level.

    Returns
    -------
    SubspaceBasis
        Kernel basis with ``dim == cols - numerical_rank(m)`` whenever
        ``scale_floor`` is 0.
    """
    a = _as_matrix(m)
    rows, cols = a.shape
    if rows == 0 or not a.size:
        return SubspaceBasis.full(cols)
    _, sv, vh = np.linalg.svd(a)
    smax = max(sv[0] if sv.size else 0.0, scale_floor)
    if smax == 0.0:
        return SubspaceBasis.full(cols)
    r = int(np.sum(sv > tol.rank_rel * smax))
    return SubspaceBasis(cols, vh[r:].T.copy())


def orth_columns(m, tol: Tol = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of the column span of ``m``."""
    a = _as_matrix(m)
    if a.shape[1] == 0:
        return SubspaceBasis.zero(a.shape[0])
    u, sv, _ = np.linalg.svd(a, full_matrices=False)
    smax = sv[0] if sv.size else 0.0
    if smax == 0.0:
        return SubspaceBasis.zero(a.shape[0])
    r = int(np.sum(sv > tol.rank_rel * smax))
    return SubspaceBasis(a.shape[0], u[:, :r].copy())


def intersect(a: SubspaceBasis, b: SubspaceBasis, tol: Tol = DEFAULT_TOL) -> SubspaceBasis:
    """Intersection of two subspaces given by orthonormal bases.

    Computed as the kernel of the stacked complement projectors
    ``[I - aa^T; I - bb^T]``.  That stack has entries of order one whenever
    either complement is nontrivial, so its rank threshold is anchored at 1;
    the degenerate full/zero operands short-circuit before the stack is
    formed.

    Raises
    ------
    DimensionMismatch
        If the ambient dimensions differ.
    """
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(
            f"ambient dims differ: {a.ambient_dim} vs {b.ambient_dim}"
        )
    n = a.ambient_dim
    if a.dim == 0 or b.dim == 0:
        return SubspaceBasis.zero(n)
    if a.dim == n:
        return b
    if b.dim == n:
        return a
    pa = np.eye(n) - a.basis @ a.basis.T
    pb = np.eye(n) - b.basis @ b.basis.T
    ker = null_space(np.vstack([pa, pb]), tol, scale_floor=1.0)
    return ker


def projector(k, tol: Tol = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the column range of ``k``.

    Equal to ``k (k^T k)^{-1} k^T`` for full-column-rank ``k``; realized
    through an orthonormal factor for numerical symmetry.

    Raises
    ------
    RankDeficient
        If ``k`` loses column rank at the tolerance.
    """
    a = _as_matrix(k)
    r = numerical_rank(a, tol)
    if r < a.shape[1]:
        raise RankDeficient(
            f"matrix has numerical rank {r} < {a.shape[1]} columns"
        )
    q = orth_columns(a, tol)
    return q.basis @ q.basis.T


def solve_min_norm(m, rhs, tol: Tol = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Minimum-norm least-squares solution of ``m @ x = rhs``.

    Returns
    -------
    (solution, residual_norm)
        ``solution`` is the minimum-norm minimizer; ``residual_norm`` is
        ``||m @ solution - rhs||``.  A matrix with zero columns yields the
        empty solution and residual ``||rhs||``.
    """
    a = _as_matrix(m)
    r = np.asarray(rhs, dtype=float).reshape(-1)
    if not np.all(np.isfinite(r)):
        raise NonFinite("right-hand side contains NaN or infinite entries")
    if a.shape[0] != r.shape[0]:
        raise DimensionMismatch(f"matrix rows {a.shape[0]} != rhs length {r.shape[0]}")
    if a.shape[1] == 0:
        return np.zeros(0), float(np.linalg.norm(r))
    x, _, _, _ = np.linalg.lstsq(a, r, rcond=tol.rank_rel)
    return x, float(np.linalg.norm(a @ x - r))


def feasible(residual_norm: float, rhs_norm: float, tol: Tol = DEFAULT_TOL) -> bool:
    """Scale-aware feasibility decision for a linear system."""
    return residual_norm <= tol.residual_rel * max(1.0, rhs_norm)
