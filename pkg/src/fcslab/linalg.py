"""Dense complex linear-algebra substrate.

Hermitian eigenproblems, spectral powers of positive operators, antilinear
operators represented as (matrix, implicit entrywise conjugation) pairs, and
orthonormal subspaces of n x n matrices under the Hilbert-Schmidt inner
product ``<x, y> = Tr(x* y)``.

All inner products are linear in the second slot.  Vectorization of matrices
is row-major throughout: ``vec(A X B) = (A kron B^T) vec(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-9
KERNEL_TOL = 1e-9
SUBSPACE_TOL = 1e-8


class NonHermitianError(ValueError):
    """Input matrix fails the Hermiticity check beyond tolerance."""


class NotPositiveError(ValueError):
    """Input matrix has negative spectrum beyond tolerance."""


def as_complex(a) -> np.ndarray:
    return np.asarray(a, dtype=np.complex128)


def dag(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def herm_eig(h, tol: float = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, u)`` with eigenvalues ``w`` ascending and unitary
    eigenvector columns ``u`` such that ``h = u diag(w) u*``.

    Raises
    ------
    NonHermitianError
        if ``|h - h*|`` exceeds ``tol`` relative to the scale of ``h``.
    """
    h = as_complex(h)
    scale = max(1.0, float(np.linalg.norm(h)))
    residual = float(np.linalg.norm(h - dag(h)))
    if residual > tol * scale:
        raise NonHermitianError(
            f"matrix is not Hermitian: |H - H*| = {residual:.3e} "
            f"(tol {tol:.1e}, scale {scale:.3e})"
        )
    w, u = np.linalg.eigh((h + dag(h)) / 2.0)
    return w, u


def pos_power(p, z, tol: float = DEFAULT_TOL, support_eps: float = 1e-12):
    """Spectral power ``p^z`` of a positive semidefinite matrix.

    Eigenvalues below the support cutoff are treated as zero; the result is
    the spectral calculus on the support.  A negative-real exponent on a
    singular matrix is rejected.
    """
    z = complex(z)
    w, u = herm_eig(p, tol=tol)
    top = max(float(w[-1]), 0.0) if w.size else 0.0
    if w.size and w[0] < -tol * max(1.0, top):
        raise NotPositiveError(f"matrix has negative eigenvalue {w[0]:.3e}")
    cutoff = support_eps * max(1.0, top)
    on_support = w > cutoff
    if z.real < 0 and not bool(on_support.all()):
        raise NotPositiveError(
            "negative-real exponent requested for a singular matrix"
        )
    powered = np.zeros_like(w, dtype=np.complex128)
    wz = np.where(on_support, w, 1.0).astype(np.complex128)
    powered[on_support] = np.exp(z * np.log(wz[on_support]))
    if z == 0:
        powered = on_support.astype(np.complex128)
    return u @ np.diag(powered) @ dag(u)


@dataclass(frozen=True)
class AntilinearOp:
    """Antilinear operator ``xi -> mat . conj(xi)`` in a fixed basis.

    The adjoint, defined through ``<A* eta, xi> = <A xi, eta>``, has matrix
    ``mat^T``.  Composition of two antilinear operators is linear with
    matrix ``mat_A . conj(mat_B)``.
    """

    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", as_complex(self.mat))

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        return self.mat @ np.conj(xi)

    def adjoint(self) -> "AntilinearOp":
        return AntilinearOp(self.mat.T)

    def compose(self, other: "AntilinearOp") -> np.ndarray:
        """A o B for antilinear A, B: a linear operator (plain matrix)."""
        return self.mat @ np.conj(other.mat)

    def after_linear(self, lin: np.ndarray) -> "AntilinearOp":
        """A o L for linear L."""
        return AntilinearOp(self.mat @ np.conj(as_complex(lin)))

    def before_linear(self, lin: np.ndarray) -> "AntilinearOp":
        """L o A for linear L."""
        return AntilinearOp(as_complex(lin) @ self.mat)

    def sandwich(self, lin: np.ndarray) -> np.ndarray:
        """A o L o A for linear L: linear with matrix mat conj(L) conj(mat)."""
        return self.mat @ np.conj(as_complex(lin)) @ np.conj(self.mat)


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).reshape(-1)


def unvec(xi: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(xi).reshape(n, n)


def left_mult_super(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    return np.kron(a, np.eye(n))


def right_mult_super(b: np.ndarray) -> np.ndarray:
    n = b.shape[0]
    return np.kron(np.eye(n), b.T)


def sandwich_super(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of ``x -> a x b``."""
    return np.kron(a, b.T)


def orthonormalize_matrices(mats, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal Hilbert-Schmidt basis of span(mats), shape (k, n, n)."""
    mats = [as_complex(m) for m in mats]
    if not mats:
        return np.zeros((0, 0, 0), dtype=np.complex128)
    n = mats[0].shape[0]
    stacked = np.stack([vec(m) for m in mats])
    u, s, vh = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 1.0)))
    return vh[:rank].reshape(rank, n, n)


@dataclass(frozen=True)
class OperatorSubspace:
    """Linear subspace of n x n matrices with an orthonormal HS basis."""

    ambient_dim: int
    basis: np.ndarray = field(repr=False)  # (k, n, n)

    def __post_init__(self):
        b = as_complex(self.basis)
        if b.ndim != 3:
            b = b.reshape(-1, self.ambient_dim, self.ambient_dim)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def from_matrices(cls, mats, ambient_dim: int, tol: float = KERNEL_TOL):
        basis = orthonormalize_matrices(mats, tol=tol)
        if basis.size == 0:
            basis = np.zeros((0, ambient_dim, ambient_dim), dtype=np.complex128)
        return cls(ambient_dim=ambient_dim, basis=basis)

    def projector(self) -> np.ndarray:
        """Orthogonal projection onto the subspace, acting on vec(x)."""
        n2 = self.ambient_dim**2
        if self.dim == 0:
            return np.zeros((n2, n2), dtype=np.complex128)
        b = self.basis.reshape(self.dim, n2)
        return b.T @ np.conj(b)

    def contains(self, x, tol: float = SUBSPACE_TOL):
        """Membership test; returns (bool, residual norm)."""
        x = as_complex(x)
        xv = vec(x)
        res = xv - self.projector() @ xv
        r = float(np.linalg.norm(res))
        scale = max(1.0, float(np.linalg.norm(xv)))
        return r <= tol * scale, r

    def is_star_closed(self, tol: float = SUBSPACE_TOL) -> bool:
        return all(self.contains(dag(b), tol=tol)[0] for b in self.basis)


def solve_linear_space(constraints, ambient_dim: int,
                       tol: float = KERNEL_TOL) -> OperatorSubspace:
    """Joint kernel of linear maps on n x n matrices.

    Each constraint is an ``n^2 x n^2`` superoperator acting on vec(x).  The
    empty constraint list yields the full matrix space.
    """
    n2 = ambient_dim**2
    constraints = [as_complex(c) for c in constraints]
    if not constraints:
        basis = np.eye(n2, dtype=np.complex128).reshape(n2, ambient_dim, ambient_dim)
        return OperatorSubspace(ambient_dim=ambient_dim, basis=basis)
    stacked = np.vstack(constraints)
    # the stack has at least n^2 rows, so the reduced decomposition still
    # carries the full right-singular basis needed for the kernel
    u, s, vh = np.linalg.svd(stacked, full_matrices=False)
    smax = max(1.0, float(s[0]) if s.size else 1.0)
    rank = int(np.sum(s > tol * smax))
    null = vh[rank:].conj()
    basis = null.reshape(-1, ambient_dim, ambient_dim)
    return OperatorSubspace(ambient_dim=ambient_dim, basis=basis)


def subspace_contains(inner: OperatorSubspace, outer: OperatorSubspace,
                      tol: float = SUBSPACE_TOL):
    """Whether inner is contained in outer; returns (bool, residual)."""
    if inner.ambient_dim != outer.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if inner.dim == 0:
        return True, 0.0
    residual = float(np.linalg.norm(
        (np.eye(inner.ambient_dim**2) - outer.projector()) @ inner.projector(),
        ord=2,
    ))
    return residual <= tol, residual


def subspace_equal(a: OperatorSubspace, b: OperatorSubspace,
                   tol: float = SUBSPACE_TOL):
    """Subspace equality via mutual projections; returns (bool, max angle)."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    _, r_ab = subspace_contains(a, b, tol=tol)
    _, r_ba = subspace_contains(b, a, tol=tol)
    residual = max(r_ab, r_ba)
    max_angle = float(np.arcsin(min(1.0, residual)))
    return residual <= tol, max_angle


def subspace_intersection(a: OperatorSubspace, b: OperatorSubspace,
                          tol: float = KERNEL_TOL) -> OperatorSubspace:
    """Intersection of two subspaces of the same ambient matrix space."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    n2 = a.ambient_dim**2
    eye = np.eye(n2)
    return solve_linear_space(
        [eye - a.projector(), eye - b.projector()], a.ambient_dim, tol=tol
    )
