"""Finite-dimensional von Neumann algebra computations.

Generated *-algebras, commutants, centers, factor tests, and fixed-point
spaces of Kraus channels, all as :class:`~fcslab.linalg.OperatorSubspace`
values in a fixed ambient matrix space.
"""

from __future__ import annotations

import numpy as np

from .linalg import (
    KERNEL_TOL,
    SUBSPACE_TOL,
    OperatorSubspace,
    as_complex,
    dag,
    orthonormalize_matrices,
    sandwich_super,
    solve_linear_space,
    subspace_intersection,
)


class NotStarClosedError(ValueError):
    """Operation requires a *-closed subspace."""


def generated_algebra(gens, ambient_dim: int,
                      tol: float = KERNEL_TOL) -> OperatorSubspace:
    """Smallest unital *-algebra containing the generators.

    Closure is computed by repeated pairwise products of the current
    orthonormal basis until the span dimension stabilizes; the dimension can
    grow at most ``ambient_dim**2`` times.
    """
    n = ambient_dim
    seed = [np.eye(n, dtype=np.complex128)]
    for g in gens:
        g = as_complex(g)
        seed.append(g)
        seed.append(dag(g))
    basis = orthonormalize_matrices(seed, tol=tol)
    for _ in range(n * n + 1):
        products = [a @ b for a in basis for b in basis]
        new_basis = orthonormalize_matrices(list(basis) + products, tol=tol)
        if new_basis.shape[0] == basis.shape[0]:
            return OperatorSubspace(ambient_dim=n, basis=new_basis)
        basis = new_basis
    raise RuntimeError("algebra closure did not stabilize")  # pragma: no cover


def commutant(space: OperatorSubspace,
              tol: float = KERNEL_TOL) -> OperatorSubspace:
    """Commutant {x : [x, b] = 0 for every basis element b}."""
    if not space.is_star_closed():
        raise NotStarClosedError("commutant requires a *-closed subspace")
    n = space.ambient_dim
    eye = np.eye(n)
    constraints = [
        sandwich_super(b, eye) - sandwich_super(eye, b) for b in space.basis
    ]
    return solve_linear_space(constraints, n, tol=tol)


def center_and_factor(space: OperatorSubspace, tol: float = SUBSPACE_TOL):
    """Center of a *-closed algebra and whether it is a factor."""
    c = commutant(space)
    center = subspace_intersection(space, c)
    is_factor = center.dim == 1
    return center, is_factor


def channel_super(kraus) -> np.ndarray:
    """Superoperator matrix of ``x -> sum_k a_k x a_k*`` on vec(x)."""
    kraus = [as_complex(a) for a in kraus]
    return sum(sandwich_super(a, dag(a)) for a in kraus)


def predual_super(kraus) -> np.ndarray:
    """Superoperator matrix of the predual ``rho -> sum_k a_k* rho a_k``."""
    kraus = [as_complex(a) for a in kraus]
    return sum(sandwich_super(dag(a), a) for a in kraus)


def channel_fixed_points(kraus, adjoint: bool = False,
                         tol: float = KERNEL_TOL) -> OperatorSubspace:
    """Fixed-point space of a unital Kraus channel (or its adjoint).

    The Kraus family must satisfy ``sum a a* = 1`` (or ``sum a* a = 1`` in
    the adjoint case).  The returned subspace is verified to be *-closed.
    """
    kraus = [as_complex(a) for a in kraus]
    n = kraus[0].shape[0]
    unit = sum(dag(a) @ a for a in kraus) if adjoint else sum(a @ dag(a) for a in kraus)
    defect = float(np.linalg.norm(unit - np.eye(n)))
    if defect > 1e-8 * max(1.0, float(np.linalg.norm(unit))):
        raise ValueError(f"Kraus family is not unital: defect {defect:.3e}")
    super_mat = predual_super(kraus) if adjoint else channel_super(kraus)
    fixed = solve_linear_space([super_mat - np.eye(n * n)], n, tol=tol)
    if not fixed.is_star_closed():
        raise RuntimeError("fixed-point space failed the *-closure check")
    return fixed
