"""Kraus systems generating translation-invariant chain states.

A :class:`KrausSystem` is a family ``v_1 .. v_d`` of operators on C^n with
``sum_k v_k v_k* = 1``.  This module validates systems, finds invariant
densities of the transfer channel, compresses onto the support of an
invariant density, and canonicalizes onto the GNS space of the generated
algebra, where the cyclic vector is also separating.

Word convention (frozen after numerical validation, see README): for a word
``I = (i_1, .., i_m)`` the operator is the forward product
``v_I = v_{i_1} v_{i_2} ... v_{i_m}``, and the chain state on consecutive
matrix units is ``omega(e^{i_1}_{j_1} x ... x e^{i_m}_{j_m}) = phi(v_I v_J*)``.
This is the unique ordering consistent with the nested evaluation map of the
chain state; the reversed convention is exposed for comparison through the
``reverse`` flag of :func:`moment_table`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as _iproduct

import numpy as np
import scipy.linalg

from . import algebras
from .linalg import (
    DEFAULT_TOL,
    OperatorSubspace,
    as_complex,
    dag,
    herm_eig,
    vec,
    unvec,
)


class ValidationError(ValueError):
    """System data violates a structural invariant."""


@dataclass(frozen=True)
class KrausSystem:
    """Operators v_1..v_d on C^n with sum v_k v_k* = 1."""

    ops: np.ndarray = field(repr=False)  # (d, n, n)

    def __post_init__(self):
        ops = as_complex(self.ops)
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2]:
            raise ValidationError("ops must be a list of square matrices of equal shape")
        object.__setattr__(self, "ops", ops)

    @property
    def n(self) -> int:
        return self.ops.shape[1]

    @property
    def d(self) -> int:
        return self.ops.shape[0]

    def unit_defect(self) -> float:
        total = sum(a @ dag(a) for a in self.ops)
        return float(np.linalg.norm(total - np.eye(self.n), ord=2))

    def transfer(self, x: np.ndarray) -> np.ndarray:
        """tau(x) = sum_k v_k x v_k*."""
        x = as_complex(x)
        return np.einsum("kij,jl,kml->im", self.ops, x, np.conj(self.ops))

    def transfer_super(self) -> np.ndarray:
        return algebras.channel_super(self.ops)

    def predual_super(self) -> np.ndarray:
        return algebras.predual_super(self.ops)


@dataclass(frozen=True)
class SystemDiagnostics:
    unit_residual: float
    op_norms: tuple
    ok: bool
    tol: float


def validate(sys: KrausSystem, tol: float = DEFAULT_TOL) -> SystemDiagnostics:
    """Check sum v v* = 1 and report per-operator norms."""
    residual = sys.unit_defect()
    norms = tuple(float(np.linalg.norm(a, ord=2)) for a in sys.ops)
    return SystemDiagnostics(
        unit_residual=residual, op_norms=norms, ok=residual <= tol, tol=tol
    )


@dataclass(frozen=True)
class InvariantState:
    """Density matrix rho with sum v_k* rho v_k = rho."""

    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rho", as_complex(self.rho))

    def check(self, sys: KrausSystem, tol: float = 1e-10) -> None:
        r = self.rho
        if np.linalg.norm(r - dag(r)) > tol * 10:
            raise ValidationError("density is not Hermitian")
        w = np.linalg.eigvalsh((r + dag(r)) / 2)
        if w[0] < -tol:
            raise ValidationError(f"density has negative eigenvalue {w[0]:.3e}")
        if abs(np.trace(r) - 1.0) > 1e-8:
            raise ValidationError("density trace differs from 1")
        flow = sum(dag(a) @ r @ a for a in sys.ops)
        if np.linalg.norm(flow - r) > max(tol, 1e-10):
            raise ValidationError("density is not invariant under the predual channel")


@dataclass(frozen=True)
class InvariantSearch:
    multiplicity: int
    mean_state: InvariantState
    extreme_states: tuple  # tuple of InvariantState


def _peripheral_projection(super_mat: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Oblique spectral projection onto the eigenvalue-1 cluster."""
    w, vl, vr = scipy.linalg.eig(super_mat, left=True, right=True)
    idx = np.abs(w - 1.0) <= tol
    if not idx.any():
        raise ValidationError("channel has no fixed point (eigenvalue 1 missing)")
    r1 = vr[:, idx]
    l1 = vl[:, idx]
    overlap = dag(l1) @ r1
    return r1 @ np.linalg.solve(overlap, dag(l1))


def invariant_states(sys: KrausSystem, tol: float = DEFAULT_TOL) -> InvariantSearch:
    """Invariant densities of the predual channel.

    The multiplicity is the dimension of the fixed space of the predual.
    The mean state is the ergodic (Cesaro) image of the maximally mixed
    state; it is invariant and has maximal support among invariant
    densities, which makes it the right input for support compression.
    Extreme states are extracted heuristically by diagonalizing a generic
    Hermitian element of the fixed space.
    """
    n = sys.n
    pre = sys.predual_super()
    fixed = _fixed_space(pre, n, tol)
    multiplicity = fixed.shape[0]

    proj = _peripheral_projection(pre)
    rho_bar = unvec(proj @ vec(np.eye(n) / n), n)
    rho_bar = (rho_bar + dag(rho_bar)) / 2
    rho_bar = rho_bar / np.trace(rho_bar).real
    mean = InvariantState(rho_bar)
    mean.check(sys, tol=max(tol, 1e-10))

    if multiplicity == 1:
        extremes = (mean,)
    else:
        extremes = _extreme_states(sys, fixed, rho_bar, tol)
    return InvariantSearch(multiplicity=multiplicity, mean_state=mean,
                           extreme_states=extremes)


def _fixed_space(super_mat: np.ndarray, n: int, tol: float) -> np.ndarray:
    u, s, vh = np.linalg.svd(super_mat - np.eye(n * n))
    smax = max(1.0, float(s[0]))
    rank = int(np.sum(s > tol * smax))
    return vh[rank:].conj().reshape(-1, n, n)


def _extreme_states(sys, fixed, rho_bar, tol):
    """Split rho_bar along spectral projections of a generic fixed element."""
    n = sys.n
    herms = []
    for m in fixed:
        herms.append((m + dag(m)) / 2)
        herms.append((m - dag(m)) / 2j)
    generic = sum((k + 1) * h for k, h in enumerate(herms))
    w, u = herm_eig(generic, tol=1e-7)
    # group eigenvalues into clusters to get spectral projections
    clusters = []
    for i, lam in enumerate(w):
        if clusters and abs(lam - w[clusters[-1][-1]]) < 1e-7 * max(1.0, abs(lam)):
            clusters[-1].append(i)
        else:
            clusters.append([i])
    states = []
    for cluster in clusters:
        p = sum(np.outer(u[:, i], np.conj(u[:, i])) for i in cluster)
        cand = p @ rho_bar @ p
        tr = np.trace(cand).real
        if tr < 1e-12:
            continue
        cand = (cand + dag(cand)) / (2 * tr)
        try:
            state = InvariantState(cand)
            state.check(sys, tol=max(tol, 1e-8))
        except ValidationError:
            continue
        states.append(state)
    if not states:
        states = [InvariantState(rho_bar)]
    return tuple(states)


def compress_to_support(sys: KrausSystem, state: InvariantState,
                        tol: float = DEFAULT_TOL):
    """Restrict the system to the support of an invariant density.

    Returns ``(sys', state', isometry)`` where the isometry embeds the
    support back into the original space.  On the compressed space the
    Kraus family is again unital and the density strictly positive.
    """
    state.check(sys, tol=max(tol, 1e-9))
    w, u = herm_eig(state.rho, tol=1e-8)
    keep = w > 1e-10 * max(1.0, float(w[-1]))
    iso = u[:, keep]  # (n, r)
    ops = np.stack([dag(iso) @ a @ iso for a in sys.ops])
    sys2 = KrausSystem(ops)
    rho2 = dag(iso) @ state.rho @ iso
    rho2 = (rho2 + dag(rho2)) / 2
    rho2 = rho2 / np.trace(rho2).real
    defect = sys2.unit_defect()
    if defect > 1e-9:
        raise ValidationError(
            f"support compression broke unitality (defect {defect:.3e}); "
            "the input density was not invariant"
        )
    state2 = InvariantState(rho2)
    state2.check(sys2, tol=1e-9)
    return sys2, state2, iso


@dataclass(frozen=True)
class CanonicalSystem:
    """System carried to the GNS space of (algebra, phi).

    ``basis_mats`` are the GNS orthonormal basis elements as matrices on the
    original space, ``pi_ops`` the images of the Kraus family, ``omega`` the
    cyclic vector (class of the identity), and ``algebra`` the image of the
    generated algebra inside the GNS matrix space.
    """

    base: KrausSystem
    state: InvariantState
    pi_ops: np.ndarray = field(repr=False)  # (d, m, m)
    omega: np.ndarray = field(repr=False)  # (m,)
    algebra: OperatorSubspace = field(repr=False)
    basis_mats: np.ndarray = field(repr=False)  # (m, n, n)

    @property
    def gns_dim(self) -> int:
        return self.pi_ops.shape[1]

    def phi_vector(self, x: np.ndarray) -> complex:
        """<Omega, x Omega> for an operator x on the GNS space."""
        return complex(np.conj(self.omega) @ (as_complex(x) @ self.omega))

    def represent(self, x: np.ndarray) -> np.ndarray:
        """Matrix of left multiplication by x on the GNS space."""
        return _pi_matrix(self.state.rho, self.basis_mats, as_complex(x))


def _pi_matrix(rho, c, x):
    """pi(x)[i, j] = Tr(rho c_i* x c_j) for a GNS-orthonormal basis c."""
    return np.einsum("pq,irq,rs,jsp->ij", rho, np.conj(c), x, c)


def canonicalize(sys: KrausSystem, state: InvariantState,
                 tol: float = DEFAULT_TOL) -> CanonicalSystem:
    """GNS construction for the generated algebra with phi = Tr(rho .).

    Requires a strictly positive invariant density (run
    :func:`compress_to_support` first); a singular Gram matrix signals a
    support bug upstream and is rejected.
    """
    n = sys.n
    rho = state.rho
    alg = algebras.generated_algebra(list(sys.ops), n)
    b = alg.basis  # (m, n, n), HS-orthonormal
    m = b.shape[0]
    gram = np.einsum("pq,arq,brp->ab", rho, np.conj(b), b)
    gram = (gram + dag(gram)) / 2
    w, u = herm_eig(gram, tol=1e-8)
    if w[0] <= tol * max(1.0, float(w[-1])):
        raise ValidationError(
            f"state is not faithful on the generated algebra "
            f"(Gram eigenvalue {w[0]:.3e}); compress to the support first"
        )
    weights = u @ np.diag(w**-0.5)  # columns: new basis coefficients
    c = np.einsum("ab,aij->bij", weights, b)  # (m, n, n) GNS-orthonormal
    can_basis = c

    def phi(x):
        return np.trace(rho @ x)

    pi_ops = np.stack([_pi_matrix(rho, c, a) for a in sys.ops])
    omega = np.array([phi(dag(ci)) for ci in c])
    pi_basis = [_pi_matrix(rho, c, x) for x in c]
    algebra = OperatorSubspace.from_matrices(pi_basis, ambient_dim=m)
    return CanonicalSystem(
        base=sys, state=state, pi_ops=pi_ops, omega=omega,
        algebra=algebra, basis_mats=can_basis,
    )


# ---------------------------------------------------------------------------
# Word moments

def words(d: int, max_len: int, min_len: int = 0):
    """All words over {0..d-1} with min_len <= length <= max_len."""
    out = []
    for length in range(min_len, max_len + 1):
        out.extend(_iproduct(range(d), repeat=length))
    return out


def word_operator(ops, word) -> np.ndarray:
    """Forward product v_{i_1} ... v_{i_m}; empty word gives the identity."""
    ops = as_complex(ops)
    m = np.eye(ops.shape[1], dtype=np.complex128)
    for k in word:
        m = m @ ops[k]
    return m


def word_operators(ops, max_len: int):
    """Dict word -> forward product, for all words up to max_len."""
    ops = as_complex(ops)
    n = ops.shape[1]
    table = {(): np.eye(n, dtype=np.complex128)}
    frontier = [()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            base = table[w]
            for k in range(ops.shape[0]):
                neww = w + (k,)
                table[neww] = base @ ops[k]
                nxt.append(neww)
        frontier = nxt
    return table


def moment_table(sys: KrausSystem, state: InvariantState, max_len: int,
                 reverse: bool = False):
    """All moments phi(v_I v_J*) for |I|, |J| <= max_len.

    With ``reverse=True`` the words are read in the reversed order
    (``v_I = v_{i_m} ... v_{i_1}``), exposed for convention validation.
    """
    ws = words(sys.d, max_len)
    table = word_operators(sys.ops, max_len)
    stack = np.stack([table[w[::-1]] if reverse else table[w] for w in ws])
    weighted = np.einsum("pq,aqr->apr", state.rho, stack).reshape(len(ws), -1)
    flat = np.conj(stack.reshape(len(ws), -1))
    vals = weighted @ flat.T  # vals[a, b] = Tr(rho W_a W_b^dag)
    return ws, vals
