"""Truncated two-sided representation for cross-validation.

Builds a level-L truncation of the Hilbert space carrying two commuting
isometry families: raw vectors are indexed by (left word, right word, basis
vector of the canonical space), the semi-inner product is assembled from the
prefix rules below, and operators act by word shifts.  Positive
semidefiniteness of the assembled Gram matrix is a hard validity check of
the inner-product rules against the constructed dual operators.

Inner-product rules (forward word products, excess words as suffixes):
with bra (A?, A, f) and ket (B?, B, g), the entry vanishes unless the left
words are prefix-related and the right words are prefix-related; the excess
words E (left) and F (right) contribute the operators w_E (duals) and v_F,
multiplied on the bra or ket side according to where the excess sits.

Truncation policy: compressed operator matrices are exact on interior
vectors (word lengths below the level); all residual checks quantify over
interior vectors only and boundary behavior is reported separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import local_expectation, matrix_unit
from .linalg import dag
from .modular import DualSystem, ModularData
from .systems import InvariantState, KrausSystem, word_operators, words

RAW_DIM_GUARD = 20000
GRAM_KERNEL_TOL = 1e-9
GRAM_NEGATIVITY_HARD = -1e-6


class TruncationError(RuntimeError):
    """Construction failed a structural check."""


def _prefix_excess(shorter, longer):
    """Excess suffix if shorter is a prefix of longer, else None."""
    if longer[: len(shorter)] == shorter:
        return longer[len(shorter):]
    return None


@dataclass(frozen=True)
class TwoSidedRep:
    level: int
    raw_index: tuple = field(repr=False)  # ((left, right, alpha), ...)
    gram: np.ndarray = field(repr=False)
    gram_min_eigenvalue: float
    quotient_map: np.ndarray = field(repr=False)  # (q, N): raw coords -> quotient
    right_ops: np.ndarray = field(repr=False)  # (d, q, q), compressions
    left_ops: np.ndarray = field(repr=False)  # (d, q, q)
    p_corner: np.ndarray = field(repr=False)  # projection onto the K block
    omega: np.ndarray = field(repr=False)
    shift: np.ndarray = field(repr=False)  # V = sum_k S_k Stilde_k*
    interior: np.ndarray = field(repr=False)  # ON basis (q, dim) of interior

    @property
    def quotient_dim(self) -> int:
        return self.quotient_map.shape[0]

    @property
    def d(self) -> int:
        return self.right_ops.shape[0]


def build(md: ModularData, dual: DualSystem, level: int) -> TwoSidedRep:
    """Assemble the level-L truncated two-sided representation."""
    if level < 1:
        raise ValueError("level must be >= 1")
    d = md.pi_ops.shape[0]
    m = md.gns_dim
    word_list = words(d, level)
    nw = len(word_list)
    raw_dim = nw * nw * m
    if raw_dim > RAW_DIM_GUARD:
        raise TruncationError(
            f"raw dimension {raw_dim} exceeds the guard {RAW_DIM_GUARD}"
        )

    vtab = word_operators(md.pi_ops, level + 1)
    wtab = word_operators(dual.ops, level + 1)

    raw_index = tuple(
        (lw, rw, alpha)
        for lw in word_list for rw in word_list for alpha in range(m)
    )
    pos = {idx: k for k, idx in enumerate(raw_index)}
    n_raw = len(raw_index)

    def entry(bra, ket):
        lw_a, rw_a, alpha = bra
        lw_b, rw_b, beta = ket
        # right words
        f_ket = _prefix_excess(rw_a, rw_b)
        f_bra = None if f_ket is not None else _prefix_excess(rw_b, rw_a)
        if f_ket is None and f_bra is None:
            return 0.0
        e_ket = _prefix_excess(lw_a, lw_b)
        e_bra = None if e_ket is not None else _prefix_excess(lw_b, lw_a)
        if e_ket is None and e_bra is None:
            return 0.0
        vf = vtab[f_ket if f_ket is not None else f_bra]
        we = wtab[e_ket if e_ket is not None else e_bra]
        if e_ket is not None and f_ket is not None:
            mat = we @ vf
        elif e_ket is None and f_ket is not None:
            mat = dag(we) @ vf
        elif e_ket is not None and f_ket is None:
            mat = dag(vf) @ we
        else:
            mat = dag(we @ vf)
        return mat[alpha, beta]

    gram = np.empty((n_raw, n_raw), dtype=np.complex128)
    for a, bra in enumerate(raw_index):
        gram[a, a] = entry(bra, bra)
        for b in range(a + 1, n_raw):
            val = entry(bra, raw_index[b])
            gram[a, b] = val
            gram[b, a] = np.conj(val)

    evals, evecs = np.linalg.eigh((gram + dag(gram)) / 2)
    top = max(float(evals[-1]), 1.0)
    if evals[0] < GRAM_NEGATIVITY_HARD * top:
        raise TruncationError(
            f"Gram matrix significantly negative (min eigenvalue {evals[0]:.3e}); "
            "dual construction or convention error"
        )
    keep = evals > GRAM_KERNEL_TOL * top
    lam = evals[keep]
    u = evecs[:, keep]
    w_raw = u / np.sqrt(lam)  # raw coordinates of orthonormal quotient basis
    quotient_map = dag(w_raw) @ gram  # (q, N): raw vector -> quotient coords
    q = quotient_map.shape[0]

    def shifted_column(raw_pos_idx, new_idx):
        """Quotient coords of a raw basis vector shifted to new_idx."""
        if new_idx in pos:
            return quotient_map[:, pos[new_idx]]
        col = np.array([entry(bra, new_idx) for bra in raw_index])
        return dag(w_raw) @ col

    # Compressed operators against the orthonormal quotient basis:
    # column i of S_a is Q(S_a w_i) with w_i = sum_j w_raw[j, i] raw_j.
    right_ops = np.zeros((d, q, q), dtype=np.complex128)
    left_ops = np.zeros((d, q, q), dtype=np.complex128)
    for k in range(d):
        cols_r = np.zeros((q, n_raw), dtype=np.complex128)
        cols_l = np.zeros((q, n_raw), dtype=np.complex128)
        for jraw, (lw, rw, alpha) in enumerate(raw_index):
            cols_r[:, jraw] = shifted_column(jraw, (lw, (k,) + rw, alpha))
            cols_l[:, jraw] = shifted_column(jraw, ((k,) + lw, rw, alpha))
        right_ops[k] = cols_r @ w_raw
        left_ops[k] = cols_l @ w_raw

    corner = quotient_map[:, [pos[((), (), a)] for a in range(m)]]  # (q, m)
    p_corner = corner @ dag(corner)
    omega = corner @ md.omega

    shift = sum(right_ops[k] @ dag(left_ops[k]) for k in range(d))

    interior_cols = [
        quotient_map[:, pos[idx]]
        for idx in raw_index
        if len(idx[0]) <= level - 1 and len(idx[1]) <= level - 1
    ]
    interior = _orthonormal_columns(np.stack(interior_cols, axis=1))

    return TwoSidedRep(
        level=level,
        raw_index=raw_index,
        gram=gram,
        gram_min_eigenvalue=float(evals[0]),
        quotient_map=quotient_map,
        right_ops=right_ops,
        left_ops=left_ops,
        p_corner=p_corner,
        omega=omega,
        shift=shift,
        interior=interior,
    )


def _orthonormal_columns(cols: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, float(s[0]))))
    return u[:, :rank]


def _domain(rep: TwoSidedRep, max_left: int, max_right: int) -> np.ndarray:
    pos = {idx: k for k, idx in enumerate(rep.raw_index)}
    cols = [
        rep.quotient_map[:, pos[idx]]
        for idx in rep.raw_index
        if len(idx[0]) <= max_left and len(idx[1]) <= max_right
    ]
    return _orthonormal_columns(np.stack(cols, axis=1))


@dataclass(frozen=True)
class RelationReport:
    interior: dict
    boundary: dict

    def max_interior(self) -> float:
        return max(self.interior.values())


def check_relations(rep: TwoSidedRep) -> RelationReport:
    """Isometry, completeness, and commutation residuals.

    Interior residuals are exact statements of the inductive-limit relations
    and must be small; boundary residuals quantify the truncation and are
    reported separately.
    """
    q = rep.quotient_dim
    eye = np.eye(q)
    s = rep.right_ops
    st = rep.left_ops
    d = rep.d

    def residuals(domain):
        out = {}
        out["right_isometry"] = max(
            float(np.linalg.norm((dag(s[i]) @ s[j] - (eye if i == j else 0)) @ domain, ord=2))
            for i in range(d) for j in range(d)
        )
        out["left_isometry"] = max(
            float(np.linalg.norm((dag(st[i]) @ st[j] - (eye if i == j else 0)) @ domain, ord=2))
            for i in range(d) for j in range(d)
        )
        out["right_completeness"] = float(np.linalg.norm(
            (sum(s[k] @ dag(s[k]) for k in range(d)) - eye) @ domain, ord=2))
        out["left_completeness"] = float(np.linalg.norm(
            (sum(st[k] @ dag(st[k]) for k in range(d)) - eye) @ domain, ord=2))
        out["commutation"] = max(
            float(np.linalg.norm((s[i] @ st[j] - st[j] @ s[i]) @ domain, ord=2))
            for i in range(d) for j in range(d)
        )
        out["star_commutation"] = max(
            float(np.linalg.norm((s[i] @ dag(st[j]) - dag(st[j]) @ s[i]) @ domain, ord=2))
            for i in range(d) for j in range(d)
        )
        return out

    interior = residuals(rep.interior)
    boundary = residuals(np.eye(q))
    return RelationReport(interior=interior, boundary=boundary)


def compression_residual(rep: TwoSidedRep) -> float:
    """max_i |S_i* P - P S_i* P| and the same for the left family."""
    p = rep.p_corner
    worst = 0.0
    for ops in (rep.right_ops, rep.left_ops):
        for a in ops:
            worst = max(worst, float(np.linalg.norm(
                dag(a) @ p - p @ dag(a) @ p, ord=2)))
    return worst


def moment_check(rep: TwoSidedRep, sys: KrausSystem, state: InvariantState,
                 window: int) -> float:
    """Two-sided vector-state moments against the chain state.

    Compares <Omega, St_L St_Lb* S_R S_Rb* Omega> with the chain state on
    the matching block of matrix units (left words enter reversed, sites
    running left of the seam).  Returns the max deviation.
    """
    if window > rep.level - 1:
        raise ValueError("window must stay below the truncation level")
    d = rep.d
    rtab = word_operators(rep.right_ops, window)
    ltab = word_operators(rep.left_ops, window)
    omega = rep.omega

    worst = 0.0
    left_pairs = [(a, b) for a in words(d, window) for b in words(d, window)
                  if len(a) == len(b)]
    right_pairs = left_pairs
    for la, lb in left_pairs:
        for ra, rb in right_pairs:
            got = np.conj(omega) @ (
                ltab[la] @ dag(ltab[lb]) @ rtab[ra] @ dag(rtab[rb]) @ omega
            )
            top = la[::-1] + ra
            bot = lb[::-1] + rb
            if top:
                units = [matrix_unit(d, i, j) for i, j in zip(top, bot)]
                want = local_expectation(sys, state, units)
            else:
                want = 1.0
            worst = max(worst, abs(got - want))
    return float(worst)


@dataclass(frozen=True)
class ShiftReport:
    isometry_residual: float
    omega_residual: float
    covariance_residual: float


def shift_check(rep: TwoSidedRep) -> ShiftReport:
    """Unitarity, vacuum invariance, and one-site shift covariance of V.

    Covariance is tested in commutator form V pi(x) = pi(shifted x) V for
    single-site matrix units at the seam, on a domain where all products
    stay inside the truncation.
    """
    v = rep.shift
    q = rep.quotient_dim
    interior = rep.interior
    iso = float(np.linalg.norm((dag(v) @ v - np.eye(q)) @ interior, ord=2))
    omega_res = float(np.linalg.norm(v @ rep.omega - rep.omega))

    dom = _domain(rep, rep.level - 1, rep.level - 2)
    worst = 0.0
    for i in range(rep.d):
        for j in range(rep.d):
            x_left = rep.left_ops[i] @ dag(rep.left_ops[j])
            x_right = rep.right_ops[i] @ dag(rep.right_ops[j])
            worst = max(worst, float(np.linalg.norm(
                (v @ x_left - x_right @ v) @ dom, ord=2)))
    return ShiftReport(isometry_residual=iso, omega_residual=omega_res,
                       covariance_residual=worst)
