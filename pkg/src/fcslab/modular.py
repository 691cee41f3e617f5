"""Modular data on the GNS space and the dual Kraus family.

Given a canonical system (cyclic and separating vector Omega), this module
builds the closure S of ``x Omega -> x* Omega``, its polar decomposition
``S = J Delta^{1/2}``, the modular group ``sigma_z(x) = Delta^{iz} x
Delta^{-iz}``, and the dual operators ``w_k = J sigma_{i/2}(pi(v_k)*) J``
living in the commutant.  Every identity the duals must satisfy is checked
numerically; a failed identity aborts the construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import algebras
from .linalg import (
    DEFAULT_TOL,
    AntilinearOp,
    as_complex,
    dag,
    pos_power,
)
from .systems import CanonicalSystem, word_operators


class ModularError(RuntimeError):
    """A modular-theoretic identity failed beyond tolerance."""


class DualConstructionError(ModularError):
    """A diagnostic identity for the dual operators failed."""


@dataclass(frozen=True)
class ModularData:
    can: CanonicalSystem
    s: AntilinearOp = field(repr=False)
    delta: np.ndarray = field(repr=False)
    j: AntilinearOp = field(repr=False)
    residuals: dict = field(repr=False)

    @property
    def gns_dim(self) -> int:
        return self.can.gns_dim

    @property
    def pi_ops(self) -> np.ndarray:
        return self.can.pi_ops

    @property
    def omega(self) -> np.ndarray:
        return self.can.omega


def modular_data(can: CanonicalSystem, tol: float = DEFAULT_TOL) -> ModularData:
    """Tomita data (S, Delta, J) for the canonical system."""
    c = can.basis_mats
    m = can.gns_dim
    rho = can.state.rho

    # S e_j = coordinates of c_j*; coordinates of x are <c_i, x>_phi.
    s_mat = np.empty((m, m), dtype=np.complex128)
    for jcol in range(m):
        target = dag(c[jcol])
        s_mat[:, jcol] = np.einsum("pq,irq,rp->i", rho, np.conj(c), target)
    s = AntilinearOp(s_mat)

    delta = s.adjoint().compose(s)  # linear, = mat_S^T conj(mat_S)
    delta = (delta + dag(delta)) / 2
    d_half = pos_power(delta, 0.5)
    d_minus_half = pos_power(delta, -0.5)
    j = s.after_linear(d_minus_half)  # J = S o Delta^{-1/2}

    omega = can.omega
    eye = np.eye(m)
    residuals = {
        "s_omega": float(np.linalg.norm(s(omega) - omega)),
        "delta_omega": float(np.linalg.norm(delta @ omega - omega)),
        "j_omega": float(np.linalg.norm(j(omega) - omega)),
        "j_squared": float(np.linalg.norm(j.compose(j) - eye)),
        "j_antiunitary": float(np.linalg.norm(j.mat @ dag(j.mat) - eye)),
        "jdj": float(np.linalg.norm(
            j.sandwich(delta) - pos_power(delta, -1.0))),
        "polar": float(np.linalg.norm(
            j.after_linear(d_half).mat - s.mat)),
    }
    # S reproduces x -> x* on pi(M) Omega
    conj_res = 0.0
    for ci in c:
        lhs = s(can.represent(ci) @ omega)
        rhs = can.represent(dag(ci)) @ omega
        conj_res = max(conj_res, float(np.linalg.norm(lhs - rhs)))
    residuals["conjugation"] = conj_res

    bad = {k: v for k, v in residuals.items() if v > max(tol, 1e-9) * 10}
    if bad:
        raise ModularError(f"modular identities failed: {bad}")
    return ModularData(can=can, s=s, delta=delta, j=j, residuals=residuals)


def sigma(md: ModularData, x: np.ndarray, z: complex,
          tol: float = DEFAULT_TOL) -> np.ndarray:
    """Modular flow sigma_z(x) = Delta^{iz} x Delta^{-iz} at complex time z.

    The input must lie in the represented algebra.
    """
    x = as_complex(x)
    ok, res = md.can.algebra.contains(x)
    if not ok:
        raise ModularError(f"operator is outside the algebra (residual {res:.3e})")
    iz = 1j * complex(z)
    return pos_power(md.delta, iz) @ x @ pos_power(md.delta, -iz)


def _sigma_i_half(md: ModularData, x: np.ndarray) -> np.ndarray:
    """Analytic continuation sigma_{i/2}(x) = Delta^{-1/2} x Delta^{1/2}."""
    return pos_power(md.delta, -0.5) @ as_complex(x) @ pos_power(md.delta, 0.5)


@dataclass(frozen=True)
class DualSystem:
    ops: np.ndarray = field(repr=False)  # (d, m, m)
    residuals: dict = field(repr=False)


def dual_diagnostics(md: ModularData, duals: np.ndarray, word_len: int = 3,
                     moment_len: int = 4) -> dict:
    """Residuals of the identities a candidate dual family must satisfy.

    Checked identities:
      (i)   each w_k commutes with the represented algebra,
      (ii)  sum_k w_k w_k* = 1,
      (iii) w_I* Omega = pi(v)_{reversed I}* Omega for |I| <= word_len,
      (iv)  moment duality <Omega, pi(v)_I pi(v)_J* Omega> =
            <Omega, w_{rev I} w_{rev J}* Omega> for |I|, |J| <= moment_len.
    """
    pi_ops = md.pi_ops
    m = md.gns_dim
    residuals = {}
    residuals["commutant_membership"] = max(
        float(np.linalg.norm(w @ b - b @ w))
        for w in duals for b in md.can.algebra.basis
    )
    residuals["dual_unitality"] = float(np.linalg.norm(
        sum(w @ dag(w) for w in duals) - np.eye(m)
    ))

    omega = md.omega
    max_len = max(word_len, moment_len)
    vtab = word_operators(pi_ops, max_len)
    wtab = word_operators(duals, max_len)

    res_words = 0.0
    for word, wop in wtab.items():
        if 1 <= len(word) <= word_len:
            lhs = dag(wop) @ omega
            rhs = dag(vtab[word[::-1]]) @ omega
            res_words = max(res_words, float(np.linalg.norm(lhs - rhs)))
    residuals["dual_word_vectors"] = res_words

    ws = [w for w in vtab if len(w) <= moment_len]
    a_vecs = np.stack([dag(vtab[w]) @ omega for w in ws])
    b_vecs = np.stack([dag(wtab[w[::-1]]) @ omega for w in ws])
    lhs = np.conj(a_vecs) @ a_vecs.T  # <Omega, V_I V_J* Omega>
    rhs = np.conj(b_vecs) @ b_vecs.T
    residuals["moment_duality"] = float(np.max(np.abs(lhs - rhs)))
    return residuals


def dual_system(md: ModularData, word_len: int = 3, moment_len: int = 4,
                tol: float = DEFAULT_TOL) -> DualSystem:
    """Dual operators w_k = J sigma_{i/2}(pi(v_k)*) J with full diagnostics.

    Every identity listed in dual_diagnostics is checked; a failure raises
    DualConstructionError.
    """
    duals = np.stack(
        [md.j.sandwich(_sigma_i_half(md, dag(a))) for a in md.pi_ops])
    residuals = dual_diagnostics(md, duals, word_len, moment_len)
    bad = {k: v for k, v in residuals.items() if v > max(tol, 1e-9) * 10}
    if bad:
        raise DualConstructionError(f"dual diagnostics failed: {bad}")
    return DualSystem(ops=duals, residuals=residuals)


def dual_channel(md: ModularData, dual: DualSystem,
                 tol: float = DEFAULT_TOL):
    """Superoperator of y -> sum_k w_k y w_k* plus the duality residual.

    The duality <y Omega, tau(x) Omega> = <tau~(y) Omega, x Omega> is
    verified over basis pairs x in the algebra, y in its commutant.
    """
    duals = dual.ops
    super_mat = algebras.channel_super(duals)
    m = md.gns_dim
    unital = float(np.linalg.norm(
        sum(w @ dag(w) for w in duals) - np.eye(m)))

    omega = md.omega
    comm = algebras.commutant(md.can.algebra)
    res = 0.0
    for x in md.can.algebra.basis:
        tx = sum(a @ x @ dag(a) for a in md.pi_ops)
        for y in comm.basis:
            ty = sum(w @ y @ dag(w) for w in duals)
            lhs = np.conj(y @ omega) @ (tx @ omega)
            rhs = np.conj(ty @ omega) @ (x @ omega)
            res = max(res, abs(lhs - rhs))
    if res > max(tol, 1e-9) * 10:
        raise DualConstructionError(
            f"channel duality failed (residual {res:.3e})")
    return super_mat, {"dual_unitality": unital, "kms_duality": float(res)}
