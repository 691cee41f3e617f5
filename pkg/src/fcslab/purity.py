"""Decision battery: factoriality, ergodicity, spectral mixing, and the
dual-fixed-point purity certificate.

The battery validates a system, finds invariant densities, compresses to the
support, canonicalizes, builds the modular duals, and decides purity by the
finite-dimensional certificate: the fixed points of the dual channel equal
the represented algebra, together with ergodicity of the transfer channel.
The infinite-volume statements this certifies are documented in the report
as certified indirectly; they are never tested directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import algebras, chain, modular, systems
from .linalg import (
    OperatorSubspace,
    solve_linear_space,
    subspace_contains,
    subspace_equal,
)


class InternalConsistencyError(RuntimeError):
    """Two independent tests of the same mathematical fact disagreed."""


def channel_spectrum(sys: systems.KrausSystem):
    """All n^2 eigenvalues of the transfer channel, deterministically sorted."""
    w = np.linalg.eigvals(sys.transfer_super())
    order = np.lexsort((np.round(np.angle(w), 12), -np.round(np.abs(w), 12)))
    return w[order]


def peripheral_eigenvalues(spectrum, tol: float = 1e-8):
    return spectrum[np.abs(np.abs(spectrum) - 1.0) <= tol]


@dataclass(frozen=True)
class ErgodicityResult:
    is_ergodic: bool
    fixed_dim_in_algebra: int
    is_factor: bool
    center_dim: int


def ergodicity(can: systems.CanonicalSystem,
               tol: float = 1e-8) -> ErgodicityResult:
    """Simplicity of eigenvalue 1 of the transfer channel on the algebra.

    Cross-checked against triviality of the center; disagreement between the
    two equivalent tests raises an internal-consistency error.
    """
    m = can.gns_dim
    basis = can.algebra.basis.reshape(can.algebra.dim, m * m)
    super_mat = algebras.channel_super(can.pi_ops)
    restricted = np.conj(basis) @ super_mat @ basis.T
    w = np.linalg.eigvals(restricted)
    fixed_dim = int(np.sum(np.abs(w - 1.0) <= tol))
    simple = fixed_dim == 1

    center, is_factor = algebras.center_and_factor(can.algebra)
    if simple != is_factor:
        raise InternalConsistencyError(
            f"ergodicity test (fixed dim {fixed_dim}) disagrees with factor "
            f"test (center dim {center.dim})"
        )
    return ErgodicityResult(is_ergodic=simple, fixed_dim_in_algebra=fixed_dim,
                            is_factor=is_factor, center_dim=center.dim)


@dataclass(frozen=True)
class MixingResult:
    strongly_mixing: bool
    gap: float


def kolmogorov_proxy(sys: systems.KrausSystem, tol: float = 1e-8) -> MixingResult:
    """Spectral mixing proxy: peripheral spectrum {1} with a simple eigenvalue.

    This forces convergence of channel powers to the invariant functional.
    It is a proxy only: spectral mixing is reported separately from purity
    and the two are never conflated.
    """
    spec = channel_spectrum(sys)
    mods = np.sort(np.abs(spec))[::-1]
    peripheral = peripheral_eigenvalues(spec, tol=tol)
    gap = float(1.0 - (mods[1] if mods.size > 1 else 0.0))
    strongly = peripheral.size == 1 and abs(peripheral[0] - 1.0) <= tol
    return MixingResult(strongly_mixing=bool(strongly), gap=gap)


@dataclass(frozen=True)
class PurityReport:
    validated: bool
    invariant_multiplicity: int
    is_factor: bool | None
    is_ergodic: bool | None
    support_identity_ok: bool | None
    dual_identity_ok: bool | None
    is_pure: bool | None
    purity_reason: str
    channel_spectrum: np.ndarray = field(repr=False)
    mixing_gap: float | None
    strongly_mixing: bool | None
    gauge: chain.GaugeGroup | None
    gns_dim: int | None
    residuals: dict = field(repr=False)
    notes: tuple = ()


_INDIRECT_NOTE = (
    "Infinite-volume equivalents (irreducibility, split commutant equality) "
    "are certified indirectly through the finite-dimensional fixed-point "
    "identities; they are not tested directly."
)


def purity_battery(sys: systems.KrausSystem, tol: float = 1e-9,
                   subspace_tol: float = 1e-8,
                   gauge_cutoff: int = 4) -> PurityReport:
    """Run the full certificate chain on a system.

    With a unique invariant density the purity verdict is the conjunction of
    ergodicity and the dual-fixed-point identity.  With several invariant
    densities ergodicity fails and purity is reported false with the fields
    that presume ergodicity marked not applicable (None).
    """
    residuals: dict = {}
    diag = systems.validate(sys, tol=tol)
    residuals["unitality"] = diag.unit_residual
    if not diag.ok:
        raise systems.ValidationError(
            f"system failed validation: unit residual {diag.unit_residual:.3e}"
        )

    search = systems.invariant_states(sys, tol=tol)
    multiplicity = search.multiplicity
    spectrum = channel_spectrum(sys)
    mixing = kolmogorov_proxy(sys)

    comp_sys, comp_state, _ = systems.compress_to_support(sys, search.mean_state,
                                                          tol=tol)
    can = systems.canonicalize(comp_sys, comp_state, tol=tol)
    erg = ergodicity(can, tol=subspace_tol)

    m = can.gns_dim
    comm = algebras.commutant(can.algebra)
    fix_tau = algebras.channel_fixed_points(can.pi_ops, tol=tol)

    ok_in, r_in = subspace_contains(comm, fix_tau, tol=1e-10)
    residuals["commutant_in_fixed"] = r_in
    ok_support, angle_support = subspace_equal(fix_tau, comm, tol=subspace_tol)
    residuals["support_identity_angle"] = angle_support
    if not ok_support:
        raise InternalConsistencyError(
            "fixed points of the transfer channel differ from the commutant "
            f"after canonicalization (angle {angle_support:.3e}); this is a "
            "bug, not a mathematical outcome"
        )

    gauge = chain.gauge_group(comp_sys, comp_state, length_cutoff=gauge_cutoff,
                              tol=max(tol, 1e-9))

    md = modular.modular_data(can, tol=tol)
    dual = modular.dual_system(md, tol=tol)
    residuals.update({f"dual_{k}": v for k, v in dual.residuals.items()})
    dual_super, dchan_res = modular.dual_channel(md, dual)
    residuals.update(dchan_res)

    fix_dual = solve_linear_space([dual_super - np.eye(m * m)], m, tol=tol)
    ok_alg_in, r_alg_in = subspace_contains(can.algebra, fix_dual, tol=1e-10)
    residuals["algebra_in_dual_fixed"] = r_alg_in
    dual_ok, angle_dual = subspace_equal(fix_dual, can.algebra, tol=subspace_tol)
    residuals["dual_identity_angle"] = angle_dual

    if multiplicity > 1 or not erg.is_ergodic:
        is_pure = False
        reason = "state not extremal/ergodic"
        dual_ok_field = None
    else:
        is_pure = bool(dual_ok and erg.is_ergodic)
        reason = ("dual fixed points equal the algebra" if is_pure
                  else "dual fixed-point space strictly larger than the algebra")
        dual_ok_field = bool(dual_ok)

    return PurityReport(
        validated=True,
        invariant_multiplicity=multiplicity,
        is_factor=erg.is_factor,
        is_ergodic=erg.is_ergodic,
        support_identity_ok=bool(ok_support),
        dual_identity_ok=dual_ok_field,
        is_pure=is_pure,
        purity_reason=reason,
        channel_spectrum=spectrum,
        mixing_gap=mixing.gap,
        strongly_mixing=mixing.strongly_mixing,
        gauge=gauge,
        gns_dim=m,
        residuals=residuals,
        notes=(_INDIRECT_NOTE,),
    )
