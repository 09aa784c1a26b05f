"""Splitting a Dirac solution into its two projector subsolutions.

Given a (numerical or analytic) solution Psi of gamma^mu pi_mu Psi =
m Psi under a longitudinal potential, the four xi pieces are defined
from the eta components by first-order relations, giving two
subsolutions Psi_(1), Psi_(2) that satisfy three-component equations
equivalent to projected Dirac equations with P4 = diag(1,1,1,0) and
P3 = diag(1,1,0,1); the original solution is recovered as
P4 Psi_(1) + P3 Psi_(2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import ProjectorId
from .errors import ZeroMass, ZeroNorm
from .fields import (BispinorField, comp_norm2, comp_scale, dirac_residual,
                     gamma_pi_apply, pi_spinor_component)
from .lattice import DiffOp, Grid2D, pi_operator
from .potentials import PotentialSpec

__all__ = [
    "PiSpinorMatrix", "build_pi_matrix", "SubsolutionPair", "split",
    "identity_residuals", "SubequationResidual", "subequation_residual",
    "recombine", "dirac_residual",
]


@dataclass(frozen=True)
class PiSpinorMatrix:
    """Spinor-matrix entries of pi as grid operators.

    pi11d = pi0 + pi3 and pi22d = pi0 - pi3 live on the longitudinal
    grid; pi12d = pi1 - i pi2 and pi21d = pi1 + i pi2 on the transverse
    grid.  Lowered-index entries are aliases: pi_11d = pi22d,
    pi_12d = -pi21d, pi_21d = -pi12d, pi_22d = pi11d.
    """
    potential: PotentialSpec
    pi11d: DiffOp
    pi22d: DiffOp
    pi12d: DiffOp
    pi21d: DiffOp

    @property
    def lowered_11d(self) -> DiffOp:
        return self.pi22d

    @property
    def lowered_12d(self) -> DiffOp:
        return -1.0 * self.pi21d

    @property
    def lowered_21d(self) -> DiffOp:
        return -1.0 * self.pi12d

    @property
    def lowered_22d(self) -> DiffOp:
        return self.pi11d


def build_pi_matrix(p: PotentialSpec, longitudinal: Grid2D,
                    transverse: Grid2D) -> PiSpinorMatrix:
    pi0 = pi_operator(0, p, longitudinal)
    pi3 = pi_operator(3, p, longitudinal)
    pi1 = pi_operator(1, p, transverse)
    pi2 = pi_operator(2, p, transverse)
    return PiSpinorMatrix(
        potential=p,
        pi11d=pi0 + pi3,
        pi22d=pi0 - pi3,
        pi12d=pi1 - 1j * pi2,
        pi21d=pi1 + 1j * pi2,
    )


@dataclass
class SubsolutionPair:
    """The split pieces; psi1 carries xi_(1), psi2 carries xi_(2).

    Both bispinors share the source's eta components.  additivity is
    || (xi_(1) + xi_(2)) - xi || / || psi || over both xi slots.
    """
    psi1: BispinorField
    psi2: BispinorField
    m: float
    additivity: float


def split(psi: BispinorField, p: PotentialSpec, m: float) -> SubsolutionPair:
    """Define xi_(i) from the eta components: xi_(1) from eta_1, xi_(2) from eta_2."""
    if m <= 0.0:
        raise ZeroMass("splitting requires m > 0")
    c0, c1, c2, c3 = psi.components
    inv_m = 1.0 / m
    xi1_1 = comp_scale(pi_spinor_component("11d", p, c2), inv_m)
    xi1_2 = comp_scale(pi_spinor_component("21d", p, c2), inv_m)
    xi2_1 = comp_scale(pi_spinor_component("12d", p, c3), inv_m)
    xi2_2 = comp_scale(pi_spinor_component("22d", p, c3), inv_m)
    psi1 = BispinorField([xi1_1, xi1_2, c2, c3])
    psi2 = BispinorField([xi2_1, xi2_2, c2, c3])
    nrm = psi.norm()
    if nrm == 0.0:
        raise ZeroNorm("cannot split a zero field")
    dev2 = (comp_norm2(xi1_1 + xi2_1 + comp_scale(c0, -1.0))
            + comp_norm2(xi1_2 + xi2_2 + comp_scale(c1, -1.0)))
    return SubsolutionPair(psi1=psi1, psi2=psi2, m=m,
                           additivity=float(np.sqrt(dev2)) / nrm)


def identity_residuals(pair: SubsolutionPair, p: PotentialSpec) -> tuple:
    """Residuals of pi21d xi_(1)^1 = pi11d xi_(1)^2 and pi22d xi_(2)^1 = pi12d xi_(2)^2.

    Both vanish exactly when the potential satisfies the commutator
    condition and the source solves the Dirac equation.
    """
    r1_num = pi_spinor_component("21d", p, pair.psi1.components[0]) + \
        comp_scale(pi_spinor_component("11d", p, pair.psi1.components[1]), -1.0)
    r2_num = pi_spinor_component("22d", p, pair.psi2.components[0]) + \
        comp_scale(pi_spinor_component("12d", p, pair.psi2.components[1]), -1.0)
    n1, n2 = pair.psi1.norm(), pair.psi2.norm()
    r1 = np.sqrt(comp_norm2(r1_num)) / n1 if n1 > 0 else 0.0
    r2 = np.sqrt(comp_norm2(r2_num)) / n2 if n2 > 0 else 0.0
    return (float(r1), float(r2))


@dataclass
class SubequationResidual:
    """Residual of gamma^mu pi_mu P Psi = m P Psi, split by projector rows.

    total^2 = projected^2 + identity^2 (orthogonal projector rows).
    The identity part is the (1-P) row, i.e. the first-order identity
    the subsolution must satisfy.
    """
    total: float
    projected: float
    identity: float
    empty: bool = False


def subequation_residual(component: BispinorField, pid: ProjectorId,
                         p: PotentialSpec, m: float) -> SubequationResidual:
    slot = pid.zeroed_slot
    projected_field = component.project(slot)
    nrm = projected_field.norm()
    if nrm == 0.0:
        return SubequationResidual(0.0, 0.0, 0.0, empty=True)
    res = gamma_pi_apply(projected_field, p) - projected_field.scaled(m)
    ident2 = comp_norm2(res.components[slot])
    total2 = sum(comp_norm2(c) for c in res.components)
    return SubequationResidual(
        total=float(np.sqrt(total2)) / nrm,
        projected=float(np.sqrt(max(total2 - ident2, 0.0))) / nrm,
        identity=float(np.sqrt(ident2)) / nrm,
    )


def recombine(pair: SubsolutionPair) -> BispinorField:
    """Psi = P4 Psi_(1) + P3 Psi_(2)."""
    return pair.psi1.project(3) + pair.psi2.project(2)
