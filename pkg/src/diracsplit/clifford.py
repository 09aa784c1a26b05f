"""Exact 4x4 algebra: gamma matrices, projectors, charge conjugation.

Everything here is plain dense complex arithmetic in the spinor (Weyl)
representation, where the four projectors zeroing one bispinor slot
are diagonal.  The covariant projector polynomials are built from
gamma5, gamma0*gamma3 and i*gamma1*gamma2 and stay valid under any
similarity transform of the representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import SingularTransform

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


class ProjectorId(Enum):
    P1 = 1
    P2 = 2
    P3 = 3
    P4 = 4

    @property
    def zeroed_slot(self) -> int:
        """Index of the bispinor slot this projector annihilates (0-based)."""
        return {ProjectorId.P1: 0, ProjectorId.P2: 1,
                ProjectorId.P3: 2, ProjectorId.P4: 3}[self]


@dataclass(frozen=True)
class GammaSet:
    """The four gamma matrices plus gamma5 and the Pauli matrices."""
    gamma: tuple  # (g0, g1, g2, g3), each complex (4, 4)
    gamma5: np.ndarray
    metric: np.ndarray
    pauli: tuple


def build_spinor_rep() -> GammaSet:
    """Gamma matrices with off-diagonal sigma blocks; gamma5 diagonal."""
    z = np.zeros((2, 2), dtype=complex)
    g0 = np.block([[z, PAULI[0]], [PAULI[0], z]])
    gs = [g0] + [np.block([[z, -PAULI[j]], [PAULI[j], z]]) for j in (1, 2, 3)]
    g5 = 1j * gs[0] @ gs[1] @ gs[2] @ gs[3]
    return GammaSet(gamma=tuple(gs), gamma5=g5, metric=METRIC.copy(), pauli=PAULI)


# Sign choices (s5, s03, s12) in P = (3 + s5*g5 + s03*g0 g3 + s12*i g1 g2)/4,
# fixed by requiring diag(1,1,1,0), diag(1,1,0,1), diag(1,0,1,1), diag(0,1,1,1)
# in the spinor representation.
_PROJECTOR_SIGNS = {
    ProjectorId.P1: (-1.0, -1.0, -1.0),
    ProjectorId.P2: (-1.0, +1.0, +1.0),
    ProjectorId.P3: (+1.0, +1.0, -1.0),
    ProjectorId.P4: (+1.0, -1.0, +1.0),
}


def projector(pid: ProjectorId, g: GammaSet) -> np.ndarray:
    """Covariant projector polynomial evaluated in the given representation."""
    s5, s03, s12 = _PROJECTOR_SIGNS[pid]
    eye = np.eye(4, dtype=complex)
    return 0.25 * (3.0 * eye
                   + s5 * g.gamma5
                   + s03 * g.gamma[0] @ g.gamma[3]
                   + s12 * 1j * g.gamma[1] @ g.gamma[2])


def similarity_transform(g: GammaSet, s: np.ndarray,
                         det_tol: float = 1e-12) -> GammaSet:
    """Conjugate the whole set by s: gamma' = s gamma s^-1."""
    s = np.asarray(s, dtype=complex)
    if abs(np.linalg.det(s)) <= det_tol:
        raise SingularTransform("transform matrix is numerically singular")
    sinv = np.linalg.inv(s)
    gs = tuple(s @ gm @ sinv for gm in g.gamma)
    return GammaSet(gamma=gs, gamma5=s @ g.gamma5 @ sinv,
                    metric=g.metric.copy(), pauli=g.pauli)


def anticommutator_defect(g: GammaSet) -> float:
    """max over mu,nu of |{gamma^mu, gamma^nu} - 2 g^{mu nu} I|."""
    eye = np.eye(4, dtype=complex)
    worst = 0.0
    for mu in range(4):
        for nu in range(4):
            d = (g.gamma[mu] @ g.gamma[nu] + g.gamma[nu] @ g.gamma[mu]
                 - 2.0 * g.metric[mu, nu] * eye)
            worst = max(worst, float(np.abs(d).max()))
    return worst


_SPINOR_REP = build_spinor_rep()
_CC_MATRIX = 1j * _SPINOR_REP.gamma[2]


def charge_conjugate(psi: np.ndarray) -> np.ndarray:
    """psi_c = i gamma2 psi*, acting on a 4-component bispinor.

    Applying twice returns +psi exactly in this convention.
    """
    psi = np.asarray(psi, dtype=complex)
    return _CC_MATRIX @ psi.conj()
