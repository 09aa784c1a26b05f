"""Separation of variables: transverse Pauli eigenproblems and
longitudinal 1+1D Dirac pairs with effective mass.

A separated solution of one branch factors as eta = phi(x0,x3) *
psi(x1,x2) with the partner xi components alpha*psi and phi*beta.
The transverse pair (psi, beta) solves a two-component Pauli
eigenproblem with eigenvalue lambda^2 and is linked by first-order
ladder relations; phi and alpha solve a 1+1D Dirac pair with
effective mass sqrt(m^2 + lambda^2).

Branch conventions
------------------
With H denoting the field-strength combination d2 A1 - d1 A2 of the
stored potential components, branch DOTTED1 uses the Pauli operator
((pi1)^2 + (pi2)^2) sigma0 - q H sigma3, the ladder pair
(pi1 - i pi2) psi = m beta, (pi1 + i pi2) beta = (lambda^2/m) psi, and
the longitudinal pair (pi0 - pi3) phi = meff alpha~,
(pi0 + pi3) alpha~ = meff phi.  Its bispinor slots are
xi1 = phi*beta, xi2 = alpha*psi, eta_2 = phi*psi (a P3-form solution).
Branch DOTTED2 mirrors every sign and populates the eta_1 slot
(a P4-form solution).  This is the unique slot assignment for which a
reconstructed branch satisfies the full Dirac equation with the
spinor-matrix layout pi21d = pi1 + i pi2; for uniform q H > 0 the
DOTTED1 tower then carries the zero mode annihilated by pi1 - i pi2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (ConvergenceFailure, IncompatibleParameters, NonHermitian,
                     TachyonicMode, UnsupportedField, ZeroMass, ZeroNorm)
from .fields import (BispinorField, ConstTransverse, GridLongFactor,
                     PlaneWaveFactor, Term, comp_norm2, comp_scale,
                     pi_spinor_component)
from .lattice import (AxisSpec, ComplexField2D, Deriv, DiffOp, Grid2D, Mult,
                      hermiticity_defect, pi_operator)
from .potentials import PotentialSpec, field_strengths

DENSE_LIMIT = 2500  # per-block dense/iterative switch


class Branch(Enum):
    """dotted1: P3-form (eta_2) branch; dotted2: P4-form (eta_1) branch."""
    DOTTED1 = 1
    DOTTED2 = 2

    @property
    def pauli_sign(self) -> float:
        """Coefficient of q H sigma3 in the Pauli operator."""
        return -1.0 if self is Branch.DOTTED1 else +1.0

    @property
    def first_ladder(self) -> str:
        """Spinor tag of the operator taking psi to m beta."""
        return "12d" if self is Branch.DOTTED1 else "21d"

    @property
    def second_ladder(self) -> str:
        return "21d" if self is Branch.DOTTED1 else "12d"

    @property
    def eta_slot(self) -> int:
        return 3 if self is Branch.DOTTED1 else 2

    @property
    def longitudinal_first(self) -> str:
        """Spinor tag of pi0 -+ pi3 taking phi to meff alpha~."""
        return "22d" if self is Branch.DOTTED1 else "11d"

    @property
    def longitudinal_second(self) -> str:
        return "11d" if self is Branch.DOTTED1 else "22d"


# ---------------------------------------------------------------------------
# transverse Pauli eigenproblem

def _kinetic_op(p: PotentialSpec, grid: Grid2D) -> DiffOp:
    """(pi1)^2 + (pi2)^2 with the Hermitian (symmetrized) advection term.

    pi_j^2 = -d_j^2 + i q (A_j d_j + d_j A_j) + q^2 A_j^2; the averaged
    advection keeps the assembled matrix exactly Hermitian for any real
    potential, not just gauge choices with d_j A_j = 0.
    """
    terms = []
    for mu in (1, 2):
        axis = grid.local_axis(mu)
        terms.append((-1.0, (Deriv(axis, 2),)))
        a = p.A[mu]
        if not a.is_zero() and p.q != 0.0:
            terms.append((1j * p.q, (Mult(a), Deriv(axis, 1))))
            terms.append((1j * p.q, (Deriv(axis, 1), Mult(a))))
            terms.append((p.q ** 2, (Mult(a), Mult(a))))
    return DiffOp(grid, terms)


def pauli_blocks(p: PotentialSpec, grid: Grid2D, branch: Branch):
    """(spin-up, spin-down) blocks L -+ s q H of the Pauli operator."""
    kin = _kinetic_op(p, grid).matrix()
    h_expr = field_strengths(p).H
    hvals = grid.evaluate(h_expr).ravel()
    coupling = sp.diags(p.q * hvals)
    s = branch.pauli_sign
    up = (kin + s * coupling).tocsc()
    down = (kin - s * coupling).tocsc()
    scale = max(float(np.abs(kin.diagonal()).max()), 1.0)
    for blk in (up, down):
        defect = hermiticity_defect(blk)
        if defect > 1e-12 * scale:
            raise NonHermitian(f"Pauli block defect {defect:g} (scale {scale:g})")
    return up, down


def build_pauli_operator(p: PotentialSpec, grid: Grid2D,
                         branch: Branch) -> sp.spmatrix:
    """Full two-component operator, (psi, beta) stacked up/down."""
    up, down = pauli_blocks(p, grid, branch)
    return sp.block_diag([up, down], format="csc")


def transverse_ladders(p: PotentialSpec, grid: Grid2D):
    """(pi1 - i pi2, pi1 + i pi2) as grid operators."""
    pi1 = pi_operator(1, p, grid)
    pi2 = pi_operator(2, p, grid)
    return pi1 - 1j * pi2, pi1 + 1j * pi2


@dataclass
class TransverseMode:
    """One eigenpair of the Pauli operator, canonicalized.

    For modes degenerate across the spin blocks the raw eigenvector
    split is basis-arbitrary, so psi is taken from the spin-up block
    and beta regenerated through the first ladder relation (this
    requires the mass, hence the m argument of solve_transverse).
    Non-degenerate modes keep the eigenvector slots as they are, one
    of them exactly zero.  Normalization: h^2 sum(|psi|^2+|beta|^2)=1.
    """
    lambda2: float
    psi: ComplexField2D
    beta: ComplexField2D
    branch: Branch
    source_block: str          # "up" or "down"
    degenerate: bool
    beta_from: str             # "eigenvector" or "ladder"
    eigen_residual: float


def _block_eigs(matrix, k: int, method: str, tol: float):
    n = matrix.shape[0]
    if k < 1 or k > n:
        raise ConvergenceFailure(f"k={k} out of range for dimension {n}")
    if method == "dense" or (method == "auto" and n <= DENSE_LIMIT):
        vals, vecs = sla.eigh(matrix.toarray(), subset_by_index=[0, k - 1])
        return vals, vecs
    if k >= n - 1:
        raise ConvergenceFailure(
            f"iterative solver needs k < dim-1 (k={k}, dim={n})")
    scale = max(float(np.abs(matrix.diagonal()).max()), 1.0)
    v0 = np.ones(n) / math.sqrt(n)
    try:
        vals, vecs = spla.eigsh(matrix, k=k, sigma=-0.05 * scale, which="LM",
                                v0=v0, tol=tol)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(f"ARPACK did not converge: {exc}") from exc
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def eigensolve_near(matrix, sigma: float, k: int, tol: float = 0.0):
    """Eigenpairs nearest sigma by shift-invert (deterministic start)."""
    n = matrix.shape[0]
    v0 = np.ones(n) / math.sqrt(n)
    try:
        vals, vecs = spla.eigsh(matrix, k=min(k, n - 2), sigma=sigma,
                                which="LM", v0=v0, tol=tol)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(f"ARPACK did not converge: {exc}") from exc
    order = np.argsort(vals)
    return vals[order].real, vecs[:, order]


def solve_transverse(p: PotentialSpec, grid: Grid2D, branch: Branch, k: int,
                     m: float = None, method: str = "auto", tol: float = 0.0,
                     deg_tol: float = None) -> list:
    """k lowest modes of the branch's Pauli operator, ascending.

    The two spin blocks are decoupled, so each block is solved on its
    own and the results merged.  With m given, cross-block degenerate
    modes are canonicalized through the ladder relation; without it
    they are only flagged.
    """
    up, down = pauli_blocks(p, grid, branch)
    vals_u, vecs_u = _block_eigs(up, min(k, up.shape[0]), method, tol)
    vals_d, vecs_d = _block_eigs(down, min(k, down.shape[0]), method, tol)
    merged = [(lam, "up", i) for i, lam in enumerate(vals_u)]
    merged += [(lam, "down", i) for i, lam in enumerate(vals_d)]
    merged.sort(key=lambda t: t[0])
    merged = merged[:k]

    if deg_tol is None:
        hmax = float(np.abs(grid.evaluate(field_strengths(p).H)).max())
        deg_tol = 0.05 * max(1.0, abs(p.q) * hmax)

    dm_op, dp_op = transverse_ladders(p, grid)
    first_op = dm_op if branch is Branch.DOTTED1 else dp_op
    up_norm = max(float(np.abs(up.diagonal()).max()), 1.0)

    modes = []
    for lam, blk, i in merged:
        other = vals_d if blk == "up" else vals_u
        degenerate = bool(other.size) and bool(np.min(np.abs(other - lam)) <= deg_tol)
        vec = (vecs_u if blk == "up" else vecs_d)[:, i]
        fld = ComplexField2D(grid, vec.reshape(grid.shape).astype(complex))
        if blk == "up":
            psi, beta, beta_from = fld, ComplexField2D.zeros(grid), "eigenvector"
        else:
            psi, beta, beta_from = ComplexField2D.zeros(grid), fld, "eigenvector"
        if degenerate and m is not None and blk == "up":
            if m <= 0.0:
                raise ZeroMass("ladder canonicalization requires m > 0")
            beta = first_op.apply(psi) * (1.0 / m)
            beta_from = "ladder"
        # normalize jointly, then re-verify the eigen-residual
        total = math.sqrt(psi.norm() ** 2 + beta.norm() ** 2)
        if total > 0:
            psi = psi * (1.0 / total)
            beta = beta * (1.0 / total)
        ru = up @ psi.values.ravel() - lam * psi.values.ravel()
        rd = down @ beta.values.ravel() - lam * beta.values.ravel()
        resid = math.sqrt(np.sum(np.abs(ru) ** 2) + np.sum(np.abs(rd) ** 2))
        vec_norm = math.sqrt(np.sum(np.abs(psi.values) ** 2)
                             + np.sum(np.abs(beta.values) ** 2))
        eigres = resid / (vec_norm * up_norm) if vec_norm > 0 else 0.0
        modes.append(TransverseMode(
            lambda2=float(lam), psi=psi, beta=beta, branch=branch,
            source_block=blk, degenerate=degenerate, beta_from=beta_from,
            eigen_residual=float(eigres)))
    return modes


@dataclass
class Level:
    """A distinct eigenvalue level: cluster center and multiplicity."""
    center: float
    count: int
    spread: float


def scan_levels(p: PotentialSpec, grid: Grid2D, branch: Branch,
                lam_max: float, lam_min: float = -0.25,
                probe_step: float = 0.5, k_per_probe: int = 25,
                min_multiplicity: int = 5, width: float = None,
                method: str = "auto") -> list:
    """Distinct eigenvalue levels of the Pauli operator in a range.

    Levels are detected as multiplicity clusters: isolated values (box
    edge states and truncation-smeared cluster tails) do not qualify.
    Dense path takes every eigenvalue in range; the iterative path
    sweeps shift-invert probes across the window.
    """
    up, down = pauli_blocks(p, grid, branch)
    if width is None:
        hmax = float(np.abs(grid.evaluate(field_strengths(p).H)).max())
        width = 0.02 * max(1.0, 2.0 * abs(p.q) * hmax)
    found = []
    for blk in (up, down):
        if method == "dense" or (method == "auto" and blk.shape[0] <= DENSE_LIMIT):
            vals = sla.eigh(blk.toarray(), eigvals_only=True)
            found.extend(v for v in vals if lam_min - width <= v <= lam_max + width)
        else:
            for sigma in np.arange(lam_min, lam_max + probe_step, probe_step):
                vals, _ = eigensolve_near(blk, float(sigma), k_per_probe)
                found.extend(v for v in vals if lam_min - width <= v <= lam_max + width)
    found = np.sort(np.asarray(found))
    # dedup values re-found by neighbouring probes
    dedup = []
    for v in found:
        if not dedup or v - dedup[-1] > 1e-8 * max(1.0, abs(v)):
            dedup.append(float(v))
    levels = []
    cluster = []
    for v in dedup + [None]:
        if v is not None and (not cluster or v - cluster[0] <= 2 * width):
            cluster.append(v)
            continue
        if len(cluster) >= min_multiplicity:
            arr = np.asarray(cluster)
            levels.append(Level(center=float(np.median(arr)), count=len(cluster),
                                spread=float(arr.max() - arr.min())))
        cluster = [v] if v is not None else []
    return levels


# ---------------------------------------------------------------------------
# ladder relations and truncation estimate

def _mode_component(fld: ComplexField2D):
    if fld.norm() == 0.0:
        return []
    return [Term(PlaneWaveFactor(1.0, 0.0, 0.0), fld)]


def ladder_residuals(mode: TransverseMode, p: PotentialSpec, m: float) -> tuple:
    """First-order pair residuals (r1, r2) for the mode's branch.

    r1 checks (first ladder) psi = m beta, r2 checks (second ladder)
    beta = (lambda^2/m) psi.  Each is normalized by the larger of its
    two sides, floored at m times the unit mode norm, which keeps the
    pair scale-free and well-defined for annihilated modes.
    """
    if m <= 0.0:
        raise ZeroMass("ladder relations require m > 0")
    dm_op, dp_op = transverse_ladders(p, mode.psi.grid)
    first = dm_op if mode.branch is Branch.DOTTED1 else dp_op
    second = dp_op if mode.branch is Branch.DOTTED1 else dm_op
    beta = mode.beta
    if mode.degenerate and mode.beta_from == "eigenvector" \
            and mode.source_block == "up":
        beta = first.apply(mode.psi) * (1.0 / m)
    f_psi = first.apply(mode.psi)
    num1 = (f_psi - m * beta).norm()
    den1 = max(f_psi.norm(), m * beta.norm(), m)
    s_beta = second.apply(beta)
    num2 = (s_beta - (mode.lambda2 / m) * mode.psi).norm()
    den2 = max(s_beta.norm(), abs(mode.lambda2) / m * mode.psi.norm(), m)
    return (float(num1 / den1), float(num2 / den2))


def truncation_estimate(mode: TransverseMode, p: PotentialSpec) -> float:
    """h^2-scaled derivative-magnitude estimate of the stencil truncation.

    Central differences err as (h^2/6) f''' per first derivative and
    the product-vs-direct second-order assembly as (h^2/4) f'''';
    both are estimated discretely on (psi, beta) and combined with the
    local potential magnitude.  Used as the yardstick for the ladder
    residual bounds.
    """
    grid = mode.psi.grid
    est = 0.0
    for mu in (1, 2):
        axis = grid.local_axis(mu)
        h = (grid.axis_a.h, grid.axis_b.h)[axis]
        d2 = DiffOp(grid, [(1.0, (Deriv(axis, 2),))])
        d1 = DiffOp(grid, [(1.0, (Deriv(axis, 1),))])
        amax = 0.0
        if not p.A[mu].is_zero():
            amax = float(np.abs(grid.evaluate(p.A[mu])).max())
        for fld in (mode.psi, mode.beta):
            if fld.norm() == 0.0:
                continue
            d2f = d2.apply(fld)
            fourth = d2.apply(d2f).norm()
            third = d1.apply(d2f).norm()
            est += (h * h / 4.0) * fourth
            est += (h * h / 3.0) * abs(p.q) * amax * third
    return est / max(1.0, math.sqrt(abs(mode.lambda2)))


# ---------------------------------------------------------------------------
# second-order equation

def second_order_residual(eta, p: PotentialSpec, m: float,
                          branch: Branch) -> float:
    """Residual of the branch's second-order equation on an eta component.

    Built as the spinor-matrix composition (pi22d pi11d - pi12d pi21d
    for the eta_1 branch, pi11d pi22d - pi21d pi12d for eta_2), which
    equals pi_mu pi^mu plus the iqE and qH terms of the branch.
    """
    comp = eta.components[branch.eta_slot] if isinstance(eta, BispinorField) else eta
    n2 = comp_norm2(comp)
    if n2 == 0.0:
        raise ZeroNorm("second-order residual of a zero component")
    if branch is Branch.DOTTED1:
        first = pi_spinor_component("11d", p, pi_spinor_component("22d", p, comp))
        second = pi_spinor_component("21d", p, pi_spinor_component("12d", p, comp))
    else:
        first = pi_spinor_component("22d", p, pi_spinor_component("11d", p, comp))
        second = pi_spinor_component("12d", p, pi_spinor_component("21d", p, comp))
    res = first + comp_scale(second, -1.0) + comp_scale(comp, -m * m)
    return float(np.sqrt(comp_norm2(res) / n2)) / (m * m)


# ---------------------------------------------------------------------------
# effective mass and the longitudinal problem

def effective_mass(m: float, lambda2: float) -> float:
    m2 = m * m + lambda2
    if m2 <= 0.0:
        raise TachyonicMode(f"m^2 + lambda^2 = {m2:g} <= 0")
    return math.sqrt(m2)


def rescale_alpha(alpha_tilde, m: float, lambda2: float):
    """alpha = sqrt(1 + lambda^2/m^2) * alpha~ (exact pointwise scaling)."""
    if m <= 0.0:
        raise ZeroMass("rescaling requires m > 0")
    if m * m + lambda2 <= 0.0:
        raise TachyonicMode(f"m^2 + lambda^2 = {m * m + lambda2:g} <= 0")
    factor = math.sqrt(1.0 + lambda2 / (m * m))
    if hasattr(alpha_tilde, "scaled"):
        return alpha_tilde.scaled(factor)
    return alpha_tilde * factor


@dataclass
class LongitudinalSolution:
    """phi and alpha~ over (x0, x3) for one branch.

    plane-wave kind: phi = exp(-i(p0 x0 - p3 x3)) with p0^2 - p3^2 =
    eff_mass^2; stationary kind: phi = exp(-i eps x0) f(x3) on a grid.
    """
    kind: str
    branch: Branch
    eff_mass: float
    phi: object
    alpha_tilde: object
    p0: float = 0.0
    p3: float = 0.0
    eps: float = 0.0
    residuals: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)


def solve_longitudinal_planewave(eff_mass: float, p3: float, branch: Branch,
                                 sign: int = +1) -> LongitudinalSolution:
    """Free plane-wave solution of the effective-mass 1+1D pair.

    DOTTED1: (pi0 - pi3) phi = meff alpha~, so alpha~ = (p0 - p3)/meff phi;
    DOTTED2 swaps pi0 +- pi3 and gives (p0 + p3)/meff.
    """
    if eff_mass <= 0.0:
        raise TachyonicMode("plane-wave branch needs eff_mass > 0")
    p0 = float(sign) * math.sqrt(eff_mass ** 2 + p3 ** 2)
    if branch is Branch.DOTTED1:
        coef = (p0 - p3) / eff_mass
        r1 = abs((p0 - p3) - eff_mass * coef)
        r2 = abs((p0 + p3) * coef - eff_mass)
    else:
        coef = (p0 + p3) / eff_mass
        r1 = abs((p0 + p3) - eff_mass * coef)
        r2 = abs((p0 - p3) * coef - eff_mass)
    disp = abs(p0 * p0 - p3 * p3 - eff_mass ** 2)
    return LongitudinalSolution(
        kind="plane-wave", branch=branch, eff_mass=eff_mass,
        phi=PlaneWaveFactor(1.0, p0, p3),
        alpha_tilde=PlaneWaveFactor(complex(coef), p0, p3),
        p0=p0, p3=p3,
        residuals={"first_order": r1 / eff_mass, "second_order": r2 / eff_mass,
                   "dispersion": disp})


def _static_profile(expr, axis: AxisSpec):
    if not expr.coords() <= {3}:
        raise UnsupportedField("stationary solver needs x3-only potentials")
    vals = expr.evaluate((None, None, None, axis.points))
    return np.broadcast_to(np.asarray(vals, dtype=float), (axis.n,)).copy()


def solve_longitudinal_stationary(p: PotentialSpec, eff_mass: float,
                                  axis: AxisSpec, k: int, branch: Branch,
                                  imag_tol: float = 1e-8) -> list:
    """k lowest positive-energy stationary modes phi = exp(-i eps x0) f(x3).

    Eliminating alpha~ from the first-order pair gives the quadratic
    pencil (eps - q A0)^2 f = (D^2 + meff^2 -+ i q A0') f with
    D = -i d3 - q A3, which is linearized in companion form; no
    first-derivative-only operator is ever diagonalized, so the
    checkerboard pollution of naively discretized 1D Dirac operators
    cannot appear.  Eigenvalues with a nonreal part above imag_tol are
    discarded and flagged.
    """
    if eff_mass <= 0.0:
        raise TachyonicMode("stationary solver needs eff_mass > 0")
    n, h = axis.n, axis.h
    a0 = _static_profile(p.A[0], axis)
    a0p = _static_profile(p.A[0].diff(3), axis)
    a3 = _static_profile(p.A[3], axis)
    d1 = (np.diag(np.full(n - 1, 1.0), 1) - np.diag(np.full(n - 1, 1.0), -1)) / (2 * h)
    dop = -1j * d1 - p.q * np.diag(a3)
    branch_sign = -1.0 if branch is Branch.DOTTED1 else +1.0
    bmat = (dop @ dop + eff_mass ** 2 * np.eye(n)
            - np.diag((p.q * a0) ** 2)
            + branch_sign * 1j * p.q * np.diag(a0p))
    cmat = 2.0 * p.q * np.diag(a0).astype(complex)
    companion = np.block([[np.zeros((n, n)), np.eye(n)], [bmat, cmat]])
    w, v = sla.eig(companion)
    flags = []
    real = np.abs(w.imag) <= imag_tol * max(1.0, np.abs(w.real).max())
    if not real.all():
        flags.append("complex_pairs_discarded")
    w, v = w[real].real, v[:, real]
    pos = w > 0
    if pos.sum() < k:
        raise ConvergenceFailure(
            f"only {int(pos.sum())} positive-energy modes available, need {k}")
    order = np.argsort(w[pos])[:k]
    out = []
    sign_d = -1.0 if branch is Branch.DOTTED1 else +1.0
    for idx in np.flatnonzero(pos)[order]:
        eps = float(w[idx])
        f = v[:n, idx]
        nf = math.sqrt(h * float(np.sum(np.abs(f) ** 2)))
        f = f / nf
        # first relation: ((eps - qA0) + s D) f = meff g, s = +1 for eta_1
        g = ((eps - p.q * a0) * f + sign_d * (dop @ f)) / eff_mass
        r2 = (eps - p.q * a0) * g - sign_d * (dop @ g) - eff_mass * f
        r2n = math.sqrt(h * float(np.sum(np.abs(r2) ** 2))) / eff_mass
        alg = np.linalg.norm(companion @ v[:, idx] - w[idx] * v[:, idx]) \
            / np.linalg.norm(v[:, idx]) / max(1.0, np.abs(companion).max())
        out.append(LongitudinalSolution(
            kind="stationary", branch=branch, eff_mass=eff_mass,
            phi=GridLongFactor(eps, axis, f.astype(complex)),
            alpha_tilde=GridLongFactor(eps, axis, g.astype(complex)),
            eps=eps,
            residuals={"second_order": float(r2n), "solver": float(alg)},
            flags=list(flags)))
    return out


def stationary_refinement_flags(p: PotentialSpec, eff_mass: float,
                                axis: AxisSpec, k: int, branch: Branch,
                                rel_tol: float = 0.02) -> list:
    """Spurious-mode check: eps values with no partner on a refined grid."""
    coarse = solve_longitudinal_stationary(p, eff_mass, axis, k, branch)
    fine_axis = AxisSpec(axis.min, axis.max, 2 * axis.n + 1)
    fine = solve_longitudinal_stationary(p, eff_mass, fine_axis, k, branch)
    fine_eps = np.asarray([s.eps for s in fine])
    flags = []
    for s in coarse:
        gap = float(np.min(np.abs(fine_eps - s.eps)))
        flags.append(gap > rel_tol * max(1.0, abs(s.eps)))
    return flags


# ---------------------------------------------------------------------------
# reconstruction

@dataclass
class SeparatedSolution:
    """Branch-tagged bundle reconstructing a bispinor.

    The reconstruction maps are eta = phi*psi with xi = alpha*psi and
    phi*beta in the branch's slots, where alpha is the rescaled
    alpha~.
    """
    mode: TransverseMode
    longitudinal: LongitudinalSolution
    m: float
    q: float
    potential: PotentialSpec

    @property
    def alpha(self):
        return rescale_alpha(self.longitudinal.alpha_tilde, self.m,
                             self.mode.lambda2)

    def __post_init__(self):
        meff = effective_mass(self.m, self.mode.lambda2)
        if abs(meff - self.longitudinal.eff_mass) > 1e-9 * max(1.0, meff):
            raise IncompatibleParameters(
                f"longitudinal eff_mass {self.longitudinal.eff_mass:g} vs "
                f"sqrt(m^2+lambda^2) = {meff:g}")
        if self.mode.branch is not self.longitudinal.branch:
            raise IncompatibleParameters("transverse and longitudinal branches differ")


def _branch_components(sep: SeparatedSolution):
    phi, alpha = sep.longitudinal.phi, sep.alpha
    psi, beta = sep.mode.psi, sep.mode.beta
    eta_term = [Term(phi, psi)]
    alpha_term = [Term(alpha, psi)]
    beta_term = [] if beta.norm() == 0.0 else [Term(phi, beta)]
    if sep.mode.branch is Branch.DOTTED1:
        # P3-form: (xi1, xi2, 0, eta_2) = (phi beta, alpha psi, 0, phi psi)
        return [beta_term, alpha_term, [], eta_term]
    # P4-form: (alpha psi, phi beta, phi psi, 0)
    return [alpha_term, beta_term, eta_term, []]


def reconstruct(sep1: SeparatedSolution,
                sep2: SeparatedSolution = None) -> BispinorField:
    """Assemble P4 Psi_(1) + P3 Psi_(2) from up to two separated branches.

    A single branch gives a pure projector-form solution; two branches
    (one per tag) may carry independent separation constants.
    """
    seps = [s for s in (sep1, sep2) if s is not None]
    if not seps:
        return BispinorField.zero()
    if len(seps) == 2:
        a, b = seps
        if a.m != b.m or a.q != b.q or a.potential is not b.potential:
            raise IncompatibleParameters(
                "branches must share mass, charge and potential")
        if a.mode.branch is b.mode.branch:
            raise IncompatibleParameters("need one solution per branch")
    total = BispinorField.zero()
    for sep in seps:
        total = total + BispinorField(_branch_components(sep))
    return total
