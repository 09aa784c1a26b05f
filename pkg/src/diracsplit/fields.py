"""Factored bispinor fields.

Separated solutions factor into (longitudinal factor) x (transverse
factor); storing components as sums of such products avoids 4D arrays
entirely.  Longitudinal factors are either exact plane waves in
(x0, x3) or a sampled x3 profile with an exp(-i eps x0) time factor;
transverse factors are either spatially constant or a ComplexField2D.
The minimally coupled momenta act factor-wise: pi0/pi3 touch the
longitudinal factor, pi1/pi2 the transverse one, and a potential
component multiplies whichever factor hosts its coordinates (which is
also what lets deliberately invalid potentials like A1 = x3 be applied
for negative controls).

Inner products between plane-wave factors are per unit longitudinal
volume, with distinct momenta orthogonal; grid-backed factors integrate
over their box.  A single bispinor must stick to one longitudinal and
one transverse representation, which every constructor here guarantees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, UnsupportedField, ZeroNorm
from .expressions import Expression
from .lattice import AxisSpec, ComplexField2D, Grid2D, _apply_deriv
from .potentials import PotentialSpec

_MOMENTUM_TOL = 1e-12


# ---------------------------------------------------------------------------
# longitudinal factors

@dataclass(frozen=True)
class PlaneWaveFactor:
    """coef * exp(-i (p0 x0 - p3 x3))."""
    coef: complex
    p0: float
    p3: float

    def scaled(self, c) -> "PlaneWaveFactor":
        return PlaneWaveFactor(self.coef * c, self.p0, self.p3)

    def conj(self) -> "PlaneWaveFactor":
        return PlaneWaveFactor(np.conj(self.coef), -self.p0, -self.p3)

    def at(self, x0: float, x3: float) -> complex:
        return self.coef * np.exp(-1j * (self.p0 * x0 - self.p3 * x3))


@dataclass(frozen=True)
class GridLongFactor:
    """exp(-i eps x0) * f(x3) with f sampled on interior points of axis."""
    eps: float
    axis: AxisSpec
    values: np.ndarray

    def scaled(self, c) -> "GridLongFactor":
        return GridLongFactor(self.eps, self.axis, self.values * c)

    def conj(self) -> "GridLongFactor":
        return GridLongFactor(-self.eps, self.axis, self.values.conj())

    def at(self, x0: float, x3: float) -> complex:
        idx = int(np.argmin(np.abs(self.axis.points - x3)))
        return np.exp(-1j * self.eps * x0) * self.values[idx]


def materialize_plane_wave(factor: PlaneWaveFactor, axis: AxisSpec) -> GridLongFactor:
    """Sample the x3 dependence of a plane wave on a grid axis."""
    vals = factor.coef * np.exp(1j * factor.p3 * axis.points)
    return GridLongFactor(eps=factor.p0, axis=axis, values=vals.astype(complex))


def _lon_deriv(lon, mu: int):
    """Apply i d0 (mu=0) or -i d3 (mu=3), staying in the factor's form."""
    if isinstance(lon, PlaneWaveFactor):
        return lon.scaled(lon.p0 if mu == 0 else lon.p3)
    if mu == 0:
        return lon.scaled(lon.eps)
    d = np.zeros_like(lon.values)
    h = lon.axis.h
    d[1:-1] = (lon.values[2:] - lon.values[:-2]) / (2 * h)
    d[0] += lon.values[1] / (2 * h)
    d[-1] -= lon.values[-2] / (2 * h)
    return GridLongFactor(lon.eps, lon.axis, -1j * d)


def _lon_mult(lon, expr: Expression, scale: complex):
    """Multiply by scale * expr(x0, x3)."""
    if expr.is_const():
        return lon.scaled(scale * expr.evaluate((0.0, 0.0, 0.0, 0.0)))
    if isinstance(lon, PlaneWaveFactor):
        raise UnsupportedField(
            "non-constant longitudinal multiplier on an exact plane wave; "
            "materialize onto an x3 grid first")
    if 0 in expr.coords():
        raise UnsupportedField("x0-dependent multiplier on a stationary profile")
    vals = expr.evaluate((None, None, None, lon.axis.points))
    vals = np.broadcast_to(np.asarray(vals, dtype=float), lon.values.shape)
    return GridLongFactor(lon.eps, lon.axis, scale * vals * lon.values)


def _lon_inner(a, b) -> complex:
    if isinstance(a, PlaneWaveFactor) != isinstance(b, PlaneWaveFactor):
        raise UnsupportedField("mixed plane-wave / grid longitudinal factors")
    if isinstance(a, PlaneWaveFactor):
        if abs(a.p0 - b.p0) > _MOMENTUM_TOL or abs(a.p3 - b.p3) > _MOMENTUM_TOL:
            return 0.0 + 0.0j  # distinct momenta, orthogonal per unit volume
        return np.conj(a.coef) * b.coef
    if abs(a.eps - b.eps) > _MOMENTUM_TOL:
        return 0.0 + 0.0j
    if a.axis != b.axis:
        raise GridMismatch("longitudinal factors on different axes")
    return complex(a.axis.h * np.sum(a.values.conj() * b.values))


# ---------------------------------------------------------------------------
# transverse factors

@dataclass(frozen=True)
class ConstTransverse:
    """Spatially constant transverse factor (free / analytic mode)."""
    coef: complex

    def scaled(self, c) -> "ConstTransverse":
        return ConstTransverse(self.coef * c)

    def conj(self) -> "ConstTransverse":
        return ConstTransverse(np.conj(self.coef))


def _tr_deriv(tr, mu: int):
    """Apply -i d_mu transversally; None means identically zero."""
    if isinstance(tr, ConstTransverse):
        return None
    axis = tr.grid.local_axis(mu)
    h = (tr.grid.axis_a.h, tr.grid.axis_b.h)[axis]
    return ComplexField2D(tr.grid, -1j * _apply_deriv(tr.values, axis, 1, h))


def _tr_mult(tr, expr: Expression, scale: complex):
    if expr.is_const():
        c = scale * expr.evaluate((0.0, 0.0, 0.0, 0.0))
        return tr.scaled(c) if isinstance(tr, ConstTransverse) \
            else ComplexField2D(tr.grid, c * tr.values)
    if isinstance(tr, ConstTransverse):
        raise UnsupportedField(
            "non-constant transverse multiplier needs a grid-backed factor")
    return ComplexField2D(tr.grid, scale * tr.grid.evaluate(expr) * tr.values)


def _tr_conj(tr):
    if isinstance(tr, ConstTransverse):
        return tr.conj()
    return ComplexField2D(tr.grid, tr.values.conj())


def _tr_scaled(tr, c):
    if isinstance(tr, ConstTransverse):
        return tr.scaled(c)
    return ComplexField2D(tr.grid, tr.values * c)


def _tr_inner(a, b) -> complex:
    if isinstance(a, ConstTransverse) != isinstance(b, ConstTransverse):
        raise UnsupportedField("mixed constant / grid transverse factors")
    if isinstance(a, ConstTransverse):
        return np.conj(a.coef) * b.coef  # per unit transverse area
    return a.inner(b)


# ---------------------------------------------------------------------------
# components: sums of factored terms

@dataclass(frozen=True)
class Term:
    lon: object
    tr: object


def term_inner(a: Term, b: Term) -> complex:
    return _lon_inner(a.lon, b.lon) * _tr_inner(a.tr, b.tr)


def comp_compact(comp):
    """Merge terms sharing a longitudinal key.

    Residual expressions produce sums of O(1) terms that cancel; taking
    norms through the Gram sum would then lose the cancellation to
    roundoff of the largest term.  Merging first makes coefficients
    (or transverse arrays) cancel pointwise, so exact zeros stay at
    machine scale.  Terms that cannot be merged (grid-profile
    longitudinal factor times grid transverse factor) pass through.
    """
    pw_const = {}
    pw_field = {}
    gl_const = {}
    rest = []
    for t in comp:
        lon, tr = t.lon, t.tr
        if isinstance(lon, PlaneWaveFactor) and isinstance(tr, ConstTransverse):
            key = (lon.p0, lon.p3)
            pw_const[key] = pw_const.get(key, 0.0 + 0.0j) + lon.coef * tr.coef
        elif isinstance(lon, PlaneWaveFactor):
            key = (lon.p0, lon.p3, tr.grid)
            add = lon.coef * tr.values
            pw_field[key] = add if key not in pw_field else pw_field[key] + add
        elif isinstance(tr, ConstTransverse):
            key = (lon.eps, lon.axis)
            add = tr.coef * lon.values
            gl_const[key] = add if key not in gl_const else gl_const[key] + add
        else:
            rest.append(t)
    out = []
    for (p0, p3), c in pw_const.items():
        out.append(Term(PlaneWaveFactor(c, p0, p3), ConstTransverse(1.0)))
    for (p0, p3, grid), vals in pw_field.items():
        out.append(Term(PlaneWaveFactor(1.0, p0, p3), ComplexField2D(grid, vals)))
    for (eps, axis), vals in gl_const.items():
        out.append(Term(GridLongFactor(eps, axis, vals), ConstTransverse(1.0)))
    return out + rest


def comp_inner(a, b) -> complex:
    a, b = comp_compact(a), comp_compact(b)
    return sum((term_inner(ta, tb) for ta in a for tb in b), 0.0 + 0.0j)


def comp_norm2(a) -> float:
    return max(float(np.real(comp_inner(a, a))), 0.0)


def comp_scale(a, c):
    return [Term(t.lon.scaled(c), t.tr) for t in a]


def comp_conj(a):
    return [Term(t.lon.conj(), _tr_conj(t.tr)) for t in a]


def apply_pi(mu: int, p: PotentialSpec, comp):
    """pi^mu componentwise: derivative part plus routed -q A^mu multiplier."""
    out = []
    for t in comp:
        if mu in (0, 3):
            out.append(Term(_lon_deriv(t.lon, mu), t.tr))
        else:
            d = _tr_deriv(t.tr, mu)
            if d is not None:
                out.append(Term(t.lon, d))
        a = p.A[mu]
        if a.is_zero() or p.q == 0.0:
            continue
        used = a.coords()
        if used <= {0, 3}:
            out.append(Term(_lon_mult(t.lon, a, -p.q), t.tr))
        elif used <= {1, 2}:
            out.append(Term(t.lon, _tr_mult(t.tr, a, -p.q)))
        else:
            raise UnsupportedField(
                f"A{mu} mixes longitudinal and transverse coordinates")
    return out


def pi_spinor_component(tag: str, p: PotentialSpec, comp):
    """One entry of the spinor matrix: '11d', '12d', '21d' or '22d'.

    11d = pi0 + pi3, 22d = pi0 - pi3, 12d = pi1 - i pi2, 21d = pi1 + i pi2.
    """
    if tag == "11d":
        return apply_pi(0, p, comp) + apply_pi(3, p, comp)
    if tag == "22d":
        return apply_pi(0, p, comp) + comp_scale(apply_pi(3, p, comp), -1.0)
    if tag == "12d":
        return apply_pi(1, p, comp) + comp_scale(apply_pi(2, p, comp), -1j)
    if tag == "21d":
        return apply_pi(1, p, comp) + comp_scale(apply_pi(2, p, comp), 1j)
    raise ValueError(f"unknown spinor index tag {tag!r}")


# ---------------------------------------------------------------------------
# bispinors

class BispinorField:
    """Four components (xi1, xi2, eta1, eta2), each a factored term sum."""

    __slots__ = ("components",)

    def __init__(self, components):
        comps = [comp_compact(list(c)) for c in components]
        if len(comps) != 4:
            raise ValueError("a bispinor has four components")
        self.components = comps

    @classmethod
    def plane_wave(cls, coeffs, p0: float, p3: float) -> "BispinorField":
        comps = []
        for c in coeffs:
            comps.append([] if c == 0 else
                         [Term(PlaneWaveFactor(complex(c), p0, p3), ConstTransverse(1.0))])
        return cls(comps)

    @classmethod
    def zero(cls) -> "BispinorField":
        return cls([[], [], [], []])

    def norm(self) -> float:
        return float(np.sqrt(sum(comp_norm2(c) for c in self.components)))

    def scaled(self, c) -> "BispinorField":
        return BispinorField([comp_scale(comp, c) for comp in self.components])

    def __add__(self, other: "BispinorField") -> "BispinorField":
        return BispinorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "BispinorField") -> "BispinorField":
        return self + other.scaled(-1.0)

    def project(self, zeroed_slot: int) -> "BispinorField":
        comps = [list(c) for c in self.components]
        comps[zeroed_slot] = []
        return BispinorField(comps)

    def charge_conjugate(self) -> "BispinorField":
        """i gamma2 conj: (a, b, c, d) -> (-d*, c*, b*, -a*)."""
        a, b, c, d = self.components
        return BispinorField([
            comp_scale(comp_conj(d), -1.0),
            comp_conj(c),
            comp_conj(b),
            comp_scale(comp_conj(a), -1.0),
        ])

    def materialize(self, axis: AxisSpec) -> "BispinorField":
        """Replace exact plane-wave factors by sampled x3 profiles."""
        comps = []
        for comp in self.components:
            new = []
            for t in comp:
                lon = t.lon
                if isinstance(lon, PlaneWaveFactor):
                    lon = materialize_plane_wave(lon, axis)
                new.append(Term(lon, t.tr))
            comps.append(new)
        return BispinorField(comps)

    def sample_transverse(self, grid: Grid2D, x0: float = 0.0, x3: float = 0.0):
        """Evaluate the four components on the transverse grid at (x0, x3)."""
        out = []
        for comp in self.components:
            acc = np.zeros(grid.shape, dtype=complex)
            for t in comp:
                w = t.lon.at(x0, x3)
                if isinstance(t.tr, ConstTransverse):
                    acc += w * t.tr.coef
                else:
                    if t.tr.grid != grid:
                        raise GridMismatch("sample grid differs from field grid")
                    acc += w * t.tr.values
            out.append(acc)
        return out


def gamma_pi_apply(psi: BispinorField, p: PotentialSpec) -> BispinorField:
    """gamma^mu pi_mu acting on a bispinor, via the spinor-matrix layout."""
    c0, c1, c2, c3 = psi.components
    out0 = pi_spinor_component("11d", p, c2) + pi_spinor_component("12d", p, c3)
    out1 = pi_spinor_component("21d", p, c2) + pi_spinor_component("22d", p, c3)
    out2 = pi_spinor_component("22d", p, c0) + comp_scale(
        pi_spinor_component("12d", p, c1), -1.0)
    out3 = comp_scale(pi_spinor_component("21d", p, c0), -1.0) + \
        pi_spinor_component("11d", p, c1)
    return BispinorField([out0, out1, out2, out3])


def dirac_residual(psi: BispinorField, p: PotentialSpec, m: float) -> float:
    """|| gamma^mu pi_mu psi - m psi || / || psi ||."""
    nrm = psi.norm()
    if nrm == 0.0:
        raise ZeroNorm("Dirac residual of a zero field")
    res = gamma_pi_apply(psi, p) - psi.scaled(m)
    return res.norm() / nrm
