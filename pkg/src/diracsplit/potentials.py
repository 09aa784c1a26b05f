"""Longitudinal four-potentials in closed form.

A potential is stored through its upper-index components A0..A3 as
expression trees.  A0 and A3 may depend on (x0, x3) only, A1 and A2 on
(x1, x2) only; that structure is what makes the commutator condition
[pi0 +- pi3, pi1 +- i pi2] = 0 hold, and it is checked both statically
(validate_longitudinal) and numerically (commutator_residual, which
applies the discretized operators to smooth probe fields on a small 4D
sample box and does not assume the structure).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArityMismatch, EmptyProbeSet, UnknownBuiltin
from .expressions import Const, Coord, Expression, ZERO, add, mul, parse_expression

LONGITUDINAL_COORDS = frozenset({0, 3})
TRANSVERSE_COORDS = frozenset({1, 2})

# allowed coordinate sets per component, by stored index
_ALLOWED = {0: LONGITUDINAL_COORDS, 1: TRANSVERSE_COORDS,
            2: TRANSVERSE_COORDS, 3: LONGITUDINAL_COORDS}


@dataclass(frozen=True)
class PotentialSpec:
    """Charge plus the four upper-index potential components."""
    q: float
    A: tuple  # (A0, A1, A2, A3) Expression trees

    def component(self, mu: int) -> Expression:
        return self.A[mu]

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.A)

    def with_charge(self, q: float) -> "PotentialSpec":
        return PotentialSpec(q=q, A=self.A)


@dataclass(frozen=True)
class FieldStrengths:
    """E over (x0,x3) and H over (x1,x2), by symbolic differentiation."""
    E: Expression
    H: Expression


@dataclass
class ValidationReport:
    passed: bool
    failures: list = field(default_factory=list)  # (component name, bad coords)


_BUILTIN_ARITY = {
    "zero": 1,                 # (q,)
    "uniform_H_symmetric": 2,  # (H, q)
    "uniform_H_landau": 2,     # (H, q)
    "uniform_E": 2,            # (E, q)
    "static_A0": 3,            # (c0, c1, q): A0 = c0 + c1*x3
}


def builtin(name: str, params) -> PotentialSpec:
    """Factory for the named test potentials."""
    if name not in _BUILTIN_ARITY:
        raise UnknownBuiltin(f"no builtin potential named {name!r}")
    params = [float(v) for v in params]
    if len(params) != _BUILTIN_ARITY[name]:
        raise ArityMismatch(
            f"{name} takes {_BUILTIN_ARITY[name]} parameters, got {len(params)}")
    zero4 = [ZERO, ZERO, ZERO, ZERO]
    if name == "zero":
        (q,) = params
        comps = zero4
    elif name == "uniform_H_symmetric":
        H, q = params
        comps = [ZERO, mul(Const(H / 2.0), Coord(2)),
                 mul(Const(-H / 2.0), Coord(1)), ZERO]
    elif name == "uniform_H_landau":
        H, q = params
        comps = [ZERO, mul(Const(H), Coord(2)), ZERO, ZERO]
    elif name == "uniform_E":
        E, q = params
        comps = [ZERO, ZERO, ZERO, mul(Const(E), Coord(0))]
    else:  # static_A0
        c0, c1, q = params
        comps = [add(Const(c0), mul(Const(c1), Coord(3))), ZERO, ZERO, ZERO]
    return PotentialSpec(q=q, A=tuple(comps))


def from_expressions(q: float, a0="0", a1="0", a2="0", a3="0") -> PotentialSpec:
    """Build a spec from inline expression strings (config path)."""
    comps = []
    for text in (a0, a1, a2, a3):
        comps.append(text if isinstance(text, Expression) else parse_expression(str(text)))
    return PotentialSpec(q=float(q), A=tuple(comps))


def add_potentials(p1: PotentialSpec, p2: PotentialSpec) -> PotentialSpec:
    """Componentwise sum; both specs must carry the same charge."""
    if p1.q != p2.q:
        raise ArityMismatch("cannot add potentials with different charges")
    return PotentialSpec(q=p1.q, A=tuple(add(a, b) for a, b in zip(p1.A, p2.A)))


def field_strengths(p: PotentialSpec) -> FieldStrengths:
    """E = d0 A3 - d3 A0 and H = d2 A1 - d1 A2 on the stored components."""
    E = add(p.A[3].diff(0), mul(Const(-1.0), p.A[0].diff(3)))
    H = add(p.A[1].diff(2), mul(Const(-1.0), p.A[2].diff(1)))
    return FieldStrengths(E=E, H=H)


def validate_longitudinal(p: PotentialSpec) -> ValidationReport:
    """Check that each component only uses its allowed coordinates."""
    failures = []
    for mu in range(4):
        bad = p.A[mu].coords() - _ALLOWED[mu]
        if bad:
            failures.append((f"A{mu}", sorted(bad)))
    return ValidationReport(passed=not failures, failures=failures)


# ---------------------------------------------------------------------------
# numerical commutator check on a small 4D sample box

@dataclass(frozen=True)
class GaussianProbe:
    """Tensor-product Gaussian exp(-sum ((x-c)/w)^2)."""
    centers: tuple
    widths: tuple

    def evaluate(self, mesh):
        out = 1.0
        for x, c, w in zip(mesh, self.centers, self.widths):
            out = out * np.exp(-((x - c) / w) ** 2)
        return out


def default_probes(count: int = 8, seed: int = 7, box: float = 2.0):
    rng = np.random.default_rng(seed)
    probes = []
    for _ in range(count):
        centers = tuple(rng.uniform(-0.4 * box, 0.4 * box, size=4))
        widths = tuple(rng.uniform(0.5 * box, 0.9 * box, size=4))
        probes.append(GaussianProbe(centers, widths))
    return probes


class _Sample4D:
    """Central differences and pi operators on a uniform 4D box."""

    def __init__(self, n: int, box: float):
        self.n = n
        self.h = 2.0 * box / (n - 1)
        axis = np.linspace(-box, box, n)
        self.mesh = np.meshgrid(axis, axis, axis, axis, indexing="ij")

    def d(self, f, axis):
        out = np.zeros_like(f, dtype=complex)
        sl_p = [slice(None)] * 4
        sl_m = [slice(None)] * 4
        sl_c = [slice(None)] * 4
        sl_p[axis] = slice(2, None)
        sl_m[axis] = slice(0, -2)
        sl_c[axis] = slice(1, -1)
        out[tuple(sl_c)] = (f[tuple(sl_p)] - f[tuple(sl_m)]) / (2 * self.h)
        return out

    def pi(self, mu: int, p: PotentialSpec, f):
        a = p.A[mu].evaluate(self.mesh)
        if mu == 0:
            return 1j * self.d(f, 0) - p.q * a * f
        return -1j * self.d(f, mu) - p.q * a * f

    def interior(self, f, margin: int):
        sl = tuple(slice(margin, self.n - margin) for _ in range(4))
        return f[sl]


def commutator_residual(p: PotentialSpec, probes=None, n: int = 16,
                        box: float = 2.0) -> float:
    """max over probes and sign choices of ||[pi0 +- pi3, pi1 +- i pi2] f|| / ||f||.

    Derivatives of the probe are finite differences; the potential enters
    through exact expression evaluation.  Two operator applications eat a
    2-point margin, so the sup-norm is taken on the remaining interior.
    """
    if probes is None:
        probes = default_probes(box=box)
    if not probes:
        raise EmptyProbeSet("commutator check needs at least one probe")
    grid = _Sample4D(n=n, box=box)
    worst = 0.0
    for probe in probes:
        f = probe.evaluate(grid.mesh).astype(complex)
        fnorm = float(np.abs(grid.interior(f, 2)).max())
        pis = {mu: (lambda g, mu=mu: grid.pi(mu, p, g)) for mu in range(4)}
        for s_l in (+1.0, -1.0):
            for s_t in (+1.0, -1.0):
                def op_l(g):
                    return pis[0](g) + s_l * pis[3](g)

                def op_t(g):
                    return pis[1](g) + 1j * s_t * pis[2](g)

                comm = op_l(op_t(f)) - op_t(op_l(f))
                r = float(np.abs(grid.interior(comm, 2)).max()) / fnorm
                worst = max(worst, r)
    return worst
