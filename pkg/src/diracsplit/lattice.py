"""Grids, complex fields and finite-difference operators.

2D grids host either the transverse (x1, x2) or the longitudinal
(x0, x3) subspace; fields live on interior points with Dirichlet
(zero outside) boundaries.  Operators are sums of composed primitives
(scaled identity, multiplication by an expression, 1st/2nd central
difference along an axis).  apply() interprets the primitives by array
slicing; operator_matrix() assembles the same operator as a sparse
matrix, which gives an independent route for cross-checks and feeds
the eigensolvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import CoordinateMismatch, GridMismatch
from .expressions import Expression
from .potentials import PotentialSpec


@dataclass(frozen=True)
class AxisSpec:
    min: float
    max: float
    n: int  # interior points

    def __post_init__(self):
        if self.max <= self.min or self.n < 1:
            raise ValueError("axis needs max > min and n >= 1")

    @property
    def h(self) -> float:
        return (self.max - self.min) / (self.n + 1)

    @property
    def points(self) -> np.ndarray:
        return self.min + self.h * np.arange(1, self.n + 1)


@dataclass(frozen=True)
class Grid2D:
    """Two axes plus the global coordinate indices they represent."""
    axis_a: AxisSpec
    axis_b: AxisSpec
    coords: tuple  # e.g. (1, 2) transverse, (0, 3) longitudinal

    @classmethod
    def transverse(cls, axis_a: AxisSpec, axis_b: AxisSpec = None) -> "Grid2D":
        return cls(axis_a, axis_b or axis_a, coords=(1, 2))

    @classmethod
    def longitudinal(cls, axis_a: AxisSpec, axis_b: AxisSpec = None) -> "Grid2D":
        return cls(axis_a, axis_b or axis_a, coords=(0, 3))

    @property
    def shape(self):
        return (self.axis_a.n, self.axis_b.n)

    @property
    def size(self) -> int:
        return self.axis_a.n * self.axis_b.n

    @property
    def weight(self) -> float:
        """Quadrature weight of one grid cell."""
        return self.axis_a.h * self.axis_b.h

    def local_axis(self, coord: int) -> int:
        if coord not in self.coords:
            raise CoordinateMismatch(
                f"coordinate x{coord} not on grid with coords {self.coords}")
        return self.coords.index(coord)

    def mesh_point(self):
        """4-slot point for Expression.evaluate; off-grid coords stay None."""
        xa, xb = np.meshgrid(self.axis_a.points, self.axis_b.points, indexing="ij")
        point = [None, None, None, None]
        point[self.coords[0]] = xa
        point[self.coords[1]] = xb
        return point

    def evaluate(self, expr: Expression) -> np.ndarray:
        bad = expr.coords() - set(self.coords)
        if bad:
            raise CoordinateMismatch(
                f"expression uses x{sorted(bad)} not on grid coords {self.coords}")
        vals = expr.evaluate(self.mesh_point())
        return np.broadcast_to(np.asarray(vals, dtype=float), self.shape).copy()


class ComplexField2D:
    """Complex values on the interior points of a Grid2D."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid2D, values: np.ndarray):
        values = np.asarray(values, dtype=complex)
        if values.shape != grid.shape:
            raise GridMismatch(f"values {values.shape} vs grid {grid.shape}")
        self.grid = grid
        self.values = values

    @classmethod
    def zeros(cls, grid: Grid2D) -> "ComplexField2D":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def copy(self) -> "ComplexField2D":
        return ComplexField2D(self.grid, self.values.copy())

    def norm(self) -> float:
        return float(np.sqrt(self.grid.weight * np.sum(np.abs(self.values) ** 2)))

    def inner(self, other: "ComplexField2D") -> complex:
        self._check(other)
        return complex(self.grid.weight * np.sum(self.values.conj() * other.values))

    def _check(self, other):
        if self.grid is not other.grid and self.grid != other.grid:
            raise GridMismatch("fields on different grids")

    def __add__(self, other):
        self._check(other)
        return ComplexField2D(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return ComplexField2D(self.grid, self.values - other.values)

    def __mul__(self, c):
        return ComplexField2D(self.grid, self.values * c)

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# primitive operator factors

@dataclass(frozen=True)
class Deriv:
    axis: int   # local axis 0/1
    order: int  # 1 or 2


@dataclass(frozen=True)
class Mult:
    expr: Expression


def _stencil_1d(axis_spec: AxisSpec, order: int) -> sp.spmatrix:
    n, h = axis_spec.n, axis_spec.h
    if order == 1:
        return sp.diags([-1.0, 1.0], [-1, 1], shape=(n, n), format="csr") / (2 * h)
    return sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n), format="csr") / h**2


def _apply_deriv(values: np.ndarray, axis: int, order: int, h: float) -> np.ndarray:
    out = np.zeros_like(values)
    if axis == 0:
        vp, vm, vc = values[2:, :], values[:-2, :], values[1:-1, :]
        if order == 1:
            out[1:-1, :] = (vp - vm) / (2 * h)
            out[0, :] += values[1, :] / (2 * h)
            out[-1, :] -= values[-2, :] / (2 * h)
        else:
            out[1:-1, :] = (vp - 2 * vc + vm) / h**2
            out[0, :] += (values[1, :] - 2 * values[0, :]) / h**2
            out[-1, :] += (values[-2, :] - 2 * values[-1, :]) / h**2
    else:
        vp, vm, vc = values[:, 2:], values[:, :-2], values[:, 1:-1]
        if order == 1:
            out[:, 1:-1] = (vp - vm) / (2 * h)
            out[:, 0] += values[:, 1] / (2 * h)
            out[:, -1] -= values[:, -2] / (2 * h)
        else:
            out[:, 1:-1] = (vp - 2 * vc + vm) / h**2
            out[:, 0] += (values[:, 1] - 2 * values[:, 0]) / h**2
            out[:, -1] += (values[:, -2] - 2 * values[:, -1]) / h**2
    return out


class DiffOp:
    """Sum of coef * (factor chain) terms bound to one grid.

    Factor chains apply right to left; Dirichlet zero padding at the
    boundary.  Linear by construction.
    """

    def __init__(self, grid: Grid2D, terms):
        self.grid = grid
        self.terms = [(complex(c), tuple(fs)) for c, fs in terms]
        self._matrix = None
        self._mult_cache = {}

    # construction helpers -------------------------------------------------
    @classmethod
    def identity(cls, grid: Grid2D, coef=1.0) -> "DiffOp":
        return cls(grid, [(coef, ())])

    @classmethod
    def deriv(cls, grid: Grid2D, coord: int, order: int, coef=1.0) -> "DiffOp":
        return cls(grid, [(coef, (Deriv(grid.local_axis(coord), order),))])

    @classmethod
    def mult(cls, grid: Grid2D, expr: Expression, coef=1.0) -> "DiffOp":
        if expr.is_zero():
            return cls(grid, [])
        return cls(grid, [(coef, (Mult(expr),))])

    def __add__(self, other: "DiffOp") -> "DiffOp":
        if self.grid != other.grid:
            raise GridMismatch("operators on different grids")
        return DiffOp(self.grid, self.terms + other.terms)

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-1.0) * other

    def __mul__(self, c) -> "DiffOp":
        return DiffOp(self.grid, [(coef * c, fs) for coef, fs in self.terms])

    __rmul__ = __mul__

    def compose(self, other: "DiffOp") -> "DiffOp":
        """self after other (operator product)."""
        if self.grid != other.grid:
            raise GridMismatch("operators on different grids")
        terms = []
        for c1, f1 in self.terms:
            for c2, f2 in other.terms:
                terms.append((c1 * c2, f1 + f2))
        return DiffOp(self.grid, terms)

    # evaluation ------------------------------------------------------------
    def _mult_values(self, expr: Expression) -> np.ndarray:
        key = id(expr)
        if key not in self._mult_cache:
            self._mult_cache[key] = self.grid.evaluate(expr)
        return self._mult_cache[key]

    def apply(self, f: ComplexField2D) -> ComplexField2D:
        if f.grid != self.grid:
            raise GridMismatch("field grid does not match operator grid")
        out = np.zeros(self.grid.shape, dtype=complex)
        hs = (self.grid.axis_a.h, self.grid.axis_b.h)
        for coef, factors in self.terms:
            cur = f.values
            for factor in reversed(factors):
                if isinstance(factor, Deriv):
                    cur = _apply_deriv(cur, factor.axis, factor.order, hs[factor.axis])
                else:
                    cur = self._mult_values(factor.expr) * cur
            out += coef * cur
        return ComplexField2D(self.grid, out)

    def matrix(self) -> sp.spmatrix:
        """Sparse matrix in row-major (axis_a slow, axis_b fast) ordering."""
        if self._matrix is None:
            na, nb = self.grid.shape
            eye_a, eye_b = sp.identity(na, format="csr"), sp.identity(nb, format="csr")
            total = sp.csr_matrix((self.grid.size, self.grid.size), dtype=complex)
            for coef, factors in self.terms:
                m = sp.identity(self.grid.size, dtype=complex, format="csr")
                for factor in reversed(factors):
                    if isinstance(factor, Deriv):
                        stencil = _stencil_1d(
                            (self.grid.axis_a, self.grid.axis_b)[factor.axis],
                            factor.order)
                        fm = sp.kron(stencil, eye_b) if factor.axis == 0 \
                            else sp.kron(eye_a, stencil)
                    else:
                        fm = sp.diags(self._mult_values(factor.expr).ravel())
                    m = fm @ m
                total = total + coef * m
            self._matrix = total.tocsr()
        return self._matrix


def pi_operator(mu: int, p: PotentialSpec, grid: Grid2D) -> DiffOp:
    """Minimally coupled momentum pi^mu = p^mu - q A^mu on the grid.

    pi^0 = +i d0 - q A0, pi^j = -i dj - q A^j; the sign follows from
    p^mu = i d^mu with metric (+,-,-,-).  The potential component must
    live on the grid's coordinates.
    """
    if mu not in grid.coords:
        raise CoordinateMismatch(f"pi^{mu} not applicable on grid {grid.coords}")
    sign = 1j if mu == 0 else -1j
    op = DiffOp.deriv(grid, mu, 1, coef=sign)
    a = p.A[mu]
    if not a.is_zero():
        op = op + DiffOp.mult(grid, a, coef=-p.q)
    return op


def apply(op: DiffOp, f: ComplexField2D) -> ComplexField2D:
    return op.apply(f)


def operator_matrix(op: DiffOp) -> sp.spmatrix:
    return op.matrix()


def hermiticity_defect(m: sp.spmatrix) -> float:
    d = (m - m.getH()).tocoo()
    return float(np.abs(d.data).max()) if d.nnz else 0.0
