"""Uniform grids on (0,1)^N with midpoint quadrature, N in {1, 2}.

Fields are nodal with homogeneous Dirichlet trace.  All integrals use a
single midpoint quadrature point per element; gradients are the
element-constant gradients of the linear (1D) / bilinear (2D) shape
functions evaluated at the element center.  The one-dimensional grid
exists for analytic and shooting oracles only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, TYPE_CHECKING

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

if TYPE_CHECKING:
    from .exponents import ExponentConfig


class Grid:
    """Uniform tensor grid on the unit interval or unit square.

    Immutable after construction.  ``n`` is the number of nodes per axis,
    so the mesh width is h = 1/(n-1).
    """

    def __init__(self, dimension: int, n: int):
        if dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if n < 3:
            raise ValueError("need at least 3 nodes per axis")
        self.dimension = dimension
        self.n = n
        self.h = 1.0 / (n - 1)
        self.cell_volume = self.h ** dimension
        self.num_cells = (n - 1) ** dimension
        self._lap_solve = None  # cached factorized stiffness
        axis = np.linspace(0.0, 1.0, n)
        self._axis = axis
        centers = 0.5 * (axis[:-1] + axis[1:])
        if dimension == 1:
            self.centers = centers[:, None]
        else:
            cx, cy = np.meshgrid(centers, centers, indexing="ij")
            self.centers = np.stack([cx.ravel(), cy.ravel()], axis=1)

    # -- nodal bookkeeping -------------------------------------------------

    @property
    def node_shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dimension

    def node_coords(self) -> np.ndarray:
        if self.dimension == 1:
            return self._axis[:, None]
        gx, gy = np.meshgrid(self._axis, self._axis, indexing="ij")
        return np.stack([gx.ravel(), gy.ravel()], axis=1)

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.node_shape, dtype=bool)
        if self.dimension == 1:
            mask[0] = mask[-1] = True
        else:
            mask[0, :] = mask[-1, :] = True
            mask[:, 0] = mask[:, -1] = True
        return mask

    def zeros(self) -> np.ndarray:
        return np.zeros(self.node_shape)

    # -- element operations --------------------------------------------------

    def midpoint_values(self, values: np.ndarray) -> np.ndarray:
        """Interpolated field values at element centers."""
        if self.dimension == 1:
            return 0.5 * (values[:-1] + values[1:])
        return 0.25 * (values[:-1, :-1] + values[1:, :-1]
                       + values[:-1, 1:] + values[1:, 1:])

    def element_gradients(self, values: np.ndarray) -> np.ndarray:
        """Shape-function gradients at element centers, shape (*cells, dim)."""
        h = self.h
        if self.dimension == 1:
            return ((values[1:] - values[:-1]) / h)[:, None]
        gx = (values[1:, :-1] + values[1:, 1:]
              - values[:-1, :-1] - values[:-1, 1:]) / (2 * h)
        gy = (values[:-1, 1:] + values[1:, 1:]
              - values[:-1, :-1] - values[1:, :-1]) / (2 * h)
        return np.stack([gx, gy], axis=-1)

    def scatter(self, density: np.ndarray | None,
                gradvec: np.ndarray | None) -> np.ndarray:
        """Adjoint of (midpoint_values, element_gradients) with quadrature weight.

        Returns the nodal vector F with
        F_i = sum_e [gradvec(e) . grad phi_i(e) + density(e) phi_i(e)] * vol,
        zeroed on boundary nodes.  Either argument may be None.
        """
        vol = self.cell_volume
        out = self.zeros()
        if self.dimension == 1:
            if density is not None:
                t = 0.5 * vol * density
                out[:-1] += t
                out[1:] += t
            if gradvec is not None:
                g = gradvec[..., 0] * vol / self.h
                out[:-1] -= g
                out[1:] += g
        else:
            if density is not None:
                t = 0.25 * vol * density
                out[:-1, :-1] += t
                out[1:, :-1] += t
                out[:-1, 1:] += t
                out[1:, 1:] += t
            if gradvec is not None:
                gx = gradvec[..., 0] * vol / (2 * self.h)
                gy = gradvec[..., 1] * vol / (2 * self.h)
                out[:-1, :-1] += -gx - gy
                out[1:, :-1] += gx - gy
                out[:-1, 1:] += -gx + gy
                out[1:, 1:] += gx + gy
        out[self.boundary_mask()] = 0.0
        return out

    # -- discrete Laplacian ----------------------------------------------------

    def _build_laplacian(self):
        """Factorized Dirichlet stiffness matrix of the linear/bilinear elements."""
        n = self.n
        if self.dimension == 1:
            m = n - 2
            main = np.full(m, 2.0 / self.h)
            off = np.full(m - 1, -1.0 / self.h)
            K = sp.diags([off, main, off], [-1, 0, 1], format="csc")
        else:
            m = n - 2
            # exact bilinear element stiffness on a square: assembled 9-point
            # stencil with center 8/3, all eight neighbors -1/3
            eye = sp.identity(m, format="csc")
            t_main = sp.diags([np.full(m - 1, 1.0), np.full(m, 0.0),
                               np.full(m - 1, 1.0)], [-1, 0, 1], format="csc")
            K = (sp.kron(eye, eye) * (8.0 / 3.0)
                 - sp.kron(eye, t_main) / 3.0
                 - sp.kron(t_main, eye) / 3.0
                 - sp.kron(t_main, t_main) / 3.0)
            K = K.tocsc()
        return spla.factorized(K)

    def laplacian_solve(self, rhs_nodal: np.ndarray) -> np.ndarray:
        """Solve K y = rhs on interior nodes (homogeneous Dirichlet)."""
        if self._lap_solve is None:
            self._lap_solve = self._build_laplacian()
        out = self.zeros()
        if self.dimension == 1:
            out[1:-1] = self._lap_solve(rhs_nodal[1:-1])
        else:
            sol = self._lap_solve(rhs_nodal[1:-1, 1:-1].ravel())
            out[1:-1, 1:-1] = sol.reshape(self.n - 2, self.n - 2)
        return out


def integrate(f, grid: Grid) -> float:
    """Composite midpoint quadrature over (0,1)^N.

    ``f`` is either a callable on quadrature-point coordinates (array of
    shape (ncells, dim)) or an array of per-element values.  Exact for
    elementwise-constant integrands.
    """
    if callable(f):
        vals = np.asarray(f(grid.centers), dtype=float).ravel()
    else:
        vals = np.asarray(f, dtype=float).ravel()
    if vals.size != grid.num_cells:
        raise ValueError(f"expected {grid.num_cells} element values, got {vals.size}")
    return float(vals.sum() * grid.cell_volume)


@dataclass
class GridFunction:
    """Nodal field on a grid with zero boundary trace."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.node_shape:
            raise ValueError(
                f"values shape {self.values.shape} != grid {self.grid.node_shape}")
        if np.any(self.values[self.grid.boundary_mask()] != 0.0):
            raise ValueError("GridFunction must vanish on boundary nodes")

    @classmethod
    def from_callable(cls, grid: Grid, f: Callable) -> "GridFunction":
        coords = grid.node_coords()
        if grid.dimension == 1:
            vals = np.asarray(f(coords[:, 0]), dtype=float).reshape(grid.node_shape)
        else:
            vals = np.asarray(f(coords[:, 0], coords[:, 1]),
                              dtype=float).reshape(grid.node_shape)
        vals[grid.boundary_mask()] = 0.0
        return cls(grid, vals)

    @classmethod
    def zero(cls, grid: Grid) -> "GridFunction":
        return cls(grid, grid.zeros())

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy())

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, c: float) -> "GridFunction":
        return GridFunction(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.grid, -self.values)


@dataclass
class FieldPair:
    """A pair (u, v) of fields on a shared grid."""

    u: GridFunction
    v: GridFunction

    def __post_init__(self):
        if self.u.grid is not self.v.grid:
            raise ValueError("FieldPair components must share a grid")

    @property
    def grid(self) -> Grid:
        return self.u.grid

    @classmethod
    def zero(cls, grid: Grid) -> "FieldPair":
        return cls(GridFunction.zero(grid), GridFunction.zero(grid))

    def copy(self) -> "FieldPair":
        return FieldPair(self.u.copy(), self.v.copy())

    def __add__(self, other: "FieldPair") -> "FieldPair":
        return FieldPair(self.u + other.u, self.v + other.v)

    def __sub__(self, other: "FieldPair") -> "FieldPair":
        return FieldPair(self.u - other.u, self.v - other.v)

    def __mul__(self, c: float) -> "FieldPair":
        return FieldPair(self.u * c, self.v * c)

    __rmul__ = __mul__

    def __neg__(self) -> "FieldPair":
        return FieldPair(-self.u, -self.v)


def gradient_at_quadrature(gf: GridFunction) -> np.ndarray:
    """Element-constant gradient vectors at quadrature points."""
    return gf.grid.element_gradients(gf.values)


def norm_W(gf: GridFunction, p: float) -> float:
    """Gradient p-norm (integral of |grad|^p)^(1/p) by midpoint quadrature."""
    if p < 1:
        raise ValueError("norm_W requires p >= 1")
    g = gradient_at_quadrature(gf)
    mag = np.sqrt(np.sum(g * g, axis=-1))
    return integrate(mag ** p, gf.grid) ** (1.0 / p)


def norm_Lp(gf: GridFunction, p: float) -> float:
    """Lebesgue p-norm by midpoint quadrature."""
    if p < 1:
        raise ValueError("norm_Lp requires p >= 1")
    m = gf.grid.midpoint_values(gf.values)
    return integrate(np.abs(m) ** p, gf.grid) ** (1.0 / p)


def norm_Linf(gf: GridFunction) -> float:
    """Max of absolute nodal values."""
    return float(np.max(np.abs(gf.values)))


def power_map(gf: GridFunction, s: float) -> GridFunction:
    """Nodal map t -> |t|^s t; boundary trace stays zero."""
    if s < 0:
        raise ValueError("power_map requires s >= 0")
    if s == 0:
        return gf.copy()
    return GridFunction(gf.grid, np.abs(gf.values) ** s * gf.values)


def truncate(gf: GridFunction, k: float) -> GridFunction:
    """Nodal truncation at level k: t -> t if |t| <= k else k t/|t|."""
    if k <= 0:
        raise ValueError("truncate requires k > 0")
    return GridFunction(gf.grid, np.clip(gf.values, -k, k))


def truncate_pair(fp: FieldPair, k: float) -> FieldPair:
    return FieldPair(truncate(fp.u, k), truncate(fp.v, k))


def pair_norm_W(fp: FieldPair, p1: float, p2: float) -> float:
    """Product-space gradient norm: the sum of the component norms."""
    return norm_W(fp.u, p1) + norm_W(fp.v, p2)


def ell_norm(fp: FieldPair, cfg: "ExponentConfig") -> float:
    """max of the W-norm of (u,v) and the W-norm of the power-mapped pair."""
    plain = pair_norm_W(fp, cfg.p1, cfg.p2)
    mapped = (norm_W(power_map(fp.u, cfg.s1), cfg.p1)
              + norm_W(power_map(fp.v, cfg.s2), cfg.p2))
    return max(plain, mapped)


def dump_field(gf: GridFunction) -> str:
    """Plain-text field dump: one node per line, row-major, 17 significant digits."""
    coords = gf.grid.node_coords()
    vals = gf.values.ravel()
    lines = []
    for i in range(coords.shape[0]):
        cs = " ".join(format(c, ".17g") for c in coords[i])
        lines.append(f"{cs} {format(vals[i], '.17g')}")
    return "\n".join(lines) + "\n"
