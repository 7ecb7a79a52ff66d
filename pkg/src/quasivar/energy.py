"""Discrete energy functional, its weak differential, and descent machinery.

The energy of a field pair is

    J(u, v) = int A(u, grad u) + int B(v, grad v) - int G(u, v)

evaluated by midpoint quadrature: field values interpolated to element
centers, gradients element-constant.  The weak differential is realized
as a pair of nodal load vectors; its Riesz representative in the
W^{1,2}-inner product (one Laplacian solve per component) provides the
preconditioned residual norm used as a dual-norm surrogate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (FieldPair, Grid, GridFunction, ell_norm, norm_Linf, norm_W)
from .model import ModelFunctions


class NonFiniteEnergyError(ArithmeticError):
    """An energy integrand overflowed to a non-finite value."""


@dataclass
class EnergyReport:
    """Energy value with per-term breakdown, norms, and optional residual."""

    total: float
    int_A: float
    int_B: float
    int_G: float
    norm_W_u: float
    norm_W_v: float
    linf_u: float
    linf_v: float
    ell: float
    residual: float | None = None


def _element_data(fp: FieldPair):
    grid = fp.grid
    um = grid.midpoint_values(fp.u.values)
    ug = grid.element_gradients(fp.u.values)
    vm = grid.midpoint_values(fp.v.values)
    vg = grid.element_gradients(fp.v.values)
    return um, ug, vm, vg


def energy_terms(fp: FieldPair, mf: ModelFunctions) -> tuple[float, float, float]:
    """Quadrature values of (int A, int B, int G); raises on overflow."""
    grid = fp.grid
    um, ug, vm, vg = _element_data(fp)
    vol = grid.cell_volume
    with np.errstate(over="raise"):
        try:
            int_A = float(np.sum(mf.A_eval(um, ug)) * vol)
            int_B = float(np.sum(mf.B_eval(vm, vg)) * vol)
            int_G = float(np.sum(mf.G_eval(um, vm)) * vol)
        except FloatingPointError as exc:
            raise NonFiniteEnergyError("energy integrand overflow") from exc
    for val in (int_A, int_B, int_G):
        if not np.isfinite(val):
            raise NonFiniteEnergyError("non-finite energy term")
    return int_A, int_B, int_G


def j_value(fp: FieldPair, mf: ModelFunctions) -> float:
    """Fast path: the scalar energy J(u, v)."""
    a, b, g = energy_terms(fp, mf)
    return a + b - g


def J_eval(fp: FieldPair, mf: ModelFunctions,
           with_residual: bool = False) -> EnergyReport:
    """Full energy report with term breakdown and discrete norms."""
    cfg = mf.cfg
    int_A, int_B, int_G = energy_terms(fp, mf)
    residual = None
    if with_residual:
        _, residual = gradient_representative(fp, mf)
    return EnergyReport(
        total=int_A + int_B - int_G,
        int_A=int_A, int_B=int_B, int_G=int_G,
        norm_W_u=norm_W(fp.u, cfg.p1), norm_W_v=norm_W(fp.v, cfg.p2),
        linf_u=norm_Linf(fp.u), linf_v=norm_Linf(fp.v),
        ell=ell_norm(fp, cfg),
        residual=residual)


def dJ_loads(fp: FieldPair, mf: ModelFunctions) -> tuple[np.ndarray, np.ndarray]:
    """Nodal load vectors (F_u, F_v) of the weak differential.

    F_u[i] = int a(u, grad u).grad phi_i + (A_t(u, grad u) - G_u(u, v)) phi_i
    and symmetrically for F_v, so dJ(fp)[(w, z)] = F_u.w + F_v.z exactly
    for nodal directions.
    """
    grid = fp.grid
    um, ug, vm, vg = _element_data(fp)
    fu = grid.scatter(mf.At_eval(um, ug) - mf.Gu_eval(um, vm), mf.a_eval(um, ug))
    fv = grid.scatter(mf.Bt_eval(vm, vg) - mf.Gv_eval(um, vm), mf.b_eval(vm, vg))
    return fu, fv


def dJ_apply(fp: FieldPair, direction: FieldPair, mf: ModelFunctions) -> float:
    """Gateaux differential of J at fp along a nodal direction pair."""
    if direction.grid is not fp.grid:
        raise ValueError("direction must live on the same grid")
    fu, fv = dJ_loads(fp, mf)
    return float(np.sum(fu * direction.u.values) + np.sum(fv * direction.v.values))


def gradient_representative(fp: FieldPair, mf: ModelFunctions,
                            ) -> tuple[FieldPair, float]:
    """Riesz representative of dJ(fp) in the discrete H^1_0 inner product.

    Returns (r, residual) where r solves K r = dJ per component and
    residual = sqrt(dJ(fp)[r]) is the preconditioned dual-norm surrogate.
    """
    grid = fp.grid
    fu, fv = dJ_loads(fp, mf)
    ru = grid.laplacian_solve(fu)
    rv = grid.laplacian_solve(fv)
    sq = float(np.sum(fu * ru) + np.sum(fv * rv))
    rep = FieldPair(GridFunction(grid, ru), GridFunction(grid, rv))
    return rep, np.sqrt(max(sq, 0.0))


def residual_norm(fp: FieldPair, mf: ModelFunctions) -> float:
    """Preconditioned dual norm of dJ(fp)."""
    return gradient_representative(fp, mf)[1]
