"""Build fields from sympy expressions in x, y, z and t.

Derivatives are taken symbolically and lambdified once, so the only error in
any evaluated identity is quadrature error.
"""
from __future__ import annotations

import numpy as np
import sympy as sp

from .fields import BoxDomain, ScalarField, VectorField

X_SYMBOLS = sp.symbols("x y z")
T_SYMBOL = sp.Symbol("t")


def _lambdify(expr, dim: int, time_dependent: bool):
    args = ((T_SYMBOL,) if time_dependent else ()) + X_SYMBOLS[:dim]
    fn = sp.lambdify(args, expr, modules="numpy")

    def wrapped(*call_args):
        X = call_args[-1]
        coords = [X[:, i] for i in range(dim)]
        if time_dependent:
            out = fn(call_args[0], *coords)
        else:
            out = fn(*coords)
        out = np.asarray(out, dtype=float)
        if out.ndim == 0:
            out = np.full(X.shape[0], float(out))
        return out

    return wrapped


def _lambdify_vector(exprs, dim: int, time_dependent: bool):
    comps = [_lambdify(e, dim, time_dependent) for e in exprs]

    def wrapped(*call_args):
        return np.stack([c(*call_args) for c in comps], axis=1)

    return wrapped


def _boundary_vanishes(field: ScalarField, dom: BoxDomain) -> bool:
    pts = dom.boundary_points()
    if field.time_dependent:
        times = np.linspace(0.0, dom.time_horizon, 5)
        vals = np.concatenate([
            field.value(np.full(pts.shape[0], t), pts) for t in times])
    else:
        vals = field.value(pts)
    return bool(np.max(np.abs(vals)) <= 1e-10)


def scalar_field(expr, dom: BoxDomain,
                 vanishes_on_boundary: bool | None = None) -> ScalarField:
    """Scalar field with symbolic gradient, laplacian and (parabolic) dt.

    ``expr`` may be a sympy expression or a string in x, y, z (and t for
    parabolic domains).  The boundary-vanishing flag is spot-checked on
    boundary sample points unless supplied.
    """
    expr = sp.sympify(expr)
    d = dom.dim
    td = dom.is_parabolic
    grad_exprs = [sp.diff(expr, X_SYMBOLS[i]) for i in range(d)]
    lap_expr = sum(sp.diff(expr, X_SYMBOLS[i], 2) for i in range(d))
    field = ScalarField(
        _lambdify(expr, d, td),
        _lambdify_vector(grad_exprs, d, td),
        _lambdify(lap_expr, d, td),
        _lambdify(sp.diff(expr, T_SYMBOL), d, td) if td else None,
        dim=d, time_dependent=td)
    if vanishes_on_boundary is None:
        vanishes_on_boundary = _boundary_vanishes(field, dom)
    field.vanishes_on_boundary = vanishes_on_boundary
    return field


def vector_field(exprs, dom: BoxDomain) -> VectorField:
    """Vector field with symbolic divergence (and dt on parabolic domains)."""
    exprs = [sp.sympify(e) for e in exprs]
    d = dom.dim
    if len(exprs) != d:
        raise ValueError("component count must match the domain dimension")
    td = dom.is_parabolic
    div_expr = sum(sp.diff(exprs[i], X_SYMBOLS[i]) for i in range(d))
    dt_fn = None
    if td:
        dt_fn = _lambdify_vector([sp.diff(e, T_SYMBOL) for e in exprs], d, td)
    return VectorField(
        _lambdify_vector(exprs, d, td),
        _lambdify(div_expr, d, td),
        dt_fn, dim=d, time_dependent=td)


def gradient_field(expr, dom: BoxDomain) -> VectorField:
    """The gradient of a scalar expression, with divergence = laplacian."""
    expr = sp.sympify(expr)
    d = dom.dim
    return vector_field([sp.diff(expr, X_SYMBOLS[i]) for i in range(d)], dom)
