"""Manufactured problem cases and controlled approximation pairs.

Exact solutions are arbitrary sympy expressions; the data f (and u0) is
produced by applying the model operator symbolically.  Perturbations are
finite trigonometric sums with closed-form derivatives, so every conformity
level is exact by construction.
"""
from __future__ import annotations

import dataclasses
import itertools
import math
from typing import Optional

import numpy as np
import sympy as sp

from .fields import BoxDomain, ConformityError, ScalarField, VectorField
from .quadrature import QuadratureRule, norm_sq
from .symbolic import T_SYMBOL, scalar_field, gradient_field

KINDS = ("RD", "Poisson", "TRD", "Heat")
PARABOLIC_KINDS = ("TRD", "Heat")
LEVELS = ("very_conforming", "conforming_mixed", "semi_conforming_primal",
          "semi_conforming_dual", "non_conforming")


@dataclasses.dataclass(frozen=True)
class ProblemCase:
    """One model problem with manufactured data and exact solution pair."""

    kind: str
    dom: BoxDomain
    f: ScalarField
    u0: Optional[ScalarField]
    exact_u: ScalarField
    exact_p: VectorField
    solution: str = ""


@dataclasses.dataclass(frozen=True)
class ApproxPair:
    """An approximation pair at a declared conformity level."""

    u_tilde: ScalarField
    p_tilde: VectorField
    level: str


def make_case(kind: str, dom: BoxDomain, u_expr, f_factor: float = 1.0) -> ProblemCase:
    """Manufacture a case: p = grad u and f = (operator) u, symbolically.

    ``f_factor`` rescales the source, deliberately breaking the case; it
    exists so data defects can be injected and detected downstream.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown problem kind: {kind!r}")
    parabolic = kind in PARABOLIC_KINDS
    if parabolic and not dom.is_parabolic:
        raise ValueError(f"{kind} requires a domain with a time horizon")
    if not parabolic and dom.is_parabolic:
        raise ValueError(f"{kind} requires a domain without a time horizon")
    expr = sp.sympify(u_expr)
    from .symbolic import X_SYMBOLS
    lap = sum(sp.diff(expr, X_SYMBOLS[i], 2) for i in range(dom.dim))
    if kind == "RD":
        f_expr = -lap + expr
    elif kind == "Poisson":
        f_expr = -lap
    elif kind == "TRD":
        f_expr = sp.diff(expr, T_SYMBOL) - lap + expr
    else:  # Heat
        f_expr = sp.diff(expr, T_SYMBOL) - lap
    u = scalar_field(expr, dom)
    if not u.vanishes_on_boundary:
        raise ConformityError("manufactured solution must vanish on the boundary")
    u0 = None
    if parabolic:
        u0 = scalar_field(expr.subs(T_SYMBOL, 0), dom.spatial())
    return ProblemCase(
        kind=kind, dom=dom,
        f=scalar_field(float(f_factor) * f_expr, dom, vanishes_on_boundary=False),
        u0=u0, exact_u=u, exact_p=gradient_field(expr, dom),
        solution=str(expr))


# ---------------------------------------------------------------------------
# trigonometric perturbation family
# ---------------------------------------------------------------------------

def _modes(dim: int, n: int):
    """First n spatial mode tuples, ordered deterministically."""
    upper = max(2, int(math.ceil(n ** (1.0 / dim))) + 2)
    all_modes = sorted(itertools.product(range(1, upper + 1), repeat=dim),
                       key=lambda m: (sum(m), m))
    return all_modes[:n]


class _TrigSum:
    """sum_k c_k tau_k(t) prod_i trig(m_i pi (x_i-lo_i)/L_i) with closed-form
    derivatives.  ``funcs`` selects sin or cos per axis per term."""

    def __init__(self, coefs, modes, funcs, tpolys, dom: BoxDomain):
        self.coefs = np.asarray(coefs, dtype=float)
        self.modes = [tuple(m) for m in modes]
        self.funcs = [tuple(f) for f in funcs]
        self.tpolys = [np.asarray(p, dtype=float) for p in tpolys]
        self.dom = dom
        self.lo = np.asarray(dom.lower)
        self.freq = [np.array([m[i] * np.pi / dom.sides[i] for i in range(dom.dim)])
                     for m in self.modes]

    @property
    def vanishes(self) -> bool:
        return all(all(f == "sin" for f in fs) for fs in self.funcs)

    def _split(self, args):
        if self.dom.is_parabolic:
            return args[0], args[1]
        return None, args[0]

    def _axis_factors(self, k, X, d_axis=None):
        """Product over axes of the trig factors of term k; ``d_axis`` takes
        one spatial derivative along that axis."""
        out = np.ones(X.shape[0])
        for i in range(self.dom.dim):
            th = self.freq[k][i] * (X[:, i] - self.lo[i])
            fi = self.funcs[k][i]
            if i == d_axis:
                if fi == "sin":
                    out = out * self.freq[k][i] * np.cos(th)
                else:
                    out = out * (-self.freq[k][i]) * np.sin(th)
            else:
                out = out * (np.sin(th) if fi == "sin" else np.cos(th))
        return out

    def _tfactor(self, k, t, order=0):
        p = self.tpolys[k]
        for _ in range(order):
            p = np.polynomial.polynomial.polyder(p)
        if t is None:
            return float(np.polynomial.polynomial.polyval(0.0, p)) if p.size else 0.0
        return np.polynomial.polynomial.polyval(t, p)

    # evaluators -----------------------------------------------------------
    def value(self, *args):
        t, X = self._split(args)
        out = np.zeros(X.shape[0])
        for k, c in enumerate(self.coefs):
            out += c * self._tfactor(k, t) * self._axis_factors(k, X)
        return out

    def grad(self, *args):
        t, X = self._split(args)
        out = np.zeros((X.shape[0], self.dom.dim))
        for k, c in enumerate(self.coefs):
            tf = c * self._tfactor(k, t)
            for j in range(self.dom.dim):
                out[:, j] += tf * self._axis_factors(k, X, d_axis=j)
        return out

    def laplacian(self, *args):
        t, X = self._split(args)
        out = np.zeros(X.shape[0])
        for k, c in enumerate(self.coefs):
            lam = -float(np.sum(self.freq[k] ** 2))
            out += c * lam * self._tfactor(k, t) * self._axis_factors(k, X)
        return out

    def dt(self, *args):
        t, X = self._split(args)
        out = np.zeros(X.shape[0])
        for k, c in enumerate(self.coefs):
            out += c * self._tfactor(k, t, order=1) * self._axis_factors(k, X)
        return out

    def dt_grad(self, *args):
        t, X = self._split(args)
        out = np.zeros((X.shape[0], self.dom.dim))
        for k, c in enumerate(self.coefs):
            tf = c * self._tfactor(k, t, order=1)
            for j in range(self.dom.dim):
                out[:, j] += tf * self._axis_factors(k, X, d_axis=j)
        return out

    # field views ----------------------------------------------------------
    def scalar_field(self) -> ScalarField:
        td = self.dom.is_parabolic
        return ScalarField(self.value, self.grad, self.laplacian,
                           self.dt if td else None,
                           dim=self.dom.dim, time_dependent=td,
                           vanishes_on_boundary=self.vanishes)

    def gradient_field(self) -> VectorField:
        td = self.dom.is_parabolic
        return VectorField(self.grad, div=self.laplacian,
                           dt=self.dt_grad if td else None,
                           dim=self.dom.dim, time_dependent=td)

    def rotgrad_field(self) -> VectorField:
        """Rotated gradient (-d/dy, d/dx): divergence-free, d = 2 only."""
        if self.dom.dim != 2:
            raise ValueError("rotated gradients require d = 2")
        td = self.dom.is_parabolic

        def value(*args):
            g = self.grad(*args)
            return np.stack([-g[:, 1], g[:, 0]], axis=1)

        def div(*args):
            return np.zeros(args[-1].shape[0])

        def dtval(*args):
            g = self.dt_grad(*args)
            return np.stack([-g[:, 1], g[:, 0]], axis=1)

        return VectorField(value, div, dtval if td else None,
                           dim=2, time_dependent=td)


def _random_trig(dom: BoxDomain, rng, n_terms: int = 3,
                 nonconforming: bool = False) -> _TrigSum:
    pool = _modes(dom.dim, n_terms + 4)
    idx = rng.choice(len(pool), size=n_terms, replace=False)
    modes = [pool[i] for i in sorted(idx)]
    funcs = [("sin",) * dom.dim for _ in modes]
    coefs = rng.standard_normal(n_terms)
    if dom.is_parabolic:
        tpolys = [rng.uniform(-1.0, 1.0, size=3) for _ in modes]
    else:
        tpolys = [np.array([1.0]) for _ in modes]
    if nonconforming:
        # a cosine along the first axis genuinely leaves the boundary-vanishing class
        modes = modes + [modes[0]]
        funcs = funcs + [("cos",) + ("sin",) * (dom.dim - 1)]
        coefs = np.append(coefs, 1.0)
        tpolys = tpolys + [tpolys[0]]
    return _TrigSum(coefs, modes, funcs, tpolys, dom)


_NORMALIZE_RULE = QuadratureRule(space_order=12, time_order=12)


def _normalized(ts: _TrigSum) -> _TrigSum:
    nrm = math.sqrt(norm_sq("L2", ts.scalar_field(), ts.dom, _NORMALIZE_RULE))
    return _TrigSum(ts.coefs / nrm, ts.modes, ts.funcs, ts.tpolys, ts.dom)


def _flux_noise(dom: BoxDomain, rng) -> VectorField:
    """Divergence-known vector noise: a gradient, plus a rotated gradient
    (divergence-free) when d = 2."""
    g = _normalized(_random_trig(dom, rng, nonconforming=True))
    field = g.gradient_field()
    if dom.dim == 2:
        r = _normalized(_random_trig(dom, rng))
        field = field + r.rotgrad_field()
    return field


def perturb(case: ProblemCase, level: str, scale: float, seed: int) -> ApproxPair:
    """Exact pair plus ``scale`` times a seeded analytic perturbation.

    The perturbation is linear in ``scale``; capabilities of the returned
    fields are restricted to exactly the level's contract.
    """
    if level not in LEVELS:
        raise ValueError(f"unknown approximation level: {level!r}")
    if scale < 0:
        raise ValueError("scale must be non-negative")
    rng = np.random.default_rng(seed)
    du_sum = _normalized(_random_trig(case.dom, rng))
    du_conf = du_sum.scalar_field()
    du_nc = _normalized(_random_trig(case.dom, rng, nonconforming=True)).scalar_field()
    dp = _flux_noise(case.dom, rng)

    u, p = case.exact_u, case.exact_p
    if level == "very_conforming":
        u_t = u + scale * du_conf
        p_t = p + scale * du_sum.gradient_field()
    elif level == "conforming_mixed":
        u_t = (u + scale * du_conf).restricted(grad=True, dt=True,
                                               boundary_flag=True)
        p_t = p + scale * dp
    elif level == "semi_conforming_primal":
        u_t = (u + scale * du_conf).restricted(grad=True, dt=True,
                                               boundary_flag=True)
        p_t = (p + scale * dp).restricted()
    elif level == "semi_conforming_dual":
        u_t = (u + scale * du_nc).restricted()
        p_t = p + scale * dp
    else:  # non_conforming
        u_t = (u + scale * du_nc).restricted()
        p_t = (p + scale * dp).restricted()
    return ApproxPair(u_t, p_t, level)


def free_fields(case: ProblemCase, strategy: str = "exact", index: int = 0):
    """A conforming (scalar, flux) pair for the free fields of the
    non-conforming and semi-conforming bounds."""
    if strategy == "exact":
        return case.exact_u, case.exact_p
    if strategy == "coarse":
        return 0.9 * case.exact_u, 0.9 * case.exact_p
    if strategy == "basis":
        dom = case.dom
        mode = _modes(dom.dim, index + 1)[index]
        tpoly = [np.array([1.0, 1.0])] if dom.is_parabolic else [np.array([1.0])]
        ts = _TrigSum([1.0], [mode], [("sin",) * dom.dim], tpoly, dom)
        return ts.scalar_field(), ts.gradient_field()
    raise ValueError(f"unknown free-field strategy: {strategy!r}")


def flux_basis(dom: BoxDomain, n: int):
    """Nested div-conforming flux basis: gradients of the first n sine modes."""
    if n < 1:
        raise ValueError("basis size must be positive")
    tpoly = [np.array([1.0])]
    out = []
    for mode in _modes(dom.dim, n):
        ts = _TrigSum([1.0], [mode], [("sin",) * dom.dim], tpoly, dom)
        out.append(ts.gradient_field())
    return out
