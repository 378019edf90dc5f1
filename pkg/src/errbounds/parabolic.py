"""Space-time identities, error equalities and two-sided bounds for the
time-dependent reaction-diffusion and heat problems on (0, T) x box.
"""
from __future__ import annotations

import math

from .elliptic import two_sided_prefactors
from .fields import ConformityError, ScalarField
from .manufactured import ApproxPair, ProblemCase
from .quadrature import QuadratureRule, norm_sq, trace_norm_sq
from .reports import SpaceTimeErrorReport, relative_residual


def _require(cond: bool, msg: str):
    if not cond:
        raise ConformityError(msg)


def _check_kind(case: ProblemCase, kind: str):
    if case.kind != kind:
        raise ValueError(f"estimator expects a {kind} case, got {case.kind}")


def trd_isometry_check(case: ProblemCase, rule: QuadratureRule) -> SpaceTimeErrorReport:
    """Solution-operator isometry of the parabolic reaction-diffusion problem:
    combined space-time norm of u equals ||f||^2 + ||u0||_H1^2."""
    _check_kind(case, "TRD")
    dom = case.dom
    lhs = norm_sq("Wstar", case.exact_u, dom, rule)
    rhs_f = norm_sq("L2", case.f, dom, rule)
    rhs_u0 = norm_sq("H1", case.u0, dom.spatial(), rule)
    rhs = math.fsum([rhs_f, rhs_u0])
    return SpaceTimeErrorReport(
        components={"combined_norm_sq": lhs, "f_sq": rhs_f, "u0_h1_sq": rhs_u0},
        lhs_total=lhs, rhs_total=rhs,
        rel_residual=relative_residual(lhs, rhs))


def heat_isometry_check(case: ProblemCase, rule: QuadratureRule) -> SpaceTimeErrorReport:
    """Heat solution-operator isometry:
    ||dt u||^2 + ||lap u||^2 + ||grad u(T)||^2 = ||f||^2 + ||grad u0||^2."""
    _check_kind(case, "Heat")
    dom = case.dom
    lhs = norm_sq("triple", case.exact_u, dom, rule)
    rhs_f = norm_sq("L2", case.f, dom, rule)
    rhs_u0 = norm_sq("L2", case.u0.gradient_field(), dom.spatial(), rule)
    rhs = math.fsum([rhs_f, rhs_u0])
    return SpaceTimeErrorReport(
        components={"triple_norm_sq": lhs, "f_sq": rhs_f, "grad_u0_sq": rhs_u0},
        lhs_total=lhs, rhs_total=rhs,
        rel_residual=relative_residual(lhs, rhs))


def omega_identity_check(w: ScalarField, omega: float, dom, rule: QuadratureRule) -> float:
    """Relative residual of the expansion of ||(dt - lap + omega) w||^2 into
    norms plus time traces; omega = 1 and 0 give the two isometry norms."""
    _require(w.vanishes_on_boundary, "w must vanish on the mantle boundary")
    T = dom.time_horizon
    lhs = norm_sq("L2", w.dt_field() - w.laplacian_field() + omega * w, dom, rule)
    rhs = math.fsum([
        norm_sq("L2", w.dt_field(), dom, rule),
        omega ** 2 * norm_sq("L2", w, dom, rule),
        2.0 * omega * norm_sq("L2", w.gradient_field(), dom, rule),
        norm_sq("L2", w.laplacian_field(), dom, rule),
        trace_norm_sq(w, T, "gradient", dom, rule),
        -trace_norm_sq(w, 0.0, "gradient", dom, rule),
        omega * trace_norm_sq(w, T, "value", dom, rule),
        -omega * trace_norm_sq(w, 0.0, "value", dom, rule),
    ])
    return relative_residual(lhs, rhs)


def trd_equality(case: ProblemCase, approx: ApproxPair,
                 rule: QuadratureRule) -> SpaceTimeErrorReport:
    """Mixed space-time error equality for dt - lap + 1."""
    _check_kind(case, "TRD")
    dom = case.dom
    T = dom.time_horizon
    ut, pt = approx.u_tilde, approx.p_tilde
    _require(ut.has_grad and ut.has_dt, "u_tilde must carry grad and dt")
    _require(pt.has_div, "p_tilde must carry a divergence")
    e = case.exact_u - ut
    _require(e.vanishes_on_boundary, "u - u_tilde must vanish on the mantle boundary")
    ep = pt - case.exact_p
    mid = e.dt_field() + ep.div_field()
    mid_sq = norm_sq("L2", mid, dom, rule)
    lhs = {
        "err_l2_sq": norm_sq("L2", e, dom, rule),
        "err_grad_sq": norm_sq("L2", e.gradient_field(), dom, rule),
        "flux_l2_sq": norm_sq("L2", ep, dom, rule),
        "mid_sq": mid_sq,
        "terminal_sq": trace_norm_sq(e, T, "value", dom, rule),
    }
    residual = case.f - ut.dt_field() - ut + pt.div_field()
    rhs = {
        "residual_sq": norm_sq("L2", residual, dom, rule),
        "gap_sq": norm_sq("L2", pt - ut.gradient_field(), dom, rule),
        "initial_sq": norm_sq("L2", case.u0 - ut.at_time(0.0), dom.spatial(), rule),
    }
    lhs_total = math.fsum(lhs.values())
    rhs_total = math.fsum(rhs.values())
    # data-side surrogate of the middle term (needs the exact u)
    mid_data_sq = norm_sq(
        "L2", case.f - ut.dt_field() + pt.div_field() - case.exact_u, dom, rule)
    return SpaceTimeErrorReport(
        components={**{f"lhs.{k}": v for k, v in lhs.items()},
                    **{f"rhs.{k}": v for k, v in rhs.items()}},
        lhs_total=lhs_total, rhs_total=rhs_total,
        rel_residual=relative_residual(lhs_total, rhs_total),
        checks={"mid_identity_rel": relative_residual(mid_sq, mid_data_sq)})


def trd_very_conforming_equality(case: ProblemCase, u_tilde: ScalarField,
                                 rule: QuadratureRule) -> SpaceTimeErrorReport:
    """Primal space-time error equality for dt - lap + 1 with a very
    conforming approximation (dt, laplacian, mantle-boundary vanishing)."""
    _check_kind(case, "TRD")
    dom = case.dom
    T = dom.time_horizon
    _require(u_tilde.has_dt and u_tilde.has_laplacian,
             "u_tilde must carry dt and laplacian")
    e = case.exact_u - u_tilde
    _require(e.vanishes_on_boundary, "u - u_tilde must vanish on the mantle boundary")
    lhs = {
        "err_h11_sq": norm_sq("H11", e, dom, rule),
        "err_grad_hdiv_sq": norm_sq("Hdiv", e.gradient_field(), dom, rule),
        "terminal_h1_sq": trace_norm_sq(e, T, "H1", dom, rule),
    }
    residual = (case.f - u_tilde.dt_field() - u_tilde + u_tilde.laplacian_field())
    rhs = {
        "residual_sq": norm_sq("L2", residual, dom, rule),
        "initial_h1_sq": norm_sq("H1", case.u0 - u_tilde.at_time(0.0),
                                 dom.spatial(), rule),
    }
    lhs_total = math.fsum(lhs.values())
    rhs_total = math.fsum(rhs.values())
    return SpaceTimeErrorReport(
        components={**{f"lhs.{k}": v for k, v in lhs.items()},
                    **{f"rhs.{k}": v for k, v in rhs.items()}},
        lhs_total=lhs_total, rhs_total=rhs_total,
        rel_residual=relative_residual(lhs_total, rhs_total))


def heat_very_conforming_equality(case: ProblemCase, u_tilde: ScalarField,
                                  rule: QuadratureRule) -> SpaceTimeErrorReport:
    """Primal space-time error equality for the heat operator; the
    Friedrichs constant is absent."""
    _check_kind(case, "Heat")
    dom = case.dom
    T = dom.time_horizon
    _require(u_tilde.has_dt and u_tilde.has_laplacian,
             "u_tilde must carry dt and laplacian")
    e = case.exact_u - u_tilde
    _require(e.vanishes_on_boundary, "u - u_tilde must vanish on the mantle boundary")
    lhs = {
        "err_dt_sq": norm_sq("L2", e.dt_field(), dom, rule),
        "err_lap_sq": norm_sq("L2", e.laplacian_field(), dom, rule),
        "terminal_grad_sq": trace_norm_sq(e, T, "gradient", dom, rule),
    }
    residual = case.f + u_tilde.laplacian_field() - u_tilde.dt_field()
    e0 = case.u0 - u_tilde.at_time(0.0)
    rhs = {
        "residual_sq": norm_sq("L2", residual, dom, rule),
        "initial_grad_sq": norm_sq("L2", e0.gradient_field(), dom.spatial(), rule),
    }
    lhs_total = math.fsum(lhs.values())
    rhs_total = math.fsum(rhs.values())
    return SpaceTimeErrorReport(
        components={**{f"lhs.{k}": v for k, v in lhs.items()},
                    **{f"rhs.{k}": v for k, v in rhs.items()}},
        lhs_total=lhs_total, rhs_total=rhs_total,
        rel_residual=relative_residual(lhs_total, rhs_total))


def heat_two_sided(case: ProblemCase, approx: ApproxPair, cf: float,
                   rule: QuadratureRule, gamma: float = 2.0) -> SpaceTimeErrorReport:
    """Two-sided space-time estimate for the heat equation with conforming
    mixed approximations; both lower candidates are reported individually."""
    _check_kind(case, "Heat")
    dom = case.dom
    T = dom.time_horizon
    ut, pt = approx.u_tilde, approx.p_tilde
    _require(ut.has_grad and ut.has_dt, "u_tilde must carry grad and dt")
    _require(pt.has_div, "p_tilde must carry a divergence")
    e = case.exact_u - ut
    _require(e.vanishes_on_boundary, "u - u_tilde must vanish on the mantle boundary")
    residual_sq = norm_sq("L2", case.f + pt.div_field() - ut.dt_field(), dom, rule)
    gap_sq = norm_sq("L2", pt - ut.gradient_field(), dom, rule)
    initial_sq = norm_sq("L2", case.u0 - ut.at_time(0.0), dom.spatial(), rule)
    ep = pt - case.exact_p
    mid_sq = norm_sq("L2", e.dt_field() + ep.div_field(), dom, rule)
    true = {
        "err_grad_sq": norm_sq("L2", e.gradient_field(), dom, rule),
        "flux_l2_sq": norm_sq("L2", ep, dom, rule),
        "mid_sq": mid_sq,
        "terminal_sq": trace_norm_sq(e, T, "value", dom, rule),
    }
    true_total = math.fsum(true.values())
    a, b = two_sided_prefactors(cf, gamma)
    upper = a * residual_sq + b * gap_sq + b * initial_sq
    lower = {
        "residual_plus_half_gap": residual_sq + 0.5 * gap_sq,
        "gap_plus_initial_scaled": (gap_sq + initial_sq) / (1.0 + cf ** 2),
    }
    lower_max = max(lower.values())
    return SpaceTimeErrorReport(
        components={**true, "residual_sq": residual_sq, "gap_sq": gap_sq,
                    "initial_sq": initial_sq},
        lower_bounds=lower, upper_bound=upper, true_total=true_total,
        ordering_ok=(lower_max <= true_total + 1e-9
                     and true_total <= upper + 1e-9),
        checks={"fdivpt_identity_rel": relative_residual(residual_sq, mid_sq)})
