"""Gevrey-order estimation and the polygon-vs-growth comparison.

A series is of Gevrey order s when its coefficient norms obey
v_n <= B * C^n * n!^s.  Fitting log v_n against the regressors 1, n, and
log n! recovers s as the coefficient of log n!; the polygon's reciprocal
slope is an upper bound for it, so the verdict compares the fitted order
against that bound plus a finite-size tolerance.  The bound need not be
tight: convergent solutions fit near zero and still pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .backends import log_scalar, parse_rational
from .nagumo import NormResult, nagumo_profile
from .pde import CauchyProblem, MomentPDE
from .polygon import k1_inverse
from .solver import FormalSolution


class FitError(ValueError):
    """Not enough usable points for a growth fit."""


@dataclass(frozen=True)
class OrderFit:
    s_hat: float
    logB_hat: float
    logA_hat: float
    window: tuple[int, int]
    rms_residual: float
    n_points: int


def default_window(n_max: int) -> tuple[int, int]:
    # early terms bias the asymptotic fit; use the upper half
    return (math.ceil(n_max / 2), n_max)


def _norm_value(v):
    if isinstance(v, NormResult):
        return v.value
    return v


def estimate_order(norms: Sequence, window: Optional[tuple[int, int]] = None
                   ) -> OrderFit:
    """Least squares of log v_n = logA + n*logB + s*log n! over the window.

    norms is indexed by n starting at 0; zero entries are excluded.  Needs
    at least five positive entries in the window.
    """
    n_top = len(norms) - 1
    lo, hi = window if window is not None else default_window(n_top)
    if not (0 <= lo <= hi <= n_top):
        raise FitError(f"window [{lo}, {hi}] outside data range [0, {n_top}]")
    rows = []
    logs = []
    for n in range(lo, hi + 1):
        value = _norm_value(norms[n])
        if value is None or not value > 0:
            continue
        if isinstance(value, float) and not math.isfinite(value):
            raise FitError(f"non-finite norm at n={n}")
        rows.append([1.0, float(n), math.lgamma(n + 1)])
        logs.append(log_scalar(value))
    if len(rows) < 5:
        raise FitError(
            f"only {len(rows)} positive norms in window [{lo}, {hi}]; need 5"
        )
    design = np.array(rows)
    target = np.array(logs)
    coef, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < 3:
        raise FitError("degenerate design matrix; widen the window")
    fitted = design @ coef
    rms = float(np.sqrt(np.mean((fitted - target) ** 2)))
    return OrderFit(
        s_hat=float(coef[2]),
        logB_hat=float(coef[1]),
        logA_hat=float(coef[0]),
        window=(lo, hi),
        rms_residual=rms,
        n_points=len(rows),
    )


def alpha0(pde: MomentPDE) -> tuple[int, ...]:
    """The profile scaling multi-index: per variable,
    floor(max over terms of alpha_k / q) + 1.  All ones for an empty term set."""
    if not pde.terms:
        return (1,) * pde.num_vars
    out = []
    for k in range(pde.num_vars):
        best = max(
            Fraction(term.z_derivatives[k], term.q(pde.M))
            for term in pde.terms
        )
        out.append(int(math.floor(best)) + 1)
    return tuple(out)


@dataclass(frozen=True)
class TheoremReport:
    k1_inverse: Fraction
    s_hat: float
    window: tuple[int, int]
    rms_residual: float
    verdict: str
    mode: str
    tolerance: Fraction
    fit: Optional[OrderFit]
    alpha0: Optional[tuple[int, ...]]
    lower_bound_norms: bool

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def as_dict(self) -> dict:
        return {
            "k1_inverse": str(self.k1_inverse),
            "s_hat": self.s_hat,
            "s_hat_raw": self.fit.s_hat if self.fit is not None else self.s_hat,
            "window": list(self.window),
            "rms_residual": self.rms_residual,
            "verdict": self.verdict,
            "mode": self.mode,
            "tolerance": str(self.tolerance),
            "alpha0": list(self.alpha0) if self.alpha0 is not None else None,
            "lower_bound_norms": self.lower_bound_norms,
        }


DEFAULT_TOLERANCE = Fraction(3, 20)


def verify_theorem(problem: CauchyProblem, solution: FormalSolution, *,
                   mode: Optional[str] = None,
                   r=None, rho=None,
                   window: Optional[tuple[int, int]] = None,
                   tolerance=None) -> TheoremReport:
    """Compare the fitted growth order of the solved coefficients with the
    polygon bound.

    mode `nagumo_profile` uses v_n = ||u_n|| at n*alpha0 with the problem's
    order vector; mode `sup_proxy` uses the ell-1 norms at radius rho.  The
    reported s_hat lives on the Gevrey scale (clamped at 0 from below); the
    verdict is PASS when s_hat <= 1/k1 + tolerance, so a fit well below the
    bound still passes (the bound is one-sided).
    """
    est = problem.estimation
    mode = mode or est.mode or "sup_proxy"
    if mode not in ("sup_proxy", "nagumo_profile"):
        raise ValueError(f"unknown mode {mode!r}")
    tolerance = parse_rational(
        tolerance if tolerance is not None
        else (est.tolerance if est.tolerance is not None else DEFAULT_TOLERANCE)
    )
    k1_inv = k1_inverse(problem.pde)

    a0 = None
    if mode == "nagumo_profile":
        r = parse_rational(r if r is not None
                           else (est.r if est.r is not None else Fraction(1, 2)))
        a0 = alpha0(problem.pde)
        values = nagumo_profile(solution, a0, r, problem.pde.s)
        lower = any(v.lower_bound for v in values)
        norms = [v.value for v in values]
    else:
        rho = parse_rational(rho if rho is not None
                             else (est.rho if est.rho is not None
                                   else Fraction(1, 4)))
        norms = [
            solution.coefficient(n).ell1_norm(rho)
            for n in range(solution.valid_t_order + 1)
        ]
        lower = any(
            not solution.coefficient(n).is_exact()
            for n in range(solution.valid_t_order + 1)
        )

    lo, hi = window if window is not None else (
        est.window if est.window is not None
        else default_window(solution.valid_t_order)
    )
    hi = min(hi, solution.valid_t_order)
    if lo > hi:
        raise FitError(
            f"window [{lo}, {hi}] empty after clamping to the trusted range"
        )

    if all(not _norm_value(norms[n]) > 0 for n in range(lo, hi + 1)):
        # all-zero tail: a polynomial (convergent) solution
        fit = None
        s_hat = 0.0
        rms = 0.0
    else:
        fit = estimate_order(norms, (lo, hi))
        # Gevrey orders are non-negative; a factorial exponent fitting below
        # zero (norms decaying faster than geometrically) means a convergent
        # series, order 0.  The raw coefficient stays available in `fit`.
        s_hat = max(fit.s_hat, 0.0)
        rms = fit.rms_residual

    verdict = "PASS" if s_hat <= float(k1_inv) + float(tolerance) else "FAIL"
    return TheoremReport(
        k1_inverse=k1_inv,
        s_hat=s_hat,
        window=(lo, hi),
        rms_residual=rms,
        verdict=verdict,
        mode=mode,
        tolerance=tolerance,
        fit=fit,
        alpha0=a0,
        lower_bound_norms=lower,
    )
