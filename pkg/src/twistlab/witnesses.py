"""Witness selectors: given a target value, find a near-minimal preimage.

A witness for a map ``Om`` sends ``beta`` to some ``x`` making the twisted
norm ``||beta - Om x|| + ||x||`` small.  Diagonal maps admit the exact
inverse; the Kalton-Peck map gets an iterative selector built on the scalar
equation ``2 t log(t/s) = beta_i`` with the outer norm ``s`` solved for
self-consistency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import InversionRefusedError, WitnessDivergence
from .spaces import vec


@dataclass
class WitnessFn:
    """A preimage selector for a fixed map, with convergence diagnostics."""

    for_map: Any
    find: Callable[[np.ndarray], np.ndarray]
    name: str = "witness"
    target_ratio: float | None = None
    last_diagnostics: dict = field(default_factory=dict, repr=False)


def zero_witness(omega) -> WitnessFn:
    """Always returns the zero preimage; bounds the range norm by ||.||_Y."""
    return WitnessFn(for_map=omega, find=lambda beta: np.zeros_like(vec(beta)),
                     name="zero")


def diagonal_witness(omega) -> WitnessFn:
    """Exact inverse ``beta -> beta / m`` of a diagonal map.

    Refused, naming the offending coordinates, when some multiplier
    vanishes (for the symmetric weighted pair this is exactly ``w_i = 1``).
    """
    m = getattr(omega, "diagonal", None)
    if m is None:
        raise InversionRefusedError(f"map {omega.name!r} is not diagonal")
    m = np.asarray(m, dtype=float)
    dead = np.nonzero(m == 0.0)[0]
    if dead.size:
        raise InversionRefusedError(
            f"diagonal map {omega.name!r} has zero multipliers at coordinates "
            f"{dead.tolist()} (weight equal to one); inversion refused",
            coordinates=dead.tolist(),
        )

    def find(beta: np.ndarray) -> np.ndarray:
        return vec(beta) / m

    return WitnessFn(for_map=omega, find=find, name="diagonal-inverse")


# ---------------------------------------------------------------------------
# Kalton-Peck witness (p = 2)
# ---------------------------------------------------------------------------


def _solve_branch(tau_abs: np.ndarray, s: float) -> np.ndarray:
    """Roots of ``2 t log(t/s) = -tau`` on the monotone branch ``(0, s/e]``.

    On that branch the left side decreases from 0 to ``-2s/e``; targets
    beyond the reachable range are clamped to the branch endpoint.
    """
    t = np.zeros_like(tau_abs)
    cap = 2.0 * s / math.e
    active = tau_abs > 0.0
    clamped = active & (tau_abs >= cap)
    t[clamped] = s / math.e
    solve = active & ~clamped
    if np.any(solve):
        tau = tau_abs[solve]
        lo = np.zeros_like(tau)
        hi = np.full_like(tau, s / math.e)
        for _ in range(56):
            mid = 0.5 * (lo + hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                val = np.where(mid > 0.0, 2.0 * mid * np.log(mid / s), 0.0)
            # decreasing branch: value above -tau means the root lies right
            go_right = val > -tau
            lo = np.where(go_right, mid, lo)
            hi = np.where(go_right, hi, mid)
        t[solve] = 0.5 * (lo + hi)
    return t


def _kp_coordinates(beta_abs: np.ndarray, s: float) -> np.ndarray:
    return _solve_branch(beta_abs, s)


def kp_preimage(beta, dim_hint: int | None = None, tol: float = 1e-10,
                max_iter: int = 200) -> tuple[np.ndarray, dict]:
    """Approximate preimage of ``beta`` under the p=2 Kalton-Peck map.

    Coordinates are solved on the small branch with ``sign x_i = -sign b_i``
    (outputs below the norm carry a negative log factor) for a trial norm
    ``s``; ``s`` is then driven to the self-consistent value ``||x(s)||_2``
    by a damped fixed point, with a bisection fallback on the residual
    ``||x(s)|| - s`` when the fixed point stalls.
    """
    beta = vec(beta)
    n = beta.size if dim_hint is None else dim_hint
    b = np.abs(beta)
    sign = -np.sign(beta)
    norm_b = float(np.sqrt(np.dot(beta, beta)))
    diag: dict = {"iterations": 0, "converged": False, "method": "fixed-point"}
    if norm_b == 0.0:
        diag["converged"] = True
        return np.zeros_like(beta), diag

    def radius(s: float) -> float:
        return float(np.linalg.norm(_kp_coordinates(b, s)))

    s = norm_b / (1.0 + math.log(n))
    converged = False
    for it in range(max_iter):
        r = radius(s)
        if r == 0.0:
            break
        if abs(r - s) <= tol * max(s, r):
            s = r
            converged = True
            diag["iterations"] = it + 1
            break
        s = 0.5 * (s + r)

    if not converged:
        # bracket the self-consistency residual psi(s) = ||x(s)|| - s
        diag["method"] = "bisection-fallback"
        lo, hi = norm_b * 1e-8, norm_b * 16.0
        for _ in range(60):
            if radius(lo) - lo > 0.0:
                break
            lo *= 0.5
        for _ in range(60):
            if radius(hi) - hi < 0.0:
                break
            hi *= 2.0
        if radius(lo) - lo > 0.0 > radius(hi) - hi:
            for it in range(200):
                mid = 0.5 * (lo + hi)
                if radius(mid) - mid > 0.0:
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= tol * hi:
                    converged = True
                    diag["iterations"] = it + 1
                    break
            s = 0.5 * (lo + hi)

    if not converged:
        # No self-consistent norm exists (targets supported on fewer than
        # e^2 coordinates have none on the monotone branch).  Select the
        # best near-minimal witness over a norm grid, zero included.
        diag["method"] = "grid-fallback"
        s = _grid_select(beta, b, sign, norm_b, n)
        if s == 0.0:
            diag["converged"] = True
            diag["norm"] = 0.0
            return np.zeros_like(beta), diag

    x = sign * _kp_coordinates(b, s)
    diag["converged"] = True
    diag["norm"] = s
    return x, diag


def _grid_select(beta: np.ndarray, b: np.ndarray, sign: np.ndarray,
                 norm_b: float, n: int) -> float:
    """Norm value minimizing the twisted-norm surrogate over a log grid.

    Returns 0.0 when the zero witness beats every gridded candidate.
    """

    def surrogate(s: float) -> float:
        t = sign * _kp_coordinates(b, s)
        nt = float(np.linalg.norm(t))
        if nt == 0.0:
            return norm_b
        residual = beta - 2.0 * t * _safe_log_ratio(t, nt)
        return float(np.linalg.norm(residual) + nt)

    best_s, best_val = 0.0, norm_b  # zero witness: ||beta - 0|| + 0
    anchor = norm_b / (1.0 + math.log(n))
    for s in np.geomspace(anchor * 1e-2, norm_b * 8.0, 24):
        val = surrogate(float(s))
        if val < best_val:
            best_s, best_val = float(s), val
    return best_s


def _safe_log_ratio(t: np.ndarray, s: float) -> np.ndarray:
    out = np.zeros_like(t)
    nz = t != 0.0
    out[nz] = np.log(np.abs(t[nz]) / s)
    return out


def kp_witness(omega) -> WitnessFn:
    """Iterative preimage selector for the p=2 Kalton-Peck map."""
    if getattr(omega, "params", {}).get("p", 2.0) != 2.0:
        raise WitnessDivergence("the Kalton-Peck witness is implemented at p = 2")

    w = WitnessFn(for_map=omega, find=None, name="kp-iterative")

    def find(beta: np.ndarray) -> np.ndarray:
        x, diag = kp_preimage(beta, dim_hint=omega.dim)
        w.last_diagnostics = diag
        return x

    w.find = find
    return w
