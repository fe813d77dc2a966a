"""Reusable exact-identity and growth-law checks.

Each function returns the worst observed deviation (or the named values)
so that callers can compare against their own tolerance; the experiment
runner and the verification suite share these primitives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import (
    as_weights,
    kp,
    kp_12,
    kp_rochberg_norm,
    rochberg_differential,
    rochberg_inclusion,
    rochberg_norm,
    rochberg_projection,
    symmetric_kothe_map,
    translation,
    u_n,
)
from .errors import InversionRefusedError
from .quasilinear import EstimateReport, QMap, _sup_scan, make_inverse
from .samplers import Sampler
from .spaces import (
    TwistedVector,
    block_add,
    block_scale,
    block_sub,
    range_norm_upper,
    twisted_norm,
    weighted_l2_norm,
)
from .witnesses import WitnessFn, diagonal_witness


def _rel(dev: float, scale: float) -> float:
    return dev / max(scale, 1e-300)


def selector_identity_deviation(omega: QMap, sampler: Sampler,
                                n_samples: int) -> float:
    """Max relative deviation of ``||(y,0)|| = ||y||`` and ``||(Om x, x)|| = ||x||``."""
    worst = 0.0
    ys = sampler.elements_for_target(omega, salt=601)
    xs = sampler.elements(omega, salt=701)
    for _ in range(n_samples):
        y = next(ys)
        lhs = twisted_norm(TwistedVector(y, omega.zero_input()), omega)
        rhs = omega.target.norm(y)
        worst = max(worst, _rel(abs(lhs - rhs), rhs))
        x = next(xs)
        lhs = twisted_norm(TwistedVector(omega(x), x), omega)
        rhs = omega.source.norm(x)
        worst = max(worst, _rel(abs(lhs - rhs), rhs))
    return worst


def homogeneity_deviation(omega: QMap, sampler: Sampler, n_samples: int,
                          scalars=(-3.5, 2.0, 0.25, -1.0)) -> float:
    """Max relative deviation of ``Om(lam x) = lam Om(x)`` over samples."""
    worst = 0.0
    xs = sampler.elements(omega, salt=811)
    for _ in range(n_samples):
        x = next(xs)
        base = omega(x)
        scale = omega.target.norm(base)
        for lam in scalars:
            lhs = omega(block_scale(lam, x))
            dev = omega.target.norm(block_sub(lhs, block_scale(lam, base)))
            worst = max(worst, _rel(dev, max(abs(lam) * scale, 1.0)))
    return worst


def kp_growth_law_deviation(dim: int) -> tuple[float, float]:
    """Relative deviations from the closed-form growth along uniform vectors.

    The twisted norm of ``(KP x, -x)`` equals ``2 ln n + 1`` and the
    boundedness ratio equals ``ln n``.
    """
    from .catalog import kp_map

    omega = kp_map(dim)
    x = np.ones(dim) / math.sqrt(dim)
    t = twisted_norm(TwistedVector(kp(x), -x), omega)
    expect_t = 2.0 * math.log(dim) + 1.0
    ratio = omega.target.norm(omega(x)) / omega.source.norm(x)
    expect_r = math.log(dim)
    return _rel(abs(t - expect_t), expect_t), _rel(abs(ratio - expect_r), expect_r)


def inversion_roundtrip_deviation(omega: QMap, witness: WitnessFn,
                                  sampler: Sampler, n_samples: int) -> float:
    """Max relative deviation of ``Om^-1 Om x = x`` and ``Om Om^-1 b = b``."""
    inverse = make_inverse(omega, witness)
    worst = 0.0
    xs = sampler.vectors(salt=911)
    bs = sampler.vectors(salt=929)
    for _ in range(n_samples):
        x = next(xs)
        dev = float(np.linalg.norm(inverse(omega(x)) - x))
        worst = max(worst, _rel(dev, float(np.linalg.norm(x))))
        b = next(bs)
        dev = float(np.linalg.norm(omega(inverse(b)) - b))
        worst = max(worst, _rel(dev, float(np.linalg.norm(b))))
    return worst


def inversion_refusal_fires(dim: int) -> tuple[bool, str]:
    """Refusal must trigger exactly when some weight equals one."""
    w_bad = np.full(dim, 0.5)
    w_bad[dim // 2] = 1.0
    try:
        diagonal_witness(symmetric_kothe_map(w_bad))
        return False, "no refusal although a weight equals one"
    except InversionRefusedError as err:
        if dim // 2 not in err.coordinates:
            return False, f"refusal did not name coordinate {dim // 2}"
    try:
        diagonal_witness(symmetric_kothe_map(np.full(dim, 0.5)))
    except InversionRefusedError:
        return False, "refusal fired although no weight equals one"
    return True, "refusal fires exactly at unit weights"


def translation_deviations(z: float, theta: float, w, sampler: Sampler,
                           n_samples: int) -> tuple[float, float]:
    """Max relative deviations of the involution and the weighted isometry."""
    w = as_weights(w)
    w_theta = w.values ** (2.0 * theta - 1.0)
    w_z = w.values ** (2.0 * z - 1.0)
    worst_inv = 0.0
    worst_iso = 0.0
    for _, x in zip(range(n_samples), sampler.vectors(salt=333)):
        back = translation(translation(x, z, theta, w), theta, z, w)
        worst_inv = max(worst_inv, _rel(float(np.linalg.norm(back - x)),
                                        float(np.linalg.norm(x))))
        lhs = weighted_l2_norm(translation(x, z, theta, w), w_z)
        rhs = weighted_l2_norm(x, w_theta)
        worst_iso = max(worst_iso, _rel(abs(lhs - rhs), rhs))
    return worst_inv, worst_iso


def diagonal_duality_deviation(omega: QMap, sampler: Sampler,
                               n_samples: int) -> float:
    """Max defect of the pair ``(m, -m)``; bounds the numerical noise floor."""
    from .duality import DualPairSpec, duality_defect

    neg = QMap(name=f"-{omega.name}", source=omega.source, target=omega.target,
               fn=lambda x: -omega(x), dim=omega.dim,
               diagonal=None if omega.diagonal is None else -omega.diagonal)
    report = duality_defect(DualPairSpec(omega, neg), sampler, n_samples)
    return report.sup_value


def rochberg_structure_deviations(w, dim: int) -> dict[str, float]:
    """Exactness of the order-three block structure.

    Checks the two-block closed form, the selector identity, exactness of
    inclusion followed by projection, and that the sign flip squares to the
    identity.
    """
    w = as_weights(w)
    rng = np.random.default_rng(20240817)
    x = rng.standard_normal(dim)
    lw = w.log
    d2, d1 = rochberg_differential(x, w, 3)
    closed = max(
        float(np.max(np.abs(d2 - 2.0 * lw**2 * x))),
        float(np.max(np.abs(d1 - 2.0 * lw * x))),
    ) / max(float(np.max(np.abs(x))), 1.0)

    selector = abs(rochberg_norm((d2, d1, x), w) - float(np.linalg.norm(x)))
    selector /= float(np.linalg.norm(x))

    # order-one element included at the top, projected onto the complement
    y = rng.standard_normal(dim)
    projected = rochberg_projection(rochberg_inclusion((y,), 3), 2)
    proj_dev = max(float(np.max(np.abs(b))) for b in projected.blocks)

    v = u_n(u_n((x, y, rng.standard_normal(dim))))
    flip_dev = max(float(np.max(np.abs(a - b)))
                   for a, b in zip(v.blocks, (x, y)))
    return {
        "order3-closed-form": closed,
        "selector": selector,
        "projection-of-inclusion": proj_dev,
        "sign-flip-involution": flip_dev,
    }


def range_bound_dominated(omega: QMap, witness: WitnessFn | None,
                          sampler: Sampler, n_samples: int) -> float:
    """Worst violation of ``range bound <= ||(beta, x)||`` over fresh x.

    Only sound when the refined candidate is globally optimal, which for a
    diagonal map needs ``min |m| >= 1`` (true for the default weights).
    """
    worst = 0.0
    bs = sampler.vectors(salt=551)
    xs = sampler.vectors(salt=557)
    for _ in range(n_samples):
        beta = next(bs)
        bound = range_norm_upper(beta, omega, witness).value
        for x in (next(xs), np.zeros(omega.dim)):
            worst = max(worst, bound - twisted_norm(TwistedVector(beta, x), omega))
    return worst


@dataclass
class UIsoSummary:
    forward: EstimateReport
    backward: EstimateReport
    triangle_constant: float
    selection_norm: float

    @property
    def explicit_bound(self) -> float:
        c, b = self.triangle_constant, self.selection_norm
        return c + c * b + 1.0

    @property
    def within_bound(self) -> bool:
        return (self.forward.sup_value <= self.explicit_bound
                and self.backward.sup_value <= self.explicit_bound)


def u_isomorphism_summary(omega: QMap, witness: WitnessFn, sampler: Sampler,
                          n_samples: int) -> UIsoSummary:
    """Flip constants plus the run's own ingredients for the explicit bound.

    The bound ``C + C ||B|| + 1`` uses the empirical triangle constant of
    the twisted quasi-norm and the empirical norm of the witness selection
    ``b -> (b, J b)`` measured against the certified range bound.
    """
    from .quasilinear import check_U_isomorphism

    fwd, bwd = check_U_isomorphism(omega, witness, sampler, n_samples)
    tri = twisted_triangle_constant(omega, sampler, n_samples)
    sel = 0.0
    for _, y in zip(range(n_samples), sampler.vectors(salt=677)):
        num = twisted_norm(TwistedVector(y, witness.find(y)), omega)
        den = range_norm_upper(y, omega, witness).value
        sel = max(sel, num / den)
    return UIsoSummary(forward=fwd, backward=bwd,
                       triangle_constant=tri.sup_value, selection_norm=sel)


def twisted_triangle_constant(omega: QMap, sampler: Sampler,
                              n_samples: int) -> EstimateReport:
    """Empirical sup of ``||u + v|| / (||u|| + ||v||)`` in the twisted sum."""

    def ratio(u: TwistedVector, v: TwistedVector) -> float:
        s = TwistedVector(block_add(u.beta, v.beta), block_add(u.x, v.x))
        return twisted_norm(s, omega) / (twisted_norm(u, omega)
                                         + twisted_norm(v, omega))

    left = sampler.twisted(omega, salt=881)
    right = sampler.twisted(omega, salt=883)
    return _sup_scan("twisted-triangle", ratio, zip(left, right), n_samples,
                     sampler.seed, sampler.dim)


def kp12_selector_deviation(dim: int, sampler: Sampler, n_samples: int) -> float:
    """Selector identity at order three: ``||(D2 x, x)||_(R3) = ||x||``."""
    worst = 0.0
    for _, x in zip(range(n_samples), sampler.vectors(salt=441)):
        d2, d1 = kp_12(x)
        lhs = kp_rochberg_norm((d2, d1, x))
        rhs = float(np.linalg.norm(x))
        worst = max(worst, _rel(abs(lhs - rhs), rhs))
    return worst
