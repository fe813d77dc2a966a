"""Finite-dimensional duality checks.

The defect functional measures how far a candidate pair ``(Om, Phi)`` is
from satisfying ``<Om x, y> + <x, Phi y> = O(||x|| ||y||)``.  Pairs of
block vectors are paired by the crossed bilinear form
``<(b*, a*), (a, b)> = <b*, b> + <a*, a>``; the crossing is what lets a
twisted sum act on itself as its own dual, and the alternating-sign block
symmetry supplies the correct sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .catalog import RochbergVector, kp_12, kp_21, kp_map, kp_rochberg_norm, u_n
from .errors import TwistlabError, UnsupportedMapError
from .quasilinear import EstimateReport, QMap, _sup_scan
from .samplers import Sampler
from .spaces import SpaceSpec, TwistedVector, domain_norm, lp_norm, vec


def conjugate_exponent(p: float) -> float:
    if math.isinf(p):
        return 1.0
    if p == 1.0:
        return math.inf
    return p / (p - 1.0)


def dual_space(spec: SpaceSpec) -> SpaceSpec:
    """Dual description at finite dimension (Lp -> Lq, l2(w) -> l2(1/w))."""
    if spec.kind == "lp":
        return SpaceSpec.lp(conjugate_exponent(spec.p))
    if spec.kind == "weighted_l2":
        return SpaceSpec.weighted_l2(1.0 / spec.weights)
    raise UnsupportedMapError(f"no dual description for space kind {spec.kind!r}")


@dataclass(eq=False)
class DualPairSpec:
    """A map with a candidate dual, paired through the crossed bilinear form."""

    omega: QMap
    phi: QMap

    def __post_init__(self):
        for om in (self.omega, self.phi):
            if om.ambient_blocks != 1 or om.source_blocks != 1:
                raise UnsupportedMapError(
                    "dual pair defects are computed for vector-valued maps")
        if self.omega.dim != self.phi.dim:
            raise TwistlabError("dual pair members must share a dimension")

    def defect(self, x: np.ndarray, y: np.ndarray) -> float:
        return abs(float(np.dot(self.omega(x), y) + np.dot(x, self.phi(y))))


def duality_defect(pair: DualPairSpec, sampler: Sampler,
                   n_samples: int) -> EstimateReport:
    """Empirical sup of ``|<Om x, y> + <x, Phi y>| / (||x||_X ||y||_Y*)``."""
    nx = pair.omega.source.norm
    ny = dual_space(pair.omega.target).norm

    def ratio(x, y):
        return pair.defect(x, y) / (nx(x) * ny(y))

    report = _sup_scan("duality-defect", ratio, sampler.bislot(nx, ny),
                       n_samples, sampler.seed, sampler.dim)
    return report


def duality_defect_on(pair: DualPairSpec, x, y) -> float:
    """Normalized defect at one explicit pair of inputs."""
    x = vec(x)
    y = vec(y)
    nx = pair.omega.source.norm(x)
    ny = dual_space(pair.omega.target).norm(y)
    return pair.defect(x, y) / (nx * ny)


# ---------------------------------------------------------------------------
# Block pairing and the order-two display
# ---------------------------------------------------------------------------


def block_pairing(u, v) -> float:
    """Crossed pairing of block tuples: block j meets block n-1-j."""
    ub = u.blocks if isinstance(u, RochbergVector) else tuple(u)
    vb = v.blocks if isinstance(v, RochbergVector) else tuple(v)
    if len(ub) != len(vb):
        raise TwistlabError("paired block vectors must share an order")
    n = len(ub)
    return float(sum(np.dot(ub[j], vb[n - 1 - j]) for j in range(n)))


def kp_order2_defect_on(x, z: TwistedVector, apply_sign_flip: bool = True) -> float:
    """Normalized order-two duality defect at one sample.

    Pairs the two-block value of the order-two differential with a unit
    twisted vector via the crossed form, plus the companion map applied to
    the sign-flipped twisted vector.  ``apply_sign_flip=False`` drops the
    block symmetry; along uniform vectors the defect then grows without
    bound, which is the point of the symmetry.
    """
    x = vec(x)
    z1, z2 = z.beta, z.x
    p_hi, p_lo = kp_12(x)
    crossed = float(np.dot(p_hi, z2) + np.dot(p_lo, z1))
    w1 = -z1 if apply_sign_flip else z1
    companion = float(np.dot(x, kp_21(w1, z2)))
    r2 = SpaceSpec.twisted_sum(kp_map(x.size)).norm(z)
    return abs(crossed + companion) / (lp_norm(x, 2.0) * r2)


def kp_order2_duality_defect(dim: int, sampler: Sampler, n_samples: int,
                             apply_sign_flip: bool = True) -> EstimateReport:
    """Empirical sup of the order-two duality defect over seeded samples."""
    base = kp_map(dim)

    def ratio(x, z):
        return kp_order2_defect_on(x, z, apply_sign_flip=apply_sign_flip)

    stream = zip(sampler.vectors(salt=101), sampler.twisted(base, salt=211))
    name = "kp-order2-duality" if apply_sign_flip else "kp-order2-duality-unsigned"
    return _sup_scan(name, ratio, stream, n_samples, sampler.seed, sampler.dim)


# ---------------------------------------------------------------------------
# Self-duality of the block scale
# ---------------------------------------------------------------------------


def _unit_rochberg_stream(n: int, dim: int, sampler: Sampler,
                          salt: int) -> Iterator[RochbergVector]:
    if n == 1:
        for x in sampler.vectors(salt=salt):
            yield RochbergVector((x,))
        return
    base = kp_map(dim)
    if n == 2:
        for tv in sampler.twisted(base, salt=salt):
            yield RochbergVector((tv.beta, tv.x))
        return
    xs = sampler.vectors(salt=salt + 1)
    ys = sampler.vectors(salt=salt + 2)
    zs = sampler.vectors(salt=salt + 3)
    while True:
        x = next(xs)
        d2, d1 = kp_12(x)
        for blocks in ((d2, d1, x),
                       (next(ys), next(zs), np.zeros(dim)),
                       (d2 + next(ys), d1 + next(zs), x)):
            nrm = kp_rochberg_norm(blocks)
            if nrm > 0.0 and math.isfinite(nrm):
                yield RochbergVector(tuple(b / nrm for b in blocks))


def zn_selfduality_check(n: int, dim: int, sampler: Sampler,
                         n_samples: int) -> EstimateReport:
    """Sup of the crossed pairing against the sign-flipped first slot.

    Finiteness and dimension-stability of this statistic is the finite
    shadow of the self-duality diagram; the order-one case reduces to
    Cauchy-Schwarz and never exceeds one.  The pointwise sign identities
    (order one: identity; order two: ``(y, x) -> (-y, x)``; the flip is an
    involution) are verified exactly before sampling starts.
    """
    if n not in (1, 2, 3):
        raise TwistlabError("self-duality checks run at orders 1, 2 and 3")
    _verify_sign_identities(dim)

    def ratio(u: RochbergVector, v: RochbergVector) -> float:
        return abs(block_pairing(u_n(u), v))

    left = _unit_rochberg_stream(n, dim, sampler, salt=301)
    right = _unit_rochberg_stream(n, dim, sampler, salt=409)
    return _sup_scan(f"z{n}-selfduality", ratio, zip(left, right),
                     n_samples, sampler.seed, sampler.dim)


def _verify_sign_identities(dim: int) -> None:
    rng = np.random.default_rng(0)
    a = rng.standard_normal(dim)
    b = rng.standard_normal(dim)
    one = u_n(RochbergVector((a,)))
    if not np.array_equal(one.blocks[0], a):
        raise TwistlabError("order-one sign flip is not the identity")
    two = u_n(RochbergVector((a, b)))
    if not (np.array_equal(two.blocks[0], -a) and np.array_equal(two.blocks[1], b)):
        raise TwistlabError("order-two sign flip is not (y, x) -> (-y, x)")
    twice = u_n(two)
    if not all(np.array_equal(p, q) for p, q in
               zip(twice.blocks, (a, b))):
        raise TwistlabError("the sign flip is not an involution")


# ---------------------------------------------------------------------------
# Domain annihilator surrogate for diagonal maps
# ---------------------------------------------------------------------------


@dataclass
class PerpDomainReport:
    """Exact index-set identity between a diagonal map and its dual candidate."""

    threshold: float
    duality_constant: float
    heavy_via_omega: tuple[int, ...]
    heavy_via_phi: tuple[int, ...]

    @property
    def sets_equal(self) -> bool:
        return self.heavy_via_omega == self.heavy_via_phi


def perp_domain_check(omega: QMap, phi: QMap, sampler: Sampler, n_samples: int,
                      threshold: float = 2.0) -> PerpDomainReport:
    """Compare domain-heavy coordinate sets computed through both maps.

    At finite dimension the annihilator statement survives as an index-set
    identity: a basis functional is uncomfortable on the domain of the map
    exactly when it is uncomfortable on the domain of the candidate dual.
    Both sides are computed independently, through each map's own domain
    norm of the basis vectors, and compared for exact equality.  Only
    diagonal maps are supported; anything else is reported as such.
    """
    if not (omega.is_diagonal() and phi.is_diagonal()):
        raise UnsupportedMapError(
            "the domain annihilator surrogate is defined for diagonal maps only")
    constant = duality_defect(DualPairSpec(omega, phi), sampler, n_samples)
    eye = np.eye(omega.dim)
    heavy_omega = tuple(i for i in range(omega.dim)
                        if domain_norm(eye[i], omega) > threshold)
    heavy_phi = tuple(i for i in range(phi.dim)
                      if domain_norm(eye[i], phi) > threshold)
    return PerpDomainReport(threshold=threshold,
                            duality_constant=constant.sup_value,
                            heavy_via_omega=heavy_omega,
                            heavy_via_phi=heavy_phi)
