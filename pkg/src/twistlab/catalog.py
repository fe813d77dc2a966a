"""Closed-form map catalog: Kalton-Peck maps and their order-two variants,
weighted diagonal differentials with their inverses, translation maps,
higher-order weighted differentials with the recursive block quasi-norm,
and the alternating-sign block symmetry.

Coordinates where an input vanishes contribute zero to every logarithmic
map (the continuity extension forced by homogeneity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import TwistlabError, UnknownMapError, UnsupportedMapError
from .quasilinear import QMap
from .spaces import OrliczFn, SpaceSpec, lp_norm, vec
from .witnesses import WitnessFn, diagonal_witness, kp_witness


def _log_ratio_to_norm(x: np.ndarray, nrm: float) -> np.ndarray:
    """``log(|x_i| / nrm)`` with zero at vanishing coordinates."""
    out = np.zeros_like(x)
    nz = x != 0.0
    out[nz] = np.log(np.abs(x[nz]) / nrm)
    return out


def kp(x, p: float = 2.0) -> np.ndarray:
    """Kalton-Peck map ``p * x * log(|x| / ||x||_p)`` (zero at x = 0)."""
    if not p > 1.0:
        raise TwistlabError(f"the Kalton-Peck map needs p > 1, got {p}")
    x = vec(x)
    nrm = lp_norm(x, p)
    if nrm == 0.0:
        return np.zeros_like(x)
    return p * x * _log_ratio_to_norm(x, nrm)


def kp_12(x) -> tuple[np.ndarray, np.ndarray]:
    """Order-two differential ``2x (log^2 |x|/||x||, log |x|/||x||)`` at p=2."""
    x = vec(x)
    nrm = lp_norm(x, 2.0)
    if nrm == 0.0:
        return np.zeros_like(x), np.zeros_like(x)
    ell = _log_ratio_to_norm(x, nrm)
    return 2.0 * x * ell**2, 2.0 * x * ell


def kp_21(y, x) -> np.ndarray:
    """Order-two companion map on pairs (y, x) at p=2.

    With ``u = y - 2x log(|x|/||x||)`` this is
    ``2u log(|u|/||u||) + 2x log^2(|x|/||x||)``; the first term is zero
    when ``u`` vanishes.
    """
    y = vec(y)
    x = vec(x)
    if y.shape != x.shape:
        raise TwistlabError("kp_21 needs blocks of equal dimension")
    nx = lp_norm(x, 2.0)
    ell = _log_ratio_to_norm(x, nx) if nx > 0.0 else np.zeros_like(x)
    u = y - 2.0 * x * ell
    return kp(u, 2.0) + 2.0 * x * ell**2


# ---------------------------------------------------------------------------
# Weights and weighted differentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Strictly positive weights, optionally checked to be non-increasing."""

    values: np.ndarray
    non_increasing: bool = False

    def __post_init__(self):
        w = vec(self.values)
        object.__setattr__(self, "values", w)
        if np.any(w <= 0.0):
            raise TwistlabError("weights must be strictly positive")
        if self.non_increasing and np.any(np.diff(w) > 0.0):
            raise TwistlabError("weight sequence is not non-increasing")

    @property
    def dim(self) -> int:
        return self.values.size

    @property
    def log(self) -> np.ndarray:
        return np.log(self.values)


def as_weights(w) -> WeightVector:
    return w if isinstance(w, WeightVector) else WeightVector(vec(w))


def kothe_differential(x, w0, w1) -> np.ndarray:
    """Diagonal differential ``log(w1/w0) * x`` of a weighted couple."""
    x = vec(x)
    w0 = as_weights(w0)
    w1 = as_weights(w1)
    if not (w0.dim == w1.dim == x.size):
        raise TwistlabError("weights and vector must share a dimension")
    return np.log(w1.values / w0.values) * x


def translation(x, z: float, theta: float, w) -> np.ndarray:
    """Translation map between interpolation parameters theta -> z.

    The diagonal power ``w^(2(theta - z))`` is the unique normalization
    that evaluates to the identity at ``z = theta`` and is an isometry
    from l2(w_theta) onto l2(w_z) for the symmetric couple.
    """
    for name, val in (("z", z), ("theta", theta)):
        if not 0.0 < val < 1.0:
            raise TwistlabError(f"translation parameter {name} must lie in (0, 1)")
    x = vec(x)
    w = as_weights(w)
    if w.dim != x.size:
        raise TwistlabError("weights and vector must share a dimension")
    return w.values ** (2.0 * (theta - z)) * x


def rochberg_differential(x, w, n: int) -> tuple[np.ndarray, ...]:
    """Higher-order weighted differential with blocks ``2^k/k! log^k(w) x``.

    Returns ``n - 1`` blocks ordered highest power first, i.e. the orders
    ``k = n-1, ..., 1``.  Powers are powers of the logarithm, not iterated
    logarithms.
    """
    if n < 2:
        raise TwistlabError("rochberg_differential needs order n >= 2")
    x = vec(x)
    w = as_weights(w)
    if w.dim != x.size:
        raise TwistlabError("weights and vector must share a dimension")
    lw = w.log
    blocks = []
    for k in range(n - 1, 0, -1):
        coeff = 2.0**k / math.factorial(k)
        blocks.append(coeff * lw**k * x)
    return tuple(blocks)


@dataclass(frozen=True, eq=False)
class RochbergVector:
    """Block tuple ``(a_{n-1}, ..., a_1, a_0)``, highest order leftmost."""

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(vec(b) for b in self.blocks)
        if not blocks:
            raise TwistlabError("a block vector needs at least one block")
        if len({b.size for b in blocks}) != 1:
            raise TwistlabError("all blocks must share a dimension")
        object.__setattr__(self, "blocks", blocks)

    @property
    def order(self) -> int:
        return len(self.blocks)

    @property
    def dim(self) -> int:
        return self.blocks[0].size


def _as_blocks(v) -> tuple[np.ndarray, ...]:
    if isinstance(v, RochbergVector):
        return v.blocks
    if isinstance(v, tuple):
        return RochbergVector(v).blocks
    return (vec(v),)


def rochberg_norm(v, w) -> float:
    """Recursive quasi-norm of the weighted higher-order spaces.

    Order one is the plain l2 norm; order n subtracts the (n-1)-block
    differential of the base coordinate from the leading blocks, measures
    the remainder at order n-1, and adds the l2 norm of the base.
    """
    blocks = _as_blocks(v)
    n = len(blocks)
    if n == 1:
        return lp_norm(blocks[0], 2.0)
    a0 = blocks[-1]
    diff = rochberg_differential(a0, w, n)
    head = tuple(b - d for b, d in zip(blocks[:-1], diff))
    return rochberg_norm(head if len(head) > 1 else head[0], w) + lp_norm(a0, 2.0)


def kp_rochberg_norm(v) -> float:
    """Recursive quasi-norm of the p=2 Kalton-Peck scale, orders 1 to 3.

    The order-n recursion subtracts the Kalton-Peck differential of the
    base coordinate (order two: the map itself; order three: its two-block
    variant).  Higher orders have no closed-form differential here.
    """
    blocks = _as_blocks(v)
    n = len(blocks)
    if n == 1:
        return lp_norm(blocks[0], 2.0)
    if n == 2:
        a1, a0 = blocks
        return lp_norm(a1 - kp(a0), 2.0) + lp_norm(a0, 2.0)
    if n == 3:
        a2, a1, a0 = blocks
        d2, d1 = kp_12(a0)
        return kp_rochberg_norm((a2 - d2, a1 - d1)) + lp_norm(a0, 2.0)
    raise UnsupportedMapError("the Kalton-Peck scale norm is closed-form only up to order 3")


def u_n(v) -> RochbergVector:
    """Blockwise alternating sign flip: block of order k gets ``(-1)^k``.

    Order two sends ``(y, x)`` to ``(-y, x)``; applying the map twice is
    the identity.
    """
    blocks = _as_blocks(v)
    n = len(blocks)
    flipped = tuple(((-1.0) ** (n - 1 - i)) * b for i, b in enumerate(blocks))
    return RochbergVector(flipped)


def rochberg_inclusion(v, n: int) -> RochbergVector:
    """Embed an order-m block vector into order n: top blocks, zero base."""
    blocks = _as_blocks(v)
    m = len(blocks)
    if n < m:
        raise TwistlabError("inclusion target order must be at least the source order")
    dim = blocks[0].size
    return RochbergVector(blocks + tuple(np.zeros(dim) for _ in range(n - m)))


def rochberg_projection(v, k: int) -> RochbergVector:
    """Project an order-n block vector onto its bottom k blocks."""
    blocks = _as_blocks(v)
    if not 1 <= k <= len(blocks):
        raise TwistlabError("projection order must lie between 1 and the order")
    return RochbergVector(blocks[len(blocks) - k:])


# ---------------------------------------------------------------------------
# QMap builders and the registry
# ---------------------------------------------------------------------------


def kp_map(dim: int, p: float = 2.0) -> QMap:
    return QMap(name="kp", source=SpaceSpec.lp(p), target=SpaceSpec.lp(p),
                fn=lambda x: kp(x, p), dim=dim, params={"p": p})


def kp12_map(dim: int) -> QMap:
    base = kp_map(dim)
    return QMap(name="kp12", source=SpaceSpec.lp(2.0),
                target=SpaceSpec.twisted_sum(base),
                fn=kp_12, dim=dim, ambient_blocks=2)


def kp21_map(dim: int) -> QMap:
    base = kp_map(dim)
    return QMap(name="kp21", source=SpaceSpec.twisted_sum(base),
                target=SpaceSpec.lp(2.0),
                fn=lambda z: kp_21(z[0], z[1]), dim=dim, source_blocks=2)


def kothe_map(w0, w1, name: str = "kothe") -> QMap:
    w0 = as_weights(w0)
    w1 = as_weights(w1)
    m = np.log(w1.values / w0.values)
    return QMap(name=name, source=SpaceSpec.lp(2.0), target=SpaceSpec.lp(2.0),
                fn=lambda x: m * vec(x), dim=w0.dim, diagonal=m)


def symmetric_kothe_map(w) -> QMap:
    """The differential ``x -> 2 log(w) x`` of the couple (1/w, w) on l2."""
    w = as_weights(w)
    m = 2.0 * w.log
    return QMap(name="kothe", source=SpaceSpec.lp(2.0), target=SpaceSpec.lp(2.0),
                fn=lambda x: m * vec(x), dim=w.dim, diagonal=m)


def translation_map(z: float, theta: float, w) -> QMap:
    w = as_weights(w)
    mult = w.values ** (2.0 * (theta - z))
    w_theta = w.values ** (2.0 * theta - 1.0)
    w_z = w.values ** (2.0 * z - 1.0)
    return QMap(name="translation",
                source=SpaceSpec.weighted_l2(w_theta),
                target=SpaceSpec.weighted_l2(w_z),
                fn=lambda x: mult * vec(x), dim=w.dim, diagonal=mult,
                params={"z": z, "theta": theta})


def rochberg_map(w, n: int) -> QMap:
    """The (n-1)-block weighted differential generating the order-n space."""
    if n < 2:
        raise TwistlabError("rochberg_map needs order n >= 2")
    w = as_weights(w)
    if n == 2:
        target = SpaceSpec.lp(2.0)

        def fn(x):
            return rochberg_differential(x, w, 2)[0]

        return QMap(name="rochberg2", source=SpaceSpec.lp(2.0), target=target,
                    fn=fn, dim=w.dim, diagonal=2.0 * w.log)
    target = SpaceSpec.twisted_sum(rochberg_map(w, n - 1))
    return QMap(name=f"rochberg{n}", source=SpaceSpec.lp(2.0), target=target,
                fn=lambda x: rochberg_differential(x, w, n), dim=w.dim,
                ambient_blocks=n - 1)


def kp_scale_map(n: int, dim: int) -> QMap:
    """Kalton-Peck analogue of the block differential at order n (n <= 3)."""
    if n == 2:
        return kp_map(dim)
    if n == 3:
        return kp12_map(dim)
    raise UnsupportedMapError("Kalton-Peck scale maps exist here only for n <= 3")


def default_weights(dim: int) -> WeightVector:
    """Harmonic-type weights 1/(i+2): non-increasing, tending to zero."""
    return WeightVector(1.0 / (np.arange(dim, dtype=float) + 2.0),
                        non_increasing=True)


def orlicz_domain_fn(p: float = 2.0) -> OrliczFn:
    """The Orlicz function whose sequence space is the Kalton-Peck domain."""
    return OrliczFn(p=p, mode="fp")


def orlicz_range_fn(p: float = 2.0) -> OrliczFn:
    """The conjugate-germ Orlicz function matching the Kalton-Peck range."""
    return OrliczFn(p=p, mode="gq")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    build: Callable[[int], QMap]
    witness: Callable[[QMap], WitnessFn] | None
    description: str


CATALOG: dict[str, CatalogEntry] = {
    "kp": CatalogEntry(
        "kp", lambda dim: kp_map(dim), kp_witness,
        "Kalton-Peck map on l2 (p = 2)"),
    "kp12": CatalogEntry(
        "kp12", kp12_map, None,
        "order-two Kalton-Peck differential, vector to pair"),
    "kp21": CatalogEntry(
        "kp21", kp21_map, None,
        "order-two Kalton-Peck companion, pair to vector"),
    "kothe": CatalogEntry(
        "kothe", lambda dim: symmetric_kothe_map(default_weights(dim)),
        diagonal_witness,
        "diagonal differential 2 log(w) of the symmetric weighted couple"),
    "translation": CatalogEntry(
        "translation",
        lambda dim: translation_map(0.25, 0.5, default_weights(dim)),
        diagonal_witness,
        "bounded translation map between interpolation parameters"),
    "rochberg": CatalogEntry(
        "rochberg", lambda dim: rochberg_map(default_weights(dim), 3), None,
        "two-block weighted differential of the order-three space"),
}


def build_map(name: str, dim: int) -> QMap:
    try:
        entry = CATALOG[name]
    except KeyError:
        raise UnknownMapError(
            f"unknown map {name!r}; registered: {sorted(CATALOG)}") from None
    return entry.build(dim)
