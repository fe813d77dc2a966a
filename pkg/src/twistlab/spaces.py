"""Norm evaluation for every space used by the lab.

Covers the plain ``l_p`` and weighted ``l_2`` norms, Orlicz functions with
their Luxemburg norm, and the composite quasi-norms built on top of a
homogeneous map: the twisted-sum quasi-norm ``||b - Om x|| + ||x||``, the
domain quasi-norm ``||x|| + ||Om x||`` and a certified upper bound for the
range quasi-norm.

Elements are 1-D float arrays; maps with tuple-valued outputs (higher order
differentials) use tuples of such arrays, handled by the block helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, NamedTuple

import numpy as np

from .errors import BracketError, DimensionMismatchError, TwistlabError

# Documented accuracy of the Luxemburg norm.  The bisection itself is run to
# near machine precision (see ``luxemburg_norm``) so that the norm is
# homogeneous well below 1e-12; this constant is the guaranteed bound.
TOL_LUX = 1e-10

Blocks = Any  # one ndarray or a tuple of equal-length ndarrays


def vec(entries) -> np.ndarray:
    """Validate and return a finite 1-D float64 vector."""
    x = np.asarray(entries, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-D vector, got shape {x.shape}")
    if x.size == 0:
        raise DimensionMismatchError("vectors must have positive dimension")
    if not np.all(np.isfinite(x)):
        raise TwistlabError("vector entries must be finite (no NaN or inf)")
    return x


class TwistedVector(NamedTuple):
    """Pair (beta, x); its size is measured relative to a map's twisted norm."""

    beta: Blocks
    x: Blocks


def is_blocks(v) -> bool:
    return isinstance(v, tuple) and not isinstance(v, TwistedVector)


def block_map(f: Callable, *vs) -> Blocks:
    """Apply ``f`` blockwise, preserving the single-array/tuple shape."""
    if is_blocks(vs[0]):
        n = len(vs[0])
        if any(not is_blocks(v) or len(v) != n for v in vs[1:]):
            raise DimensionMismatchError("mismatched block structure")
        return tuple(f(*[v[i] for v in vs]) for i in range(n))
    if any(is_blocks(v) for v in vs[1:]):
        raise DimensionMismatchError("mismatched block structure")
    if len(vs) > 1:
        shapes = {np.shape(v) for v in vs}
        if len(shapes) != 1:
            raise DimensionMismatchError(f"mismatched dimensions: {sorted(shapes)}")
    return f(*vs)


def block_sub(a: Blocks, b: Blocks) -> Blocks:
    return block_map(np.subtract, a, b)


def block_add(a: Blocks, b: Blocks) -> Blocks:
    return block_map(np.add, a, b)


def block_scale(lam: float, a: Blocks) -> Blocks:
    return block_map(lambda u: lam * u, a)


# ---------------------------------------------------------------------------
# Elementary norms
# ---------------------------------------------------------------------------


def lp_norm(x, p: float) -> float:
    """``(sum |x_i|^p)^(1/p)``, or ``max |x_i|`` for p = inf.

    Quasi-norms with p < 1 are rejected.
    """
    if not (p >= 1.0 or math.isinf(p)):
        raise TwistlabError(f"lp_norm requires p >= 1 or p = inf, got p={p}")
    x = vec(x)
    a = np.abs(x)
    if math.isinf(p):
        return float(a.max())
    if p == 1.0:
        return float(a.sum())
    if p == 2.0:
        return float(np.sqrt(np.dot(x, x)))
    return float(np.sum(a**p) ** (1.0 / p))


def weighted_l2_norm(x, w) -> float:
    """l2 norm of the coordinatewise product ``w * x``; weights must be > 0."""
    x = vec(x)
    w = vec(w)
    if w.shape != x.shape:
        raise DimensionMismatchError("weight and vector dimensions differ")
    if np.any(w <= 0.0):
        raise TwistlabError("weights must be strictly positive")
    y = w * x
    return float(np.sqrt(np.dot(y, y)))


# ---------------------------------------------------------------------------
# Orlicz functions and the Luxemburg norm
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrliczFn:
    """An Orlicz function given by its germ at zero plus a linear extension.

    ``fp`` mode is ``t^p |log t|^p`` and ``gq`` mode is ``t^q |log t|^(-q)``
    with ``q = p/(p-1)``, both exact on ``(0, cutoff]`` and extended linearly
    with slope ``slope`` beyond the cutoff.  The default slope is the tangent
    at the cutoff, which keeps the function increasing and continuous.

    ``power`` mode is the plain ``t^p``; it exists so that the Luxemburg
    machinery can be checked against the closed-form l_p norm.
    """

    p: float
    mode: str = "fp"
    cutoff: float = math.exp(-2.0)
    slope: float | None = None

    def __post_init__(self):
        if self.p <= 1.0:
            raise TwistlabError(f"OrliczFn requires p > 1, got {self.p}")
        if self.mode not in ("fp", "gq", "power"):
            raise TwistlabError(f"unknown Orlicz mode {self.mode!r}")
        if not (0.0 < self.cutoff < 1.0):
            raise TwistlabError("cutoff must lie in (0, 1)")
        # fp is only increasing below 1/e; the tangent slope is positive there
        if self.mode == "fp" and self.cutoff >= math.exp(-1.0):
            raise TwistlabError("fp mode needs cutoff < exp(-1)")
        if self.slope is None:
            object.__setattr__(self, "slope", self._tangent_slope())
        if self.mode != "power" and not self.slope > 0.0:
            raise TwistlabError("extension slope must be positive")

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    def _tangent_slope(self) -> float:
        t0 = self.cutoff
        ell = -math.log(t0)
        if self.mode == "fp":
            return self.p * t0 ** (self.p - 1.0) * ell ** (self.p - 1.0) * (ell - 1.0)
        if self.mode == "gq":
            q = self.q
            return q * t0 ** (q - 1.0) * ell ** (-q - 1.0) * (ell + 1.0)
        return 1.0  # unused in power mode


def orlicz_eval(phi: OrliczFn, t) -> float | np.ndarray:
    """Evaluate ``phi`` pointwise on t >= 0 (total on the half line)."""
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    a = np.atleast_1d(arr)
    if np.any(a < 0.0):
        raise TwistlabError("Orlicz functions are evaluated on t >= 0")
    if phi.mode == "power":
        out = a**phi.p
    else:
        out = np.zeros_like(a)
        core = (a > 0.0) & (a <= phi.cutoff)
        ext = a > phi.cutoff
        if np.any(core):
            tc = a[core]
            ell = -np.log(tc)
            if phi.mode == "fp":
                out[core] = tc**phi.p * ell**phi.p
            else:
                out[core] = tc**phi.q * ell**-phi.q
        if np.any(ext):
            phi0 = float(orlicz_eval(phi, phi.cutoff))
            out[ext] = phi0 + phi.slope * (a[ext] - phi.cutoff)
    return float(out[0]) if scalar else out


def luxemburg_norm(x, phi: OrliczFn) -> float:
    """``inf { rho > 0 : sum_i phi(|x_i| / rho) <= 1 }`` by bisection.

    The scale is factored out first (``rho`` is solved for the sup-normalized
    direction) and the bisection runs until the bracket collapses to adjacent
    floats, so the result is accurate and homogeneous far below ``TOL_LUX``.
    """
    x = vec(x)
    a = np.abs(x)
    s = float(a.max())
    if s == 0.0:
        return 0.0
    u = a / s

    def modular(rho: float) -> float:
        return float(np.sum(orlicz_eval(phi, u / rho)))

    hi = 1.0
    m_hi = modular(hi)
    for _ in range(200):
        if m_hi <= 1.0:
            break
        nxt = modular(2.0 * hi)
        if nxt > m_hi + 1e-12:
            raise BracketError("modular failed to decrease while expanding the bracket")
        hi *= 2.0
        m_hi = nxt
    else:
        raise BracketError("no upper bracket with modular <= 1 found")
    lo = hi / 2.0
    for _ in range(2000):
        if modular(lo) > 1.0:
            break
        hi = lo
        lo /= 2.0
    else:
        raise BracketError("no lower bracket with modular > 1 found")

    # invariant: modular(lo) > 1 >= modular(hi) throughout
    while hi - lo > 1e-15 * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if modular(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return s * hi


# ---------------------------------------------------------------------------
# Space descriptions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpaceSpec:
    """A named recipe for evaluating a (quasi-)norm on vectors or blocks.

    Composite kinds (``domain``, ``range``, ``twisted``) hold the map they
    are built from; ``twisted`` norms act on ``TwistedVector`` pairs or on
    flat block tuples whose last block is the base coordinate.
    """

    kind: str
    p: float | None = None
    weights: np.ndarray | None = None
    phi: OrliczFn | None = None
    omega: Any = None
    witness: Any = None
    label: str = ""

    @staticmethod
    def lp(p: float) -> "SpaceSpec":
        if not (p >= 1.0 or math.isinf(p)):
            raise TwistlabError("Lp spaces require p >= 1 or p = inf")
        return SpaceSpec(kind="lp", p=p, label=f"l{p:g}")

    @staticmethod
    def weighted_l2(w) -> "SpaceSpec":
        w = vec(w)
        if np.any(w <= 0.0):
            raise TwistlabError("weights must be strictly positive")
        return SpaceSpec(kind="weighted_l2", weights=w, label="l2(w)")

    @staticmethod
    def orlicz(phi: OrliczFn) -> "SpaceSpec":
        return SpaceSpec(kind="orlicz", phi=phi, label=f"orlicz[{phi.mode},p={phi.p:g}]")

    @staticmethod
    def domain_of(omega) -> "SpaceSpec":
        return SpaceSpec(kind="domain", omega=omega, label=f"dom({omega.name})")

    @staticmethod
    def range_of(omega, witness=None) -> "SpaceSpec":
        return SpaceSpec(kind="range", omega=omega, witness=witness,
                         label=f"ran({omega.name})")

    @staticmethod
    def twisted_sum(omega) -> "SpaceSpec":
        return SpaceSpec(kind="twisted", omega=omega, label=f"tw({omega.name})")

    def norm(self, v) -> float:
        if self.kind == "lp":
            return lp_norm(v, self.p)
        if self.kind == "weighted_l2":
            return weighted_l2_norm(v, self.weights)
        if self.kind == "orlicz":
            return luxemburg_norm(v, self.phi)
        if self.kind == "domain":
            return domain_norm(v, self.omega)
        if self.kind == "range":
            return range_norm_upper(v, self.omega, self.witness).value
        if self.kind == "twisted":
            return twisted_norm(v, self.omega)
        raise TwistlabError(f"unknown space kind {self.kind!r}")


# ---------------------------------------------------------------------------
# Composite quasi-norms
# ---------------------------------------------------------------------------


def _split_twisted(v, omega) -> tuple[Blocks, Blocks]:
    if isinstance(v, TwistedVector):
        return v.beta, v.x
    if is_blocks(v):
        k = getattr(omega, "ambient_blocks", 1)
        if len(v) != k + 1:
            raise DimensionMismatchError(
                f"twisted element needs {k + 1} blocks, got {len(v)}")
        beta = v[0] if k == 1 else tuple(v[:k])
        return beta, v[k]
    raise DimensionMismatchError("twisted norms act on pairs (beta, x)")


def twisted_norm(v, omega) -> float:
    """Quasi-norm ``||beta - Om x||_Y + ||x||_X`` of a pair ``(beta, x)``."""
    beta, x = _split_twisted(v, omega)
    diff = block_sub(beta, omega(x))
    return omega.target.norm(diff) + omega.source.norm(x)


def domain_norm(x, omega) -> float:
    """Quasi-norm ``||x||_X + ||Om x||_Y`` of the graph-domain of a map."""
    return omega.source.norm(x) + omega.target.norm(omega(x))


@dataclass
class RangeBound:
    """Certified upper bound for a range quasi-norm, with its witness."""

    value: float
    witness: Blocks
    method: str

    def __float__(self) -> float:
        return self.value


def range_norm_upper(beta, omega, witness=None) -> RangeBound:
    """Upper bound ``||(beta, x)||_Om >= ||beta||_R`` over candidate witnesses.

    The zero witness is always tried; a supplied witness function adds its
    candidate.  For diagonal maps the bound is refined coordinatewise: the
    scalar cost ``|b - m t| + |t|`` is piecewise linear with kinks only at
    ``t = 0`` and ``t = b/m``, so the per-coordinate minimum is exact.
    """
    if not is_blocks(beta):
        beta = vec(beta)
    candidates: list[tuple[str, Blocks]] = []
    if hasattr(omega, "zero_input"):
        candidates.append(("zero", omega.zero_input()))
    elif is_blocks(beta):
        candidates.append(("zero", np.zeros_like(beta[0])))
    else:
        candidates.append(("zero", np.zeros_like(beta)))

    diag = getattr(omega, "diagonal", None)
    if diag is not None and not is_blocks(beta):
        m = np.asarray(diag, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            t_inv = np.where(m != 0.0, beta / np.where(m == 0.0, 1.0, m), 0.0)
        # kink minimum: keep t = b/m only where it strictly beats t = 0
        refined = np.where(np.abs(t_inv) < np.abs(beta), t_inv, 0.0)
        refined = np.where(m != 0.0, refined, 0.0)
        candidates.append(("diagonal-kink", refined))
        if np.all(m != 0.0):
            candidates.append(("diagonal-inverse", beta / m))
    if witness is not None:
        candidates.append((getattr(witness, "name", "witness"), witness.find(beta)))

    best_val = math.inf
    best: tuple[str, Blocks] | None = None
    for method, x in candidates:
        val = twisted_norm(TwistedVector(beta, x), omega)
        if val < best_val:
            best_val = val
            best = (method, x)
    assert best is not None
    return RangeBound(value=best_val, witness=best[1], method=best[0])
