"""Seeded sample streams for the empirical constant estimators.

Two kinds of streams are provided and usually interleaved: normalized
Gaussian draws, and a structured catalog (uniform vectors, spikes, dyadic
blocks, decaying profiles).  The structured families matter because the
extremal configurations of logarithmic maps are block-shaped; pure Gaussian
sampling systematically under-estimates their constants.

Every stream is a pure function of ``(dim, seed, kind)`` plus a small salt,
so estimator reruns are bit-identical.
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from .errors import TwistlabError, UnsupportedMapError
from .spaces import TwistedVector, block_add, block_scale, twisted_norm

SAMPLER_KINDS = ("gaussian", "structured", "both")


def _l2(x: np.ndarray) -> float:
    return float(np.sqrt(np.dot(x, x)))


def flatten_twisted(tv: TwistedVector) -> tuple:
    """Turn a twisted vector into a flat block tuple usable as a map input."""
    if isinstance(tv.beta, tuple):
        return (*tv.beta, tv.x)
    return (tv.beta, tv.x)


def structured_catalog(dim: int) -> list[np.ndarray]:
    """Deterministic unnormalized profiles: uniform, spikes, blocks, decays."""
    vs = [np.ones(dim)]
    alt = np.ones(dim)
    alt[1::2] = -1.0
    vs.append(alt)
    for pos in sorted({0, dim // 2, dim - 1}):
        e = np.zeros(dim)
        e[pos] = 1.0
        vs.append(e)
    width = 1
    while width <= dim:
        block = np.zeros(dim)
        block[:width] = 1.0
        vs.append(block)
        width *= 2
    idx = np.arange(dim, dtype=float)
    vs.append(1.0 / np.sqrt(idx + 1.0))
    vs.append(0.9**idx)
    if dim >= 2:
        half = np.ones(dim)
        half[dim // 2:] = -1.0
        vs.append(half)
    return vs


def structured_pair_catalog(dim: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic pairs, including the disjoint-block near-extremals."""
    pairs: list[tuple[np.ndarray, np.ndarray]] = []
    if dim >= 2:
        first = np.zeros(dim)
        first[: dim // 2] = 1.0
        second = np.zeros(dim)
        second[dim // 2:] = 1.0
        pairs.append((first, second))
    cat = structured_catalog(dim)
    uniform, alternating = cat[0], cat[1]
    spike0 = np.zeros(dim)
    spike0[0] = 1.0
    spike_last = np.zeros(dim)
    spike_last[-1] = 1.0
    pairs.append((uniform, spike0))
    pairs.append((spike0, spike_last))
    pairs.append((uniform, alternating))
    width = 1
    while 2 * width <= dim:
        a = np.zeros(dim)
        a[:width] = 1.0
        b = np.zeros(dim)
        b[width: 2 * width] = 1.0
        pairs.append((a, b))
        width *= 2
    idx = np.arange(dim, dtype=float)
    harmonic = 1.0 / np.sqrt(idx + 1.0)
    pairs.append((harmonic, uniform))
    return pairs


class Sampler:
    """Deterministic sample source for one dimension and seed."""

    def __init__(self, dim: int, seed: int, kind: str = "both"):
        if kind not in SAMPLER_KINDS:
            raise TwistlabError(f"sampler kind must be one of {SAMPLER_KINDS}")
        if dim < 1:
            raise TwistlabError("sampler dimension must be positive")
        self.dim = dim
        self.seed = int(seed)
        self.kind = kind

    def _rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, self.dim, salt]))

    # -- raw streams --------------------------------------------------------

    def _gaussian_raw(self, salt: int) -> Iterator[np.ndarray]:
        rng = self._rng(salt)
        while True:
            g = rng.standard_normal(self.dim)
            if np.any(g != 0.0):
                yield g

    def _structured_raw(self, salt: int) -> Iterator[np.ndarray]:
        catalog = structured_catalog(self.dim)
        yield from catalog
        rng = self._rng(salt + 1)
        while True:
            v = catalog[int(rng.integers(len(catalog)))].copy()
            if bool(rng.integers(2)):
                v *= np.where(rng.integers(2, size=self.dim) == 0, 1.0, -1.0)
            if bool(rng.integers(2)):
                v = v[rng.permutation(self.dim)]
            if np.any(v != 0.0):
                yield v

    def _raw(self, salt: int) -> Iterator[np.ndarray]:
        if self.kind == "gaussian":
            return self._gaussian_raw(salt)
        if self.kind == "structured":
            return self._structured_raw(salt)

        def interleave() -> Iterator[np.ndarray]:
            s = self._structured_raw(salt)
            g = self._gaussian_raw(salt + 137)
            while True:
                yield next(s)
                yield next(g)

        return interleave()

    # -- normalized element streams -----------------------------------------

    def vectors(self, norm=None, salt: int = 0) -> Iterator[np.ndarray]:
        """Unit vectors in the given norm (l2 by default)."""
        norm = norm or _l2
        for v in self._raw(salt):
            nv = norm(v)
            if nv > 0.0 and math.isfinite(nv):
                yield v / nv

    def pairs(self, norm=None, salt: int = 0) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Pairs of unit vectors; the structured part cycles disjoint blocks."""
        norm = norm or _l2

        def normalize(v):
            return v / norm(v)

        if self.kind != "gaussian":
            for a, b in structured_pair_catalog(self.dim):
                yield normalize(a), normalize(b)
        left = self.vectors(norm, salt=salt + 11)
        right = self.vectors(norm, salt=salt + 23)
        while True:
            yield next(left), next(right)

    def bislot(self, norm_left, norm_right, salt: int = 0) -> Iterator[tuple]:
        """Independent unit samples in two (possibly different) norms."""
        left = self.vectors(norm_left, salt=salt + 31)
        right = self.vectors(norm_right, salt=salt + 47)
        while True:
            yield next(left), next(right)

    def families(self, k_max: int, norm=None, salt: int = 0) -> Iterator[list[np.ndarray]]:
        """Families of 2..k_max unit vectors (spikes, disjoint blocks, draws)."""
        norm = norm or _l2

        def normalize(v):
            return v / norm(v)

        if self.kind != "gaussian":
            for k in range(2, min(k_max, self.dim, 8) + 1):
                yield [normalize(np.eye(self.dim)[i]) for i in range(k)]
            width, members = 1, []
            while 2 * width <= self.dim and len(members) < k_max:
                block = np.zeros(self.dim)
                block[width - 1: 2 * width - 1] = 1.0
                members.append(normalize(block))
                width *= 2
            if len(members) >= 2:
                yield members
        rng = self._rng(salt + 5)
        vecs = self.vectors(norm, salt=salt + 13)
        while True:
            k = int(rng.integers(2, k_max + 1))
            yield [next(vecs) for _ in range(k)]

    def twisted(self, omega, salt: int = 0) -> Iterator[TwistedVector]:
        """Twisted vectors of unit quasi-norm for a map with vector source."""
        if omega.source_blocks != 1:
            raise UnsupportedMapError("twisted sampling needs a vector source")

        def beta_like(source_of_vecs) -> np.ndarray | tuple:
            if omega.ambient_blocks == 1:
                return next(source_of_vecs)
            return tuple(next(source_of_vecs) for _ in range(omega.ambient_blocks))

        def normalize(beta, x) -> TwistedVector:
            v = TwistedVector(beta, x)
            t = twisted_norm(v, omega)
            if not (t > 0.0 and math.isfinite(t)):
                return None
            return TwistedVector(block_scale(1.0 / t, beta), x / t)

        def candidates() -> Iterator[TwistedVector]:
            xs = self.vectors(salt=salt + 3)
            ys = self.vectors(salt=salt + 9)
            zero = np.zeros(self.dim)
            while True:
                x = next(xs)
                yield normalize(beta_like(ys), zero)          # (y, 0)
                yield normalize(omega(x), x)                  # graph point
                mix = block_add(omega(x), beta_like(ys))
                yield normalize(mix, x)                       # graph + target shift
                yield normalize(beta_like(ys), next(xs))      # unstructured pair

        for v in candidates():
            if v is not None:
                yield v

    # -- source-shaped dispatch ----------------------------------------------

    def elements(self, omega, salt: int = 0) -> Iterator:
        """Unit elements of a map's source space (vectors or block tuples)."""
        if omega.source_blocks == 1:
            return self.vectors(omega.source.norm, salt=salt)
        if omega.source.kind == "twisted":
            return (flatten_twisted(tv)
                    for tv in self.twisted(omega.source.omega, salt=salt))
        raise UnsupportedMapError(
            f"cannot sample source elements for {omega.name!r}")

    def elements_for_target(self, omega, salt: int = 0) -> Iterator:
        """Unit elements shaped like the map's target space."""
        if omega.ambient_blocks == 1:
            return self.vectors(omega.target.norm, salt=salt)
        if omega.target.kind == "twisted":
            return (flatten_twisted(tv)
                    for tv in self.twisted(omega.target.omega, salt=salt))
        raise UnsupportedMapError(
            f"cannot sample target elements for {omega.name!r}")

    def element_pairs(self, omega, salt: int = 0) -> Iterator[tuple]:
        if omega.source_blocks == 1:
            return self.pairs(omega.source.norm, salt=salt)
        left = self.elements(omega, salt=salt + 71)
        right = self.elements(omega, salt=salt + 83)
        return zip(left, right)

    def element_families(self, omega, k_max: int, salt: int = 0) -> Iterator[list]:
        if omega.source_blocks == 1:
            return self.families(k_max, omega.source.norm, salt=salt)

        def gen():
            rng = self._rng(salt + 29)
            els = self.elements(omega, salt=salt + 41)
            while True:
                k = int(rng.integers(2, k_max + 1))
                yield [next(els) for _ in range(k)]

        return gen()
