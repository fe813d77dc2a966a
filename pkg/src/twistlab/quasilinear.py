"""Generic quasilinear-map machinery.

``QMap`` wraps a homogeneous callable together with its source and target
space descriptions.  The estimators in this module turn the defining
inequalities (additivity defect, boundedness, bounded equivalence) into
seeded empirical constants with reproducible argmax witnesses, and
``make_inverse`` builds the witness-based inverse map with its structural
checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator

import numpy as np

from .errors import DimensionMismatchError, TwistlabError, WitnessDivergence
from .spaces import (
    Blocks,
    SpaceSpec,
    TwistedVector,
    block_add,
    block_sub,
    is_blocks,
    twisted_norm,
)
from .witnesses import WitnessFn


@dataclass(eq=False)
class QMap:
    """A homogeneous map between described spaces, with ambient block shape.

    ``fn`` maps a source element (array, or tuple of arrays when
    ``source_blocks > 1``) to a value with ``ambient_blocks`` blocks.
    Diagonal maps expose their multiplier so that inversion and the range
    refinement can use the closed form.
    """

    name: str
    source: SpaceSpec
    target: SpaceSpec
    fn: Callable[[Blocks], Blocks]
    dim: int
    ambient_blocks: int = 1
    source_blocks: int = 1
    diagonal: np.ndarray | None = None
    params: dict = field(default_factory=dict)
    forward: "QMap | None" = None  # set on inverses built by make_inverse

    def __call__(self, x: Blocks) -> Blocks:
        return self.fn(x)

    def zero_input(self) -> Blocks:
        z = np.zeros(self.dim)
        if self.source_blocks == 1:
            return z
        return tuple(np.zeros(self.dim) for _ in range(self.source_blocks))

    def is_diagonal(self) -> bool:
        return self.diagonal is not None


@dataclass
class EstimateReport:
    """An empirical supremum with enough context to reproduce it exactly."""

    statistic: str
    sup_value: float
    argmax_inputs: tuple
    samples: int
    seed: int
    dim: int
    reevaluate: Callable[..., float] | None = field(default=None, repr=False)

    def check_argmax(self, tol: float = 1e-12) -> float:
        """Re-evaluate the stored witness; returns the deviation from sup."""
        if self.reevaluate is None or self.argmax_inputs is None:
            return 0.0
        again = self.reevaluate(*self.argmax_inputs)
        scale = max(abs(self.sup_value), 1.0)
        dev = abs(again - self.sup_value) / scale
        if dev > tol:
            raise TwistlabError(
                f"{self.statistic}: argmax re-evaluation drifted by {dev:.3e}")
        return dev

    def to_dict(self) -> dict:
        def as_list(v):
            if is_blocks(v):
                return [b.tolist() for b in v]
            if isinstance(v, TwistedVector):
                return {"beta": as_list(v.beta), "x": as_list(v.x)}
            if isinstance(v, np.ndarray):
                return v.tolist()
            return v

        return {
            "statistic": self.statistic,
            "sup_value": self.sup_value,
            "argmax_inputs": [as_list(v) for v in self.argmax_inputs],
            "samples": self.samples,
            "seed": self.seed,
            "dim": self.dim,
        }


def _sup_scan(name: str, ratio: Callable[..., float],
              inputs: Iterator[tuple], n_samples: int,
              seed: int, dim: int) -> EstimateReport:
    """Shared reduction: scan ``n_samples`` inputs, keep the sup and argmax."""
    if n_samples < 1:
        raise TwistlabError("estimators need at least one sample")
    best = -math.inf
    best_args: tuple | None = None
    count = 0
    for args in inputs:
        val = ratio(*args)
        if val > best:
            best = val
            best_args = args
        count += 1
        if count >= n_samples:
            break
    if count < n_samples:
        raise TwistlabError(f"{name}: sampler exhausted after {count} samples")
    return EstimateReport(statistic=name, sup_value=best, argmax_inputs=best_args,
                          samples=count, seed=seed, dim=dim, reevaluate=ratio)


def quasilinearity_constant(omega: QMap, sampler, n_samples: int) -> EstimateReport:
    """Empirical sup of ``||Om(x+z) - Om x - Om z|| / (||x|| + ||z||)``."""

    def ratio(x, z):
        defect = block_sub(omega(block_add(x, z)), block_add(omega(x), omega(z)))
        return omega.target.norm(defect) / (omega.source.norm(x) + omega.source.norm(z))

    return _sup_scan("quasilinearity", ratio, sampler.element_pairs(omega), n_samples,
                     sampler.seed, sampler.dim)


def one_quasilinearity_constant(omega: QMap, sampler, n_samples: int,
                                k_max: int) -> EstimateReport:
    """Empirical sup of the additivity defect over families of 2..k_max vectors."""
    if k_max < 2:
        raise TwistlabError("family size bound k_max must be at least 2")

    def ratio(*family):
        total = family[0]
        for member in family[1:]:
            total = block_add(total, member)
        summed = omega(family[0])
        for member in family[1:]:
            summed = block_add(summed, omega(member))
        defect = block_sub(omega(total), summed)
        return omega.target.norm(defect) / sum(omega.source.norm(m) for m in family)

    stream = (tuple(fam) for fam in sampler.element_families(omega, k_max))
    return _sup_scan("one-quasilinearity", ratio, stream, n_samples,
                     sampler.seed, sampler.dim)


def boundedness_sweep(omega: QMap, family: Iterable[Blocks]) -> list[float]:
    """Ratios ``||Om x|| / ||x||`` along a family, preserving order."""
    ratios = []
    for x in family:
        nx = omega.source.norm(x)
        if nx == 0.0:
            raise TwistlabError("boundedness_sweep requires nonzero inputs")
        ratios.append(omega.target.norm(omega(x)) / nx)
    return ratios


def bounded_equivalence_constant(omega1: QMap, omega2: QMap, sampler,
                                 n_samples: int) -> EstimateReport:
    """Empirical sup of ``||Om1 x - Om2 x|| / ||x||`` over unit samples."""
    if (omega1.ambient_blocks != omega2.ambient_blocks
            or omega1.source_blocks != omega2.source_blocks
            or omega1.dim != omega2.dim):
        raise DimensionMismatchError(
            f"{omega1.name} and {omega2.name} have different shapes")

    def ratio(x):
        return omega1.target.norm(block_sub(omega1(x), omega2(x))) / omega1.source.norm(x)

    stream = ((x,) for x in sampler.elements(omega1))
    return _sup_scan("bounded-equivalence", ratio, stream, n_samples,
                     sampler.seed, sampler.dim)


# ---------------------------------------------------------------------------
# Inversion
# ---------------------------------------------------------------------------


def _default_probes(dim: int) -> list[np.ndarray]:
    probes = [np.ones(dim) / math.sqrt(dim)]
    probes.append(np.eye(dim)[0])
    if dim > 2:
        probes.append(np.eye(dim)[dim // 2])
    alt = np.ones(dim)
    alt[1::2] = -1.0
    probes.append(alt / math.sqrt(dim))
    return probes


def make_inverse(omega: QMap, witness: WitnessFn,
                 probes: Iterable[np.ndarray] | None = None) -> QMap:
    """Build the witness-based inverse map ``Ran Om -> Dom Om``.

    The witness must converge on every probe; a divergence refuses the
    construction.  The returned map evaluates the witness, carries the
    range/domain space descriptions, and keeps a reference to the forward
    map (the canonical preimage of ``Om x`` being ``x`` itself).
    """
    if probes is None:
        probes = _default_probes(omega.dim)
    for x0 in probes:
        beta = omega(x0)
        try:
            x_back = witness.find(beta)
        except WitnessDivergence as err:
            raise WitnessDivergence(
                f"inverse construction refused: witness diverged on a probe "
                f"({err})", diagnostics=err.diagnostics) from err
        pair_norm = twisted_norm(TwistedVector(beta, x_back), omega)
        if not math.isfinite(pair_norm):
            raise WitnessDivergence(
                "inverse construction refused: witness produced an infinite "
                "twisted norm on a probe")
        if witness.target_ratio is not None:
            bound = witness.target_ratio * omega.source.norm(x0)
            if pair_norm > bound:
                raise WitnessDivergence(
                    f"inverse construction refused: witness ratio "
                    f"{pair_norm / omega.source.norm(x0):.3f} exceeds the "
                    f"configured target {witness.target_ratio:.3f}")

    inv_diag = None
    if omega.diagonal is not None:
        m = np.asarray(omega.diagonal, dtype=float)
        if np.all(m != 0.0):
            inv_diag = 1.0 / m
    return QMap(
        name=f"{omega.name}^-1",
        source=SpaceSpec.range_of(omega, witness),
        target=SpaceSpec.domain_of(omega),
        fn=witness.find,
        dim=omega.dim,
        ambient_blocks=omega.source_blocks,
        source_blocks=omega.ambient_blocks,
        diagonal=inv_diag,
        forward=omega,
    )


def check_U_isomorphism(omega: QMap, witness: WitnessFn, sampler,
                        n_samples: int) -> tuple[EstimateReport, EstimateReport]:
    """Empirical equivalence constants of the flip ``U(beta, x) = (x, beta)``.

    Returns the pair of suprema ``||Uv|| / ||v||`` and ``||v|| / ||Uv||``
    over sampled twisted vectors, with the norms taken in the twisted sums
    of the map and of its inverse respectively.
    """
    inverse = make_inverse(omega, witness)

    def forward_ratio(v: TwistedVector):
        flipped = TwistedVector(beta=v.x, x=v.beta)
        return twisted_norm(flipped, inverse) / twisted_norm(v, omega)

    def backward_ratio(v: TwistedVector):
        return 1.0 / forward_ratio(v)

    best_f = best_b = -math.inf
    arg_f = arg_b = None
    count = 0
    for v in sampler.twisted(omega):
        r = forward_ratio(v)
        if r > best_f:
            best_f, arg_f = r, (v,)
        if 1.0 / r > best_b:
            best_b, arg_b = 1.0 / r, (v,)
        count += 1
        if count >= n_samples:
            break
    fwd = EstimateReport("U-isomorphism-forward", best_f, arg_f, count,
                         sampler.seed, sampler.dim, reevaluate=forward_ratio)
    bwd = EstimateReport("U-isomorphism-backward", best_b, arg_b, count,
                         sampler.seed, sampler.dim, reevaluate=backward_ratio)
    return fwd, bwd


def inverse_of_inverse_defect(omega: QMap, witness: WitnessFn, sampler,
                              n_samples: int) -> EstimateReport:
    """Bounded-equivalence defect between ``Om`` and ``(Om^-1)^-1``.

    The inverse of the inverse selects, for ``x``, the value ``Om x'`` at
    the recovered preimage ``x' = witness(Om x)``; for exactly invertible
    maps this collapses to ``Om`` itself and the defect measures only the
    witness round-trip error.
    """
    inverse = make_inverse(omega, witness)

    def double_inverse(x: Blocks) -> Blocks:
        return omega(inverse(omega(x)))

    omega_back = QMap(
        name=f"({omega.name}^-1)^-1",
        source=omega.source,
        target=omega.target,
        fn=double_inverse,
        dim=omega.dim,
        ambient_blocks=omega.ambient_blocks,
        source_blocks=omega.source_blocks,
        forward=inverse,
    )
    report = bounded_equivalence_constant(omega, omega_back, sampler, n_samples)
    report.statistic = "inverse-of-inverse-defect"
    return report
