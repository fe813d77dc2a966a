"""The verification suite: every exit criterion, each with its pinned
tolerance, runnable as a library call (for pytest) or via the CLI
``verify`` subcommand.

Two constants are frozen from a calibration pre-run (seed 7, both sampler
kinds): the Orlicz equivalence interval bound ``C_EQ`` and the recorded
quasilinearity baselines.  The binding checks are the stated tolerances
and no-growth rules; the baselines are recorded for reporting.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import checks
from .catalog import (
    CATALOG,
    build_map,
    default_weights,
    kp,
    kp_map,
    orlicz_domain_fn,
)
from .duality import (
    DualPairSpec,
    duality_defect,
    duality_defect_on,
    kp_order2_defect_on,
    kp_order2_duality_defect,
)
from .quasilinear import QMap, quasilinearity_constant
from .samplers import Sampler
from .spaces import OrliczFn, TwistedVector, domain_norm, lp_norm, luxemburg_norm
from .witnesses import diagonal_witness

SEED = 7
DIM_LADDER = (16, 64, 256, 1024, 4096)

# frozen by the calibration pre-run: observed ratio range [1.554, 2.212]
# across the dimension ladder, padded to a single interval bound
C_EQ = 2.4

# recorded quasilinearity baselines from the same calibration run
QL_BASELINE_DIM16 = 0.956
QL_BASELINE_DIM4096 = 0.821


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    seconds: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extras = ", ".join(f"{k}={v}" for k, v in self.details.items())
        return f"[{status}] criterion {self.number:2d} {self.name} " \
               f"({self.seconds:.2f}s) {extras}"


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def criterion_1_selector_identities() -> CriterionResult:
    """Both twisted-norm identities, 1000 cases per catalog map, <= 1e-12."""

    def run():
        worst = {}
        for name in sorted(CATALOG):
            omega = build_map(name, 64)
            sampler = Sampler(64, SEED, "both")
            worst[name] = checks.selector_identity_deviation(omega, sampler, 1000)
        return worst

    worst, secs = _timed(run)
    dev = max(worst.values())
    passed = dev <= 1e-12 and secs < 5.0
    return CriterionResult(1, "selector-identities", passed, secs,
                           {"max_rel_dev": f"{dev:.3e}", "maps": len(worst)})


def criterion_2_kp_growth_law() -> CriterionResult:
    """Closed-form growth along uniform vectors at five dimensions, 1e-9."""

    def run():
        devs = [max(checks.kp_growth_law_deviation(n)) for n in DIM_LADDER]
        return max(devs)

    dev, secs = _timed(run)
    passed = dev <= 1e-9 and secs < 1.0
    return CriterionResult(2, "kp-growth-law", passed, secs,
                           {"max_rel_dev": f"{dev:.3e}"})


def criterion_3_diagonal_inversion() -> CriterionResult:
    """Inversion round trips to 1e-12 across dims; refusal exactly at w = 1."""

    def run():
        worst = 0.0
        for dim in (16, 256, 4096):
            omega = build_map("kothe", dim)
            witness = diagonal_witness(omega)
            sampler = Sampler(dim, SEED, "both")
            worst = max(worst, checks.inversion_roundtrip_deviation(
                omega, witness, sampler, 1000))
        ok, detail = checks.inversion_refusal_fires(64)
        return worst, ok, detail

    (worst, refusal_ok, detail), secs = _timed(run)
    passed = worst <= 1e-12 and refusal_ok
    return CriterionResult(3, "diagonal-inversion", passed, secs,
                           {"max_rel_dev": f"{worst:.3e}", "refusal": detail})


def criterion_4_translation() -> CriterionResult:
    """Involution and isometry to 1e-12 over a 25-point parameter grid."""

    def run():
        w = default_weights(64)
        sampler = Sampler(64, SEED, "both")
        grid = [0.1, 0.3, 0.5, 0.7, 0.9]
        worst_inv = worst_iso = 0.0
        for z in grid:
            for theta in grid:
                inv, iso = checks.translation_deviations(z, theta, w, sampler, 40)
                worst_inv = max(worst_inv, inv)
                worst_iso = max(worst_iso, iso)
        return worst_inv, worst_iso

    (worst_inv, worst_iso), secs = _timed(run)
    passed = worst_inv <= 1e-12 and worst_iso <= 1e-12
    return CriterionResult(4, "translation-involution-isometry", passed, secs,
                           {"involution": f"{worst_inv:.3e}",
                            "isometry": f"{worst_iso:.3e}"})


def criterion_5_diagonal_duality() -> CriterionResult:
    """Defect of the pair (m, -m) stays at the noise floor over 1000 pairs."""

    def run():
        omega = build_map("kothe", 64)
        sampler = Sampler(64, SEED, "both")
        return checks.diagonal_duality_deviation(omega, sampler, 1000)

    dev, secs = _timed(run)
    passed = dev <= 1e-12
    return CriterionResult(5, "diagonal-duality", passed, secs,
                           {"max_defect": f"{dev:.3e}"})


def criterion_6_kp_quasilinearity_no_growth() -> CriterionResult:
    """Empirical constant stable on the dimension ladder (2x rule), 1e4/dim."""

    def run():
        sups = {}
        for dim in DIM_LADDER:
            omega = kp_map(dim)
            sampler = Sampler(dim, SEED, "both")
            sups[dim] = quasilinearity_constant(omega, sampler, 10_000).sup_value
        return sups

    sups, secs = _timed(run)
    passed = sups[4096] <= 2.0 * sups[16] and secs < 60.0
    return CriterionResult(
        6, "kp-quasilinearity-no-growth", passed, secs,
        {"sup16": f"{sups[16]:.6f}", "sup4096": f"{sups[4096]:.6f}",
         "baseline16": QL_BASELINE_DIM16, "baseline4096": QL_BASELINE_DIM4096})


def criterion_7_orlicz_domain_equivalence() -> CriterionResult:
    """Domain norm vs Luxemburg norm within the frozen interval, all dims."""

    def run():
        phi = orlicz_domain_fn(2.0)
        lo, hi = math.inf, -math.inf
        for dim in DIM_LADDER:
            omega = kp_map(dim)
            sampler = Sampler(dim, SEED, "both")
            for _, x in zip(range(1000), sampler.vectors()):
                r = domain_norm(x, omega) / luxemburg_norm(x, phi)
                lo, hi = min(lo, r), max(hi, r)
        return lo, hi

    (lo, hi), secs = _timed(run)
    passed = (1.0 / C_EQ) <= lo and hi <= C_EQ
    return CriterionResult(7, "kp-domain-orlicz-equivalence", passed, secs,
                           {"ratio_min": f"{lo:.4f}", "ratio_max": f"{hi:.4f}",
                            "C_eq": C_EQ})


def criterion_8_kp_selfduality() -> CriterionResult:
    """(kp, -kp) defect obeys the 2x no-growth rule; (kp, +kp) grows."""

    def run():
        sups = {}
        for dim in (16, 4096):
            omega = kp_map(dim)
            neg = QMap(name="-kp", source=omega.source, target=omega.target,
                       fn=lambda x, om=omega: -om(x), dim=dim)
            sampler = Sampler(dim, SEED, "both")
            sups[dim] = duality_defect(DualPairSpec(omega, neg),
                                       sampler, 400).sup_value
        controls = {}
        for dim in DIM_LADDER:
            omega = kp_map(dim)
            pos = QMap(name="+kp", source=omega.source, target=omega.target,
                       fn=omega.fn, dim=dim)
            x = np.ones(dim) / math.sqrt(dim)
            controls[dim] = duality_defect_on(DualPairSpec(omega, pos), x, x)
        return sups, controls

    (sups, controls), secs = _timed(run)
    no_growth = sups[4096] <= 2.0 * sups[16]
    control_ok = all(controls[n] >= math.log(n) - 1.0 for n in DIM_LADDER)
    return CriterionResult(
        8, "kp-selfduality", no_growth and control_ok, secs,
        {"sup16": f"{sups[16]:.6f}", "sup4096": f"{sups[4096]:.6f}",
         "control4096": f"{controls[4096]:.3f}",
         "expected_control": f"{2 * math.log(4096):.3f}"})


def criterion_9_order2_display() -> CriterionResult:
    """Order-two defect bounded (2x rule); dropping the sign flip grows."""

    def run():
        sups = {}
        for dim in (16, 4096):
            sampler = Sampler(dim, SEED, "both")
            sups[dim] = kp_order2_duality_defect(dim, sampler, 300).sup_value
        unsigned = []
        for dim in (16, 256, 4096):
            x = np.ones(dim) / math.sqrt(dim)
            z = TwistedVector(kp(x), x)
            unsigned.append(kp_order2_defect_on(x, z, apply_sign_flip=False))
        return sups, unsigned

    (sups, unsigned), secs = _timed(run)
    no_growth = sups[4096] <= 2.0 * sups[16]
    increments_ok = all(b - a >= 0.5 for a, b in zip(unsigned, unsigned[1:]))
    return CriterionResult(
        9, "kp-order2-duality-display", no_growth and increments_ok, secs,
        {"sup16": f"{sups[16]:.6f}", "sup4096": f"{sups[4096]:.6f}",
         "unsigned": "/".join(f"{u:.2f}" for u in unsigned)})


def criterion_10_rochberg_structure() -> CriterionResult:
    """Block-structure exactness: closed form, selector, projection, flip."""

    def run():
        w = default_weights(128)
        devs = checks.rochberg_structure_deviations(w, 128)
        omega = build_map("rochberg", 128)
        sampler = Sampler(128, SEED, "both")
        devs["selector-sampled"] = checks.selector_identity_deviation(
            omega, sampler, 300)
        return devs

    devs, secs = _timed(run)
    proj_exact = devs["projection-of-inclusion"] == 0.0
    rest = max(v for k, v in devs.items() if k != "projection-of-inclusion")
    passed = proj_exact and rest <= 1e-12
    return CriterionResult(10, "rochberg-structure", passed, secs,
                           {"max_rel_dev": f"{rest:.3e}",
                            "projection_exact": proj_exact})


def criterion_11_luxemburg() -> CriterionResult:
    """Power mode equals the lp norm to 1e-10; homogeneity to 1e-12."""

    def run():
        sampler = Sampler(128, SEED, "both")
        power = OrliczFn(p=3.0, mode="power")
        phi = orlicz_domain_fn(2.0)
        worst_eq = worst_hom = 0.0
        for _, x in zip(range(1000), sampler.vectors()):
            lux = luxemburg_norm(x, power)
            ref = lp_norm(x, 3.0)
            worst_eq = max(worst_eq, abs(lux - ref) / ref)
        for _, x in zip(range(200), sampler.vectors(salt=19)):
            base = luxemburg_norm(x, phi)
            for lam in (-3.5, 2.0, 0.125):
                dev = abs(luxemburg_norm(lam * x, phi) - abs(lam) * base)
                worst_hom = max(worst_hom, dev / (abs(lam) * base))
        return worst_eq, worst_hom

    (worst_eq, worst_hom), secs = _timed(run)
    passed = worst_eq <= 1e-10 and worst_hom <= 1e-12
    return CriterionResult(11, "luxemburg-correctness", passed, secs,
                           {"vs_lp": f"{worst_eq:.3e}",
                            "homogeneity": f"{worst_hom:.3e}"})


def criterion_12_u_isomorphism() -> CriterionResult:
    """Flip constants finite and within the explicit bound C + C||B|| + 1."""

    def run():
        omega = build_map("kothe", 256)
        witness = diagonal_witness(omega)
        sampler = Sampler(256, SEED, "both")
        return checks.u_isomorphism_summary(omega, witness, sampler, 200)

    summary, secs = _timed(run)
    finite = (math.isfinite(summary.forward.sup_value)
              and math.isfinite(summary.backward.sup_value))
    passed = finite and summary.within_bound
    return CriterionResult(
        12, "u-isomorphism-bound", passed, secs,
        {"forward": f"{summary.forward.sup_value:.4f}",
         "backward": f"{summary.backward.sup_value:.4f}",
         "bound": f"{summary.explicit_bound:.4f}"})


ALL_CRITERIA = (
    criterion_1_selector_identities,
    criterion_2_kp_growth_law,
    criterion_3_diagonal_inversion,
    criterion_4_translation,
    criterion_5_diagonal_duality,
    criterion_6_kp_quasilinearity_no_growth,
    criterion_7_orlicz_domain_equivalence,
    criterion_8_kp_selfduality,
    criterion_9_order2_display,
    criterion_10_rochberg_structure,
    criterion_11_luxemburg,
    criterion_12_u_isomorphism,
)


def run_all(printer=None) -> list[CriterionResult]:
    """Run every criterion, optionally printing one line per result."""
    results = []
    for fn in ALL_CRITERIA:
        result = fn()
        results.append(result)
        if printer is not None:
            printer(result.line())
    return results
