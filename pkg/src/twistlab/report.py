"""Batch experiment runner: configuration, per-map suites, serialization.

A suite run executes, for one registered map and a list of dimensions, the
exact-identity checks and empirical estimators that make sense for that
map, and collects everything in a ``ReportBundle``.  Numbers depend only on
the configuration (dims, sample count, seed, sampler kind, tolerances);
rerunning a config reproduces the numeric payload byte for byte.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import time
from dataclasses import dataclass, field

from . import checks
from .catalog import (
    CATALOG,
    build_map,
    default_weights,
    kp12_map,
    kp21_map,
    kp_map,
    orlicz_domain_fn,
    translation_map,
)
from .duality import (
    DualPairSpec,
    duality_defect,
    kp_order2_duality_defect,
    perp_domain_check,
    zn_selfduality_check,
)
from .errors import TwistlabError, UnknownMapError, WitnessDivergence
from .quasilinear import (
    EstimateReport,
    QMap,
    boundedness_sweep,
    inverse_of_inverse_defect,
    one_quasilinearity_constant,
    quasilinearity_constant,
)
from .samplers import SAMPLER_KINDS, Sampler
from .spaces import domain_norm, luxemburg_norm


@dataclass(frozen=True)
class Tolerances:
    tol_lux: float = 1e-10
    tol_opt: float = 1e-9
    noise_floor: float = 1e-12

    def to_dict(self) -> dict:
        return {"tol_lux": self.tol_lux, "tol_opt": self.tol_opt,
                "noise_floor": self.noise_floor}


@dataclass(frozen=True)
class ExperimentConfig:
    map_name: str
    dims: tuple[int, ...] = (16, 64, 256)
    samples: int = 200
    seed: int = 7
    sampler: str = "both"
    tolerances: Tolerances = Tolerances()

    def __post_init__(self):
        if self.map_name not in CATALOG:
            raise UnknownMapError(
                f"unknown map {self.map_name!r}; registered: {sorted(CATALOG)}")
        if not self.dims:
            raise TwistlabError("dims must be a nonempty increasing list")
        if any(b <= a for a, b in zip(self.dims, self.dims[1:])):
            raise TwistlabError("dims must be strictly increasing")
        if any(d < 2 for d in self.dims):
            raise TwistlabError("dims must be at least 2")
        if self.samples < 1:
            raise TwistlabError("samples must be at least 1")
        if self.sampler not in SAMPLER_KINDS:
            raise TwistlabError(f"sampler must be one of {SAMPLER_KINDS}")

    def to_dict(self) -> dict:
        return {
            "map": self.map_name,
            "dims": list(self.dims),
            "samples": self.samples,
            "seed": self.seed,
            "sampler": self.sampler,
            "tolerances": self.tolerances.to_dict(),
        }


def config_from_ini(path: str, map_name: str | None = None) -> ExperimentConfig:
    """Load a config from a key/value file with [experiment] and [tolerances]."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise TwistlabError(f"config file {path!r} not found or empty")
    exp = parser["experiment"] if parser.has_section("experiment") else {}
    tol = parser["tolerances"] if parser.has_section("tolerances") else {}
    tolerances = Tolerances(
        tol_lux=float(tol.get("tol_lux", Tolerances.tol_lux)),
        tol_opt=float(tol.get("tol_opt", Tolerances.tol_opt)),
        noise_floor=float(tol.get("noise_floor", Tolerances.noise_floor)),
    )
    dims = tuple(int(v) for v in exp.get("dims", "16, 64, 256").replace(",", " ").split())
    return ExperimentConfig(
        map_name=map_name or exp.get("map", "kp"),
        dims=dims,
        samples=int(exp.get("samples", 200)),
        seed=int(exp.get("seed", 7)),
        sampler=exp.get("sampler", "both"),
        tolerances=tolerances,
    )


@dataclass
class ExactCheck:
    name: str
    dim: int
    passed: bool
    max_deviation: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "dim": self.dim, "passed": self.passed,
                "max_deviation": self.max_deviation, "detail": self.detail}


@dataclass
class StageTiming:
    stage: str
    seconds: float


@dataclass
class ReportBundle:
    config: ExperimentConfig
    reports: list[EstimateReport] = field(default_factory=list)
    checks: list[ExactCheck] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    timings: list[StageTiming] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and all(c.passed for c in self.checks)

    def numeric_payload(self) -> str:
        """Canonical JSON of everything except wall-clock timings."""
        payload = {
            "config": self.config.to_dict(),
            "reports": [r.to_dict() for r in self.reports],
            "checks": [c.to_dict() for c in self.checks],
            "failures": list(self.failures),
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "reports": [r.to_dict() for r in self.reports],
            "checks": [c.to_dict() for c in self.checks],
            "failures": list(self.failures),
            "timings": [{"stage": t.stage, "seconds": t.seconds}
                        for t in self.timings],
        }


# ---------------------------------------------------------------------------
# Per-map suites
# ---------------------------------------------------------------------------


def _verify_argmax(reports: list[EstimateReport]) -> None:
    for r in reports:
        r.check_argmax(tol=1e-12)


def _suite_kp(dim: int, cfg: ExperimentConfig, out: ReportBundle) -> None:
    omega = kp_map(dim)
    sampler = Sampler(dim, cfg.seed, cfg.sampler)
    nf = cfg.tolerances.noise_floor

    dev_t, dev_r = checks.kp_growth_law_deviation(dim)
    out.checks.append(ExactCheck("kp-growth-law", dim, max(dev_t, dev_r) <= 1e-9,
                                 max(dev_t, dev_r), "2 ln n + 1 and ln n laws"))
    dev = checks.selector_identity_deviation(omega, sampler, cfg.samples)
    out.checks.append(ExactCheck("selector-identities", dim, dev <= nf, dev))
    dev = checks.homogeneity_deviation(omega, sampler, min(cfg.samples, 50))
    out.checks.append(ExactCheck("homogeneity", dim, dev <= nf, dev))

    out.reports.append(quasilinearity_constant(omega, sampler, cfg.samples))
    out.reports.append(one_quasilinearity_constant(omega, sampler, cfg.samples, k_max=4))
    neg = QMap(name="-kp", source=omega.source, target=omega.target,
               fn=lambda x: -omega(x), dim=dim)
    out.reports.append(duality_defect(DualPairSpec(omega, neg), sampler, cfg.samples))
    out.reports.append(checks.twisted_triangle_constant(omega, sampler, cfg.samples))

    from .quasilinear import check_U_isomorphism
    from .witnesses import kp_witness

    witness = kp_witness(omega)
    n_wit = min(cfg.samples, 40)  # witness searches dominate the runtime
    try:
        out.reports.append(inverse_of_inverse_defect(omega, witness, sampler, n_wit))
        fwd, bwd = check_U_isomorphism(omega, witness, sampler, n_wit)
        out.reports.extend([fwd, bwd])
    except WitnessDivergence as err:
        out.failures.append(f"kp@{dim}: witness diverged: {err}")

    phi = orlicz_domain_fn(2.0)
    ratios = [domain_norm(x, omega) / luxemburg_norm(x, phi)
              for _, x in zip(range(min(cfg.samples, 200)), sampler.vectors(salt=991))]
    out.reports.append(EstimateReport(
        statistic="domain-vs-orlicz-ratio-max", sup_value=max(ratios),
        argmax_inputs=(), samples=len(ratios), seed=cfg.seed, dim=dim))
    out.reports.append(EstimateReport(
        statistic="domain-vs-orlicz-ratio-min", sup_value=min(ratios),
        argmax_inputs=(), samples=len(ratios), seed=cfg.seed, dim=dim))


def _suite_kothe(dim: int, cfg: ExperimentConfig, out: ReportBundle) -> None:
    from .witnesses import diagonal_witness

    omega = build_map("kothe", dim)
    witness = diagonal_witness(omega)
    sampler = Sampler(dim, cfg.seed, cfg.sampler)
    nf = cfg.tolerances.noise_floor

    dev = checks.inversion_roundtrip_deviation(omega, witness, sampler, cfg.samples)
    out.checks.append(ExactCheck("diagonal-inversion", dim, dev <= nf, dev))
    ok, detail = checks.inversion_refusal_fires(dim)
    out.checks.append(ExactCheck("inversion-refusal", dim, ok, 0.0, detail))
    dev = checks.selector_identity_deviation(omega, sampler, cfg.samples)
    out.checks.append(ExactCheck("selector-identities", dim, dev <= nf, dev))
    dev = checks.diagonal_duality_deviation(omega, sampler, cfg.samples)
    out.checks.append(ExactCheck("diagonal-duality", dim, dev <= nf, dev))
    dev = checks.range_bound_dominated(omega, witness, sampler, min(cfg.samples, 100))
    out.checks.append(ExactCheck("range-bound-dominated", dim, dev <= nf, dev))

    neg = QMap(name="-kothe", source=omega.source, target=omega.target,
               fn=lambda x: -omega(x), dim=dim, diagonal=-omega.diagonal)
    perp = perp_domain_check(omega, neg, sampler, min(cfg.samples, 100))
    out.checks.append(ExactCheck(
        "perp-domain-index-identity", dim, perp.sets_equal,
        0.0 if perp.sets_equal else 1.0,
        f"{len(perp.heavy_via_omega)} heavy coordinates at threshold "
        f"{perp.threshold}"))

    out.reports.append(inverse_of_inverse_defect(omega, witness, sampler, cfg.samples))
    summary = checks.u_isomorphism_summary(omega, witness, sampler, min(cfg.samples, 100))
    out.reports.extend([summary.forward, summary.backward])
    out.checks.append(ExactCheck(
        "u-isomorphism-explicit-bound", dim, summary.within_bound,
        max(summary.forward.sup_value, summary.backward.sup_value),
        f"bound C(1+||B||)+1 = {summary.explicit_bound:.6f}"))


def _suite_translation(dim: int, cfg: ExperimentConfig, out: ReportBundle) -> None:
    from .witnesses import diagonal_witness

    z, theta = 0.25, 0.5
    w = default_weights(dim)
    omega = translation_map(z, theta, w)
    sampler = Sampler(dim, cfg.seed, cfg.sampler)
    nf = cfg.tolerances.noise_floor

    dev_inv, dev_iso = checks.translation_deviations(z, theta, w, sampler, cfg.samples)
    out.checks.append(ExactCheck("translation-involution", dim, dev_inv <= nf, dev_inv))
    out.checks.append(ExactCheck("translation-isometry", dim, dev_iso <= nf, dev_iso))
    dev = checks.selector_identity_deviation(omega, sampler, cfg.samples)
    out.checks.append(ExactCheck("selector-identities", dim, dev <= nf, dev))

    rep = quasilinearity_constant(omega, sampler, cfg.samples)
    out.reports.append(rep)
    out.checks.append(ExactCheck("linearity", dim, rep.sup_value <= nf, rep.sup_value,
                                 "translation maps are linear"))
    family = [x for _, x in zip(range(cfg.samples), sampler.elements(omega, salt=15))]
    sweep = boundedness_sweep(omega, family)
    out.reports.append(EstimateReport(
        statistic="boundedness-sweep-max", sup_value=max(sweep),
        argmax_inputs=(), samples=len(sweep), seed=cfg.seed, dim=dim))
    # bounded map: the domain norm is uniformly equivalent to the source norm
    ratios = [domain_norm(x, omega) / omega.source.norm(x) for x in family]
    out.reports.append(EstimateReport(
        statistic="domain-vs-source-ratio", sup_value=max(ratios),
        argmax_inputs=(), samples=len(ratios), seed=cfg.seed, dim=dim))
    out.reports.append(inverse_of_inverse_defect(omega, diagonal_witness(omega),
                                                 sampler, cfg.samples))


def _suite_rochberg(dim: int, cfg: ExperimentConfig, out: ReportBundle) -> None:
    w = default_weights(dim)
    omega = build_map("rochberg", dim)
    sampler = Sampler(dim, cfg.seed, cfg.sampler)
    nf = cfg.tolerances.noise_floor

    devs = checks.rochberg_structure_deviations(w, dim)
    for name, dev in devs.items():
        good = dev == 0.0 if name == "projection-of-inclusion" else dev <= nf
        out.checks.append(ExactCheck(f"rochberg-{name}", dim, good, dev))
    dev = checks.selector_identity_deviation(omega, sampler, min(cfg.samples, 100))
    out.checks.append(ExactCheck("selector-identities", dim, dev <= nf, dev))
    rep = quasilinearity_constant(omega, sampler, min(cfg.samples, 100))
    out.reports.append(rep)
    out.checks.append(ExactCheck("linearity", dim, rep.sup_value <= nf, rep.sup_value,
                                 "weighted differentials are linear"))
    out.reports.append(zn_selfduality_check(3, dim, sampler, min(cfg.samples, 100)))


def _suite_kp12(dim: int, cfg: ExperimentConfig, out: ReportBundle) -> None:
    omega = kp12_map(dim)
    sampler = Sampler(dim, cfg.seed, cfg.sampler)
    nf = cfg.tolerances.noise_floor

    dev = checks.kp12_selector_deviation(dim, sampler, cfg.samples)
    out.checks.append(ExactCheck("order3-selector", dim, dev <= nf, dev))
    dev = checks.homogeneity_deviation(omega, sampler, min(cfg.samples, 50))
    out.checks.append(ExactCheck("homogeneity", dim, dev <= nf, dev))
    out.reports.append(quasilinearity_constant(omega, sampler, cfg.samples))
    out.reports.append(kp_order2_duality_defect(dim, sampler, cfg.samples))
    out.reports.append(zn_selfduality_check(2, dim, sampler, cfg.samples))


def _suite_kp21(dim: int, cfg: ExperimentConfig, out: ReportBundle) -> None:
    omega = kp21_map(dim)
    sampler = Sampler(dim, cfg.seed, cfg.sampler)
    nf = cfg.tolerances.noise_floor

    dev = checks.selector_identity_deviation(omega, sampler, min(cfg.samples, 100))
    out.checks.append(ExactCheck("selector-identities", dim, dev <= nf, dev))
    dev = checks.homogeneity_deviation(omega, sampler, min(cfg.samples, 50))
    out.checks.append(ExactCheck("homogeneity", dim, dev <= nf, dev))
    out.reports.append(quasilinearity_constant(omega, sampler, cfg.samples))
    out.reports.append(kp_order2_duality_defect(dim, sampler, cfg.samples))
    unsigned = kp_order2_duality_defect(dim, sampler, min(cfg.samples, 100),
                                        apply_sign_flip=False)
    out.reports.append(unsigned)


_SUITES = {
    "kp": _suite_kp,
    "kothe": _suite_kothe,
    "translation": _suite_translation,
    "rochberg": _suite_rochberg,
    "kp12": _suite_kp12,
    "kp21": _suite_kp21,
}


def run_suite(config: ExperimentConfig) -> ReportBundle:
    """Run the exact checks and estimators of one map across dimensions.

    A witness divergence in one case is recorded and the rest of the suite
    continues; all other errors propagate.
    """
    bundle = ReportBundle(config=config)
    suite = _SUITES[config.map_name]
    for dim in config.dims:
        t0 = time.perf_counter()
        try:
            suite(dim, config, bundle)
        except WitnessDivergence as err:
            bundle.failures.append(f"{config.map_name}@{dim}: {err}")
        bundle.timings.append(StageTiming(f"{config.map_name}@{dim}",
                                          time.perf_counter() - t0))
    _verify_argmax(bundle.reports)
    return bundle


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

CSV_HEADER = ["statistic", "dim", "samples", "seed", "sup_value"]


def serialize(bundle: ReportBundle, fmt: str, out_path: str) -> str:
    """Write a bundle as JSON (full) or CSV (flat estimator table)."""
    _verify_argmax(bundle.reports)
    if fmt == "json":
        text = json.dumps(bundle.to_dict(), indent=2, sort_keys=True)
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CSV_HEADER)
        for r in bundle.reports:
            writer.writerow([r.statistic, r.dim, r.samples, r.seed,
                             repr(r.sup_value)])
        text = buf.getvalue()
    else:
        raise TwistlabError(f"unknown serialization format {fmt!r}")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return out_path


def load_bundle_dict(path: str) -> dict:
    """Read back a JSON bundle as its dictionary form."""
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
