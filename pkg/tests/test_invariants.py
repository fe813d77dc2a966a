"""Cross-cutting invariants: triangle constants, boundedness criterion,
witness contracts, zero preservation."""

import math

import numpy as np
import pytest

from twistlab.catalog import (
    CATALOG,
    build_map,
    default_weights,
    kp_map,
    symmetric_kothe_map,
    translation_map,
)
from twistlab.checks import twisted_triangle_constant
from twistlab.duality import DualPairSpec, duality_defect
from twistlab.errors import WitnessDivergence
from twistlab.quasilinear import QMap, make_inverse
from twistlab.samplers import Sampler
from twistlab.spaces import domain_norm, is_blocks
from twistlab.witnesses import WitnessFn, diagonal_witness


def test_twisted_triangle_constant_finite_and_stable():
    # quasi-norm triangle constant of the twisted sum: finite, and the
    # dimension ladder does not blow it up (recorded, not a fixed bound)
    sups = {}
    for n in (16, 64, 256):
        om = kp_map(n)
        sups[n] = twisted_triangle_constant(om, Sampler(n, 5, "both"), 150).sup_value
    assert all(math.isfinite(v) and v > 0.5 for v in sups.values())
    assert sups[256] <= 2.0 * sups[16]


def test_catalog_maps_preserve_zero():
    for name in sorted(CATALOG):
        omega = build_map(name, 12)
        out = omega(omega.zero_input())
        if is_blocks(out):
            assert all(np.array_equal(b, np.zeros(12)) for b in out)
        else:
            assert np.array_equal(out, np.zeros(12))


def test_boundedness_criterion_restated():
    # bounded maps: the domain norm stays uniformly equivalent to the
    # source norm; the logarithmic map escapes along uniform vectors
    n = 512
    tr = translation_map(0.25, 0.5, default_weights(n))
    sampler = Sampler(n, 5, "both")
    bound = 1.0 + float(np.max(np.abs(tr.diagonal))) * \
        float(np.max(tr.target.weights / tr.source.weights))
    for _, x in zip(range(100), sampler.elements(tr)):
        assert domain_norm(x, tr) <= bound * tr.source.norm(x) + 1e-9

    kp_m = kp_map(n)
    x = np.ones(n) / math.sqrt(n)
    assert domain_norm(x, kp_m) == pytest.approx(1.0 + math.log(n), rel=1e-12)


def test_make_inverse_honors_target_ratio():
    om = symmetric_kothe_map(default_weights(16))
    exact = diagonal_witness(om)
    strict = WitnessFn(for_map=om, find=exact.find, name="strict",
                       target_ratio=1e-6)
    with pytest.raises(WitnessDivergence):
        make_inverse(om, strict)
    loose = WitnessFn(for_map=om, find=exact.find, name="loose",
                      target_ratio=1e6)
    assert make_inverse(om, loose).forward is om


def test_kp_selfduality_defect_bitwise_reproducible():
    om = kp_map(32)
    neg = QMap(name="-kp", source=om.source, target=om.target,
               fn=lambda x: -om(x), dim=32)
    r1 = duality_defect(DualPairSpec(om, neg), Sampler(32, 41, "both"), 120)
    r2 = duality_defect(DualPairSpec(om, neg), Sampler(32, 41, "both"), 120)
    assert r1.sup_value == r2.sup_value


def test_cli_verify_wiring(monkeypatch, capsys):
    import twistlab.cli as cli
    from twistlab.acceptance import CriterionResult

    def fake_ok(printer=None):
        res = CriterionResult(1, "fake", True, 0.0, {})
        if printer:
            printer(res.line())
        return [res]

    monkeypatch.setattr(cli, "run_all", fake_ok)
    assert cli.main(["verify"]) == 0
    assert "1/1 criteria passed" in capsys.readouterr().out

    def fake_bad(printer=None):
        return [CriterionResult(1, "fake", False, 0.0, {})]

    monkeypatch.setattr(cli, "run_all", fake_bad)
    assert cli.main(["verify"]) == 1
