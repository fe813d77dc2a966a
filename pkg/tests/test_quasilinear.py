"""Estimators, inversion, and the flip isomorphism."""

import math

import numpy as np
import pytest

from twistlab.catalog import (
    build_map,
    default_weights,
    kp,
    kp_map,
    symmetric_kothe_map,
    translation_map,
)
from twistlab.errors import (
    DimensionMismatchError,
    InversionRefusedError,
    TwistlabError,
)
from twistlab.quasilinear import (
    QMap,
    bounded_equivalence_constant,
    boundedness_sweep,
    check_U_isomorphism,
    inverse_of_inverse_defect,
    make_inverse,
    one_quasilinearity_constant,
    quasilinearity_constant,
)
from twistlab.samplers import Sampler
from twistlab.spaces import (
    SpaceSpec,
    TwistedVector,
    range_norm_upper,
    twisted_norm,
)
from twistlab.witnesses import WitnessFn, diagonal_witness, kp_witness, zero_witness


def _linear_map(dim, mult=1.0):
    return QMap(name="linear", source=SpaceSpec.lp(2.0), target=SpaceSpec.lp(2.0),
                fn=lambda x: mult * x, dim=dim,
                diagonal=np.full(dim, mult) if mult else None)


def test_quasilinearity_zero_for_linear():
    om = _linear_map(12, 2.0)
    rep = quasilinearity_constant(om, Sampler(12, 5, "both"), 60)
    assert rep.sup_value <= 1e-12


def test_quasilinearity_kp_spike_pair_hand_value():
    # KP(e1 + e2) = -ln 2 on both coordinates, so the ratio is ln2 / sqrt(2)
    om = kp_map(8)

    class _PairOnce:
        seed, dim = 0, 8

        def element_pairs(self, omega):
            yield np.eye(8)[0], np.eye(8)[1]

    rep = quasilinearity_constant(om, _PairOnce(), 1)
    assert rep.sup_value == pytest.approx(math.log(2) / math.sqrt(2), rel=1e-14)


def test_one_quasilinearity_zero_for_linear():
    om = _linear_map(10, -0.7)
    rep = one_quasilinearity_constant(om, Sampler(10, 5, "both"), 40, k_max=5)
    assert rep.sup_value <= 1e-12


def test_one_quasilinearity_family_of_spikes_hand_value():
    # family e_1..e_k: the sum is uniform on k coordinates, each image
    # coordinate is -ln k, total ratio ln(k)/sqrt(k)
    k, n = 5, 8
    om = kp_map(n)

    class _FamilyOnce:
        seed, dim = 0, n

        def element_families(self, omega, k_max):
            yield [np.eye(n)[i] for i in range(k)]

    rep = one_quasilinearity_constant(om, _FamilyOnce(), 1, k_max=k)
    assert rep.sup_value == pytest.approx(math.log(k) / math.sqrt(k), rel=1e-13)


def test_one_quasilinearity_pair_reduces_to_quasilinearity():
    om = kp_map(8)
    x, z = np.eye(8)[0], np.eye(8)[1]

    class _F:
        seed, dim = 0, 8

        def element_families(self, omega, k_max):
            yield [x, z]

    class _P:
        seed, dim = 0, 8

        def element_pairs(self, omega):
            yield x, z

    fam = one_quasilinearity_constant(om, _F(), 1, k_max=2)
    pair = quasilinearity_constant(om, _P(), 1)
    assert fam.sup_value == pytest.approx(pair.sup_value, rel=1e-15)


def test_boundedness_sweep_kp_laws():
    n = 256
    om = kp_map(n)
    family = [np.eye(n)[0], np.ones(n) / math.sqrt(n)]
    ratios = boundedness_sweep(om, family)
    assert ratios[0] == 0.0
    assert ratios[1] == pytest.approx(math.log(n), rel=1e-12)


def test_boundedness_sweep_diagonal_spike():
    w = default_weights(16)
    om = symmetric_kothe_map(w)
    ratios = boundedness_sweep(om, [np.eye(16)[3]])
    assert ratios[0] == pytest.approx(abs(2.0 * math.log(w.values[3])), rel=1e-14)


def test_boundedness_sweep_rejects_zero():
    with pytest.raises(TwistlabError):
        boundedness_sweep(kp_map(4), [np.zeros(4)])


def test_bounded_equivalence_self_is_zero():
    om = kp_map(10)
    rep = bounded_equivalence_constant(om, om, Sampler(10, 1, "both"), 30)
    assert rep.sup_value == 0.0


def test_bounded_equivalence_shifted_by_bounded_linear():
    b = -1.7
    om = kp_map(10)
    shifted = QMap(name="kp+b", source=om.source, target=om.target,
                   fn=lambda x: om(x) + b * x, dim=10)
    rep = bounded_equivalence_constant(om, shifted, Sampler(10, 1, "both"), 50)
    # equality |b| is attained at every unit sample
    assert rep.sup_value == pytest.approx(abs(b), rel=1e-12)


def test_bounded_equivalence_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        bounded_equivalence_constant(kp_map(8), kp_map(16), Sampler(8, 1, "both"), 5)


# -- inversion ---------------------------------------------------------------


def test_make_inverse_diagonal_exact():
    w = default_weights(32)
    om = symmetric_kothe_map(w)
    inv = make_inverse(om, diagonal_witness(om))
    rng = np.random.default_rng(0)
    x = rng.standard_normal(32)
    beta = rng.standard_normal(32)
    assert np.linalg.norm(inv(om(x)) - x) <= 1e-12 * np.linalg.norm(x)
    assert np.linalg.norm(om(inv(beta)) - beta) <= 1e-12 * np.linalg.norm(beta)
    # the inverse is itself diagonal with the reciprocal multiplier
    assert np.array_equal(inv.diagonal, 1.0 / om.diagonal)


def test_make_inverse_space_tags():
    om = symmetric_kothe_map(default_weights(8))
    inv = make_inverse(om, diagonal_witness(om))
    assert inv.source.kind == "range"
    assert inv.target.kind == "domain"
    assert inv.forward is om


def test_diagonal_inversion_refusal_names_coordinates():
    w = np.full(8, 0.5)
    w[2] = 1.0
    w[5] = 1.0
    om = symmetric_kothe_map(w)
    with pytest.raises(InversionRefusedError) as err:
        diagonal_witness(om)
    assert err.value.coordinates == [2, 5]


def test_kp_inverse_recovers_dense_preimages():
    n = 256
    om = kp_map(n)
    inv = make_inverse(om, kp_witness(om))
    x = np.ones(n) / math.sqrt(n)
    beta = kp(x)
    x_back = inv(beta)
    assert np.linalg.norm(x_back - x) <= 1e-9
    assert twisted_norm(TwistedVector(beta, x_back), om) <= 1.0 + 1e-9


def test_inverse_of_inverse_diagonal_zero():
    om = symmetric_kothe_map(default_weights(24))
    rep = inverse_of_inverse_defect(om, diagonal_witness(om),
                                    Sampler(24, 3, "both"), 50)
    assert rep.sup_value <= 1e-12


def test_inverse_of_inverse_translation_zero():
    om = translation_map(0.25, 0.5, default_weights(24))
    rep = inverse_of_inverse_defect(om, diagonal_witness(om),
                                    Sampler(24, 3, "both"), 50)
    assert rep.sup_value <= 1e-12


def test_inverse_of_inverse_kp_finite():
    om = kp_map(64)
    rep = inverse_of_inverse_defect(om, kp_witness(om), Sampler(64, 3, "both"), 30)
    assert math.isfinite(rep.sup_value)


def test_m_vs_j_witness_equivalence_bound():
    # exact inverse M against a deliberately truncated selector J: their
    # domain-norm gap stays below K + K^2 for the recorded selection constant
    n = 24
    w = np.geomspace(0.9, 0.2, n)
    om = symmetric_kothe_map(w)
    m = om.diagonal

    def truncated(beta):
        x = beta / m
        x[np.abs(m) < 1.0] = 0.0
        return x

    exact = make_inverse(om, diagonal_witness(om))
    rough = QMap(name="kothe~J", source=exact.source, target=exact.target,
                 fn=truncated, dim=n)
    sampler = Sampler(n, 9, "both")
    k_sel = 0.0
    for _, beta in zip(range(100), sampler.vectors()):
        for cand in (exact(beta), truncated(beta)):
            val = twisted_norm(TwistedVector(beta, cand), om)
            k_sel = max(k_sel, val / range_norm_upper(beta, om).value)
    rep = bounded_equivalence_constant(exact, rough, sampler, 100)
    assert rep.sup_value <= k_sel + k_sel**2 + 1e-9


# -- flip isomorphism --------------------------------------------------------


def test_u_isomorphism_zero_witness_ratio_at_most_one():
    om = symmetric_kothe_map(default_weights(16))
    wit = zero_witness(om)
    rng = np.random.default_rng(1)
    y = rng.standard_normal(16)
    v = TwistedVector(y, np.zeros(16))
    inv = make_inverse(om, wit)
    flipped = TwistedVector(np.zeros(16), y)
    assert twisted_norm(flipped, inv) <= twisted_norm(v, om) + 1e-12


def test_u_isomorphism_constants_finite_diagonal():
    om = symmetric_kothe_map(default_weights(32))
    fwd, bwd = check_U_isomorphism(om, diagonal_witness(om),
                                   Sampler(32, 5, "both"), 80)
    assert math.isfinite(fwd.sup_value) and math.isfinite(bwd.sup_value)
    assert fwd.sup_value > 0.0 and bwd.sup_value > 0.0


def test_u_isomorphism_graph_points_per_coordinate():
    # on graph points (Om x, x) the flip lands on (x, Om x) whose norm is
    # computable coordinatewise through the exact inverse
    w = default_weights(12)
    om = symmetric_kothe_map(w)
    wit = diagonal_witness(om)
    inv = make_inverse(om, wit)
    rng = np.random.default_rng(6)
    x = rng.standard_normal(12)
    v = TwistedVector(om(x), x)
    flipped = TwistedVector(x, om(x))
    # x - inv(om x) = 0, so the flipped norm reduces to the range bound
    expected = range_norm_upper(om(x), om, wit).value
    assert twisted_norm(flipped, inv) == pytest.approx(expected, rel=1e-12)


# -- reports -----------------------------------------------------------------


def test_estimate_report_reproducible_bit_identical():
    om = kp_map(20)
    rep1 = quasilinearity_constant(om, Sampler(20, 123, "both"), 200)
    rep2 = quasilinearity_constant(om, Sampler(20, 123, "both"), 200)
    assert rep1.sup_value == rep2.sup_value  # bitwise
    rep3 = quasilinearity_constant(om, Sampler(20, 124, "both"), 200)
    assert rep3.sup_value != rep1.sup_value


def test_estimate_report_argmax_reevaluates():
    om = kp_map(16)
    rep = quasilinearity_constant(om, Sampler(16, 5, "both"), 100)
    assert rep.check_argmax(tol=1e-12) <= 1e-12


def test_estimate_report_requires_samples():
    om = kp_map(8)
    with pytest.raises(TwistlabError):
        quasilinearity_constant(om, Sampler(8, 5, "both"), 0)
