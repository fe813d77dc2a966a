"""Preimage selector tests."""

import math

import numpy as np
import pytest

from twistlab.catalog import kp, kp_map, symmetric_kothe_map
from twistlab.errors import InversionRefusedError
from twistlab.spaces import TwistedVector, twisted_norm
from twistlab.witnesses import diagonal_witness, kp_preimage, kp_witness, zero_witness


def test_zero_witness():
    om = kp_map(6)
    wit = zero_witness(om)
    assert np.array_equal(wit.find(np.ones(6)), np.zeros(6))


def test_diagonal_witness_exact():
    om = symmetric_kothe_map(np.full(10, 0.5))
    wit = diagonal_witness(om)
    beta = np.arange(1.0, 11.0)
    assert np.allclose(om(wit.find(beta)), beta, rtol=1e-14)


def test_diagonal_witness_refuses_non_diagonal():
    with pytest.raises(InversionRefusedError):
        diagonal_witness(kp_map(6))


def test_kp_preimage_of_zero():
    x, diag = kp_preimage(np.zeros(9))
    assert np.array_equal(x, np.zeros(9))
    assert diag["converged"]


def test_kp_preimage_recovers_uniform():
    n = 256
    x = np.ones(n) / math.sqrt(n)
    got, diag = kp_preimage(kp(x))
    assert np.max(np.abs(got - x)) <= 1e-9
    assert diag["converged"]


def test_kp_preimage_recovers_gaussian_direction():
    n = 512
    rng = np.random.default_rng(4)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    got, _ = kp_preimage(kp(x))
    assert np.max(np.abs(got - x)) <= 1e-8


def test_kp_preimage_sign_convention():
    # outputs below the norm carry a negative log, so preimage signs flip
    n = 64
    x = -np.ones(n) / math.sqrt(n)
    beta = kp(x)  # positive entries
    got, _ = kp_preimage(beta)
    assert np.all(got < 0.0)


def test_kp_preimage_sparse_target_grid_fallback():
    # targets on few coordinates admit no self-consistent branch solution;
    # the selector must still return a near-minimal witness
    n = 64
    om = kp_map(n)
    beta = np.eye(n)[0]
    x, diag = kp_preimage(beta)
    assert diag["method"] == "grid-fallback"
    val = twisted_norm(TwistedVector(beta, x), om)
    assert val <= np.linalg.norm(beta) + 1e-12  # no worse than the zero witness


def test_kp_preimage_blocky_target_beats_or_matches_exact_preimage():
    n = 64
    om = kp_map(n)
    x0 = np.zeros(n)
    x0[:2] = 1.0 / math.sqrt(2.0)
    beta = kp(x0)
    x, _ = kp_preimage(beta)
    val = twisted_norm(TwistedVector(beta, x), om)
    exact_val = twisted_norm(TwistedVector(beta, x0), om)
    assert val <= exact_val + 1e-12


def test_kp_witness_selection_quality_on_dense_graph():
    n = 128
    om = kp_map(n)
    wit = kp_witness(om)
    rng = np.random.default_rng(7)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    beta = kp(x)
    found = wit.find(beta)
    assert twisted_norm(TwistedVector(beta, found), om) <= (1.0 + 1e-8)
    assert wit.last_diagnostics["converged"]
