import numpy as np
import pytest

from binceo.bounds import TestChannelPair
from binceo.codec import (
    bias_propagation_quantize,
    encode_joint,
    encode_successive,
    syndrome_generate,
)
from binceo.graphs import build_anchor_compound, build_compound


@pytest.fixture(scope="module")
def compound_pair():
    cc1 = build_compound(2000, ldgm_rate=0.558, syndrome_rate=0.56, seed=21)
    cc2 = build_compound(2000, ldgm_rate=0.558, syndrome_rate=0.56, seed=22)
    return cc1, cc2


def _observation(n, seed):
    return np.random.default_rng(seed).integers(0, 2, n, dtype=np.uint8)


def test_quantize_deterministic(compound_pair):
    cc, _ = compound_pair
    y = _observation(cc.n, 31)
    q1 = bias_propagation_quantize(cc.ldgm, y, 0.1, seed=5)
    q2 = bias_propagation_quantize(cc.ldgm, y, 0.1, seed=5)
    np.testing.assert_array_equal(q1.info_bits, q2.info_bits)
    assert q1.empirical_distortion == q2.empirical_distortion


def test_quantize_output_consistency(compound_pair):
    cc, _ = compound_pair
    y = _observation(cc.n, 32)
    q = bias_propagation_quantize(cc.ldgm, y, 0.1, seed=6)
    np.testing.assert_array_equal(q.quantized, cc.ldgm.encode(q.info_bits))
    assert q.empirical_distortion == pytest.approx(np.mean(q.quantized != y))
    assert set(np.unique(q.info_bits)) <= {0, 1}


def test_quantize_beats_random_codeword(compound_pair):
    cc, _ = compound_pair
    y = _observation(cc.n, 33)
    q = bias_propagation_quantize(cc.ldgm, y, 0.1, seed=7)
    rng = np.random.default_rng(0)
    random_word = cc.ldgm.encode(rng.integers(0, 2, cc.ldgm.k, dtype=np.uint8))
    assert q.empirical_distortion < np.mean(random_word != y)


def test_quantize_validation(compound_pair):
    cc, _ = compound_pair
    with pytest.raises(ValueError):
        bias_propagation_quantize(cc.ldgm, np.zeros(cc.n - 1, dtype=np.uint8), 0.1)
    with pytest.raises(ValueError):
        bias_propagation_quantize(
            cc.ldgm, np.zeros(cc.n, dtype=np.uint8), 0.1, max_iters=0
        )


def test_quantizer_distortion_monotone_in_rate():
    # More information bits per output -> lower mean Hamming distortion.
    means = []
    for rate in (0.50, 0.584, 0.66):
        dists = []
        for seed in range(20):
            cc = build_compound(1000, rate, 0.5, seed=seed)
            y = _observation(1000, 500 + seed)
            dists.append(
                bias_propagation_quantize(cc.ldgm, y, 0.1, seed=seed).empirical_distortion
            )
        means.append(np.mean(dists))
    assert means[0] > means[1] > means[2]


def test_syndrome_generate_matches_code(compound_pair):
    cc, _ = compound_pair
    u = _observation(cc.n, 34)
    np.testing.assert_array_equal(syndrome_generate(cc.ldpc, u), cc.ldpc.syndrome(u))


def test_encode_joint_pipeline(compound_pair):
    cc1, cc2 = compound_pair
    y1 = _observation(cc1.n, 35)
    y2 = _observation(cc2.n, 36)
    tc = TestChannelPair(0.1, 0.1)
    enc1, enc2, q1, q2 = encode_joint(cc1, cc2, y1, y2, tc, seed=40)
    np.testing.assert_array_equal(enc1.syndrome, cc1.ldpc.syndrome(q1.quantized))
    np.testing.assert_array_equal(enc2.syndrome, cc2.ldpc.syndrome(q2.quantized))
    assert enc1.syndrome.shape == (cc1.ldpc.m,)


def test_matched_seed_u2_shared_between_schemes(compound_pair):
    # The successive scheme reuses the joint scheme's link-2 quantizer, so
    # with the same seed and code both schemes produce the same u2.
    cc2 = compound_pair[1]
    cc1_joint = build_anchor_compound(cc2.n, 0.558, 0.025, seed=23)
    cc1_succ = compound_pair[0]
    y1 = _observation(cc2.n, 37)
    y2 = _observation(cc2.n, 38)
    tc = TestChannelPair(0.1, 0.1)
    _, _, _, qj2 = encode_joint(cc1_joint, cc2, y1, y2, tc, seed=41)
    enc, _, qs2 = encode_successive(cc1_succ, cc2.ldgm, y1, y2, tc, seed=41)
    np.testing.assert_array_equal(qj2.quantized, qs2.quantized)
    # The receiver can rebuild u2 exactly from the transmitted info bits.
    np.testing.assert_array_equal(cc2.ldgm.encode(enc.info_bits2), qs2.quantized)
