"""Encoder side: bias-propagation LDGM quantization, LDPC syndrome
generation, and the per-scheme encoder pipelines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._msgpass import check_messages, clamp_llr, variable_sums
from .bounds import TestChannelPair
from .graphs import CompoundCode, LdgmCode, LdpcCode

DECIMATION_BIAS_FLOOR = 1e-9
# LLR magnitude assigned to a decimated (hard-fixed) information bit.
FIXED_LLR = 50.0
# Floor on the design-distortion channel parameter so its LLR stays finite.
MIN_TARGET_D = 1e-3


@dataclass
class QuantizationResult:
    info_bits: np.ndarray
    quantized: np.ndarray
    empirical_distortion: float
    converged: bool


@dataclass
class EncodedLinkJoint:
    syndrome: np.ndarray


@dataclass
class EncodedLinksSuccessive:
    syndrome1: np.ndarray
    info_bits2: np.ndarray


def bias_propagation_quantize(
    code: LdgmCode,
    y: np.ndarray,
    target_d: float,
    max_iters: int = 25,
    seed: int = 0,
) -> QuantizationResult:
    """Quantize y onto the LDGM codebook by message passing with decimation.

    y is treated as the codeword seen through a BSC(target_d).  Each sweep
    runs one flooding round on the quantizer graph and then hard-fixes the
    most biased undecided information bits; the batch size is chosen so all
    bits are fixed within the sweep budget.  Ties and dead biases (below
    1e-9) fall back to seeded coin flips, which also clears the converged
    flag.
    """
    y = np.asarray(y)
    if y.shape != (code.n,):
        raise ValueError(f"observation length {y.shape} does not match n={code.n}")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    rng = np.random.default_rng(seed)
    td = min(max(float(target_d), MIN_TARGET_D), 0.5)
    channel_llr = (1.0 - 2.0 * y.astype(float)) * np.log((1.0 - td) / td)
    channel_tanh = np.tanh(0.5 * channel_llr)

    k = code.k
    edge_fac, edge_var = code.graph.edge_arrays()
    m_fv = np.zeros(len(edge_fac))
    fixed = np.full(k, -1, dtype=np.int8)
    fix_llr = np.zeros(k)
    converged = True

    for sweep in range(max_iters):
        unfixed = np.flatnonzero(fixed < 0)
        if len(unfixed) == 0:
            break
        var_tot = fix_llr + variable_sums(m_fv, edge_var, k)
        m_vf = clamp_llr(var_tot[edge_var] - m_fv, FIXED_LLR)
        m_fv = check_messages(m_vf, edge_fac, code.n, factor_scale=channel_tanh)
        bias = fix_llr + variable_sums(m_fv, edge_var, k)

        batch = -(-len(unfixed) // (max_iters - sweep))  # ceil division
        order = np.lexsort((unfixed, -np.abs(bias[unfixed])))
        chosen = unfixed[order[:batch]]
        dead = np.abs(bias[chosen]) < DECIMATION_BIAS_FLOOR
        values = (bias[chosen] < 0).astype(np.int8)
        if np.any(dead):
            values[dead] = rng.integers(0, 2, size=int(dead.sum()), dtype=np.int8)
            converged = False
        fixed[chosen] = values
        fix_llr[chosen] = np.where(values == 0, FIXED_LLR, -FIXED_LLR)

    info = fixed.astype(np.uint8)
    quantized = code.encode(info)
    distortion = float(np.mean(quantized != y))
    return QuantizationResult(
        info_bits=info,
        quantized=quantized,
        empirical_distortion=distortion,
        converged=converged,
    )


def syndrome_generate(code: LdpcCode, u: np.ndarray) -> np.ndarray:
    """s_i = mod-2 sum of u over the variables adjacent to check i."""
    return code.syndrome(u)


def _quantizer_seeds(seed: int) -> tuple[int, int]:
    state = np.random.SeedSequence(seed).generate_state(2)
    return int(state[0]), int(state[1])


def encode_joint(
    cc1: CompoundCode,
    cc2: CompoundCode,
    y1: np.ndarray,
    y2: np.ndarray,
    targets: TestChannelPair,
    seed: int = 0,
    biasprop_sweeps: int = 25,
) -> tuple[EncodedLinkJoint, EncodedLinkJoint, QuantizationResult, QuantizationResult]:
    """Quantize both observations, emit both LDPC syndromes (Fig-2 style)."""
    s1, s2 = _quantizer_seeds(seed)
    q1 = bias_propagation_quantize(cc1.ldgm, y1, targets.d1, biasprop_sweeps, seed=s1)
    q2 = bias_propagation_quantize(cc2.ldgm, y2, targets.d2, biasprop_sweeps, seed=s2)
    enc1 = EncodedLinkJoint(syndrome=syndrome_generate(cc1.ldpc, q1.quantized))
    enc2 = EncodedLinkJoint(syndrome=syndrome_generate(cc2.ldpc, q2.quantized))
    return enc1, enc2, q1, q2


def encode_successive(
    cc1: CompoundCode,
    ldgm2: LdgmCode,
    y1: np.ndarray,
    y2: np.ndarray,
    targets: TestChannelPair,
    seed: int = 0,
    biasprop_sweeps: int = 25,
) -> tuple[EncodedLinksSuccessive, QuantizationResult, QuantizationResult]:
    """Link 1 emits a syndrome; link 2 emits its quantizer information bits.

    The receiver reconstructs u2 exactly by re-encoding info_bits2, so the
    link-2 rate is k2/n.
    """
    s1, s2 = _quantizer_seeds(seed)
    q1 = bias_propagation_quantize(cc1.ldgm, y1, targets.d1, biasprop_sweeps, seed=s1)
    q2 = bias_propagation_quantize(ldgm2, y2, targets.d2, biasprop_sweeps, seed=s2)
    enc = EncodedLinksSuccessive(
        syndrome1=syndrome_generate(cc1.ldpc, q1.quantized),
        info_bits2=q2.info_bits,
    )
    return enc, q1, q2
