"""Vectorized helpers shared by the quantizer and the decoders.

Messages are natural-log LLRs with positive sign favoring bit 0.  Check
updates run in the tanh half-angle domain; leave-one-out products are
computed per factor in log-magnitude/sign form so exact zeros (fully
uninformative legs) are handled without division.
"""

from __future__ import annotations

import numpy as np

LLR_CLAMP = 30.0
# Keeps atanh finite; corresponds to |message| ~ 37, above the LLR clamp.
TANH_CLIP = 1.0 - 1e-16


def clamp_llr(values: np.ndarray, limit: float = LLR_CLAMP) -> np.ndarray:
    return np.clip(values, -limit, limit)


def leave_one_out_products(
    t: np.ndarray, edge_fac: np.ndarray, n_fac: int
) -> np.ndarray:
    """Per-edge product of t over the other edges of the same factor."""
    zero = t == 0.0
    neg = t < 0.0
    logabs = np.zeros_like(t)
    np.log(np.abs(t), out=logabs, where=~zero)
    fac_log = np.bincount(edge_fac, weights=np.where(zero, 0.0, logabs), minlength=n_fac)
    fac_neg = np.bincount(edge_fac, weights=neg.astype(float), minlength=n_fac)
    fac_zero = np.bincount(edge_fac, weights=zero.astype(float), minlength=n_fac)

    zeros_excl = fac_zero[edge_fac] - zero
    log_excl = fac_log[edge_fac] - np.where(zero, 0.0, logabs)
    neg_excl = fac_neg[edge_fac] - neg
    prod = np.where(zeros_excl > 0, 0.0, np.exp(log_excl))
    sign = np.where(neg_excl % 2 == 1, -1.0, 1.0)
    return prod * sign


def check_messages(
    m_in: np.ndarray,
    edge_fac: np.ndarray,
    n_fac: int,
    factor_scale: np.ndarray | None = None,
) -> np.ndarray:
    """Parity-check message update 2*atanh(scale_f * prod tanh(m/2)).

    factor_scale carries per-factor terms that are never left out: the
    syndrome sign (1 - 2s) for parity checks, or tanh of the channel LLR
    for quantizer factors.
    """
    t = np.tanh(0.5 * m_in)
    prod = leave_one_out_products(t, edge_fac, n_fac)
    if factor_scale is not None:
        prod = prod * factor_scale[edge_fac]
    prod = np.clip(prod, -TANH_CLIP, TANH_CLIP)
    return clamp_llr(2.0 * np.arctanh(prod))


def variable_sums(
    m_in: np.ndarray, edge_var: np.ndarray, n_var: int
) -> np.ndarray:
    """Per-variable sum of incoming check messages."""
    return np.bincount(edge_var, weights=m_in, minlength=n_var)
