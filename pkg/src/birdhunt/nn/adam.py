"""Adaptive-moment optimizer with bias correction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AdamHyper:
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def init(cls, n_params: int, dtype=np.float32) -> "AdamState":
        return cls(m=np.zeros(n_params, dtype=dtype), v=np.zeros(n_params, dtype=dtype))


def adam_step(
    params: np.ndarray,
    grads: np.ndarray,
    state: AdamState,
    hyper: AdamHyper = AdamHyper(),
) -> tuple[np.ndarray, AdamState]:
    """One update; pure function of its inputs (fresh arrays returned)."""
    if params.shape != grads.shape:
        raise ValueError(f"params {params.shape} vs grads {grads.shape}")
    if not np.all(np.isfinite(grads)):
        bad = int(np.count_nonzero(~np.isfinite(grads)))
        raise FloatingPointError(f"non-finite gradient ({bad} of {grads.size} entries)")
    t = state.step + 1
    m = hyper.beta1 * state.m + (1.0 - hyper.beta1) * grads
    v = hyper.beta2 * state.v + (1.0 - hyper.beta2) * grads * grads
    m_hat = m / (1.0 - hyper.beta1**t)
    v_hat = v / (1.0 - hyper.beta2**t)
    new_params = params - hyper.lr * m_hat / (np.sqrt(v_hat) + hyper.eps)
    return new_params.astype(params.dtype), AdamState(m=m, v=v, step=t)
