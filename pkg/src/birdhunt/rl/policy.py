"""Acting-side wrapper over a (spec, params) pair."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..nn import (
    AdamState,
    NetSpec,
    entropy,
    forward,
    greedy_actions,
    init_params,
    log_prob,
    sample_actions,
    softmax,
)


@dataclass
class PolicyNets:
    """A net plus its optimizer state, the unit every trainer shuffles around."""

    spec: NetSpec
    params: np.ndarray
    adam: AdamState | None = field(default=None)

    def __post_init__(self) -> None:
        if self.adam is None:
            self.adam = AdamState.init(self.params.size, dtype=self.params.dtype)

    @classmethod
    def create(cls, spec: NetSpec, seed: int) -> "PolicyNets":
        return cls(spec=spec, params=init_params(spec, seed))


class CategoricalPolicy:
    """Maps observation batches to branched discrete actions.

    mode "sample" draws from the softmax heads (optionally tempered);
    mode "greedy" takes the per-branch argmax with random tie-breaking.
    """

    def __init__(
        self,
        spec: NetSpec,
        params: np.ndarray,
        rng: np.random.Generator,
        mode: str = "sample",
        temperature: float = 1.0,
    ):
        if mode not in ("sample", "greedy"):
            raise ValueError(f"unknown mode {mode!r}")
        if temperature <= 0:
            raise ValueError("temperature must be positive")
        self.spec = spec
        self.params = params
        self.rng = rng
        self.mode = mode
        self.temperature = temperature

    def __call__(self, obs_batch: np.ndarray) -> dict[str, np.ndarray]:
        out = forward(self.params, self.spec, obs_batch)
        branches = out.branches
        if self.temperature != 1.0:
            branches = [softmax(z / self.temperature) for z in out.branch_logits]
        if self.mode == "greedy":
            actions = greedy_actions(branches, self.rng)
        else:
            actions = sample_actions(branches, self.rng)
        result = {
            "actions": actions,
            "logp": log_prob(out.branch_logits, actions),
            "entropy": np.atleast_1d(entropy(out.branches)),
        }
        if out.scalars:
            result["value"] = out.scalars[0]
        return result
