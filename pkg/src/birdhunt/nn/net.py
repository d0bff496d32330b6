"""Forward/backward engine over flat parameter vectors.

Precision follows the parameter array's dtype: training runs float32, while
verification (finite differences) can run the identical code path in float64.
Loss scaling conventions live with the callers: `backward` consumes
d(loss)/d(logits) for branch heads and d(loss)/d(output) for scalar heads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .spec import Conv, Dense, Flatten, NetSpec, Relu


@dataclass
class NetOutput:
    branches: list[np.ndarray]  # softmax probabilities per branch head, (N, size)
    branch_logits: list[np.ndarray]
    scalars: list[np.ndarray]  # (N,) per scalar head
    trunk: np.ndarray
    cache: list | None


def init_params(spec: NetSpec, seed: int, dtype=np.float32) -> np.ndarray:
    """Orthogonal-ish trunk init (gain sqrt(2) before ReLU), zero-init heads."""
    rng = np.random.default_rng(seed)
    params = np.zeros(spec.param_count(), dtype=dtype)
    for name, shape, sl in spec.param_slices():
        if name.startswith("head") or name.endswith(".b"):
            continue  # zero
        fan_in = int(np.prod(shape[:-1]))
        fan_out = int(shape[-1])
        params[sl] = (_orthogonal(rng, fan_in, fan_out) * np.sqrt(2.0)).reshape(-1)
    return params


def _orthogonal(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    a = rng.normal(size=(max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return q[:rows, :cols]


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    total = e.sum(axis=-1, keepdims=True, dtype=np.float64)
    return (e / total).astype(z.dtype)


def log_softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=-1, keepdims=True, dtype=np.float64))
    return (shifted - lse).astype(z.dtype)


def _views(params: np.ndarray, spec: NetSpec) -> dict[str, np.ndarray]:
    return {name: params[sl].reshape(shape) for name, shape, sl in spec.param_slices()}


# -- convolution helpers ----------------------------------------------------


def _im2col(x: np.ndarray, kernel: int, stride: int) -> np.ndarray:
    windows = np.lib.stride_tricks.sliding_window_view(x, (kernel, kernel), axis=(1, 2))
    windows = windows[:, ::stride, ::stride]  # (N, OH, OW, C, k, k)
    return np.ascontiguousarray(windows.transpose(0, 1, 2, 4, 5, 3))  # (N,OH,OW,k,k,C)


def _col2im(
    dcols: np.ndarray, in_shape: tuple[int, ...], kernel: int, stride: int
) -> np.ndarray:
    n, h, w, c = in_shape
    oh, ow = dcols.shape[1], dcols.shape[2]
    dx = np.zeros((n, h, w, c), dtype=dcols.dtype)
    for i in range(kernel):
        for j in range(kernel):
            dx[:, i : i + stride * oh : stride, j : j + stride * ow : stride, :] += dcols[
                :, :, :, i, j, :
            ]
    return dx


# -- forward / backward ------------------------------------------------------


def forward(
    params: np.ndarray, spec: NetSpec, batch: np.ndarray, want_cache: bool = False
) -> NetOutput:
    views = _views(params, spec)
    x = np.asarray(batch, dtype=params.dtype)
    if x.ndim == 1:
        x = x[None, :]
    n = x.shape[0]
    expected = spec.input_height * spec.input_width * spec.input_channels
    if int(np.prod(x.shape[1:])) != expected:
        raise ValueError(
            f"batch has {int(np.prod(x.shape[1:]))} features per sample, spec wants {expected}"
        )
    h = x.reshape(n, spec.input_height, spec.input_width, spec.input_channels)

    cache: list = []
    for i, layer in enumerate(spec.layers):
        if isinstance(layer, Conv):
            cols = _im2col(h, layer.kernel, layer.stride)
            n_, oh, ow = cols.shape[0], cols.shape[1], cols.shape[2]
            w_mat = views[f"conv{i}.w"].reshape(-1, layer.out_channels)
            flat = cols.reshape(n_ * oh * ow, -1)
            out = flat @ w_mat + views[f"conv{i}.b"]
            if want_cache:
                cache.append(("conv", i, layer, flat, h.shape))
            h = out.reshape(n_, oh, ow, layer.out_channels)
        elif isinstance(layer, Dense):
            if want_cache:
                cache.append(("dense", i, layer, h, None))
            h = h @ views[f"dense{i}.w"] + views[f"dense{i}.b"]
        elif isinstance(layer, Relu):
            mask = h > 0
            if want_cache:
                cache.append(("relu", i, layer, mask, None))
            h = h * mask
        elif isinstance(layer, Flatten):
            if want_cache:
                cache.append(("flatten", i, layer, h.shape, None))
            h = h.reshape(n, -1)

    trunk = h
    branches: list[np.ndarray] = []
    branch_logits: list[np.ndarray] = []
    scalars: list[np.ndarray] = []
    for j, head in enumerate(spec.heads):
        z = trunk @ views[f"head{j}.w"] + views[f"head{j}.b"]
        if head.kind == "branch":
            branch_logits.append(z)
            branches.append(softmax(z))
        else:
            scalars.append(z[:, 0])
    return NetOutput(branches, branch_logits, scalars, trunk, cache if want_cache else None)


def backward(
    params: np.ndarray,
    spec: NetSpec,
    output: NetOutput,
    head_grads: Sequence[np.ndarray | None],
) -> np.ndarray:
    """Gradient of a scalar loss w.r.t. params.

    head_grads aligns with spec.heads: d(loss)/d(logits) for branch heads,
    d(loss)/d(output) for scalar heads; None for heads the loss ignores.
    """
    if output.cache is None:
        raise ValueError("forward(..., want_cache=True) output required")
    if len(head_grads) != len(spec.heads):
        raise ValueError(f"expected {len(spec.heads)} head gradients, got {len(head_grads)}")
    views = _views(params, spec)
    grads = np.zeros_like(params)
    gviews = _views(grads, spec)

    trunk = output.trunk
    dtrunk = np.zeros_like(trunk)
    for j, (head, hg) in enumerate(zip(spec.heads, head_grads)):
        if hg is None:
            continue
        dz = np.asarray(hg, dtype=params.dtype)
        if head.kind == "scalar":
            dz = dz.reshape(-1, 1)
        if dz.shape != (trunk.shape[0], head.size):
            raise ValueError(
                f"head {j} gradient has shape {dz.shape}, expected {(trunk.shape[0], head.size)}"
            )
        gviews[f"head{j}.w"] += trunk.T @ dz
        gviews[f"head{j}.b"] += dz.sum(axis=0, dtype=np.float64).astype(params.dtype)
        dtrunk += dz @ views[f"head{j}.w"].T

    dh = dtrunk
    for kind, i, layer, stored, extra in reversed(output.cache):
        if kind == "dense":
            gviews[f"dense{i}.w"] += stored.T @ dh
            gviews[f"dense{i}.b"] += dh.sum(axis=0, dtype=np.float64).astype(params.dtype)
            dh = dh @ views[f"dense{i}.w"].T
        elif kind == "relu":
            dh = dh * stored
        elif kind == "flatten":
            dh = dh.reshape(stored)
        elif kind == "conv":
            n, oh, ow, oc = dh.shape
            flat_dout = dh.reshape(n * oh * ow, oc)
            w_mat = views[f"conv{i}.w"].reshape(-1, layer.out_channels)
            gviews[f"conv{i}.w"] += (stored.T @ flat_dout).reshape(
                layer.kernel, layer.kernel, -1, layer.out_channels
            )
            gviews[f"conv{i}.b"] += flat_dout.sum(axis=0, dtype=np.float64).astype(params.dtype)
            dcols = (flat_dout @ w_mat.T).reshape(
                n, oh, ow, layer.kernel, layer.kernel, extra[3]
            )
            dh = _col2im(dcols, extra, layer.kernel, layer.stride)
    return grads


# -- distribution utilities ---------------------------------------------------


def entropy(branches: Sequence[np.ndarray]) -> np.ndarray | float:
    """Summed branch entropies, -sum p ln p per branch; >= 0."""
    total: np.ndarray | float = 0.0
    for probs in branches:
        p = np.asarray(probs, dtype=np.float64)
        plogp = np.where(p > 0.0, p * np.log(np.where(p > 0.0, p, 1.0)), 0.0)
        total = total + (-plogp.sum(axis=-1))
    if np.ndim(total) == 0:
        return float(total)
    return total


def log_prob(branch_logits: Sequence[np.ndarray], actions: np.ndarray) -> np.ndarray:
    """Joint log-probability of (N, n_branches) integer actions."""
    actions = np.asarray(actions)
    n = actions.shape[0]
    total = np.zeros(n, dtype=np.float64)
    for b, logits in enumerate(branch_logits):
        lp = log_softmax(logits)
        total += lp[np.arange(n), actions[:, b]].astype(np.float64)
    return total


def sample_actions(
    branches: Sequence[np.ndarray], rng: np.random.Generator
) -> np.ndarray:
    """Categorical sample per branch; (N, n_branches) ints."""
    n = branches[0].shape[0]
    out = np.empty((n, len(branches)), dtype=np.int64)
    for b, probs in enumerate(branches):
        cdf = np.cumsum(probs.astype(np.float64), axis=1)
        u = rng.random((n, 1)) * cdf[:, -1:]
        out[:, b] = np.minimum((cdf < u).sum(axis=1), probs.shape[1] - 1)
    return out


def greedy_actions(
    branches: Sequence[np.ndarray], rng: np.random.Generator
) -> np.ndarray:
    """Argmax per branch; exact ties broken uniformly at random.

    An untrained (zero-init) head produces exactly equal probabilities, so
    greedy evaluation of it behaves as a uniform-random policy; for trained
    heads exact ties essentially never occur and this is plain argmax.
    """
    n = branches[0].shape[0]
    out = np.empty((n, len(branches)), dtype=np.int64)
    for b, probs in enumerate(branches):
        is_max = probs == probs.max(axis=1, keepdims=True)
        jitter = rng.random(probs.shape)
        out[:, b] = np.argmax(is_max * (1.0 + jitter), axis=1)
    return out


# -- input gradients and the discriminator penalty ----------------------------


def logit_input_gradient(
    params: np.ndarray, spec: NetSpec, batch: np.ndarray, head_index: int = 0
) -> np.ndarray:
    """d(scalar head logit)/d(input), (N, D). Dense-only trunks."""
    _require_dense(spec)
    views = _views(params, spec)
    x = np.asarray(batch, dtype=params.dtype)
    if x.ndim == 1:
        x = x[None, :]
    x = x.reshape(x.shape[0], -1)

    masks: list[tuple[str, int]] = []
    h = x
    acts: list[np.ndarray] = []
    for i, layer in enumerate(spec.layers):
        if isinstance(layer, Dense):
            h = h @ views[f"dense{i}.w"] + views[f"dense{i}.b"]
            masks.append(("dense", i))
        elif isinstance(layer, Relu):
            m = h > 0
            acts.append(m)
            h = h * m
            masks.append(("relu", len(acts) - 1))
        elif isinstance(layer, Flatten):
            masks.append(("flatten", 0))

    u = np.broadcast_to(
        views[f"head{head_index}.w"][:, 0], (x.shape[0], h.shape[1])
    ).astype(params.dtype)
    for kind, ref in reversed(masks):
        if kind == "relu":
            u = u * acts[ref]
        elif kind == "dense":
            u = u @ views[f"dense{ref}.w"].T
    return u


def gradient_penalty(
    params: np.ndarray, spec: NetSpec, batch: np.ndarray, head_index: int = 0
) -> tuple[float, np.ndarray]:
    """Zero-centered penalty mean ||d logit/d input||^2 and its param gradient.

    Exact double-backprop for dense/ReLU stacks: ReLU's second derivative is
    zero almost everywhere, so the activation masks are treated as constants.
    Bias gradients are exactly zero.
    """
    _require_dense(spec)
    views = _views(params, spec)
    x = np.asarray(batch, dtype=params.dtype)
    if x.ndim == 1:
        x = x[None, :]
    x = x.reshape(x.shape[0], -1)
    n = x.shape[0]

    # Forward pass, keeping masks; backward pass keeping each dense layer's
    # incoming u-vector (d logit / d pre-activation of that layer).
    h = x
    steps: list[tuple[str, int, np.ndarray | None]] = []
    for i, layer in enumerate(spec.layers):
        if isinstance(layer, Dense):
            steps.append(("dense", i, None))
            h = h @ views[f"dense{i}.w"] + views[f"dense{i}.b"]
        elif isinstance(layer, Relu):
            m = h > 0
            steps.append(("relu", i, m))
            h = h * m
        elif isinstance(layer, Flatten):
            steps.append(("flatten", i, None))

    u = np.broadcast_to(views[f"head{head_index}.w"][:, 0], (n, h.shape[1])).astype(
        params.dtype
    )
    u_at_dense: dict[int, np.ndarray] = {}
    for kind, i, m in reversed(steps):
        if kind == "relu":
            u = u * m
        elif kind == "dense":
            u_at_dense[i] = u
            u = u @ views[f"dense{i}.w"].T
    g = u  # (N, D0): d logit / d input
    penalty = float((g.astype(np.float64) ** 2).sum() / n)

    grads = np.zeros_like(params)
    gviews = _views(grads, spec)
    s = g
    for kind, i, m in steps:
        if kind == "dense":
            gviews[f"dense{i}.w"] += (2.0 / n) * (s.T @ u_at_dense[i])
            s = s @ views[f"dense{i}.w"]
        elif kind == "relu":
            s = s * m
    gviews[f"head{head_index}.w"][:, 0] += (2.0 / n) * s.sum(axis=0, dtype=np.float64).astype(
        params.dtype
    )
    return penalty, grads


def _require_dense(spec: NetSpec) -> None:
    if not spec.is_dense_only():
        raise ValueError("input-gradient routines support dense-only trunks")
    if spec.heads and spec.heads[0].kind != "scalar":
        # head choice is validated by the caller via head_index
        pass
