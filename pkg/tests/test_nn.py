"""Network stack: shapes, gradients vs finite differences, optimizer, container."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from birdhunt.nn import (
    AdamHyper,
    AdamState,
    CheckpointError,
    Conv,
    Dense,
    Flatten,
    Head,
    NetSpec,
    Relu,
    adam_step,
    backward,
    entropy,
    forward,
    gradient_penalty,
    init_params,
    load_checkpoint,
    log_prob,
    sample_actions,
    save_checkpoint,
)


def dense_spec(d_in=12, hidden=16, branches=(5, 7), scalars=1):
    heads = tuple(Head(b, "branch") for b in branches) + tuple(
        Head(1, "scalar") for _ in range(scalars)
    )
    return NetSpec(
        input_width=d_in,
        input_height=1,
        input_channels=1,
        layers=(Flatten(), Dense(hidden), Relu(), Dense(hidden), Relu()),
        heads=heads,
    )


def conv_spec():
    return NetSpec(
        input_width=9,
        input_height=9,
        input_channels=2,
        layers=(Conv(4, 3, 2), Relu(), Flatten(), Dense(10), Relu()),
        heads=(Head(4, "branch"), Head(1, "scalar")),
    )


def composite_loss(spec, batch, targets, scalar_weights):
    """Summed cross-entropy on branch heads plus a linear term on scalars.

    Returns (loss_fn over params, head_grads_fn over outputs): an analytic
    pair whose gradient the finite-difference oracle can check.
    """

    def loss(params):
        out = forward(params, spec, batch)
        total = 0.0
        bi = si = 0
        for head in spec.heads:
            if head.kind == "branch":
                p = out.branches[bi]
                rows = np.arange(p.shape[0])
                total += -np.log(p[rows, targets[bi]]).sum()
                bi += 1
            else:
                total += float((scalar_weights[si] * out.scalars[si]).sum())
                si += 1
        return float(total)

    def head_grads(out):
        grads = []
        bi = si = 0
        for head in spec.heads:
            if head.kind == "branch":
                p = out.branches[bi]
                onehot = np.zeros_like(p)
                onehot[np.arange(p.shape[0]), targets[bi]] = 1.0
                grads.append(p - onehot)
                bi += 1
            else:
                grads.append(scalar_weights[si])
                si += 1
        return grads

    return loss, head_grads


def finite_difference(loss, params, step=1e-4):
    g = np.zeros_like(params)
    for i in range(params.size):
        plus = params.copy()
        plus[i] += step
        minus = params.copy()
        minus[i] -= step
        g[i] = (loss(plus) - loss(minus)) / (2.0 * step)
    return g


def max_relative_error(a, b):
    return float(np.max(np.abs(a - b) / np.maximum(1e-6, np.abs(a) + np.abs(b))))


class TestForward:
    def test_zero_init_heads_give_uniform_branches(self):
        spec = dense_spec()
        params = init_params(spec, seed=0)
        out = forward(params, spec, np.random.default_rng(0).random((4, 12), np.float32))
        for probs in out.branches:
            assert np.allclose(probs, 1.0 / probs.shape[1], atol=1e-7)

    def test_single_observation_matches_batch_path(self):
        spec = dense_spec()
        params = init_params(spec, seed=1)
        params = params + np.random.default_rng(1).normal(0, 0.05, params.size).astype(np.float32)
        batch = np.random.default_rng(2).random((3, 12), np.float32)
        full = forward(params, spec, batch)
        solo = forward(params, spec, batch[1])
        assert np.allclose(full.branches[0][1], solo.branches[0][0], atol=1e-6)
        assert np.allclose(full.scalars[0][1], solo.scalars[0][0], atol=1e-6)

    def test_deterministic_given_seed(self):
        spec = conv_spec()
        x = np.random.default_rng(5).random((2, 9 * 9 * 2), np.float32)
        a = forward(init_params(spec, seed=3), spec, x)
        b = forward(init_params(spec, seed=3), spec, x)
        assert np.array_equal(a.branches[0], b.branches[0])

    def test_shape_mismatch_rejected(self):
        spec = dense_spec()
        with pytest.raises(ValueError, match="features"):
            forward(init_params(spec, seed=0), spec, np.zeros((2, 13), np.float32))

    def test_probabilities_normalized(self):
        spec = dense_spec(branches=(50, 50), scalars=0)
        params = init_params(spec, seed=2)
        params = params + np.random.default_rng(0).normal(0, 0.5, params.size).astype(np.float32)
        out = forward(params, spec, np.random.default_rng(1).random((8, 12), np.float32))
        for probs in out.branches:
            assert np.all(probs >= 0)
            assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-6)

    def test_param_count_pure_function_of_spec(self):
        spec = dense_spec()
        assert spec.param_count() == init_params(spec, seed=9).size
        # 12->16 dense, 16->16 dense, heads 16->5, 16->7, 16->1
        expected = (12 * 16 + 16) + (16 * 16 + 16) + (16 * 5 + 5) + (16 * 7 + 7) + (16 + 1)
        assert spec.param_count() == expected


class TestBackward:
    def _gradcheck(self, spec, seed, batch_size=3):
        rng = np.random.default_rng(seed)
        params = init_params(spec, seed, dtype=np.float64)
        params = params + rng.normal(0, 0.1, params.size)
        d = spec.input_width * spec.input_height * spec.input_channels
        batch = rng.random((batch_size, d))
        targets = [rng.integers(0, h.size, batch_size) for h in spec.heads if h.kind == "branch"]
        weights = [rng.normal(size=batch_size) for h in spec.heads if h.kind == "scalar"]
        loss, head_grads = composite_loss(spec, batch, targets, weights)
        out = forward(params, spec, batch, want_cache=True)
        analytic = backward(params, spec, out, head_grads(out))
        numeric = finite_difference(loss, params)
        return max_relative_error(analytic, numeric)

    def test_dense_gradient_matches_finite_differences(self):
        assert self._gradcheck(dense_spec(), seed=7) < 1e-4

    def test_conv_gradient_matches_finite_differences(self):
        assert self._gradcheck(conv_spec(), seed=11) < 1e-4

    def test_constant_loss_zero_gradient(self):
        spec = dense_spec(scalars=1, branches=())
        params = init_params(spec, seed=0)
        out = forward(params, spec, np.ones((2, 12), np.float32), want_cache=True)
        grads = backward(params, spec, out, [np.zeros(2, np.float32)])
        assert not grads.any()

    def test_doubling_loss_doubles_gradient(self):
        spec = dense_spec()
        rng = np.random.default_rng(3)
        params = init_params(spec, seed=3) + rng.normal(0, 0.1, dense_spec().param_count()).astype(
            np.float32
        )
        batch = rng.random((4, 12), np.float32)
        out = forward(params, spec, batch, want_cache=True)
        targets = [rng.integers(0, 5, 4), rng.integers(0, 7, 4)]
        _, head_grads = composite_loss(spec, batch, targets, [rng.normal(size=4)])
        hg = head_grads(out)
        g1 = backward(params, spec, out, hg)
        g2 = backward(params, spec, out, [2.0 * g for g in hg])
        assert np.allclose(2.0 * g1, g2, atol=1e-5)

    def test_missing_cache_rejected(self):
        spec = dense_spec()
        params = init_params(spec, seed=0)
        out = forward(params, spec, np.ones((1, 12), np.float32))
        with pytest.raises(ValueError, match="want_cache"):
            backward(params, spec, out, [None, None, None])


class TestEntropy:
    def test_two_uniform_branches_of_50(self):
        dist = [np.full(50, 0.02), np.full(50, 0.02)]
        assert entropy(dist) == pytest.approx(2.0 * np.log(50.0), abs=1e-9)

    def test_deterministic_distribution_is_zero(self):
        p = np.zeros(10)
        p[3] = 1.0
        assert entropy([p]) == 0.0

    def test_uniform_binary_branch(self):
        assert entropy([np.array([0.5, 0.5])]) == pytest.approx(np.log(2.0), abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(2, 40))
    def test_bounds(self, seed, size):
        rng = np.random.default_rng(seed)
        p = rng.dirichlet(np.ones(size))
        h = entropy([p])
        assert 0.0 <= h <= np.log(size) + 1e-9


class TestAdam:
    def test_zero_gradient_keeps_params(self):
        params = np.arange(5, dtype=np.float32)
        state = AdamState.init(5)
        new, _ = adam_step(params, np.zeros(5, np.float32), state)
        assert np.array_equal(new, params)

    def test_first_step_moves_by_lr_in_sign_direction(self):
        g = np.array([0.3, -2.0, 1e-3], dtype=np.float32)
        params = np.zeros(3, np.float32)
        hyper = AdamHyper(lr=1e-2)
        new, _ = adam_step(params, g, AdamState.init(3), hyper)
        assert np.allclose(new, -np.sign(g) * hyper.lr, rtol=1e-3)

    def test_identical_calls_identical_results(self):
        rng = np.random.default_rng(0)
        params = rng.random(8).astype(np.float32)
        grads = rng.normal(size=8).astype(np.float32)
        a, sa = adam_step(params, grads, AdamState.init(8))
        b, sb = adam_step(params, grads, AdamState.init(8))
        assert np.array_equal(a, b)
        assert np.array_equal(sa.m, sb.m) and sa.step == sb.step

    def test_non_finite_gradients_rejected(self):
        params = np.zeros(3, np.float32)
        bad = np.array([1.0, np.nan, 0.0], dtype=np.float32)
        with pytest.raises(FloatingPointError, match="non-finite"):
            adam_step(params, bad, AdamState.init(3))


class TestSampling:
    def test_log_prob_matches_manual(self):
        spec = dense_spec(branches=(4, 3), scalars=0)
        rng = np.random.default_rng(2)
        params = init_params(spec, seed=2) + rng.normal(0, 0.3, dense_spec(branches=(4, 3), scalars=0).param_count()).astype(np.float32)
        out = forward(params, spec, rng.random((5, 12), np.float32))
        actions = np.stack([rng.integers(0, 4, 5), rng.integers(0, 3, 5)], axis=1)
        lp = log_prob(out.branch_logits, actions)
        manual = np.log(out.branches[0][np.arange(5), actions[:, 0]]) + np.log(
            out.branches[1][np.arange(5), actions[:, 1]]
        )
        assert np.allclose(lp, manual, atol=1e-5)

    def test_sample_respects_support(self):
        probs = np.zeros((100, 6))
        probs[:, 2] = 1.0
        actions = sample_actions([probs], np.random.default_rng(0))
        assert np.all(actions == 2)


class TestGradientPenalty:
    def test_matches_finite_differences(self):
        spec = NetSpec(
            input_width=10,
            input_height=1,
            input_channels=1,
            layers=(Flatten(), Dense(12), Relu(), Dense(8), Relu()),
            heads=(Head(1, "scalar"),),
        )
        rng = np.random.default_rng(4)
        params = init_params(spec, seed=4, dtype=np.float64)
        params = params + rng.normal(0, 0.2, params.size)
        batch = rng.random((3, 10))

        def penalty_only(p):
            return gradient_penalty(p, spec, batch)[0]

        _, analytic = gradient_penalty(params, spec, batch)
        numeric = finite_difference(penalty_only, params, step=1e-5)
        assert max_relative_error(analytic, numeric) < 1e-4

    def test_rejects_conv_trunks(self):
        with pytest.raises(ValueError, match="dense-only"):
            gradient_penalty(
                init_params(conv_spec(), 0), conv_spec(), np.zeros((1, 162), np.float32)
            )


class TestCheckpoint:
    def test_round_trip(self, tmp_path):
        spec = dense_spec()
        params = init_params(spec, seed=5)
        path = str(tmp_path / "net.bhnc")
        save_checkpoint(path, spec, params, meta={"trainer": "ppo"})
        spec2, params2, meta = load_checkpoint(path)
        assert spec2 == spec
        assert np.array_equal(params2, params)
        assert meta == {"trainer": "ppo"}

    def test_corruption_detected(self, tmp_path):
        spec = dense_spec()
        path = str(tmp_path / "net.bhnc")
        save_checkpoint(path, spec, init_params(spec, seed=5))
        blob = bytearray(open(path, "rb").read())
        blob[60] ^= 0xFF
        open(path, "wb").write(bytes(blob))
        with pytest.raises(CheckpointError, match="checksum"):
            load_checkpoint(path)

    def test_wrong_length_rejected(self, tmp_path):
        spec = dense_spec()
        with pytest.raises(CheckpointError, match="length"):
            save_checkpoint(str(tmp_path / "x.bhnc"), spec, np.zeros(3, np.float32))
