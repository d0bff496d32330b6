"""Demo capture, integrity, summaries, and replay fidelity."""

import json

import numpy as np
import pytest

from birdhunt.demos import (
    DemoError,
    DemoRecorder,
    load_demo,
    record_oracle,
    replay_check,
    validate_demo,
)
from birdhunt.env import BirdHuntEnv, EnvConfig, OraclePolicy, Tier


def medium20(**kw):
    return EnvConfig(tier=Tier.MEDIUM, width=20, height=20, **kw)


def record_session(path, episodes=3, epsilon=0.0, seed=7, **cfg_kw):
    return record_oracle(medium20(**cfg_kw), seed, epsilon, episodes, str(path))


class TestRecording:
    def test_episode_count_matches_done_flags(self, tmp_path):
        demo = record_session(tmp_path / "a.demo.jsonl", episodes=3)
        assert demo.episode_count == 3
        assert sum(r.done for r in demo.records) == 3

    def test_empty_stream_is_a_valid_file(self, tmp_path):
        rec = DemoRecorder(medium20(), seed=1, recorder_tag="nobody")
        demo = rec.finalize(str(tmp_path / "empty.demo.jsonl"))
        assert demo.episode_count == 0
        loaded = load_demo(str(tmp_path / "empty.demo.jsonl"))
        assert loaded.records == []

    def test_corrupted_body_fails_at_load(self, tmp_path):
        path = tmp_path / "c.demo.jsonl"
        record_session(path)
        lines = path.read_text().splitlines(keepends=True)
        lines[2] = lines[2].replace('"reward"', '"reWard"', 1)
        path.write_text("".join(lines))
        with pytest.raises(DemoError, match="checksum"):
            load_demo(str(path))

    def test_mid_stream_shape_change_rejected(self, tmp_path):
        rec = DemoRecorder(medium20(), seed=1, recorder_tag="x")
        rec.on_step(np.zeros(1200, np.float32), (0, 0), -0.01, False)
        with pytest.raises(DemoError, match="mid-stream"):
            rec.on_step(np.zeros(400, np.float32), (0, 0), -0.01, False)

    def test_trailing_partial_episode_dropped(self, tmp_path):
        rec = DemoRecorder(medium20(), seed=1, recorder_tag="x")
        obs = np.zeros(1200, np.float32)
        rec.on_step(obs, (0, 0), -0.01, False)
        rec.on_step(obs, (1, 1), 1.0, True)
        rec.on_step(obs, (2, 2), -0.01, False)  # unfinished episode
        demo = rec.finalize(str(tmp_path / "t.demo.jsonl"))
        assert len(demo.records) == 2 and demo.episode_count == 1


class TestSummaries:
    def test_single_episode_arithmetic(self, tmp_path):
        rec = DemoRecorder(medium20(), seed=1, recorder_tag="x")
        obs = np.zeros(1200, np.float32)
        for reward, done in ((-0.01, False), (-0.01, False), (1.0, True)):
            rec.on_step(obs, (0, 0), reward, done)
        demo = rec.finalize(str(tmp_path / "s.demo.jsonl"))
        summary = demo.summarize()
        assert summary.mean_episodic_reward == pytest.approx(0.98)
        assert summary.miss_count == 2
        assert summary.hit_counts["YELLOW"] == 1

    def test_expert_band(self, tmp_path):
        demo = record_session(tmp_path / "e.demo.jsonl", episodes=50, epsilon=0.0)
        assert demo.summarize().mean_episodic_reward >= 0.99

    def test_suboptimal_band(self, tmp_path):
        demo = record_session(tmp_path / "s.demo.jsonl", episodes=100, epsilon=0.3)
        assert 0.70 <= demo.summarize().mean_episodic_reward <= 0.90

    def test_two_loads_identical_summaries(self, tmp_path):
        path = tmp_path / "d.demo.jsonl"
        record_session(path, episodes=5, epsilon=0.2)
        a = load_demo(str(path)).summarize()
        b = load_demo(str(path)).summarize()
        assert a == b


class TestValidation:
    def test_pristine_file_ok(self, tmp_path):
        demo = record_session(tmp_path / "ok.demo.jsonl")
        assert validate_demo(demo, medium20()) == []

    def test_dimension_mismatch_reported(self, tmp_path):
        demo = record_session(tmp_path / "d.demo.jsonl")
        diags = validate_demo(demo, EnvConfig(tier=Tier.MEDIUM, width=50, height=50))
        assert any("incompatible dimensions" in d for d in diags)

    def test_out_of_range_action_reported(self, tmp_path):
        path = tmp_path / "bad.demo.jsonl"
        demo = record_session(path, episodes=1)
        demo.records[0].action = (demo.env_config.width, 0)
        demo.save(str(path))
        diags = validate_demo(load_demo(str(path)), medium20())
        assert any("out of range" in d for d in diags)

    def test_illegal_reward_reported(self, tmp_path):
        path = tmp_path / "bad2.demo.jsonl"
        demo = record_session(path, episodes=1)
        demo.records[0].reward = 2.0  # RED reward cannot appear in MEDIUM
        demo.save(str(path))
        diags = validate_demo(load_demo(str(path)), medium20())
        assert any("reward set" in d for d in diags)

    def test_diagnostics_capped_at_ten(self, tmp_path):
        path = tmp_path / "bad3.demo.jsonl"
        demo = record_session(path, episodes=30, epsilon=0.5)
        for rec in demo.records:
            rec.reward = 7.0
        demo.save(str(path))
        assert len(validate_demo(load_demo(str(path)), medium20())) == 10


class TestReplayFidelity:
    @pytest.mark.parametrize("epsilon", [0.0, 0.3])
    def test_replay_reproduces_rewards_exactly(self, tmp_path, epsilon):
        path = tmp_path / "r.demo.jsonl"
        record_session(path, episodes=20, epsilon=epsilon)
        assert replay_check(load_demo(str(path))) == []

    def test_replay_detects_tampering(self, tmp_path):
        path = tmp_path / "r2.demo.jsonl"
        demo = record_session(path, episodes=5, epsilon=0.5)
        demo.records[0].reward = 1.0 if demo.records[0].reward != 1.0 else -0.01
        demo.save(str(path))
        assert replay_check(load_demo(str(path))) != []

    def test_actions_only_file_regenerates_observations(self, tmp_path):
        cfg = medium20()
        full_path, slim_path = tmp_path / "full.jsonl", tmp_path / "slim.jsonl"
        record_oracle(cfg, 9, 0.2, 10, str(full_path), include_observations=True)
        record_oracle(cfg, 9, 0.2, 10, str(slim_path), include_observations=False)
        full = load_demo(str(full_path))
        slim = load_demo(str(slim_path), regenerate_observations=True)
        assert len(full.records) == len(slim.records)
        for a, b in zip(full.records, slim.records):
            assert np.array_equal(a.observation, b.observation)

    def test_rewards_survive_json_round_trip_bitwise(self, tmp_path):
        path = tmp_path / "j.demo.jsonl"
        demo = record_session(path, episodes=10, epsilon=0.4)
        loaded = load_demo(str(path))
        for a, b in zip(demo.records, loaded.records):
            assert a.reward == b.reward

    def test_high_tier_session_replays(self, tmp_path):
        cfg = EnvConfig(tier=Tier.HIGH, width=20, height=20)
        path = tmp_path / "h.demo.jsonl"
        record_oracle(cfg, 3, 0.25, 15, str(path))
        demo = load_demo(str(path))
        assert replay_check(demo) == []
        assert validate_demo(demo, cfg) == []


class TestHeader:
    def test_header_is_self_describing(self, tmp_path):
        path = tmp_path / "h.demo.jsonl"
        record_session(path, episodes=2)
        header = json.loads(path.read_text().splitlines()[0])
        assert header["format_version"] == "1"
        assert header["env_config"]["colors"]["RED"] == [1.0, 0.0, 0.0]
        assert "spawns" in header["env_config"]
        assert header["episodes"] == 2
