"""Environment state machine: rewards, ammunition, episodes, determinism."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from birdhunt.env import (
    Bird,
    BirdHuntEnv,
    EnvConfig,
    EnvConfigError,
    Species,
    Tier,
    ammo_transition,
)


def low20(**kw):
    return EnvConfig(tier=Tier.LOW, width=20, height=20, **kw)


def medium20(**kw):
    return EnvConfig(tier=Tier.MEDIUM, width=20, height=20, **kw)


def high20(**kw):
    kw.setdefault("clip_size", 3)
    kw.setdefault("t_reload", 2)
    return EnvConfig(tier=Tier.HIGH, width=20, height=20, **kw)


def place_bird(env, species, x, y, dx=0.0, dy=0.0):
    env.state.birds = [
        Bird(species=species, x=x, y=y, dx=dx, dy=dy, extent=env.config.bird_extent)
    ]


class TestConfig:
    def test_channels_derived_from_tier(self):
        assert EnvConfig(tier=Tier.LOW).channels == 1
        assert EnvConfig(tier=Tier.MEDIUM).channels == 3
        assert EnvConfig(tier=Tier.HIGH).channels == 3

    def test_low_tier_rejects_rgb(self):
        with pytest.raises(EnvConfigError, match="grayscale"):
            EnvConfig(tier=Tier.LOW, channels=3)

    def test_tiny_board_rejected(self):
        with pytest.raises(EnvConfigError, match="4x4"):
            EnvConfig(width=3, height=10)

    def test_high_tier_requires_clip_and_reload(self):
        with pytest.raises(EnvConfigError, match="clip_size"):
            EnvConfig(tier=Tier.HIGH, clip_size=0)
        with pytest.raises(EnvConfigError, match="t_reload"):
            EnvConfig(tier=Tier.HIGH, t_reload=0)

    def test_json_round_trip(self):
        cfg = high20(bird_extent=1.5, max_episode_steps=64)
        doc = cfg.to_json()
        assert doc["colors"]["YELLOW"] == [1.0, 1.0, 0.0]
        restored = EnvConfig.from_json(doc)
        assert restored == cfg

    def test_non_high_tiers_only_know_yellow(self):
        from birdhunt.env import SpawnSpec

        with pytest.raises(EnvConfigError, match="only YELLOW"):
            EnvConfig(
                tier=Tier.MEDIUM,
                spawns={
                    Species.YELLOW: SpawnSpec(0.5, 0.5, 0.2, 0.2),
                    Species.RED: SpawnSpec(0.5, 0.5, 0.2, 0.2),
                },
            )


class TestObservationShape:
    def test_paper_scale_low_is_2500(self):
        env = BirdHuntEnv(EnvConfig(tier=Tier.LOW, width=50, height=50))
        assert env.reset(seed=7).shape == (2500,)

    def test_paper_scale_medium_is_7500(self):
        env = BirdHuntEnv(EnvConfig(tier=Tier.MEDIUM, width=50, height=50))
        assert env.reset(seed=7).shape == (7500,)

    def test_desk_scale_low_in_unit_range(self):
        env = BirdHuntEnv(low20())
        obs = env.reset(seed=0)
        assert obs.shape == (400,)
        assert obs.min() >= 0.0 and obs.max() <= 1.0


class TestRewards:
    def test_yellow_hit_low_tier(self):
        env = BirdHuntEnv(low20())
        env.reset(seed=1)
        place_bird(env, Species.YELLOW, 10.0, 12.0)
        res = env.step((10, 12))
        assert res.reward == 1.0 and res.done
        assert res.info.outcome == "YELLOW"

    def test_miss_low_tier(self):
        env = BirdHuntEnv(low20())
        env.reset(seed=1)
        place_bird(env, Species.YELLOW, 10.0, 12.0)
        res = env.step((0, 0))
        assert res.reward == -0.01 and not res.done
        assert res.info.outcome == "MISS"

    def test_red_and_black_hits_high_tier(self):
        env = BirdHuntEnv(high20())
        env.reset(seed=1)
        place_bird(env, Species.RED, 5.0, 5.0)
        res = env.step((5, 5))
        assert res.reward == 2.0 and res.done

        env.begin_episode()
        place_bird(env, Species.BLACK, 6.0, 6.0)
        res = env.step((6, 6))
        assert res.reward == -0.5 and res.done
        assert res.info.outcome == "BLACK"

    def test_hit_edge_of_extent_counts(self):
        env = BirdHuntEnv(low20(bird_extent=2.0))
        env.reset(seed=1)
        place_bird(env, Species.YELLOW, 10.0, 10.0)
        assert env.step((12, 8)).reward == 1.0

    def test_just_outside_extent_misses(self):
        env = BirdHuntEnv(low20(bird_extent=2.0))
        env.reset(seed=1)
        place_bird(env, Species.YELLOW, 10.0, 10.0)
        assert env.step((13, 10)).reward == -0.01

    def test_out_of_range_action_rejected(self):
        env = BirdHuntEnv(low20())
        env.reset(seed=1)
        with pytest.raises(ValueError, match="outside"):
            env.step((20, 0))
        with pytest.raises(ValueError, match="outside"):
            env.step((0, -1))

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_low_rewards_always_legal(self, seed):
        env = BirdHuntEnv(low20(max_episode_steps=30))
        env.reset(seed=seed)
        rng = np.random.default_rng(seed)
        for _ in range(60):
            res = env.step((int(rng.integers(0, 20)), int(rng.integers(0, 20))))
            assert res.reward in (1.0, -0.01)
            if res.done:
                env.begin_episode()

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_high_rewards_always_legal(self, seed):
        env = BirdHuntEnv(high20(max_episode_steps=30))
        env.reset(seed=seed)
        rng = np.random.default_rng(seed)
        for _ in range(60):
            res = env.step((int(rng.integers(0, 20)), int(rng.integers(0, 20))))
            assert res.reward in (1.0, 2.0, -0.01, -0.5, 0.0)
            if res.reward == 0.0:
                assert res.info.outcome == "RELOADING"
            if res.done:
                env.begin_episode()


def brute_force_ammo_series(t_max: int, clip_size: int, t_reload: int) -> list[int]:
    """Narrative simulation: fire while rounds remain, then count down a reload."""
    ammo = clip_size
    countdown = 0
    series = []
    for _ in range(1, t_max + 1):
        if ammo > 0:
            ammo -= 1
            if ammo == 0:
                countdown = t_reload
        else:
            countdown -= 1
            if countdown == 0:
                ammo = clip_size
        series.append(ammo)
    return series


class TestAmmo:
    @pytest.mark.parametrize(
        "ammo_prev,t,clip,reload,expected",
        [(3, 1, 3, 2, 2), (0, 5, 3, 2, 3), (0, 4, 3, 2, 0)],
    )
    def test_spot_values(self, ammo_prev, t, clip, reload, expected):
        assert ammo_transition(ammo_prev, t, clip, reload) == expected

    def test_chain_matches_brute_force(self):
        for clip in range(1, 6):
            for reload in range(1, 6):
                expected = brute_force_ammo_series(1000, clip, reload)
                ammo = clip
                for t in range(1, 1001):
                    ammo = ammo_transition(ammo, t, clip, reload)
                    assert ammo == expected[t - 1], (clip, reload, t)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            ammo_transition(-1, 1, 3, 2)
        with pytest.raises(ValueError):
            ammo_transition(4, 1, 3, 2)
        with pytest.raises(ValueError):
            ammo_transition(0, 0, 3, 2)

    def test_reloading_step_fires_nothing(self):
        env = BirdHuntEnv(high20(clip_size=1, t_reload=3))
        env.reset(seed=2)
        place_bird(env, Species.YELLOW, 10.0, 10.0)
        first = env.step((10, 10))  # uses the only round
        assert first.reward == 1.0 and first.info.ammo_after == 0
        env.begin_episode()
        place_bird(env, Species.YELLOW, 10.0, 10.0)
        # t=2,3,4 are reload steps: aiming dead-on must not fire. The clip
        # refills during t=4 (4 mod (1+3) == 0) after the no-shot decision.
        for _ in range(3):
            res = env.step((10, 10))
            assert res.reward == 0.0
            assert res.info.outcome == "RELOADING"
            assert not res.done
        assert env.state.ammo == 1
        # t=5: first shot of the fresh clip.
        res = env.step((10, 10))
        assert res.reward == 1.0 and res.done

    def test_ammo_chain_survives_episode_boundaries(self):
        env = BirdHuntEnv(high20(clip_size=2, t_reload=2))
        env.reset(seed=3)
        place_bird(env, Species.YELLOW, 10.0, 10.0)
        assert env.step((10, 10)).reward == 1.0  # t=1, ammo 2 -> 1
        env.begin_episode()
        assert env.state.ammo == 1  # no per-episode refill


class TestEpisodes:
    def test_step_cap_ends_episode(self):
        env = BirdHuntEnv(low20(max_episode_steps=3))
        env.reset(seed=4)
        place_bird(env, Species.YELLOW, 15.0, 15.0)
        assert not env.step((0, 0)).done
        assert not env.step((0, 1)).done
        assert env.step((0, 2)).done

    def test_any_hit_ends_episode(self):
        env = BirdHuntEnv(high20())
        env.reset(seed=4)
        place_bird(env, Species.BLACK, 8.0, 8.0)
        assert env.step((8, 8)).done

    def test_red_gating_follows_even_yellow_hits(self):
        env = BirdHuntEnv(high20(clip_size=10))
        env.reset(seed=5)

        def species_now():
            return {b.species for b in env.state.birds}

        assert Species.RED not in species_now()
        for expected_red_after in (False, True, False, True):
            place_bird(env, Species.YELLOW, 10.0, 10.0)
            assert env.step((10, 10)).reward == 1.0
            env.begin_episode()
            assert (Species.RED in species_now()) == expected_red_after

    def test_yellow_counter_only_counts_yellow(self):
        env = BirdHuntEnv(high20())
        env.reset(seed=6)
        place_bird(env, Species.BLACK, 8.0, 8.0)
        env.step((8, 8))
        assert env.state.yellow_hits_total == 0

    def test_global_t_continues_across_episodes(self):
        env = BirdHuntEnv(low20())
        env.reset(seed=7)
        place_bird(env, Species.YELLOW, 10.0, 10.0)
        env.step((10, 10))
        env.begin_episode()
        assert env.state.t == 1
        assert env.state.episode_step == 0


class TestDeterminism:
    def _trace(self, cfg, seed, actions):
        env = BirdHuntEnv(cfg)
        env.reset(seed=seed)
        out = []
        for a in actions:
            res = env.step(a)
            out.append((res.reward, res.done, res.observation.tobytes()))
            if res.done:
                env.begin_episode()
        return out

    def test_same_seed_same_trace(self):
        rng = np.random.default_rng(11)
        actions = [(int(rng.integers(0, 20)), int(rng.integers(0, 20))) for _ in range(120)]
        cfg = high20(max_episode_steps=25)
        assert self._trace(cfg, 42, actions) == self._trace(cfg, 42, actions)

    def test_different_seed_different_spawns(self):
        env_a, env_b = BirdHuntEnv(low20()), BirdHuntEnv(low20())
        env_a.reset(seed=1)
        env_b.reset(seed=2)
        a, b = env_a.state.birds[0], env_b.state.birds[0]
        assert (a.x, a.y) != (b.x, b.y)


class TestDrift:
    def test_hitbox_never_leaves_board(self):
        cfg = low20(bird_speed=1.7, max_episode_steps=500)
        env = BirdHuntEnv(cfg)
        env.reset(seed=9)
        margin = cfg.bird_extent + 0.5
        for _ in range(500):
            env.step((0, 0))
            for b in env.state.birds:
                assert margin - 1e-9 <= b.x <= cfg.width - 1 - margin + 1e-9
                assert margin - 1e-9 <= b.y <= cfg.height - 1 - margin + 1e-9

    def test_shot_scored_against_observed_positions(self):
        # The frame the agent saw is the frame the shot is scored on; birds
        # move afterwards.
        env = BirdHuntEnv(low20(bird_speed=3.0, bird_extent=0.6))
        env.reset(seed=10)
        place_bird(env, Species.YELLOW, 10.0, 10.0, dx=3.0, dy=0.0)
        assert env.step((10, 10)).reward == 1.0
