"""WebSocket gateway: live play with demo capture, spectating, dashboards.

Play sessions own one env each and step it turn-based: immediately on action
when the tick budget allows, and from a background ticker that re-fires the
held crosshair position when the client is idle (tick_hz=0 disables the
ticker for fully manual stepping, used by tests). Recording reseeds the env
so the captured file replays from its stored seed.
"""

from __future__ import annotations

import asyncio
import itertools
import os
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..demos import DemoRecorder
from ..env import BirdHuntEnv, EnvConfig, Tier
from ..metrics import MetricsPoint
from ..nn import forward, greedy_actions, load_checkpoint
from .protocol import (
    ProtocolError,
    error_message,
    frame_message,
    parse_client_message,
    welcome_message,
)

MAX_SESSIONS = 16
METRICS_QUEUE_LIMIT = 1024


def default_env_configs() -> dict[str, EnvConfig]:
    return {
        "low": EnvConfig(tier=Tier.LOW, width=20, height=20, bird_extent=1.4),
        "medium": EnvConfig(tier=Tier.MEDIUM, width=20, height=20, bird_extent=1.4),
        "high": EnvConfig(tier=Tier.HIGH, width=20, height=20, bird_extent=1.4),
    }


class MetricsBus:
    """Fan-out of training metrics; per-client queues drop oldest past the cap."""

    def __init__(self) -> None:
        self._queues: set[asyncio.Queue] = set()
        self._loop: asyncio.AbstractEventLoop | None = None

    def subscribe(self) -> asyncio.Queue:
        self._loop = asyncio.get_running_loop()
        q: asyncio.Queue = asyncio.Queue()
        self._queues.add(q)
        return q

    def unsubscribe(self, q: asyncio.Queue) -> None:
        self._queues.discard(q)

    def publish(self, experiment_id: str, seed: int, point: MetricsPoint) -> None:
        """Safe to call from a training thread; never blocks it."""
        message = {
            "type": "metrics",
            "experiment": experiment_id,
            "seed": seed,
            "step": point.step,
            "reward": point.reward,
            "episode_length": point.episode_length,
            "entropy": point.entropy,
        }
        if self._loop is None:
            return
        try:
            self._loop.call_soon_threadsafe(self._fan_out, message)
        except RuntimeError:
            pass  # loop already shut down; drop the message

    def _fan_out(self, message: dict[str, Any]) -> None:
        for q in list(self._queues):
            while q.qsize() >= METRICS_QUEUE_LIMIT:
                q.get_nowait()
            q.put_nowait(message)


@dataclass
class PlaySession:
    session_id: str
    env: BirdHuntEnv
    config_id: str
    demo_dir: str
    last_obs: np.ndarray
    frame_no: int = 0
    episode_return: float = 0.0
    recorder: DemoRecorder | None = None
    held_action: tuple[int, int] | None = None
    last_step_time: float = field(default_factory=time.monotonic)
    seed_counter: itertools.count = field(default_factory=itertools.count)

    def frame(self, last_reward: float, done: bool) -> dict[str, Any]:
        cfg = self.env.config
        state = self.env.state
        self.frame_no += 1
        msg = frame_message(
            self.frame_no,
            self.last_obs,
            cfg.width,
            cfg.height,
            cfg.channels,
            state.ammo if cfg.tier is Tier.HIGH else None,
            last_reward,
            self.episode_return,
            done,
        )
        msg["crosshair"] = [state.crosshair_x, state.crosshair_y]
        return msg

    def step(self, action: tuple[int, int]) -> dict[str, Any]:
        obs_seen = self.last_obs
        res = self.env.step(action)
        self.episode_return += res.reward
        if self.recorder is not None:
            self.recorder.on_step(obs_seen, action, res.reward, res.done)
        frame_return = self.episode_return
        if res.done:
            self.last_obs = self.env.begin_episode()
            self.episode_return = 0.0
        else:
            self.last_obs = res.observation
        self.held_action = action
        self.last_step_time = time.monotonic()
        msg = self.frame(res.reward, res.done)
        msg["episode_return"] = frame_return
        # The frame acknowledges the applied action even when the episode
        # ended and the env already recentered for the next one.
        msg["crosshair"] = [int(action[0]), int(action[1])]
        return msg

    def start_recording(self, tag: str, base_seed: int) -> None:
        seed = base_seed + next(self.seed_counter)
        self.last_obs = self.env.reset(seed=seed)
        self.episode_return = 0.0
        self.recorder = DemoRecorder(self.env.config, seed, tag or "human")
        self.held_action = None

    def stop_recording(self) -> dict[str, Any]:
        assert self.recorder is not None
        tag = self.recorder.recorder_tag.replace("/", "_") or "human"
        os.makedirs(self.demo_dir, exist_ok=True)
        path = os.path.join(self.demo_dir, f"{tag}-{self.session_id}.demo.jsonl")
        demo = self.recorder.finalize(path)
        self.recorder = None
        return {"type": "recorded", "file": path, "episodes": demo.episode_count}


class Exhibition:
    """Background agent play loop feeding spectator sessions."""

    def __init__(self, spec, params, env_cfg: EnvConfig, tick_hz: float):
        self.spec = spec
        self.params = params
        self.env_cfg = env_cfg
        self.tick_hz = tick_hz
        self.watchers: set[asyncio.Queue] = set()
        self.task: asyncio.Task | None = None

    def ensure_running(self) -> None:
        if self.task is None or self.task.done():
            self.task = asyncio.get_running_loop().create_task(self._run())

    async def _run(self) -> None:
        env = BirdHuntEnv(self.env_cfg)
        obs = env.reset(seed=int(time.time()) % 100_000)
        rng = np.random.default_rng(0)
        frame_no = 0
        episode_return = 0.0
        interval = 1.0 / self.tick_hz if self.tick_hz > 0 else 0.05
        while self.watchers:
            out = forward(self.params, self.spec, obs[None, :])
            action = greedy_actions(out.branches, rng)[0]
            res = env.step((int(action[0]), int(action[1])))
            episode_return += res.reward
            frame_no += 1
            msg = frame_message(
                frame_no,
                obs,
                self.env_cfg.width,
                self.env_cfg.height,
                self.env_cfg.channels,
                env.state.ammo if self.env_cfg.tier is Tier.HIGH else None,
                res.reward,
                episode_return,
                res.done,
            )
            msg["crosshair"] = [env.state.crosshair_x, env.state.crosshair_y]
            for q in list(self.watchers):
                while q.qsize() >= METRICS_QUEUE_LIMIT:
                    q.get_nowait()
                q.put_nowait(msg)
            if res.done:
                obs = env.begin_episode()
                episode_return = 0.0
            else:
                obs = res.observation
            await asyncio.sleep(interval)
        self.task = None


def make_app(
    env_configs: dict[str, EnvConfig] | None = None,
    checkpoint: str | None = None,
    demo_dir: str = "demos",
    tick_hz: float = 15.0,
    static_dir: str | None = None,
    experiment=None,
) -> FastAPI:
    """Build the gateway app.

    `experiment` is an optional ExperimentConfig: when given, training starts
    in a background thread on startup and streams metrics to dashboards.
    """
    from contextlib import asynccontextmanager

    configs = env_configs or default_env_configs()
    bus = MetricsBus()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if experiment is not None:
            import threading

            from ..harness.experiment import run_experiment

            bus._loop = asyncio.get_running_loop()
            threading.Thread(
                target=lambda: run_experiment(
                    experiment, quiet=True, metrics_hook=bus.publish
                ),
                daemon=True,
            ).start()
        yield

    app = FastAPI(title="birdhunt gateway", lifespan=lifespan)
    app.state.metrics_bus = bus
    app.state.sessions: dict[str, PlaySession] = {}
    session_ids = itertools.count(1)

    exhibition: Exhibition | None = None
    if checkpoint is not None:
        spec, params, meta = load_checkpoint(checkpoint)
        env_doc = meta.get("env")
        exh_cfg = EnvConfig.from_json(env_doc) if env_doc else next(iter(configs.values()))
        exhibition = Exhibition(spec, params, exh_cfg, tick_hz)

    @app.get("/healthz", response_class=PlainTextResponse)
    async def healthz() -> str:
        return "ok"

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        session: PlaySession | None = None
        ticker: asyncio.Task | None = None
        queue: asyncio.Queue | None = None
        pump: asyncio.Task | None = None
        mode: str | None = None
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = parse_client_message(raw)
                except ProtocolError as exc:
                    await ws.send_json(error_message(exc.code, exc.detail))
                    continue

                mtype = msg["type"]
                if mtype == "ping":
                    await ws.send_json({"type": "pong", "nonce": msg.get("nonce")})
                elif mtype == "hello":
                    if mode is not None:
                        await ws.send_json(
                            error_message("bad_message", "session already started")
                        )
                        continue
                    mode = msg["mode"]
                    if mode == "play":
                        config_id = msg.get("env_config_id") or "medium"
                        if config_id not in configs:
                            mode = None
                            await ws.send_json(
                                error_message("unknown_env", f"no env config {config_id!r}")
                            )
                            continue
                        if len(app.state.sessions) >= MAX_SESSIONS:
                            mode = None
                            await ws.send_json(
                                error_message("busy", "session limit reached")
                            )
                            continue
                        cfg = configs[config_id]
                        env = BirdHuntEnv(cfg)
                        sid = f"s{next(session_ids)}"
                        session = PlaySession(
                            session_id=sid,
                            env=env,
                            config_id=config_id,
                            demo_dir=demo_dir,
                            last_obs=env.reset(seed=int(time.time_ns() % 1_000_000)),
                        )
                        app.state.sessions[sid] = session
                        await ws.send_json(welcome_message(sid, cfg.to_json()))
                        await ws.send_json(session.frame(0.0, False))
                        if tick_hz > 0:
                            ticker = asyncio.get_running_loop().create_task(
                                _idle_ticker(ws, session, tick_hz)
                            )
                    elif mode == "dashboard":
                        queue = bus.subscribe()
                        sid = f"d{next(session_ids)}"
                        await ws.send_json(welcome_message(sid, None))
                        pump = asyncio.get_running_loop().create_task(_pump(ws, queue))
                    elif mode == "spectate":
                        if exhibition is None:
                            mode = None
                            await ws.send_json(
                                error_message("no_agent", "no checkpoint loaded to spectate")
                            )
                            continue
                        queue = asyncio.Queue()
                        exhibition.watchers.add(queue)
                        exhibition.ensure_running()
                        sid = f"v{next(session_ids)}"
                        await ws.send_json(
                            welcome_message(sid, exhibition.env_cfg.to_json())
                        )
                        pump = asyncio.get_running_loop().create_task(_pump(ws, queue))
                elif mtype == "action":
                    if session is None:
                        await ws.send_json(
                            error_message("bad_message", "action before hello{play}")
                        )
                        continue
                    x, y = msg["x"], msg["y"]
                    cfg = session.env.config
                    if not (0 <= x < cfg.width and 0 <= y < cfg.height):
                        await ws.send_json(
                            error_message(
                                "bad_action",
                                f"({x},{y}) outside [0,{cfg.width})x[0,{cfg.height})",
                            )
                        )
                        continue
                    interval = 1.0 / tick_hz if tick_hz > 0 else 0.0
                    if time.monotonic() - session.last_step_time >= interval:
                        await ws.send_json(session.step((x, y)))
                    else:
                        session.held_action = (x, y)
                elif mtype == "record":
                    if session is None:
                        await ws.send_json(
                            error_message("bad_message", "record requires a play session")
                        )
                        continue
                    if msg["command"] == "start":
                        if session.recorder is not None:
                            await ws.send_json(
                                error_message("bad_message", "already recording")
                            )
                            continue
                        session.start_recording(
                            str(msg.get("tag") or "human"), base_seed=int(time.time_ns() % 10**9)
                        )
                        await ws.send_json(session.frame(0.0, False))
                    else:
                        if session.recorder is None:
                            await ws.send_json(
                                error_message("bad_message", "not recording")
                            )
                            continue
                        await ws.send_json(session.stop_recording())
        except WebSocketDisconnect:
            pass
        finally:
            for task in (ticker, pump):
                if task is not None:
                    task.cancel()
            if queue is not None:
                bus.unsubscribe(queue)
                if exhibition is not None:
                    exhibition.watchers.discard(queue)
            if session is not None:
                if session.recorder is not None:
                    try:
                        session.stop_recording()
                    except Exception:
                        pass
                app.state.sessions.pop(session.session_id, None)

    static = static_dir or os.path.join(os.path.dirname(__file__), "..", "..", "..", "frontend", "dist")
    if os.path.isdir(static):
        app.mount("/", StaticFiles(directory=static, html=True), name="ui")
    else:

        @app.get("/", response_class=PlainTextResponse)
        async def index() -> str:
            return "birdhunt gateway (UI assets not built); WebSocket endpoint at /ws"

    return app


async def _idle_ticker(ws: WebSocket, session: PlaySession, tick_hz: float) -> None:
    """Re-fires the held crosshair when no action arrived within a tick."""
    interval = 1.0 / tick_hz
    try:
        while True:
            await asyncio.sleep(interval)
            if session.held_action is None:
                continue
            if time.monotonic() - session.last_step_time >= interval:
                await ws.send_json(session.step(session.held_action))
    except asyncio.CancelledError:
        pass
    except Exception:
        pass


async def _pump(ws: WebSocket, queue: asyncio.Queue) -> None:
    try:
        while True:
            await ws.send_json(await queue.get())
    except asyncio.CancelledError:
        pass
    except Exception:
        pass
