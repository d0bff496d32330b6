import time
import numpy as np
from birdhunt.demos import load_demo
from birdhunt.env import EnvConfig, Tier
from birdhunt.il import BCConfig, GAILConfig, compose_trainer
from birdhunt.rl import PPOConfig
from birdhunt.metrics import MetricsSeries
from birdhunt.harness import convergence_step

env = EnvConfig(tier=Tier.MEDIUM, width=20, height=20, bird_extent=1.4)
demo = load_demo("calib/e3-subopt.demo.jsonl", regenerate_observations=True)

def probe(name, mode, steps=60000, **kw):
    t0 = time.time()
    tr = compose_trainer(mode, "ppo", env, seed=1, demos=[demo], **kw)
    pts = []
    tr.train(steps, 2500, lambda p: pts.append(p))
    conv = convergence_step(MetricsSeries(pts), 0.8, 3)
    print(f"{name}: conv={conv}", " ".join(f"{p.reward:.2f}" for p in pts[::2]), f"({time.time()-t0:.0f}s)", flush=True)

probe("A bc-only lr1e-3", "BC_ONLY", bc_cfg=BCConfig(lr=1e-3, batch_size=128))
probe("B offset1.0", "BC_AND_GAIL",
      bc_cfg=BCConfig(lr=3e-4, aux_initial_strength=0.5, aux_decay_steps=20000, aux_rounds_per_update=8),
      gail_cfg=GAILConfig(lambda_ext=0.0, lambda_int=1.0, survival_offset=1.0))
probe("C strongBC", "BC_AND_GAIL",
      bc_cfg=BCConfig(lr=1e-3, aux_initial_strength=1.0, aux_decay_steps=40000, aux_rounds_per_update=16),
      gail_cfg=GAILConfig(lambda_ext=0.0, lambda_int=1.0))
