import time
from birdhunt.demos import load_demo
from birdhunt.env import EnvConfig, Tier
from birdhunt.il import BCConfig, GAILConfig, compose_trainer
from birdhunt.metrics import MetricsSeries
from birdhunt.harness import convergence_step

env = EnvConfig(tier=Tier.MEDIUM, width=20, height=20, bird_extent=1.4)

def probe(name, demo_path, gail, bc, steps=100000, seed=1):
    t0 = time.time()
    demo = load_demo(demo_path, regenerate_observations=True)
    tr = compose_trainer("BC_AND_GAIL", "ppo", env, seed=seed, demos=[demo], gail_cfg=gail, bc_cfg=bc)
    pts = []
    tr.train(steps, 2500, lambda p: pts.append(p))
    conv = convergence_step(MetricsSeries(pts), 0.8, 3)
    print(f"{name}: conv={conv}", " ".join(f"{p.reward:.2f}" for p in pts[::2]), f"({time.time()-t0:.0f}s)", flush=True)

gail_d1 = GAILConfig(lambda_ext=1.0, lambda_int=0.5, demo_batch_size=128)
bc_d1 = BCConfig(lr=3e-4, aux_initial_strength=0.5, aux_decay_steps=10000, aux_rounds_per_update=4)
probe("subopt D1", "calib/e3-subopt.demo.jsonl", gail_d1, bc_d1)
probe("expert D1", "calib/e3-expert.demo.jsonl", gail_d1, bc_d1)
