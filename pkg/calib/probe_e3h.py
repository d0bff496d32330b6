import time
from birdhunt.demos import load_demo
from birdhunt.env import EnvConfig, Tier
from birdhunt.il import BCConfig, GAILConfig, compose_trainer
from birdhunt.rl import PPOConfig
from birdhunt.metrics import MetricsSeries
from birdhunt.harness import convergence_step

env = EnvConfig(tier=Tier.MEDIUM, width=20, height=20, bird_extent=1.4)
gail = GAILConfig(lambda_ext=1.0, lambda_int=0.1, demo_batch_size=128)
bc = BCConfig(lr=3e-4, aux_initial_strength=0.5, aux_decay_steps=12000, aux_rounds_per_update=8)
ppo = PPOConfig()

def probe(name, demo_path, steps, seed):
    t0 = time.time()
    demo = load_demo(demo_path, regenerate_observations=True)
    tr = compose_trainer("BC_AND_GAIL", "ppo", env, seed=seed, demos=[demo],
                         gail_cfg=gail, bc_cfg=bc, ppo_cfg=ppo)
    pts = []
    tr.train(steps, 5000, lambda p: pts.append(p))
    conv = convergence_step(MetricsSeries(pts), 0.8, 3)
    print(f"{name} seed{seed}: conv={conv}", " ".join(f"{p.reward:.2f}" for p in pts[::2]), f"({time.time()-t0:.0f}s)", flush=True)

for seed in (1, 2, 3):
    probe("subopt", "calib/e3-subopt.demo.jsonl", 200000, seed)
for seed in (1, 2, 3):
    probe("expert", "calib/e3-expert.demo.jsonl", 200000, seed)
