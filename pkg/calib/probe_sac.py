import time
from birdhunt.env import EnvConfig, Tier
from birdhunt.il import compose_trainer
from birdhunt.rl import SACConfig
from birdhunt.metrics import MetricsSeries
from birdhunt.harness import convergence_step

cfg = EnvConfig(tier=Tier.LOW, width=20, height=20, bird_extent=1.4)
sac = SACConfig(update_to_data=0.5, batch_size=96, warmup_steps=2000,
                target_entropy_scale=0.1, gamma=0.97)
for seed in (1, 2, 3):
    t0 = time.time()
    tr = compose_trainer('RL_ONLY', 'sac', cfg, seed=seed, sac_cfg=sac)
    pts = []
    tr.train(50000, 5000, lambda p: pts.append(p))
    s = MetricsSeries(pts)
    conv = convergence_step(s, 0.9, 3)
    print(f"seed{seed}: conv={conv} curve:", " ".join(f"{p.reward:.2f}" for p in pts), f"({time.time()-t0:.0f}s)", flush=True)
