import json, sys, time
from birdhunt.demos import record_oracle
from birdhunt.env import EnvConfig, Tier
from birdhunt.harness import build_preset, run_experiment, convergence_step

env = EnvConfig(tier=Tier.MEDIUM, width=20, height=20, bird_extent=1.4)
expert = record_oracle(env, seed=101, epsilon=0.0, episodes=100, path="calib/e3-expert.demo.jsonl")
subopt = record_oracle(env, seed=102, epsilon=0.3, episodes=100, path="calib/e3-subopt.demo.jsonl")
print("expert mean", expert.summarize().mean_episodic_reward, flush=True)
print("subopt mean", subopt.summarize().mean_episodic_reward, flush=True)

seeds = tuple(int(s) for s in sys.argv[1:]) or (1,)
t0 = time.time()
out = {}
for name, demo in (("e3-expert", "calib/e3-expert.demo.jsonl"), ("e3-subopt", "calib/e3-subopt.demo.jsonl")):
    cfg = build_preset(name, f"calib/{name}", demo_paths=(demo,), seeds=seeds)
    results = run_experiment(cfg)
    out[name] = {
        seed: convergence_step(series, cfg.threshold, cfg.sustained_windows)
        for seed, series in results.items()
    }
    for seed, series in results.items():
        tail = " ".join(f"{p.reward:.2f}" for p in series.points[::4])
        print(f"{name} seed{seed} conv={out[name][seed]} curve: {tail}", flush=True)
    print(name, out[name], f"{time.time()-t0:.0f}s", flush=True)
print(json.dumps(out))
