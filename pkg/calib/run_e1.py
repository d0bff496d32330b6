import json, time
from birdhunt.harness import build_preset, run_experiment, convergence_step

t0 = time.time()
out = {}
for name in ("e1-sac", "e1-ppo"):
    cfg = build_preset(name, f"calib/{name}")
    results = run_experiment(cfg)
    out[name] = {
        seed: convergence_step(series, cfg.threshold, cfg.sustained_windows)
        for seed, series in results.items()
    }
    print(name, out[name], f"{time.time()-t0:.0f}s", flush=True)
print(json.dumps(out))
