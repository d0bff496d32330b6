import time
from birdhunt.harness import build_preset, run_experiment, convergence_step

for name, demo in (("e3-expert", "calib/e3-expert.demo.jsonl"), ("e3-subopt", "calib/e3-subopt.demo.jsonl")):
    t0 = time.time()
    cfg = build_preset(name, f"calib/{name}-b", demo_paths=(demo,), seeds=(1,))
    results = run_experiment(cfg)
    for seed, series in results.items():
        conv = convergence_step(series, cfg.threshold, cfg.sustained_windows)
        print(f"{name} seed{seed} conv={conv}", " ".join(f"{p.reward:.2f}" for p in series.points[::2]), f"({time.time()-t0:.0f}s)", flush=True)
