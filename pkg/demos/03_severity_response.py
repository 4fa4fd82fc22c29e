"""
Environmental severity response
===============================

Runs the calibrated severity sweep on the default warehouse and fits the
performance-score trend. Severity acts through two channels: wheel slip
(moves become no-ops) and sensor degradation (run accuracy is scaled down).
"""
import random

import wps
from wps.engine import SimConfig, measure_run, training_env
from wps.experiment import load_config

config = load_config("configs/default.json")
q, _ = wps.train(training_env(config.world), config.qparams, random.Random(config.base_seed))
policy = wps.greedy_policy(q)

print("severity | slip  | sensor | mean score (10 seeds)")
print("-" * 52)
points = []
for level in range(1, 11):
    model = config.severity_table[level]
    scores = []
    for i in range(10):
        cfg = SimConfig(
            world=config.world,
            order_rate=config.order_rate,
            classifier=config.classifiers["CNN"],
            severity_level=level,
            fault=config.systems["proposed"],
            seed=9000 + level * 50 + i,
            max_steps=2500,
            severity_table=config.severity_table,
        )
        rec = measure_run(cfg, policy)
        scores.append(rec.performance_score)
        points.append((float(level), rec.performance_score))
    mean = sum(scores) / len(scores)
    print(f"   {level:2d}    | {model.slip_prob:.3f} | {model.sensor_degradation:.2f}   | {mean:6.3f}")

###############################################################################
# Linear trend
# ------------

fit = wps.ols_fit(points)
print(f"\nOLS: score = {fit.intercept:.3f} {fit.slope:+.4f} * severity  (r2 = {fit.r_squared:.4f})")
print(f"fitted endpoints: severity 1 -> {fit.at(1):.2f}, severity 10 -> {fit.at(10):.2f}")
