"""
Severity-table calibration
==========================

Re-derives the per-level slip probabilities shipped in configs/default.json.

The target is a linear performance-score trend from 10.0 at severity 1 down
to ~4.7 at severity 10. Scores are inversely proportional to the expected
ticks per delivered order, so the required slip level is solved in closed
form from the measured severity-1 cycle structure:

    cycle(k) = moves / (1 - slip_k) + attempts / degradation_k + 1
    slip_k   = 1 - moves / (cycle_target_k - attempts / degradation_k - 1)

with cycle_target_k = cycle(1) * 10 / score_target_k. A Monte-Carlo pass
verifies the analytic solution; rerun this script after changing the
warehouse layout, the order mix, or the reward schedule.
"""
import random

import wps
from wps.engine import SimConfig, measure_run, run_episode, training_env, SeverityTable
from wps.experiment import load_config

config = load_config("configs/default.json")
q, _ = wps.train(training_env(config.world), config.qparams, random.Random(config.base_seed))
policy = wps.greedy_policy(q)

###############################################################################
# Measure the severity-1 cycle structure
# --------------------------------------

probe = SimConfig(
    world=config.world, order_rate=config.order_rate,
    classifier=config.classifiers["CNN"], severity_level=1,
    fault=config.systems["faultless"], seed=123, max_steps=20_000,
    severity_table=config.severity_table,
)
log = run_episode(probe, policy)
cycle = log.steps / log.orders_completed
attempts = log.picks_attempted / log.orders_completed
moves = cycle - attempts - 1.0
print(f"severity-1 cycle: {cycle:.3f} ticks/order "
      f"({moves:.3f} moves + {attempts:.3f} pick attempts + 1 deliver)")

###############################################################################
# Invert the cycle model per level
# --------------------------------

targets = [10.0] + [9.93 - 0.5811 * (k - 1) for k in range(2, 11)]
degradation = [1.0 - 0.03 * (k - 1) for k in range(1, 11)]
slip = [0.0]
for k in range(2, 11):
    cycle_target = cycle * 10.0 / targets[k - 1]
    slip.append(1.0 - moves / (cycle_target - attempts / degradation[k - 1] - 1.0))
print("\nderived slip table:", [round(s, 4) for s in slip])
print("shipped slip table:", [m.slip_prob for m in config.severity_table.models])

###############################################################################
# Monte-Carlo verification
# ------------------------

table = SeverityTable.from_lists(slip, degradation)
print("\nseverity | target | measured (20 seeds)")
print("-" * 42)
for level in range(1, 11):
    scores = []
    for i in range(20):
        cfg = SimConfig(
            world=config.world, order_rate=config.order_rate,
            classifier=config.classifiers["CNN"], severity_level=level,
            fault=config.systems["proposed"], seed=60_000 + level * 40 + i,
            max_steps=2500, severity_table=table,
        )
        scores.append(measure_run(cfg, policy).performance_score)
    print(f"   {level:2d}    | {targets[level - 1]:6.3f} | {sum(scores) / len(scores):6.3f}")
