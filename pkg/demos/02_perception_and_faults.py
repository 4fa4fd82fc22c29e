"""
Calibrated perception and fault channels
========================================

Shows the two stochastic channels that turn deterministic episodes into
benchmark runs: per-run classifier accuracy (truncated normal inside the
published band, centered so the realized mean hits the published mean) and
the per-run hardware fault probability (band-bounded lognormal).
"""
import random

import wps
from wps.engine import BUILTIN_SYSTEMS

print("Classifier families")
print("=" * 40)
rng = random.Random(2024)
for name in ("CNN", "RNN", "Traditional"):
    spec = wps.builtin_spec(name)
    draws = [wps.instantiate(spec, rng).run_accuracy * 100 for _ in range(2000)]
    s = wps.summarize(draws)
    print(f"{name:12s} published {spec.mean_acc:g}% in [{spec.min_acc:g}, {spec.max_acc:g}] | "
          f"2000 draws: mean {s.mean:.2f}, sd {s.sd:.2f}, range [{s.min:.1f}, {s.max:.1f}]")

###############################################################################
# Classification at a fixed run accuracy
# --------------------------------------

inst = wps.ClassifierInstance(wps.builtin_spec("CNN"), 0.95)
n = 20_000
hits = sum(wps.classify(inst, "A", ["B", "C", "D"], rng) == "A" for _ in range(n))
print(f"\nclassify at run accuracy 0.95: {hits / n:.4f} correct over {n} draws")

###############################################################################
# Fault systems
# -------------
# Each run draws one effective per-pick fault probability; rejection keeps
# the implied percentage rate inside the system's calibrated band.

print("\nFault systems")
print("=" * 40)
for label, fault in BUILTIN_SYSTEMS.items():
    draws = [fault.draw_run_probability(random.Random(i)) * 100 for i in range(2000)]
    s = wps.summarize(draws)
    band = fault.rate_band_pct or ("-", "-")
    print(f"{label:10s} base {fault.per_pick_fault_prob * 100:g}% noise {fault.run_noise_sd:g} "
          f"band {band} | drawn rates: mean {s.mean:.3f}, range [{s.min:.3f}, {s.max:.3f}]")
