import math
import random

import pytest

from wps import ClassifierInstance, ClassifierSpec, builtin_spec, classify, instantiate


def test_builtin_specs_match_reference_rows():
    cnn = builtin_spec("CNN")
    assert (cnn.mean_acc, cnn.sd_acc, cnn.min_acc, cnn.max_acc) == (95.0, 3.0, 88.0, 100.0)
    rnn = builtin_spec("RNN")
    assert (rnn.mean_acc, rnn.sd_acc, rnn.min_acc, rnn.max_acc) == (90.0, 5.0, 80.0, 97.0)
    trad = builtin_spec("Traditional")
    assert (trad.mean_acc, trad.sd_acc, trad.min_acc, trad.max_acc) == (75.0, 7.0, 60.0, 85.0)


def test_builtin_spec_unknown_name():
    with pytest.raises(KeyError, match="unknown classifier"):
        builtin_spec("SVM")


def test_spec_validation():
    with pytest.raises(ValueError):
        ClassifierSpec("bad", mean_acc=50, sd_acc=1, min_acc=60, max_acc=80)
    with pytest.raises(ValueError):
        ClassifierSpec("bad", mean_acc=70, sd_acc=0, min_acc=60, max_acc=80)


def test_instantiate_zero_width_band():
    spec = ClassifierSpec("perfect", 100.0, 1.0, 100.0, 100.0)
    for seed in range(5):
        assert instantiate(spec, random.Random(seed)).run_accuracy == 1.0


@pytest.mark.parametrize("name", ["CNN", "RNN", "Traditional"])
def test_instantiate_calibration_monte_carlo(name):
    # Monte-Carlo oracle: 10k draws; 3-sigma of the mean is ~0.03 * sd, so
    # the +/-0.1 window checks the sampler is centered on the published mean.
    spec = builtin_spec(name)
    rng = random.Random(1234)
    draws = [instantiate(spec, rng).run_accuracy * 100.0 for _ in range(10_000)]
    mean = sum(draws) / len(draws)
    assert abs(mean - spec.mean_acc) < 0.25
    assert all(spec.min_acc <= d <= spec.max_acc for d in draws)


def test_instantiate_cnn_mean_within_tight_window():
    spec = builtin_spec("CNN")
    rng = random.Random(1234)
    draws = [instantiate(spec, rng).run_accuracy * 100.0 for _ in range(10_000)]
    assert abs(sum(draws) / len(draws) - 95.0) < 0.1


def test_instantiate_seed_determinism():
    spec = builtin_spec("RNN")
    a = instantiate(spec, random.Random(7)).run_accuracy
    b = instantiate(spec, random.Random(7)).run_accuracy
    assert a == b


def test_instance_band_invariant():
    spec = builtin_spec("CNN")
    with pytest.raises(ValueError):
        ClassifierInstance(spec, 0.5)


def test_classify_perfect_and_broken():
    spec = ClassifierSpec("x", 50.0, 1.0, 0.0, 100.0)
    perfect = ClassifierInstance(spec, 1.0)
    broken = ClassifierInstance(spec, 0.0)
    rng = random.Random(0)
    decoys = ["B", "C"]
    assert all(classify(perfect, "A", decoys, rng) == "A" for _ in range(200))
    results = [classify(broken, "A", decoys, rng) for _ in range(200)]
    assert all(r != "A" for r in results)
    assert set(results) <= set(decoys)


def test_classify_empirical_rate_in_binomial_band():
    spec = builtin_spec("CNN")
    inst = ClassifierInstance(spec, 0.95)
    rng = random.Random(2024)
    n = 10_000
    hits = sum(classify(inst, "A", ["B", "C", "D"], rng) == "A" for _ in range(n))
    band = 3 * math.sqrt(0.95 * 0.05 / n)
    assert abs(hits / n - 0.95) <= band


def test_classify_input_validation():
    inst = ClassifierInstance(builtin_spec("CNN"), 0.95)
    rng = random.Random(0)
    with pytest.raises(ValueError, match="non-empty"):
        classify(inst, "A", [], rng)
    with pytest.raises(ValueError, match="decoys"):
        classify(inst, "A", ["A", "B"], rng)
