"""Seeded episode runner: order arrivals, disturbance channels, and run metrics.

A run is one seeded episode of a warehouse under a policy. Three stochastic
channels sit on top of the deterministic kernel:

  * perception - each pick attempt is classified at the run's realized
    accuracy (degraded multiplicatively by environmental severity); a wrong
    label aborts the pick,
  * hardware faults - an otherwise-successful pick is voided with the run's
    effective fault probability (drawn once per run, lognormal around the
    configured rate, rejection-bounded to the configured band),
  * wheel slip - a move action is replaced by a no-op with the severity
    level's slip probability.

Draw order within a run is fixed (orders, classifier, fault rate, then
per-tick dynamics), so a (config, seed) pair maps to exactly one episode.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

from .perception import ClassifierSpec, instantiate
from .qlearning import Transition
from .stats import RunRecord
from .warehouse import (
    ACTIONS,
    Action,
    Order,
    StateId,
    StepOutcome,
    WarehouseState,
    state_id,
    transition,
)

__all__ = [
    "SeverityModel",
    "SeverityTable",
    "FaultModel",
    "RewardSchedule",
    "EpisodeLog",
    "SimConfig",
    "PickingEnv",
    "severity_model",
    "generate_orders",
    "training_env",
    "run_episode",
    "measure_run",
    "enumerate_model",
    "BUILTIN_SYSTEMS",
    "DEFAULT_REWARDS",
    "SLIP_PER_LEVEL",
    "DEGRADATION_PER_LEVEL",
]

Policy = Callable[[StateId], Action]

# Default per-level disturbance coefficients: slip grows, sensor fidelity
# shrinks, both linearly in (level - 1). Experiment configs may override the
# whole per-level table (the calibrated benchmark config does).
SLIP_PER_LEVEL = 0.02
DEGRADATION_PER_LEVEL = 0.03


@dataclass(frozen=True)
class SeverityModel:
    """Disturbance intensities for one environmental severity level."""

    level: int
    slip_prob: float
    sensor_degradation: float

    def __post_init__(self) -> None:
        if not (1 <= self.level <= 10):
            raise ValueError(f"severity level must be in [1, 10], got {self.level}")
        if not (0.0 <= self.slip_prob < 1.0):
            raise ValueError(f"slip_prob must be in [0, 1), got {self.slip_prob}")
        if not (0.0 < self.sensor_degradation <= 1.0):
            raise ValueError(
                f"sensor_degradation must be in (0, 1], got {self.sensor_degradation}"
            )


def severity_model(level: int) -> SeverityModel:
    """Default linear disturbance schedule for a severity level in [1, 10]."""
    if not (1 <= level <= 10):
        raise ValueError(f"severity level must be in [1, 10], got {level}")
    return SeverityModel(
        level=level,
        slip_prob=SLIP_PER_LEVEL * (level - 1),
        sensor_degradation=1.0 - DEGRADATION_PER_LEVEL * (level - 1),
    )


class SeverityTable:
    """All ten severity levels; slip must rise and fidelity fall with level."""

    def __init__(self, models: Sequence[SeverityModel]):
        models = sorted(models, key=lambda m: m.level)
        if [m.level for m in models] != list(range(1, 11)):
            raise ValueError("severity table must cover levels 1..10 exactly once")
        for lo, hi in zip(models, models[1:]):
            if not hi.slip_prob > lo.slip_prob or not (
                hi.sensor_degradation < lo.sensor_degradation
            ):
                raise ValueError(
                    "severity table must be strictly monotone in level "
                    f"(violated between levels {lo.level} and {hi.level})"
                )
        self.models = tuple(models)

    def __getitem__(self, level: int) -> SeverityModel:
        if not (1 <= level <= 10):
            raise ValueError(f"severity level must be in [1, 10], got {level}")
        return self.models[level - 1]

    @classmethod
    def default(cls) -> "SeverityTable":
        return cls([severity_model(k) for k in range(1, 11)])

    @classmethod
    def from_lists(
        cls, slip: Sequence[float], degradation: Sequence[float]
    ) -> "SeverityTable":
        if len(slip) != 10 or len(degradation) != 10:
            raise ValueError("need exactly 10 slip and 10 degradation values")
        return cls(
            [
                SeverityModel(k, float(s), float(d))
                for k, (s, d) in enumerate(zip(slip, degradation), start=1)
            ]
        )


@dataclass(frozen=True)
class FaultModel:
    """Hardware-fault channel: a per-pick void probability with per-run noise.

    The run's effective probability is `per_pick_fault_prob * exp(noise)`
    with noise ~ Normal(0, run_noise_sd), rejection-resampled until the
    implied percentage rate falls inside `rate_band_pct` when one is set.
    """

    per_pick_fault_prob: float
    run_noise_sd: float = 0.0
    rate_band_pct: Optional[tuple[float, float]] = None

    def __post_init__(self) -> None:
        if not (0.0 <= self.per_pick_fault_prob <= 1.0):
            raise ValueError(
                f"per_pick_fault_prob must be in [0, 1], got {self.per_pick_fault_prob}"
            )
        if self.run_noise_sd < 0.0:
            raise ValueError(f"run_noise_sd must be >= 0, got {self.run_noise_sd}")
        if self.rate_band_pct is not None:
            lo, hi = self.rate_band_pct
            if not (0.0 <= lo <= 100.0 * self.per_pick_fault_prob <= hi):
                raise ValueError(
                    f"rate band [{lo}, {hi}] must bracket the base rate "
                    f"{100.0 * self.per_pick_fault_prob}"
                )

    def draw_run_probability(self, rng: random.Random) -> float:
        if self.per_pick_fault_prob == 0.0:
            return 0.0
        if self.run_noise_sd == 0.0:
            return self.per_pick_fault_prob
        while True:
            p = self.per_pick_fault_prob * math.exp(
                rng.normalvariate(0.0, self.run_noise_sd)
            )
            if self.rate_band_pct is None:
                return min(p, 1.0)
            lo, hi = self.rate_band_pct
            if lo <= 100.0 * p <= hi:
                return p


# Fault configurations of the two benchmarked systems plus the fault-free
# perception-calibration condition. Rates are calibrated so the measured
# run-level failure statistics land on the published bands (the industry
# base rate sits above the published mean because the band rejection and
# the classification gate both pull the realized rate down).
BUILTIN_SYSTEMS: dict[str, FaultModel] = {
    "proposed": FaultModel(0.005, 0.30, (0.2, 0.7)),
    "industry": FaultModel(0.028, 0.05, (1.6, 3.5)),
    "faultless": FaultModel(0.0),
}


@dataclass(frozen=True)
class RewardSchedule:
    """Per-outcome rewards: one delivery must dominate a long path's step cost."""

    delivered: float = 10.0
    picked: float = 2.0
    pick_failed: float = -5.0
    deliver_failed: float = -5.0
    step: float = -0.1

    def for_outcome(self, outcome: StepOutcome) -> float:
        return getattr(self, _REWARD_FIELD[outcome])


_REWARD_FIELD = {
    StepOutcome.MOVED: "step",
    StepOutcome.BLOCKED: "step",
    StepOutcome.PICKED: "picked",
    StepOutcome.PICK_FAILED: "pick_failed",
    StepOutcome.DELIVERED: "delivered",
    StepOutcome.DELIVER_FAILED: "deliver_failed",
}

DEFAULT_REWARDS = RewardSchedule()


@dataclass
class EpisodeLog:
    steps: int = 0
    picks_attempted: int = 0
    picks_succeeded: int = 0
    faults: int = 0
    orders_completed: int = 0
    total_reward: float = 0.0
    transitions: Optional[list[Transition]] = None


def generate_orders(
    rate: float, horizon: int, catalog: Sequence[str], rng: random.Random
) -> list[Order]:
    """Poisson arrivals at `rate` orders per 100 ticks over [0, horizon).

    Every order is a single line of quantity one with a uniformly drawn sku;
    the result is sorted by arrival tick.
    """
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    if not catalog:
        raise ValueError("catalog must be non-empty")
    if rate == 0:
        return []
    lam = rate / 100.0
    orders: list[Order] = []
    t = rng.expovariate(lam)
    while t < horizon:
        sku = catalog[rng.randrange(len(catalog))]
        orders.append(Order(id=len(orders), lines=((sku, 1),), arrival_tick=int(t)))
        t += rng.expovariate(lam)
    return orders


class PickingEnv:
    """Episode-capable simulator over one warehouse.

    Keeps the mutable episode state unpacked for speed; `state()` materializes
    the equivalent WarehouseState at any point (used by the conservation and
    kernel-equivalence tests). With no classifier, no faults, and no severity
    model the env is bit-for-bit the deterministic kernel.
    """

    def __init__(
        self,
        world: WarehouseState,
        order_schedule: Callable[[int], Sequence[Order]],
        rewards: RewardSchedule = DEFAULT_REWARDS,
        classifier_accuracy: Optional[float] = None,
        slip_prob: float = 0.0,
        fault_prob: float = 0.0,
        rng: Optional[random.Random] = None,
        collect_transitions: bool = False,
    ):
        if (classifier_accuracy is not None or slip_prob or fault_prob) and rng is None:
            raise ValueError("stochastic channels need an rng")
        self.world = world
        self.order_schedule = order_schedule
        self.rewards = rewards
        self.accuracy = classifier_accuracy
        self.slip_prob = slip_prob
        self.fault_prob = fault_prob
        self.rng = rng
        self.collect_transitions = collect_transitions
        catalog = world.layout.catalog
        self._decoys = {
            sku: [d for d in catalog if d != sku] for sku in catalog
        }
        self._episode = -1
        self.log = EpisodeLog()
        self.reset()

    def reset(self) -> StateId:
        self._episode += 1
        w = self.world
        self._x, self._y = w.robot
        self._carrying: Optional[str] = w.carrying
        self._stock = dict(w.stock)
        self._orders: deque[Order] = deque()
        self._tick = 0
        self._delivered = 0
        self._pending = list(self.order_schedule(self._episode))
        self._next_pending = 0
        self.log = EpisodeLog(
            transitions=[] if self.collect_transitions else None
        )
        self._inject_arrivals()
        self._sid = self._current_sid()
        return self._sid

    # -- state bookkeeping ---------------------------------------------------

    def _inject_arrivals(self) -> None:
        pending, i, tick = self._pending, self._next_pending, self._tick
        while i < len(pending) and pending[i].arrival_tick <= tick:
            self._orders.append(pending[i])
            i += 1
        self._next_pending = i

    def _current_sid(self) -> StateId:
        target = None
        if self._orders:
            sku = self._orders[0].next_needed_sku()
            if sku is not None:
                target = self.world.layout.home_shelf[sku]
        return StateId(self._x, self._y, self._carrying is not None, target)

    def state(self) -> WarehouseState:
        return WarehouseState(
            layout=self.world.layout,
            stock=dict(self._stock),
            robot=(self._x, self._y),
            carrying=self._carrying,
            orders=tuple(self._orders),
            tick=self._tick,
            delivered=self._delivered,
        )

    def done(self) -> bool:
        return not self._orders and self._next_pending >= len(self._pending)

    # -- stepping ------------------------------------------------------------

    def step(self, action: Action) -> Transition:
        layout = self.world.layout
        log = self.log
        outcome = StepOutcome.BLOCKED

        if action < Action.PICK:
            if self.slip_prob and self.rng.random() < self.slip_prob:
                outcome = StepOutcome.BLOCKED  # wheel slip: tick spent in place
            else:
                dx, dy = _MOVE_DELTAS[action]
                nx, ny = self._x + dx, self._y + dy
                if layout.in_bounds(nx, ny) and (nx, ny) not in layout.shelves:
                    self._x, self._y = nx, ny
                    outcome = StepOutcome.MOVED
        elif action is Action.PICK:
            log.picks_attempted += 1
            outcome = self._attempt_pick(layout)
        else:  # DELIVER
            if self._carrying is not None and (self._x, self._y) == layout.dropoff:
                self._resolve_delivery()
                outcome = StepOutcome.DELIVERED
            else:
                outcome = StepOutcome.DELIVER_FAILED

        self._tick += 1
        self._inject_arrivals()

        r = self.rewards.for_outcome(outcome)
        s_before = self._sid
        s_after = self._current_sid()
        self._sid = s_after
        terminal = self.done()
        t = Transition(s_before, action, r, s_after, terminal)

        log.steps += 1
        log.total_reward += r
        if log.transitions is not None:
            log.transitions.append(t)
        return t

    def _attempt_pick(self, layout) -> StepOutcome:
        if self._carrying is not None or not self._orders:
            return StepOutcome.PICK_FAILED
        sku = self._orders[0].next_needed_sku()
        if sku is None:
            return StepOutcome.PICK_FAILED
        shelf = layout.home_shelf[sku]
        if (
            abs(self._x - shelf[0]) + abs(self._y - shelf[1]) != 1
            or self._stock.get(sku, 0) <= 0
        ):
            return StepOutcome.PICK_FAILED
        # Legal attempt: identification gate, then the hardware-fault gate.
        if self.accuracy is not None:
            decoys = self._decoys[sku]
            if decoys and not (self.rng.random() < self.accuracy):
                return StepOutcome.PICK_FAILED  # misidentified; pick aborted
        if self.fault_prob and self.rng.random() < self.fault_prob:
            self.log.faults += 1
            return StepOutcome.PICK_FAILED  # grabbed, voided, returned to shelf
        self._stock[sku] -= 1
        self._carrying = sku
        self.log.picks_succeeded += 1
        return StepOutcome.PICKED

    def _resolve_delivery(self) -> None:
        sku = self._carrying
        self._carrying = None
        self._delivered += 1
        if self._orders:
            head = self._orders[0]
            lines = tuple(
                (s, q - 1) if (s == sku and q > 0) else (s, q) for s, q in head.lines
            )
            if sum(q for _, q in lines) == 0:
                self._orders.popleft()
                self.log.orders_completed += 1
            else:
                self._orders[0] = head._replace(lines=lines)


_MOVE_DELTAS = {
    Action.MOVE_N: (0, -1),
    Action.MOVE_E: (1, 0),
    Action.MOVE_S: (0, 1),
    Action.MOVE_W: (-1, 0),
}


def training_env(
    world: WarehouseState,
    rewards: RewardSchedule = DEFAULT_REWARDS,
    collect_transitions: bool = False,
) -> PickingEnv:
    """Deterministic trainer env: episode i serves one unit of sku i mod n.

    Cycling the catalog exposes every target-shelf slice of the state space;
    no stochastic channel is active, so training outcomes depend only on the
    exploration stream.
    """
    catalog = world.layout.catalog
    if not catalog:
        raise ValueError("training warehouse has no stocked skus")

    def schedule(episode: int) -> list[Order]:
        sku = catalog[episode % len(catalog)]
        return [Order(id=episode, lines=((sku, 1),), arrival_tick=0)]

    return PickingEnv(
        world, schedule, rewards, collect_transitions=collect_transitions
    )


@dataclass(frozen=True)
class SimConfig:
    """Everything one measured run needs; (config, seed) fixes the episode."""

    world: WarehouseState
    order_rate: float  # expected orders per 100 ticks
    classifier: Optional[ClassifierSpec]
    severity_level: int
    fault: FaultModel
    seed: int
    max_steps: int
    severity_table: SeverityTable = field(default_factory=SeverityTable.default)
    rewards: RewardSchedule = DEFAULT_REWARDS
    system: str = ""
    run_id: int = 0

    def __post_init__(self) -> None:
        if self.order_rate < 0:
            raise ValueError("order_rate must be >= 0")
        if self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")
        self.severity_table[self.severity_level]  # validates the level


def _build_env(
    config: SimConfig, rng: random.Random, collect_transitions: bool
) -> PickingEnv:
    sev = config.severity_table[config.severity_level]
    orders = generate_orders(
        config.order_rate, config.max_steps, config.world.layout.catalog, rng
    )
    accuracy = None
    if config.classifier is not None:
        inst = instantiate(config.classifier, rng)
        accuracy = inst.run_accuracy * sev.sensor_degradation
    fault_prob = config.fault.draw_run_probability(rng)
    return PickingEnv(
        config.world,
        lambda _episode: orders,
        config.rewards,
        classifier_accuracy=accuracy,
        slip_prob=sev.slip_prob,
        fault_prob=fault_prob,
        rng=rng,
        collect_transitions=collect_transitions,
    )


def run_episode(
    config: SimConfig,
    policy: Policy,
    rng: Optional[random.Random] = None,
    collect_transitions: bool = False,
) -> EpisodeLog:
    """Execute one seeded episode of up to `max_steps` ticks under `policy`."""
    rng = rng if rng is not None else random.Random(config.seed)
    env = _build_env(config, rng, collect_transitions)
    sid = env._sid
    step = env.step
    for _ in range(config.max_steps):
        t = step(policy(sid))
        sid = t.s_next
        if t.terminal:
            break
    return env.log


def measure_run(config: SimConfig, policy: Policy) -> RunRecord:
    """One replicate's metrics, with the performance score normalized against
    the same seed replayed at severity level 1.

    A run with no pick attempts (or a dead baseline) is flagged invalid and
    carries zeroed metrics; aggregators skip it.
    """
    log = run_episode(config, policy)
    if config.severity_level == 1:
        baseline_completed = log.orders_completed
    else:
        baseline = replace(config, severity_level=1)
        baseline_completed = run_episode(baseline, policy).orders_completed

    classifier = config.classifier.name if config.classifier else ""
    if log.picks_attempted == 0 or baseline_completed == 0:
        return RunRecord(
            run_id=config.run_id,
            system=config.system,
            classifier=classifier,
            severity=config.severity_level,
            seed=config.seed,
            accuracy_pct=0.0,
            failure_rate_pct=0.0,
            performance_score=0.0,
            steps=log.steps,
            orders_completed=log.orders_completed,
            valid=False,
        )
    return RunRecord(
        run_id=config.run_id,
        system=config.system,
        classifier=classifier,
        severity=config.severity_level,
        seed=config.seed,
        accuracy_pct=100.0 * log.picks_succeeded / log.picks_attempted,
        failure_rate_pct=100.0 * log.faults / log.picks_attempted,
        performance_score=10.0 * log.orders_completed / baseline_completed,
        steps=log.steps,
        orders_completed=log.orders_completed,
        valid=True,
    )


def enumerate_model(
    world: WarehouseState,
    rewards: RewardSchedule = DEFAULT_REWARDS,
) -> dict[tuple[StateId, Action], tuple[float, StateId, bool]]:
    """Enumerate the deterministic single-order MDP over every stocked sku.

    Runs a breadth-first sweep of the disturbance-free episode for each sku
    (one unit ordered at tick 0) and records (reward, successor, terminal)
    per (state id, action). Raises if the discretization aliases two
    dynamically different states onto one id, which would make the tabular
    MDP ill-defined.
    """
    model: dict[tuple[StateId, Action], tuple[float, StateId, bool]] = {}
    for sku in world.layout.catalog:
        start = world._replace(orders=(Order(0, ((sku, 1),), 0),))
        frontier = [start]
        seen = {_canonical(start)}
        while frontier:
            state = frontier.pop()
            sid = state_id(state)
            for action in ACTIONS:
                nxt, outcome = transition(state, action)
                r = rewards.for_outcome(outcome)
                terminal = not nxt.orders
                entry = (r, state_id(nxt), terminal)
                key = (sid, action)
                if key in model and model[key] != entry:
                    raise ValueError(
                        f"state aliasing at {key}: {model[key]} vs {entry}"
                    )
                model[key] = entry
                if not terminal:
                    canon = _canonical(nxt)
                    if canon not in seen:
                        seen.add(canon)
                        frontier.append(nxt)
    return model


def _canonical(state: WarehouseState):
    return (
        state.robot,
        state.carrying,
        state.orders,
        tuple(sorted(state.stock.items())),
    )
