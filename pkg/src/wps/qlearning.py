"""Tabular Q-learning: value update, epsilon-greedy selection, training loop,
convergence residual, and grid-slice export of the learned values.

The update implements

    Q(s, a) <- Q(s, a) + alpha * (r + gamma * max_a' Q(s', a') - Q(s, a))

with the bootstrap term dropped on terminal transitions. Unseen entries read
as exactly 0.0. Everything is deterministic given the caller's seeded RNG.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Protocol

from .warehouse import ACTIONS, Action, StateId

__all__ = [
    "QParams",
    "QTable",
    "Transition",
    "LearningCurve",
    "EpisodeEnv",
    "q_update",
    "select_action",
    "train",
    "greedy_policy",
    "bellman_residual",
    "export_q_surface",
    "save_qtable",
    "load_qtable",
]


@dataclass(frozen=True)
class QParams:
    """Learner hyperparameters. alpha in (0,1], gamma in [0,1)."""

    alpha: float = 0.1
    gamma: float = 0.95
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_episodes: int = 300
    episodes: int = 1000
    max_steps_per_episode: int = 100

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not (0.0 <= self.gamma < 1.0):
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        if not (0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0):
            raise ValueError(
                "epsilon schedule must satisfy 0 <= end <= start <= 1, got "
                f"start={self.epsilon_start} end={self.epsilon_end}"
            )
        if self.epsilon_decay_episodes < 1:
            raise ValueError("epsilon_decay_episodes must be positive")
        if self.episodes < 1:
            raise ValueError("episodes must be positive")
        if self.max_steps_per_episode < 0:
            raise ValueError("max_steps_per_episode must be non-negative")

    def epsilon_at(self, episode: int) -> float:
        """Linear decay from start to end over decay_episodes, then hold."""
        frac = min(1.0, episode / self.epsilon_decay_episodes)
        return self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac


class Transition(NamedTuple):
    s: StateId
    a: Action
    r: float
    s_next: StateId
    terminal: bool


@dataclass
class LearningCurve:
    per_episode_return: list[float] = field(default_factory=list)
    per_episode_steps: list[int] = field(default_factory=list)


class QTable:
    """Map from (StateId, Action) to value; unseen pairs read as 0.0."""

    __slots__ = ("values",)

    def __init__(self, values: Optional[dict[tuple[StateId, Action], float]] = None):
        self.values: dict[tuple[StateId, Action], float] = dict(values or {})

    def get(self, s: StateId, a: Action) -> float:
        return self.values.get((s, a), 0.0)

    def set(self, s: StateId, a: Action, v: float) -> None:
        if not math.isfinite(v):
            raise ValueError(f"non-finite Q value {v} for {(s, a)}")
        self.values[(s, a)] = v

    def max_value(self, s: StateId) -> float:
        get = self.values.get
        return max(get((s, a), 0.0) for a in ACTIONS)

    def best_action(self, s: StateId) -> Action:
        """Argmax over the row; ties break in fixed enum order."""
        get = self.values.get
        best, best_v = ACTIONS[0], get((s, ACTIONS[0]), 0.0)
        for a in ACTIONS[1:]:
            v = get((s, a), 0.0)
            if v > best_v:
                best, best_v = a, v
        return best

    def copy(self) -> "QTable":
        return QTable(self.values)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QTable) and self.values == other.values

    def __len__(self) -> int:
        return len(self.values)


def q_update(q: QTable, t: Transition, alpha: float, gamma: float) -> QTable:
    """Apply one temporal-difference update; touches exactly one entry.

    Returns a new table (shallow per-call copy); use `q_update_inplace` inside
    hot loops.
    """
    out = q.copy()
    q_update_inplace(out, t, alpha, gamma)
    return out


def q_update_inplace(q: QTable, t: Transition, alpha: float, gamma: float) -> float:
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if not (0.0 <= gamma < 1.0):
        raise ValueError(f"gamma must be in [0, 1), got {gamma}")
    if not math.isfinite(t.r):
        raise ValueError(f"non-finite reward {t.r}")
    bootstrap = 0.0 if t.terminal else q.max_value(t.s_next)
    old = q.values.get((t.s, t.a), 0.0)
    new = old + alpha * (t.r + gamma * bootstrap - old)
    q.values[(t.s, t.a)] = new
    return new


def select_action(q: QTable, s: StateId, epsilon: float, rng: random.Random) -> Action:
    """Epsilon-greedy: uniform random with probability epsilon, else argmax."""
    if not (0.0 <= epsilon <= 1.0):
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    if epsilon > 0.0 and rng.random() < epsilon:
        return ACTIONS[rng.randrange(len(ACTIONS))]
    return q.best_action(s)


class EpisodeEnv(Protocol):
    """Minimal episodic interface the trainer drives."""

    def reset(self) -> StateId: ...

    def step(self, action: Action) -> Transition: ...


def train(
    env: EpisodeEnv, params: QParams, rng: random.Random
) -> tuple[QTable, LearningCurve]:
    """Run the epsilon-greedy training loop; one q_update per env transition."""
    q = QTable()
    curve = LearningCurve()
    for episode in range(params.episodes):
        eps = params.epsilon_at(episode)
        s = env.reset()
        ep_return = 0.0
        steps = 0
        for _ in range(params.max_steps_per_episode):
            a = select_action(q, s, eps, rng)
            t = env.step(a)
            q_update_inplace(q, t, params.alpha, params.gamma)
            ep_return += t.r
            steps += 1
            s = t.s_next
            if t.terminal:
                break
        curve.per_episode_return.append(ep_return)
        curve.per_episode_steps.append(steps)
    return q, curve


def greedy_policy(q: QTable) -> Callable[[StateId], Action]:
    """Freeze the greedy policy as a memoized lookup (fast in rollouts)."""
    cache: dict[StateId, Action] = {}

    def policy(s: StateId) -> Action:
        a = cache.get(s)
        if a is None:
            a = q.best_action(s)
            cache[s] = a
        return a

    return policy


def bellman_residual(
    q: QTable,
    model: dict[tuple[StateId, Action], tuple[float, StateId, bool]],
    gamma: float,
) -> float:
    """Max |Q(s,a) - (r + gamma * max_a' Q(s',a'))| over an enumerated model.

    `model` maps every (s, a) of the MDP to its deterministic
    (reward, successor, terminal) triple; zero at the fixed point.
    """
    worst = 0.0
    for (s, a), (r, s_next, terminal) in model.items():
        target = r if terminal else r + gamma * q.max_value(s_next)
        gap = abs(q.get(s, a) - target)
        if gap > worst:
            worst = gap
    return worst


def export_q_surface(
    q: QTable,
    width: int,
    height: int,
    carrying: bool,
    target: Optional[tuple[int, int]],
    action: Action,
) -> list[tuple[int, int, float]]:
    """One (x, y, value) row per grid cell, row-major; unseen entries are 0.0."""
    rows = []
    for y in range(height):
        for x in range(width):
            rows.append((x, y, q.get(StateId(x, y, carrying, target), action)))
    return rows


def _state_record(s: StateId) -> dict:
    tx, ty = (s.target if s.target is not None else (None, None))
    return {"x": s.x, "y": s.y, "carrying": s.carrying, "tx": tx, "ty": ty}


def _record_state(d: dict) -> StateId:
    target = None if d["tx"] is None else (int(d["tx"]), int(d["ty"]))
    return StateId(int(d["x"]), int(d["y"]), bool(d["carrying"]), target)


def _sort_key(item: tuple[tuple[StateId, Action], float]):
    (s, a), _ = item
    tx, ty = s.target if s.target is not None else (-1, -1)
    return (s.x, s.y, s.carrying, tx, ty, int(a))


def save_qtable(q: QTable, path: str) -> None:
    """Checkpoint as a sorted JSON array of {state, action, value} records."""
    records = [
        {"state": _state_record(s), "action": a.label, "value": v}
        for (s, a), v in sorted(q.values.items(), key=_sort_key)
    ]
    with open(path, "w", encoding="utf-8") as f:
        json.dump(records, f, indent=1)
        f.write("\n")


def load_qtable(path: str) -> QTable:
    with open(path, encoding="utf-8") as f:
        records = json.load(f)
    by_label = {a.label: a for a in ACTIONS}
    values = {}
    for rec in records:
        s = _record_state(rec["state"])
        values[(s, by_label[rec["action"]])] = float(rec["value"])
    return QTable(values)
