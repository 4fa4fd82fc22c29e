"""Independent oracles used across the test suite.

These deliberately avoid the code paths they check: shortest completions come
from breadth-first search over the raw transition graph, reference Q-values
from value iteration on the enumerated model, and regression coefficients
from a grid-plus-polish minimizer of the raw squared error.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from wps import Action, Order, QTable, transition
from wps.engine import DEFAULT_REWARDS
from wps.warehouse import WarehouseState


def _canonical(state: WarehouseState):
    return (
        state.robot,
        state.carrying,
        state.orders,
        tuple(sorted(state.stock.items())),
    )


def bfs_optimal_steps(start: WarehouseState) -> int:
    """Fewest transitions from `start` until no orders remain (BFS, exhaustive)."""
    if not start.orders:
        return 0
    frontier = [start]
    seen = {_canonical(start)}
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for state in frontier:
            for action in Action:
                succ, _ = transition(state, action)
                if not succ.orders:
                    return depth
                key = _canonical(succ)
                if key not in seen:
                    seen.add(key)
                    nxt.append(succ)
        frontier = nxt
    raise AssertionError("order is not completable in this world")


def single_order_world(world: WarehouseState, sku: str) -> WarehouseState:
    return world._replace(orders=(Order(0, ((sku, 1),), 0),))


def value_iteration(model, gamma: float, tol: float = 1e-9):
    """Exact fixed point of the enumerated deterministic MDP.

    Returns (V, q_star) with q_star(s,a) = r + gamma * V(s') (0 past terminal).
    """
    states = sorted({s for (s, _) in model}, key=repr)
    v = {s: 0.0 for s in states}
    by_state: dict = {}
    for (s, a), entry in model.items():
        by_state.setdefault(s, []).append(entry)
    while True:
        delta = 0.0
        for s in states:
            best = max(
                r + (0.0 if terminal else gamma * v[s_next])
                for (r, s_next, terminal) in by_state[s]
            )
            delta = max(delta, abs(best - v[s]))
            v[s] = best
        if delta < tol:
            break
    q_star = QTable()
    for (s, a), (r, s_next, terminal) in model.items():
        q_star.set(s, a, r + (0.0 if terminal else gamma * v[s_next]))
    return v, q_star


def greedy_rollout_steps(env, policy, cap: int = 200) -> int:
    """Steps a greedy policy needs to finish one episode (cap = failure)."""
    s = env.reset()
    for step in range(1, cap + 1):
        t = env.step(policy(s))
        s = t.s_next
        if t.terminal:
            return step
    return cap


def brute_force_ols(points) -> tuple[float, float]:
    """Grid-then-polish minimizer of the sum of squared residuals."""
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)

    def sse(coef):
        slope, intercept = coef
        resid = ys - (intercept + slope * xs)
        return float(resid @ resid)

    span_y = max(1.0, float(np.max(np.abs(ys))))
    span_x = max(1.0, float(np.max(np.abs(xs))))
    slopes = np.linspace(-4 * span_y / span_x, 4 * span_y / span_x, 81)
    intercepts = np.linspace(-4 * span_y, 4 * span_y, 81)
    best = min(
        ((s, i) for s in slopes for i in intercepts), key=lambda c: sse(c)
    )
    res = minimize(sse, best, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000})
    return float(res.x[0]), float(res.x[1])


def assert_conserved(env, initial_total: int) -> None:
    state = env.state()
    total = sum(state.stock.values()) + (1 if state.carrying else 0) + state.delivered
    assert total == initial_total, f"conservation broken: {total} != {initial_total}"


REWARDS = DEFAULT_REWARDS
