"""Warehouse world: grid, stock, orders, robot, actions, and the transition kernel.

The world is a small 2-D grid of aisle/shelf/drop-off cells. A single robot
walks aisles, picks single units from shelves, and delivers them at the
drop-off. Every stochastic concern (order arrivals, misidentification,
faults, slips) lives elsewhere; `transition` here is a total, deterministic,
pure function, which is what makes the tabular learner and all the oracles
tractable.

Coordinates are (x, y) with x the column and y the row; MOVE_N decreases y.
"""

from __future__ import annotations

import enum
from typing import NamedTuple, Optional


class WorldError(ValueError):
    """Raised when a warehouse cannot be constructed as specified."""


class Action(enum.IntEnum):
    """The fixed six-action set. Enum order is the greedy tie-break order."""

    MOVE_N = 0
    MOVE_E = 1
    MOVE_S = 2
    MOVE_W = 3
    PICK = 4
    DELIVER = 5

    @property
    def label(self) -> str:
        return self.name.lower()


ACTIONS: tuple[Action, ...] = tuple(Action)

_MOVE_DELTA = {
    Action.MOVE_N: (0, -1),
    Action.MOVE_E: (1, 0),
    Action.MOVE_S: (0, 1),
    Action.MOVE_W: (-1, 0),
}


class StepOutcome(enum.Enum):
    MOVED = "moved"
    BLOCKED = "blocked"
    PICKED = "picked"
    PICK_FAILED = "pick_failed"
    DELIVERED = "delivered"
    DELIVER_FAILED = "deliver_failed"


class CellKind(enum.Enum):
    AISLE = "aisle"
    SHELF = "shelf"
    DROPOFF = "dropoff"


class Order(NamedTuple):
    """One customer order; `lines` holds remaining (sku, qty) to deliver."""

    id: int
    lines: tuple[tuple[str, int], ...]
    arrival_tick: int

    def next_needed_sku(self) -> Optional[str]:
        for sku, qty in self.lines:
            if qty > 0:
                return sku
        return None

    def remaining(self) -> int:
        return sum(qty for _, qty in self.lines)


class Layout(NamedTuple):
    """Immutable geometry shared by every state of one warehouse."""

    width: int
    height: int
    shelves: frozenset[tuple[int, int]]
    dropoff: tuple[int, int]
    home_shelf: dict[str, tuple[int, int]]  # sku -> the shelf stocking it

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def cell_kind(self, pos: tuple[int, int]) -> CellKind:
        if pos in self.shelves:
            return CellKind.SHELF
        if pos == self.dropoff:
            return CellKind.DROPOFF
        return CellKind.AISLE

    @property
    def catalog(self) -> tuple[str, ...]:
        return tuple(sorted(self.home_shelf))


class WarehouseState(NamedTuple):
    """Full simulation state. Structure-shared and cheap to copy per tick."""

    layout: Layout
    stock: dict[str, int]  # remaining units per sku, on its home shelf
    robot: tuple[int, int]
    carrying: Optional[str]
    orders: tuple[Order, ...]  # FIFO, head is the order being served
    tick: int
    delivered: int


class StateId(NamedTuple):
    """Tabular discretization: robot cell, carrying flag, target shelf.

    `target` is the shelf holding the head order's next needed sku, or None
    when the queue is empty. It is a pure function of the full state, so two
    states that differ only in tick or tail-of-queue content share an id.
    """

    x: int
    y: int
    carrying: bool
    target: Optional[tuple[int, int]]


def shelf_contents(state: WarehouseState, pos: tuple[int, int]) -> dict[str, int]:
    """Inventory currently sitting on the shelf at `pos` (empty for aisles)."""
    return {
        sku: qty
        for sku, qty in state.stock.items()
        if qty > 0 and state.layout.home_shelf[sku] == pos
    }


def conservation_total(state: WarehouseState) -> int:
    """Shelf stock + carried unit + delivered units; constant per episode."""
    return sum(state.stock.values()) + (1 if state.carrying else 0) + state.delivered


def build_warehouse(
    width: int,
    height: int,
    shelf_positions: list[tuple[int, int]],
    dropoff: tuple[int, int],
    initial_stock: dict[str, tuple[tuple[int, int], int]],
) -> WarehouseState:
    """Construct a tick-0 state: robot at the drop-off, no orders, nothing carried.

    `initial_stock` maps sku -> (shelf position, quantity); each sku lives on
    exactly one shelf. Raises WorldError on any geometry violation.
    """
    if width < 1 or height < 1:
        raise WorldError(f"grid must be at least 1x1, got {width}x{height}")
    shelves = []
    for pos in shelf_positions:
        x, y = pos
        if not (0 <= x < width and 0 <= y < height):
            raise WorldError(f"shelf {pos} is outside the {width}x{height} grid")
        shelves.append((x, y))
    if len(set(shelves)) != len(shelves):
        raise WorldError("duplicate shelf positions")
    dx, dy = dropoff
    if not (0 <= dx < width and 0 <= dy < height):
        raise WorldError(f"dropoff {dropoff} is outside the grid")
    if tuple(dropoff) in set(shelves):
        raise WorldError(f"dropoff {dropoff} coincides with a shelf")

    shelf_set = frozenset(shelves)
    home: dict[str, tuple[int, int]] = {}
    stock: dict[str, int] = {}
    for sku, (shelf, qty) in initial_stock.items():
        shelf = tuple(shelf)
        if shelf not in shelf_set:
            raise WorldError(f"stock for {sku!r} assigned to non-shelf cell {shelf}")
        if qty < 0:
            raise WorldError(f"negative stock for {sku!r}")
        home[sku] = shelf
        stock[sku] = int(qty)

    layout = Layout(
        width=width,
        height=height,
        shelves=shelf_set,
        dropoff=(dx, dy),
        home_shelf=home,
    )
    return WarehouseState(
        layout=layout,
        stock=stock,
        robot=(dx, dy),
        carrying=None,
        orders=(),
        tick=0,
        delivered=0,
    )


def state_id(state: WarehouseState) -> StateId:
    """Discretize; depends only on robot cell, carrying flag, and target shelf."""
    target: Optional[tuple[int, int]] = None
    if state.orders:
        sku = state.orders[0].next_needed_sku()
        if sku is not None:
            target = state.layout.home_shelf[sku]
    return StateId(state.robot[0], state.robot[1], state.carrying is not None, target)


def state_space_size(layout: Layout) -> int:
    """Upper bound on distinct StateIds: cells x carrying x (shelves + none)."""
    return layout.width * layout.height * 2 * (len(layout.shelves) + 1)


def push_order(state: WarehouseState, order: Order) -> WarehouseState:
    """Append an arriving order to the tail of the queue (FIFO)."""
    if not order.lines or any(qty < 1 for _, qty in order.lines):
        raise WorldError(f"order {order.id} needs at least one line with qty >= 1")
    unknown = [sku for sku, _ in order.lines if sku not in state.layout.home_shelf]
    if unknown:
        raise WorldError(f"order {order.id} references unstocked skus {unknown}")
    return state._replace(orders=state.orders + (order,))


def _adjacent(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


def transition(
    state: WarehouseState, action: Action
) -> tuple[WarehouseState, StepOutcome]:
    """Deterministic one-tick kernel. Total: illegal actions fail, never raise.

    Moves are blocked by grid edges and shelves. PICK requires an empty hand,
    4-adjacency to the target shelf, and stock of the needed sku. DELIVER
    requires a carried unit and the robot on the drop-off. The tick always
    advances by exactly 1.
    """
    tick = state.tick + 1
    if action < Action.PICK:  # one of the four moves
        dx, dy = _MOVE_DELTA[action]
        nx, ny = state.robot[0] + dx, state.robot[1] + dy
        if not state.layout.in_bounds(nx, ny) or (nx, ny) in state.layout.shelves:
            return state._replace(tick=tick), StepOutcome.BLOCKED
        return state._replace(robot=(nx, ny), tick=tick), StepOutcome.MOVED

    if action is Action.PICK:
        if state.carrying is not None or not state.orders:
            return state._replace(tick=tick), StepOutcome.PICK_FAILED
        sku = state.orders[0].next_needed_sku()
        if sku is None:
            return state._replace(tick=tick), StepOutcome.PICK_FAILED
        shelf = state.layout.home_shelf[sku]
        if not _adjacent(state.robot, shelf) or state.stock.get(sku, 0) <= 0:
            return state._replace(tick=tick), StepOutcome.PICK_FAILED
        stock = dict(state.stock)
        stock[sku] -= 1
        return (
            state._replace(stock=stock, carrying=sku, tick=tick),
            StepOutcome.PICKED,
        )

    # DELIVER
    if state.carrying is None or state.robot != state.layout.dropoff:
        return state._replace(tick=tick), StepOutcome.DELIVER_FAILED
    sku = state.carrying
    orders = state.orders
    if orders:
        head = orders[0]
        lines = tuple(
            (s, q - 1) if (s == sku and q > 0) else (s, q) for s, q in head.lines
        )
        head = head._replace(lines=lines)
        orders = (orders[1:] if head.remaining() == 0 else (head,) + orders[1:])
    return (
        state._replace(
            carrying=None, orders=orders, tick=tick, delivered=state.delivered + 1
        ),
        StepOutcome.DELIVERED,
    )
