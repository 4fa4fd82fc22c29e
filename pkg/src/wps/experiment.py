"""Experiment configuration and the replicated-run orchestrator.

A JSON experiment file declares the warehouse, the learner hyperparameters,
the disturbance systems, and a list of condition groups; each group crosses
classifiers x systems x severities x replicates. Runs are numbered globally
in declaration order and run i always executes with seed base_seed + i, so
any single run can be replayed in isolation and the output is independent
of worker scheduling.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .engine import FaultModel, SeverityTable, SimConfig, measure_run
from .perception import BUILTIN_SPECS, ClassifierSpec
from .qlearning import QParams, QTable, greedy_policy, load_qtable
from .stats import RunRecord
from .warehouse import WarehouseState, build_warehouse

__all__ = [
    "ConfigError",
    "ExperimentGroup",
    "ExperimentConfig",
    "RunSpec",
    "load_config",
    "parse_config",
    "run_specs",
    "execute_runs",
]


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


@dataclass(frozen=True)
class ExperimentGroup:
    name: str
    classifiers: tuple[str, ...]
    systems: tuple[str, ...]
    severities: tuple[int, ...]
    replicates: int
    max_steps: int


@dataclass(frozen=True)
class ExperimentConfig:
    world: WarehouseState
    qparams: QParams
    order_rate: float
    severity_table: SeverityTable
    systems: dict[str, FaultModel]
    classifiers: dict[str, ClassifierSpec]
    groups: tuple[ExperimentGroup, ...]
    base_seed: int
    output_dir: Optional[str] = None


class RunSpec(NamedTuple):
    run_id: int
    group: str
    classifier: str
    system: str
    severity: int
    seed: int
    max_steps: int


def _require(obj: dict, field: str, kind, path: str):
    if field not in obj:
        raise ConfigError(f"{path}.{field}: missing required field")
    value = obj[field]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(
            f"{path}.{field}: expected {getattr(kind, '__name__', kind)}, "
            f"got {type(value).__name__}"
        )
    return value


def _pair(value, path: str) -> tuple[int, int]:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, int) for v in value)
    ):
        raise ConfigError(f"{path}: expected an [x, y] integer pair")
    return (value[0], value[1])


def _parse_warehouse(obj: dict) -> WarehouseState:
    path = "warehouse"
    width = _require(obj, "width", int, path)
    height = _require(obj, "height", int, path)
    shelves = [_pair(p, f"{path}.shelves[{i}]") for i, p in enumerate(_require(obj, "shelves", list, path))]
    dropoff = _pair(_require(obj, "dropoff", list, path), f"{path}.dropoff")
    stock_obj = _require(obj, "stock", dict, path)
    stock = {}
    for sku, entry in stock_obj.items():
        spath = f"{path}.stock[{sku}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{spath}: expected an object with shelf and qty")
        shelf = _pair(_require(entry, "shelf", list, spath), f"{spath}.shelf")
        qty = _require(entry, "qty", int, spath)
        stock[sku] = (shelf, qty)
    try:
        return build_warehouse(width, height, shelves, dropoff, stock)
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e


def _parse_qparams(obj: dict) -> QParams:
    path = "qlearning"
    try:
        return QParams(
            alpha=_require(obj, "alpha", float, path),
            gamma=_require(obj, "gamma", float, path),
            epsilon_start=_require(obj, "epsilon_start", float, path),
            epsilon_end=_require(obj, "epsilon_end", float, path),
            epsilon_decay_episodes=_require(obj, "epsilon_decay_episodes", int, path),
            episodes=_require(obj, "episodes", int, path),
            max_steps_per_episode=_require(obj, "max_steps_per_episode", int, path),
        )
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e


def _parse_severity(obj: Optional[dict]) -> SeverityTable:
    if obj is None:
        return SeverityTable.default()
    path = "severity"
    slip = _require(obj, "slip_per_level", list, path)
    degr = _require(obj, "degradation_per_level", list, path)
    try:
        return SeverityTable.from_lists(slip, degr)
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e


def _parse_systems(obj: dict) -> dict[str, FaultModel]:
    systems = {}
    for label, entry in obj.items():
        path = f"systems[{label}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{path}: expected an object")
        band = entry.get("rate_band_pct")
        if band is not None:
            if not (isinstance(band, (list, tuple)) and len(band) == 2):
                raise ConfigError(f"{path}.rate_band_pct: expected [lo, hi]")
            band = (float(band[0]), float(band[1]))
        try:
            systems[label] = FaultModel(
                per_pick_fault_prob=_require(entry, "per_pick_fault_prob", float, path),
                run_noise_sd=float(entry.get("run_noise_sd", 0.0)),
                rate_band_pct=band,
            )
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(f"{path}: {e}") from e
    return systems


def _parse_classifiers(obj: Optional[dict]) -> dict[str, ClassifierSpec]:
    specs = dict(BUILTIN_SPECS)
    if obj is None:
        return specs
    for name, entry in obj.items():
        path = f"classifier_overrides[{name}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{path}: expected an object")
        try:
            specs[name] = ClassifierSpec(
                name=name,
                mean_acc=_require(entry, "mean_acc", float, path),
                sd_acc=_require(entry, "sd_acc", float, path),
                min_acc=_require(entry, "min_acc", float, path),
                max_acc=_require(entry, "max_acc", float, path),
            )
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(f"{path}: {e}") from e
    return specs


def _parse_groups(
    items: list, systems: dict[str, FaultModel], classifiers: dict[str, ClassifierSpec]
) -> tuple[ExperimentGroup, ...]:
    if not items:
        raise ConfigError("groups: need at least one condition group")
    groups = []
    names = set()
    for i, obj in enumerate(items):
        path = f"groups[{i}]"
        if not isinstance(obj, dict):
            raise ConfigError(f"{path}: expected an object")
        name = _require(obj, "name", str, path)
        if name in names:
            raise ConfigError(f"{path}.name: duplicate group name {name!r}")
        names.add(name)
        cls = tuple(_require(obj, "classifiers", list, path))
        for c in cls:
            if c not in classifiers:
                raise ConfigError(f"{path}.classifiers: unknown classifier {c!r}")
        sys_labels = tuple(_require(obj, "systems", list, path))
        for s in sys_labels:
            if s not in systems:
                raise ConfigError(f"{path}.systems: unknown system {s!r}")
        severities = tuple(_require(obj, "severities", list, path))
        for level in severities:
            if not isinstance(level, int) or not (1 <= level <= 10):
                raise ConfigError(
                    f"{path}.severities: levels must be integers in [1, 10], got {level!r}"
                )
        replicates = _require(obj, "replicates", int, path)
        if replicates < 1:
            raise ConfigError(f"{path}.replicates: must be >= 1, got {replicates}")
        max_steps = _require(obj, "max_steps", int, path)
        if max_steps < 1:
            raise ConfigError(f"{path}.max_steps: must be >= 1, got {max_steps}")
        groups.append(
            ExperimentGroup(name, cls, sys_labels, severities, replicates, max_steps)
        )
    return tuple(groups)


def parse_config(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root: expected a JSON object")
    world = _parse_warehouse(_require(doc, "warehouse", dict, "config"))
    qparams = _parse_qparams(_require(doc, "qlearning", dict, "config"))
    order_rate = _require(doc, "order_rate_per_100_ticks", float, "config")
    if order_rate < 0:
        raise ConfigError("config.order_rate_per_100_ticks: must be >= 0")
    severity_table = _parse_severity(doc.get("severity"))
    systems = _parse_systems(_require(doc, "systems", dict, "config"))
    classifiers = _parse_classifiers(doc.get("classifier_overrides"))
    groups = _parse_groups(_require(doc, "groups", list, "config"), systems, classifiers)
    base_seed = _require(doc, "base_seed", int, "config")
    output_dir = doc.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError("config.output_dir: expected a string path")
    return ExperimentConfig(
        world=world,
        qparams=qparams,
        order_rate=order_rate,
        severity_table=severity_table,
        systems=systems,
        classifiers=classifiers,
        groups=groups,
        base_seed=base_seed,
        output_dir=output_dir,
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON ({e})") from e
    return parse_config(doc)


def run_specs(config: ExperimentConfig) -> list[RunSpec]:
    """Expand groups into the global, seed-stable run list."""
    specs = []
    i = 0
    for group in config.groups:
        for classifier in group.classifiers:
            for system in group.systems:
                for severity in group.severities:
                    for _ in range(group.replicates):
                        specs.append(
                            RunSpec(
                                run_id=i,
                                group=group.name,
                                classifier=classifier,
                                system=system,
                                severity=severity,
                                seed=config.base_seed + i,
                                max_steps=group.max_steps,
                            )
                        )
                        i += 1
    return specs


def _sim_config(config: ExperimentConfig, spec: RunSpec) -> SimConfig:
    return SimConfig(
        world=config.world,
        order_rate=config.order_rate,
        classifier=config.classifiers[spec.classifier],
        severity_level=spec.severity,
        fault=config.systems[spec.system],
        seed=spec.seed,
        max_steps=spec.max_steps,
        severity_table=config.severity_table,
        system=spec.system,
        run_id=spec.run_id,
    )


# Worker-process globals, set once by the pool initializer so each task only
# ships its small RunSpec.
_WORKER: dict = {}


def _pool_init(config_path: str, qtable_path: str) -> None:
    config = load_config(config_path)
    policy = greedy_policy(load_qtable(qtable_path))
    _WORKER["config"] = config
    _WORKER["policy"] = policy


def _pool_run(spec: RunSpec) -> RunRecord:
    return measure_run(_sim_config(_WORKER["config"], spec), _WORKER["policy"])


def execute_runs(
    config: ExperimentConfig,
    qtable: QTable,
    workers: int = 1,
    config_path: Optional[str] = None,
    qtable_path: Optional[str] = None,
    specs: Optional[Sequence[RunSpec]] = None,
) -> list[RunRecord]:
    """Measure every run; the result is sorted by run_id regardless of workers."""
    specs = list(specs if specs is not None else run_specs(config))
    if workers <= 1:
        policy = greedy_policy(qtable)
        records = [measure_run(_sim_config(config, s), policy) for s in specs]
    else:
        if config_path is None or qtable_path is None:
            raise ValueError("parallel execution needs config_path and qtable_path")
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_pool_init,
            initargs=(config_path, qtable_path),
        ) as pool:
            records = list(pool.map(_pool_run, specs, chunksize=8))
    records.sort(key=lambda r: r.run_id)
    return records
