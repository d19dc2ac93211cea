"""Experiment configuration: YAML file -> ExperimentConfig.

Every error names the line of the offending key or value. Unknown keys are
errors. The full key set is documented in docs/formats.md.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..comms import CommsConfig, Topology
from ..errors import ConfigurationError, TeamExploreError
from ..planners import PLANNERS
from ..sim import EpisodeConfig, RewardConfig
from ..vehicle import DwaConfig, VehicleParams
from ..world import ScenarioConfig, ScenarioKind

CONFIG_VERSION = 1

_SCENARIO_FIELDS = {f.name for f in dataclasses.fields(ScenarioConfig)} - {"kind", "seed"}


@dataclass(frozen=True)
class ScenarioSet:
    """``count`` maps of one kind with generator seeds ``seed_start ..``."""

    name: str
    kind: ScenarioKind
    count: int = 1
    seed_start: int = 0
    params: dict = field(default_factory=dict)

    def scenario(self, index: int) -> ScenarioConfig:
        return ScenarioConfig.for_kind(self.kind, seed=self.seed_start + index % self.count, **self.params)

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind.value, "count": self.count,
                "seed_start": self.seed_start, "params": dict(sorted(self.params.items()))}


@dataclass(frozen=True)
class Cell:
    """One point of the experiment matrix."""

    scenario_set: ScenarioSet
    planner: str
    n_agents: int
    dropout_p: float

    @property
    def key(self) -> str:
        return f"{self.scenario_set.name}/{self.planner}/n{self.n_agents}/p{self.dropout_p:g}"

    @property
    def slug(self) -> str:
        return self.key.replace("/", "_")


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "experiment"
    scenarios: tuple = ()
    planners: tuple = ("voronoi",)
    planner_params: dict = field(default_factory=dict)
    team_sizes: tuple = (3,)
    topology: Topology = Topology.FULL
    k: int = 2
    dropout: tuple = (0.0,)
    episodes: int = 50
    master_seed: int = 0
    workers: int | None = None
    output: str | None = None
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    dwa: dict = field(default_factory=dict)
    reward: RewardConfig = field(default_factory=RewardConfig)
    lookahead: float = 4.0
    thresholds: tuple = (0.85, 0.95)

    def __post_init__(self):
        if self.episodes < 1:
            raise ConfigurationError("episodes must be >= 1")
        if not self.scenarios:
            raise ConfigurationError("at least one scenario set is required")
        names = [s.name for s in self.scenarios]
        if len(set(names)) != len(names):
            raise ConfigurationError("scenario set names must be unique")

    def cells(self) -> list[Cell]:
        return [
            Cell(s, p, n, d)
            for s in self.scenarios
            for p in self.planners
            for n in self.team_sizes
            for d in self.dropout
        ]

    def episode_config(self, cell: Cell, index: int, seed: int) -> EpisodeConfig:
        scenario = cell.scenario_set.scenario(index)
        dwa = DwaConfig(**{"dt": scenario.dt, **self.dwa})
        return EpisodeConfig(
            scenario=scenario,
            planner=cell.planner,
            planner_params=dict(self.planner_params.get(cell.planner, {})),
            comms=CommsConfig(topology=self.topology, k=self.k, dropout_p=cell.dropout_p),
            vehicle=self.vehicle,
            dwa=dwa,
            reward=self.reward,
            n_agents=cell.n_agents,
            seed=seed,
            lookahead=self.lookahead,
        )

    def to_dict(self) -> dict:
        """Normalized form (fully defaulted), written to the manifest."""
        return {
            "version": CONFIG_VERSION,
            "name": self.name,
            "master_seed": self.master_seed,
            "episodes": self.episodes,
            "scenarios": [s.to_dict() for s in self.scenarios],
            "planners": list(self.planners),
            "planner_params": {p: dict(sorted(v.items())) for p, v in sorted(self.planner_params.items())},
            "team_sizes": list(self.team_sizes),
            "comms": {"topology": self.topology.value, "k": self.k, "dropout": list(self.dropout)},
            "vehicle": self.vehicle.to_dict(),
            "dwa": dict(sorted(self.dwa.items())),
            "reward": self.reward.to_dict(),
            "lookahead": self.lookahead,
            "thresholds": list(self.thresholds),
        }


# --- YAML node helpers -------------------------------------------------------

def _line(node) -> int:
    return node.start_mark.line + 1


def _fail(node, message):
    raise ConfigurationError(message, line=_line(node) if node is not None else None)


def _scalar(node):
    if not isinstance(node, yaml.ScalarNode):
        _fail(node, "expected a single value")
    return yaml.safe_load(yaml.serialize(node))


def _mapping(node, allowed, where) -> dict:
    """``{key: (key_node, value_node)}`` with unknown and duplicate keys rejected."""
    if not isinstance(node, yaml.MappingNode):
        _fail(node, f"{where} must be a mapping")
    out = {}
    for knode, vnode in node.value:
        key = _scalar(knode)
        if not isinstance(key, str):
            _fail(knode, f"{where}: keys must be strings")
        if key in out:
            _fail(knode, f"{where}: duplicate key {key!r}")
        if allowed is not None and key not in allowed:
            _fail(knode, f"{where}: unknown key {key!r} (allowed: {', '.join(sorted(allowed))})")
        out[key] = (knode, vnode)
    return out


def _int(node, where, minimum=None) -> int:
    v = _scalar(node)
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(node, f"{where} must be an integer")
    if minimum is not None and v < minimum:
        _fail(node, f"{where} must be >= {minimum}")
    return v


def _float(node, where) -> float:
    v = _scalar(node)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        _fail(node, f"{where} must be a finite number")
    return float(v)


def _str(node, where) -> str:
    v = _scalar(node)
    if not isinstance(v, str):
        _fail(node, f"{where} must be a string")
    return v


def _list(node, where, item):
    """A YAML sequence, or a single value standing for a one-element list."""
    if isinstance(node, yaml.SequenceNode):
        if not node.value:
            _fail(node, f"{where} must not be empty")
        return tuple(item(n, where) for n in node.value)
    return (item(node, where),)


def _plain(node, where) -> dict:
    """Mapping of scalar parameters, returned as ``{key: (value, node)}``."""
    out = {}
    for key, (knode, vnode) in _mapping(node, None, where).items():
        v = _scalar(vnode)
        if not isinstance(v, (bool, int, float, str)):
            _fail(vnode, f"{where}.{key} must be a scalar")
        out[key] = (v, knode)
    return out


def _build(cls, params: dict, node, where):
    """Instantiate a config dataclass, mapping its errors to the key's line."""
    names = {f.name for f in dataclasses.fields(cls)}
    for key, (_, knode) in params.items():
        if key not in names:
            _fail(knode, f"{where}: unknown key {key!r} (allowed: {', '.join(sorted(names))})")
    try:
        return cls(**{k: v for k, (v, _) in params.items()})
    except ConfigurationError as exc:
        _fail(node, f"{where}: {exc}")
    except (TypeError, ValueError) as exc:
        _fail(node, f"{where}: {exc}")


_TOP = {
    "version", "name", "master_seed", "episodes", "workers", "output", "scenarios",
    "planners", "planner_params", "team_sizes", "comms", "vehicle", "dwa", "reward",
    "lookahead", "thresholds",
}
_SCENARIO_KEYS = {"name", "kind", "count", "seed_start"} | _SCENARIO_FIELDS
_COMMS_KEYS = {"topology", "k", "dropout"}


def _scenario_set(node, index) -> ScenarioSet:
    where = f"scenarios[{index}]"
    m = _mapping(node, _SCENARIO_KEYS, where)
    if "kind" not in m:
        _fail(node, f"{where}: 'kind' is required")
    kind_node = m["kind"][1]
    try:
        kind = ScenarioKind(_str(kind_node, f"{where}.kind"))
    except ValueError:
        _fail(kind_node, f"{where}.kind must be one of {[k.value for k in ScenarioKind]}")
    name = _str(m["name"][1], f"{where}.name") if "name" in m else kind.value
    count = _int(m["count"][1], f"{where}.count", 1) if "count" in m else 1
    seed_start = _int(m["seed_start"][1], f"{where}.seed_start", 0) if "seed_start" in m else 0
    params = {}
    for key in sorted(_SCENARIO_FIELDS & set(m)):
        vnode = m[key][1]
        if key in ("global_step_budget", "local_steps_per_decision", "corridor_width", "wall_thickness"):
            params[key] = _int(vnode, f"{where}.{key}")
        else:
            params[key] = _float(vnode, f"{where}.{key}")
    s = ScenarioSet(name, kind, count, seed_start, params)
    try:
        s.scenario(0)
    except ConfigurationError as exc:
        _fail(node, f"{where}: {exc}")
    return s


def parse_config(text: str) -> ExperimentConfig:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigurationError(f"malformed YAML: {getattr(exc, 'problem', None) or exc}", line=line) from None
    if root is None:
        raise ConfigurationError("empty configuration")
    top = _mapping(root, _TOP, "config")
    if "version" not in top:
        _fail(root, "config: 'version' is required")
    version = _int(top["version"][1], "version")
    if version != CONFIG_VERSION:
        _fail(top["version"][1], f"unsupported config version {version} (expected {CONFIG_VERSION})")

    kw = {}
    if "name" in top:
        kw["name"] = _str(top["name"][1], "name")
    if "master_seed" in top:
        kw["master_seed"] = _int(top["master_seed"][1], "master_seed", 0)
    if "episodes" in top:
        kw["episodes"] = _int(top["episodes"][1], "episodes", 1)
    if "workers" in top:
        w = _scalar(top["workers"][1])
        kw["workers"] = None if w is None else _int(top["workers"][1], "workers", 1)
    if "output" in top:
        kw["output"] = _str(top["output"][1], "output")
    if "scenarios" not in top:
        _fail(root, "config: 'scenarios' is required")
    snode = top["scenarios"][1]
    if not isinstance(snode, yaml.SequenceNode) or not snode.value:
        _fail(snode, "scenarios must be a non-empty list")
    kw["scenarios"] = tuple(_scenario_set(n, i) for i, n in enumerate(snode.value))
    names = [s.name for s in kw["scenarios"]]
    for i, n in enumerate(names):
        if names.index(n) != i:
            _fail(snode.value[i], f"duplicate scenario name {n!r}")

    if "planners" in top:
        pnode = top["planners"][1]
        planners = _list(pnode, "planners", _str)
        for p in planners:
            if p not in PLANNERS:
                _fail(pnode, f"unknown planner {p!r}; choose from {sorted(PLANNERS)}")
        kw["planners"] = planners
    if "planner_params" in top:
        pp = {}
        for key, (knode, vnode) in _mapping(top["planner_params"][1], set(PLANNERS), "planner_params").items():
            params = _plain(vnode, f"planner_params.{key}")
            _build(PLANNERS[key][1], params, vnode, f"planner_params.{key}")
            pp[key] = {k: v for k, (v, _) in params.items()}
        kw["planner_params"] = pp
    if "team_sizes" in top:
        kw["team_sizes"] = _list(top["team_sizes"][1], "team_sizes", lambda n, w: _int(n, w, 1))
    if "comms" in top:
        cm = _mapping(top["comms"][1], _COMMS_KEYS, "comms")
        if "topology" in cm:
            tnode = cm["topology"][1]
            try:
                kw["topology"] = Topology(_str(tnode, "comms.topology"))
            except ValueError:
                _fail(tnode, f"comms.topology must be one of {[t.value for t in Topology]}")
        if "k" in cm:
            kw["k"] = _int(cm["k"][1], "comms.k", 1)
        if "dropout" in cm:
            dnode = cm["dropout"][1]
            drops = _list(dnode, "comms.dropout", _float)
            for d in drops:
                if not 0.0 <= d <= 1.0:
                    _fail(dnode, f"comms.dropout values must be in [0, 1], got {d}")
            kw["dropout"] = drops
    if "vehicle" in top:
        vnode = top["vehicle"][1]
        kw["vehicle"] = _build(VehicleParams, _plain(vnode, "vehicle"), vnode, "vehicle")
    if "dwa" in top:
        dnode = top["dwa"][1]
        params = _plain(dnode, "dwa")
        _build(DwaConfig, params, dnode, "dwa")
        kw["dwa"] = {k: v for k, (v, _) in params.items()}
    if "reward" in top:
        rnode = top["reward"][1]
        rm = _mapping(rnode, {"R_s", "R_c", "weights"}, "reward")
        params = {}
        for key in ("R_s", "R_c"):
            if key in rm:
                params[key] = (_float(rm[key][1], f"reward.{key}"), rm[key][0])
        if "weights" in rm:
            wnode = rm["weights"][1]
            if not isinstance(wnode, yaml.SequenceNode):
                _fail(wnode, "reward.weights must be a list of five numbers")
            params["weights"] = (tuple(_float(n, "reward.weights") for n in wnode.value), rm["weights"][0])
        kw["reward"] = _build(RewardConfig, params, rnode, "reward")
    if "lookahead" in top:
        kw["lookahead"] = _float(top["lookahead"][1], "lookahead")
        if kw["lookahead"] <= 0:
            _fail(top["lookahead"][1], "lookahead must be positive")
    if "thresholds" in top:
        tnode = top["thresholds"][1]
        ths = _list(tnode, "thresholds", _float)
        if any(not 0.0 < t <= 1.0 for t in ths):
            _fail(tnode, "thresholds must be in (0, 1]")
        kw["thresholds"] = tuple(sorted(set(ths)))
    try:
        return ExperimentConfig(**kw)
    except TeamExploreError as exc:
        raise ConfigurationError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        return parse_config(text)
    except ConfigurationError as exc:
        err = ConfigurationError(f"{path}: {exc}")
        err.line = exc.line
        raise err from None
