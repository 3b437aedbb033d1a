"""Scenario files.

A scenario is a TOML document::

    [graph]
    file = "g5.txt"              # or: edges = [[1, 2, 0.12], ...]

    [agents]
    n = 3

    [gains]
    sigma = 1.64

    [lipschitz]
    xi1 = 0.0
    xi2 = 4.3871e-3

    [quantizer]
    family = "uniform"           # none | uniform | logarithmic
    delta_u = 1.0

    [drift]
    kind = "chua"                # zero | chua; chua accepts zeta, tau, chi, a, b

    [init]
    kind = "seeded_uniform"      # or "explicit" with x = [[...]], v = [[...]]
    low = -2.0
    high = 2.0
    seed = 0

    [simulation]
    horizon = 300.0
    dt = 1e-3
    sample_every = 100

    [report]
    radius = 0.01                # target radius for the convergence-time estimate

Every section except ``[graph]`` is optional.
"""

from __future__ import annotations

import dataclasses
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .certify import GainParams, LipschitzBounds
from .dynamics import ChuaParams, seeded_initial_state
from .errors import ConfigError, GraphError
from .graph import Digraph, read_edge_list
from .quantizers import QuantizerSpec

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["InitSpec", "ScenarioConfig", "load_config", "config_from_dict"]


@dataclass(frozen=True)
class InitSpec:
    kind: str = "seeded_uniform"
    low: float = -2.0
    high: float = 2.0
    seed: int = 0
    x: np.ndarray | None = None
    v: np.ndarray | None = None

    def state(self, num_nodes: int, n: int) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "explicit":
            return np.array(self.x, dtype=float), np.array(self.v, dtype=float)
        return seeded_initial_state(num_nodes, n, self.low, self.high, self.seed)


@dataclass(frozen=True)
class ScenarioConfig:
    graph: Digraph
    n: int = 3
    gains: GainParams = GainParams(1.64)
    lipschitz: LipschitzBounds = LipschitzBounds()
    quantizer: QuantizerSpec = QuantizerSpec()
    drift: object = "zero"
    init: InitSpec = field(default_factory=InitSpec)
    horizon: float = 300.0
    dt: float = 1e-3
    sample_every: int = 100
    report_radius: float | None = None
    source: str = "<memory>"

    def initial_state(self) -> tuple[np.ndarray, np.ndarray]:
        return self.init.state(self.graph.num_nodes, self.n)

    def with_overrides(self, seed=None, dt=None, horizon=None, quantizer=None) -> "ScenarioConfig":
        cfg = self
        if seed is not None:
            cfg = dataclasses.replace(cfg, init=dataclasses.replace(cfg.init, seed=int(seed)))
        if dt is not None:
            cfg = dataclasses.replace(cfg, dt=_positive("simulation.dt", dt))
        if horizon is not None:
            cfg = dataclasses.replace(cfg, horizon=_positive("simulation.horizon", horizon))
        if quantizer is not None:
            cfg = dataclasses.replace(cfg, quantizer=quantizer)
        if cfg.horizon < cfg.dt:
            raise ConfigError("simulation.horizon: must be at least simulation.dt")
        return cfg


def _number(name: str, value) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a number, got {value!r}") from None


def _positive(name: str, value) -> float:
    val = _number(name, value)
    if not (val > 0 and np.isfinite(val)):
        raise ConfigError(f"{name}: must be positive, got {value!r}")
    return val


def _section(data: dict, name: str) -> dict:
    sec = data.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: expected a table")
    return sec


def _build(name: str, factory, *args):
    try:
        return factory(*args)
    except (ValueError, TypeError) as exc:
        msg = str(exc)
        raise ConfigError(f"{name}.{msg}" if ":" in msg.split()[0] else f"{name}: {msg}") from None


def config_from_dict(data: dict, base_dir: str | os.PathLike = ".", source: str = "<memory>") -> ScenarioConfig:
    """Validate a parsed scenario; errors name the offending field."""
    known = {"graph", "agents", "gains", "lipschitz", "quantizer", "drift", "init", "simulation", "report"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")

    gsec = _section(data, "graph")
    if "file" in gsec and "edges" in gsec:
        raise ConfigError("graph: give either 'file' or 'edges', not both")
    try:
        if "file" in gsec:
            graph = read_edge_list(Path(base_dir) / gsec["file"])
        elif "edges" in gsec:
            graph = Digraph.from_edges(gsec["edges"], gsec.get("num_nodes"))
        else:
            raise ConfigError("graph: missing 'file' or 'edges'")
    except GraphError as exc:
        raise ConfigError(f"graph: {exc}") from None
    except OSError as exc:
        raise ConfigError(f"graph.file: {exc}") from None

    n = _section(data, "agents").get("n", 3)
    if not isinstance(n, int) or n < 1:
        raise ConfigError(f"agents.n: must be a positive integer, got {n!r}")

    sigma = _number("gains.sigma", _section(data, "gains").get("sigma", 1.64))
    gains = _build("gains", GainParams, sigma)
    lsec = _section(data, "lipschitz")
    xi = [_number(f"lipschitz.{k}", lsec.get(k, 0.0)) for k in ("xi1", "xi2")]
    lip = _build("lipschitz", LipschitzBounds, *xi)
    qsec = _section(data, "quantizer")
    delta_u = _number("quantizer.delta_u", qsec.get("delta_u", 0.0))
    quant = _build("quantizer", QuantizerSpec, qsec.get("family", "none"), delta_u)

    dsec = dict(_section(data, "drift"))
    kind = dsec.pop("kind", "zero")
    if kind == "zero":
        if dsec:
            raise ConfigError(f"drift: unexpected keys for zero drift: {', '.join(sorted(dsec))}")
        drift = "zero"
    elif kind == "chua":
        bad = set(dsec) - {"zeta", "tau", "chi", "a", "b"}
        if bad:
            raise ConfigError(f"drift: unknown Chua parameter(s): {', '.join(sorted(bad))}")
        drift = _build("drift", lambda: ChuaParams(**dsec))
        if n != 3:
            raise ConfigError(f"drift.kind: Chua drift needs agents.n = 3, got {n}")
    else:
        raise ConfigError(f"drift.kind: expected 'zero' or 'chua', got {kind!r}")

    isec = _section(data, "init")
    ikind = isec.get("kind", "seeded_uniform")
    if ikind == "seeded_uniform":
        low = _number("init.low", isec.get("low", -2.0))
        high = _number("init.high", isec.get("high", 2.0))
        if not low < high:
            raise ConfigError(f"init.low: must be below init.high ({low} >= {high})")
        seed = isec.get("seed", 0)
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError(f"init.seed: must be a nonnegative integer, got {seed!r}")
        init = InitSpec("seeded_uniform", low, high, seed)
    elif ikind == "explicit":
        shape = (graph.num_nodes, n)
        arrs = {}
        for key in ("x", "v"):
            try:
                arr = np.array(isec[key], dtype=float)
            except KeyError:
                raise ConfigError(f"init.{key}: required for explicit initial states") from None
            except (TypeError, ValueError):
                raise ConfigError(f"init.{key}: not a numeric array") from None
            if arr.shape != shape:
                raise ConfigError(f"init.{key}: expected shape {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ConfigError(f"init.{key}: entries must be finite")
            arrs[key] = arr
        init = InitSpec("explicit", x=arrs["x"], v=arrs["v"])
    else:
        raise ConfigError(f"init.kind: expected 'seeded_uniform' or 'explicit', got {ikind!r}")

    ssec = _section(data, "simulation")
    horizon = _positive("simulation.horizon", ssec.get("horizon", 300.0))
    dt = _positive("simulation.dt", ssec.get("dt", 1e-3))
    if horizon < dt:
        raise ConfigError("simulation.horizon: must be at least simulation.dt")
    every = ssec.get("sample_every", 100)
    if not isinstance(every, int) or every < 1:
        raise ConfigError(f"simulation.sample_every: must be a positive integer, got {every!r}")

    rsec = _section(data, "report")
    radius = _positive("report.radius", rsec["radius"]) if "radius" in rsec else None

    return ScenarioConfig(graph, n, gains, lip, quant, drift, init, horizon, dt, every, radius, source)


def load_config(path: str | os.PathLike) -> ScenarioConfig:
    """Read and validate a TOML scenario file."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    try:
        return config_from_dict(data, base_dir=path.parent, source=str(path))
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
