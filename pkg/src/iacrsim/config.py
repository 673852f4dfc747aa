"""Scenario configuration: defaults, file parsing and round-trip serialization.

The on-disk format is flat ``key = value`` text with one nested list for the
traffic flows, e.g.::

    n_nodes = 30
    protocol = IACR
    seed = 7
    flows = [(0, 12, 3.05), (4, 20, 3.15)]

Unknown keys, type mismatches and violated invariants raise ConfigError with
the offending line number. Flags override file values which override the
defaults below.
"""

import ast
import dataclasses
import math
from dataclasses import dataclass, field, fields

from .radio import ChannelModel
from .routing import IACR, PROTOCOLS, MetricPolicy


class ConfigError(ValueError):
    """Malformed configuration input."""


AUTO = "auto"


@dataclass
class ScenarioConfig:
    # topology and radio
    n_nodes: int = 30
    area_side: float = 1000.0
    p_max: float = 1.0
    alpha: float = 3.0
    noise_variance: float = 1e-10
    detection_threshold: float = 1.25e-7
    sinr_threshold_db: float = 2.0
    sir_mode: bool = False
    min_separation: float = 1.0
    # protocol
    protocol: str = IACR
    delta: float = 0.5
    include_receiver_in_created: bool = False
    # traffic
    data_rate: float = 1e6
    packet_size: int = 4096
    send_interval: float = 0.1
    hello_interval: float = 0.2
    establishment_time: float = 3.0
    sim_duration: float = 13.0
    flows: object = AUTO        # "auto" or list of (source, destination, start)
    auto_flow_per_nodes: int = 10
    # control frame sizes (bits)
    hello_size: int = 128
    icp_size: int = 256
    rreq_size: int = 512
    # power adaptation
    power_adaptation: bool = False
    adapt_margin_db: float = 3.0
    # route maintenance
    reroute_window: int = 5
    reroute_trigger: int = 3
    reroute_budget: int = 3
    reroute_budget_window: float = 10.0
    discovery_attempts: int = 3
    discovery_timeout: float = 0.2
    rrep_wait: float = 0.02
    stale_epochs: int = 3
    route_expiry: float = 2.0
    # reproducibility
    seed: int = 1

    # ------------------------------------------------------------------
    def validate(self):
        if self.n_nodes < 2:
            raise ConfigError("n_nodes must be at least 2")
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if not 0.0 <= self.delta <= 1.0:
            raise ConfigError("delta must lie in [0, 1]")
        if self.alpha < 2.0:
            raise ConfigError("alpha must be >= 2")
        if self.noise_variance < 0.0:
            raise ConfigError("noise_variance must be >= 0")
        if self.detection_threshold <= 0.0:
            raise ConfigError("detection_threshold must be > 0")
        if self.p_max <= 0.0:
            raise ConfigError("p_max must be > 0")
        if self.establishment_time >= self.sim_duration:
            raise ConfigError("establishment_time must be smaller than sim_duration")
        if self.send_interval <= self.packet_size / self.data_rate:
            raise ConfigError("send_interval must exceed the packet airtime")
        if self.flows != AUTO:
            if not isinstance(self.flows, list):
                raise ConfigError("flows must be 'auto' or a list of (src, dst, start)")
            for flow in self.flows:
                if len(flow) != 3:
                    raise ConfigError(f"flow {flow!r} must be (source, destination, start)")
                src, dst, start = flow
                if not (0 <= src < self.n_nodes and 0 <= dst < self.n_nodes):
                    raise ConfigError(f"flow {flow!r} references an unknown node")
                if src == dst:
                    raise ConfigError(f"flow {flow!r} has equal endpoints")
                if start < self.establishment_time:
                    raise ConfigError(
                        f"flow {flow!r} starts before the establishment window ends")
        return self

    # derived quantities ------------------------------------------------
    @property
    def sinr_threshold(self) -> float:
        return 10.0 ** (self.sinr_threshold_db / 10.0)

    @property
    def adapt_margin(self) -> float:
        return 10.0 ** (self.adapt_margin_db / 10.0)

    def airtime(self, bits: int) -> float:
        return bits / self.data_rate

    def channel(self) -> ChannelModel:
        return ChannelModel(alpha=self.alpha, noise_variance=self.noise_variance,
                            detection_threshold=self.detection_threshold,
                            sir_mode=self.sir_mode)

    def policy(self) -> MetricPolicy:
        if self.protocol == IACR:
            return MetricPolicy(IACR, self.delta)
        return MetricPolicy(self.protocol)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        if out["flows"] != AUTO:
            out["flows"] = [list(f) for f in out["flows"]]
        return out


_FIELDS = {f.name: f for f in fields(ScenarioConfig)}


def _coerce(name: str, raw: str):
    """Parse one raw string value to the field's declared type."""
    f = _FIELDS[name]
    raw = raw.strip()
    if name == "flows":
        if raw == AUTO:
            return AUTO
        try:
            value = ast.literal_eval(raw)
        except (ValueError, SyntaxError) as exc:
            raise ConfigError(f"cannot parse flows list: {exc}") from None
        if not isinstance(value, (list, tuple)):
            raise ConfigError("flows must be 'auto' or a list of tuples")
        return [(int(s), int(d), float(t)) for s, d, t in value]
    if f.type in (bool, "bool"):
        low = raw.lower()
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise ConfigError(f"{name} must be a boolean, got {raw!r}")
    if f.type in (int, "int"):
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{name} must be an integer, got {raw!r}") from None
    if f.type in (float, "float"):
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{name} must be a number, got {raw!r}") from None
    return raw


def parse_config(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Parse key = value text into a config, reporting errors by line."""
    cfg = dataclasses.replace(base) if base is not None else ScenarioConfig()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            setattr(cfg, key, _coerce(key, raw))
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    try:
        cfg.validate()
    except ConfigError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path, base: ScenarioConfig | None = None) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), base)


def apply_overrides(cfg: ScenarioConfig, overrides: dict) -> ScenarioConfig:
    """Apply string-valued overrides (command-line flags) on top of a config."""
    out = dataclasses.replace(cfg)
    for key, raw in overrides.items():
        if key not in _FIELDS:
            raise ConfigError(f"unknown configuration key {key!r}")
        setattr(out, key, _coerce(key, str(raw)))
    out.validate()
    return out


def serialize_config(cfg: ScenarioConfig) -> str:
    """Effective configuration as parseable key = value text."""
    lines = []
    for f in fields(ScenarioConfig):
        value = getattr(cfg, f.name)
        if f.name == "flows" and value != AUTO:
            value = "[" + ", ".join(f"({s}, {d}, {t!r})" for s, d, t in value) + "]"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"
