"""Plain-text run configuration.

The format is line-oriented ``key = value`` pairs.  Blank lines and ``#``
comments are skipped, and ``[section]`` headers are tolerated as visual
grouping (keys remain global).  Unknown keys, malformed values, duplicate
keys, and out-of-range values are all rejected with the offending line.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Optional

from .experiments import PRESETS, SPATIAL_RANKS, TOPK_RANKS
from .kernels import GF, KINDS, SPATIAL, KernelSpec, quadratic_rule


class ConfigError(ValueError):
    """Raised for unparseable or invalid run configuration."""


G_KERNELS = {"quadratic": quadratic_rule}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run parameters; every field has its default filled in."""

    model: str
    alpha_p: float = 2.0
    gamma: Optional[float] = None
    g_kernel: str = "quadratic"
    T0: int = 1_000
    T: int = 10_000
    R: int = 10
    record_every: int = 100
    ranks: Optional[tuple[int, ...]] = None
    seed: int = 0
    M: int = 1024
    grid_g: int = 32
    out_dir: str = "results"

    def validate(self) -> None:
        if self.model not in KINDS:
            raise ConfigError(f"model must be one of {', '.join(KINDS)}; got {self.model!r}")
        if not self.alpha_p > 0:
            raise ConfigError(f"alpha_p must be > 0, got {self.alpha_p}")
        if self.model == SPATIAL and self.gamma is None:
            raise ConfigError("gamma is required when model=spatial")
        if self.gamma is not None and self.gamma < 0:
            raise ConfigError(f"gamma must be >= 0, got {self.gamma}")
        if self.g_kernel not in G_KERNELS:
            raise ConfigError(f"g_kernel must be one of {', '.join(G_KERNELS)}; got {self.g_kernel!r}")
        if not (self.T > self.T0 >= 2):
            raise ConfigError(f"need T > T0 >= 2, got T0={self.T0}, T={self.T}")
        if self.R < 1:
            raise ConfigError(f"R must be >= 1, got {self.R}")
        if self.record_every < 1:
            raise ConfigError(f"record_every must be >= 1, got {self.record_every}")
        if self.ranks is not None:
            if not self.ranks or min(self.ranks) < 1:
                raise ConfigError("ranks must be a non-empty list of integers >= 1")
            if max(self.ranks) > self.T0 + 1:
                raise ConfigError(f"rank {max(self.ranks)} exceeds node count {self.T0 + 1} at T0")
        if self.M < 1:
            raise ConfigError(f"M must be >= 1, got {self.M}")
        if self.grid_g < 2:
            raise ConfigError(f"grid_g must be >= 2, got {self.grid_g}")

    def kernel(self) -> KernelSpec:
        if self.model == SPATIAL:
            return KernelSpec(kind=SPATIAL, gamma=float(self.gamma))
        if self.model == GF:
            return KernelSpec(kind=GF, g=G_KERNELS[self.g_kernel])
        return KernelSpec(kind=self.model)

    def resolved_ranks(self, protocol_is_spatial: bool) -> tuple[int, ...]:
        if self.ranks is not None:
            return self.ranks
        return SPATIAL_RANKS if protocol_is_spatial else TOPK_RANKS

    def to_text(self) -> str:
        """Canonical serialization; parse_config round-trips it exactly."""
        lines = ["[run]"]
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name == "ranks":
                value = _format_ranks(value)
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


_INT_KEYS = {"T0", "T", "R", "record_every", "seed", "M", "grid_g"}
_FLOAT_KEYS = {"alpha_p", "gamma"}
_STR_KEYS = {"model", "g_kernel", "out_dir"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | {"ranks"}


def _parse_ranks(raw: str, lineno: int) -> tuple[int, ...]:
    ranks: list[int] = []
    for part in raw.replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part:
            lo, _, hi = part.partition("-")
            try:
                lo_i, hi_i = int(lo), int(hi)
            except ValueError:
                raise ConfigError(f"line {lineno}: bad rank range {part!r}") from None
            if hi_i < lo_i:
                raise ConfigError(f"line {lineno}: empty rank range {part!r}")
            ranks.extend(range(lo_i, hi_i + 1))
        else:
            try:
                ranks.append(int(part))
            except ValueError:
                raise ConfigError(f"line {lineno}: bad rank {part!r}") from None
    if not ranks:
        raise ConfigError(f"line {lineno}: ranks is empty")
    return tuple(ranks)


def _format_ranks(ranks: tuple[int, ...]) -> str:
    # collapse a contiguous run into lo-hi, else a comma list
    if len(ranks) > 2 and ranks == tuple(range(ranks[0], ranks[-1] + 1)):
        return f"{ranks[0]}-{ranks[-1]}"
    return ",".join(str(r) for r in ranks)


def parse_config(text: str, preset: Optional[str] = None) -> RunConfig:
    """Parse and validate configuration text into a RunConfig.

    ``preset`` fills scale defaults (T0, T, R, record_every) before the
    file's own keys apply, so explicit keys always win.
    """
    values: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; expected one of {', '.join(PRESETS)}")
        values.update(PRESETS[preset])

    seen: dict[str, int] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line.strip()!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first on line {seen[key]})")
        seen[key] = lineno
        if key in _INT_KEYS:
            try:
                values[key] = int(raw_value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} must be an integer, got {raw_value!r}") from None
        elif key in _FLOAT_KEYS:
            try:
                values[key] = float(raw_value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} must be a number, got {raw_value!r}") from None
        elif key == "ranks":
            values[key] = _parse_ranks(raw_value, lineno)
        else:
            values[key] = raw_value

    if "model" not in values:
        raise ConfigError("missing required key 'model'")
    config = RunConfig(**values)
    config.validate()
    return config


def with_overrides(config: RunConfig, **overrides) -> RunConfig:
    """Apply non-None overrides (e.g. CLI flags) and re-validate."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    if not updates:
        return config
    out = replace(config, **updates)
    out.validate()
    return out
