"""Flat key=value (INI-sectioned) run configuration.

Sections: [run] seed/forcing/output/snapshots, [generator] name/n plus free
numeric parameters, [stepper] the time-stepping knobs, [monitors] enabled
check ids, and for the sweep subcommand a [sweep] section whose keys are
generator parameters with comma-separated value lists.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .flow import Scheme, StepperConfig
from .forcing import ForcingSpec, parse_forcing
from .generators import GeneratorSpec
from .verify import CheckId

_BOOL = {"true": True, "yes": True, "1": True, "on": True,
         "false": False, "no": False, "0": False, "off": False}


@dataclass(frozen=True)
class RunConfig:
    generator: GeneratorSpec
    forcing: ForcingSpec
    stepper: StepperConfig
    monitors: list[CheckId] | None
    output: Path
    seed: int = 0
    snapshots_to_disk: bool = False
    curve_path: Path | None = None
    sweep: dict[str, list[float]] = field(default_factory=dict)


def _parse_bool(raw: str, where: str) -> bool:
    try:
        return _BOOL[raw.strip().lower()]
    except KeyError:
        raise ConfigError(f"{where}: expected a boolean, got {raw!r}") from None


def _parse_monitors(raw: str) -> list[CheckId] | None:
    raw = raw.strip()
    if raw.lower() in ("", "all"):
        return None
    out = []
    for token in raw.split(","):
        token = token.strip().upper()
        try:
            out.append(CheckId(token))
        except ValueError:
            valid = ", ".join(c.value for c in CheckId)
            raise ConfigError(
                f"[monitors] enabled: unknown check {token!r}; valid: {valid}"
            ) from None
    return out


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a run configuration file."""
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh, source=str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    def section(name: str) -> dict[str, str]:
        return dict(parser[name]) if parser.has_section(name) else {}

    run_sec = section("run")
    gen_sec = section("generator")
    step_sec = section("stepper")
    mon_sec = section("monitors")
    sweep_sec = section("sweep")

    try:
        forcing = parse_forcing(run_sec.get("forcing", "zero"))
    except ValueError as exc:
        raise ConfigError(f"[run] forcing: {exc}") from exc

    name = gen_sec.pop("name", "circle").strip()
    curve_path = None
    if name == "file":
        raw = gen_sec.pop("path", "").strip()
        if not raw:
            raise ConfigError("[generator] name=file requires a path key")
        curve_path = Path(raw)
        if not curve_path.is_absolute():
            curve_path = path.parent / curve_path
    try:
        n = int(gen_sec.pop("n", "1024"))
        params = {k: float(v) for k, v in gen_sec.items()}
        generator = GeneratorSpec(name=name, n=n, params=params)
    except ValueError as exc:
        raise ConfigError(f"[generator]: {exc}") from exc

    try:
        stepper = StepperConfig(
            n=int(step_sec.get("n", str(n))),
            cfl=float(step_sec.get("cfl", "0.4")),
            scheme=Scheme(step_sec.get("scheme", "rk2").strip().lower()),
            max_time=float(step_sec.get("max_time", "1.0")),
            max_steps=int(step_sec.get("max_steps", "2000000")),
            resample_every=int(step_sec.get("resample_every", "100")),
            monitor_every=int(step_sec.get("monitor_every", "250")),
            stop_on_embeddedness_loss=_parse_bool(
                step_sec.get("stop_on_embeddedness_loss", "true"),
                "[stepper] stop_on_embeddedness_loss",
            ),
        )
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"[stepper]: {exc}") from exc

    sweep = {}
    for key, raw in sweep_sec.items():
        try:
            sweep[key] = [float(v) for v in raw.split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"[sweep] {key}: {exc}") from exc

    return RunConfig(
        generator=generator,
        forcing=forcing,
        stepper=stepper,
        monitors=_parse_monitors(mon_sec.get("enabled", "all")),
        output=Path(run_sec.get("output", "out")),
        seed=int(run_sec.get("seed", "0")),
        snapshots_to_disk=_parse_bool(run_sec.get("snapshots", "false"),
                                      "[run] snapshots"),
        curve_path=curve_path,
        sweep=sweep,
    )
