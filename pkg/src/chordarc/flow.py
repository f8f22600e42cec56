"""Explicit time integration of dX/dt = (h(t) - kappa) nu on polygons.

Motion is purely normal; mesh quality is maintained by periodic uniform
resampling, which changes parametrisation only.  Because resampling a polygon
unavoidably perturbs its area slightly, maintenance restores the pre-resample
length and area (a homothety plus a uniform normal offset, both at rounding
scale), so the conserved quantity of each forcing family survives long runs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import (
    AdmissionError,
    BlowUpError,
    ChordArcError,
    StiffnessCollapseError,
)
from .forcing import ForcingSpec, evaluate_forcing
from .geometry import (
    DiscreteCurve,
    ensure_positive_orientation,
    integral_kappa_squared,
    is_embedded,
    resample_uniform,
    vertex_frames,
)
from .pairs import min_chord_arc, theta_scan

log = logging.getLogger(__name__)


class Scheme(Enum):
    EXPLICIT_EULER = "euler"
    RK2 = "rk2"

    @property
    def kernel_code(self) -> int:
        return 1 if self is Scheme.RK2 else 0


class TerminalStatus(Enum):
    CLEAN = "clean"
    MAX_STEPS = "max_steps"
    EMBEDDEDNESS_LOST = "embeddedness_lost"
    BLOWUP = "blowup"
    STIFFNESS_COLLAPSE = "stiffness_collapse"
    RESOLUTION_LOSS = "resolution_loss"


@dataclass(frozen=True)
class StepperConfig:
    n: int = 1024
    cfl: float = 0.4
    scheme: Scheme = Scheme.RK2
    max_time: float = 1.0
    max_steps: int = 2_000_000
    resample_every: int = 100
    monitor_every: int = 250
    stop_on_embeddedness_loss: bool = True

    def __post_init__(self):
        if not (0.0 < self.cfl <= 0.5):
            raise ValueError(f"cfl must be in (0, 0.5], got {self.cfl}")
        if self.n < 8 or self.max_steps < 1 or self.resample_every < 1 or self.monitor_every < 1:
            raise ValueError("n, max_steps, resample_every, monitor_every must be positive")
        if self.max_time <= 0.0:
            raise ValueError("max_time must be positive")


@dataclass(frozen=True)
class FlowScalars:
    length: float
    area: float
    h: float
    integral_kappa_sq: float


@dataclass(frozen=True)
class FlowState:
    curve: DiscreteCurve
    time: float
    step_index: int
    scalars: FlowScalars

    @staticmethod
    def from_curve(curve: DiscreteCurve, time: float, step_index: int,
                   spec: ForcingSpec) -> "FlowState":
        return FlowState(
            curve=curve,
            time=time,
            step_index=step_index,
            scalars=FlowScalars(
                length=curve.length,
                area=curve.signed_area,
                h=evaluate_forcing(spec, curve),
                integral_kappa_sq=integral_kappa_squared(curve),
            ),
        )


@dataclass(frozen=True)
class MonitorSample:
    time: float
    ratio_min: float
    theta_min: float
    theta_max: float
    length: float
    area: float
    h: float
    kappa_max: float
    embedded: bool
    integral_kappa_sq: float
    max_turning: float


@dataclass
class Trajectory:
    samples: list[MonitorSample]
    snapshots: list[DiscreteCurve] | None
    terminal: TerminalStatus
    admission_warning: bool
    forcing: ForcingSpec
    config: StepperConfig
    error: str | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.samples])

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples], dtype=float)

    @property
    def embedded_all(self) -> bool:
        return all(s.embedded for s in self.samples)


CSV_COLUMNS = ("time", "ratio_min", "theta_min", "theta_max", "L", "A", "h",
               "kappa_max", "embedded")


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    """Pinned column order; floats use shortest round-trip formatting, so a
    deterministic run writes byte-identical files."""
    with open(path, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for s in traj.samples:
            row = [repr(float(v)) for v in (
                s.time, s.ratio_min, s.theta_min, s.theta_max,
                s.length, s.area, s.h, s.kappa_max,
            )]
            row.append("1" if s.embedded else "0")
            fh.write(",".join(row) + "\n")


def normal_velocity(curve: DiscreteCurve, h: float) -> np.ndarray:
    """Per-vertex normal speed h - kappa_i."""
    return h - vertex_frames(curve).kappa


def cfl_dt(curve: DiscreteCurve, config: StepperConfig, h: float = 0.0) -> float:
    """dt = cfl * ds_min^2, additionally capped so no vertex moves more than
    cfl * ds_min in one step."""
    ds_min = float(np.min(curve.edge_lengths))
    speed = float(np.max(np.abs(normal_velocity(curve, h))))
    return min(config.cfl * ds_min**2, config.cfl * ds_min / max(speed, 1e-12))


def _polygon_scalars(V: np.ndarray):
    e = np.roll(V, -1, axis=0) - V
    el = np.hypot(e[:, 0], e[:, 1])
    length = float(el.sum())
    x, y = V[:, 0], V[:, 1]
    area = float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    return e, el, length, area


def _restore_invariants(curve: DiscreteCurve, length0: float, area0: float,
                        iters: int = 40) -> DiscreteCurve:
    """Uniform normal offset plus homothety restoring (length, area).

    Used after resampling; the corrections are at the resampler's error scale
    (orders of magnitude below the vertex resolution), so geometry is
    unchanged for every monitored purpose.  The two knobs are solved jointly
    by Newton; when they degenerate (near-circles, where offset and scaling
    coincide) the area-first alternation is used instead.
    """
    V = curve.vertices
    for _ in range(iters):
        e, el, length, area = _polygon_scalars(V)
        d_len = length0 - length
        d_area = area0 - area
        if abs(d_area) <= 1e-13 * abs(area0) and abs(d_len) <= 1e-13 * length0:
            break
        u = e / el[:, None]
        du = np.roll(u, 1, axis=0) - u
        chord = e + np.roll(e, 1, axis=0)
        cn = np.hypot(chord[:, 0], chord[:, 1])
        nx = chord[:, 1] / cn
        ny = -chord[:, 0] / cn
        s_len = float(np.sum(du[:, 0] * nx + du[:, 1] * ny))
        s_area = float(0.5 * np.sum(cn))
        det = s_len * 2.0 * area - length * s_area
        shifted = V + np.column_stack((d_area / s_area * nx, d_area / s_area * ny))
        if abs(det) > 1e-3 * (abs(s_len * 2.0 * area) + abs(length * s_area)):
            delta = (2.0 * area * d_len - length * d_area) / det
            mu = (s_len * d_area - s_area * d_len) / det
            shifted = V + np.column_stack((delta * nx, delta * ny))
            factor = 1.0 + mu
        else:
            _, _, l_shift, _ = _polygon_scalars(shifted)
            factor = length0 / l_shift
        c = shifted.mean(axis=0)
        V = c + factor * (shifted - c)
    return DiscreteCurve(V)


def _maintain_mesh(curve: DiscreteCurve, n: int) -> DiscreteCurve:
    length0 = curve.length
    area0 = curve.signed_area
    curve = resample_uniform(curve, n)
    return _restore_invariants(curve, length0, area0)


def step(state: FlowState, spec: ForcingSpec, config: StepperConfig) -> FlowState:
    """One explicit step (plus mesh maintenance every resample_every steps)."""
    X, t, done, status, _, _ = _kernels.integrate_chunk(
        state.curve.vertices, state.time, np.inf, 1,
        config.scheme.kernel_code, spec.kernel_code, spec.constant_value,
        config.cfl,
    )
    if status == _kernels.S_BLOWUP:
        raise BlowUpError("non-finite coordinates during step", last_state=state)
    if status == _kernels.S_STIFF:
        raise StiffnessCollapseError("stable time step underflowed (dt < 1e-16)")
    if status == _kernels.S_UNRESOLVED:
        raise BlowUpError(
            "curvature no longer resolved by the mesh (max|kappa| * ds_min > 1)",
            last_state=state,
        )
    index = state.step_index + 1
    curve = DiscreteCurve(X)
    if index % config.resample_every == 0 or status == _kernels.S_SPREAD:
        curve = _maintain_mesh(curve, config.n)
    return FlowState.from_curve(curve, t, index, spec)


def monitor_sample(curve: DiscreteCurve, t: float, spec: ForcingSpec) -> MonitorSample:
    """All monitored scalars at one time; degrades to NaN fields rather than
    aborting when the curve has left the admissible class."""
    embedded, _ = is_embedded(curve)
    ratio_min = np.nan
    theta_min = np.nan
    theta_max = np.nan
    kappa_max = np.nan
    h = np.nan
    ksq = np.nan
    max_turn = np.nan
    try:
        ratio_min = min_chord_arc(curve)[0]
    except ChordArcError:
        pass
    try:
        sc = theta_scan(curve)
        theta_min, theta_max = sc.theta_min, sc.theta_max
        frames = vertex_frames(curve)
        kappa_max = float(np.max(np.abs(frames.kappa)))
        max_turn = float(np.max(np.abs(curve.turning)))
        ksq = integral_kappa_squared(curve)
        h = evaluate_forcing(spec, curve)
    except ChordArcError:
        pass
    return MonitorSample(
        time=t,
        ratio_min=float(ratio_min),
        theta_min=float(theta_min),
        theta_max=float(theta_max),
        length=curve.length,
        area=curve.signed_area,
        h=float(h),
        kappa_max=kappa_max,
        embedded=embedded,
        integral_kappa_sq=ksq,
        max_turning=max_turn,
    )


def run(initial: DiscreteCurve, spec: ForcingSpec, config: StepperConfig,
        record_snapshots: bool = True) -> Trajectory:
    """Drive the flow, sampling monitors every monitor_every steps.

    Admission: the curve must be embedded (hard requirement); negative
    orientation is fixed silently-but-logged; an initial total local
    curvature below -pi only logs a warning, so the hypothesis boundary can
    be explored.
    """
    curve = ensure_positive_orientation(initial)
    embedded, witness = is_embedded(curve)
    if not embedded:
        raise AdmissionError(f"initial curve self-intersects at edge pair {witness}")
    if curve.n != config.n:
        curve = resample_uniform(curve, config.n)
        embedded, witness = is_embedded(curve)
        if not embedded:
            raise AdmissionError(
                f"curve self-intersects after resampling to n={config.n} "
                f"at edge pair {witness}"
            )

    theta0 = theta_scan(curve)
    admission_warning = bool(theta0.theta_min < -np.pi)
    if admission_warning:
        log.warning(
            "initial total local curvature %.4f lies below -pi; the distance "
            "comparison hypothesis is violated", theta0.theta_min,
        )

    samples: list[MonitorSample] = []
    snapshots: list[DiscreteCurve] | None = [] if record_snapshots else None

    def take_sample(c: DiscreteCurve, t: float) -> MonitorSample:
        s = monitor_sample(c, t, spec)
        samples.append(s)
        if snapshots is not None:
            snapshots.append(c)
        return s

    t = 0.0
    k = 0
    error: str | None = None
    terminal = TerminalStatus.CLEAN
    take_sample(curve, t)
    sampled_at = 0
    while True:
        if t >= config.max_time - 1e-15:
            terminal = TerminalStatus.CLEAN
            break
        if k >= config.max_steps:
            terminal = TerminalStatus.MAX_STEPS
            break
        to_resample = config.resample_every - (k % config.resample_every)
        to_monitor = config.monitor_every - (k % config.monitor_every)
        chunk = min(to_resample, to_monitor, config.max_steps - k)
        X, t, done, status, _, _ = _kernels.integrate_chunk(
            curve.vertices, t, config.max_time, chunk,
            config.scheme.kernel_code, spec.kernel_code, spec.constant_value,
            config.cfl,
        )
        k += done
        try:
            curve = DiscreteCurve(X)
        except ValueError as exc:
            terminal = TerminalStatus.BLOWUP
            error = f"invalid polygon after step {k}: {exc}"
            break
        if status == _kernels.S_BLOWUP:
            terminal = TerminalStatus.BLOWUP
            error = f"non-finite coordinates at step {k}"
            break
        if status == _kernels.S_STIFF:
            terminal = TerminalStatus.STIFFNESS_COLLAPSE
            error = f"time step underflowed at step {k}"
            break
        if status == _kernels.S_UNRESOLVED:
            terminal = TerminalStatus.RESOLUTION_LOSS
            error = f"curvature unresolved by the mesh at step {k}"
            break
        due_resample = done > 0 and k % config.resample_every == 0
        due_monitor = done > 0 and k % config.monitor_every == 0
        # samples are always taken on a freshly uniform mesh so that vertex
        # index k means arc fraction k/n in every snapshot
        if due_resample or due_monitor or status == _kernels.S_SPREAD:
            try:
                curve = _maintain_mesh(curve, config.n)
            except ChordArcError as exc:
                terminal = TerminalStatus.BLOWUP
                error = f"mesh maintenance failed at step {k}: {exc}"
                break
        if due_monitor:
            s = take_sample(curve, t)
            sampled_at = k
            if not s.embedded and config.stop_on_embeddedness_loss:
                terminal = TerminalStatus.EMBEDDEDNESS_LOST
                error = f"self-intersection detected at t={t:.6g}"
                break

    if k != sampled_at:
        take_sample(curve, t)
    return Trajectory(
        samples=samples,
        snapshots=snapshots,
        terminal=terminal,
        admission_warning=admission_warning,
        forcing=spec,
        config=config,
        error=error,
    )
