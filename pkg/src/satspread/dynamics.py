"""Time integration of the pressure-limited growth models on uniform grids."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvariantViolation
from .growth import GrowthLaw
from .kernels import ConvolutionStencil, convolve_field

MODEL_KINDS = ("gamma", "singular", "generalized_singular")

#: Safety factor in the explicit-Euler step cap.
_CAP_FACTOR = 0.1


@dataclass
class GridField:
    """Density sample on a uniform grid over a box, values kept in [0, 1]."""

    values: np.ndarray
    spacing: float
    origin: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.origin = np.atleast_1d(np.asarray(self.origin, dtype=float))
        if self.values.ndim not in (1, 2):
            raise ValueError("fields must be 1-d or 2-d")
        if len(self.origin) != self.values.ndim:
            raise ValueError("origin length must match field dimension")
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise ValueError("field values must lie in [0, 1]")

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def axis_coords(self, axis: int = 0) -> np.ndarray:
        return self.origin[axis] + self.spacing * np.arange(self.shape[axis])

    def coords(self) -> np.ndarray:
        """Cell-center coordinates, shape ``shape + (dim,)``."""
        axes = [self.axis_coords(a) for a in range(self.dim)]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack(grids, axis=-1)

    def radii(self) -> np.ndarray:
        """Distance of each cell center from the coordinate origin."""
        return np.linalg.norm(self.coords(), axis=-1)

    def copy(self) -> "GridField":
        return GridField(self.values.copy(), self.spacing, self.origin.copy(),
                         self.time)


def grid_field(box_radius: float, spacing: float, dim: int,
               fn: Callable[[np.ndarray], np.ndarray] | None = None,
               time: float = 0.0) -> GridField:
    """Symmetric box [-R, R]^dim sampled at cell centers; ``fn`` maps radius to density."""
    n = int(round(box_radius / spacing))
    if n < 1:
        raise ValueError("box must contain at least one cell per side")
    origin = np.full(dim, -n * spacing)
    shape = (2 * n + 1,) * dim
    out = GridField(np.zeros(shape), spacing, origin, time)
    if fn is not None:
        out.values = np.clip(np.asarray(fn(out.radii()), dtype=float), 0.0, 1.0)
    return out


@dataclass(frozen=True)
class ModelParams:
    """Model selection and stepping parameters."""

    model: str
    dt: float
    t_end: float
    gamma: float | None = None
    saturation_eps: float = 0.0

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.model == "gamma":
            if self.gamma is None or self.gamma < 1:
                raise ValueError("gamma model requires gamma >= 1")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if not 0.0 <= self.saturation_eps <= 1e-6:
            raise ValueError("saturation_eps must lie in [0, 1e-6]")


def stability_cap(params: ModelParams | str, growth: GrowthLaw,
                  gamma: float | None = None) -> float:
    """Largest admissible explicit step for the chosen model."""
    model = params if isinstance(params, str) else params.model
    if not isinstance(params, str):
        gamma = params.gamma
    L = growth.lipschitz
    if model == "gamma":
        return min(_CAP_FACTOR / L, _CAP_FACTOR / (gamma * L))
    rate = growth.sup
    if model == "generalized_singular":
        if growth.gain is None:
            raise ValueError("generalized model requires a gain law")
        rate = growth.sup + growth.gain.sup
    return _CAP_FACTOR / max(L, rate)


def saturated_mask(values: np.ndarray, saturation_eps: float = 0.0) -> np.ndarray:
    return np.asarray(values) >= 1.0 - saturation_eps


def rhs_gamma(u: GridField, stencil: ConvolutionStencil, growth: GrowthLaw,
              gamma: float) -> np.ndarray:
    """Right-hand side of the finite-pressure model with p = u**gamma."""
    if gamma < 1:
        raise ValueError("gamma must be >= 1")
    p = u.values ** gamma
    g = np.asarray(growth(u.values), dtype=float)
    conv_p = np.clip(convolve_field(stencil, p), 0.0, 1.0)
    conv_gp = convolve_field(stencil, g * p)
    return (g * (1.0 - conv_p) + conv_gp) * (1.0 - p)


def rhs_singular(u: GridField, stencil: ConvolutionStencil, growth: GrowthLaw,
                 saturation_eps: float = 0.0,
                 generalized: bool = False) -> np.ndarray:
    """Right-hand side of the saturated-dispersal model; zero on the saturated set."""
    mask = saturated_mask(u.values, saturation_eps)
    conv = np.clip(convolve_field(stencil, mask.astype(float)), 0.0, 1.0)
    g = np.asarray(growth(u.values), dtype=float)
    if generalized:
        if growth.gain is None:
            raise ValueError("generalized model requires a gain law")
        bracket = g + np.asarray(growth.gain(u.values), dtype=float) * conv
    else:
        bracket = g * (1.0 - conv) + growth.g1 * conv
    return bracket * (1.0 - mask)


def model_rhs(u: GridField, params: ModelParams, stencil: ConvolutionStencil,
              growth: GrowthLaw) -> np.ndarray:
    if params.model == "gamma":
        return rhs_gamma(u, stencil, growth, params.gamma)
    return rhs_singular(u, stencil, growth, params.saturation_eps,
                        generalized=params.model == "generalized_singular")


def step(u: GridField, params: ModelParams, stencil: ConvolutionStencil,
         growth: GrowthLaw, dt: float | None = None,
         ) -> tuple[GridField, np.ndarray]:
    """One clamped explicit Euler step.

    Returns the advanced field and the boolean mask of cells clamped at the
    ceiling on this step.  Clamping realizes the constraint u <= 1 exactly and
    is what drives cells into the saturated set in finite time.
    """
    dt = params.dt if dt is None else dt
    cap = stability_cap(params, growth)
    if dt > cap * (1 + 1e-12):
        raise ValueError(f"dt={dt} exceeds the stability cap {cap:.6g}")
    if stencil.grid_spacing != u.spacing:
        raise ValueError("stencil and field grid spacing differ")
    rhs = model_rhs(u, params, stencil, growth)
    proposed = u.values + dt * rhs
    clamped = proposed > 1.0
    new_values = np.minimum(proposed, 1.0)
    return GridField(new_values, u.spacing, u.origin, u.time + dt), clamped


@dataclass
class RunResult:
    """Trajectory summary with snapshots, masks and invariant monitors."""

    final: GridField
    saturation_time: np.ndarray
    times: list[float]
    snapshots: list[np.ndarray]
    masks: list[np.ndarray]
    clamped_total: int
    monitors: dict[str, float]

    @property
    def initial(self) -> np.ndarray:
        return self.snapshots[0]


def run(u0: GridField, params: ModelParams, stencil: ConvolutionStencil,
        growth: GrowthLaw, snapshot_interval: float | None = None,
        observers: Sequence[Callable[[GridField], None]] = (),
        record_lipschitz: bool = False) -> RunResult:
    """Advance the model to t_end, recording snapshots and invariant monitors.

    Snapshots are taken at t = 0, every ``snapshot_interval`` time units, and
    at the final time.  Saturation times use the first-crossing convention:
    the recorded time is the end of the step on which a cell first reaches
    the (eps-adjusted) ceiling.
    """
    if stencil.grid_spacing != u0.spacing:
        raise ValueError("stencil and field grid spacing differ")
    cap = stability_cap(params, growth)
    if params.dt > cap * (1 + 1e-12):
        raise ValueError(f"dt={params.dt} exceeds the stability cap {cap:.6g}")

    u = u0.copy()
    eps = params.saturation_eps
    sat = saturated_mask(u.values, eps)
    sat_time = np.where(sat, 0.0, np.inf)

    monitors = {"min_u": float(u.values.min()), "max_u": float(u.values.max()),
                "max_rhs": 0.0, "time_monotonicity_gap": 0.0,
                "mask_monotonicity_violations": 0.0, "max_lipschitz": 0.0}
    if record_lipschitz:
        monitors["max_lipschitz"] = discrete_lipschitz(u)

    times = [u.time]
    snapshots = [u.values.copy()]
    masks = [sat.copy()]
    for obs in observers:
        obs(u)

    n_full = int(math.floor(params.t_end / params.dt + 1e-12))
    remainder = params.t_end - n_full * params.dt
    if remainder < 1e-12 * params.dt:
        remainder = 0.0
    next_snapshot = snapshot_interval if snapshot_interval else math.inf

    clamped_total = 0
    for k in range(n_full + (1 if remainder else 0)):
        dt_k = params.dt if k < n_full else remainder
        rhs = model_rhs(u, params, stencil, growth)
        proposed = u.values + dt_k * rhs
        clamped_total += int(np.count_nonzero(proposed > 1.0))
        new_values = np.minimum(proposed, 1.0)

        monitors["max_rhs"] = max(monitors["max_rhs"], float(rhs.max(initial=0.0)))
        gap = float((u.values - new_values).max(initial=0.0))
        monitors["time_monotonicity_gap"] = max(monitors["time_monotonicity_gap"], gap)

        u = GridField(new_values, u.spacing, u.origin, u.time + dt_k)
        new_sat = saturated_mask(u.values, eps)
        if np.any(sat & ~new_sat):
            monitors["mask_monotonicity_violations"] += float(
                np.count_nonzero(sat & ~new_sat))
        newly = new_sat & ~sat
        sat_time[newly] = u.time
        sat = new_sat

        monitors["min_u"] = min(monitors["min_u"], float(u.values.min()))
        monitors["max_u"] = max(monitors["max_u"], float(u.values.max()))
        if record_lipschitz:
            monitors["max_lipschitz"] = max(monitors["max_lipschitz"],
                                            discrete_lipschitz(u))

        is_last = k == n_full + (1 if remainder else 0) - 1
        if u.time >= next_snapshot - 1e-12 or is_last:
            times.append(u.time)
            snapshots.append(u.values.copy())
            masks.append(sat.copy())
            for obs in observers:
                obs(u)
            while next_snapshot <= u.time + 1e-12:
                next_snapshot += snapshot_interval

    if monitors["min_u"] < 0.0 or monitors["max_u"] > 1.0:
        raise InvariantViolation("density left [0, 1] during the run")
    return RunResult(final=u, saturation_time=sat_time, times=times,
                     snapshots=snapshots, masks=masks,
                     clamped_total=clamped_total, monitors=monitors)


def saturation_time_map(result: RunResult) -> np.ndarray:
    """Per-cell first saturation time; +inf marks never-saturated cells."""
    return result.saturation_time.copy()


def obstacle_residual(u_before: GridField, u_after: GridField, dt: float,
                      stencil: ConvolutionStencil, growth: GrowthLaw,
                      saturation_eps: float = 0.0) -> np.ndarray:
    """Max-form residual of the constrained evolution across one accepted step.

    The evolution bracket is evaluated at the post-step state, so the residual
    measures the combined time/space discretization error instead of the
    identically-zero defect of the explicit update itself.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    du = (u_after.values - u_before.values) / dt
    mask = saturated_mask(u_after.values, saturation_eps)
    conv = np.clip(convolve_field(stencil, mask.astype(float)), 0.0, 1.0)
    g = np.asarray(growth(u_after.values), dtype=float)
    bracket = g * (1.0 - conv) + growth.g1 * conv
    return np.maximum(u_after.values - 1.0, du - bracket)


def discrete_lipschitz(u: GridField) -> float:
    """Largest absolute slope between adjacent cells."""
    worst = 0.0
    for axis in range(u.dim):
        if u.shape[axis] > 1:
            worst = max(worst, float(np.max(np.abs(np.diff(u.values, axis=axis)))))
    return worst / u.spacing


def gradient_tv_surrogate(stencil: ConvolutionStencil) -> float:
    """Total variation of the kernel gradient measured on the discrete stencil."""
    density = stencil.dense / stencil.grid_spacing ** stencil.dim
    padded = np.pad(density, 1)
    total = 0.0
    for axis in range(stencil.dim):
        total += float(np.sum(np.abs(np.diff(padded, axis=axis))))
    return total * stencil.grid_spacing ** (stencil.dim - 1)


def local_production(u: GridField, stencil: ConvolutionStencil,
                     growth: GrowthLaw, gamma: float) -> np.ndarray:
    """Local birth term of the finite-pressure model, g(u)(1 - K*p).

    The full right-hand side differs from it by a rearrangement operator whose
    grid sum vanishes by stencil symmetry, so summing this term tracks the
    total mass produced per unit time.
    """
    p = u.values ** gamma
    conv_p = np.clip(convolve_field(stencil, p), 0.0, 1.0)
    return np.asarray(growth(u.values), dtype=float) * (1.0 - conv_p)
