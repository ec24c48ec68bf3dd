"""Radial dispersal kernels, their grid stencils, and planar front profiles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, ndimage

KERNEL_KINDS = ("indicator_ball", "custom_radial")

#: Discrete stencil mass must match 1 to this after renormalization.
STENCIL_MASS_TOL = 1e-12
#: Target absolute error for front-profile quadrature.
FRONT_QUAD_TOL = 1e-8
#: Positive-violation threshold for the cap-inequality report (absorbs
#: quadrature noise at the support endpoint where both sides vanish).
CAP_VIOLATION_TOL = 1e-10


class KernelError(ValueError):
    """Kernel specification violates the model assumptions."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error {achieved:.3e})")
        self.achieved = achieved


@dataclass(frozen=True)
class Kernel:
    """Radially symmetric dispersal weight supported in a ball of radius ``radius``.

    ``profile`` maps radial distance to the continuum density, normalized so
    its integral over space is one (exactly for the indicator ball, by
    quadrature for custom profiles).  ``normalization`` is the extra factor
    applied to the midpoint stencil weights so the *discrete* mass is exactly
    one; the two normalizations differ by the midpoint quadrature error.
    """

    kind: str
    radius: float
    dim: int
    profile: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    normalization: float = 1.0


@dataclass(frozen=True)
class ConvolutionStencil:
    """Discrete realization of convolution against the kernel on a uniform grid."""

    offsets: np.ndarray = field(repr=False)  # (n, dim) integer grid offsets
    weights: np.ndarray = field(repr=False)  # (n,) weights summing to 1
    grid_spacing: float = 0.0
    dim: int = 1
    radius: float = 0.0
    dense: np.ndarray = field(repr=False, default=None)  # centered weight array

    @property
    def reach(self) -> int:
        """Largest offset magnitude along one axis, in cells."""
        return (self.dense.shape[0] - 1) // 2


@dataclass(frozen=True)
class FrontKernelProfile:
    """Planar front reduction of the kernel: mass ahead of a half-space edge.

    ``samples[i] = h(s[i])`` on a uniform grid of [-ell, ell]; h is extended by
    1 left of -ell and by 0 right of ell.
    """

    ell: float
    s: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)

    def __call__(self, x):
        return np.interp(x, self.s, self.samples, left=1.0, right=0.0)

    def integral_zero_to_ell(self) -> float:
        """Trapezoid value of the integral of h over [0, ell]."""
        keep = self.s >= 0.0
        return float(np.trapezoid(self.samples[keep], self.s[keep]))


def ball_volume(ell: float, dim: int) -> float:
    return 2.0 * ell if dim == 1 else math.pi * ell * ell


def _quad(f, a: float, b: float, what: str) -> float:
    """Adaptive quadrature with an explicit achieved-error contract."""
    if b <= a:
        return 0.0
    out = integrate.quad(f, a, b, epsabs=1e-12, epsrel=1e-12, limit=200,
                         full_output=1)
    value, abserr = out[0], out[1]
    if len(out) > 3 and abserr > FRONT_QUAD_TOL:
        raise QuadratureError(f"quadrature for {what} did not converge", abserr)
    if abserr > FRONT_QUAD_TOL:
        raise QuadratureError(f"quadrature for {what} above tolerance", abserr)
    return value


def _profile_values(profile, rho: np.ndarray) -> np.ndarray:
    vals = np.asarray(profile(rho), dtype=float)
    if vals.shape != np.shape(rho):
        raise KernelError("custom profile must be vectorized over radii")
    return vals


def build_kernel(kind: str, ell: float, dim: int, grid_spacing: float,
                 profile: Callable[[np.ndarray], np.ndarray] | None = None,
                 ) -> tuple[Kernel, ConvolutionStencil]:
    """Build a normalized kernel and its midpoint convolution stencil.

    Args:
        kind: "indicator_ball" or "custom_radial".
        ell: support radius (> 0).
        dim: ambient dimension, 1 or 2.
        grid_spacing: grid step; must resolve the support (<= ell/4).
        profile: radial density for "custom_radial", vectorized over radii.

    Returns:
        (Kernel, ConvolutionStencil) satisfying the unit-mass invariants.
    """
    if kind not in KERNEL_KINDS:
        raise KernelError(f"unknown kernel kind {kind!r}")
    if ell <= 0:
        raise KernelError("kernel radius must be positive")
    if dim not in (1, 2):
        raise KernelError("dimension must be 1 or 2")
    if grid_spacing <= 0:
        raise KernelError("grid_spacing must be positive")
    if grid_spacing > ell / 4:
        raise KernelError(
            f"grid_spacing {grid_spacing} too coarse for support radius {ell}"
            " (need grid_spacing <= ell/4)")

    if kind == "indicator_ball":
        height = 1.0 / ball_volume(ell, dim)

        def raw(rho, _h=height, _ell=ell):
            return np.where(np.asarray(rho) <= _ell, _h, 0.0)

        continuum_mass = 1.0
    else:
        if profile is None:
            raise KernelError("custom_radial requires a profile")
        rho_check = np.linspace(0.0, ell, 2049)
        vals = _profile_values(profile, rho_check)
        if not np.all(np.isfinite(vals)):
            raise KernelError("custom profile produced non-finite values")
        if np.any(vals < 0):
            raise KernelError("custom profile takes negative values")

        def raw(rho, _p=profile, _ell=ell):
            rho = np.asarray(rho, dtype=float)
            return np.where(rho <= _ell, _profile_values(_p, rho), 0.0)

        if dim == 1:
            continuum_mass = 2.0 * _quad(lambda z: float(raw(z)), 0.0, ell,
                                         "kernel mass")
        else:
            continuum_mass = 2.0 * math.pi * _quad(
                lambda z: float(raw(z)) * z, 0.0, ell, "kernel mass")
        if continuum_mass <= 0:
            raise KernelError("custom profile has zero mass")

    def normalized(rho, _raw=raw, _m=continuum_mass):
        return _raw(rho) / _m

    # Midpoint stencil on offsets with |offset|*dx <= ell (tolerant at the rim).
    m = int(math.floor(ell / grid_spacing * (1 + 1e-12)))
    axis = np.arange(-m, m + 1)
    if dim == 1:
        offsets = axis.reshape(-1, 1)
        radii = np.abs(axis) * grid_spacing
    else:
        ox, oy = np.meshgrid(axis, axis, indexing="ij")
        offsets = np.stack([ox.ravel(), oy.ravel()], axis=1)
        radii = np.hypot(offsets[:, 0], offsets[:, 1]) * grid_spacing
    inside = radii <= ell * (1 + 1e-12)
    offsets = offsets[inside]
    radii = radii[inside]

    cell_volume = grid_spacing ** dim
    raw_weights = _profile_values(normalized, radii) * cell_volume
    if np.any(raw_weights < 0):
        raise KernelError("kernel takes negative values on the stencil")
    discrete_mass = float(raw_weights.sum())
    if discrete_mass <= 0:
        raise KernelError("kernel vanishes on the whole stencil")
    weights = raw_weights / discrete_mass
    normalization = 1.0 / discrete_mass

    _check_radial_symmetry(offsets, weights)

    dense_half = m
    if dim == 1:
        dense = np.zeros(2 * dense_half + 1)
        dense[offsets[:, 0] + dense_half] = weights
    else:
        dense = np.zeros((2 * dense_half + 1, 2 * dense_half + 1))
        dense[offsets[:, 0] + dense_half, offsets[:, 1] + dense_half] = weights

    kernel = Kernel(kind=kind, radius=ell, dim=dim, profile=normalized,
                    normalization=normalization)
    stencil = ConvolutionStencil(offsets=offsets, weights=weights,
                                 grid_spacing=grid_spacing, dim=dim,
                                 radius=ell, dense=dense)
    assert abs(float(stencil.weights.sum()) - 1.0) <= STENCIL_MASS_TOL
    return kernel, stencil


def _check_radial_symmetry(offsets: np.ndarray, weights: np.ndarray) -> None:
    """Weights at symmetric grid points must agree exactly."""
    groups: dict[tuple, float] = {}
    for off, w in zip(offsets, weights):
        key = tuple(sorted(abs(int(o)) for o in off))
        ref = groups.setdefault(key, w)
        if w != ref:
            raise KernelError(f"kernel is not radially symmetric at offset {tuple(off)}")


def convolve_field(stencil: ConvolutionStencil, values: np.ndarray) -> np.ndarray:
    """Direct stencil convolution with zero extension outside the box."""
    values = np.asarray(values, dtype=float)
    if values.ndim != stencil.dim:
        raise ValueError(f"field has {values.ndim} axes, stencil expects {stencil.dim}")
    if stencil.dim == 1:
        return np.convolve(values, stencil.dense, mode="same")
    return ndimage.convolve(values, stencil.dense, mode="constant", cval=0.0)


def convolve_mask(stencil: ConvolutionStencil, mask: np.ndarray) -> np.ndarray:
    """Convolve a binary field; output lies in [0, 1]."""
    mask = np.asarray(mask)
    as_float = mask.astype(float)
    if not np.all((as_float == 0.0) | (as_float == 1.0)):
        raise ValueError("mask values must be 0 or 1")
    return np.clip(convolve_field(stencil, as_float), 0.0, 1.0)


def front_profile(kernel: Kernel, sample_spacing: float | None = None,
                  ) -> FrontKernelProfile:
    """Mass of the kernel ahead of a planar saturated half-space.

    Evaluated by the exact antiderivative for 1-d indicator kernels and by
    adaptive quadrature of the polar reduction otherwise.  Values for negative
    signed distance follow from the reflection identity h(-s) = 1 - h(s).
    """
    ell = kernel.radius
    if sample_spacing is None:
        sample_spacing = ell / 200
    if sample_spacing > ell / 50:
        raise KernelError("sample_spacing must be <= ell/50")
    n_half = int(math.ceil(ell / sample_spacing - 1e-12))
    s_half = np.linspace(0.0, ell, n_half + 1)

    if kernel.dim == 1 and kernel.kind == "indicator_ball":
        h_half = (ell - s_half) / (2.0 * ell)
    else:
        h_half = np.empty_like(s_half)
        for i, s in enumerate(s_half):
            if s >= ell:
                h_half[i] = 0.0
            elif kernel.dim == 1:
                h_half[i] = _quad(lambda z: float(kernel.profile(z)), s, ell,
                                  "front profile")
            else:
                def integrand(rho, _s=s):
                    ang = 2.0 * math.acos(min(_s / rho, 1.0)) if rho > 0 else 0.0
                    return float(kernel.profile(rho)) * rho * ang

                h_half[i] = _quad(integrand, s, ell, "front profile")
        if abs(h_half[0] - 0.5) > 1e-6:
            raise QuadratureError("front profile value at 0 is off 1/2",
                                  abs(h_half[0] - 0.5))

    h_half[-1] = 0.0
    s_full = np.concatenate([-s_half[1:][::-1], s_half])
    h_full = np.concatenate([1.0 - h_half[1:][::-1], h_half])
    h_full = np.clip(h_full, 0.0, 1.0)
    # Quadrature wiggle is below FRONT_QUAD_TOL; a running minimum makes the
    # monotonicity invariant hold exactly.
    h_full = np.minimum.accumulate(h_full)
    return FrontKernelProfile(ell=ell, s=s_full, samples=h_full)


def ball_convolution_on_ray(kernel: Kernel, ball_radius: float,
                            s_values: np.ndarray) -> np.ndarray:
    """K * 1_{B_R} evaluated at radial points |x| = R + s, d = 2 only."""
    if kernel.dim != 2:
        raise KernelError("ball convolution ray is defined for dim 2")
    R = float(ball_radius)
    out = np.empty(len(s_values))
    for i, s in enumerate(np.asarray(s_values, dtype=float)):
        x1 = R + s
        if s >= kernel.radius:
            out[i] = 0.0
            continue

        def integrand(rho, _x1=x1, _R=R):
            if rho <= 0:
                return 0.0
            cos_lim = (_x1 * _x1 + rho * rho - _R * _R) / (2.0 * _x1 * rho)
            if cos_lim >= 1.0:
                return 0.0
            ang = 2.0 * math.acos(max(cos_lim, -1.0))
            return float(kernel.profile(rho)) * rho * ang

        out[i] = _quad(integrand, max(s, 0.0), kernel.radius, "cap inequality")
    return out


@dataclass(frozen=True)
class CapInequalityReport:
    """Worst-case gap between the damped front profile and the ball convolution."""

    delta: float
    radii: tuple[float, ...]
    max_violation: tuple[float, ...]
    least_nonviolating_radius: float | None
    tolerance: float = CAP_VIOLATION_TOL


def check_cap_inequality(kernel: Kernel, delta: float,
                         R_list: Sequence[float],
                         n_samples: int = 81) -> CapInequalityReport:
    """Evaluate (1-delta)*h(|x|-R) <= K*1_{B_R}(x) along a radial ray.

    For each R the report holds the maximum of the left side minus the right
    side over |x| in [R, R+ell]; a value above the tolerance is a violation.
    """
    if kernel.dim != 2:
        raise KernelError("cap inequality check is for dim 2 kernels")
    if not 0.0 < delta < 1.0:
        raise KernelError("delta must lie in (0, 1)")
    radii = [float(R) for R in R_list]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise KernelError("R_list must be strictly increasing")

    profile = front_profile(kernel)
    s_vals = np.linspace(0.0, kernel.radius, n_samples)
    lhs = (1.0 - delta) * profile(s_vals)
    worst = []
    least = None
    for R in radii:
        rhs = ball_convolution_on_ray(kernel, R, s_vals)
        gap = float(np.max(lhs - rhs))
        worst.append(gap)
        if least is None and gap <= CAP_VIOLATION_TOL:
            least = R
    return CapInequalityReport(delta=delta, radii=tuple(radii),
                               max_violation=tuple(worst),
                               least_nonviolating_radius=least)
