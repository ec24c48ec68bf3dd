"""Traveling-wave profiles via shooting and the minimal speed via sign bisection."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketError, ScientificError
from .growth import GrowthLaw
from .kernels import FrontKernelProfile

#: Default fixed step of the fourth-order integrator, as a fraction of ell.
DEFAULT_STEP_FRACTION = 1.0 / 2000
#: Default bracket-width tolerance of the speed bisection.
DEFAULT_SPEED_TOL = 1e-8
#: |phi(ell)| below this marks a profile as the minimal (semi-compact) wave.
_MINIMAL_TOL = 1e-6


@dataclass(frozen=True)
class WaveProfile:
    """Wave profile phi(s) on [0, s_max] with phi = 1 for s <= 0.

    Values may go negative past a sign change; that excursion is the signal
    the speed bisection keys on, not a usable density.
    """

    c: float
    s: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    ell: float = 0.0
    phi_at_ell: float = 0.0

    @property
    def sign_at_ell(self) -> int:
        if self.phi_at_ell > 0:
            return 1
        return -1 if self.phi_at_ell < 0 else 0

    def __call__(self, x):
        return np.interp(x, self.s, self.phi, left=1.0, right=self.phi[-1])


@dataclass(frozen=True)
class MinimalSpeedResult:
    """Minimal spreading speed with its certified bracket and analytic bounds."""

    c_star: float
    bracket: tuple[float, float]
    tol: float
    analytic_bounds: tuple[float, float]
    phi_ell_lo: float
    phi_ell_hi: float
    interior_min: float
    ode_step: float


def _extended(growth: GrowthLaw, y: float) -> float:
    # Constant extension outside [0, 1]: zero below, g(1) above.
    if y <= 0.0:
        return 0.0
    if y >= 1.0:
        return growth.g1
    return float(growth(y))


def shoot_profile(c: float, growth: GrowthLaw, profile: FrontKernelProfile,
                  s_max: float | None = None,
                  ode_step: float | None = None) -> WaveProfile:
    """Integrate the profile equation -c phi' = g(phi) + (g(1)-g(phi)) h(s).

    Classical fourth-order single-step integration with a fixed step chosen so
    that s = ell lands exactly on a node.  Integration continues past a sign
    change; only the sign at ell matters below the minimal speed.
    """
    ell = profile.ell
    if c <= 0:
        raise ValueError("wave speed must be positive")
    if s_max is None:
        s_max = 2.0 * ell
    if s_max < ell:
        raise ValueError("s_max must reach at least ell")
    if ode_step is None:
        ode_step = ell * DEFAULT_STEP_FRACTION
    if ode_step > ell / 200:
        raise ValueError("ode_step must be <= ell/200")

    per_ell = int(math.ceil(ell / ode_step - 1e-12))
    step = ell / per_ell
    n = int(math.ceil(s_max / step - 1e-12))
    s = step * np.arange(n + 1)
    h_nodes = profile(s)
    h_mids = profile(s[:-1] + 0.5 * step)

    g1 = growth.g1
    inv_c = 1.0 / c
    phi = np.empty(n + 1)
    phi[0] = 1.0
    y = 1.0
    for j in range(n):
        h0 = h_nodes[j]
        hm = h_mids[j]
        h1 = h_nodes[j + 1]
        g = _extended(growth, y)
        k1 = -(g + (g1 - g) * h0) * inv_c
        ym = y + 0.5 * step * k1
        g = _extended(growth, ym)
        k2 = -(g + (g1 - g) * hm) * inv_c
        ym = y + 0.5 * step * k2
        g = _extended(growth, ym)
        k3 = -(g + (g1 - g) * hm) * inv_c
        ye = y + step * k3
        g = _extended(growth, ye)
        k4 = -(g + (g1 - g) * h1) * inv_c
        y += step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        phi[j + 1] = y

    return WaveProfile(c=c, s=s, phi=phi, ell=ell,
                       phi_at_ell=float(phi[per_ell]))


def find_c_star(growth: GrowthLaw, profile: FrontKernelProfile,
                tol: float = DEFAULT_SPEED_TOL,
                ode_step: float | None = None) -> MinimalSpeedResult:
    """Bisect the sign of phi_c(ell) between the analytic speed bounds.

    The lower bound g(1) * int_0^ell h and the upper bound ell * sup g are
    strict, so the profile must cross zero left of ell at the lower end and
    stay positive at the upper end; anything else indicates a growth law
    outside the assumptions or an under-resolved front profile.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if not growth.monotone_cap:
        raise ValueError("minimal-speed search requires the growth cap g(u) <= g(1)")
    ell = profile.ell
    c_lo = growth.g1 * profile.integral_zero_to_ell()
    c_hi = ell * growth.sup
    if not 0 < c_lo < c_hi:
        raise BracketError(f"degenerate analytic bounds ({c_lo}, {c_hi})")

    def phi_ell(c: float) -> float:
        return shoot_profile(c, growth, profile, s_max=ell,
                             ode_step=ode_step).phi_at_ell

    phi_lo = phi_ell(c_lo)
    phi_hi = phi_ell(c_hi)
    if not (phi_lo < 0.0 < phi_hi):
        raise BracketError(
            "bracket failure: phi(ell) = "
            f"{phi_lo:.6g} at c={c_lo:.6g} and {phi_hi:.6g} at c={c_hi:.6g}")
    bounds = (c_lo, c_hi)

    while c_hi - c_lo > tol:
        mid = 0.5 * (c_lo + c_hi)
        phi_mid = phi_ell(mid)
        if phi_mid > 0.0:
            c_hi, phi_hi = mid, phi_mid
        else:
            c_lo, phi_lo = mid, phi_mid
    c_star = 0.5 * (c_lo + c_hi)

    wave = shoot_profile(c_star, growth, profile, s_max=ell, ode_step=ode_step)
    interior = wave.phi[(wave.s > 0.0) & (wave.s < ell)]
    interior_min = float(interior.min())
    if interior_min <= 0.0:
        raise ScientificError(
            f"minimal profile not positive inside (0, ell): min {interior_min:.3e}")
    return MinimalSpeedResult(c_star=c_star, bracket=(c_lo, c_hi), tol=tol,
                              analytic_bounds=bounds, phi_ell_lo=phi_lo,
                              phi_ell_hi=phi_hi, interior_min=interior_min,
                              ode_step=ode_step if ode_step is not None
                              else ell * DEFAULT_STEP_FRACTION)


def monotone_in_c_check(c0: float, c1: float, growth: GrowthLaw,
                        profile: FrontKernelProfile,
                        ode_step: float | None = None) -> tuple[bool, float]:
    """Check strict ordering phi_{c1} > phi_{c0} where the slower profile is nonnegative.

    Returns the verdict together with the minimum pointwise gap on (0, s0],
    where s0 <= ell is the extent of the nonnegative region of phi_{c0}.
    """
    if not 0 < c0 < c1:
        raise ValueError("speeds must satisfy 0 < c0 < c1")
    slow = shoot_profile(c0, growth, profile, s_max=profile.ell, ode_step=ode_step)
    fast = shoot_profile(c1, growth, profile, s_max=profile.ell, ode_step=ode_step)
    nonneg = slow.phi >= 0.0
    if not nonneg[0]:
        raise ValueError("slower profile is negative at the origin")
    upto = len(nonneg) if nonneg.all() else int(np.argmin(nonneg))
    gaps = fast.phi[1:upto] - slow.phi[1:upto]
    if gaps.size == 0:
        return True, 0.0
    min_gap = float(gaps.min())
    return min_gap > 0.0, min_gap


def sample_wave(profile: WaveProfile, signed_distance, minimal: bool | None = None):
    """Evaluate the profile as a density: clamped to [0, 1], semi-compact if minimal."""
    if minimal is None:
        minimal = abs(profile.phi_at_ell) <= _MINIMAL_TOL
    s = np.asarray(signed_distance, dtype=float)
    vals = np.interp(s, profile.s, profile.phi, left=1.0, right=0.0)
    if minimal:
        vals = np.where(s >= profile.ell, 0.0, vals)
    return np.clip(vals, 0.0, 1.0)


def export_wave(profile: WaveProfile, direction, offset: float,
                minimal: bool | None = None):
    """Planar sampler x -> phi(x . e - offset), usable as initial or comparison data.

    ``direction`` must be a unit vector; pass a scalar +-1 in one dimension.
    For the minimal-speed profile the sampler vanishes at signed distance ell
    and beyond.
    """
    e = np.atleast_1d(np.asarray(direction, dtype=float))
    norm = float(np.linalg.norm(e))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")

    def sampler(points):
        pts = np.asarray(points, dtype=float)
        if e.size == 1 and pts.ndim <= 1:
            s = pts * e[0] - offset
        elif pts.ndim >= 1 and pts.shape[-1] == e.size:
            s = np.tensordot(pts, e, axes=([-1], [0])) - offset
        else:
            raise ValueError("points must carry one coordinate per direction axis")
        return sample_wave(profile, s, minimal=minimal)

    return sampler
