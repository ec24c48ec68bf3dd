"""Shared fixtures: benchmark kernels, minimal-speed result, spreading runs."""
from __future__ import annotations

import numpy as np
import pytest

import satspread as ss

from oracles import C_STAR_LINEAR_1D


def seed_plateau(radius: float, ramp: float):
    """Lipschitz compact seed: saturated ball with a linear ramp to zero."""
    return lambda r: np.clip((radius + ramp - r) / ramp, 0.0, 1.0)


@pytest.fixture(scope="session")
def linear_g():
    return ss.linear_growth(1.0)


@pytest.fixture(scope="session")
def bench40():
    return ss.build_kernel("indicator_ball", 1.0, 1, 1.0 / 40)


@pytest.fixture(scope="session")
def bench80():
    return ss.build_kernel("indicator_ball", 1.0, 1, 1.0 / 80)


@pytest.fixture(scope="session")
def front_profile_1d(bench40):
    kernel, _ = bench40
    return ss.front_profile(kernel)


@pytest.fixture(scope="session")
def c_star_result(linear_g, front_profile_1d):
    return ss.find_c_star(linear_g, front_profile_1d)


@pytest.fixture(scope="session")
def minimal_wave(linear_g, front_profile_1d, c_star_result):
    return ss.shoot_profile(c_star_result.c_star, linear_g, front_profile_1d,
                            s_max=2.0)


def _spreading_run(stencil, growth, dt):
    t_end = 30.0 / C_STAR_LINEAR_1D
    u0 = ss.grid_field(40.0, stencil.grid_spacing, 1, seed_plateau(2.0, 0.5))
    params = ss.ModelParams(model="singular", dt=dt, t_end=t_end)
    return ss.run(u0, params, stencil, growth, snapshot_interval=1.0)


@pytest.fixture(scope="session")
def spreading_run_40(bench40, linear_g):
    _, stencil = bench40
    return _spreading_run(stencil, linear_g, dt=0.0125)


@pytest.fixture(scope="session")
def spreading_run_80(bench80, linear_g):
    _, stencil = bench80
    return _spreading_run(stencil, linear_g, dt=0.00625)
