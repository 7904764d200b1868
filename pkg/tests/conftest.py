"""Shared fixtures: atomic data and solved modes are session-scoped because
the HE11 solve and its power normalization are the slowest pieces reused by
nearly every physics test.
"""
import numpy as np
import pytest

from nanotrap import atom_cs, fiber_mode, light_matter


@pytest.fixture(scope="session")
def data():
    return atom_cs.default_atomic_data()


@pytest.fixture(scope="session")
def fiber():
    return fiber_mode.FiberSpec(radius=250e-9)


@pytest.fixture(scope="session")
def modes(fiber):
    return {
        nm: fiber_mode.solve_he11(fiber, nm * 1e-9)
        for nm in (783, 852.347, 880.2524, 1064)
    }


@pytest.fixture(scope="session")
def probe_field(modes):
    return fiber_mode.LightField(mode=modes[852.347], power=4e-12, polarization_angle=0.0)


@pytest.fixture(scope="session")
def trap_config(fiber, modes, data):
    blue = fiber_mode.LightField(
        mode=modes[783], power=8.5e-3, polarization_angle=np.pi / 2
    )
    red = fiber_mode.LightField(
        mode=modes[1064],
        power=0.77e-3,
        polarization_angle=0.0,
        configuration="standing",
        backward_power=0.77e-3,
    )
    return light_matter.TrapConfig(fiber=fiber, blue=blue, red=red, c3=data.c3_ground_jm3)


@pytest.fixture(scope="session")
def trap_minimum(trap_config):
    return light_matter.find_trap_minimum(trap_config)


@pytest.fixture(scope="session")
def manipulation_field(modes):
    return fiber_mode.LightField(mode=modes[880.2524], power=100e-6, polarization_angle=0.0)
