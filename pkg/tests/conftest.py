"""Shared desk-scale instances for the test-suite."""

import numpy as np
import pytest

from uav_isac.channels import ArrayShape, PropagationParams, realize_channels
from uav_isac.config import build_config
from uav_isac.geometry import NetworkLayout
from uav_isac.sinr import generate_symbols

DESK_ARRAYS = ArrayShape((4, 4), 16, 16)


def random_instance(seed, n_tx=3, n_ue=4, upa=(4, 4), n_symbols=16, with_backhaul=True):
    """Random UAV/UE drop in the 500 m box; returns ``(channels, symbols, rng)``."""
    rng = np.random.default_rng(seed)
    uavs = np.c_[rng.uniform(0, 500, (n_tx, 2)), rng.uniform(50, 200, n_tx)]
    ues = np.c_[rng.uniform(0, 500, (n_ue, 2)), np.zeros(n_ue)]
    layout = NetworkLayout([0, 0, 25], uavs, [125, 250, 125], ues, [250, 375, 0])
    arrays = ArrayShape(tuple(upa), 16, 16)
    ch = realize_channels(layout, PropagationParams(), arrays, seed, with_backhaul=with_backhaul)
    return ch, generate_symbols(seed, n_ue, n_symbols), rng


def random_precoders(rng, shape, power=1.0):
    W = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return W * np.sqrt(power / np.sum(np.abs(W) ** 2))


@pytest.fixture
def desk_config():
    return build_config({"profile": "desk", "power": {"total": "40 dBm"}, "qos": {"gamma": "0 dB"}})


@pytest.fixture
def instance():
    return random_instance(0)


# one (number, title, passed, detail) entry per acceptance criterion
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{num:2d}] {title}: {detail}")
