import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uav_isac.channels import ArrayShape, PropagationParams
from uav_isac.geometry import NetworkLayout
from uav_isac.pso import (
    PositionProblem,
    SwarmConfig,
    optimize_positions,
    particle_swarm,
    position_feasible,
    position_utility,
    project_to_box,
    separation_shortfall,
)
from uav_isac.sinr import generate_symbols

LO = np.array([0.0, 0.0, 20.0])
HI = np.array([500.0, 500.0, 200.0])


def _problem(uavs, n_ue=4, gamma=1.0, seed=0, qos_penalty=True):
    rng = np.random.default_rng(seed)
    ues = np.c_[rng.uniform(0, 500, (n_ue, 2)), np.zeros(n_ue)]
    layout = NetworkLayout([0, 0, 25], uavs, [125, 250, 125], ues, [250, 375, 0])
    return PositionProblem(layout, PropagationParams(), ArrayShape((4, 4), 16, 16), seed,
                           generate_symbols(seed, n_ue, 16), gamma, 1.0, qos_penalty=qos_penalty)


def test_project_examples():
    assert np.array_equal(project_to_box([10, 20, 30], LO, HI), [10, 20, 30])
    assert np.array_equal(project_to_box([-10, 600, 250], LO, HI), [0, 500, 200])


@given(st.tuples(*[st.floats(-1e4, 1e4)] * 3))
def test_project_idempotent(p):
    once = project_to_box(p, LO, HI)
    assert np.array_equal(project_to_box(once, LO, HI), once)
    assert np.all(once >= LO) and np.all(once <= HI)


def test_separation_shortfall():
    assert separation_shortfall([[0, 0, 100], [0, 0, 100]], 5.0) == 5.0
    assert separation_shortfall([[0, 0, 100], [0, 3, 100], [0, 100, 100]], 5.0) == 2.0
    assert separation_shortfall([[0, 0, 100]], 5.0) == 0.0


def test_colocated_penalty():
    a = _problem([[250, 250, 125], [250, 250, 125]], n_ue=0, gamma=0.0)
    b = _problem([[250, 250, 125], [250, 240, 125]], n_ue=0, gamma=0.0)
    ua = position_utility(a.layout.uavs, a)
    ub = position_utility(b.layout.uavs, b)
    assert ub - ua == pytest.approx(5.0 * 1e3, rel=1e-3)
    assert not position_feasible(a.layout.uavs, a)
    assert position_feasible(b.layout.uavs, b)


def test_utility_deterministic():
    p = _problem([[100, 100, 120], [300, 200, 80], [400, 400, 150]])
    assert position_utility(p.layout.uavs, p) == position_utility(p.layout.uavs.copy(), p)


def test_utility_grows_when_lone_uav_approaches_target():
    p = _problem([[250, 375, 0 + 200]], n_ue=0, gamma=0.0)
    # slant ranges measured from the target at (250, 375, 0)
    far = np.array([[250 + np.sqrt(400 ** 2 - 150 ** 2), 375, 150]])
    near = np.array([[250 + np.sqrt(200 ** 2 - 150 ** 2), 375, 150]])
    assert position_utility(near, p) > position_utility(far, p)


def test_single_particle_zero_velocity_returns_start():
    start = np.array([600.0, 100.0, 10.0])
    res = particle_swarm(lambda x: -np.sum(x ** 2), LO, HI, SwarmConfig(swarm_size=1, max_iter=20),
                         np.random.default_rng(0), initial=start)
    assert np.array_equal(res.best, project_to_box(start, LO, HI))


@pytest.mark.parametrize("seed", range(3))
def test_sphere_converges(seed):
    target = LO + np.random.default_rng(100 + seed).random(3) * (HI - LO)
    res = particle_swarm(lambda p: -float(np.sum((p - target) ** 2)), LO, HI, SwarmConfig(),
                         np.random.default_rng(seed))
    assert np.linalg.norm(res.best - target) < 1.0
    assert all(b >= a for a, b in zip(res.trace, res.trace[1:]))
    assert res.iterations <= 50


def test_swarm_deterministic():
    f = lambda p: -float(np.sum((p - 100.0) ** 2))
    a = particle_swarm(f, LO, HI, SwarmConfig(), np.random.default_rng(5))
    b = particle_swarm(f, LO, HI, SwarmConfig(), np.random.default_rng(5))
    assert np.array_equal(a.best, b.best) and a.trace == b.trace


def test_swarm_feasible_filter():
    # unconstrained optimum at the origin corner is declared infeasible
    res = particle_swarm(lambda p: -float(np.sum((p - LO) ** 2)), LO, HI, SwarmConfig(),
                         np.random.default_rng(1), feasible=lambda p: p[0] >= 100.0)
    assert res.found_feasible and res.best[0] >= 100.0


def test_swarm_config_validation():
    with pytest.raises(ValueError):
        SwarmConfig(swarm_size=0)
    with pytest.raises(ValueError):
        SwarmConfig(inertia=0.0)
    with pytest.raises(ValueError):
        particle_swarm(lambda p: 0.0, HI, LO, SwarmConfig(), np.random.default_rng(0))


def test_optimize_positions_respects_box_and_separation():
    p = _problem([[250, 250, 125], [250, 125, 125], [375, 375, 125]], seed=3)
    res = optimize_positions(p, SwarmConfig(swarm_size=10, max_iter=10), np.random.default_rng(0))
    assert res.best.shape == (3, 3)
    assert np.all(res.best >= LO) and np.all(res.best <= HI)
    assert separation_shortfall(res.best, p.d_min) == 0.0
    assert all(b >= a for a, b in zip(res.trace, res.trace[1:]))
    assert res.utility >= position_utility(p.layout.uavs, p) or not position_feasible(p.layout.uavs, p)


def test_backhaul_penalty_only_bites_when_short():
    base = _problem([[100, 100, 120], [300, 200, 80], [400, 400, 150]], gamma=1e-3)
    ample = _problem([[100, 100, 120], [300, 200, 80], [400, 400, 150]], gamma=1e-3)
    ample.p_bs = 1e6
    starved = _problem([[100, 100, 120], [300, 200, 80], [400, 400, 150]], gamma=1e-3)
    starved.p_bs = 1e-12
    u = position_utility(base.layout.uavs, base)
    assert position_utility(base.layout.uavs, ample) == u
    assert position_utility(base.layout.uavs, starved) < u - 1e3
    # a backhaul shortfall steers the swarm but never filters the returned best
    assert position_feasible(base.layout.uavs, starved) == position_feasible(base.layout.uavs, base)
