import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from uav_isac.conic import (
    ConicProgram,
    InfeasibleProgramError,
    SocBlock,
    imag_part_row,
    lift,
    lift_vector,
    real_part_row,
    solve_conic,
    unlift,
)

from oracles import cone_active, projected_gradient_oracle, tiny_program

finite = st.floats(-1e3, 1e3, allow_nan=False)


@given(arrays(np.float64, 8, elements=finite), arrays(np.float64, 8, elements=finite))
def test_lift_round_trip(re, im):
    w = re + 1j * im
    assert np.array_equal(unlift(lift_vector(w)), w)


def test_lift_matrix_and_rows():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    np.testing.assert_allclose(unlift(lift(M) @ lift_vector(w)), M @ w, atol=1e-12)
    c = M[0]
    assert real_part_row(c) @ lift_vector(w) == pytest.approx((c @ w).real)
    assert imag_part_row(c) @ lift_vector(w) == pytest.approx((c @ w).imag)


def test_unit_ball_optimum():
    c = np.random.default_rng(3).standard_normal(6)
    sol = solve_conic(ConicProgram(c, [SocBlock(np.eye(6), np.zeros(6), np.zeros(6), 1.0)]))
    np.testing.assert_allclose(sol.x, c / np.linalg.norm(c), atol=1e-7)
    assert sol.objective == pytest.approx(np.linalg.norm(c), rel=1e-8)


def test_contradictory_cones():
    far = np.full(4, 10.0)
    prog = ConicProgram(np.ones(4), [SocBlock(np.eye(4), np.zeros(4), np.zeros(4), 1.0, "near"),
                                     SocBlock(np.eye(4), -far, np.zeros(4), 1.0, "far")])
    with pytest.raises(InfeasibleProgramError) as info:
        solve_conic(prog)
    assert set(info.value.violated) <= {"near", "far"}


def test_equality_constraints():
    prog = ConicProgram(np.array([1.0, 1.0, 0.0]), [SocBlock(np.eye(3), np.zeros(3), np.zeros(3), 1.0)],
                        sp.csr_matrix([[1.0, -1.0, 0.0]]), np.zeros(1))
    sol = solve_conic(prog)
    np.testing.assert_allclose(sol.x, [2 ** -0.5, 2 ** -0.5, 0], atol=1e-7)
    assert prog.max_residual(sol.x) <= 1e-7


def test_program_validation():
    with pytest.raises(ValueError):
        ConicProgram(np.ones(3), [SocBlock(np.eye(2), np.zeros(2), np.zeros(2), 1.0)])
    with pytest.raises(ValueError):
        ConicProgram(np.array([np.inf]))
    with pytest.raises(ValueError):
        solve_conic(ConicProgram(np.ones(2)))


def test_oracle_programs_exercise_both_cones():
    active = sum(cone_active(*tiny_program(s)) for s in range(20))
    assert 5 <= active <= 15


@pytest.mark.parametrize("seed", range(5))
def test_tiny_program_matches_oracle(seed):
    prog, data = tiny_program(seed)
    got = solve_conic(prog).objective
    ref = projected_gradient_oracle(prog, data)
    assert abs(got - ref) <= 1e-4 * abs(ref)
