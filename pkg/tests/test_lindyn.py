import numpy as np
import pytest
from scipy.linalg import expm

from cyclicvdp import (
    LtvSystem,
    NotMetzler,
    NumericalAbort,
    OrderOutOfRange,
    ShapeError,
    StepTooLarge,
    ZeroInitialCondition,
    check_positivity_condition,
    compound_transition,
    in_M_plus,
    mult_compound,
    simulate,
    transition_matrix,
    verify_cvds,
)

from cases import CYCLE_3, CYCLE_3_X0, RING_5, RING_5_X0, cycle_3_closed_form
from oracles import expm_taylor, random_q_plus


class TestTransitionMatrix:
    def test_identity_at_start(self):
        sys = LtvSystem.constant(RING_5)
        np.testing.assert_array_equal(transition_matrix(sys, 0.0, 0.0, 1e-3), np.eye(5))

    def test_first_order_expansion(self):
        A = np.array([[0.3, 1.2], [0.8, -0.4]])
        d = 1e-3
        phi = transition_matrix(LtvSystem.constant(A), 0.0, d, d / 4)
        np.testing.assert_allclose(phi, np.eye(2) + d * A, atol=5 * d * d)

    def test_matches_series_squaring_oracle(self):
        phi = transition_matrix(LtvSystem.constant(RING_5), 0.0, 0.1, 1e-3)
        ref = expm_taylor(RING_5 * 0.1)
        assert np.abs(phi - ref).max() <= 1e-8 * max(1.0, np.abs(ref).max())
        np.testing.assert_allclose(phi, expm(RING_5 * 0.1), rtol=1e-8, atol=1e-10)

    def test_step_too_large(self):
        with pytest.raises(StepTooLarge):
            transition_matrix(LtvSystem.constant(RING_5), 0.0, 0.01, 0.02)

    def test_cocycle_constant(self):
        sys = LtvSystem.constant(RING_5)
        p10 = transition_matrix(sys, 0.0, 0.3, 1e-3)
        p21 = transition_matrix(sys, 0.3, 0.7, 1e-3)
        p20 = transition_matrix(sys, 0.0, 0.7, 1e-3)
        assert np.abs(p21 @ p10 - p20).max() < 1e-7

    def test_cocycle_piecewise(self):
        A1 = np.array([[0.0, 1.0], [1.0, 0.0]])
        A2 = np.array([[-0.5, 2.0], [0.3, -0.1]])
        sys = LtvSystem.piecewise_constant([0.5], [A1, A2])
        p10 = transition_matrix(sys, 0.0, 0.4, 1e-3)
        p21 = transition_matrix(sys, 0.4, 1.0, 1e-3)
        p20 = transition_matrix(sys, 0.0, 1.0, 1e-3)
        assert np.abs(p21 @ p10 - p20).max() < 1e-7
        # exact reference: one exponential per piece
        ref = expm(A2 * 0.5) @ expm(A1 * 0.5)
        np.testing.assert_allclose(p20, ref, atol=1e-9)

    def test_sampled_hold_matches_piecewise(self):
        A1 = np.array([[0.0, 1.0], [1.0, 0.0]])
        A2 = np.array([[-0.5, 2.0], [0.3, -0.1]])
        held = LtvSystem.sampled([0.0, 0.5], [A1, A2], interpolation="hold")
        pieces = LtvSystem.piecewise_constant([0.5], [A1, A2])
        p_held = transition_matrix(held, 0.0, 1.0, 1e-3)
        p_pieces = transition_matrix(pieces, 0.0, 1.0, 1e-3)
        np.testing.assert_allclose(p_held, p_pieces, atol=1e-12)

    def test_sampled_linear_interpolation(self):
        A1 = np.zeros((2, 2))
        A2 = np.array([[0.0, 2.0], [2.0, 0.0]])
        sys = LtvSystem.sampled([0.0, 1.0], [A1, A2], interpolation="linear")
        np.testing.assert_allclose(sys.generator(0.5), A2 * 0.5)
        phi = transition_matrix(sys, 0.0, 1.0, 1e-3)
        # A(t) = t*A2 commutes with itself, so phi = expm(A2/2)
        np.testing.assert_allclose(phi, expm(A2 * 0.5), atol=1e-8)


class TestCompoundTransition:
    def test_order_one_is_transition(self):
        sys = LtvSystem.constant(RING_5)
        c1 = compound_transition(sys, 1, 0.0, 0.2, 1e-3).entries
        np.testing.assert_allclose(c1, transition_matrix(sys, 0.0, 0.2, 1e-3), atol=1e-12)

    def test_full_order_liouville_growth(self):
        sys = LtvSystem.constant(RING_5)
        c5 = compound_transition(sys, 5, 0.0, 0.4, 2e-4).entries
        assert c5.shape == (1, 1)
        assert c5[0, 0] == pytest.approx(np.exp(0.4 * np.trace(RING_5)), rel=1e-8)

    def test_consistency_with_compound_of_transition(self):
        rng = np.random.default_rng(73)
        for n in (3, 4, 5):
            A = rng.standard_normal((n, n))
            sys = LtvSystem.constant(A)
            phi = transition_matrix(sys, 0.0, 0.3, 1e-3)
            for p in range(1, n + 1):
                via_dynamics = compound_transition(sys, p, 0.0, 0.3, 1e-3).entries
                direct = mult_compound(phi, p).entries
                assert np.abs(via_dynamics - direct).max() < 1e-6, (n, p)

    def test_ring_third_compound_goes_positive(self):
        rng = np.random.default_rng(79)
        A = random_q_plus(rng, 5)
        sys = LtvSystem.constant(A)
        c3 = compound_transition(sys, 3, 0.0, 0.5, 1e-3).entries
        assert (c3 > 0).all()

    def test_order_out_of_range(self):
        with pytest.raises(OrderOutOfRange):
            compound_transition(LtvSystem.constant(RING_5), 6, 0.0, 0.1, 1e-3)


class TestVerifyCvds:
    def test_ring5_holds_on_grid(self):
        sys = LtvSystem.constant(RING_5)
        res = verify_cvds(sys, 0.0, [0.1 * k for k in range(1, 11)], 1e-3)
        assert res["holds"] and res["first_violation"] is None

    def test_non_metzler_violates_order_one(self):
        A = np.array([[0.0, 0.0, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        res = verify_cvds(LtvSystem.constant(A), 0.0, [0.01], 1e-4)
        assert not res["holds"]
        v = res["first_violation"]
        assert v["order"] == 1 and v["value"] <= 0.0

    def test_tridiagonal_positive_is_fully_positive(self):
        A = np.array([[-1.0, 1.0, 0.0], [2.0, -1.0, 1.0], [0.0, 1.0, -1.0]])
        assert in_M_plus(A)
        res = verify_cvds(LtvSystem.constant(A), 0.0, [0.1, 0.5, 1.0], 1e-3)
        assert res["holds"]
        # a positive tridiagonal band makes even-order minors positive too
        for t in (0.1, 0.5, 1.0):
            phi = transition_matrix(LtvSystem.constant(A), 0.0, t, 1e-3)
            for p in (2,):
                assert (mult_compound(phi, p).entries > 0).all()

    def test_off_band_entry_found_at_small_time(self):
        rng = np.random.default_rng(83)
        from oracles import random_metzler_irreducible_not_ring

        A = random_metzler_irreducible_not_ring(rng, 5)
        res = verify_cvds(LtvSystem.constant(A), 0.0, [0.01], 1e-4, tol=0.0)
        assert not res["holds"]
        assert res["first_violation"]["order"] in (1, 3)

    def test_piecewise_ring_generators_hold(self):
        rng = np.random.default_rng(89)
        for _ in range(5):
            mats = [random_q_plus(rng, 4, off_range=(0.5, 2.0)) for _ in range(3)]
            sys = LtvSystem.piecewise_constant([0.2, 0.45], mats)
            res = verify_cvds(sys, 0.0, [0.1, 0.3, 0.6, 1.0], 1e-3)
            assert res["holds"], mats


class TestSimulate:
    def test_zero_initial_condition(self):
        with pytest.raises(ZeroInitialCondition):
            simulate(LtvSystem.constant(RING_5), np.zeros(5), 0.0, 1.0, 1e-3)

    def test_norm_abort(self):
        sys = LtvSystem.constant(np.array([[40.0]]))
        with pytest.raises(NumericalAbort):
            simulate(sys, np.array([1.0]), 0.0, 1.0, 1e-3)

    def test_grid_and_counts(self):
        traj = simulate(LtvSystem.constant(RING_5), RING_5_X0, 0.0, 0.2, 1e-3)
        assert traj.times[0] == 0.0 and traj.times[-1] == pytest.approx(0.2)
        assert len(traj.counts) == len(traj.times) == traj.states.shape[0]
        assert traj.counts[0].s_minus == 4

    def test_exact_piece_stepping(self):
        traj = simulate(LtvSystem.constant(CYCLE_3), CYCLE_3_X0, 0.0, 2.0, 1e-2)
        for t, x in zip(traj.times[::20], traj.states[::20]):
            np.testing.assert_allclose(x, cycle_3_closed_form(t), atol=1e-9)

    def test_ring5_events(self):
        traj = simulate(LtvSystem.constant(RING_5), RING_5_X0, 0.0, 1.0, 1e-3)
        scm = traj.series("sc_minus")
        assert (np.diff(scm) <= 0).all()
        drops = [e for e in traj.events if e.kind == "sc_minus_drop"]
        assert len(drops) <= 2  # floor(5/2)
        for e in drops:
            assert e.t_hi - e.t_lo <= 1e-6 + 1e-12
            assert e.after <= e.before - 2

    def test_monotone_chain_inequality(self):
        traj = simulate(LtvSystem.constant(RING_5), RING_5_X0, 0.0, 1.0, 1e-3)
        scp = traj.series("sc_plus")
        scm = traj.series("sc_minus")
        for i in range(0, len(scm), 100):
            assert scp[i:].max() <= scm[i]

    def test_keep_phi(self):
        traj = simulate(LtvSystem.constant(RING_5), RING_5_X0, 0.0, 0.05, 1e-3, keep_phi=True)
        np.testing.assert_allclose(traj.phi[-1], expm(RING_5 * 0.05), atol=1e-9)
        np.testing.assert_allclose(traj.phi[-1] @ RING_5_X0, traj.states[-1], atol=1e-9)


class TestPositivityCondition:
    def test_constant_irreducible(self):
        assert check_positivity_condition(LtvSystem.constant(RING_5), 0.0, 0.5, 1e-3)

    def test_diagonal_never_positive(self):
        assert not check_positivity_condition(
            LtvSystem.constant(np.diag([-1.0, -2.0])), 0.0, 0.5, 1e-3
        )

    def test_reducible_piece_keeps_a_zero(self):
        up = np.array([[0.0, 1.0], [0.0, 0.0]])
        down = np.array([[0.0, 0.0], [1.0, 0.0]])
        sys = LtvSystem.piecewise_constant([1.0], [up, down])
        # within the first piece the (2,1) entry stays exactly zero
        assert not check_positivity_condition(sys, 0.0, 0.5, 1e-3)
        # across both pieces the union graph is strongly connected
        assert check_positivity_condition(sys, 0.0, 1.5, 1e-3)

    def test_not_metzler_rejected(self):
        A = np.array([[0.0, -1.0], [1.0, 0.0]])
        with pytest.raises(NotMetzler):
            check_positivity_condition(LtvSystem.constant(A), 0.0, 0.5, 1e-3)


class TestSystemValidation:
    def test_piecewise_needs_one_more_matrix(self):
        with pytest.raises(ShapeError):
            LtvSystem.piecewise_constant([0.5], [np.eye(2)])

    def test_breakpoints_increasing(self):
        with pytest.raises(ShapeError):
            LtvSystem.piecewise_constant([0.5, 0.4], [np.eye(2)] * 3)

    def test_sampled_times_match(self):
        with pytest.raises(ShapeError):
            LtvSystem.sampled([0.0, 1.0], [np.eye(2)])
