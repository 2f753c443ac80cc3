import pytest
from hypothesis import given, settings, strategies as st

from groupform import (
    LatticeState,
    OutcomeKind,
    TorusShape,
    default_max_steps,
    evolve,
    step,
    trajectory,
)

from conftest import lattice_states

FIG_EXAMPLE = [0, 0, 1, 1, 2, 0, 0, 2, 1, 2, 0, 1, 1, 0]
FIG_EXAMPLE_SETTLED = [0, 1, 0, 3, 0, 0, 0, 0, 3, 0, 3, 0, 1, 0]


class TestEvolveExamples:
    def test_fixed_after_one_step(self):
        z5 = TorusShape((5,))
        outcome = evolve(LatticeState(z5, [1, 1, 0, 0, 0]))
        assert outcome.kind is OutcomeKind.FIXED
        assert outcome.n_st == 1
        assert outcome.steady_state == LatticeState(z5, [0, 0, 1, 0, 1])
        assert outcome.steps_taken == 2

    def test_period_two_cycle(self):
        z5 = TorusShape((5,))
        outcome = evolve(LatticeState(z5, [1, 1, 1, 0, 0]))
        assert outcome.kind is OutcomeKind.PERIODIC
        assert outcome.entry_time == 0
        assert outcome.period == 2
        assert outcome.steady_state == LatticeState(z5, [1, 1, 1, 0, 0])
        assert outcome.n_st is None

    def test_merge_then_settle(self):
        z7 = TorusShape((7,))
        outcome = evolve(LatticeState(z7, [1, 1, 0, 1, 1, 0, 0]))
        assert outcome.kind is OutcomeKind.FIXED
        assert outcome.n_st == 2
        assert outcome.steady_state == LatticeState(z7, [1, 0, 2, 0, 1, 0, 0])

    def test_mixed_sizes_settle(self):
        z14 = TorusShape((14,))
        outcome = evolve(LatticeState(z14, FIG_EXAMPLE))
        assert outcome.kind is OutcomeKind.FIXED
        assert outcome.n_st == 3
        assert outcome.steady_state == LatticeState(z14, FIG_EXAMPLE_SETTLED)
        assert outcome.steady_state.total_mass() == 11

    def test_already_fixed(self):
        all_ones = LatticeState(TorusShape((6,)), [1] * 6)
        outcome = evolve(all_ones)
        assert outcome.kind is OutcomeKind.FIXED
        assert outcome.n_st == 0
        assert outcome.steps_taken == 1
        assert outcome.steady_state == all_ones

    def test_unresolved_at_cap(self):
        outcome = evolve(LatticeState(TorusShape((5,)), [1, 1, 1, 0, 0]), max_steps=1)
        assert outcome.kind is OutcomeKind.UNRESOLVED
        assert outcome.steps_taken == 1
        assert outcome.steady_state == LatticeState(TorusShape((5,)), [0, 1, 0, 1, 1])

    def test_max_steps_validation(self):
        with pytest.raises(ValueError):
            evolve(LatticeState.zeros(TorusShape((5,))), max_steps=0)

    def test_default_cap(self):
        assert default_max_steps(TorusShape((3000,))) == 300_000
        assert default_max_steps(TorusShape((100, 150))) == 15_000


class TestTrajectory:
    def test_zero_steps(self):
        state = LatticeState(TorusShape((5,)), [1, 1, 0, 0, 0])
        assert trajectory(state, 0) == [state]

    def test_cycle_trajectory(self):
        z5 = TorusShape((5,))
        states = trajectory(LatticeState(z5, [1, 1, 1, 0, 0]), 2)
        assert states == [
            LatticeState(z5, [1, 1, 1, 0, 0]),
            LatticeState(z5, [0, 1, 0, 1, 1]),
            LatticeState(z5, [1, 1, 1, 0, 0]),
        ]

    def test_empty_state(self):
        empty = LatticeState.zeros(TorusShape((4, 4)))
        assert trajectory(empty, 3) == [empty] * 4

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            trajectory(LatticeState.zeros(TorusShape((4,))), -1)

    @given(lattice_states())
    def test_mass_constant_along_trajectory(self, state):
        for visited in trajectory(state, 8):
            assert visited.total_mass() == state.total_mass()


class TestOutcomeInvariants:
    @settings(max_examples=80)
    @given(lattice_states(max_value=2))
    def test_outcome_self_consistent(self, state):
        outcome = evolve(state, max_steps=200)
        if outcome.kind is OutcomeKind.FIXED:
            # confirmed by direct re-application, independent of detection
            assert step(outcome.steady_state) == outcome.steady_state
            assert outcome.n_st is not None
            assert outcome.steps_taken == outcome.n_st + 1
            replay = trajectory(state, outcome.n_st)
            if outcome.n_st > 0:
                assert replay[-1] != replay[-2]
            assert replay[-1] == outcome.steady_state
        elif outcome.kind is OutcomeKind.PERIODIC:
            period = outcome.period
            assert period >= 2
            cycle = trajectory(outcome.steady_state, period)
            assert cycle[-1] == outcome.steady_state
            # minimality: no proper divisor of the period closes the loop
            for d in range(1, period):
                if period % d == 0:
                    assert cycle[d] != outcome.steady_state
            assert outcome.steps_taken == outcome.entry_time + period
        else:
            assert outcome.steps_taken == 200

    @given(lattice_states(max_value=2))
    def test_deterministic(self, state):
        first = evolve(state, max_steps=64)
        second = evolve(state, max_steps=64)
        assert first.kind == second.kind
        assert first.steady_state == second.steady_state
        assert (first.n_st, first.entry_time, first.period, first.steps_taken) == (
            second.n_st,
            second.entry_time,
            second.period,
            second.steps_taken,
        )
