import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zdguard import (
    ConfigurationError,
    DynamicEventState,
    SelfTriggerState,
    output_event_violated,
    self_trigger_recompute_on_control_update,
    self_trigger_schedule,
    update_g,
)
from zdguard.triggering import budget_s, g_floor, record_output_event


def make_out_state(g=1e-5, sigma=0.1, c1=10.0, c2=0.5, eps=1e-4, p=2):
    return DynamicEventState(g=g, sigma=sigma, c1=c1, c2=c2, eps=eps,
                             last_sent_y=np.zeros(p))


def make_aux_state(delta=20.0, eps2=1e-4, m=2):
    return SelfTriggerState(t_j=0.0, next_time=0.0, s_j=budget_s(0.0, delta, eps2),
                            omega_j=1.0, delta=delta, eps2=eps2,
                            last_sent_yz=np.zeros(m))


class TestDynamicEvent:
    def test_equilibrium_at_eps_over_c1(self):
        # At e_y = 0 the threshold variable parks at eps/c1 = 1e-5.
        st_ = make_out_state(g=1e-5)
        for _ in range(5000):
            st_ = update_g(st_, np.zeros(2), 1e-3)
        assert st_.g == pytest.approx(1e-5, rel=1e-9)

    def test_floor_value(self):
        # eps / (c1 + sigma c2) with the benchmark constants
        assert g_floor(0.1, 10.0, 0.5, 1e-4) == pytest.approx(9.9502e-6, rel=1e-4)

    def test_homogeneous_decay(self):
        # With negligible eps and no error the variable decays like exp(-c1 t).
        st_ = DynamicEventState(g=1.0, sigma=0.1, c1=10.0, c2=0.5, eps=1e-300,
                                last_sent_y=np.zeros(1))
        for _ in range(1000):
            st_ = update_g(st_, np.zeros(1), 1e-3)
        assert st_.g == pytest.approx(np.exp(-10.0), rel=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.floats(1.1, 3.0))
    def test_floor_holds_under_admissible_errors(self, seed, g0_scale):
        # Any error sequence respecting the event condition keeps g above
        # eps/(c1 + sigma c2), provided g(0) > eps/c1.
        sigma, c1, c2, eps = 0.1, 10.0, 0.5, 1e-4
        st_ = make_out_state(g=g0_scale * eps / c1, sigma=sigma, c1=c1, c2=c2, eps=eps)
        floor = g_floor(sigma, c1, c2, eps)
        rng = np.random.default_rng(seed)
        for _ in range(400):
            # admissible error: ||e_y||^2 < sigma * g
            mag = np.sqrt(rng.uniform(0.0, sigma * st_.g))
            st_ = update_g(st_, np.array([mag]), 1e-3)
            assert st_.g > floor

    def test_event_violation_boundary(self):
        st_ = make_out_state(g=1e-5, sigma=0.1)
        # just transmitted: e_y = 0 < sigma g
        assert not output_event_violated(st_, st_.last_sent_y)
        # ||e_y||^2 = 2e-6 >= 1e-6
        assert output_event_violated(st_, st_.last_sent_y + 1e-3)

    def test_record_event_resets_error(self):
        st_ = make_out_state()
        y = np.array([0.3, -0.1])
        st_ = record_output_event(st_, y, 1.5)
        assert st_.t_k == 1.5
        assert not output_event_violated(st_, y)

    def test_constant_validation(self):
        with pytest.raises(ConfigurationError):
            make_out_state(sigma=1.5)
        with pytest.raises(ConfigurationError):
            make_out_state(c1=0.5)
        with pytest.raises(ConfigurationError):
            make_out_state(c2=1.0)
        with pytest.raises(ConfigurationError):
            make_out_state(eps=0.0)


class TestSelfTrigger:
    def test_interval_collapses_to_inverse_az_norm(self):
        # y_z(t_j) = 0 and u* = 0: s_j and omega_j coincide, interval = 1/||A_z||.
        st_ = make_aux_state()
        st_ = self_trigger_schedule(st_, np.zeros(2), 0.0, az_norm=1.0,
                                    czbz_norm=1.0, now=3.0)
        assert st_.next_time - 3.0 == pytest.approx(1.0, rel=1e-12)

    def test_budget_formula_benchmark_constants(self):
        # sqrt(2e-4)/sqrt(4 + 4*400) = 3.5311e-4
        assert budget_s(0.0, 20.0, 1e-4) == pytest.approx(3.5311e-4, rel=1e-4)
        st_ = make_aux_state()
        st_ = self_trigger_schedule(st_, np.zeros(2), 0.0, 1.0, 1.0, 0.0)
        assert st_.s_j == pytest.approx(0.0141421 / 40.0500, rel=1e-4)

    def test_zeno_bound_inequality_on_regular_inputs(self):
        # Scheduled interval vs the guaranteed event-driven bound; holds
        # whenever the event-time output is not vanishingly small.
        from zdguard import zeno_bound

        rng = np.random.default_rng(0)
        for _ in range(200):
            delta = rng.uniform(1.5, 30.0)
            eps2 = 10.0 ** rng.uniform(-6, -2)
            az = rng.uniform(0.2, 10.0)
            czbz = rng.uniform(0.2, 10.0)
            yz = rng.uniform(np.sqrt(2 * eps2), 10.0)   # away from zero output
            un = rng.uniform(0.0, 10.0)
            st_ = make_aux_state(delta=delta, eps2=eps2, m=1)
            st_ = self_trigger_schedule(st_, np.array([yz]), un, az, czbz, 0.0)
            M = az * yz + czbz * un
            assert st_.next_time >= zeno_bound(az, delta, eps2, M) - 1e-15

    def test_rejects_zero_az_norm(self):
        st_ = make_aux_state()
        with pytest.raises(ConfigurationError):
            self_trigger_schedule(st_, np.zeros(2), 0.0, 0.0, 1.0, 0.0)


class TestRecompute:
    def setup_method(self):
        st_ = make_aux_state()
        self.state = self_trigger_schedule(st_, np.array([0.5, 0.0]), 2.0,
                                           az_norm=1.0, czbz_norm=1.0, now=0.0)

    def test_same_norm_is_noop(self):
        before = self.state.next_time
        mid = self.state.t_j + 0.5 * (before - self.state.t_j)
        after = self_trigger_recompute_on_control_update(
            self.state, 2.0, mid, az_norm=1.0, czbz_norm=1.0)
        assert after.next_time == pytest.approx(before, rel=1e-12)

    def test_recompute_at_event_time_matches_fresh(self):
        after = self_trigger_recompute_on_control_update(
            self.state, 5.0, self.state.t_j, az_norm=1.0, czbz_norm=1.0)
        fresh = self_trigger_schedule(make_aux_state(), np.array([0.5, 0.0]), 5.0,
                                      az_norm=1.0, czbz_norm=1.0, now=0.0)
        assert after.next_time == pytest.approx(fresh.next_time, rel=1e-12)

    def test_doubled_rate_quarters_remaining_interval(self):
        # elapsed = half the budget at the old rate, omega doubles: the rest
        # takes a quarter of the original interval.
        s = self.state
        total = s.next_time - s.t_j
        mid = s.t_j + 0.5 * total
        # choose the new norm so omega_new = 2 * omega_old
        new_norm = (2.0 * s.omega_j - 1.0 * s.s_j - 1.0 * s.yz_norm_at_event) / 1.0
        after = self_trigger_recompute_on_control_update(
            s, new_norm, mid, az_norm=1.0, czbz_norm=1.0)
        assert after.next_time - mid == pytest.approx(0.25 * total, rel=1e-12)

    def test_exhausted_budget_triggers_immediately(self):
        late = self.state.t_j + 2.0 * (self.state.next_time - self.state.t_j)
        after = self_trigger_recompute_on_control_update(
            self.state, 0.1, late, az_norm=1.0, czbz_norm=1.0)
        assert after.next_time == late

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 9999))
    def test_repeated_recomputes_never_go_backwards(self, seed):
        rng = np.random.default_rng(seed)
        st_ = self_trigger_schedule(make_aux_state(m=1), np.array([rng.uniform(0, 2)]),
                                    rng.uniform(0, 3), 1.0, 1.0, 0.0)
        now = 0.0
        for _ in range(10):
            now += rng.uniform(0.0, max(st_.next_time - now, 1e-6))
            st_ = self_trigger_recompute_on_control_update(
                st_, rng.uniform(0, 5), now, 1.0, 1.0)
            assert st_.next_time >= now
            assert st_.budget_left >= 0.0
