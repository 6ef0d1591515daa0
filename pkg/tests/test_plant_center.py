import numpy as np
import pytest

from zdguard import (
    AttackScenario,
    CommandCenter,
    LtiSystem,
    NoiseSource,
    PlantSide,
    Verdict,
    isolate,
)
from zdguard.plant import AuxMessage, fire_step
from zdguard.presets import case1_bundle, quadruple_tank

CONSTS = dict(sigma=0.1, c1=10.0, c2=0.5, eps=1e-4, delta=20.0, eps2=1e-4)


def make_side(noise=None, scenario=None, x0=None):
    return PlantSide(quadruple_tank(), case1_bundle(), dt=1e-3, x0=x0,
                     scenario=scenario, noise=noise, **CONSTS)


def make_cc():
    return CommandCenter(quadruple_tank(), case1_bundle(), delta=20.0, eps2=1e-4,
                         dt=1e-3, gamma_z=0.01, gamma_x=1.9)


class TestIsolationTable:
    @pytest.mark.parametrize("flags,verdict", [
        ((False, False, False), Verdict.NO_ATTACK),
        ((True, True, True), Verdict.NON_ZD_ATTACK),
        ((False, True, True), Verdict.ZD_ATTACK),
        ((False, False, True), Verdict.ZD_COVERT_AUX),
        ((True, False, False), Verdict.UNCLASSIFIED),
        ((False, True, False), Verdict.UNCLASSIFIED),
        ((True, False, True), Verdict.UNCLASSIFIED),
        ((True, True, False), Verdict.UNCLASSIFIED),
    ])
    def test_truth_table(self, flags, verdict):
        assert isolate(*flags) is verdict


class TestFireStep:
    def test_rounds_up_to_grid(self):
        assert fire_step(0.0457, 0, 1e-3) == 46

    def test_never_at_or_before_schedule_step(self):
        assert fire_step(0.005, 5, 1e-3) == 6
        assert fire_step(0.0049, 5, 1e-3) == 6

    def test_grid_point_exact(self):
        assert fire_step(1.0, 0, 1e-3) == 1000


class TestPlantSideEquilibrium:
    def test_noise_free_origin_only_aux_periodic(self):
        # From the origin with no noise the output error stays zero: no output
        # events after the bootstrap; the quiet auxiliary channel self-triggers
        # with period 1/||A_z|| = 1 s exactly.
        side = make_side()
        aux_steps = []
        for i in range(3001):
            msg = side.check_output_channel(i)
            if side.aux_due(i):
                aux_steps.append(i)
                side.emit_aux(i)
            elif msg is not None:
                side.recompute_aux_schedule(i)
            side.integrate(i)
        assert side.out_event_count == 1            # bootstrap only
        assert aux_steps == [0, 1000, 2000, 3000]

    def test_u_star_equals_held_u_without_input_attack(self):
        side = make_side()
        side.set_held_u(np.array([0.3, -0.2]))
        assert np.array_equal(side.u_star(5.0), side.held_u)

    def test_noise_forces_output_events(self):
        noise = NoiseSource(seed=1, n_steps=200, p=2, std=0.1)
        side = make_side(noise=noise)
        count = 0
        for i in range(200):
            if side.check_output_channel(i) is not None:
                count += 1
            if side.aux_due(i):
                side.emit_aux(i)
            side.integrate(i)
        assert count > 100


class TestCommandCenterObserver:
    def test_origin_is_invariant(self):
        cc = make_cc()
        for _ in range(100):
            cc.observer_step()
        assert np.array_equal(cc.z_hat, np.zeros(2))
        assert np.array_equal(cc.x_hat, np.zeros(4))

    def test_constant_injection_converges_to_observer_equilibrium(self):
        # With u = 0 and held y_z*, z_hat settles where (A_z + L C_z) z = L ybar.
        cc = make_cc()
        ybar = np.array([0.2, -0.1])
        cc.held_yz_star = ybar
        for _ in range(20_000):
            cc.observer_step()
        Az = cc.aux.A + cc.L @ cc.aux.C
        expected = np.linalg.solve(Az, cc.L @ ybar)
        assert np.allclose(cc.z_hat, expected, atol=1e-9)

    def test_receive_output_updates_controller(self):
        cc = make_cc()
        from zdguard.plant import OutputMessage

        cc.receive_output(OutputMessage(t=0.5, y=np.array([1.0, 2.0]), index=0))
        assert np.allclose(cc.u, cc.K @ np.array([1.0, 2.0]))

    def test_dis_t_zero_when_arrival_matches_expectation(self):
        cc = make_cc()
        msg = AuxMessage(t=0.0, value=np.zeros(2), index=0, step=0)
        dis = cc.receive_aux(msg)
        assert dis == 0.0
        # quiet replica schedules 1 s ahead: expected step 1000
        assert cc.expected_fire_step == 1000
        late = AuxMessage(t=0.9, value=np.zeros(2), index=1, step=900)
        assert cc.receive_aux(late) == pytest.approx(0.1)

    def test_residual_record_fields(self):
        cc = make_cc()
        rec = cc.residuals(0.0)
        assert rec.verdict is Verdict.NO_ATTACK
        cc.held_yz_star = np.array([1.0, 0.0])
        rec = cc.residuals(1.0)
        assert rec.res_z_alarm and rec.res_z == pytest.approx(1.0)
