import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles
from corner_impact.errors import DegenerateVelocityError, DomainError
from corner_impact.geometry import (
    VelocityAngular,
    VelocityXiEta,
    VelocityXY,
    VerticalMetric,
    angular_to_xy,
    make_corner,
    norm2_xy,
    xieta_to_xy,
    xy_to_angular,
    xy_to_xieta,
)
from corner_impact.rules import (
    RestitutionMode,
    both_walls_xieta,
    both_walls_xy,
    check_eps,
    impulse,
    oracle_step,
    step,
    step_ideal_angular,
    step_ideal_xieta,
    step_ideal_xy,
    step_newtonian_xieta,
    step_newtonian_xy,
    wall1_xy,
    wall2_xy,
)
from corner_impact.zones import Zone, classify_xy

alphas = st.floats(0.02, math.pi / 2 - 0.02)
epss = st.floats(0.0, 1.0)
comps = st.floats(-1.0, 1.0, allow_nan=False)

Q = make_corner(math.pi / 4)
SIXTH = make_corner(math.pi / 6)


def close(v, expected, tol=1e-12):
    assert (v.vx, v.vy) == pytest.approx(expected, abs=tol)


class TestIdealExamples:
    def test_wall2_quarter(self):
        close(step_ideal_xy(VelocityXY(0.0, 1.0), Q), (-1.0, 0.0), 1e-15)

    @pytest.mark.parametrize("alpha", [0.1, math.pi / 6, math.pi / 4, 1.3])
    def test_bisector_reverses(self, alpha):
        close(step_ideal_xy(VelocityXY(1.0, 0.0), make_corner(alpha)), (-1.0, 0.0))

    def test_exit_zone_unchanged(self):
        v = VelocityXY(-0.9, 0.3)
        assert step_ideal_xy(v, Q) == v

    def test_wall_direction_is_a_rounding_boundary(self):
        # tan(pi/4) rounds below 1, so the exact test sees a tiny wall-2 projection
        v = VelocityXY(-0.707, 0.707)
        xi = xy_to_xieta(v, Q).xi_dot
        assert 0.0 < xi <= 2 * 2.0**-52
        assert classify_xy(v, Q) is Zone.Z2

    def test_angular_wall1(self):
        a = step_ideal_angular(VelocityAngular(1.0, -math.pi / 2, 0.0), SIXTH)
        assert a.phi == pytest.approx(5 * math.pi / 6)

    def test_angular_bisector(self):
        a = step_ideal_angular(VelocityAngular(2.0, 0.0, 0.0), SIXTH)
        assert abs(a.phi) == pytest.approx(math.pi)
        assert a.speed == 2.0

    def test_angular_exit(self):
        a = VelocityAngular(1.0, 3.0, 0.0)
        assert step_ideal_angular(a, SIXTH).phi == 3.0

    def test_xieta_beta_zero(self):
        w = step_ideal_xieta(VelocityXiEta(-1.0, 1.0, 0.0), Q)
        assert (w.xi_dot, w.eta_dot) == pytest.approx((-1.0, -1.0), abs=1e-15)

    @pytest.mark.parametrize("s", [1e-3, 1.0, 7.0])
    def test_xieta_bisector(self, s):
        w = step_ideal_xieta(VelocityXiEta(s, s, 0.0), SIXTH)
        assert (w.xi_dot, w.eta_dot) == pytest.approx((-s, -s), rel=1e-14)


class TestNewtonianExamples:
    @pytest.mark.parametrize("eps,expected", [(0.95, -0.95), (0.75, -0.75), (0.5, -0.5), (0.0, 0.0)])
    def test_bisector(self, eps, expected):
        close(step_newtonian_xy(VelocityXY(1.0, 0.0), Q, eps), (expected, 0.0))

    def test_xieta_plastic_wall1(self):
        w = step_newtonian_xieta(VelocityXiEta(0.0, 1.0, 0.0), SIXTH, 0.0)
        assert (w.xi_dot, w.eta_dot) == pytest.approx((0.5, 0.0))
        v = xieta_to_xy(w, SIXTH)
        v_direct = step_newtonian_xy(xieta_to_xy(VelocityXiEta(0.0, 1.0, 0.0), SIXTH), SIXTH, 0.0)
        close(v, (v_direct.vx, v_direct.vy))

    def test_xieta_wall2(self):
        w = step_newtonian_xieta(VelocityXiEta(1.0, -1.0, 0.0), Q, 0.95)
        assert (w.xi_dot, w.eta_dot) == pytest.approx((-0.95, -1.0), abs=1e-15)

    @given(comps, comps, alphas)
    def test_eps_one_is_ideal(self, a, b, alpha):
        c = make_corner(alpha)
        w = VelocityXiEta(a, b, 0.0)
        assert step_newtonian_xieta(w, c, 1.0) == step_ideal_xieta(w, c)

    @pytest.mark.parametrize("eps", [-0.1, 1.01, float("nan")])
    def test_eps_domain(self, eps):
        with pytest.raises(DomainError):
            check_eps(eps)
        with pytest.raises(DomainError):
            RestitutionMode(eps)

    def test_mode_helpers(self):
        assert RestitutionMode.ideal().is_ideal
        assert not RestitutionMode.newtonian(0.5).is_ideal


class TestDegenerate:
    def test_xy(self):
        with pytest.raises(DegenerateVelocityError):
            both_walls_xy(0.0, 0.0, 1.0, 0.5)

    def test_xieta(self):
        with pytest.raises(DegenerateVelocityError):
            both_walls_xieta(0.0, 0.0, 1.0, 0.5)

    def test_dispatcher_sends_zero_to_exit(self):
        assert step_ideal_xy(VelocityXY(0.0, 0.0), Q) == VelocityXY(0.0, 0.0)


class TestAgainstOracles:
    @given(comps, comps, alphas, epss)
    def test_single_walls_match_normal_reflection(self, x, y, alpha, eps):
        k = math.tan(alpha)
        for kernel, ref in ((wall1_xy, oracles.wall1_reference), (wall2_xy, oracles.wall2_reference)):
            got, want = kernel(x, y, k, eps), ref(x, y, k, eps)
            assert got == pytest.approx(want, abs=1e-12)

    @given(comps, comps, alphas)
    def test_ideal_wall1_trig_and_half_angle(self, x, y, alpha):
        k = math.tan(alpha)
        got = wall1_xy(x, y, k, 1.0)
        assert got == pytest.approx(oracles.ideal_wall1_trig(x, y, alpha), abs=1e-12)
        assert got == pytest.approx(oracles.ideal_wall1_half_angle(x, y, k), abs=1e-12)

    @given(comps, comps, alphas, epss)
    def test_multiple_impact_matches_exact_impulse_form(self, x, y, alpha, eps):
        k = math.tan(alpha)
        assume(k * x + y > 0 and k * x - y > 0)
        got = both_walls_xy(x, y, k, eps)
        want = oracles.multiple_impact_exact(x, y, k, eps)
        assert got == pytest.approx(want, abs=1e-12 * max(1.0, abs(x), abs(y)))

    @given(comps, comps, alphas, epss)
    def test_oracle_step_matches_closed_form(self, x, y, alpha, eps):
        # relative accuracy is meaningless once the inputs are subnormal
        assume(math.hypot(x, y) > 1e-150)
        c = make_corner(alpha)
        v = VelocityXY(x, y)
        a = step_newtonian_xy(v, c, eps)
        b = oracle_step(v, c, RestitutionMode(eps))
        n = norm2_xy(v)
        assert math.hypot(a.vx - b.vx, a.vy - b.vy) <= 1e-12 * n

    def test_oracle_examples(self):
        close(oracle_step(VelocityXY(1.0, 0.0), SIXTH, RestitutionMode()), (-1.0, 0.0))
        close(oracle_step(VelocityXY(0.0, 1.0), Q, RestitutionMode()), (-1.0, 0.0))
        close(oracle_step(VelocityXY(1.0, 0.0), Q, RestitutionMode(0.5)), (-0.5, 0.0))

    def test_oracle_keeps_spin_under_any_metric(self):
        v = VelocityXY(0.8, 0.1, spin=3.0)
        for metric in (VerticalMetric(), VerticalMetric(2.0, 0.1)):
            out = oracle_step(v, SIXTH, RestitutionMode(0.3), metric)
            assert out.spin == 3.0
            ref = step_newtonian_xy(v, SIXTH, 0.3)
            close(out, (ref.vx, ref.vy))


class TestRepresentations:
    @given(comps, comps, alphas, epss)
    def test_xy_and_xieta_agree(self, x, y, alpha, eps):
        # relative accuracy is meaningless once the inputs are subnormal
        assume(math.hypot(x, y) > 1e-150)
        c = make_corner(alpha)
        v = VelocityXY(x, y)
        a = step_newtonian_xy(v, c, eps)
        b = xieta_to_xy(step_newtonian_xieta(xy_to_xieta(v, c), c, eps), c)
        assert math.hypot(a.vx - b.vx, a.vy - b.vy) <= 1e-12 * norm2_xy(v)

    @given(st.floats(-math.pi, math.pi), alphas)
    def test_angular_agrees_with_xy(self, phi, alpha):
        c = make_corner(alpha)
        v = VelocityXY(math.cos(phi), math.sin(phi))
        a = step_ideal_xy(v, c)
        b = angular_to_xy(step_ideal_angular(xy_to_angular(v), c))
        assert math.hypot(a.vx - b.vx, a.vy - b.vy) <= 1e-12


class TestInvariants:
    @given(comps, comps, alphas)
    def test_ideal_preserves_norm(self, x, y, alpha):
        v = VelocityXY(x, y)
        n = norm2_xy(v)
        assume(n > 1e-100)
        assert norm2_xy(step_ideal_xy(v, make_corner(alpha))) == pytest.approx(n, rel=1e-12)

    @given(comps, comps, alphas, st.floats(0.0, 0.999))
    def test_newtonian_decreases_norm(self, x, y, alpha, eps):
        c = make_corner(alpha)
        v = VelocityXY(x, y)
        # the loss scales with the square of the impacting projection
        assume(max(c.k * x + y, c.k * x - y) > 1e-3)
        assert norm2_xy(step_newtonian_xy(v, c, eps)) < norm2_xy(v)

    @given(comps, comps, alphas, epss)
    def test_no_two_multiple_impacts_in_a_row(self, x, y, alpha, eps):
        c = make_corner(alpha)
        v = VelocityXY(x, y)
        assume(classify_xy(v, c) is Zone.Z12)
        assert classify_xy(step_newtonian_xy(v, c, eps), c) is not Zone.Z12

    @given(comps, comps, alphas, st.floats(0.0, 0.999))
    def test_norm_drop_formula(self, x, y, alpha, eps):
        c = make_corner(alpha)
        v = VelocityXY(x, y)
        assume(classify_xy(v, c) is Zone.Z12)
        assume(norm2_xy(v) > 1e-100)  # keep the closed form clear of underflow
        out = step_newtonian_xy(v, c, eps)
        drop = out.vx**2 + out.vy**2 - (x * x + y * y)
        assert drop == pytest.approx(oracles.norm_drop_z12(x, y, c.k, eps), abs=1e-10)

    @given(comps, comps, alphas, epss)
    def test_mirror_equivariance(self, x, y, alpha, eps):
        c = make_corner(alpha)
        a = step_newtonian_xy(VelocityXY(x, y), c, eps)
        b = step_newtonian_xy(VelocityXY(x, -y), c, eps)
        assert (b.vx, b.vy) == pytest.approx((a.vx, -a.vy), abs=1e-12)

    @given(st.floats(0.0, 1.0), alphas, st.floats(0.0, 1.0))
    def test_small_changes_near_wall1(self, u, alpha, eta):
        # in Z1 the change is bounded by the offending projection
        c = make_corner(alpha)
        xi = -u
        assume(eta > 0)
        v = xieta_to_xy(VelocityXiEta(xi, eta, 0.0), c)
        out = step_ideal_xy(v, c)
        # exact bound plus a few ulps of the velocity itself
        slack = 8 * 2.0**-52 * norm2_xy(v)
        assert abs(out.vx - v.vx) <= eta + slack
        assert abs(out.vy - v.vy) <= 2 * eta + slack

    @given(comps, comps, alphas, epss)
    def test_impulse_is_difference(self, x, y, alpha, eps):
        c = make_corner(alpha)
        v = VelocityXY(x, y)
        imp = impulse(v, c, RestitutionMode(eps))
        out = step(v, c, RestitutionMode(eps))
        assert (v.vx + imp.ix, v.vy + imp.iy) == pytest.approx((out.vx, out.vy), abs=1e-15)


def test_kernels_accept_arrays():
    x = np.array([1.0, 0.9])
    y = np.array([0.0, 0.1])
    X, Y = both_walls_xy(x, y, 1.0, 1.0)
    assert X.shape == (2,)
    assert X[0] == pytest.approx(-1.0)
