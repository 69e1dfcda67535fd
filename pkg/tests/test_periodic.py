import math
from fractions import Fraction

import numpy as np
import pytest

from choreoqep import pencil
from choreoqep.numkernel import RootSet
from choreoqep.periodic import (Choreography, DelayResonant, NotChoreographic,
                                build_choreography_cel, build_choreography_del,
                                commensurability, is_periodic_cel,
                                is_periodic_del, verify_choreography)
from choreoqep.scaleop import central_difference, k_family

from conftest import (make_curve_spec, make_discrete_tuned_spec_d3,
                      make_oscillator_spec, make_reference_spec)

TWO_PI = 2.0 * math.pi


def rootset(*values):
    return RootSet.from_roots(np.array(values, dtype=complex))


class TestCommensurability:
    def test_reference_pair(self):
        rep = commensurability(rootset(2j, -2j, 5j, -5j))
        assert rep.all_imaginary
        assert set(map(abs, rep.ratios)) == {Fraction(1), Fraction(5, 2)}
        # s = lcm(1,2)/gcd(1,5) = 2 reference cycles
        assert rep.reference_cycles == Fraction(2)
        assert rep.period == pytest.approx(TWO_PI)

    def test_four_ten(self):
        rep = commensurability(rootset(4j, -4j, 10j, -10j))
        assert rep.period == pytest.approx(math.pi)

    def test_incommensurable_pair_unresolved_at_defaults(self):
        rep = commensurability(rootset(4j, -4j, 7j * math.sqrt(2), -7j * math.sqrt(2)))
        assert rep.all_imaginary
        assert rep.period is None
        assert any(f is None for f in rep.ratios)

    def test_real_root_blocks_periodicity(self):
        rep = commensurability(rootset(1.0, 2j, -2j))
        assert not rep.all_imaginary and rep.period is None

    def test_minimal_period_by_exact_rationals(self):
        rep = commensurability(rootset(4j, -4j, 10j, -10j))
        # T/2 must fail lam*T in 2*pi*i*Z for at least one mode
        halves = [rep.reference_cycles * f / 2 for f in rep.ratios]
        assert any(h.denominator != 1 for h in halves)

    def test_scale_consistency(self):
        base = commensurability(rootset(2j, -2j, 5j, -5j))
        scaled = commensurability(rootset(6j, -6j, 15j, -15j))
        assert scaled.ratios == base.ratios
        assert scaled.period == pytest.approx(base.period / 3.0)

    def test_tolerance_gate(self):
        # ratio 2.5 + 1e-6 resolves at a loose tolerance, not at the default
        loose = commensurability(rootset(1j, (2.5 + 1e-6) * 1j), tol=1e-4)
        tight = commensurability(rootset(1j, (2.5 + 1e-6) * 1j))
        assert loose.period is not None
        assert tight.period is None


class TestIsPeriodic:
    def test_commensurable_curve_family(self):
        spec = make_curve_spec(omega=(4.0, 10.0), n=3)
        rep = is_periodic_cel(spec, 3)
        assert rep.all_imaginary and rep.period is not None
        # spectra: {±4i, ±10i} and {±i, ±13i}; common period 2*pi
        assert rep.period == pytest.approx(TWO_PI)

    def test_incommensurable_curve_family(self):
        spec = make_curve_spec(omega=(4.0, 7.0 * math.sqrt(2)), n=3)
        rep = is_periodic_cel(spec, 3)
        assert rep.period is None

    def test_discrete_tuned_d3_periodic_in_particle_spectrum(self):
        op = central_difference(math.pi / 15.0)
        spec = make_discrete_tuned_spec_d3(op)
        sp0 = pencil.transcendental_spectrum(pencil.transcendental_pencil(spec, op, 0))
        assert np.allclose(np.sort(np.abs(sp0.lam.roots.imag)),
                           [1, 1, 2, 2, 3, 3, 12, 12, 13, 13, 14, 14], atol=1e-9)
        rep = commensurability(sp0.lam)
        assert rep.period == pytest.approx(TWO_PI)

    def test_is_periodic_del_runs_on_union(self):
        op = central_difference(math.pi / 15.0)
        spec = make_discrete_tuned_spec_d3(op)
        rep = is_periodic_del(spec, op, 5)
        # the summed-variable spectrum of this family is not purely imaginary
        assert not rep.all_imaginary and rep.period is None


class TestChoreographyCel:
    def test_reference_system(self, ref_spec):
        ch, sol = build_choreography_cel(ref_spec, 3, np.ones(4))
        assert ch.T == pytest.approx(TWO_PI)
        assert ch.delay == pytest.approx(TWO_PI / 3.0)
        rep = verify_choreography(ch, sol, ref_spec)
        assert rep.all_ok, rep

    def test_zero_forcing_centers_at_origin(self, ref_spec):
        ch, _ = build_choreography_cel(ref_spec, 3, np.ones(4))
        assert np.abs(ch.u.u0).max() == 0.0

    def test_delay_resonance_detected(self):
        spec = make_reference_spec(omega=(2.0, 4.0))  # period pi, mode 4i resonates
        with pytest.raises(DelayResonant):
            build_choreography_cel(spec, 2, np.ones(4))

    def test_zeroing_resonant_mode_recovers_choreography(self):
        spec = make_reference_spec(omega=(2.0, 4.0))
        q0 = pencil.classical_spectrum(pencil.classical_pencil(spec, 0))
        amps = np.where(np.abs(np.abs(q0.roots.imag) - 4.0) < 1e-6, 0.0, 1.0)
        ch, sol = build_choreography_cel(spec, 2, amps)
        assert len(ch.u.lambdas) == 2  # fewer active modes is still a choreography
        assert verify_choreography(ch, sol, spec).all_ok

    def test_incommensurable_rejected(self):
        spec = make_reference_spec(omega=(4.0, 7.0 * math.sqrt(2)))
        with pytest.raises(NotChoreographic):
            build_choreography_cel(spec, 3, np.ones(4))

    def test_xs_constant(self, ref_spec):
        ch, sol = build_choreography_cel(ref_spec, 3, np.ones(4))
        ts = np.linspace(0.0, ch.T, 256)
        mass = 1.0 + np.abs(ch.u.u0).sum() + np.abs(ch.u.vectors).sum()
        assert np.abs(sol.xs.value(ts) - 3 * ch.u.u0).max() <= 1e-10 * mass

    def test_delay_structure(self, ref_spec):
        ch, sol = build_choreography_cel(ref_spec, 3, np.ones(4))
        ts = np.linspace(0.0, ch.T, 33)
        for j in range(2):
            lhs = sol.particles[j + 1].value(ts)
            rhs = sol.particles[j].value(ts + ch.T / 3.0)
            assert np.abs(lhs - rhs).max() <= 1e-9


class TestChoreographyDel:
    def test_tuned_d3_system(self):
        op = central_difference(math.pi / 15.0)
        spec = make_discrete_tuned_spec_d3(op, n=5)
        ch, sol = build_choreography_del(spec, op, 5, np.ones(12), 0.0, 30)
        assert ch.T == pytest.approx(TWO_PI)
        rep = verify_choreography(ch, sol, spec)
        assert rep.all_ok, rep

    def test_zero_amplitudes_constant_solution(self):
        op = central_difference(math.pi / 15.0)
        spec = make_discrete_tuned_spec_d3(op, n=5)
        ch, sol = build_choreography_del(spec, op, 5, np.zeros(12), 0.0, 30)
        ts = np.linspace(0.0, TWO_PI, 9)
        for p in sol.particles:
            assert np.abs(p.value(ts) - ch.u.u0).max() == 0.0

    def test_generic_operator_not_choreographic(self, ref_spec):
        # a conditions-satisfying but otherwise generic real operator pushes
        # part of the discrete spectrum off the imaginary axis
        from choreoqep.scaleop import ScaleOperator
        op = ScaleOperator(np.array([-0.7, 0.4, 0.3]), TWO_PI / 100)
        with pytest.raises(NotChoreographic):
            build_choreography_del(ref_spec, op, 3, np.ones(8), 0.0, 100)

    def test_resonance_with_n3(self):
        # the ±3i mode has e^(3i * 2pi/3) = 1: the delay sums do not cancel
        op = central_difference(math.pi / 15.0)
        spec = make_discrete_tuned_spec_d3(op, n=3)
        with pytest.raises(DelayResonant):
            build_choreography_del(spec, op, 3, np.ones(12), 0.0, 30)


class TestVerifyChoreography:
    def test_wrong_period_fails(self, ref_spec):
        ch, sol = build_choreography_cel(ref_spec, 3, np.ones(4))
        halved = Choreography(ch.u, ch.n, ch.T, ch.delay)
        rep = verify_choreography(halved, sol, ref_spec, period=ch.T / 2.0)
        assert not rep.periodic_ok
