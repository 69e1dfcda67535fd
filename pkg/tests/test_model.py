import numpy as np
import pytest

from choreoqep import celsolve, pencil
from choreoqep.model import (LagrangianSpec, NoRealSolution, NonConservative,
                             ParticleState, SingularTransform, assemble_blocks,
                             construct_j4, energy, transform_affine,
                             validate_spec)

from conftest import J1, J2, J3, make_oscillator_spec, make_reference_spec


class TestValidateSpec:
    def test_reference_system_clean(self, ref_spec):
        assert validate_spec(ref_spec) == []

    def test_skew_j5_accepted(self):
        spec = LagrangianSpec(2, 2, J1, J2, J3, np.eye(2), [[0, 1], [-1, 0]])
        assert validate_spec(spec) == []

    def test_asymmetric_j1_flagged(self):
        spec = LagrangianSpec(2, 2, [[1, 2], [3, 4]], J2, J3, np.eye(2))
        bad = validate_spec(spec)
        assert len(bad) == 1 and bad[0].matrix == "J1"
        assert bad[0].magnitude == pytest.approx(1.0)


class TestEnergy:
    def test_oscillator_at_rest(self):
        omega = 3.0
        spec = make_oscillator_spec(omega)
        e = energy(spec, ParticleState([[1.0]], [[0.0]]))
        assert e == pytest.approx(0.5 * omega**2)

    def test_oscillator_quarter_period(self):
        omega = 3.0
        spec = make_oscillator_spec(omega)
        e = energy(spec, ParticleState([[0.0]], [[omega]]))
        assert e == pytest.approx(0.5 * omega**2)

    def test_nonzero_j5_rejected(self):
        spec = LagrangianSpec(2, 1, J1, J2, J3, np.eye(2), [[0, 1], [-1, 0]])
        with pytest.raises(NonConservative):
            energy(spec, ParticleState(np.zeros((1, 2)), np.zeros((1, 2))))

    def test_equal_along_solved_trajectory(self, ref_spec):
        rng = np.random.default_rng(5)
        amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        extras = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
        sol = celsolve.general_solution_cel(ref_spec, 3, amps, extras)
        values = []
        for t in (0.3, 1.7):
            x = np.array([p.value(t).real for p in sol.particles])
            v = np.array([p.derivative(t).real for p in sol.particles])
            values.append(energy(ref_spec, ParticleState(x, v)))
        assert abs(values[0] - values[1]) <= 1e-10 * max(1.0, abs(values[0]))


class TestAssembleBlocks:
    def test_uncoupled_identity(self):
        spec = LagrangianSpec(2, 2, np.eye(2), np.eye(2), np.zeros((2, 2)), np.eye(2))
        forms = assemble_blocks(spec)
        assert np.allclose(forms.J8, np.eye(4))
        assert forms.j8_positive

    def test_coupled_indefinite(self):
        spec = LagrangianSpec(2, 2, np.eye(2), np.eye(2), np.eye(2), np.eye(2))
        forms = assemble_blocks(spec)
        # [[1,2],[2,1]] tensor I has eigenvalues {3, 3, -1, -1}
        assert np.allclose(np.sort(np.linalg.eigvalsh(forms.J8)), [-1, -1, 3, 3])
        assert not forms.j8_positive

    def test_reference_flags_and_block_layout(self, ref_spec):
        forms = assemble_blocks(ref_spec)
        assert forms.J8.shape == (6, 6)
        assert np.allclose(forms.J8[:2, 2:4], 2 * J3)
        assert np.allclose(forms.J9[2:4, :2], 2 * ref_spec.J4)
        assert np.allclose(forms.J10, np.zeros((6, 6)))
        assert isinstance(forms.j8_positive, bool)


class TestTransformAffine:
    def test_identity_fixes_spec(self, ref_spec):
        out = transform_affine(ref_spec, np.eye(2), np.zeros(2))
        for name in ("J1", "J2", "J3", "J4", "J5", "J6", "J7"):
            assert np.allclose(getattr(out, name), getattr(ref_spec, name))

    def test_scaling_d1(self):
        spec = make_oscillator_spec(1.0)
        out = transform_affine(spec, [[2.0]], [0.0])
        assert out.J1[0, 0] == pytest.approx(0.25)

    def test_round_trip(self, ref_spec):
        rng = np.random.default_rng(2)
        for _ in range(10):
            A = np.eye(2) + 0.4 * rng.standard_normal((2, 2))
            b = rng.standard_normal(2)
            fwd = transform_affine(ref_spec, A, b)
            back = transform_affine(fwd, np.linalg.inv(A), -np.linalg.inv(A) @ b)
            for name in ("J1", "J2", "J3", "J4", "J5", "J6", "J7"):
                assert np.abs(getattr(back, name) - getattr(ref_spec, name)).max() < 1e-10

    def test_singular_rejected(self, ref_spec):
        with pytest.raises(SingularTransform):
            transform_affine(ref_spec, np.zeros((2, 2)), np.zeros(2))

    def test_covariance_of_trajectories(self):
        spec = make_reference_spec(n=2)
        rng = np.random.default_rng(9)
        A = np.eye(2) + 0.3 * rng.standard_normal((2, 2))
        b = rng.standard_normal(2)
        hat = transform_affine(spec, A, b)
        x0 = rng.standard_normal((2, 2))
        xf = rng.standard_normal((2, 2))
        sol, _ = celsolve.dirichlet_cel(spec, 2, 0.0, 1.0, x0, xf)
        hat_sol, _ = celsolve.dirichlet_cel(hat, 2, 0.0, 1.0,
                                            x0 @ A.T + b, xf @ A.T + b)
        ts = np.linspace(0.0, 1.0, 17)
        for j in range(2):
            want = sol.particles[j].value(ts) @ A.T + b
            got = hat_sol.particles[j].value(ts)
            assert np.abs(got - want).max() <= 1e-8


class TestConstructJ4:
    def test_reference_construction(self):
        j4 = construct_j4(J1, J2, J3, 2.0, 5.0, 25.0)
        assert np.allclose(j4, [[-15.5, -0.5], [-0.5, -110.0]], atol=1e-12)

    def test_degenerate_targets_allowed(self):
        # omega1 = omega2 = 1 with the free entry 1 forces K = I
        j4 = construct_j4(J1, J2, J3, 1.0, 1.0, 1.0)
        want = 0.5 * J2 + 0.5 * (J1 - 2 * J3)  # K = I
        assert np.allclose(j4, want)

    def test_no_real_solution(self):
        with pytest.raises(NoRealSolution):
            construct_j4(J1, J2, J3, 2.0, 5.0, 29.0)  # j4_free = w1^2 + w2^2

    def test_output_is_symmetric_and_hits_targets(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            w1, w2 = sorted(rng.uniform(1.0, 6.0, size=2))
            free = rng.uniform(w1**2, w2**2)
            j4 = construct_j4(J1, J2, J3, w1, w2, free)
            spec = LagrangianSpec(2, 3, J1, J2, J3, j4)
            assert validate_spec(spec) == []
            roots = pencil.classical_spectrum(pencil.classical_pencil(spec, 0))
            want = np.array(sorted([-w2, -w1, w1, w2]))
            assert np.abs(np.sort(roots.roots.imag) - want).max() < 1e-8
            assert np.abs(roots.roots.real).max() < 1e-8
