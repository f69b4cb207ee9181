import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from paulinv.pauli import dense_matrix
from paulinv.program import QUERY, CircuitProgram, FrameGate, Task
from paulinv.simulate import (
    HamiltonianInstance,
    NoisyInstance,
    SimulatorCapError,
    apply_program,
    build_hamiltonian,
    certify_program,
    check_simulator_cap,
    complement_support,
    evolution,
    infidelity_slope,
    lcu_transpose_identity_check,
    lcu_transpose_residual,
    make_noisy_instance,
    matrix_exponential,
    phase_invariant_fidelity,
    random_unitary,
    robustness_sweep,
    sample_rng,
)
from paulinv.synth import synth_recursive_inverse, synth_single_query

from supports import P, S, ising_chain, y_model


def random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


class TestHamiltonian:
    def test_zero(self):
        s = y_model()
        h = build_hamiltonian(HamiltonianInstance(s, (0.0,) * len(s)))
        assert not h.any()

    def test_single_z(self):
        h = build_hamiltonian(HamiltonianInstance(S("Z0"), (0.7,)))
        assert np.allclose(h, np.diag([0.7, -0.7]))

    def test_matches_dense_sum_and_hermitian(self):
        rng = np.random.default_rng(0)
        s = S("X0 Y1", "Z0", "Y0 Y1", "X1")
        a = rng.standard_normal(len(s))
        h = build_hamiltonian(HamiltonianInstance(s, tuple(a)))
        ref = sum(c * dense_matrix(t) for c, t in zip(a, s))
        assert np.allclose(h, ref)
        assert np.abs(h - h.conj().T).max() < 1e-12

    def test_instance_checks(self):
        with pytest.raises(ValueError):
            HamiltonianInstance(S("Z0"), (1.0, 2.0))
        with pytest.raises(ValueError):
            HamiltonianInstance(S("Z0"), (math.nan,))

    def test_caps(self):
        check_simulator_cap(8)
        with pytest.raises(SimulatorCapError):
            check_simulator_cap(9)
        with pytest.raises(SimulatorCapError):
            check_simulator_cap(5, max_qubits=11)
        with pytest.warns(RuntimeWarning):
            check_simulator_cap(9, max_qubits=9)


class TestExpm:
    def test_zero(self):
        assert np.array_equal(matrix_exponential(np.zeros((4, 4))), np.eye(4))

    def test_rotation(self):
        x = dense_matrix(P("X0", 1))
        assert np.allclose(matrix_exponential(-1j * math.pi / 2 * x), -1j * x, atol=1e-10)

    def test_non_square(self):
        with pytest.raises(ValueError):
            matrix_exponential(np.zeros((2, 3)))

    @pytest.mark.parametrize("seed", range(10))
    def test_unitarity_and_scipy_oracle(self, seed):
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, 8) * (1 + 5 * seed)
        w = matrix_exponential(-1j * h)
        assert np.abs(w.conj().T @ w - np.eye(8)).max() < 1e-10
        assert np.abs(w - scipy.linalg.expm(-1j * h)).max() < 1e-10

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 5), st.floats(0.01, 20), st.integers(0, 10 ** 6))
    def test_general_matrices(self, d, scale, seed):
        rng = np.random.default_rng(seed)
        a = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) * scale / d
        ref = scipy.linalg.expm(a)
        assert np.abs(matrix_exponential(a) - ref).max() <= 1e-9 * max(1.0, np.abs(ref).max())


class TestApply:
    def test_query_only(self):
        u = random_unitary(2, np.random.default_rng(1))
        assert np.allclose(apply_program(CircuitProgram(Task.INVERT, 1, (QUERY,)), u), u)

    def test_commuting_frame(self):
        u = evolution(0.3 * dense_matrix(P("Y0", 1)))
        assert np.allclose(apply_program(synth_single_query("invert", P("Y0", 1)), u), u)

    def test_anticommuting_frame(self):
        x = dense_matrix(P("X0", 1))
        out = apply_program(synth_single_query("invert", P("Z0", 1)), evolution(0.4 * x))
        assert np.allclose(out, scipy.linalg.expm(0.4j * x))

    def test_order_first_applied_rightmost(self):
        u = random_unitary(2, np.random.default_rng(2))
        prog = CircuitProgram(Task.INVERT, 1, (FrameGate(P("X0", 1)), QUERY, FrameGate(P("Z0", 1))))
        x, z = dense_matrix(P("X0", 1)), dense_matrix(P("Z0", 1))
        assert np.allclose(apply_program(prog, u), z @ u @ x)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_program(CircuitProgram(Task.INVERT, 2, (QUERY,)), np.eye(2))


class TestFidelity:
    def test_examples(self):
        u = random_unitary(4, np.random.default_rng(3))
        assert phase_invariant_fidelity(u, u) == pytest.approx(1.0)
        assert phase_invariant_fidelity(u, np.exp(0.7j) * u) == pytest.approx(1.0)
        assert phase_invariant_fidelity(np.eye(2), dense_matrix(P("X0", 1))) == 0.0

    def test_symmetric(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            a, b = random_unitary(4, rng), random_unitary(4, rng)
            assert phase_invariant_fidelity(a, b) == pytest.approx(phase_invariant_fidelity(b, a))
            assert phase_invariant_fidelity(1j * a, b) == pytest.approx(phase_invariant_fidelity(a, b))

    def test_mismatch(self):
        with pytest.raises(ValueError):
            phase_invariant_fidelity(np.eye(2), np.eye(4))


class TestCertify:
    def test_ising_pass(self):
        s = ising_chain(2)
        rep = certify_program(s, synth_single_query("invert", P("Z0 Y1", 2)), samples=100)
        assert rep.passed and rep.min_fidelity >= 1 - 1e-9 and rep.samples == 100

    def test_y_model_pass(self):
        prog = synth_recursive_inverse([P("Z0 Z1", 3), P("Z1 Z2", 3)])
        assert certify_program(y_model(), prog).passed

    def test_forward_fails(self):
        rep = certify_program(y_model(), CircuitProgram(Task.INVERT, 3, (QUERY,)))
        assert rep.verdict == "fail" and rep.mean_fidelity < 0.9

    def test_deterministic(self):
        prog = CircuitProgram(Task.INVERT, 3, (QUERY,))
        a = certify_program(y_model(), prog, seed=42, samples=10)
        b = certify_program(y_model(), prog, seed=42, samples=10)
        assert a.per_sample == b.per_sample
        assert certify_program(y_model(), prog, seed=43, samples=10).per_sample != a.per_sample

    def test_per_sample_streams_independent_of_count(self):
        prog = CircuitProgram(Task.INVERT, 3, (QUERY,))
        few = certify_program(y_model(), prog, seed=7, samples=3).per_sample
        many = certify_program(y_model(), prog, seed=7, samples=6).per_sample
        assert many[:3] == few

    def test_empty_program_error(self):
        with pytest.raises(ValueError):
            certify_program(y_model(), CircuitProgram(Task.INVERT, 3, ()))

    def test_report_text_and_dict(self):
        rep = certify_program(y_model(), CircuitProgram(Task.INVERT, 3, (QUERY,)), samples=3)
        d = rep.to_dict()
        assert d["verdict"] == "fail" and "per_sample" not in d
        assert "min_fidelity" in rep.to_text()

    def test_sample_rng(self):
        assert sample_rng(5, 3).random() == np.random.default_rng(5 ^ 3).random()


class TestRobustness:
    def test_complement(self):
        s = y_model()
        comp = complement_support(s)
        assert len(comp) == 63 - 6 and not (comp.keys() & s.keys())

    def test_noisy_instance_delta(self):
        s = y_model()
        base = HamiltonianInstance(s, tuple(np.arange(1.0, 7.0)))
        comp = complement_support(s)
        noisy = make_noisy_instance(base, comp, np.ones(len(comp)), 0.05)
        assert sum(abs(b) for b in noisy.noise_coefficients) / 21.0 == pytest.approx(0.05, abs=1e-12)
        with pytest.raises(ValueError):
            NoisyInstance(base, comp, noisy.noise_coefficients, 0.06)
        with pytest.raises(ValueError):
            NoisyInstance(base, s, (0.0,) * 6, 0.0)

    def test_delta_zero_exact_and_monotone(self):
        prog = synth_recursive_inverse([P("Z0 Z1", 3), P("Z1 Z2", 3)])
        tab = robustness_sweep(y_model(), prog, [0.0, 0.01, 0.1], samples=30)
        means = [r.mean_fidelity for r in tab.rows]
        assert abs(means[0] - 1) < 1e-9
        assert means[0] > means[1] > means[2]
        assert tab.to_csv().splitlines()[0] == "delta,mean_fidelity,min_fidelity,std_fidelity"
        assert infidelity_slope(tab) > 0

    def test_sampled_complement_n6(self):
        s = ising_chain(6)
        from paulinv.support import find_single_query_inverter
        prog = synth_single_query("invert", find_single_query_inverter(s))
        tab = robustness_sweep(s, prog, [0.0, 0.01], samples=3)
        assert abs(tab.rows[0].mean_fidelity - 1) < 1e-9 and tab.rows[1].mean_fidelity < 1

    def test_bad_deltas(self):
        prog = synth_single_query("invert", P("Z0", 1))
        with pytest.raises(ValueError):
            robustness_sweep(S("X0"), prog, [])
        with pytest.raises(ValueError):
            robustness_sweep(S("X0"), prog, [-0.1])


class TestLcu:
    def test_identity_unitary(self):
        assert lcu_transpose_residual(np.eye(2, dtype=complex)) < 1e-15

    def test_x_rotation_family(self):
        # for H = aX + bY a single X frame already transposes
        rng = np.random.default_rng(6)
        x, y = dense_matrix(P("X0", 1)), dense_matrix(P("Y0", 1))
        a, b = rng.standard_normal(2)
        u = evolution(a * x + b * y)
        assert np.allclose(x @ u @ x, u.T)
        assert lcu_transpose_residual(u) < 1e-12

    def test_random(self):
        assert lcu_transpose_identity_check(samples=100, seed=0)
