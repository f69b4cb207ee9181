import numpy as np
import pytest

from paulinv.conjugation import ConjugationCertificate, build_conjugation_certificate, synth_conjugate
from paulinv.pauli import all_paulis
from paulinv.program import Task
from paulinv.simulate import certify_program
from paulinv.support import PauliSupport
from paulinv.synth import CertificateError, synth_single_query

from supports import P, S, y_full


class TestCertificates:
    def test_seven_term_y(self):
        s = y_full(3)
        cert = build_conjugation_certificate(s)
        assert cert.kind == "split"
        assert [str(s[j]) for j in cert.s0_indices] == ["Y0", "Y1", "Y0 Y1"]
        assert cert.v0 == P("X2", 3) and cert.v0_prime == P("X0 X1", 3)
        assert str(cert.s0_subcircuit) == "U X0 U X0X1 U X1"
        assert cert.min_fidelity >= 1 - 1e-9
        prog = synth_conjugate(cert, s)
        assert str(prog) == "X0X1 U X0X1 U X2 U X0X2 U X2 U X0X1X2 U X2 U X1X2"
        assert prog.query_count == 7 == 2 * cert.s0_subcircuit.query_count + 1

    def test_single_qubit_y(self):
        s = S("X0", "Y0", "Z0")
        cert = build_conjugation_certificate(s)
        assert cert.kind == "single" and cert.single_query_v == P("Y0", 1)
        assert str(synth_conjugate(cert)) == "Y0 U Y0"

    def test_mixed_example_none(self):
        assert build_conjugation_certificate(S("X0", "Z0", "Y1", "Y0 Y1")) is None

    def test_q1_subcircuit_three_queries(self):
        # S0 = {Y0} conjugates with one query (identity frame), so the whole needs 3
        s = S("Y0", "Y1", "Y0 Y1")
        cert = build_conjugation_certificate(s)
        assert cert.kind == "split" and cert.s0_subcircuit.query_count == 1
        assert cert.query_count == 3 == synth_conjugate(cert).query_count

    def test_violations(self):
        s = y_full(3)
        cert = build_conjugation_certificate(s)
        bad = ConjugationCertificate("split", None, cert.s0_indices, cert.s1_indices, cert.v0,
                                     P("X0", 3), cert.s0_subcircuit)
        assert bad.violations(s)
        with pytest.raises(CertificateError):
            synth_conjugate(bad, s)
        assert not cert.violations(s)

    def test_user_subcircuit(self):
        # S0 = {Y0 Y1} alone has a 1-query conjugator; a provider is never consulted
        calls = []

        def provider(sub):
            calls.append(sub)
            return None

        s = S("Y0 Y1", "Y0 Y2", "Y1 Y2", n=3)
        cert = build_conjugation_certificate(s, subcircuit_provider=provider)
        assert cert is not None and calls == []

    def test_random_supports_validated(self):
        rng = np.random.default_rng(31)
        words = list(all_paulis(3, include_identity=False))
        found = 0
        for _ in range(80):
            idx = rng.choice(len(words), size=int(rng.integers(2, 8)), replace=False)
            s = PauliSupport(3, tuple(words[i] for i in sorted(idx)))
            cert = build_conjugation_certificate(s)
            if cert is None:
                continue
            found += 1
            assert not cert.violations(s)
            prog = synth_conjugate(cert)
            assert prog.query_count == cert.query_count
            assert certify_program(s, prog, Task.CONJUGATE, samples=4, seed=9).passed
        assert found > 20
