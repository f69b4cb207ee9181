import itertools

import numpy as np
import pytest

from paulinv.pauli import PauliError, PauliOperator, all_paulis, commutes, parse_pauli, y_parity
from paulinv.support import (
    AntiCommuteCover,
    CapExceededError,
    PauliSupport,
    SplitCertificate,
    SupportFormatError,
    build_constraint_rows,
    central_indices,
    check_pairwise_commuting,
    enumerate_kernel_splits,
    find_anticommute_cover,
    find_identity_subset_witness,
    find_single_query_conjugator,
    find_single_query_inverter,
    find_single_query_transposer,
    find_split_certificate,
    iter_subsets,
    load_support,
    odd_identity_subset_exists,
    parse_support,
    render_support,
    solve_commutation_pattern,
)

from supports import (
    P,
    S,
    cluster_ising,
    diagonal2,
    eight_term,
    ising_chain,
    odd_cycle7,
    triangle_ising,
    y_full,
    y_model,
)


def random_support(rng, n, m):
    words = list(all_paulis(n, include_identity=False))
    idx = rng.choice(len(words), size=min(m, len(words)), replace=False)
    return PauliSupport(n, tuple(words[i] for i in sorted(idx)))


def realises(v, support, pattern):
    return all((not commutes(v, t)) == bool(r) for t, r in zip(support.terms, pattern))


class TestSupportType:
    def test_dedup_and_phase_strip(self):
        s = PauliSupport(2, (PauliOperator(2, 1, 0, 2), PauliOperator(2, 1, 0), PauliOperator(2, 0, 1)))
        assert len(s) == 2 and all(t.phase_exp == 0 for t in s)

    def test_rejects_identity_and_mismatch(self):
        with pytest.raises(PauliError):
            PauliSupport(1, (PauliOperator(1, 0, 0),))
        with pytest.raises(PauliError):
            PauliSupport(2, (PauliOperator(1, 1, 0),))

    def test_digest_stable(self):
        assert y_model().digest() == y_model().digest()
        assert y_model().digest() != diagonal2().digest()


class TestFileFormat:
    def test_parse_comments_and_header(self):
        s = parse_support("# Ising\nqubits: 4\nZ0 Z1\n\nX0  # field\n")
        assert s.n_qubits == 4 and [str(t) for t in s] == ["Z0 Z1", "X0"]

    def test_inferred_qubits(self):
        assert parse_support("X0\nZ3\n").n_qubits == 4

    @pytest.mark.parametrize("text,line", [
        ("X0\nQ1\n", 2),
        ("X0\n\nX1 X1\n", 3),
        ("qubits: 2\nX0\nZ5\n", 3),
        ("X0\nI\n", 2),
        ("X0\nqubits: 2\n", 2),
    ])
    def test_errors_carry_line(self, text, line):
        with pytest.raises(SupportFormatError) as exc:
            parse_support(text)
        assert exc.value.line == line
        assert f"line {line}" in str(exc.value)

    def test_empty_file(self):
        with pytest.raises(SupportFormatError):
            parse_support("# nothing\n")

    def test_round_trip(self, tmp_path):
        s = cluster_ising()
        f = tmp_path / "s.txt"
        f.write_text(render_support(s))
        assert load_support(f) == s


class TestConstraintRows:
    def test_single_x(self):
        a = build_constraint_rows(S("X0"))
        assert a.to_dense().tolist() == [[0, 1]]
        # dotted with Z0 = [x|z] = [0|1] gives 1, i.e. anti-commutes
        assert a.row_dot([0, 1]).tolist() == [1]
        assert not commutes(P("X0", 1), P("Z0", 1))

    def test_solution_set_is_anticommuting_set(self):
        s = S("Z0 Z1", "X0", "X1")
        a = build_constraint_rows(s)
        for v in all_paulis(2):
            bits = [(v.x_bits >> k) & 1 for k in range(2)] + [(v.z_bits >> k) & 1 for k in range(2)]
            solves = bool(a.row_dot(bits).all())
            assert solves == all(not commutes(v, t) for t in s)

    def test_empty(self):
        a = build_constraint_rows(PauliSupport(2, ()))
        assert a.rows == 0

    def test_wide_supports(self):
        # 40 qubits exceed one packed word
        n = 40
        s = S("X0 Z39", "Y20", n=n)
        v = solve_commutation_pattern(s, [1, 1])
        assert v is not None and all(not commutes(v, t) for t in s)


class TestSingleQuery:
    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_ising_chain_inverter(self, n):
        s = ising_chain(n)
        v = find_single_query_inverter(s)
        assert v is not None and v.phase_exp == 0
        assert all(not commutes(v, t) for t in s)
        # the hand-built staggered frame also works
        from supports import ising_chain_v
        w = ising_chain_v(n)
        assert all(not commutes(w, t) for t in s)

    def test_xyz_no_inverter(self):
        s = S("X0", "Y0", "Z0")
        assert find_single_query_inverter(s) is None
        # brute force over all one-qubit words
        assert not any(all(not commutes(v, t) for t in s) for v in all_paulis(1))

    def test_mixed_example_inverter(self):
        s = S("X0", "Z0", "Y1", "Y0 Y1")
        v = find_single_query_inverter(s)
        assert v is not None and all(not commutes(v, t) for t in s)
        assert all(not commutes(P("Y0 Z1", 2), t) for t in s)

    def test_conjugator_examples(self):
        assert find_single_query_conjugator(S("X0", "Y0", "Z0")) == P("Y0", 1)
        assert find_single_query_conjugator(S("Y0", "Y1", "Y0 Y1")) is None
        v = find_single_query_conjugator(S("X0"))
        assert v is not None and not commutes(v, P("X0", 1))

    def test_transposer_examples(self):
        assert find_single_query_transposer(S("X0", "Y0")) == P("X0", 1)
        v = find_single_query_transposer(S("Y0", "Y1", "Y0 Y1"))
        assert v is not None
        assert realises(P("Z0 Z1", 2), S("Y0", "Y1", "Y0 Y1"), [1, 1, 0])
        assert find_single_query_transposer(S("Z0")).is_identity

    def test_patterns_random(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            s = random_support(rng, int(rng.integers(1, 4)), int(rng.integers(1, 7)))
            c = find_single_query_conjugator(s)
            if c is not None:
                assert realises(c, s, [1 - y_parity(t) for t in s])
            t = find_single_query_transposer(s)
            if t is not None:
                assert realises(t, s, [y_parity(u) for u in s])


class TestOracle:
    def test_examples(self):
        assert odd_identity_subset_exists(S("X0", "Y0", "Z0"))
        assert not odd_identity_subset_exists(S("Z0 Z1", "X0", "X1"))
        assert odd_identity_subset_exists(triangle_ising())

    def test_triangle_witness(self):
        s = triangle_ising()
        wit = find_identity_subset_witness(s)
        assert [str(s[j]) for j in wit] == ["Z0 Z1", "Z1 Z2", "Z0 Z2"]

    def test_cap(self):
        with pytest.raises(CapExceededError):
            odd_identity_subset_exists(y_full(5), cap=24)

    def test_weighted_matches_single_query(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            s = random_support(rng, int(rng.integers(1, 4)), int(rng.integers(1, 8)))
            conj = find_identity_subset_witness(s, weights=[1 - y_parity(t) for t in s])
            assert (conj is None) == (find_single_query_conjugator(s) is not None)
            tr = find_identity_subset_witness(s, weights=[y_parity(t) for t in s])
            assert (tr is None) == (find_single_query_transposer(s) is not None)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_max_support_size(self, n):
        # a single frame can invert at most 2^(2N-1) terms
        for v in list(all_paulis(n))[1:]:
            anti = PauliSupport(n, tuple(p for p in all_paulis(n) if not commutes(p, v)))
            assert len(anti) == 2 ** (2 * n - 1)
            assert find_single_query_inverter(anti) is not None
            if n <= 2:
                assert not odd_identity_subset_exists(anti)


class TestCover:
    def test_y_model_size_two(self):
        s = y_model()
        cover = find_anticommute_cover(s)
        assert len(cover) == 2 and cover.is_valid_for(s)
        handmade = AntiCommuteCover((P("Z0 Z1", 3), P("Z1 Z2", 3)),
                                    {j: (0 if not commutes(t, P("Z0 Z1", 3)) else 1) for j, t in enumerate(s)})
        assert handmade.is_valid_for(s)

    def test_single_x(self):
        cover = find_anticommute_cover(S("X0"))
        assert len(cover) == 1 and not commutes(cover.elements[0], P("X0", 1))

    def test_diagonal_needs_two(self):
        s = diagonal2()
        cover = find_anticommute_cover(s)
        assert len(cover) == 2 and cover.is_valid_for(s)
        assert not any(all(not commutes(v, t) for t in s) for v in all_paulis(2))

    @pytest.mark.parametrize("n,size", [(3, 3), (4, 4)])
    def test_y_full(self, n, size):
        cover = find_anticommute_cover(y_full(n))
        assert len(cover) == size and cover.is_valid_for(y_full(n))

    def test_random_properties(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            s = random_support(rng, int(rng.integers(1, 5)), int(rng.integers(1, 9)))
            cover = find_anticommute_cover(s)
            assert cover.is_valid_for(s)
            assert 1 <= len(cover) <= len(s)
            assert (len(cover) == 1) == (find_single_query_inverter(s) is not None)

    def test_large_n_uses_restarts(self):
        rng = np.random.default_rng(9)
        s = random_support(rng, 7, 40)
        cover = find_anticommute_cover(s, seed=1)
        assert cover.is_valid_for(s)
        assert find_anticommute_cover(s, seed=1) == cover


class TestCommutation:
    def test_pairwise(self):
        assert check_pairwise_commuting(S("Y0", "Y1", "Y0 Y1"))
        assert not check_pairwise_commuting(S("X0", "Z0"))
        assert check_pairwise_commuting(y_model())

    def test_center(self):
        s = eight_term()
        assert [str(s[j]) for j in central_indices(s)] == ["X1", "X0 X2", "X0 X1 X2"]


class TestSplit:
    def test_odd_cycle(self):
        s = odd_cycle7()
        cert = find_split_certificate(s)
        assert cert is not None and cert.is_valid_for(s)
        assert [str(s[j]) for j in cert.s0_indices] == ["Z0 Z6"]
        assert len(cert.w) == 1 and cert.query_count == 3
        handmade = SplitCertificate(cert.s0_indices, cert.s1_indices, P("Y1 Z2 Y3 Z4 Y5", 7),
                                    AntiCommuteCover((P("X0", 7),), {0: 0}))
        assert handmade.is_valid_for(s)

    def test_eight_term(self):
        s = eight_term()
        cert = find_split_certificate(s)
        assert cert is not None and cert.is_valid_for(s)
        assert [str(s[j]) for j in cert.s0_indices] == ["X1", "X0 X2", "X0 X1 X2"]
        assert len(cert.w) == 2 and cert.query_count == 7
        sub = s.subset(cert.s0_indices)
        w = (P("Y1", 3), P("Y2", 3))
        cover = AntiCommuteCover(w, {j: next(k for k, e in enumerate(w) if not commutes(t, e))
                                     for j, t in enumerate(sub)})
        handmade = SplitCertificate(cert.s0_indices, cert.s1_indices, P("Z0 X1 Y2", 3), cover)
        assert handmade.is_valid_for(s)

    def test_commuting_routes_elsewhere(self):
        assert find_split_certificate(y_model()) is None

    def test_cluster_ising_has_a_split(self):
        s = cluster_ising()
        cert = find_split_certificate(s)
        assert cert is not None and cert.is_valid_for(s)
        assert cert.query_count == 3
        # the hand-written frames break the split hypotheses on X0
        assert commutes(P("Y1", 3), P("X0", 3))

    def test_triangle_none(self):
        assert find_split_certificate(triangle_ising()) is None

    def test_cap_distinct(self):
        with pytest.raises(CapExceededError):
            find_split_certificate(odd_cycle7(), cap=5)

    def test_violations_reported(self):
        s = eight_term()
        cert = find_split_certificate(s)
        bad = SplitCertificate(cert.s0_indices, cert.s1_indices, P("X0", 3), cert.w)
        assert bad.violations(s)

    def test_kernel_splits_match_bruteforce(self):
        rng = np.random.default_rng(21)
        for _ in range(60):
            s = random_support(rng, int(rng.integers(1, 4)), int(rng.integers(2, 7)))
            m = len(s)
            fast = enumerate_kernel_splits(s)
            slow = []
            for sub in iter_subsets(m, m - 1):
                pattern = [0 if j in sub else 1 for j in range(m)]
                if solve_commutation_pattern(s, pattern) is not None:
                    slow.append(sub)
            assert fast == slow

    def test_random_certificates_valid(self):
        rng = np.random.default_rng(22)
        for _ in range(100):
            s = random_support(rng, int(rng.integers(2, 4)), int(rng.integers(2, 8)))
            cert = find_split_certificate(s)
            if cert is not None:
                assert cert.is_valid_for(s)
                # S0 pairwise and cross commuting by direct check
                for i, j in itertools.product(cert.s0_indices, range(len(s))):
                    assert commutes(s[i], s[j])
