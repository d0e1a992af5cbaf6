import math
import random
from fractions import Fraction

import numpy as np
import pytest

from jmatrix import jacspec
from jmatrix.errors import ValidationError
from jmatrix.jacspec import (
    JacobiOperator,
    QuadratureRule,
    adaptive_integrate,
    berezanskii_test,
    eig_block,
    eval_pn,
    eval_pn_scaled,
    gauss_legendre_rule,
    golub_welsch,
    split_blocks,
    symmetric_tridiagonal_eig,
)
from jmatrix.opfamilies import Family, family_jacobi_operator


def const_op(a_seq, b_seq):
    return JacobiOperator.from_sequences(a_seq, b_seq)


class TestSplitBlocks:
    def test_simple_zero(self):
        J = const_op([1.0, 0.0, 1.0, 1.0, 1.0], [0.0] * 6)
        bd = split_blocks(J, 5)
        assert bd.blocks == ((0, 2),)
        assert bd.tail_start == 2
        assert bd.dimensions() == (2,)

    def test_morse_boundary(self):
        from jmatrix.morse import build_morse_model, morse_jacobi_operator

        J = morse_jacobi_operator(build_morse_model("9/4"))
        bd = split_blocks(J, 8)
        assert bd.boundaries == (-1, 1)
        assert bd.blocks == ((0, 2),)

    def test_even_band_boundary_dimension(self):
        # upper coefficient carries the integer factor (2n - m); for m = 2k
        # the first invariant block has dimension k + 1
        m = 6
        k = m // 2

        def a(n):
            factor = 2 * n - m
            if factor == 0:
                return 0.0
            return math.sqrt(abs(factor * (2 * n + m + 1) * (2 * n + 2 + m) * (2 * n + 1 - m))) / 8.0

        J = JacobiOperator(a=a, b=lambda n: float(n * n))
        bd = split_blocks(J, 12)
        assert bd.blocks[0] == (0, k + 1)

    def test_exact_zero_entries(self):
        J = JacobiOperator(a=lambda n: Fraction(0) if n == 2 else Fraction(1), b=lambda n: Fraction(0))
        bd = split_blocks(J, 6)
        assert bd.boundaries == (-1, 2)

    def test_block_union_covers_scan(self):
        rng = random.Random(11)
        a = [rng.choice([0.0, 1.3, 0.7]) for _ in range(30)]
        J = JacobiOperator(a=lambda n: a[n], b=lambda n: 0.0)
        bd = split_blocks(J, 30)
        covered = sum(bd.dimensions())
        tail = 30 - (bd.tail_start if bd.tail_start is not None else 30)
        assert covered + (30 - covered) == 30
        if bd.tail_start is not None:
            assert covered == bd.tail_start


class TestEigBlock:
    def test_single_entry(self):
        J = const_op([], [4.25])
        r = eig_block(J, (0, 1))
        assert r.eigenvalues[0] == 4.25

    def test_two_by_two_oracle(self):
        # trace -3.625, det 1.72265625 by hand
        J = const_op([math.sqrt(1.5)], [-2.0625, -1.5625])
        r = eig_block(J, (0, 2))
        assert np.allclose(r.eigenvalues, [-3.0625, -0.5625], atol=1e-12)

    def test_random_blocks_match_dense_oracle(self):
        rng = random.Random(31)
        for _ in range(12):
            n = 8
            d = [rng.uniform(-3, 3) for _ in range(n)]
            e = [rng.uniform(0.2, 2.0) for _ in range(n - 1)]
            w, V = symmetric_tridiagonal_eig(d, e)
            M = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
            w_ref = np.linalg.eigh(M)[0]
            assert np.max(np.abs(w - w_ref)) <= 1e-11 * max(1.0, np.max(np.abs(w_ref)))
            assert np.max(np.abs(M @ V - V @ np.diag(w))) <= 1e-10

    def test_sign_flip_similarity_invariance(self):
        rng = random.Random(13)
        d = [rng.uniform(-2, 2) for _ in range(7)]
        e = [rng.uniform(0.1, 1.5) for _ in range(6)]
        w1, _ = symmetric_tridiagonal_eig(d, e)
        w2, _ = symmetric_tridiagonal_eig(d, [-x for x in e])
        assert np.max(np.abs(np.array(w1) - np.array(w2))) <= 1e-11


class TestEvalPn:
    def test_p0_and_p1(self):
        J = const_op([2.0, 1.0], [0.5, 0.0, 0.0])
        vals = eval_pn(J, 1.7, 2)
        assert vals[0] == 1.0
        assert vals[1] == (1.7 - 0.5) / 2.0

    def test_vanishes_at_block_eigenvalues(self):
        J = const_op([math.sqrt(1.5)], [-2.0625, -1.5625])
        r = eig_block(J, (0, 2))
        Junb = JacobiOperator(a=lambda n: math.sqrt(1.5) if n == 0 else 1.0,
                              b=lambda n: [-2.0625, -1.5625][n] if n < 2 else 0.0)
        for lam in r.eigenvalues:
            vals = eval_pn(Junb, lam, 2)
            assert abs(vals[2]) <= 1e-9 * max(1.0, abs(lam))

    def test_break_reported(self):
        J = JacobiOperator(a=lambda n: 0.0 if n == 1 else 1.0, b=lambda n: 0.0)
        with pytest.raises(ValidationError, match="index 1"):
            eval_pn(J, 0.3, 4)

    def test_scaled_agrees_where_finite(self):
        J = JacobiOperator(a=lambda n: 0.5, b=lambda n: 0.0)
        plain = eval_pn(J, 1.9, 40)
        scaled = eval_pn_scaled(J, 1.9, 40)
        for p, (s, logmag) in zip(plain, scaled):
            if p != 0.0 and abs(p) < 1e300:
                assert abs(p - s * math.exp(logmag)) <= 1e-10 * abs(p)


class TestGolubWelsch:
    def test_legendre_two_point(self):
        J, mass = family_jacobi_operator(Family.jacobi(0, 0))
        rule = golub_welsch(J, 2, mass)
        assert np.allclose(rule.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-14)
        assert np.allclose(rule.weights, [1.0, 1.0], atol=1e-14)

    def test_chebyshev_nodes(self):
        J, mass = family_jacobi_operator(Family.chebyshev_t())
        rule = golub_welsch(J, 3, mass)
        want = sorted(math.cos(math.pi * (2 * k - 1) / 6) for k in (1, 2, 3))
        assert np.allclose(rule.nodes, want, atol=1e-14)

    def test_gauss_exactness_top_degree(self):
        J, mass = family_jacobi_operator(Family.laguerre(0))
        for n in (1, 3, 6):
            rule = golub_welsch(J, n, mass)
            got = rule.integrate(lambda x: x ** (2 * n - 1))
            want = math.factorial(2 * n - 1)
            assert abs(got - want) <= 1e-12 * want

    def test_positive_offdiagonal_required(self):
        J = JacobiOperator(a=lambda n: -1.0, b=lambda n: 0.0)
        with pytest.raises(ValidationError):
            golub_welsch(J, 3, 1.0)

    def test_rule_validation(self):
        with pytest.raises(ValidationError):
            QuadratureRule(nodes=np.array([0.0]), weights=np.array([-1.0]), total_mass=-1.0)
        with pytest.raises(ValidationError):
            QuadratureRule(nodes=np.array([0.0]), weights=np.array([1.0]), total_mass=2.0)


class TestIntegrate:
    def test_two_point_rule_exact_on_quadratic(self):
        rule = gauss_legendre_rule(2, -1.0, 1.0)
        assert abs(rule.integrate(lambda x: x**2) - 2.0 / 3.0) <= 1e-15

    def test_chebyshev_orthogonality(self):
        J, mass = family_jacobi_operator(Family.chebyshev_t())
        rule = golub_welsch(J, 12, mass)
        val = rule.integrate(lambda x: (2 * x**2 - 1) * (4 * x**3 - 3 * x))
        assert abs(val) <= 1e-12

    def test_adaptive_matches_closed_form(self):
        got = adaptive_integrate(lambda x: np.exp(-x) * np.sin(x), 0.0, 20.0, rtol=1e-12)
        want = 0.5 * (1 - math.exp(-20.0) * (math.sin(20.0) + math.cos(20.0)))
        assert abs(got - want) <= 1e-11


class TestBoundednessDiagnostic:
    def test_bounded_sequences_report_a_sign(self):
        J = JacobiOperator(a=lambda n: 1.0, b=lambda n: math.sin(0.1 * n))
        rep = berezanskii_test(J, 200)
        assert rep.sign in (+1, -1)
        assert rep.strictly_bounded

    def test_one_sided_growth_selects_bounded_branch(self):
        # diagonal grows like +n^2: the minus branch is bounded above
        J = JacobiOperator(a=lambda n: 0.5 * n**2 + 1.0, b=lambda n: 1.5 * n**2)
        rep = berezanskii_test(J, 300)
        assert rep.sign == -1 and rep.strictly_bounded

    def test_both_growing_falls_back_to_slower_branch(self):
        J = JacobiOperator(a=lambda n: 0.5 * n**2 + 1.0, b=lambda n: 0.5 * n**2)
        rep = berezanskii_test(J, 300)
        assert rep.sign == -1 and not rep.strictly_bounded
        lead_plus, lead_minus = rep.leading
        assert lead_plus > lead_minus > 0

    def test_margin_trace_present(self):
        J = JacobiOperator(a=lambda n: 1.0, b=lambda n: 0.0)
        rep = berezanskii_test(J, 100)
        assert len(rep.margin_trace) > 10
        assert all(m >= 0.0 for _, m in rep.margin_trace)
