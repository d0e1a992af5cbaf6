import math
from fractions import Fraction

import numpy as np
import pytest

from jmatrix import jacspec, morse
from jmatrix.errors import ValidationError
from jmatrix.morse import (
    action_residual,
    bound_state_energies,
    bound_states,
    build_morse_model,
    conjugated_operator,
    continuous_polys,
    discrete_eigvectors,
    eval_basis,
    eval_basis_log,
    expansion_identity,
    morse_jacobi_operator,
    parseval_check,
    schrodinger_tridiag,
)
from jmatrix.polycore import Mode, Polynomial
from jmatrix.tdop import tridiagonalize

F = Fraction


class TestModel:
    def test_counts(self):
        assert build_morse_model(2.25).N == 2
        assert build_morse_model(5.7).N == 6
        assert build_morse_model(0.4).N == 0

    def test_half_integer_rejected(self):
        for b in (0.5, 1.5, F(5, 2), "7/2"):
            with pytest.raises(ValidationError):
                build_morse_model(b)

    def test_positive_required(self):
        with pytest.raises(ValidationError):
            build_morse_model(-1.0)

    def test_exact_parameter_kept(self):
        m = build_morse_model("9/4")
        assert m.b_exact == F(9, 4) and m.b == 2.25
        assert m.alpha_exact == F(1, 2)
        assert build_morse_model(2.2).b_exact is None

    def test_basis_parameter_above_minus_one(self):
        for b in ("9/4", "1/5", "19/5", 7):
            assert build_morse_model(b).alpha > -1


class TestConjugatedOperator:
    def test_coefficients(self):
        op = conjugated_operator(build_morse_model("9/4"))
        assert op.A == Polynomial([0, 0, -1])
        assert op.C == Polynomial([F(-9, 16), -1])  # -(N-b-1/2)^2 = -0.5625, slope 1-N
        assert op.B.coeff(2) == 1 and op.strict

    def test_tridiagonalization_exact(self):
        for b in ("1", "9/4", "13/5"):
            op = conjugated_operator(build_morse_model(b))
            tri = tridiagonalize(op, 15)
            tri.verify(op)

    def test_exact_needs_rational(self):
        with pytest.raises(ValidationError):
            conjugated_operator(build_morse_model(2.2), Mode.EXACT)


class TestTridiag:
    def test_reference_values(self):
        td = schrodinger_tridiag(build_morse_model("9/4"), 6)
        assert td.diag[0] == -2.0625 and td.diag[1] == -1.5625
        assert abs(td.a[0] - math.sqrt(1.5)) <= 1e-15

    def test_split_entry_exact_zero(self):
        for b in ("9/4", "19/5", 5.7):
            model = build_morse_model(b)
            td = schrodinger_tridiag(model, model.N + 3)
            assert td.a[model.N - 1] == 0.0
            assert td.split_index == model.N - 1

    def test_band_symmetry(self):
        model = build_morse_model("9/4")
        td = schrodinger_tridiag(model, 51)
        for n in range(1, 51):
            upper_below = td.a[n - 1]
            assert abs(td.lower_entry(n) - upper_below) <= 1e-13 * max(1.0, abs(upper_below))

    def test_continuum_offset_rows(self):
        model = build_morse_model("9/4")
        td = schrodinger_tridiag(model, 12)
        for n in range(6):
            upper, diag, lower = morse._continuum_coeffs(model, n)
            assert abs(abs(td.a[model.N + n]) - upper) <= 1e-13 * upper
            assert abs(td.diag[model.N + n] - diag) <= 1e-13 * max(1.0, abs(diag))

    def test_needs_to_reach_the_split(self):
        with pytest.raises(ValidationError):
            schrodinger_tridiag(build_morse_model("19/5"), 2)


class TestBoundStates:
    def test_reference_spectrum(self):
        r = bound_states(build_morse_model("9/4"))
        assert np.allclose(r.eigenvalues, [-3.0625, -0.5625], atol=1e-12)

    def test_empty_when_shallow(self):
        r = bound_states(build_morse_model(0.4))
        assert r.eigenvalues.size == 0

    def test_deep_well(self):
        r = bound_states(build_morse_model(5.7))
        assert r.eigenvalues.size == 6
        assert abs(r.eigenvalues[0] + 5.2**2) <= 1e-10

    @pytest.mark.parametrize("b", [1.2, 2.25, 3.8, 5.7])
    def test_closed_form_agreement(self, b):
        model = build_morse_model(b)
        r = bound_states(model)
        for got, want in zip(r.eigenvalues, bound_state_energies(model)):
            assert abs(got - want) <= 1e-10

    def test_block_boundary_found_by_scan(self):
        model = build_morse_model("19/5")
        bd = jacspec.split_blocks(morse_jacobi_operator(model), 10)
        assert bd.blocks[0] == (0, model.N)


class TestBasis:
    def test_ground_profile_is_pure_exponential(self):
        model = build_morse_model("9/4")
        p = model.b - model.N + 0.5
        for x in (-1.0, 0.0, 2.0):
            want = (2 * model.b) ** p / math.sqrt(math.gamma(model.alpha + 1)) * math.exp(
                -p * x - model.b * math.exp(-x)
            )
            assert abs(eval_basis(model, 0, x) - want) <= 1e-13 * abs(want)

    def test_tail_decay(self):
        model = build_morse_model("9/4")
        for n in range(4):
            assert abs(eval_basis(model, n, -30.0)) < 1e-12
            assert abs(eval_basis(model, n, 45.0)) < 1e-12
            # the right tail decays like exp(-(b-N+1/2) x): still small at 30
            assert abs(eval_basis(model, n, 30.0)) < 1e-6

    def test_log_form_deep_in_tail(self):
        model = build_morse_model("9/4")
        sign, logmag = eval_basis_log(model, 2, -40.0)
        assert logmag < -700  # underflows a double, but the log stays finite

    def test_orthonormality(self):
        model = build_morse_model("9/4")

        def pairing(i, j):
            f = lambda xs: np.array(
                [eval_basis(model, i, x) * eval_basis(model, j, x) for x in np.atleast_1d(xs)]
            )
            return jacspec.adaptive_integrate(f, -8.0, 45.0, rtol=1e-9, atol=1e-10)

        for i in range(4):
            for j in range(i, 4):
                want = 1.0 if i == j else 0.0
                assert abs(pairing(i, j) - want) <= 1e-8


class TestActionResidual:
    def test_reference_grid(self):
        model = build_morse_model("9/4")
        for n in range(6):
            assert action_residual(model, n, samples=(-2, -1, 0, 1, 2)) <= 1e-9

    def test_default_grid_through_split(self):
        model = build_morse_model("9/4")
        assert action_residual(model, model.N) <= 1e-9  # a_{N-1} = 0 row

    def test_far_left_sample_no_cancellation(self):
        model = build_morse_model("9/4")
        assert action_residual(model, 3, samples=(-5.0,)) <= 1e-9


class TestDiscreteEigvectors:
    def test_first_component_one(self):
        model = build_morse_model("19/5")
        for lvl in range(model.N):
            assert discrete_eigvectors(model, lvl)[0] == 1.0

    def test_two_level_direction(self):
        model = build_morse_model("9/4")
        v = discrete_eigvectors(model, 0)
        assert abs(v[1] + 2 * math.sqrt(1.5) / 3) <= 1e-12

    def test_single_level_trivial(self):
        assert discrete_eigvectors(build_morse_model("1"), 0) == [1.0]

    @pytest.mark.parametrize("b", ["9/4", 3.8])
    def test_parallel_to_eigensolver(self, b):
        model = build_morse_model(b)
        r = bound_states(model)
        for lvl in range(model.N):
            v = np.array(discrete_eigvectors(model, lvl))  # raises if not parallel
            cos = abs(v @ r.eigenvectors[:, lvl]) / np.linalg.norm(v)
            assert cos >= 1 - 1e-9

    def test_range_checked(self):
        with pytest.raises(ValidationError):
            discrete_eigvectors(build_morse_model("9/4"), 2)


class TestExpansionIdentity:
    def test_single_level_collapses(self):
        r = expansion_identity(build_morse_model("1"), 0)
        assert r.C == 1 and r.max_residual == 0.0

    def test_reference_constant(self):
        r = expansion_identity(build_morse_model("9/4"), 0)
        assert r.C == F(2, 3)
        assert r.max_residual == 0.0

    @pytest.mark.parametrize("b", ["1", "9/4", "13/5", "19/5"])
    def test_exact_zero_all_levels(self, b):
        model = build_morse_model(b)
        for lvl in range(model.N):
            r = expansion_identity(model, lvl)
            assert r.exact and r.max_residual == 0.0

    def test_leading_coefficients_agree(self):
        # independent confirmation of the constant from the top coefficient
        model = build_morse_model("19/5")
        from jmatrix.opfamilies import Family, dual_hahn_value, family_polynomial

        N, b = model.N, model.b_exact
        alpha = 2 * b - 2 * N
        for lvl in range(N):
            r_top = dual_hahn_value(N - 1, N - 1 - lvl, alpha, F(0), N - 1)
            lead_lhs = r_top * family_polynomial(Family.laguerre(alpha), N - 1).leading()
            rhs_poly = family_polynomial(Family.laguerre(2 * b - 2 * lvl - 1), lvl)
            lead_rhs = expansion_identity(model, lvl).C * rhs_poly.leading()
            assert lead_lhs == lead_rhs

    def test_float_fallback_small_residual(self):
        model = build_morse_model(2.25)
        r = expansion_identity(model, 0)
        assert not r.exact and r.max_residual <= 1e-10


class TestContinuum:
    def test_p0_is_one(self):
        cp = continuous_polys(build_morse_model("9/4"), 5, 0.9)
        assert cp.recurrence[0] == 1.0 and cp.normalized[0] == 1.0

    @pytest.mark.parametrize("b,n_max", [("9/4", 10), (3.8, 8)])
    def test_two_routes_agree(self, b, n_max):
        cp = continuous_polys(build_morse_model(b), n_max, 1.3)
        assert cp.max_rel_diff <= 1e-10

    def test_parameters_strictly_positive(self):
        for b in ("9/4", "19/5", 5.7, "1/5"):
            model = build_morse_model(b)
            trio = (model.b + 0.5, model.N - model.b + 0.5, model.b - model.N + 0.5)
            assert all(v > 0 for v in trio)

    def test_parseval_reference_cases(self):
        model = build_morse_model("9/4")
        assert abs(parseval_check(model, 0, 0) - 1.0) <= 1e-8
        assert abs(parseval_check(model, 0, 1)) <= 1e-8
        assert abs(parseval_check(model, 5, 5) - 1.0) <= 1e-7

    def test_parseval_range_guard(self):
        with pytest.raises(ValidationError):
            parseval_check(build_morse_model("9/4"), 11, 0)
