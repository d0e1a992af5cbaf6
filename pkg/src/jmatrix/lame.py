"""The algebraic-form Lame operator and its Chebyshev tridiagonalization.

Starting from branch values e1 + e2 + e3 = 0 and degree parameter m, the
cubic-leading-coefficient operator is normalized by the affine substitution
x = a y + b (a = (e1-e2)/2, b = (e1+e2)/2) so that two of its singular
points sit at y = -1, 1 and the third at alpha = 3 e3 / (e1 - e2).  On the
Chebyshev polynomials T_n the normalized operator acts with three bands
whose upper coefficient carries the factor (2n - m): for even integer m the
span of T_0..T_{m/2} is invariant and yields a finite spectrum, while for m
strictly inside an odd-to-even integer gap the action can be rescaled to a
symmetric Jacobi form whose coefficients grow like n^2 / 2.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import jacspec, opfamilies
from .errors import InternalConsistencyError, ValidationError
from .jacspec import BoundednessReport, JacobiOperator
from .opfamilies import Family
from .polycore import Mode, Polynomial, derivative_op, second_derivative_op
from .tdop import TDOperator, validate_td

__all__ = [
    "LameModel",
    "build_lame_model",
    "algebraic_operator",
    "transformed_operator",
    "cheb_tridiag_coeffs",
    "chebyshev_poly",
    "tridiag_residual",
    "LameEvenSpectrum",
    "even_spectrum",
    "even_eigenfunction_residual",
    "OrthonormalForm",
    "orthonormal_form",
    "LameDiagnostic",
    "selfadjoint_diagnostic",
]


def _maybe_exact(v) -> Fraction | None:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (Fraction, numbers.Integral)):
        return Fraction(v)
    return None


@dataclass(frozen=True)
class LameModel:
    """Validated branch values and degree parameter, with derived constants.

    Exact mirrors (``*_exact``) are kept when every input was rational;
    the float fields drive spectra and diagnostics.
    """

    e: tuple[float, float, float]
    m: float
    a_affine: float
    b_affine: float
    alpha: float
    e_exact: tuple[Fraction, Fraction, Fraction] | None = None
    m_exact: Fraction | None = None

    @property
    def is_exact(self) -> bool:
        return self.e_exact is not None and self.m_exact is not None

    def exact_constants(self) -> tuple[Fraction, Fraction, Fraction]:
        """(a, b, alpha) as exact rationals; requires an exact model."""
        if not self.is_exact:
            raise ValidationError("model was not built from rational data")
        e1, e2, e3 = self.e_exact
        a = (e1 - e2) / 2
        return a, (e1 + e2) / 2, 3 * e3 / (e1 - e2)


def build_lame_model(e1, e2, e3, m) -> LameModel:
    """Validate the branch values and derive the affine normalization.

    Accepts Fractions, ints, numeric strings, or floats; exact identities
    are available when all four inputs are rational.

    Raises:
        ValidationError: for repeated branch values, a nonzero sum
            (tolerance 1e-12 of the scale), or alpha equal to +-1 (the
            normalization degenerates at those values).
    """
    exacts = [_maybe_exact(v) for v in (e1, e2, e3)]
    m_ex = _maybe_exact(m)
    ef = tuple(float(x) if x0 is None else float(x0) for x, x0 in zip((e1, e2, e3), exacts))
    mf = float(m) if m_ex is None else float(m_ex)
    scale = max(1.0, *(abs(v) for v in ef))
    if len({ef[0], ef[1], ef[2]}) != 3:
        raise ValidationError("branch values must be pairwise distinct")
    if abs(ef[0] + ef[1] + ef[2]) > 1e-12 * scale:
        raise ValidationError("branch values must sum to zero")
    a = 0.5 * (ef[0] - ef[1])
    b = 0.5 * (ef[0] + ef[1])
    alpha = 3.0 * ef[2] / (ef[0] - ef[1])
    if abs(alpha - 1.0) <= 1e-12 or abs(alpha + 1.0) <= 1e-12:
        raise ValidationError("alpha = +-1 is excluded (degenerate normalization)")
    all_exact = all(x is not None for x in exacts) and m_ex is not None
    return LameModel(
        e=ef,
        m=mf,
        a_affine=a,
        b_affine=b,
        alpha=alpha,
        e_exact=tuple(exacts) if all_exact else None,
        m_exact=m_ex if all_exact else None,
    )


def _mode_of(model: LameModel, mode: Mode | None) -> Mode:
    if mode is None:
        return Mode.EXACT if model.is_exact else Mode.FLOAT
    if mode is Mode.EXACT and not model.is_exact:
        raise ValidationError("exact operator needs rational branch values and m")
    return mode


def algebraic_operator(model: LameModel, mode: Mode | None = None) -> TDOperator:
    """The x-variable operator: A = (x-e1)(x-e2)(x-e3), B = A'/2,
    C = -m(m+1) x / 4 (the spectral parameter enters separately)."""
    mode = _mode_of(model, mode)
    es = model.e_exact if mode is Mode.EXACT else model.e
    mv = model.m_exact if mode is Mode.EXACT else model.m
    quarter = Fraction(1, 4) if mode is Mode.EXACT else 0.25
    A = Polynomial.one(mode)
    for e in es:
        A = A * Polynomial((-e, 1), mode)
    B = A.derivative() * (Fraction(1, 2) if mode is Mode.EXACT else 0.5)
    C = Polynomial((0, -quarter * mv * (mv + 1)), mode)
    return validate_td(A, B, C, derivative_op(), second_derivative_op())


def transformed_operator(model: LameModel, mode: Mode | None = None) -> TDOperator:
    """The y-variable operator after x = a y + b: leading factor
    (y-1)(y+1)(y-alpha), first-order part its half-derivative, and
    C = -m(m+1)(y + b/a)/4."""
    mode = _mode_of(model, mode)
    if mode is Mode.EXACT:
        _, b, alpha = model.exact_constants()
        boa = b / ((model.e_exact[0] - model.e_exact[1]) / 2)
        mv = model.m_exact
        quarter = Fraction(1, 4)
    else:
        alpha = model.alpha
        boa = model.b_affine / model.a_affine
        mv = model.m
        quarter = 0.25
    A = Polynomial((-1, 0, 1), mode) * Polynomial((-alpha, 1), mode)
    B = A.derivative() * (Fraction(1, 2) if mode is Mode.EXACT else 0.5)
    C = Polynomial((-quarter * mv * (mv + 1) * boa, -quarter * mv * (mv + 1)), mode)
    return validate_td(A, B, C, derivative_op(), second_derivative_op())


def chebyshev_poly(n: int, mode: Mode = Mode.EXACT) -> Polynomial:
    """T_n as an explicit coefficient polynomial."""
    return opfamilies.family_polynomial(Family.chebyshev_t(), n, mode)


def cheb_tridiag_coeffs(model: LameModel, n: int, mode: Mode | None = None):
    """Band coefficients of the normalized operator on T_n: (upper, diag, lower).

    For n >= 1: upper = (2n-m)(2n+m+1)/8, diag = -alpha n^2 - m(m+1)(b/a)/4,
    lower = (2n+m)(2n-m-1)/8.  The n = 0 row is NOT the n = 0 case of that
    formula: there upper = -m(m+1)/4 and lower is absent (None).  All
    coefficients are invariant under m -> -m-1.
    """
    if n < 0:
        raise ValidationError("index must be nonnegative")
    mode = _mode_of(model, mode)
    if mode is Mode.EXACT:
        _, b, alpha = model.exact_constants()
        a_aff, _, _ = model.exact_constants()
        boa = b / a_aff
        mv = model.m_exact
        eighth, quarter = Fraction(1, 8), Fraction(1, 4)
    else:
        alpha, boa, mv = model.alpha, model.b_affine / model.a_affine, model.m
        eighth, quarter = 0.125, 0.25
    mm1 = mv * (mv + 1)
    if n == 0:
        return (-quarter * mm1, -quarter * mm1 * boa, None)
    upper = eighth * (2 * n - mv) * (2 * n + mv + 1)
    diag = -alpha * n * n - quarter * mm1 * boa
    lower = eighth * (2 * n + mv) * (2 * n - mv - 1)
    return (upper, diag, lower)


def tridiag_residual(model: LameModel, n: int) -> Polynomial:
    """L T_n minus its three-band combination, as an exact polynomial.

    Contract: the exact zero polynomial for every n (rational model data
    required; this is the module's core correctness guarantee).
    """
    if not model.is_exact:
        raise ValidationError("exact residual needs a rational model")
    op = transformed_operator(model, Mode.EXACT)
    upper, diag, lower = cheb_tridiag_coeffs(model, n, Mode.EXACT)
    rhs = chebyshev_poly(n + 1) * upper + chebyshev_poly(n) * diag
    if lower is not None and n >= 1:
        rhs = rhs + chebyshev_poly(n - 1) * lower
    return op.apply(chebyshev_poly(n)) - rhs


@dataclass(frozen=True)
class LameEvenSpectrum:
    """Finite spectrum data for even integer m = 2k.

    ``matrix`` is the (k+1)-square coefficient-space matrix whose rows give
    E P_n in terms of P_{n-1}, P_n, P_{n+1}; ``eigenvalues`` come from the
    dense eigensolve, ``root_eigenvalues`` from the zeros of the generated
    P_{k+1}; ``pcoeffs[i]`` holds the expansion coefficients (P_0..P_k) of
    the i-th eigenfunction over T_0..T_k, normalized to P_0 = 1.
    """

    k: int
    matrix: np.ndarray
    eigenvalues: np.ndarray
    root_eigenvalues: np.ndarray
    pcoeffs: list[list[float]]


def _even_matrix(model: LameModel, k: int) -> np.ndarray:
    mat = np.zeros((k + 1, k + 1))
    for n in range(k + 1):
        _, diag, _ = cheb_tridiag_coeffs(model, n, Mode.FLOAT)
        mat[n, n] = float(diag)
        if n + 1 <= k:
            lower_next = cheb_tridiag_coeffs(model, n + 1, Mode.FLOAT)[2]
            mat[n, n + 1] = float(lower_next)
        if n >= 1:
            upper_prev = cheb_tridiag_coeffs(model, n - 1, Mode.FLOAT)[0]
            mat[n, n - 1] = float(upper_prev)
    return mat


def even_spectrum(model: LameModel) -> LameEvenSpectrum:
    """Spectrum of the operator restricted to span{T_0, ..., T_k}, m = 2k.

    Eigenvalues are computed two ways and must agree to 1e-9: (i) a dense
    eigensolve, run on the diagonally symmetrized matrix whenever every
    product of paired off-diagonals is positive (guaranteed for real alpha),
    and (ii) the roots of the polynomial P_{k+1} generated by the
    coefficient recurrence from P_0 = 1.

    Raises:
        ValidationError: m is not an even nonnegative integer.
        InternalConsistencyError: the two methods disagree, or the spectrum
            fails to be real and simple.
    """
    m_ex = model.m_exact if model.m_exact is not None else (
        Fraction(model.m) if float(model.m).is_integer() else None
    )
    if m_ex is None or m_ex.denominator != 1 or m_ex < 0 or m_ex % 2 != 0:
        raise ValidationError("finite even-case spectra need m an even nonnegative integer")
    k = int(m_ex) // 2
    mat = _even_matrix(model, k)

    products = [mat[i, i + 1] * mat[i + 1, i] for i in range(k)]
    if all(p > 0 for p in products):
        off = [math.sqrt(p) for p in products]
        w, U = jacspec.symmetric_tridiagonal_eig(np.diag(mat).copy(), off)
        eigs = np.asarray(w)
        # undo the diagonal similarity: columns of diag(d) @ U solve the original matrix
        d = np.ones(k + 1)
        for i in range(k):
            d[i + 1] = d[i] * off[i] / mat[i, i + 1]
        vecs = d[:, None] * U
    else:
        raw_w, raw_v = np.linalg.eig(mat)
        if np.any(np.abs(raw_w.imag) > 1e-9 * (1.0 + np.abs(raw_w.real))):
            raise InternalConsistencyError("nonreal eigenvalues in the even-case block")
        order = np.argsort(raw_w.real)
        eigs = raw_w.real[order]
        vecs = raw_v.real[:, order]

    # independent route: zeros of the generated P_{k+1}
    p_prev = Polynomial.zero(Mode.FLOAT)
    p_cur = Polynomial.one(Mode.FLOAT)
    E = Polynomial.x(Mode.FLOAT)
    for n in range(k + 1):
        upper_next = float(cheb_tridiag_coeffs(model, n + 1, Mode.FLOAT)[2])  # couples P_n to P_{n+1}
        shifted = (E - Polynomial((mat[n, n],), Mode.FLOAT)) * p_cur
        if n >= 1:
            shifted = shifted - p_prev * mat[n, n - 1]
        p_prev, p_cur = p_cur, shifted * (1.0 / upper_next)
    roots = np.sort(np.roots(list(reversed(p_cur.coeffs))).real)

    scale = max(1.0, float(np.max(np.abs(eigs))) if eigs.size else 1.0)
    if eigs.size != k + 1 or roots.size != k + 1:
        raise InternalConsistencyError("eigenvalue count mismatch")
    if np.max(np.abs(eigs - roots)) > 1e-9 * scale:
        raise InternalConsistencyError("dense eigensolve and recurrence roots disagree")
    if k >= 1 and np.min(np.diff(eigs)) <= 1e-12 * scale:
        raise InternalConsistencyError("even-case spectrum is not simple")

    pcoeffs = []
    for i in range(k + 1):
        v = vecs[:, i]
        if v[0] == 0.0:
            raise InternalConsistencyError("eigenvector with vanishing first component")
        pcoeffs.append([float(c) for c in v / v[0]])
    return LameEvenSpectrum(k=k, matrix=mat, eigenvalues=eigs, root_eigenvalues=roots, pcoeffs=pcoeffs)


def even_eigenfunction_residual(
    spec: LameEvenSpectrum, model: LameModel, which: int, samples=None
) -> float:
    """Max relative residual of the x-variable equation for one eigenpair.

    The eigenfunction psi(y) = sum_n P_n T_n(y) is mapped back through
    x = a y + b, and A f'' + B f' - (m(m+1) x + E_x) f / 4 is evaluated at
    the samples.  The spectral parameter in the x variable picks up the
    affine scale: E_x = 4 a E for the stored eigenvalue E of the normalized
    operator.
    """
    if not 0 <= which <= spec.k:
        raise ValidationError("eigenpair index out of range")
    if samples is None:
        samples = (model.e[2] + 0.5, 0.0, 2.0)
    psi = Polynomial.zero(Mode.FLOAT)
    for n, c in enumerate(spec.pcoeffs[which]):
        psi = psi + chebyshev_poly(n, Mode.FLOAT) * c
    f = psi.shift_affine(1.0 / model.a_affine, -model.b_affine / model.a_affine)
    op = algebraic_operator(model, Mode.FLOAT)
    e_x = 4.0 * model.a_affine * float(spec.eigenvalues[which])
    mm1 = model.m * (model.m + 1)
    spectral = Polynomial((0.25 * e_x, 0.25 * mm1), Mode.FLOAT)
    terms = (op.A * f.derivative().derivative(), op.B * f.derivative(), spectral * f)
    residual = terms[0] + terms[1] - terms[2]
    worst = 0.0
    for x in samples:
        x = float(x)
        scale = max(1.0, *(abs(t(x)) for t in terms))
        worst = max(worst, abs(residual(x)) / scale)
    return worst


def _orthonormal_k(m: float) -> int:
    k = math.floor((m - 1) / 2)
    if k < 0 or not (2 * k + 1 < m < 2 * k + 2):
        raise ValidationError(
            "the symmetric rescaling needs m strictly inside (2k+1, 2k+2) for some integer k >= 0"
        )
    return k


@dataclass(frozen=True)
class OrthonormalForm:
    """Symmetric Jacobi form of the normalized operator for admissible m.

    ``a[n]`` and ``diag[n]`` are the band coefficients; ``alpha_n`` are the
    positive rescaling factors from T_n to the symmetric basis.  The first
    row is anomalous: the operator sends the 0-th basis element to
    2 a_0 p_1 + b_0 p_0 (flagged by ``first_row_doubled``, never silently
    symmetrized).
    """

    a: tuple[float, ...]
    diag: tuple[float, ...]
    alpha_n: tuple[float, ...]
    first_row_doubled: bool
    model: LameModel


def _orthonormal_a(model: LameModel, n: int) -> float:
    h = 0.5 * model.m
    rad = (n + h + 1) * (n - h + 0.5) * (n - h) * (n + h + 0.5)
    if rad <= 0:
        raise InternalConsistencyError(f"off-diagonal radicand not positive at n = {n}")
    return 0.5 * math.sqrt(rad)


def _orthonormal_b(model: LameModel, n: int) -> float:
    boa = model.b_affine / model.a_affine
    return -model.alpha * n * n - 0.25 * model.m * (model.m + 1) * boa


def orthonormal_form(model: LameModel, n_max: int) -> OrthonormalForm:
    """Band coefficients and rescaling factors through index n_max.

    Requires m in (2k+1, 2k+2) for some integer k >= 0, which makes every
    rescaling factor's radicand positive (asserted while building).
    """
    _orthonormal_k(model.m)
    m = model.m
    h = 0.5 * m
    alphas = [1.0]
    ratio = 1.0
    for j in range(n_max):
        num = (0.5 * (1 - m) + j) * (1 + h + j)
        den = (-h + j) * (0.5 * (m + 1) + j)
        ratio *= num / den
        if ratio <= 0:
            raise InternalConsistencyError(f"rescaling radicand not positive at n = {j + 1}")
        alphas.append(math.sqrt(ratio))
    a = tuple(_orthonormal_a(model, n) for n in range(n_max))
    diag = tuple(_orthonormal_b(model, n) for n in range(n_max + 1))
    return OrthonormalForm(
        a=a, diag=diag, alpha_n=tuple(alphas), first_row_doubled=True, model=model
    )


@dataclass(frozen=True)
class LameDiagnostic:
    """Boundedness diagnostic plus the predicted quadratic growth rates
    (plus branch 1 - alpha, minus branch 1 + alpha)."""

    report: BoundednessReport
    predicted_leading: tuple[float, float]


def selfadjoint_diagnostic(model: LameModel, n_max: int = 500) -> LameDiagnostic:
    """Run the boundedness test on the symmetric form's coefficient sequences.

    The result is a heuristic indicator only; it reports which branch
    a_n + a_{n-1} +/- b_n stays bounded (or grows slowest) and the leading
    coefficients (1 -+ alpha) predicted by the n -> infinity expansion.
    """
    _orthonormal_k(model.m)
    J = JacobiOperator(
        a=lambda n: _orthonormal_a(model, n),
        b=lambda n: _orthonormal_b(model, n),
        length=None,
    )
    report = jacspec.berezanskii_test(J, n_max)
    return LameDiagnostic(report=report, predicted_leading=(1.0 - model.alpha, 1.0 + model.alpha))
