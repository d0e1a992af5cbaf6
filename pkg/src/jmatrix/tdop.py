"""Operators with tridiagonal action on polynomial bases.

A TD-operator is L = M_A T + M_B S + M_C with polynomial coefficients of
degrees at most (3, 2, 1), where S and T lower polynomial degree by 1 and 2.
This module constructs a monic basis {y_n} on which L acts with three bands,
orthogonalizes such a basis against a supplied inner product, rescales to a
symmetric tridiagonal form, reconstructs the degree-preserving operator D
with D X + X D = L, and solves the first-order ODE for the symmetry weight.

All functions are pure over immutable inputs and safe to call in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import JMatrixError, ValidationError
from .polycore import (
    DegreeLoweringOperator,
    Mode,
    ModeError,
    Polynomial,
    coerce_scalar,
    format_scalar,
    scalar_mode,
)

__all__ = [
    "TDOperator",
    "validate_td",
    "Tridiagonalization",
    "TridiagonalizationError",
    "tridiagonalize",
    "MomentInnerProduct",
    "InnerProductError",
    "orthogonalize",
    "SymmetricTridiag",
    "NotSymmetrizableError",
    "symmetrize",
    "ReconstructedOperator",
    "reconstruct_diagonalizer",
    "WeightSpec",
    "MultiplePoleError",
    "weight_log_derivative",
    "eval_weight",
]


class TridiagonalizationError(JMatrixError):
    """The canonical free-parameter choice cannot satisfy the band relation.

    Happens only when the leading-action coefficient A_k vanishes at some
    k >= 2 and the lower coefficient equations are inconsistent; the
    construction then needs non-canonical choices at earlier steps.
    """

    def __init__(self, index: int, detail: str = ""):
        self.index = index
        super().__init__(f"band relation unsatisfiable at index {index} with canonical choices. {detail}")


class InnerProductError(ValidationError):
    """The supplied pairing is not usable (not positive definite, singular, too short)."""


class NotSymmetrizableError(ValidationError):
    """A_n * C_{n+1} <= 0 somewhere, so no real symmetric rescaling exists."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"A_n * C_(n+1) <= 0 at index {index}; not symmetrizable over the reals")


class MultiplePoleError(ValidationError):
    """The leading coefficient has a repeated root; partial fractions unsupported."""


@dataclass(frozen=True)
class TDOperator:
    """L = M_A T + M_B S + M_C with validated degree bounds.

    Build through :func:`validate_td`, which also enforces deg(A) = 3 or
    deg(B) = 2 unless explicitly relaxed.
    """

    A: Polynomial
    B: Polynomial
    C: Polynomial
    S: DegreeLoweringOperator
    T: DegreeLoweringOperator

    def __post_init__(self):
        if not (self.A.mode is self.B.mode is self.C.mode):
            raise ModeError("A, B, C must share one mode")
        if self.A.degree > 3 or self.B.degree > 2 or self.C.degree > 1:
            raise ValidationError(
                f"degree bounds violated: deg(A)={self.A.degree}, deg(B)={self.B.degree}, deg(C)={self.C.degree}"
            )
        if self.S.shift != 1 or self.T.shift != 2:
            raise ValidationError("S must lower degree by 1 and T by 2")

    @property
    def mode(self) -> Mode:
        return self.A.mode

    @property
    def strict(self) -> bool:
        return self.A.degree == 3 or self.B.degree == 2

    def apply(self, p: Polynomial) -> Polynomial:
        """L p = A * T(p) + B * S(p) + C * p."""
        return self.A * self.T.apply(p) + self.B * self.S.apply(p) + self.C * p

    __call__ = apply

    def leading_action(self, k: int):
        """Coefficient of x^(k+1) in L x^k: alpha_3 d'_k + beta_2 d_k + gamma_1."""
        val = self.A.coeff(3) * coerce_scalar(self.T.coefficient(k), self.mode)
        val += self.B.coeff(2) * coerce_scalar(self.S.coefficient(k), self.mode)
        return val + self.C.coeff(1)

    def to_float(self) -> "TDOperator":
        return TDOperator(self.A.to_float(), self.B.to_float(), self.C.to_float(), self.S, self.T)


def validate_td(
    A: Polynomial,
    B: Polynomial,
    C: Polynomial,
    S: DegreeLoweringOperator,
    T: DegreeLoweringOperator,
    relaxed: bool = False,
) -> TDOperator:
    """Validate and build a TD-operator.

    Degree caps (3, 2, 1) always apply.  In strict mode deg(A) = 3 or
    deg(B) = 2 is also required; ``relaxed=True`` admits the wider
    second-order class (operators whose eigenfunctions are classical
    orthogonal polynomials), flagged via the ``strict`` property.
    """
    op = TDOperator(A, B, C, S, T)
    if not relaxed and not op.strict:
        raise ValidationError(
            "strict TD-operator needs deg(A) = 3 or deg(B) = 2 (pass relaxed=True to admit this operator)"
        )
    return op


@dataclass(frozen=True)
class Tridiagonalization:
    """Monic basis y_0..y_N with band coefficients for n < N.

    The defining relation L y_n = A_n y_{n+1} + B_n y_n + C_n y_{n-1}
    (C_0 = 0) holds coefficient-exactly for every stored n when produced by
    :func:`tridiagonalize` in EXACT mode.
    """

    y: tuple[Polynomial, ...]
    An: tuple
    Bn: tuple
    Cn: tuple

    @property
    def n_max(self) -> int:
        return len(self.An)

    @property
    def mode(self) -> Mode:
        return self.y[0].mode

    def relation_residual(self, op: TDOperator, n: int) -> Polynomial:
        """L y_n minus the stored three-band combination (exact zero on contract)."""
        rhs = self.y[n + 1] * self.An[n] + self.y[n] * self.Bn[n]
        if n >= 1:
            rhs = rhs + self.y[n - 1] * self.Cn[n]
        return op.apply(self.y[n]) - rhs

    def verify(self, op: TDOperator, tol: float = 0.0) -> None:
        """Recheck every stored relation through an independent L application."""
        for n in range(self.n_max):
            res = self.relation_residual(op, n)
            if self.mode is Mode.EXACT:
                if not res.is_zero():
                    raise TridiagonalizationError(n, "exact residual nonzero on verify")
            else:
                worst = max((abs(c) for c in res.coeffs), default=0.0)
                if worst > tol:
                    raise TridiagonalizationError(n, f"residual {worst:.3e} > {tol}")

    def to_float(self) -> "Tridiagonalization":
        return Tridiagonalization(
            tuple(p.to_float() for p in self.y),
            tuple(float(v) for v in self.An),
            tuple(float(v) for v in self.Bn),
            tuple(float(v) for v in self.Cn),
        )

    def to_json_dict(self) -> dict:
        return {
            "A_n": [format_scalar(v) for v in self.An],
            "B_n": [format_scalar(v) for v in self.Bn],
            "C_n": [format_scalar(v) for v in self.Cn],
            "y": [[format_scalar(c) for c in p.coeffs] for p in self.y],
        }


def tridiagonalize(op: TDOperator, n_max: int) -> Tridiagonalization:
    """Construct the canonical monic tridiagonalizing basis up to degree n_max.

    Free parameters are canonicalized: the two top coefficients of each new
    y_{k+1} are set to zero (fixing B_k and C_k from the top rows), the rest
    are solved from the coefficient-matching equations, and any coefficient
    left undetermined by A_k = 0 is set to zero.

    Raises:
        TridiagonalizationError: if A_k = 0 at some k >= 2 leaves the lower
            coefficient equations inconsistent (no basis with the canonical
            earlier choices satisfies the relation there).
    """
    if n_max < 1:
        raise ValidationError("n_max must be at least 1")
    mode = op.mode
    zero = coerce_scalar(0, mode)
    one = coerce_scalar(1, mode)
    ys = [Polynomial.one(mode)]
    An, Bn, Cn = [], [], []
    for k in range(n_max):
        Ly = op.apply(ys[k])
        a_k = Ly.coeff(k + 1)
        b_k = Ly.coeff(k)
        c_k = zero if k == 0 else Ly.coeff(k - 1) - b_k * ys[k].coeff(k - 1)
        coeffs = [zero] * (k + 2)
        coeffs[k + 1] = one
        for p in range(k - 2, -1, -1):
            rhs = Ly.coeff(p) - b_k * ys[k].coeff(p) - c_k * ys[k - 1].coeff(p)
            if a_k != 0:
                coeffs[p] = rhs / a_k
            else:
                bad = rhs != 0 if mode is Mode.EXACT else abs(rhs) > 1e-10 * _coeff_scale(Ly)
                if bad:
                    raise TridiagonalizationError(
                        k, f"A_{k} = 0 but the x^{p} equation has nonzero right side {format_scalar(rhs)}"
                    )
        ys.append(Polynomial(coeffs, mode))
        An.append(a_k)
        Bn.append(b_k)
        Cn.append(c_k)
    return Tridiagonalization(tuple(ys), tuple(An), tuple(Bn), tuple(Cn))


def _coeff_scale(p: Polynomial) -> float:
    return max((abs(float(c)) for c in p.coeffs), default=1.0) or 1.0


class MomentInnerProduct:
    """Bilinear pairing on polynomials from a finite moment sequence.

    moments[k] is the pairing of x^a with x^b whenever a + b = k; a
    sequence of length 2N + 1 supports polynomials up to degree N.
    """

    def __init__(self, moments: Sequence, mode: Mode | None = None):
        if mode is None:
            found = {scalar_mode(m) for m in moments}
            found.discard(None)
            if len(found) > 1:
                raise ModeError("mixed exact and float moments")
            mode = found.pop() if found else Mode.EXACT
        self.mode = mode
        self.moments = tuple(coerce_scalar(m, mode) for m in moments)

    @property
    def max_degree(self) -> int:
        return (len(self.moments) - 1) // 2

    def pair(self, p: Polynomial, q: Polynomial):
        if p.degree + q.degree >= len(self.moments):
            raise InnerProductError(
                f"moment sequence of length {len(self.moments)} too short for degrees {p.degree}+{q.degree}"
            )
        acc = coerce_scalar(0, self.mode)
        for i, a in enumerate(p.coeffs):
            for j, b in enumerate(q.coeffs):
                acc += a * b * self.moments[i + j]
        return acc


def _pairing(ip, tri_mode: Mode):
    """Normalize an inner-product input to (pair_fn, mode)."""
    if isinstance(ip, MomentInnerProduct):
        mode = ip.mode if tri_mode is ip.mode else Mode.FLOAT
        if mode is Mode.FLOAT and ip.mode is Mode.EXACT:
            float_ip = MomentInnerProduct([float(m) for m in ip.moments], Mode.FLOAT)
            return float_ip.pair, Mode.FLOAT
        return ip.pair, mode
    if hasattr(ip, "nodes") and hasattr(ip, "weights"):
        def pair(p: Polynomial, q: Polynomial) -> float:
            vals = np.array([float(p(float(x))) * float(q(float(x))) for x in ip.nodes])
            return float(np.dot(ip.weights, vals))

        return pair, Mode.FLOAT
    raise InnerProductError("inner product must be a MomentInnerProduct or a quadrature rule")


def orthogonalize(tri: Tridiagonalization, ip) -> Tridiagonalization:
    """Gram-Schmidt the basis against ``ip`` and recompute band coefficients.

    The output keeps the monic normalization.  Coefficients are obtained by
    expanding L r_n (through the stored relation, no operator needed) in the
    new basis and reading off the three bands; when the inner product makes
    L symmetric the expansion is tridiagonal, so nothing is discarded.

    Raises:
        InnerProductError: if the pairing shows the Gram matrix to be
            numerically singular or not positive definite.
    """
    pair, mode = _pairing(ip, tri.mode)
    if mode is Mode.FLOAT and tri.mode is Mode.EXACT:
        tri = tri.to_float()
    N = len(tri.y) - 1
    zero = coerce_scalar(0, mode)

    r: list[Polynomial] = []
    cmat: list[list] = []  # cmat[i][j]: coefficient of y_j in r_i
    norms2: list = []
    for n, yn in enumerate(tri.y):
        row = [zero] * (n + 1)
        row[n] = coerce_scalar(1, mode)
        rn = yn
        raw = pair(yn, yn)
        for k in range(n):
            coef = pair(rn, r[k]) / norms2[k]
            rn = rn - r[k] * coef
            for j in range(k + 1):
                row[j] -= coef * cmat[k][j]
        nn = pair(rn, rn)
        if mode is Mode.EXACT:
            if nn <= 0:
                raise InnerProductError(f"pairing not positive definite at degree {n}")
        elif not nn > 1e-13 * abs(float(raw)):
            raise InnerProductError(f"Gram matrix numerically singular at degree {n}")
        r.append(rn)
        cmat.append(row)
        norms2.append(nn)

    new_A, new_B, new_C = [], [], []
    for n in range(N):
        w = [zero] * (n + 2)  # L r_n in the old y basis
        for k in range(n + 1):
            c = cmat[n][k]
            if c == 0:
                continue
            w[k + 1] += c * tri.An[k]
            w[k] += c * tri.Bn[k]
            if k >= 1:
                w[k - 1] += c * tri.Cn[k]
        d = [zero] * (n + 2)  # same vector in the new r basis
        for j in range(n + 1, -1, -1):
            acc = w[j]
            for i in range(j + 1, n + 2):
                acc -= d[i] * cmat[i][j]
            d[j] = acc
        new_A.append(d[n + 1])
        new_B.append(d[n])
        new_C.append(d[n - 1] if n >= 1 else zero)
    return Tridiagonalization(tuple(r), tuple(new_A), tuple(new_B), tuple(new_C))


@dataclass(frozen=True)
class SymmetricTridiag:
    """Symmetric band data a_n (off-diagonal), b_n (diagonal), plus the
    positive rescaling factors linking the monic basis to the symmetric one."""

    a: tuple[float, ...]
    b: tuple[float, ...]
    basis_norms: tuple[float, ...]


def symmetrize(tri: Tridiagonalization) -> SymmetricTridiag:
    """Rescale a monic tridiagonalization to symmetric form.

    Requires A_n C_{n+1} > 0 along the available range; then
    a_n = +sqrt(A_n C_{n+1}) (positive branch; a diagonal sign flip is a
    unitary equivalence) and b_n = B_n.  Always returns float data.

    Raises:
        NotSymmetrizableError: at the first index with A_n C_{n+1} <= 0.
    """
    L = tri.n_max
    b = [float(v) for v in tri.Bn]
    a: list[float] = []
    norms = [1.0]
    for n in range(L - 1):
        prod = float(tri.An[n]) * float(tri.Cn[n + 1])
        if not prod > 0:
            raise NotSymmetrizableError(n)
        a.append(math.sqrt(prod))
        norms.append(norms[-1] * math.sqrt(float(tri.Cn[n + 1]) / float(tri.An[n])))
    return SymmetricTridiag(tuple(a), tuple(b), tuple(norms))


@dataclass(frozen=True)
class ReconstructedOperator:
    """Degree-preserving operator D on monomials, with D X + X D = L.

    ``images[n]`` is D x^n; D 1 = 0.
    """

    images: tuple[Polynomial, ...]

    def apply(self, p: Polynomial) -> Polynomial:
        if p.degree >= len(self.images):
            raise ValidationError("polynomial degree beyond the reconstructed range")
        acc = Polynomial.zero(p.mode)
        for n, c in enumerate(p.coeffs):
            if c != 0:
                acc = acc + self.images[n] * c
        return acc

    def matrix(self) -> list[list]:
        """Dense monomial-basis matrix; entry [i][j] is the x^i coefficient of D x^j."""
        size = len(self.images)
        return [[self.images[j].coeff(i) for j in range(size)] for i in range(size)]


def reconstruct_diagonalizer(op: TDOperator, n_max: int) -> ReconstructedOperator:
    """Build D with D x^n = sum_{k<n} (-1)^k x^k L x^(n-1-k) and D 1 = 0.

    The alternating sum telescopes the anticommutator: (D X + X D) p = L p
    for every polynomial p of degree < n_max (exactly in EXACT mode).
    """
    if n_max < 1:
        raise ValidationError("n_max must be at least 1")
    mode = op.mode
    l_mono = [op.apply(Polynomial.monomial(j, mode=mode)) for j in range(n_max)]
    images = [Polynomial.zero(mode)]
    for n in range(1, n_max + 1):
        acc = Polynomial.zero(mode)
        for k in range(n):
            term = Polynomial(((0,) * k) + l_mono[n - 1 - k].coeffs, mode)
            acc = acc + term if k % 2 == 0 else acc - term
        images.append(acc)
    return ReconstructedOperator(tuple(images))


@dataclass(frozen=True)
class WeightSpec:
    """Partial-fraction data for the logarithmic derivative of a symmetry weight.

    (ln w)' = poly_part + sum_j residue_j / (x - pole_j), with all poles
    simple.  ``interval`` bounds where the weight is evaluated.
    """

    poles: tuple[tuple[object, object], ...]
    poly_part: Polynomial
    interval: tuple[float, float]
    mode: Mode


def _rational_roots(p: Polynomial) -> list[Fraction]:
    """All roots of an exact polynomial, required to be rational and simple.

    Raises MultiplePoleError on repeated roots and ValidationError when the
    polynomial does not split over the rationals.
    """
    coeffs = [Fraction(c) for c in p.coeffs]
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in coeffs]
    roots: list[Fraction] = []
    low = 0
    while low < len(ints) - 1 and ints[low] == 0:
        low += 1
    if low >= 2:
        raise MultiplePoleError("repeated root at 0")
    if low == 1:
        roots.append(Fraction(0))
        ints = ints[1:]

    def divisors(v: int) -> list[int]:
        v = abs(v)
        out = [d for d in range(1, int(math.isqrt(v)) + 1) if v % d == 0]
        return sorted(set(out + [v // d for d in out]))

    while len(ints) > 1:
        c0, cd = ints[0], ints[-1]
        found = None
        for pn in divisors(c0):
            for qd in divisors(cd):
                for cand in (Fraction(pn, qd), Fraction(-pn, qd)):
                    acc = Fraction(0)
                    for c in reversed(ints):
                        acc = acc * cand + c
                    if acc == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            raise ValidationError(
                "leading polynomial has irrational roots; use FLOAT mode for the weight"
            )
        if found in roots:
            raise MultiplePoleError(f"repeated root {found}")
        roots.append(found)
        # synthetic deflation by (x - found)
        out = [Fraction(0)] * (len(ints) - 1)
        carry = Fraction(ints[-1])
        for i in range(len(ints) - 2, -1, -1):
            out[i] = carry
            carry = Fraction(ints[i]) + carry * found
        ints = [c for c in out]
        # re-clear denominators for the divisor search
        lcm = 1
        for c in ints:
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        ints = [int(c * lcm) for c in ints]
    return roots


def _float_roots(p: Polynomial) -> list[float]:
    rts = np.roots(list(reversed([float(c) for c in p.coeffs])))
    if np.any(np.abs(rts.imag) > 1e-9 * (1 + np.abs(rts.real))):
        raise ValidationError("complex roots of the leading polynomial are unsupported here")
    roots = sorted(float(r) for r in rts.real)
    scale = max(1.0, max(abs(r) for r in roots))
    for i in range(len(roots) - 1):
        if abs(roots[i + 1] - roots[i]) <= 1e-9 * scale:
            raise MultiplePoleError(f"repeated root near {roots[i]}")
    return roots


def _check_derivative_pair(op: TDOperator) -> None:
    depth = max(op.A.degree, op.B.degree, 3) + 2
    for k in range(depth):
        if op.S.coefficient(k) != k or op.T.coefficient(k) != k * (k - 1):
            raise ValidationError("weight ODE applies to S = d/dx, T = d^2/dx^2 only")


def weight_log_derivative(op: TDOperator, interval: tuple[float, float] | None = None) -> WeightSpec:
    """Partial-fraction decomposition of (B - A')/A, the weight log-derivative.

    Requires S = d/dx, T = d^2/dx^2 and simple roots of A.  If the numerator
    degree reaches deg(A), the polynomial part is split off first.  The
    default interval lies between the two largest real poles when at least
    two exist, above the pole otherwise, and is the whole line for A' = B.
    """
    _check_derivative_pair(op)
    numer = op.B - op.A.derivative()
    if op.A.is_zero():
        raise ValidationError("leading coefficient A is zero")
    if numer.degree >= op.A.degree:
        poly_part, rem = divmod(numer, op.A)
    else:
        poly_part, rem = Polynomial.zero(op.mode), numer
    mode = op.mode
    if mode is Mode.EXACT:
        roots: list = _rational_roots(op.A)
    else:
        roots = _float_roots(op.A)
    a_prime = op.A.derivative()
    poles = tuple((rho, rem(rho) / a_prime(rho)) for rho in roots)
    if interval is None:
        floats = sorted(float(r) for r in roots)
        if len(floats) >= 2:
            interval = (floats[-2], floats[-1])
        elif len(floats) == 1:
            interval = (floats[0], math.inf)
        else:
            interval = (-math.inf, math.inf)
    if not interval[0] < interval[1]:
        raise ValidationError("interval must satisfy lo < hi")
    return WeightSpec(poles=poles, poly_part=poly_part, interval=interval, mode=mode)


def _normalization_point(interval: tuple[float, float]) -> float:
    lo, hi = interval
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if math.isfinite(lo):
        return lo + 1.0
    if math.isfinite(hi):
        return hi - 1.0
    return 0.0


def eval_weight(ws: WeightSpec, x) -> float:
    """Weight value w(x) = prod |x - pole_j|^residue_j * exp(int poly_part),
    normalized to 1 at the interval's reference point.

    Raises:
        ValidationError: if x is outside the open interval or at a pole.
    """
    xf = float(x)
    lo, hi = ws.interval
    if not lo < xf < hi:
        raise ValidationError(f"{xf} outside the open interval ({lo}, {hi})")

    anti = Polynomial(
        [0.0] + [float(c) / (k + 1) for k, c in enumerate(ws.poly_part.coeffs)], Mode.FLOAT
    )

    def logw(t: float) -> float:
        acc = anti(t)
        for rho, res in ws.poles:
            gap = t - float(rho)
            if gap == 0.0:
                raise ValidationError(f"evaluation at pole {rho}")
            acc += float(res) * math.log(abs(gap))
        return acc

    return math.exp(logw(xf) - logw(_normalization_point(ws.interval)))
