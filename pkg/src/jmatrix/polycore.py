"""Polynomial arithmetic over exact rationals or doubles, plus degree-lowering operators.

Two scalar modes are supported and never mixed silently: EXACT uses
``fractions.Fraction`` (identities can be checked coefficient-exactly),
FLOAT uses IEEE doubles (spectra, quadrature).  Plain ints are accepted in
either mode.  All values are immutable after construction, so they can be
shared freely across threads; the only internal mutability is the memoized
coefficient cache of a degree-lowering operator, whose fills are idempotent.
"""

from __future__ import annotations

import numbers
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence

__all__ = [
    "Mode",
    "ModeError",
    "Polynomial",
    "DegreeLoweringOperator",
    "DegreeLoweringError",
    "scalar_mode",
    "coerce_scalar",
    "derivative_op",
    "second_derivative_op",
    "q_derivative_op",
    "compose",
    "parse_polynomial",
    "format_polynomial",
    "format_scalar",
]


class Mode(Enum):
    """Scalar arithmetic mode of a polynomial or operator."""

    EXACT = "exact"
    FLOAT = "float"


class ModeError(TypeError):
    """Exact and float values met in a single operation."""


def scalar_mode(value) -> Mode | None:
    """Classify a scalar: EXACT (Fraction), FLOAT (real), or None for ints.

    Ints are mode-neutral; they embed exactly in either mode.
    """
    if isinstance(value, Fraction):
        return Mode.EXACT
    if isinstance(value, numbers.Integral):
        return None
    if isinstance(value, numbers.Real):
        return Mode.FLOAT
    raise TypeError(f"unsupported scalar type {type(value).__name__!r}")


def coerce_scalar(value, mode: Mode):
    """Coerce ``value`` into ``mode``, raising ModeError on a genuine conflict."""
    m = scalar_mode(value)
    if m is None:
        return Fraction(value) if mode is Mode.EXACT else float(value)
    if m is not mode:
        raise ModeError(f"{m.value} scalar used in {mode.value} context")
    return value if mode is Mode.EXACT else float(value)


def format_scalar(value) -> str:
    """Render a scalar for CLI/JSON use: rationals as "p/q", floats via repr."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)
    if isinstance(value, numbers.Integral):
        return str(int(value))
    return repr(float(value))


def _parse_scalar(token: str):
    token = token.strip()
    if "/" in token:
        return Fraction(token)
    if any(ch in token for ch in ".eE") and not token.lstrip("+-").isdigit():
        return float(token)
    return int(token)


class Polynomial:
    """Dense univariate polynomial with ascending coefficients in one mode.

    The zero polynomial is the empty coefficient list and has degree -1.
    Trailing zero coefficients are stripped on construction.
    """

    __slots__ = ("coeffs", "mode")

    def __init__(self, coeffs: Sequence, mode: Mode | None = None):
        modes = {scalar_mode(c) for c in coeffs}
        modes.discard(None)
        if len(modes) > 1:
            raise ModeError("mixed exact and float coefficients")
        if mode is None:
            mode = modes.pop() if modes else Mode.EXACT
        elif modes and modes != {mode}:
            raise ModeError(f"{modes.pop().value} coefficients with mode={mode.value}")
        cs = [coerce_scalar(c, mode) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "mode", mode)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Polynomial is immutable")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, mode: Mode = Mode.EXACT) -> "Polynomial":
        return cls((), mode)

    @classmethod
    def one(cls, mode: Mode = Mode.EXACT) -> "Polynomial":
        return cls((1,), mode)

    @classmethod
    def x(cls, mode: Mode = Mode.EXACT) -> "Polynomial":
        return cls((0, 1), mode)

    @classmethod
    def monomial(cls, k: int, coefficient=1, mode: Mode = Mode.EXACT) -> "Polynomial":
        return cls((0,) * k + (coefficient,), mode)

    # -- basic queries ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int):
        """Coefficient of x^k (zero beyond the stored degree)."""
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0) if self.mode is Mode.EXACT else 0.0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __call__(self, x):
        """Horner evaluation; exact in EXACT mode."""
        x = coerce_scalar(x, self.mode)
        acc = Fraction(0) if self.mode is Mode.EXACT else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # -- arithmetic ------------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.mode is not other.mode:
            raise ModeError("polynomial modes differ")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial([self.coeff(k) + other.coeff(k) for k in range(n)], self.mode)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial([self.coeff(k) - other.coeff(k) for k in range(n)], self.mode)

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs], self.mode)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            if not self.coeffs or not other.coeffs:
                return Polynomial.zero(self.mode)
            out = [coerce_scalar(0, self.mode)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return Polynomial(out, self.mode)
        s = coerce_scalar(other, self.mode)
        return Polynomial([c * s for c in self.coeffs], self.mode)

    __rmul__ = __mul__

    def __divmod__(self, other: "Polynomial"):
        """Polynomial long division: self = q*other + r with deg r < deg other."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(self.coeffs) - len(other.coeffs)
        if dq < 0:
            return Polynomial.zero(self.mode), self
        quot = [coerce_scalar(0, self.mode)] * (dq + 1)
        lead = other.leading()
        for k in range(dq, -1, -1):
            c = rem[k + len(other.coeffs) - 1] / lead
            quot[k] = c
            if c != 0:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return Polynomial(quot, self.mode), Polynomial(rem[: len(other.coeffs) - 1], self.mode)

    def shift_affine(self, a, b) -> "Polynomial":
        """Return q with q(y) = p(a*y + b); requires a != 0."""
        a = coerce_scalar(a, self.mode)
        b = coerce_scalar(b, self.mode)
        if a == 0:
            raise ValueError("affine substitution requires a != 0")
        inner = Polynomial((b, a), self.mode)
        acc = Polynomial.zero(self.mode)
        for c in reversed(self.coeffs):
            acc = acc * inner + Polynomial((c,), self.mode)
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:], self.mode)

    def to_float(self) -> "Polynomial":
        if self.mode is Mode.FLOAT:
            return self
        return Polynomial([float(c) for c in self.coeffs], Mode.FLOAT)

    # -- comparisons / display ---------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.mode is other.mode
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.mode, self.coeffs))

    def __repr__(self) -> str:
        return f"Polynomial([{', '.join(format_scalar(c) for c in self.coeffs)}], {self.mode.value})"


def parse_polynomial(text: str, mode: Mode | None = None) -> Polynomial:
    """Parse the CLI text format: comma-separated ascending coefficients.

    Rationals are written "p/q" (e.g. "0,0,0,1" is x^3; "1/2,-3" is 1/2 - 3x).
    The mode is inferred from the tokens unless given explicitly.
    """
    text = text.strip()
    if not text:
        return Polynomial.zero(mode or Mode.EXACT)
    values = [_parse_scalar(tok) for tok in text.split(",")]
    return Polynomial(values, mode)


def format_polynomial(p: Polynomial) -> str:
    """Inverse of parse_polynomial (empty string for the zero polynomial)."""
    return ",".join(format_scalar(c) for c in p.coeffs)


class DegreeLoweringError(ValueError):
    """A degree-lowering coefficient violates its nonvanishing contract."""


class DegreeLoweringOperator:
    """Linear operator with x^k mapped to d(k) * x^(k - shift).

    The generator ``d`` must vanish for k < shift and be nonzero for
    k >= shift; the latter is checked lazily as coefficients are requested.
    Coefficients are memoized (idempotent fills, safe for concurrent reads).
    """

    __slots__ = ("shift", "label", "mode", "_d", "_cache")

    def __init__(self, shift: int, d: Callable[[int], object], label: str = "", mode: Mode | None = None):
        if shift < 1:
            raise ValueError("shift must be a positive integer")
        self.shift = int(shift)
        self.label = label
        self.mode = mode
        self._d = d
        self._cache: dict[int, object] = {}
        for k in range(self.shift):
            if d(k) != 0:
                raise DegreeLoweringError(f"{label or 'operator'}: d({k}) must be 0 below shift {shift}")

    def coefficient(self, k: int):
        """The monomial coefficient d(k), validated nonzero for k >= shift."""
        if k < self.shift:
            return 0
        try:
            return self._cache[k]
        except KeyError:
            value = self._d(k)
            if value == 0:
                raise DegreeLoweringError(f"{self.label or 'operator'}: d({k}) = 0 at k >= shift")
            self._cache[k] = value
            return value

    def apply(self, p: Polynomial) -> Polynomial:
        """Linear extension of the monomial action; lowers degree by ``shift``."""
        if self.mode is not None and self.mode is not p.mode:
            raise ModeError(f"{self.mode.value} operator applied to {p.mode.value} polynomial")
        out = [coerce_scalar(0, p.mode)] * max(len(p.coeffs) - self.shift, 0)
        for k in range(self.shift, len(p.coeffs)):
            c = p.coeffs[k]
            if c != 0:
                out[k - self.shift] += c * coerce_scalar(self.coefficient(k), p.mode)
        return Polynomial(out, p.mode)

    __call__ = apply

    def __repr__(self) -> str:
        return f"DegreeLoweringOperator(shift={self.shift}, label={self.label!r})"


def derivative_op() -> DegreeLoweringOperator:
    """d/dx as a degree-lowering operator (d_k = k); mode-neutral."""
    return DegreeLoweringOperator(1, lambda k: k, label="d/dx")


def second_derivative_op() -> DegreeLoweringOperator:
    """d^2/dx^2 (d_k = k(k-1)); mode-neutral."""
    return DegreeLoweringOperator(2, lambda k: k * (k - 1), label="d^2/dx^2")


def q_derivative_op(q) -> DegreeLoweringOperator:
    """The q-derivative, with d_k = (1 - q^k)/(1 - q).

    q must not be 0 or 1; roots of unity are caught lazily when the
    corresponding coefficient would vanish.
    """
    qmode = scalar_mode(q)
    if qmode is None:
        q = Fraction(q)
        qmode = Mode.EXACT
    if q == 0 or q == 1:
        raise ValueError("q-derivative requires q not in {0, 1}")
    one = Fraction(1) if qmode is Mode.EXACT else 1.0
    return DegreeLoweringOperator(1, lambda k: (one - q**k) / (one - q), label=f"D_q[q={q}]", mode=qmode)


def compose(outer: DegreeLoweringOperator, inner: DegreeLoweringOperator) -> DegreeLoweringOperator:
    """Operator composition outer(inner(.)), e.g. compose(S, S) for T = S^2."""
    if outer.mode is not None and inner.mode is not None and outer.mode is not inner.mode:
        raise ModeError("composed operators have conflicting modes")
    shift = outer.shift + inner.shift

    def d(k: int):
        if k < shift:
            return 0
        return inner.coefficient(k) * outer.coefficient(k - inner.shift)

    label = f"{outer.label or '?'} o {inner.label or '?'}"
    return DegreeLoweringOperator(shift, d, label=label, mode=outer.mode or inner.mode)
