"""Jacobi-operator analytics.

Invariant-block detection along the off-diagonal, a self-contained
implicit-shift QL eigensolver for symmetric tridiagonal blocks, forward
evaluation of the associated recurrence polynomials, Gauss quadrature by
the Golub-Welsch construction, adaptive integration helpers, and the
boundedness heuristic used as a self-adjointness diagnostic.

Operations here are pure over immutable inputs; distinct blocks may be
solved concurrently.  Sequence generators supplied to JacobiOperator must
be safe for concurrent evaluation.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, InternalConsistencyError, ValidationError

__all__ = [
    "JacobiOperator",
    "BlockDecomposition",
    "SpectrumResult",
    "QuadratureRule",
    "BoundednessReport",
    "split_blocks",
    "symmetric_tridiagonal_eig",
    "eig_block",
    "eval_pn",
    "eval_pn_scaled",
    "golub_welsch",
    "gauss_legendre_rule",
    "adaptive_integrate",
    "halfline_integrate",
    "berezanskii_test",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class JacobiOperator:
    """Symmetric tridiagonal operator given by sequence generators.

    ``a(n)`` is the off-diagonal entry coupling indices n and n+1, ``b(n)``
    the diagonal entry.  ``length`` is None for an operator on the whole
    sequence space.
    """

    a: Callable[[int], float]
    b: Callable[[int], float]
    length: int | None = None

    @classmethod
    def from_sequences(cls, a_seq: Sequence, b_seq: Sequence) -> "JacobiOperator":
        a_t, b_t = tuple(a_seq), tuple(b_seq)
        if len(a_t) < len(b_t) - 1:
            raise ValidationError("need at least len(b)-1 off-diagonal entries")
        return cls(a=lambda n: a_t[n], b=lambda n: b_t[n], length=len(b_t))

    def a_at(self, n: int):
        if n < 0:
            return 0.0
        if self.length is not None and n >= self.length - 1:
            raise IndexError(f"off-diagonal index {n} beyond finite length {self.length}")
        return self.a(n)

    def b_at(self, n: int):
        if self.length is not None and not 0 <= n < self.length:
            raise IndexError(f"diagonal index {n} beyond finite length {self.length}")
        return self.b(n)


@dataclass(frozen=True)
class BlockDecomposition:
    """Invariant blocks delimited by zeros of the off-diagonal sequence.

    ``boundaries`` starts with the conventional -1; a boundary at n means
    a_n = 0, so indices (prev, n] form one invariant block.  Blocks are
    stored as half-open index ranges (start, stop).  ``tail_start`` is the
    first index of the remainder that the scan did not close off, or None.
    """

    boundaries: tuple[int, ...]
    blocks: tuple[tuple[int, int], ...]
    tail_start: int | None
    scan_to: int

    def dimensions(self) -> tuple[int, ...]:
        return tuple(stop - start for start, stop in self.blocks)


@dataclass(frozen=True)
class SpectrumResult:
    """Eigendecomposition of one finite block.

    ``eigenvalues`` ascend strictly (simple spectrum); ``eigenvectors``
    holds orthonormal columns, rows indexed relative to the block start.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    block: tuple[int, int]

    def to_json_dict(self) -> dict:
        return {
            "block": [self.block[0], self.block[1]],
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "vectors": [[float(v) for v in self.eigenvectors[:, j]] for j in range(self.eigenvalues.size)],
        }


def _is_exact(v) -> bool:
    return isinstance(v, (Fraction, numbers.Integral))


def split_blocks(J: JacobiOperator, scan_to: int, tol: float = 1e-12) -> BlockDecomposition:
    """Locate off-diagonal zeros among a_0 .. a_{scan_to - 1}.

    A float entry counts as zero when |a_n| <= tol * max(1, |b_n|, |b_{n+1}|);
    exact (int/Fraction) entries must be exactly zero.  Splits coming from
    integer factors are therefore never created or destroyed by round-off.
    """
    if J.length is not None:
        scan_to = min(scan_to, J.length - 1)
    boundaries = [-1]
    for n in range(scan_to):
        a_n = J.a_at(n)
        if _is_exact(a_n):
            is_zero = a_n == 0
        else:
            scale = max(1.0, abs(float(J.b_at(n))), abs(float(J.b_at(n + 1))))
            is_zero = abs(a_n) <= tol * scale
        if is_zero:
            boundaries.append(n)
    blocks = [
        (boundaries[i - 1] + 1, boundaries[i] + 1) for i in range(1, len(boundaries))
    ]
    after_last = boundaries[-1] + 1
    has_tail = J.length is None or after_last < J.length
    return BlockDecomposition(
        boundaries=tuple(boundaries),
        blocks=tuple(blocks),
        tail_start=after_last if has_tail else None,
        scan_to=scan_to,
    )


def symmetric_tridiagonal_eig(diag: Sequence[float], off: Sequence[float]):
    """Implicit-shift QL eigendecomposition of a symmetric tridiagonal matrix.

    Args:
        diag: diagonal entries, length n.
        off: subdiagonal entries, length n - 1.

    Returns:
        (w, V): ascending eigenvalues and the orthogonal matrix whose
        columns are the corresponding eigenvectors.

    Raises:
        ConvergenceError: if the global rotation budget (30 * n sweeps)
            is exhausted, which signals pathological input.
    """
    d = np.asarray(diag, dtype=float).copy()
    n = d.size
    if n == 0:
        return np.empty(0), np.empty((0, 0))
    e = np.zeros(n)
    e[: n - 1] = np.asarray(off, dtype=float)
    if len(off) != n - 1:
        raise ValidationError("off-diagonal must have length n - 1")
    V = np.eye(n)
    budget = 30 * n
    for l in range(n):
        while True:
            m = l
            while m < n - 1 and abs(e[m]) > _EPS * (abs(d[m]) + abs(d[m + 1])):
                m += 1
            if m == l:
                break
            budget -= 1
            if budget < 0:
                raise ConvergenceError("QL iteration cap exceeded")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                bb = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * bb
                p = s * r
                d[i + 1] = g + p
                g = c * r - bb
                col = V[:, i + 1].copy()
                V[:, i + 1] = s * V[:, i] + c * col
                V[:, i] = c * V[:, i] - s * col
            if not underflow:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    order = np.argsort(d, kind="stable")
    return d[order], V[:, order]


def eig_block(J: JacobiOperator, block: tuple[int, int]) -> SpectrumResult:
    """Full eigendecomposition of the symmetric tridiagonal block (start, stop).

    Postconditions are asserted: strictly increasing eigenvalues (minimum
    gap above 1e-12 of the spectral scale) and orthonormal eigenvectors to
    1e-10.  Eigenvector signs are canonicalized so the largest-magnitude
    component of each column is positive.
    """
    start, stop = block
    dim = stop - start
    if dim <= 0:
        return SpectrumResult(np.empty(0), np.empty((0, 0)), block)
    d = [float(J.b_at(start + i)) for i in range(dim)]
    e = [float(J.a_at(start + i)) for i in range(dim - 1)]
    w, V = symmetric_tridiagonal_eig(d, e)
    scale = max(1.0, float(np.max(np.abs(w))) if dim else 1.0)
    if dim > 1 and np.min(np.diff(w)) <= 1e-12 * scale:
        raise InternalConsistencyError("block spectrum not simple within tolerance")
    gram = V.T @ V - np.eye(dim)
    if np.max(np.abs(gram)) > 1e-10:
        raise InternalConsistencyError("eigenvector matrix failed orthonormality check")
    for j in range(dim):
        k = int(np.argmax(np.abs(V[:, j])))
        if V[k, j] < 0:
            V[:, j] = -V[:, j]
    return SpectrumResult(w, V, block)


def eval_pn(J: JacobiOperator, z: float, n_max: int) -> list[float]:
    """Forward recurrence values p_0(z) .. p_{n_max}(z), p_0 = 1.

    Uses the symmetric form z p_n = a_n p_{n+1} + b_n p_n + a_{n-1} p_{n-1}.

    Raises:
        ValidationError: if an off-diagonal entry vanishes before n_max
            (the recurrence cannot be continued; the index is reported).
    """
    values = [1.0]
    prev, cur = 0.0, 1.0
    for n in range(n_max):
        a_n = float(J.a_at(n))
        if a_n == 0.0:
            raise ValidationError(f"off-diagonal vanishes at index {n}; recurrence breaks")
        nxt = ((z - float(J.b_at(n))) * cur - (float(J.a_at(n - 1)) if n > 0 else 0.0) * prev) / a_n
        values.append(nxt)
        prev, cur = cur, nxt
    return values


def eval_pn_scaled(J: JacobiOperator, z: float, n_max: int) -> list[tuple[float, float]]:
    """Log-scaled recurrence values: (sign, log|p_n|) pairs, safe for large n."""
    out = [(1.0, 0.0)]
    prev, cur = 0.0, 1.0
    shift = 0.0  # accumulated log scale
    for n in range(n_max):
        a_n = float(J.a_at(n))
        if a_n == 0.0:
            raise ValidationError(f"off-diagonal vanishes at index {n}; recurrence breaks")
        nxt = ((z - float(J.b_at(n))) * cur - (float(J.a_at(n - 1)) if n > 0 else 0.0) * prev) / a_n
        mag = max(abs(nxt), abs(cur))
        if mag > 1e120:
            nxt /= mag
            cur /= mag
            shift += math.log(mag)
        prev, cur = cur, nxt
        sign = math.copysign(1.0, nxt) if nxt != 0.0 else 0.0
        out.append((sign, (math.log(abs(nxt)) + shift) if nxt != 0.0 else -math.inf))
    return out


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights summing to total_mass."""

    nodes: np.ndarray
    weights: np.ndarray
    total_mass: float

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise ValidationError("quadrature weights must be positive")
        s = float(np.sum(self.weights))
        if abs(s - self.total_mass) > 1e-12 * max(1.0, abs(self.total_mass)):
            raise ValidationError("weights do not sum to the declared total mass")

    def integrate(self, f) -> float:
        try:
            vals = np.asarray(f(self.nodes), dtype=float)
            if vals.shape != self.nodes.shape:
                raise TypeError
        except Exception:
            vals = np.array([float(f(x)) for x in self.nodes])
        return float(np.dot(self.weights, vals))

    def inner(self, p, q) -> float:
        """Inner product of two polynomial-like callables under this rule."""
        vals = np.array([float(p(x)) * float(q(x)) for x in self.nodes])
        return float(np.dot(self.weights, vals))


def golub_welsch(J: JacobiOperator, n: int, total_mass: float) -> QuadratureRule:
    """Gauss rule from the n-by-n truncation of a Jacobi operator.

    Nodes are the truncation's eigenvalues; the weight at node i is
    total_mass times the squared first component of its eigenvector.
    """
    if n < 1:
        raise ValidationError("rule size must be at least 1")
    d = [float(J.b_at(i)) for i in range(n)]
    e = [float(J.a_at(i)) for i in range(n - 1)]
    if any(v <= 0 for v in e):
        raise ValidationError("Golub-Welsch requires positive off-diagonal entries")
    w, V = symmetric_tridiagonal_eig(d, e)
    weights = total_mass * V[0, :] ** 2
    return QuadratureRule(nodes=w, weights=weights, total_mass=float(total_mass))


_LEGENDRE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre_rule(n: int, lo: float, hi: float) -> QuadratureRule:
    """Gauss-Legendre rule on [lo, hi], built from the Legendre recurrence."""
    if n not in _LEGENDRE_CACHE:
        ref = golub_welsch(
            JacobiOperator(
                a=lambda k: (k + 1) / math.sqrt((2 * k + 1) * (2 * k + 3)),
                b=lambda k: 0.0,
            ),
            n,
            2.0,
        )
        _LEGENDRE_CACHE[n] = (ref.nodes, ref.weights)
    nodes, weights = _LEGENDRE_CACHE[n]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return QuadratureRule(nodes=mid + half * nodes, weights=half * weights, total_mass=half * 2.0)


def _composite_gauss(f, lo: float, hi: float, panels: int, order: int) -> tuple[float, float]:
    """Composite Gauss-Legendre sum and a companion sum of |f| (same grid)."""
    edges = np.linspace(lo, hi, panels + 1)
    total = 0.0
    total_abs = 0.0
    for i in range(panels):
        rule = gauss_legendre_rule(order, edges[i], edges[i + 1])
        try:
            vals = np.asarray(f(rule.nodes), dtype=float)
            if vals.shape != rule.nodes.shape:
                raise TypeError
        except Exception:
            vals = np.array([float(f(x)) for x in rule.nodes])
        total += float(np.dot(rule.weights, vals))
        total_abs += float(np.dot(rule.weights, np.abs(vals)))
    return total, total_abs


def adaptive_integrate(
    f,
    lo: float,
    hi: float,
    rtol: float = 1e-10,
    atol: float | None = None,
    order: int = 16,
    max_doublings: int = 14,
) -> float:
    """Integrate f on [lo, hi], doubling panel counts until two successive
    refinements differ by less than max(atol, rtol * |I|).

    Raises ConvergenceError after ``max_doublings`` refinements.
    """
    if atol is None:
        atol = rtol
    panels = 4
    prev, _ = _composite_gauss(f, lo, hi, panels, order)
    for _ in range(max_doublings):
        panels *= 2
        cur, cur_abs = _composite_gauss(f, lo, hi, panels, order)
        if abs(cur - prev) <= max(atol, rtol * max(abs(cur), 1e-3 * cur_abs)):
            return cur
        prev = cur
    raise ConvergenceError(f"adaptive quadrature did not converge on [{lo}, {hi}]")


def halfline_integrate(
    f,
    lo: float = 0.0,
    rtol: float = 1e-10,
    atol: float | None = None,
    envelope_drop: float = 1e-16,
    t0: float = 4.0,
    max_extensions: int = 12,
) -> float:
    """Integrate f on [lo, infinity) for integrands with super-polynomial decay.

    The domain is truncated where the sampled envelope of |f| falls below
    ``envelope_drop`` times its peak, then integrated adaptively; one
    further doubling of the truncation point acts as a tail check.
    """
    if atol is None:
        atol = rtol
    T = lo + t0
    peak = 0.0
    for _ in range(max_extensions):
        samples = np.linspace(lo, T, 65)[1:]
        try:
            mags = np.abs(np.asarray(f(samples), dtype=float))
        except Exception:
            mags = np.array([abs(float(f(x))) for x in samples])
        peak = max(peak, float(np.max(mags)))
        tail = float(np.max(mags[-4:]))
        if peak > 0 and tail <= envelope_drop * peak:
            break
        T = lo + 2 * (T - lo)
    else:
        raise ConvergenceError("could not find a truncation point for the half-line integral")
    value = adaptive_integrate(f, lo, T, rtol=rtol, atol=atol)
    tail_part = adaptive_integrate(f, T, lo + 2 * (T - lo), rtol=max(rtol, 1e-8), atol=max(atol, 1e-14))
    value += tail_part
    return value


@dataclass(frozen=True)
class BoundednessReport:
    """Outcome of the off-diagonal/diagonal boundedness diagnostic.

    This is a heuristic indicator, never a proof: ``sign`` names the branch
    s_n = a_n + a_{n-1} + sign * b_n that is bounded above (strict test), or
    the slower-growing branch when both grow (``strictly_bounded`` False).
    ``leading`` holds the fitted n^2 coefficients (plus branch, minus
    branch); ``margin_trace`` samples (n, running_max - s_n) slack values
    for the selected branch.
    """

    sign: int | None
    strictly_bounded: bool
    leading: tuple[float, float]
    margin_trace: tuple[tuple[int, float], ...] = field(repr=False)


def _branch_values(J: JacobiOperator, n_max: int, sign: int) -> np.ndarray:
    ns = np.arange(1, n_max + 1)
    return np.array(
        [float(J.a_at(n)) + float(J.a_at(n - 1)) + sign * float(J.b_at(n)) for n in ns]
    )


def _fit_leading(s: np.ndarray) -> float:
    ns = np.arange(1, s.size + 1, dtype=float)
    lo = s.size // 2
    design = np.column_stack([ns[lo:] ** 2, np.ones(s.size - lo)])
    coef, *_ = np.linalg.lstsq(design, s[lo:], rcond=None)
    return float(coef[0])


def _bounded_above(s: np.ndarray) -> bool:
    half = s.size // 2
    head_max = float(np.max(s[:half]))
    tail_max = float(np.max(s[half:]))
    return tail_max <= head_max + 1e-9 * max(1.0, abs(head_max))


def berezanskii_test(J: JacobiOperator, n_max: int = 500) -> BoundednessReport:
    """Evaluate a_n + a_{n-1} +/- b_n up to n_max and pick a bounded branch.

    Strictly bounded branches win; when both branches grow, the one with
    the smaller fitted leading coefficient is selected and flagged as not
    strictly bounded.  Returns sign None only when the two branches are
    indistinguishable.  Diagnostic only.
    """
    if n_max < 8:
        raise ValidationError("n_max too small for a meaningful diagnostic")
    s_plus = _branch_values(J, n_max, +1)
    s_minus = _branch_values(J, n_max, -1)
    lead_plus = _fit_leading(s_plus)
    lead_minus = _fit_leading(s_minus)
    bounded_plus = _bounded_above(s_plus)
    bounded_minus = _bounded_above(s_minus)

    if bounded_plus and not bounded_minus:
        sign, strict = +1, True
    elif bounded_minus and not bounded_plus:
        sign, strict = -1, True
    elif bounded_plus and bounded_minus:
        sign = +1 if float(np.max(s_plus)) <= float(np.max(s_minus)) else -1
        strict = True
    else:
        gap = abs(lead_plus - lead_minus)
        if gap > 1e-9 * max(1.0, abs(lead_plus), abs(lead_minus)):
            sign, strict = (+1 if lead_plus < lead_minus else -1), False
        else:
            sign, strict = None, False

    traced = s_plus if sign == +1 else s_minus if sign == -1 else s_plus
    running = np.maximum.accumulate(traced)
    stride = max(1, n_max // 50)
    trace = tuple(
        (int(n + 1), float(running[n] - traced[n])) for n in range(0, n_max, stride)
    )
    return BoundednessReport(
        sign=sign,
        strictly_bounded=strict,
        leading=(lead_plus, lead_minus),
        margin_trace=trace,
    )
