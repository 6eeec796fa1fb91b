"""Scalar fields R^n -> R with exact analytic gradients.

Two concrete kinds are provided. ``PolynomialField`` stores a polynomial as
a list of (exponent multi-index, coefficient) terms and differentiates it
term by term, so its gradient is exact up to rounding. ``CallableField``
wraps closed-form value/gradient callables and is used for the built-in
non-polynomial energies (e.g. exponential compartment energies).

Any object with attributes ``n``, ``value(x)`` and ``grad(x)`` is accepted
wherever a scalar field is expected.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, FormatError


def _as_point(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise DimensionMismatch(f"expected a point in R^{n}, got shape {x.shape}")
    return x


class PolynomialField:
    """Polynomial scalar field with rational-style exact differentiation.

    Terms are (exponents, coefficient) pairs; exponents are nonnegative
    integers, one per coordinate. Duplicate multi-indices are merged and
    zero terms dropped, so the stored representation is canonical.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Iterable[tuple[Sequence[int], float]] = ()):
        if n < 1:
            raise DimensionMismatch(f"dimension must be >= 1, got {n}")
        merged: dict[tuple[int, ...], float] = {}
        for exponents, coeff in terms:
            exps = tuple(int(e) for e in exponents)
            if len(exps) != n:
                raise DimensionMismatch(
                    f"exponent multi-index {exps} has length {len(exps)}, expected {n}"
                )
            if any(e < 0 for e in exps):
                raise FormatError(f"negative exponent in multi-index {exps}")
            merged[exps] = merged.get(exps, 0.0) + float(coeff)
        self.n = int(n)
        self.terms = tuple(sorted((e, c) for e, c in merged.items() if c != 0.0))

    @classmethod
    def constant(cls, n: int, c: float) -> "PolynomialField":
        return cls(n, [((0,) * n, c)])

    @classmethod
    def coordinate(cls, n: int, i: int) -> "PolynomialField":
        """The coordinate function x_i; ``i`` is 1-based like all external indices."""
        if not 1 <= i <= n:
            raise DimensionMismatch(f"coordinate index {i} out of range 1..{n}")
        exps = [0] * n
        exps[i - 1] = 1
        return cls(n, [(exps, 1.0)])

    def value(self, x) -> float:
        x = _as_point(x, self.n)
        total = 0.0
        for exps, coeff in self.terms:
            term = coeff
            for xv, e in zip(x, exps):
                if e:
                    term *= xv**e
            total += term
        return total

    def grad(self, x) -> np.ndarray:
        x = _as_point(x, self.n)
        g = np.zeros(self.n)
        for exps, coeff in self.terms:
            for m, em in enumerate(exps):
                if em == 0:
                    continue
                term = coeff * em
                for j, (xv, e) in enumerate(zip(x, exps)):
                    p = e - 1 if j == m else e
                    if p:
                        term *= xv**p
                g[m] += term
        return g

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = PolynomialField.constant(self.n, float(other))
        if not isinstance(other, PolynomialField):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatch("cannot add polynomials over different dimensions")
        return PolynomialField(self.n, list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self):
        return PolynomialField(self.n, [(e, -c) for e, c in self.terms])

    def __sub__(self, other):
        return self + (-other if isinstance(other, PolynomialField) else -float(other))

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        return PolynomialField(self.n, [(e, c * float(scalar)) for e, c in self.terms])

    __rmul__ = __mul__

    def __repr__(self):
        return f"PolynomialField(n={self.n}, terms={self.terms!r})"


class CallableField:
    """Scalar field backed by closed-form value and gradient callables."""

    __slots__ = ("n", "_value", "_grad", "name")

    def __init__(self, n: int, value: Callable, grad: Callable, name: str = "callable"):
        self.n = int(n)
        self._value = value
        self._grad = grad
        self.name = name

    def value(self, x) -> float:
        return float(self._value(_as_point(x, self.n)))

    def grad(self, x) -> np.ndarray:
        g = np.asarray(self._grad(_as_point(x, self.n)), dtype=float)
        if g.shape != (self.n,):
            raise DimensionMismatch(f"gradient has shape {g.shape}, expected ({self.n},)")
        return g

    def __repr__(self):
        return f"CallableField(n={self.n}, name={self.name!r})"


def exp_sum_field(n: int, scale: float = 1.0) -> CallableField:
    """scale * sum_i exp(x_i): monotone convex compartment energy."""
    return CallableField(
        n,
        value=lambda x: scale * float(np.sum(np.exp(x))),
        grad=lambda x: scale * np.exp(x),
        name="exp_sum",
    )


def exp_neg_sum_field(n: int, scale: float = 1.0) -> CallableField:
    """scale * exp(-sum_i x_i): strictly positive, e.g. conductance/(T1*T2)."""

    def _v(x):
        return scale * float(np.exp(-np.sum(x)))

    def _g(x):
        return np.full(n, -scale * np.exp(-np.sum(x)))

    return CallableField(n, value=_v, grad=_g, name="exp_neg_sum")


BUILTIN_FIELDS: dict[str, Callable[..., CallableField]] = {
    "exp_sum": exp_sum_field,
    "exp_neg_sum": exp_neg_sum_field,
}


def builtin_field(name: str, n: int, params: dict | None = None):
    try:
        factory = BUILTIN_FIELDS[name]
    except KeyError:
        raise FormatError(f"unknown builtin field {name!r}") from None
    return factory(n, **(params or {}))
