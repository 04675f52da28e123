"""Closed-form time functions for process coefficients.

Intensities, time changes and integrands are restricted to a small grammar
with elementary antiderivatives: polynomials in t, a*exp(b*t), a*ln(1+t),
a*(1+t)^p and finite sums of those.  Every node evaluates vectorized over
numpy arrays and integrates exactly, which keeps the path simulator free of
per-cell quadrature.

``Scaled``, ``Flip`` and ``Func`` are internal combinators (used by time
reversal and by user-supplied callables); they are not part of the JSON
document schema and refuse to serialize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.integrate import quad


class ExpressionError(ValueError):
    pass


def _as_float_tuple(xs) -> tuple[float, ...]:
    return tuple(float(x) for x in xs)


@dataclass(frozen=True)
class Poly:
    """Polynomial sum_j coeffs[j] * t**j."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_float_tuple(self.coeffs))
        if len(self.coeffs) == 0:
            raise ExpressionError("polynomial needs at least one coefficient")

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), self.coeffs)

    def derivative(self) -> "Expression":
        if len(self.coeffs) == 1:
            return Poly((0.0,))
        return Poly(tuple(j * c for j, c in enumerate(self.coeffs) if j >= 1))

    def integral(self, a, b):
        anti = (0.0,) + tuple(c / (j + 1) for j, c in enumerate(self.coeffs))
        pa = np.polynomial.polynomial.polyval(np.asarray(a, dtype=float), anti)
        pb = np.polynomial.polynomial.polyval(np.asarray(b, dtype=float), anti)
        return pb - pa


@dataclass(frozen=True)
class Exp:
    """scale * exp(rate * t)."""

    scale: float
    rate: float

    def __call__(self, t):
        return self.scale * np.exp(self.rate * np.asarray(t, dtype=float))

    def derivative(self) -> "Expression":
        return Exp(self.scale * self.rate, self.rate)

    def integral(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.rate == 0.0:
            return self.scale * (b - a)
        return self.scale / self.rate * (np.exp(self.rate * b) - np.exp(self.rate * a))


@dataclass(frozen=True)
class Log1p:
    """scale * ln(1 + t), defined for t > -1."""

    scale: float

    def __call__(self, t):
        return self.scale * np.log1p(np.asarray(t, dtype=float))

    def derivative(self) -> "Expression":
        return Pow1p(self.scale, -1.0)

    def integral(self, a, b):
        def anti(t):
            t = np.asarray(t, dtype=float)
            return (1.0 + t) * np.log1p(t) - t

        return self.scale * (anti(b) - anti(a))


@dataclass(frozen=True)
class Pow1p:
    """scale * (1 + t)**power, defined for t > -1."""

    scale: float
    power: float

    def __call__(self, t):
        return self.scale * (1.0 + np.asarray(t, dtype=float)) ** self.power

    def derivative(self) -> "Expression":
        return Pow1p(self.scale * self.power, self.power - 1.0)

    def integral(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.power == -1.0:
            return self.scale * (np.log1p(b) - np.log1p(a))
        p1 = self.power + 1.0
        return self.scale / p1 * ((1.0 + b) ** p1 - (1.0 + a) ** p1)


@dataclass(frozen=True)
class Sum:
    terms: tuple["Expression", ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ExpressionError("empty sum")

    def __call__(self, t):
        out = self.terms[0](t)
        for term in self.terms[1:]:
            out = out + term(t)
        return out

    def derivative(self) -> "Expression":
        return Sum(tuple(term.derivative() for term in self.terms))

    def integral(self, a, b):
        out = self.terms[0].integral(a, b)
        for term in self.terms[1:]:
            out = out + term.integral(a, b)
        return out


@dataclass(frozen=True)
class Scaled:
    """factor * inner(t).  Internal node, not serializable."""

    inner: "Expression"
    factor: float

    def __call__(self, t):
        return self.factor * self.inner(t)

    def derivative(self) -> "Expression":
        return Scaled(self.inner.derivative(), self.factor)

    def integral(self, a, b):
        return self.factor * self.inner.integral(a, b)


@dataclass(frozen=True)
class Flip:
    """inner(pivot - t): the time reversal of ``inner`` around ``pivot``."""

    inner: "Expression"
    pivot: float

    def __call__(self, t):
        return self.inner(self.pivot - np.asarray(t, dtype=float))

    def derivative(self) -> "Expression":
        return Scaled(Flip(self.inner.derivative(), self.pivot), -1.0)

    def integral(self, a, b):
        return self.inner.integral(self.pivot - np.asarray(b, dtype=float),
                                    self.pivot - np.asarray(a, dtype=float))


@dataclass(frozen=True, eq=False)
class Func:
    """Arbitrary callable coefficient; integrates by adaptive quadrature.

    No symbolic derivative, no serialization.  Meant for programmatic use of
    GeneralIto characteristics outside the document grammar.
    """

    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t):
        return np.asarray(self.fn(np.asarray(t, dtype=float)), dtype=float)

    def derivative(self) -> "Expression":
        raise ExpressionError("callable coefficients have no symbolic derivative")

    def integral(self, a, b):
        a_arr = np.atleast_1d(np.asarray(a, dtype=float))
        b_arr = np.atleast_1d(np.asarray(b, dtype=float))
        a_arr, b_arr = np.broadcast_arrays(a_arr, b_arr)
        out = np.empty(a_arr.shape)
        flat_a, flat_b, flat_o = a_arr.ravel(), b_arr.ravel(), out.ravel()
        for i in range(flat_a.size):
            flat_o[i] = quad(lambda s: float(self.fn(np.asarray(s))),
                             flat_a[i], flat_b[i], epsabs=1e-10, epsrel=1e-8)[0]
        if np.isscalar(a) and np.isscalar(b):
            return float(out.ravel()[0])
        return out


Expression = Union[Poly, Exp, Log1p, Pow1p, Sum, Scaled, Flip, Func]

_PUBLIC_KINDS = {"poly": Poly, "exp": Exp, "log1p": Log1p, "pow1p": Pow1p, "sum": Sum}


def constant(value: float) -> Poly:
    return Poly((float(value),))


def flip(expr: Expression, pivot: float) -> Expression:
    """expr(pivot - t), simplifying constants."""
    if isinstance(expr, Poly) and len(expr.coeffs) == 1:
        return expr
    return Flip(expr, float(pivot))


def as_expression(obj) -> Expression:
    if isinstance(obj, (Poly, Exp, Log1p, Pow1p, Sum, Scaled, Flip, Func)):
        return obj
    if isinstance(obj, (int, float)):
        return constant(obj)
    if callable(obj):
        return Func(obj)
    raise ExpressionError(f"cannot interpret {obj!r} as a time function")


def expression_to_dict(expr: Expression) -> dict:
    if isinstance(expr, Poly):
        return {"kind": "poly", "coeffs": list(expr.coeffs)}
    if isinstance(expr, Exp):
        return {"kind": "exp", "scale": expr.scale, "rate": expr.rate}
    if isinstance(expr, Log1p):
        return {"kind": "log1p", "scale": expr.scale}
    if isinstance(expr, Pow1p):
        return {"kind": "pow1p", "scale": expr.scale, "power": expr.power}
    if isinstance(expr, Sum):
        return {"kind": "sum", "terms": [expression_to_dict(t) for t in expr.terms]}
    raise ExpressionError(f"{type(expr).__name__} is internal and not serializable")


def expression_from_dict(data: dict) -> Expression:
    if not isinstance(data, dict) or "kind" not in data:
        raise ExpressionError(f"expression must be an object with a 'kind': {data!r}")
    kind = data["kind"]
    if kind == "poly":
        return Poly(tuple(data["coeffs"]))
    if kind == "exp":
        return Exp(float(data["scale"]), float(data["rate"]))
    if kind == "log1p":
        return Log1p(float(data["scale"]))
    if kind == "pow1p":
        return Pow1p(float(data["scale"]), float(data["power"]))
    if kind == "sum":
        return Sum(tuple(expression_from_dict(t) for t in data["terms"]))
    raise ExpressionError(f"unknown expression kind {kind!r}")


def check_nonnegative(expr: Expression, lo: float, hi: float, name: str,
                      samples: int = 257) -> None:
    ts = np.linspace(lo, hi, samples)
    vals = np.asarray(expr(ts), dtype=float)
    if np.any(vals < -1e-12 * max(1.0, float(np.max(np.abs(vals))))):
        raise ExpressionError(f"{name} must be nonnegative on [{lo}, {hi}]")


def check_strictly_positive(expr: Expression, lo: float, hi: float, name: str,
                            samples: int = 257) -> None:
    ts = np.linspace(lo, hi, samples)
    vals = np.asarray(expr(ts), dtype=float)
    if np.any(vals <= 0.0):
        raise ExpressionError(f"{name} must be strictly positive on [{lo}, {hi}]")


def check_nonvanishing(expr: Expression, lo: float, hi: float, name: str,
                       samples: int = 257) -> None:
    ts = np.linspace(lo, hi, samples)
    vals = np.asarray(expr(ts), dtype=float)
    if np.any(vals == 0.0) or float(np.min(np.abs(vals))) == 0.0:
        raise ExpressionError(f"{name} must not vanish on [{lo}, {hi}]")
    if not np.all(np.isfinite(vals)):
        raise ExpressionError(f"{name} must be finite on [{lo}, {hi}]")


def probe_window(t: float | None, fallback: float = 16.0) -> float:
    """Validation window for sampled invariant checks."""
    if t is None or not math.isfinite(t) or t <= 0:
        return fallback
    return float(t)
