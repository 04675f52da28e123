"""Jump kernels of Levy processes and their exponential integrals.

All triplets use the untruncated compensation convention, so the quantity a
kernel must supply for the Laplace exponent is

    J(alpha) = integral of (exp(-alpha*x) - 1 + alpha*x) K(dx),

finite exactly when the big-jump side of K has a light enough exponential
tail.  Every parametric family below answers the tail questions analytically;
the user-supplied density falls back to quadrature and may answer "unknown".
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc, gammaincc


class Verdict(enum.Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    UNKNOWN = "unknown"


class IntegrationError(RuntimeError):
    """Numerical quadrature on a user-supplied kernel failed."""


class DivergentIntegral(ArithmeticError):
    """The exponential-moment integral is infinite at this argument."""


@dataclass(frozen=True)
class NoJumps:
    def __repr__(self):
        return "NoJumps()"


@dataclass(frozen=True)
class PointMasses:
    """K(dx) = sum_i rate_i * delta_{x_i}(dx)."""

    masses: tuple[tuple[float, float], ...]  # (location, rate) pairs

    def __post_init__(self):
        masses = tuple((float(x), float(r)) for x, r in self.masses)
        object.__setattr__(self, "masses", masses)
        for x, r in masses:
            if x == 0.0:
                raise ValueError("point-mass locations must be nonzero")
            if r <= 0.0:
                raise ValueError("point-mass rates must be strictly positive")


@dataclass(frozen=True)
class GaussianJumps:
    """Compound-Poisson kernel rate * Normal(mean, std**2)."""

    rate: float
    mean: float = 0.0
    std: float = 1.0

    def __post_init__(self):
        if self.rate <= 0.0:
            raise ValueError("jump rate must be positive")
        if self.std <= 0.0:
            raise ValueError("jump std must be positive")


@dataclass(frozen=True)
class TemperedStable:
    """Density c * exp(-M*x) / x**(1+beta) on x > 0, with 0 < beta < 1."""

    c: float
    M: float
    beta: float

    def __post_init__(self):
        if self.c <= 0.0 or self.M <= 0.0:
            raise ValueError("tempered-stable c and M must be positive")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("tempered-stable beta must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class GeneralDensity:
    """User-supplied kernel density on a declared support.

    ``integrability_checked`` asserts that integral of (x^2 ∧ |x|) K(dx) is
    finite; the library records the assertion instead of verifying it.
    ``sampler(rng, size)`` is optional and only needed for path simulation.
    """

    density: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    integrability_checked: bool
    sampler: Callable | None = field(default=None)

    def __post_init__(self):
        lo, hi = self.support
        if not lo < hi:
            raise ValueError("support must be an interval (lo, hi) with lo < hi")
        if not self.integrability_checked:
            raise ValueError(
                "GeneralDensity requires the caller to assert that "
                "integral of (x^2 min |x|) K(dx) is finite")


JumpMeasure = Union[NoJumps, PointMasses, GaussianJumps, TemperedStable, GeneralDensity]


# ---------------------------------------------------------------------------
# incomplete-gamma helpers for the tempered-stable family

def _upper_gamma(a: float, x: float) -> float:
    """Gamma(a, x) for a > 0."""
    return gamma_fn(a) * gammaincc(a, x)


def _lower_gamma(a: float, x: float) -> float:
    return gamma_fn(a) * gammainc(a, x)


def _upper_gamma_neg(beta: float, x: float) -> float:
    # Gamma(-beta, x) via Gamma(a+1, x) = a*Gamma(a, x) + x^a e^{-x}
    return (_upper_gamma(1.0 - beta, x) - x ** (-beta) * math.exp(-x)) / (-beta)


def ts_compensator_closed_form(c: float, M: float, beta: float, alpha: float) -> float:
    """integral (e^{-ax} - 1 + ax) c e^{-Mx} x^{-1-beta} dx, for alpha >= -M.

    Equals c*Gamma(1-beta)/(-beta) * ((M+a)^beta - M^beta - a*beta*M^(beta-1)).
    """
    if alpha < -M:
        raise DivergentIntegral("tempered-stable integral diverges for alpha < -M")
    g = gamma_fn(1.0 - beta)
    return c * g / (-beta) * ((M + alpha) ** beta - M ** beta
                              - alpha * beta * M ** (beta - 1.0))


def ts_compensator_by_quadrature(c: float, M: float, beta: float, alpha: float,
                                 split: float = 1e-4) -> float:
    """Quadrature oracle for the tempered-stable compensator integral.

    The integrand behaves like x^{1-beta} near zero, where naive quadrature
    loses digits; below ``split`` the e^{-ax}-1+ax factor is expanded in
    series and each x^{j-1-beta} e^{-Mx} moment integrated in closed form.
    """
    if alpha < -M:
        raise DivergentIntegral("tempered-stable integral diverges for alpha < -M")
    head = 0.0
    for j in range(2, 60):
        coeff = (-alpha) ** j / math.factorial(j)
        piece = coeff * M ** (beta - j) * _lower_gamma(j - beta, M * split)
        head += piece
        if abs(piece) < 1e-18 * max(1.0, abs(head)):
            break

    def integrand(x):
        return (math.exp(-alpha * x) - 1.0 + alpha * x) * math.exp(-M * x) * x ** (-1.0 - beta)

    tail, _ = quad(integrand, split, np.inf, epsabs=1e-10, epsrel=1e-8, limit=200)
    return c * head + c * tail


# ---------------------------------------------------------------------------
# kernel-level quantities

def compensator_integral(kernel: JumpMeasure, alpha: float) -> float:
    """integral (e^{-alpha x} - 1 + alpha x) K(dx); raises DivergentIntegral."""
    if isinstance(kernel, NoJumps):
        return 0.0
    if alpha == 0.0:
        return 0.0
    if isinstance(kernel, PointMasses):
        total = 0.0
        for x, r in kernel.masses:
            total += r * (math.exp(-alpha * x) - 1.0 + alpha * x)
        return total
    if isinstance(kernel, GaussianJumps):
        mgf = math.exp(-alpha * kernel.mean + 0.5 * alpha * alpha * kernel.std ** 2)
        return kernel.rate * (mgf - 1.0 + alpha * kernel.mean)
    if isinstance(kernel, TemperedStable):
        return ts_compensator_closed_form(kernel.c, kernel.M, kernel.beta, alpha)
    if isinstance(kernel, GeneralDensity):
        if exp_moment_condition(kernel, alpha) is Verdict.VIOLATED:
            raise DivergentIntegral("exponential moment integral diverges")
        lo, hi = kernel.support

        def integrand(x):
            base = math.expm1(-alpha * x) + alpha * x
            return base * float(kernel.density(np.asarray(x)))

        try:
            val, err = quad(integrand, lo, hi, epsabs=1e-10, epsrel=1e-8, limit=400,
                            points=[0.0] if lo < 0.0 < hi else None)
        except Exception as exc:  # quadrature blow-ups surface explicitly
            raise IntegrationError(f"kernel integral failed: {exc}") from exc
        if not math.isfinite(val):
            raise IntegrationError("kernel integral returned a non-finite value")
        return val
    raise TypeError(f"unknown jump measure {kernel!r}")


def exp_tail_condition(kernel: JumpMeasure, a: float, side: str) -> Verdict:
    """Finiteness of integral e^{-a x} K(dx) over {x < -1} (side='neg')
    or {x > 1} (side='pos')."""
    if isinstance(kernel, (NoJumps, PointMasses, GaussianJumps)):
        # no jumps / bounded jumps / Gaussian tails dominate every exponential
        return Verdict.SATISFIED
    if isinstance(kernel, TemperedStable):
        if side == "neg":
            return Verdict.SATISFIED  # only positive jumps
        return Verdict.SATISFIED if -a <= kernel.M else Verdict.VIOLATED
    if isinstance(kernel, GeneralDensity):
        lo, hi = kernel.support
        if side == "neg":
            if lo >= -1.0:
                return Verdict.SATISFIED
            bound_lo, bound_hi = lo, -1.0
        else:
            if hi <= 1.0:
                return Verdict.SATISFIED
            bound_lo, bound_hi = 1.0, hi

        def integrand(x):
            return math.exp(-a * x) * float(kernel.density(np.asarray(x)))

        try:
            val, err = quad(integrand, bound_lo, bound_hi, epsabs=1e-10, epsrel=1e-8,
                            limit=400)
        except Exception:
            return Verdict.UNKNOWN
        if not math.isfinite(val) or (abs(val) > 0 and err > 0.5 * abs(val)):
            return Verdict.UNKNOWN
        return Verdict.SATISFIED
    raise TypeError(f"unknown jump measure {kernel!r}")


def exp_moment_condition(kernel: JumpMeasure, alpha: float) -> Verdict:
    """Condition for E exp(-alpha X_t) < infinity coming from the kernel side.

    For alpha > 0 only the negative-jump tail matters, for alpha < 0 only the
    positive-jump tail; alpha = 0 is always fine.
    """
    if alpha == 0.0:
        return Verdict.SATISFIED
    if alpha > 0.0:
        return exp_tail_condition(kernel, alpha, "neg")
    return exp_tail_condition(kernel, alpha, "pos")


def ladder_condition(kernel: JumpMeasure, alpha: float, delta: float = 1.0) -> Verdict:
    """Moment-ladder hypothesis for the recursions.

    alpha >= 1: negative-jump tail at exponent alpha + delta (delta fixed at 1,
    a sufficient choice).  alpha < 0: positive-jump tail at exponent |alpha|+1.
    """
    if alpha >= 1.0:
        return exp_tail_condition(kernel, alpha + delta, "neg")
    if alpha < 0.0:
        return exp_tail_condition(kernel, -(abs(alpha) + 1.0), "pos")
    raise ValueError("ladder condition applies to alpha >= 1 or alpha < 0")


def kernel_mean(kernel: JumpMeasure) -> float:
    """integral x K(dx) (finite for every kernel admitted here)."""
    if isinstance(kernel, NoJumps):
        return 0.0
    if isinstance(kernel, PointMasses):
        return sum(x * r for x, r in kernel.masses)
    if isinstance(kernel, GaussianJumps):
        return kernel.rate * kernel.mean
    if isinstance(kernel, TemperedStable):
        return kernel.c * gamma_fn(1.0 - kernel.beta) * kernel.M ** (kernel.beta - 1.0)
    if isinstance(kernel, GeneralDensity):
        lo, hi = kernel.support
        try:
            val, _ = quad(lambda x: x * float(kernel.density(np.asarray(x))),
                          lo, hi, epsabs=1e-10, epsrel=1e-8, limit=400)
        except Exception as exc:
            raise IntegrationError(f"kernel mean failed: {exc}") from exc
        return val
    raise TypeError(f"unknown jump measure {kernel!r}")


def kernel_second_moment(kernel: JumpMeasure) -> float:
    """integral x^2 K(dx); may be large but is finite for the families here."""
    if isinstance(kernel, NoJumps):
        return 0.0
    if isinstance(kernel, PointMasses):
        return sum(x * x * r for x, r in kernel.masses)
    if isinstance(kernel, GaussianJumps):
        return kernel.rate * (kernel.mean ** 2 + kernel.std ** 2)
    if isinstance(kernel, TemperedStable):
        return kernel.c * gamma_fn(2.0 - kernel.beta) * kernel.M ** (kernel.beta - 2.0)
    if isinstance(kernel, GeneralDensity):
        lo, hi = kernel.support
        try:
            val, _ = quad(lambda x: x * x * float(kernel.density(np.asarray(x))),
                          lo, hi, epsabs=1e-10, epsrel=1e-8, limit=400)
        except Exception as exc:
            raise IntegrationError(f"kernel second moment failed: {exc}") from exc
        return val
    raise TypeError(f"unknown jump measure {kernel!r}")


def is_finite_activity(kernel: JumpMeasure) -> bool:
    return isinstance(kernel, (NoJumps, PointMasses, GaussianJumps)) or (
        isinstance(kernel, GeneralDensity))


def total_rate(kernel: JumpMeasure) -> float:
    """K(R \\ {0}) for finite-activity kernels."""
    if isinstance(kernel, NoJumps):
        return 0.0
    if isinstance(kernel, PointMasses):
        return sum(r for _, r in kernel.masses)
    if isinstance(kernel, GaussianJumps):
        return kernel.rate
    if isinstance(kernel, GeneralDensity):
        lo, hi = kernel.support
        try:
            val, _ = quad(lambda x: float(kernel.density(np.asarray(x))),
                          lo, hi, epsabs=1e-10, epsrel=1e-8, limit=400)
        except Exception as exc:
            raise IntegrationError(f"kernel total rate failed: {exc}") from exc
        return val
    raise ValueError("tempered-stable kernel has infinite activity; use rate_above")


def rate_above(kernel: TemperedStable, eps: float) -> float:
    """K((eps, infinity)) for the tempered-stable kernel."""
    return kernel.c * kernel.M ** kernel.beta * _upper_gamma_neg(kernel.beta,
                                                                 kernel.M * eps)


def mean_above(kernel: TemperedStable, eps: float) -> float:
    """integral_{x > eps} x K(dx)."""
    return kernel.c * kernel.M ** (kernel.beta - 1.0) * _upper_gamma(
        1.0 - kernel.beta, kernel.M * eps)


def variance_below(kernel: TemperedStable, eps: float) -> float:
    """integral_{0 < x <= eps} x^2 K(dx), the small-jump compensation variance."""
    return kernel.c * kernel.M ** (kernel.beta - 2.0) * _lower_gamma(
        2.0 - kernel.beta, kernel.M * eps)


def positive_jumps_only(kernel: JumpMeasure) -> bool:
    if isinstance(kernel, NoJumps):
        return True
    if isinstance(kernel, PointMasses):
        return all(x > 0 for x, _ in kernel.masses)
    if isinstance(kernel, TemperedStable):
        return True
    if isinstance(kernel, GeneralDensity):
        return kernel.support[0] >= 0.0
    return False


def negative_jumps_only(kernel: JumpMeasure) -> bool:
    if isinstance(kernel, NoJumps):
        return True
    if isinstance(kernel, PointMasses):
        return all(x < 0 for x, _ in kernel.masses)
    if isinstance(kernel, GeneralDensity):
        return kernel.support[1] <= 0.0
    return False
