"""Levy and independent-increment process models via their characteristics.

Triplets are stored in the untruncated convention: the jump compensator
integrates x itself, so the Laplace exponent of a Levy process reads

    Phi(alpha) = alpha*b0 - alpha^2*c0/2 - integral (e^{-alpha x} - 1 + alpha x) K0(dx)

and E exp(-alpha X_t) = exp(-t Phi(alpha)).  A triplet quoted with truncated
compensation converts through b0 = b_trunc - integral_{|x|>1} x K(dx).  The
non-homogeneous variants describe absolutely continuous characteristics
(b_s, c_s, K_s) and expose the density H_s of the exponent in time.

Divergent exponents are returned as an explicit flagged value, never as a
floating-point infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.integrate import quad

from .expressions import (Expression, ExpressionError, as_expression,
                          check_nonnegative, check_nonvanishing,
                          check_strictly_positive, flip, probe_window)
from .jumps import (DivergentIntegral, GaussianJumps, GeneralDensity,
                    JumpMeasure, NoJumps, PointMasses, TemperedStable,
                    Verdict, compensator_integral, exp_moment_condition,
                    kernel_mean, ladder_condition)


class DivergentExponentError(ArithmeticError):
    """Raised when a finite exponent value was required but none exists."""


@dataclass(frozen=True)
class ExponentValue:
    """A Laplace-exponent value: either a finite real or 'divergent'.

    Divergent means E exp(-alpha X_t) = +infinity, i.e. Phi = -infinity.
    """

    value: float | None
    divergent: bool = False

    @staticmethod
    def finite(v: float) -> "ExponentValue":
        return ExponentValue(float(v), False)

    @staticmethod
    def diverged() -> "ExponentValue":
        return ExponentValue(None, True)

    def expect_finite(self, context: str = "") -> float:
        if self.divergent:
            raise DivergentExponentError(
                f"exponent is divergent{': ' + context if context else ''}")
        return self.value

    def __repr__(self):
        return "ExponentValue(divergent)" if self.divergent else f"ExponentValue({self.value})"


@dataclass(frozen=True)
class LevyTriplet:
    """Generating triplet (b0, c0, K0) of a Levy process, untruncated drift."""

    b0: float
    c0: float
    jumps: JumpMeasure = field(default_factory=NoJumps)

    def __post_init__(self):
        if self.c0 < 0.0:
            raise ValueError("Gaussian variance rate c0 must be nonnegative")


def brownian_motion(mu: float, sigma2: float) -> LevyTriplet:
    """Drifted Brownian motion X_t = mu*t + sigma*W_t with variance rate sigma2."""
    return LevyTriplet(mu, sigma2, NoJumps())


def compound_poisson(kernel: JumpMeasure, drift: float = 0.0,
                     c0: float = 0.0) -> LevyTriplet:
    """Process that is the sum of its jumps (plus optional extra drift).

    In the untruncated convention the raw sum of jumps carries drift
    integral x K(dx), so the triplet drift is drift + kernel mean.
    """
    return LevyTriplet(drift + kernel_mean(kernel), c0, kernel)


def poisson_process(rate: float) -> LevyTriplet:
    """Homogeneous Poisson counting process with unit jumps."""
    return compound_poisson(PointMasses(((1.0, rate),)))


def tempered_stable_subordinator(c: float, M: float, beta: float) -> LevyTriplet:
    """Driftless subordinator with tempered-stable jump density."""
    return compound_poisson(TemperedStable(c, M, beta))


# ---------------------------------------------------------------------------
# process-with-independent-increments variants

@dataclass(frozen=True)
class Homogeneous:
    triplet: LevyTriplet


@dataclass(frozen=True)
class NonHomPoisson:
    """Counting process with deterministic intensity lambda_s; K_s = lambda_s*delta_1."""

    intensity: Expression

    def __post_init__(self):
        object.__setattr__(self, "intensity", as_expression(self.intensity))
        check_nonnegative(self.intensity, 0.0, probe_window(None), "intensity")


@dataclass(frozen=True)
class TimeChangedLevy:
    """X_t = L_{tau(t)} for a deterministic increasing time change tau.

    Characteristics scale by tau'(t): b_t = b0*tau'(t), c_t = c0*tau'(t),
    K_t = K0*tau'(t).  The derivative is taken symbolically from the
    expression grammar unless supplied explicitly.
    """

    base: LevyTriplet
    tau: Expression
    tau_prime: Expression | None = None

    def __post_init__(self):
        tau = as_expression(self.tau)
        object.__setattr__(self, "tau", tau)
        if self.tau_prime is None:
            try:
                object.__setattr__(self, "tau_prime", tau.derivative())
            except ExpressionError as exc:
                raise ExpressionError(
                    "tau has no symbolic derivative; pass tau_prime explicitly") from exc
        else:
            object.__setattr__(self, "tau_prime", as_expression(self.tau_prime))
        if abs(float(np.asarray(tau(0.0)))) > 1e-12:
            raise ValueError("time change must satisfy tau(0) = 0")
        check_strictly_positive(self.tau_prime, 0.0, probe_window(None), "tau'")


@dataclass(frozen=True)
class IntegratedLevy:
    """X_t = integral_0^t g_s dL_s for a nonvanishing deterministic integrand g.

    B_t = b0 * int g, C_t = c0 * int g^2 and K_s(dx) = f0(x/g_s) dx/|g_s|;
    equivalently each jump of L at time s enters scaled by g_s.  For path
    simulation g must additionally be bounded and piecewise continuous on the
    horizon, which every grammar expression is.
    """

    base: LevyTriplet
    g: Expression

    def __post_init__(self):
        object.__setattr__(self, "g", as_expression(self.g))
        check_nonvanishing(self.g, 0.0, probe_window(None), "g")


@dataclass(frozen=True)
class GeneralIto:
    """Directly specified (b_s, c_s, K_s) with K_s = jump_scale(s) * jumps."""

    b: Expression
    c: Expression
    jumps: JumpMeasure = field(default_factory=NoJumps)
    jump_scale: Expression | None = None

    def __post_init__(self):
        object.__setattr__(self, "b", as_expression(self.b))
        object.__setattr__(self, "c", as_expression(self.c))
        scale = self.jump_scale
        if scale is None:
            scale = as_expression(1.0)
        else:
            scale = as_expression(scale)
        object.__setattr__(self, "jump_scale", scale)
        check_nonnegative(self.c, 0.0, probe_window(None), "c")
        if not isinstance(self.jumps, NoJumps):
            check_nonnegative(self.jump_scale, 0.0, probe_window(None), "jump_scale")


PiiCharacteristics = Union[Homogeneous, NonHomPoisson, TimeChangedLevy,
                           IntegratedLevy, GeneralIto]


@dataclass(frozen=True)
class ReversedCharacteristics:
    """Characteristics of Y_s = X_t - X_{(t-s)-} at a fixed horizon t.

    The reversed densities are the time flips b̄_u = b_{t-u} (and likewise for
    c and K).  The single-point correction at u = t is Lebesgue-null and is
    not represented.  The reversal of every supported variant is again a
    variant of the same family, so the object wraps an ordinary process.
    """

    process: PiiCharacteristics
    horizon: float


AnyPii = Union[Homogeneous, NonHomPoisson, TimeChangedLevy, IntegratedLevy,
               GeneralIto, ReversedCharacteristics]


def _unwrap(pii: AnyPii) -> PiiCharacteristics:
    return pii.process if isinstance(pii, ReversedCharacteristics) else pii


# ---------------------------------------------------------------------------
# Laplace exponents

def laplace_exponent(triplet: LevyTriplet, alpha: float) -> ExponentValue:
    """Phi(alpha) of a Levy triplet in the untruncated convention."""
    alpha = float(alpha)
    if alpha == 0.0:
        return ExponentValue.finite(0.0)
    verdict = exp_moment_condition(triplet.jumps, alpha)
    if verdict is Verdict.VIOLATED:
        return ExponentValue.diverged()
    try:
        jump_part = compensator_integral(triplet.jumps, alpha)
    except DivergentIntegral:
        return ExponentValue.diverged()
    return ExponentValue.finite(
        alpha * triplet.b0 - 0.5 * alpha * alpha * triplet.c0 - jump_part)


def h_alpha(pii: AnyPii, s: float, alpha: float) -> ExponentValue:
    """Density H_s of the exponent: Phi(t, alpha) = integral_0^t H_s ds."""
    s = float(s)
    alpha = float(alpha)
    pii = _unwrap(pii)
    if alpha == 0.0:
        return ExponentValue.finite(0.0)
    if isinstance(pii, Homogeneous):
        return laplace_exponent(pii.triplet, alpha)
    if isinstance(pii, NonHomPoisson):
        lam = float(np.asarray(pii.intensity(s)))
        return ExponentValue.finite(lam * (1.0 - math.exp(-alpha)))
    if isinstance(pii, TimeChangedLevy):
        base = laplace_exponent(pii.base, alpha)
        if base.divergent:
            return base
        return ExponentValue.finite(base.value * float(np.asarray(pii.tau_prime(s))))
    if isinstance(pii, IntegratedLevy):
        # K_s is the law of g_s * J, so H_s = Phi_base(alpha * g_s)
        return laplace_exponent(pii.base, alpha * float(np.asarray(pii.g(s))))
    if isinstance(pii, GeneralIto):
        scale = float(np.asarray(pii.jump_scale(s)))
        if isinstance(pii.jumps, NoJumps) or scale == 0.0:
            jump_part = 0.0
        else:
            if exp_moment_condition(pii.jumps, alpha) is Verdict.VIOLATED:
                return ExponentValue.diverged()
            try:
                jump_part = scale * compensator_integral(pii.jumps, alpha)
            except DivergentIntegral:
                return ExponentValue.diverged()
        b = float(np.asarray(pii.b(s)))
        c = float(np.asarray(pii.c(s)))
        return ExponentValue.finite(alpha * b - 0.5 * alpha * alpha * c - jump_part)
    raise TypeError(f"unknown process {pii!r}")


def phi_t(pii: AnyPii, t: float, alpha: float) -> ExponentValue:
    """Phi(t, alpha) with E exp(-alpha X_t) = exp(-Phi(t, alpha))."""
    t = float(t)
    alpha = float(alpha)
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0.0 or alpha == 0.0:
        return ExponentValue.finite(0.0)
    pii = _unwrap(pii)
    if isinstance(pii, Homogeneous):
        base = laplace_exponent(pii.triplet, alpha)
        if base.divergent:
            return base
        return ExponentValue.finite(t * base.value)
    if isinstance(pii, NonHomPoisson):
        mass = float(np.asarray(pii.intensity.integral(0.0, t)))
        return ExponentValue.finite(mass * (1.0 - math.exp(-alpha)))
    if isinstance(pii, TimeChangedLevy):
        base = laplace_exponent(pii.base, alpha)
        if base.divergent:
            return base
        return ExponentValue.finite(base.value * float(np.asarray(pii.tau(t))))
    if check_exp_moment(pii, t, alpha) is Verdict.VIOLATED:
        return ExponentValue.diverged()

    def integrand(s):
        return h_alpha(pii, s, alpha).expect_finite(f"H at s={s}")

    val, err = quad(integrand, 0.0, t, epsabs=1e-10, epsrel=1e-8, limit=200)
    return ExponentValue.finite(val)


def phi_grid(pii: AnyPii, times: np.ndarray, alpha: float) -> np.ndarray:
    """Phi(t_i, alpha) on a sorted grid of times, vectorized where possible."""
    times = np.asarray(times, dtype=float)
    alpha = float(alpha)
    pii_u = _unwrap(pii)
    if alpha == 0.0:
        return np.zeros_like(times)
    if isinstance(pii_u, Homogeneous):
        return laplace_exponent(pii_u.triplet, alpha).expect_finite() * times
    if isinstance(pii_u, NonHomPoisson):
        mass = np.asarray(pii_u.intensity.integral(0.0, times), dtype=float)
        return mass * (1.0 - math.exp(-alpha))
    if isinstance(pii_u, TimeChangedLevy):
        base = laplace_exponent(pii_u.base, alpha).expect_finite()
        return base * np.asarray(pii_u.tau(times), dtype=float)
    # generic: cumulative Simpson of the exponent density on a refined grid
    from scipy.integrate import cumulative_simpson
    if times.size < 2:
        return np.array([phi_t(pii_u, float(tt), alpha).expect_finite()
                         for tt in np.atleast_1d(times)])
    refine = 4
    fine = np.linspace(times[0], times[-1], refine * (times.size - 1) + 1)
    hv = np.array([h_alpha(pii_u, float(s), alpha).expect_finite() for s in fine])
    cum = cumulative_simpson(hv, x=fine, initial=0.0)
    base0 = phi_t(pii_u, float(times[0]), alpha).expect_finite() if times[0] > 0 else 0.0
    return base0 + cum[::refine]


# ---------------------------------------------------------------------------
# conditions

def check_exp_moment(pii: AnyPii, t: float, alpha: float) -> Verdict:
    """Finiteness of E exp(-alpha X_t) decided from the jump characteristics."""
    alpha = float(alpha)
    pii = _unwrap(pii)
    if alpha == 0.0:
        return Verdict.SATISFIED
    if isinstance(pii, Homogeneous):
        return exp_moment_condition(pii.triplet.jumps, alpha)
    if isinstance(pii, NonHomPoisson):
        return Verdict.SATISFIED  # unit jumps are bounded
    if isinstance(pii, TimeChangedLevy):
        return exp_moment_condition(pii.base.jumps, alpha)
    if isinstance(pii, IntegratedLevy):
        return _scan_scaled_condition(
            pii.base.jumps, lambda s: alpha * float(np.asarray(pii.g(s))), t,
            exp_moment_condition)
    if isinstance(pii, GeneralIto):
        return exp_moment_condition(pii.jumps, alpha)
    raise TypeError(f"unknown process {pii!r}")


def _scan_scaled_condition(kernel, alpha_at, t, checker, samples: int = 65) -> Verdict:
    worst = Verdict.SATISFIED
    for s in np.linspace(0.0, float(t), samples):
        v = checker(kernel, alpha_at(float(s)))
        if v is Verdict.VIOLATED:
            return Verdict.VIOLATED
        if v is Verdict.UNKNOWN:
            worst = Verdict.UNKNOWN
    return worst


def check_moment_ladder_condition(pii: AnyPii, t: float, alpha: float) -> Verdict:
    """Hypotheses of the positive (alpha >= 1) or negative (alpha < 0)
    moment recursions, decided analytically for the parametric families."""
    alpha = float(alpha)
    if not (alpha >= 1.0 or alpha < 0.0):
        raise ValueError("ladder condition applies to alpha >= 1 or alpha < 0")
    pii = _unwrap(pii)
    if isinstance(pii, Homogeneous):
        return ladder_condition(pii.triplet.jumps, alpha)
    if isinstance(pii, NonHomPoisson):
        return Verdict.SATISFIED
    if isinstance(pii, TimeChangedLevy):
        return ladder_condition(pii.base.jumps, alpha)
    if isinstance(pii, IntegratedLevy):
        # jump at time s is g_s * J: the tail condition transfers to the base
        # kernel at the scaled exponent argument
        if alpha >= 1.0:
            exponent = alpha + 1.0
        else:
            exponent = -(abs(alpha) + 1.0)
        from .jumps import exp_tail_condition

        def checker(kernel, a):
            v_neg = exp_tail_condition(kernel, a, "neg")
            v_pos = exp_tail_condition(kernel, a, "pos")
            if Verdict.VIOLATED in (v_neg, v_pos):
                return Verdict.VIOLATED
            if Verdict.UNKNOWN in (v_neg, v_pos):
                return Verdict.UNKNOWN
            return Verdict.SATISFIED

        return _scan_scaled_condition(
            pii.base.jumps, lambda s: exponent * float(np.asarray(pii.g(s))), t, checker)
    if isinstance(pii, GeneralIto):
        return ladder_condition(pii.jumps, alpha)
    raise TypeError(f"unknown process {pii!r}")


# ---------------------------------------------------------------------------
# time reversal

def reverse_characteristics(pii: AnyPii, t: float) -> ReversedCharacteristics:
    """Characteristics of the reversed process Y_s = X_t - X_{(t-s)-}.

    Every supported family is closed under the flip s -> t-s, so the result
    wraps a process of the same kind with time-flipped coefficient functions.
    Reversing twice at the same horizon reproduces the original pointwise.
    """
    t = float(t)
    if t <= 0.0:
        raise ValueError("reversal horizon must be positive")
    inner = _unwrap(pii)
    if isinstance(inner, Homogeneous):
        rev: PiiCharacteristics = inner
    elif isinstance(inner, NonHomPoisson):
        rev = NonHomPoisson(flip(inner.intensity, t))
    elif isinstance(inner, TimeChangedLevy):
        rev = GeneralIto(
            b=flip(_scaled_expr(inner.tau_prime, inner.base.b0), t),
            c=flip(_scaled_expr(inner.tau_prime, inner.base.c0), t),
            jumps=inner.base.jumps,
            jump_scale=flip(inner.tau_prime, t))
    elif isinstance(inner, IntegratedLevy):
        rev = IntegratedLevy(inner.base, flip(inner.g, t))
    elif isinstance(inner, GeneralIto):
        rev = GeneralIto(b=flip(inner.b, t), c=flip(inner.c, t), jumps=inner.jumps,
                         jump_scale=flip(inner.jump_scale, t))
    else:
        raise TypeError(f"unknown process {inner!r}")
    return ReversedCharacteristics(rev, t)


def _scaled_expr(expr: Expression, factor: float) -> Expression:
    from .expressions import Scaled
    if factor == 1.0:
        return expr
    return Scaled(expr, float(factor))


# ---------------------------------------------------------------------------
# local characteristic accessors (used by the simulator and by tests)

def drift_rate(pii: AnyPii, s: float) -> float:
    pii = _unwrap(pii)
    if isinstance(pii, Homogeneous):
        return pii.triplet.b0
    if isinstance(pii, NonHomPoisson):
        return float(np.asarray(pii.intensity(s)))
    if isinstance(pii, TimeChangedLevy):
        return pii.base.b0 * float(np.asarray(pii.tau_prime(s)))
    if isinstance(pii, IntegratedLevy):
        return pii.base.b0 * float(np.asarray(pii.g(s)))
    if isinstance(pii, GeneralIto):
        return float(np.asarray(pii.b(s)))
    raise TypeError(f"unknown process {pii!r}")


def gauss_rate(pii: AnyPii, s: float) -> float:
    pii = _unwrap(pii)
    if isinstance(pii, Homogeneous):
        return pii.triplet.c0
    if isinstance(pii, NonHomPoisson):
        return 0.0
    if isinstance(pii, TimeChangedLevy):
        return pii.base.c0 * float(np.asarray(pii.tau_prime(s)))
    if isinstance(pii, IntegratedLevy):
        return pii.base.c0 * float(np.asarray(pii.g(s))) ** 2
    if isinstance(pii, GeneralIto):
        return float(np.asarray(pii.c(s)))
    raise TypeError(f"unknown process {pii!r}")


def drift_mass(pii: AnyPii, a: float, b: float) -> float:
    """B_b - B_a = integral_a^b b_s ds, exact for grammar coefficients."""
    pii = _unwrap(pii)
    if isinstance(pii, Homogeneous):
        return pii.triplet.b0 * (b - a)
    if isinstance(pii, NonHomPoisson):
        return float(np.asarray(pii.intensity.integral(a, b)))
    if isinstance(pii, TimeChangedLevy):
        return pii.base.b0 * float(np.asarray(pii.tau(b) - pii.tau(a)))
    if isinstance(pii, IntegratedLevy):
        return pii.base.b0 * float(np.asarray(pii.g.integral(a, b)))
    if isinstance(pii, GeneralIto):
        return float(np.asarray(pii.b.integral(a, b)))
    raise TypeError(f"unknown process {pii!r}")
