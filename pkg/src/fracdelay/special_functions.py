"""Gamma and Mittag-Leffler evaluation, scalar and matrix, on the real line.

The two-parameter Mittag-Leffler function

    E_{a,b}(z) = sum_{l>=0} z**l / Gamma(a*l + b)

generalises the exponential (E_{1,1} = exp) and builds every solution
operator of the fractional solvers.  The power series is entire but
numerically treacherous for large negative arguments: terms grow to
exp-scale before cancelling down to an algebraically small value.  The
scalar evaluator therefore predicts the cancellation and switches to the
algebraic large-argument expansion when more than half of the working
digits would be lost; the matrix evaluator sums in extended precision and
reports its own loss estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "MLParams",
    "SeriesControl",
    "GammaPoleError",
    "MLConvergenceError",
    "MLRegimeError",
    "gamma",
    "recip_gamma",
    "ml_scalar",
    "ml_matrix",
    "ml_asymptotic",
    "ml_norm_bound",
]


class GammaPoleError(ValueError):
    """gamma() evaluated at a nonpositive integer."""


class MLRegimeError(ValueError):
    """Asymptotic expansion requested outside its validity regime."""


class MLConvergenceError(RuntimeError):
    """Series stopped before reaching tolerance.

    Carries the partial value and the achieved relative-error estimate.
    """

    def __init__(self, message, partial, error_estimate):
        super().__init__(message)
        self.partial = partial
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class MLParams:
    """Order pair (alpha, beta) of E_{alpha,beta}; both must be positive."""

    alpha: float
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0.0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.beta > 0.0):
            raise ValueError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class SeriesControl:
    """Evaluation knobs: target relative error, term cap, asymptotic order."""

    rel_tol: float = 1e-12
    max_terms: int = 2000
    asym_N: int = 8

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise ValueError("rel_tol must lie in (0, 1)")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if self.asym_N < 1:
            raise ValueError("asym_N must be >= 1")


DEFAULT_CONTROL = SeriesControl()

# Lanczos approximation, g = 7, 9 coefficients: ~15 significant digits in
# double precision over the positive axis, extended below 0.5 by reflection.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_LOG_DBL_MAX = math.log(np.finfo(float).max)


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _sinpi(x: float) -> float:
    # sin(pi*x) with argument reduction, exact zeros at integers
    r = x - math.floor(x)
    if r == 0.0:
        return 0.0
    s = math.sin(math.pi * r)
    return s if (math.floor(x) % 2 == 0) else -s


def _lanczos_gamma(x: float) -> float:
    # valid for x >= 0.5
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    if x < 100.0:
        return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc
    # large arguments: the intermediate power overflows, go through logs
    log_val = 0.5 * math.log(2.0 * math.pi) + (x + 0.5) * math.log(t) - t + math.log(acc)
    return math.exp(log_val)


def gamma(x: float) -> float:
    """Gamma function on the reals; raises at poles and on overflow."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise GammaPoleError(f"gamma pole at nonpositive integer x = {x}")
    if x >= 0.5:
        if x > 171.7:
            raise OverflowError(f"gamma({x}) exceeds double-precision range")
        return _lanczos_gamma(x)
    # reflection: gamma(x) = pi / (sin(pi x) * gamma(1 - x))
    if 1.0 - x > 171.7:
        # |gamma| underflows to an exact denormal region; return signed 0-ish
        # via log form to keep 1/gamma consistent.
        log_abs = (
            math.log(math.pi)
            - math.log(abs(_sinpi(x)))
            - math.lgamma(1.0 - x)
        )
        sign = 1.0 if _sinpi(x) > 0 else -1.0
        return sign * math.exp(log_abs)
    return math.pi / (_sinpi(x) * _lanczos_gamma(1.0 - x))


def recip_gamma(x: float) -> float:
    """1/Gamma(x); exactly zero at nonpositive integers (entire function)."""
    x = float(x)
    if _is_nonpositive_integer(x):
        return 0.0
    if x >= 0.5:
        if x > 171.7:
            return 0.0  # 1/gamma underflows: huge gamma
        return 1.0 / _lanczos_gamma(x)
    # 1/gamma(x) = sin(pi x) * gamma(1 - x) / pi
    y = 1.0 - x
    if y > 171.7:
        log_mag = math.lgamma(y) + math.log(abs(_sinpi(x))) - math.log(math.pi)
        if log_mag > _LOG_DBL_MAX:
            raise OverflowError(f"recip_gamma({x}) exceeds double-precision range")
        sign = 1.0 if _sinpi(x) > 0 else -1.0
        return sign * math.exp(log_mag)
    return _sinpi(x) * _lanczos_gamma(y) / math.pi


# --- scalar Mittag-Leffler ---------------------------------------------------

_LD = np.longdouble
_LD_EPS = float(np.finfo(np.longdouble).eps)

# Stirling tail coefficients B_2k / (2k (2k-1)); with the x >= 22 cutoff the
# first neglected term is below long-double resolution
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    7.0 / 1092.0,
    -3617.0 / 122400.0,
)


def _stirling_tail(x):
    # sum B_2k / (2k (2k-1) x^(2k-1)), valid for x >= 22
    inv2 = 1.0 / (x * x)
    acc = _LD(0.0)
    p = 1.0 / x
    for c in _STIRLING:
        acc += _LD(c) * p
        p = p * inv2
    return acc


def _lgamma_diff(x: float, a: float):
    """lgamma(x + a) - lgamma(x) for x > 0, a > 0, in long-double accuracy.

    The naive difference of two large lgamma values loses the digits the
    series recurrence needs; this form keeps every intermediate O(a ln x).
    """
    x = _LD(x)
    a = _LD(a)
    shift = _LD(0.0)
    while x < 22.0:
        # lgamma(x+a) - lgamma(x) = [lgamma(x+1+a) - lgamma(x+1)] + log(x/(x+a))
        shift -= np.log1p(a / x)
        x += 1.0
    # Stirling difference, rearranged to avoid cancellation
    main = (x - 0.5) * np.log1p(a / x) + a * np.log(x + a) - a
    return main + _stirling_tail(x + a) - _stirling_tail(x) + shift


# digits of the long-double accumulator considered trustworthy
_WORK_DIGITS = -math.log10(_LD_EPS)
# cancellation budget beyond which the power series cannot reach ~1e-9
_SERIES_LOSS_LIMIT = 7.0


def _series_peak_log10(alpha: float, beta: float, abs_z: float) -> float:
    """log10 of the largest series term, the cancellation-loss predictor."""
    if abs_z <= 0.0:
        return 0.0
    # stationary point of l*ln|z| - lgamma(alpha*l + beta)
    lstar = max(abs_z ** (1.0 / alpha) / alpha, 1.0)
    best = 0.0
    for l in {1.0, lstar / 2.0, lstar, 2.0 * lstar}:
        val = l * math.log(abs_z) - math.lgamma(alpha * l + beta)
        best = max(best, val)
    return best / math.log(10.0)


def _series_scalar(alpha: float, beta: float, z: float, ctl: SeriesControl):
    """Long-double compensated power series; returns (value, rel_error_est)."""
    term = _LD(recip_gamma(beta))
    total = term
    comp = _LD(0.0)
    max_abs = abs(float(term))
    zl = _LD(z)
    prev_abs = abs(float(term))
    decreasing = 0
    for l in range(ctl.max_terms):
        term = term * zl * np.exp(-_lgamma_diff(alpha * l + beta, alpha))
        if not np.isfinite(term):
            raise OverflowError(
                f"series for E_({alpha},{beta})({z}) overflowed at term {l + 1}"
            )
        # Kahan step
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        a = abs(float(term))
        max_abs = max(max_abs, a)
        decreasing = decreasing + 1 if a < prev_abs else 0
        prev_abs = a
        scale = max(abs(float(total)), 1e-300)
        if a <= ctl.rel_tol * scale and decreasing >= 2:
            # per-term ratio roundoff accumulates roughly linearly in l
            err = max(a / scale, 3.0 * max_abs * (10 + l) * _LD_EPS / scale)
            return float(total), err
    scale = max(abs(float(total)), 1e-300)
    err = max(prev_abs / scale, 3.0 * max_abs * (10 + ctl.max_terms) * _LD_EPS / scale)
    raise MLConvergenceError(
        f"series for E_({alpha},{beta})({z}) hit max_terms={ctl.max_terms}",
        partial=float(total),
        error_estimate=err,
    )


def _asymptotic_negative(alpha: float, beta: float, z: float, n_terms: int):
    """Algebraic tail -sum_j z^-j / Gamma(beta - alpha j); (value, abs next term)."""
    total = 0.0
    zinv = 1.0 / z
    power = 1.0
    for j in range(1, n_terms + 1):
        power *= zinv
        total -= power * recip_gamma(beta - alpha * j)
    next_term = abs(power * zinv * recip_gamma(beta - alpha * (n_terms + 1)))
    return total, next_term


def _asymptotic_auto(alpha: float, beta: float, z: float, ctl: SeriesControl):
    """Negative-z expansion truncated at its term-envelope minimum.

    The coefficients 1/Gamma(beta - alpha j) sweep past gamma poles, so
    individual terms can be accidentally tiny; truncation and error
    estimation therefore use the running maximum over one pole spacing
    (~1/alpha terms), not single-term magnitudes.  Returns
    (value, relative error estimate).
    """
    window = int(math.ceil(1.0 / alpha)) + 2
    j_max = min(4 * ctl.max_terms, 2000)
    mags = []
    partials = []
    zinv = 1.0 / z
    power = 1.0
    total = 0.0
    env_min = math.inf
    for j in range(1, j_max + 1):
        power *= zinv
        term = -power * recip_gamma(beta - alpha * j)
        total += term
        mags.append(abs(term))
        partials.append(total)
        if len(mags) >= window:
            env = max(mags[-window:])
            env_min = min(env_min, env)
            if env > 1e3 * env_min and env_min < math.inf:
                break  # clearly divergent tail
            if env <= ctl.rel_tol * max(abs(total), 1e-300):
                break
    if not mags or max(mags) == 0.0:
        return total, 0.0  # every coefficient sat on a pole: expansion is 0
    # truncate where the envelope of the *neglected* terms is smallest
    best_j = len(mags) - 1
    best_env = math.inf
    for j in range(len(mags)):
        ahead = mags[j + 1 : j + 1 + window]
        env = max(ahead) if ahead else mags[-1]
        if env < best_env:
            best_env = env
            best_j = j
    value = partials[best_j]
    err = best_env / max(abs(value), 1e-300)
    return value, err


_CLOSED_FORMS = {}


def _closed_form(alpha: float, beta: float, z: float):
    """Exact elementary identities, used where the series is hopeless."""
    if alpha == 1.0 and beta == 1.0:
        return math.exp(z)
    if alpha == 1.0 and beta == 2.0:
        return math.expm1(z) / z if z != 0.0 else 1.0
    if alpha == 2.0 and beta == 1.0:
        if z >= 0.0:
            return math.cosh(math.sqrt(z))
        return math.cos(math.sqrt(-z))
    if alpha == 2.0 and beta == 2.0:
        if z == 0.0:
            return 1.0
        if z > 0.0:
            r = math.sqrt(z)
            return math.sinh(r) / r
        r = math.sqrt(-z)
        return math.sin(r) / r
    return None


def ml_scalar(p: MLParams, z: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """E_{alpha,beta}(z) for real z to roughly ctl.rel_tol relative error."""
    z = float(z)
    if z == 0.0:
        return recip_gamma(p.beta)
    cf = _closed_form(p.alpha, p.beta, z)
    if cf is not None:
        return cf
    if z > 0.0:
        value, _ = _series_scalar(p.alpha, p.beta, z, ctl)
        return value
    # z < 0: terms cancel; sum the series only while it can stay accurate,
    # weigh its achieved estimate against the algebraic expansion and keep
    # the better representation.
    digits_lost = _series_peak_log10(p.alpha, p.beta, abs(z))
    value, err = None, math.inf
    if digits_lost <= _SERIES_LOSS_LIMIT:
        try:
            value, err = _series_scalar(p.alpha, p.beta, z, ctl)
        except MLConvergenceError as exc:
            value, err = exc.partial, exc.error_estimate
        if err <= ctl.rel_tol:
            return value
    aval, aerr = _asymptotic_auto(p.alpha, p.beta, z, ctl)
    if aerr < err:
        value, err = aval, aerr
    # ~1e-7 is the realistic floor where the two representations cross over
    if err > max(ctl.rel_tol, 1e-7):
        raise MLConvergenceError(
            f"E_({p.alpha},{p.beta})({z}): no representation reaches "
            f"rel_tol={ctl.rel_tol}; best estimate {err:.2e}",
            partial=value,
            error_estimate=err,
        )
    return value


def ml_asymptotic(p: MLParams, z: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Large-|z| expansion of E_{alpha,beta}, truncated at order ctl.asym_N.

    For z < 0 only the algebraic tail survives; for z > 0 the exponential
    head is added.  Requires 0 < alpha < 2 and terms decreasing through the
    retained range (checked, else the regime is rejected).
    """
    if not (0.0 < p.alpha < 2.0):
        raise MLRegimeError(f"asymptotic expansion requires 0 < alpha < 2, got {p.alpha}")
    z = float(z)
    if z == 0.0:
        raise MLRegimeError("asymptotic expansion undefined at z = 0")
    n = ctl.asym_N
    # validity: retained nonzero terms must not grow
    prev = math.inf
    zinv_pow = 1.0
    for j in range(1, n + 1):
        zinv_pow /= abs(z)
        mag = zinv_pow * abs(recip_gamma(p.beta - p.alpha * j))
        if mag > 0.0:
            if mag > prev:
                raise MLRegimeError(
                    f"|z| = {abs(z)} too small: expansion terms grow by order {j}"
                )
            prev = mag
    tail, _ = _asymptotic_negative(p.alpha, p.beta, z, n)
    if z < 0.0:
        return tail
    head = (1.0 / p.alpha) * z ** ((1.0 - p.beta) / p.alpha) * math.exp(z ** (1.0 / p.alpha))
    return head + tail


# --- matrix Mittag-Leffler ---------------------------------------------------


def ml_matrix_grid(
    p: MLParams,
    A: np.ndarray,
    scales: np.ndarray,
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> np.ndarray:
    """E_{alpha,beta}(A * c) for every scale c in ``scales`` (all c >= 0).

    One power-series sweep shared across scales: matrix powers are computed
    once against the largest scale, then replayed per node through scalar
    ratio coefficients.  Summation runs in extended precision; stops when
    the term norm at the largest scale falls below tolerance.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be a square matrix")
    scales = np.asarray(scales, dtype=float)
    if np.any(scales < 0.0):
        raise ValueError("scales must be nonnegative")
    n = A.shape[0]
    n_nodes = scales.shape[0]
    cmax = float(scales.max()) if n_nodes else 0.0

    if cmax == 0.0:
        out = np.zeros((n_nodes, n, n))
        out[:] = recip_gamma(p.beta) * np.eye(n)
        return out

    if p.alpha == 1.0 and p.beta == 1.0:
        # exact route: scaling-and-squaring exponential per node
        out = np.empty((n_nodes, n, n))
        for i, c in enumerate(scales):
            out[i] = scipy.linalg.expm(A * c)
        return out

    ld = np.longdouble
    r = (scales / cmax).astype(ld)  # in [0, 1]
    Ascaled = (A * cmax).astype(ld)
    # P_l = (A cmax)^l / Gamma(alpha l + beta), accumulated per node as P_l r^l
    P = np.eye(n, dtype=ld) * ld(recip_gamma(p.beta))
    acc = np.tensordot(np.ones_like(r), P, axes=0)  # (n_nodes, n, n)
    rpow = np.ones_like(r)
    ref_norm = float(np.abs(P).max())
    small_streak = 0
    for l in range(ctl.max_terms):
        ratio = np.exp(-_lgamma_diff(p.alpha * l + p.beta, p.alpha))
        P = (P @ Ascaled) * ratio
        rpow = rpow * r
        acc += rpow[:, None, None] * P
        term_norm = float(np.abs(P).max())
        if not math.isfinite(term_norm):
            raise OverflowError(
                f"matrix Mittag-Leffler series overflowed at term {l + 1}"
            )
        ref_norm = max(ref_norm, term_norm)
        scale = max(float(np.abs(acc[int(np.argmax(scales))]).max()), 1e-300)
        if term_norm <= ctl.rel_tol * scale:
            small_streak += 1
            if small_streak >= 3:
                return acc.astype(float)
        else:
            small_streak = 0
    raise MLConvergenceError(
        f"matrix series for E_({p.alpha},{p.beta}) hit max_terms={ctl.max_terms}",
        partial=acc.astype(float),
        error_estimate=term_norm / scale,
    )


def ml_matrix(p: MLParams, A: np.ndarray, ctl: SeriesControl = DEFAULT_CONTROL) -> np.ndarray:
    """E_{alpha,beta}(A) summed directly in the matrix algebra.

    Works for defective matrices; eigendecompositions are left to test
    oracles.
    """
    return ml_matrix_grid(p, A, np.array([1.0]), ctl)[0]


def ml_norm_bound(
    p: MLParams, norm_A: float, t: float, ctl: SeriesControl = DEFAULT_CONTROL
) -> float:
    """Scalar bound E_{alpha,beta}(|A| t^alpha) >= ||E_{alpha,beta}(A t^alpha)||.

    Valid for any induced norm with norm_A = ||A||; follows by bounding the
    series term by term.
    """
    if norm_A < 0.0:
        raise ValueError("norm_A must be nonnegative")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    return ml_scalar(p, norm_A * t**p.alpha, ctl)
