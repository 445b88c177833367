"""Closed forms and numerics for cycle counts, the large-cycle intensity and
line survival.

Exact quantities (expected cycle counts, cyclic-vertex expectation, line
survival) are returned as :class:`fractions.Fraction` and never touch floating
point. The intensity family is

    lambda_c(t) = exp(-c t) / (2 t)

with ``c = DEFAULT_DECAY = 2``. Integrals reduce to the exponential integral:
``int_a^t lambda_c = (E1(c a) - E1(c t)) / 2``.

``FIRST_MOMENT_DECAY = 1/2`` is the rate implied by the exact finite-n
expectation ``E[C_n(k)] ~ exp(-k ell_ne2 / (2 n2)) / (2k)``; with it
``int_0^inf t lambda_c(t) dt = 1`` matches ``E[C(n)] = n2 / (ell_ne2 + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .degree_seq import DegreeSequence
from .errors import BadInterval, NonPositiveArgument, OutOfRange

DEFAULT_DECAY = 2.0
FIRST_MOMENT_DECAY = 0.5
EULER_GAMMA = 0.57721566490153286060651209008240243

# below this argument the power series is used, above it the continued fraction
E1_CROSSOVER = 1.0


@dataclass(frozen=True)
class TheoryConfig:
    quad_abs_tol: float = 1e-10
    tail_cutoff: float = 50.0

    def __post_init__(self):
        if not self.quad_abs_tol > 0:
            raise ValueError("quad_abs_tol must be positive")
        if not self.tail_cutoff > 0:
            raise ValueError("tail_cutoff must be positive")


DEFAULT_CONFIG = TheoryConfig()


def exp1_series(x: float, max_terms: int = 500) -> float:
    """E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)."""
    if not x > 0:
        raise NonPositiveArgument(f"E1 needs x > 0, got {x}")
    terms = []
    term = 1.0
    for k in range(1, max_terms):
        term *= -x / k
        t = term / k
        terms.append(t)
        if abs(t) < 1e-18 * max(1.0, abs(terms[0])) and k > x:
            break
    return -EULER_GAMMA - math.log(x) - math.fsum(terms)


def exp1_cf(x: float, max_iter: int = 200_000, eps: float = 1e-16) -> float:
    """E1(x) from its continued fraction, evaluated with modified Lentz.

    Converges for every x > 0 but needs roughly 400/sqrt(x) iterations near zero.
    """
    if not x > 0:
        raise NonPositiveArgument(f"E1 needs x > 0, got {x}")
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_iter):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < eps:
            return h * math.exp(-x)
    raise ArithmeticError(f"E1 continued fraction did not converge at x={x}")


def exp1(x: float, method: str = "auto") -> float:
    if method == "series" or (method == "auto" and x <= E1_CROSSOVER):
        return exp1_series(x)
    if method in ("cf", "auto"):
        return exp1_cf(x)
    raise ValueError(f"unknown E1 method {method!r}")


def lambda_intensity(t: float, decay: float = DEFAULT_DECAY) -> float:
    """exp(-decay t) / (2 t)."""
    if not t > 0:
        raise NonPositiveArgument(f"t must be positive, got {t}")
    return math.exp(-decay * t) / (2.0 * t)


def _tail(x: float, decay: float, method: str) -> float:
    # int_x^inf exp(-c r)/(2r) dr
    return 0.5 * exp1(decay * x, method)


def poisson_mean(a: float, t: float, decay: float = DEFAULT_DECAY, method: str = "auto") -> float:
    """Integral of :func:`lambda_intensity` over ``[a, t]``; ``t`` may be ``inf``."""
    if not a > 0:
        raise NonPositiveArgument(f"a must be positive, got {a}")
    if t < a:
        raise BadInterval(f"need a <= t, got a={a}, t={t}")
    if t == a:
        return 0.0
    upper = 0.0 if math.isinf(t) else _tail(t, decay, method)
    return _tail(a, decay, method) - upper


def poisson_mean_quad(a: float, t: float, decay: float = DEFAULT_DECAY,
                      config: TheoryConfig = DEFAULT_CONFIG) -> float:
    """Same integral by adaptive quadrature; beyond ``tail_cutoff`` the E1 tail is added."""
    from scipy.integrate import quad

    if not a > 0:
        raise NonPositiveArgument(f"a must be positive, got {a}")
    if t < a:
        raise BadInterval(f"need a <= t, got a={a}, t={t}")
    hi = min(t, max(config.tail_cutoff, a))
    val, _ = quad(lambda_intensity, a, hi, args=(decay,), epsabs=config.quad_abs_tol,
                  epsrel=0.0, limit=500)
    if t > hi:
        val += _tail(hi, decay, "auto") - (0.0 if math.isinf(t) else _tail(t, decay, "auto"))
    return val


def cdf_Y2(a: float, decay: float = DEFAULT_DECAY, method: str = "auto") -> float:
    """exp(-int_a^inf lambda), the limit CDF of the rescaled second component."""
    if not a > 0:
        raise NonPositiveArgument(f"a must be positive, got {a}")
    return math.exp(-_tail(a, decay, method))


def cdf_Y2_or_zero(a: float, decay: float = DEFAULT_DECAY) -> float:
    """:func:`cdf_Y2` extended by 0 on ``a <= 0`` (the support is the positive axis)."""
    return cdf_Y2(a, decay) if a > 0 else 0.0


def expected_cyclic_vertices(seq: DegreeSequence) -> Fraction:
    """E[C(n)] = n2 / (ell_ne2 + 1)."""
    return Fraction(seq.n2, seq.ell_ne2 + 1)


def _falling_denominator(ell: int, k: int, start: int = 0) -> int:
    return math.prod(ell - 2 * g - 1 for g in range(start, k))


def expected_cycle_count(seq: DegreeSequence, k: int) -> Fraction:
    """E[C_n(k)] = C(n2, k) 2^(k-1) (k-1)! / prod_{g<k} (ell - 2g - 1)."""
    n2 = seq.n2
    if not 1 <= k <= n2:
        raise OutOfRange(f"need 1 <= k <= n2={n2}, got k={k}")
    num = math.comb(n2, k) * 2 ** (k - 1) * math.factorial(k - 1)
    return Fraction(num, _falling_denominator(seq.ell, k))


def expected_cycle_counts_float(seq: DegreeSequence, k_max: int | None = None) -> list[float]:
    """Floating ``E[C_n(k)]`` for ``k = 1..k_max`` via the running product
    ``prod_g 2(n2-g)/(ell-2g-1) / (2k)``; for large ``n`` where exact rationals
    are too slow."""
    n2, ell = seq.n2, seq.ell
    k_max = n2 if k_max is None else min(k_max, n2)
    out = []
    logp = 0.0
    for k in range(1, k_max + 1):
        g = k - 1
        logp += math.log(2 * (n2 - g)) - math.log(ell - 2 * g - 1)
        out.append(math.exp(logp) / (2 * k))
    return out


def expected_window_count(seq: DegreeSequence, lo: int, hi: int) -> float:
    """Exact finite-n E[number of cycle components with size in [lo, hi]]."""
    lo = max(lo, 1)
    if hi < lo:
        return 0.0
    ec = expected_cycle_counts_float(seq, hi)
    return math.fsum(ec[lo - 1:hi])


def line_survival(seq: DegreeSequence, k: int) -> Fraction:
    """prod_{t<k} 2(n2 - t) / (ell - 2t - 1).

    Probability that an exploration started at a degree-1 vertex pairs into a
    neutral degree-2 half-edge at each of its first ``k`` steps, i.e. that the
    line through the start contains at least ``k + 1`` vertices.
    """
    if seq.n1 == 0:
        raise OutOfRange("line survival needs a vertex of degree 1")
    n2 = seq.n2
    if not 0 <= k <= n2:
        raise OutOfRange(f"need 0 <= k <= n2={n2}, got k={k}")
    num = math.prod(2 * (n2 - t) for t in range(k))
    return Fraction(num, _falling_denominator(seq.ell, k))


def lower_regime_prediction(n: int, n1: int) -> float:
    """2 n ln(n1) / n1, the common size of the largest line components."""
    if n1 < 2:
        raise OutOfRange(f"need n1 >= 2, got {n1}")
    return 2.0 * n * math.log(n1) / n1


def cdf_table(points, decay: float = DEFAULT_DECAY) -> list[tuple[float, float]]:
    return [(float(a), cdf_Y2(float(a), decay)) for a in points]
