"""Gauss hypergeometric function 2F1(1, b; 1+b; x) for x <= 0, 0 < b <= 1.

This is the one special function the ring-interference model needs: for a
path-loss exponent eta > 2 the capture integral reduces to 2F1 with
b = 2/eta. Restricting to that family keeps the correctness surface small
enough to prove against an independent quadrature oracle.

Evaluation uses three regions:

  -0.9 < x <= 0   Maclaurin series. With a = 1 and c = 1 + b the terms
                  collapse to b/(b+n) x^n, geometric in |x|.
  -8 <= x <= -0.9 Pfaff transformation 2F1(a,b;c;x) =
                  (1-x)^(-b) 2F1(c-a,b;c;w), w = x/(x-1), which maps the
                  argument into [0.47, 8/9] where the series converges.
  x < -8          Inverse-argument connection formula
                  2F1(1,b;1+b;x) = pi b / sin(pi b) (-x)^(-b)
                    - b sum_n (-1)^n (-x)^(-n-1) / (n + 1 - b),
                  geometric in 1/|x|. Degenerates logarithmically at b = 1,
                  where the family has the closed form log(1 - x) / (-x).

The Pfaff series converges too slowly near w -> 1 to reach 1e-10 for
|x| >> 1 with b near 1, hence the third branch. Both series stop when a
term falls below 1e-16 of the partial sum, capped at 10000 terms.
"""

from __future__ import annotations

import math

from scipy.integrate import quad

_TERM_EPS = 1e-16
_MAX_TERMS = 10_000
# b in (1 - 1e-6, 1) would lose more than ~1e-10 to cancellation in the
# inverse-argument branch; the model never needs it (eta would be < 2.000002).
_B_GAP = 1e-6


class UnsupportedDomainError(ValueError):
    """Parameters outside the supported 2F1(1, b; 1+b; x<=0) family."""


class QuadratureError(RuntimeError):
    """Oracle quadrature did not reach the requested tolerance."""


def _check_family(a: float, b: float, c: float, x: float) -> None:
    if a != 1.0:
        raise UnsupportedDomainError(f"a must be 1 (got {a})")
    if not 0.0 < b <= 1.0:
        raise UnsupportedDomainError(f"b must lie in (0, 1] (got {b})")
    if 1.0 - _B_GAP < b < 1.0:
        raise UnsupportedDomainError(
            f"b = {b} is too close to 1 for accurate evaluation; "
            "use b = 1 exactly for the logarithmic case"
        )
    if not math.isclose(c, 1.0 + b, rel_tol=1e-12, abs_tol=1e-12):
        raise UnsupportedDomainError(f"c must equal 1 + b (got c={c}, b={b})")
    if math.isnan(x) or x > 0.0:
        raise UnsupportedDomainError(f"x must satisfy x <= 0 (got {x})")


def _maclaurin(b: float, x: float) -> float:
    # sum_n b/(b+n) x^n; term ratio x (b+n-1)/(b+n)
    total = 1.0
    term = 1.0
    for n in range(1, _MAX_TERMS):
        term *= x * (b + n - 1) / (b + n)
        total += term
        if abs(term) < _TERM_EPS * abs(total):
            return total
    raise RuntimeError("Maclaurin series did not converge in 10000 terms")


def _pfaff(b: float, x: float) -> float:
    # (1-x)^(-b) * 2F1(b, b; 1+b; w), terms (b)_n (b)_n / ((1+b)_n n!) w^n
    w = x / (x - 1.0)
    total = 1.0
    term = 1.0
    for n in range(1, _MAX_TERMS):
        term *= w * (b + n - 1) * (b + n - 1) / ((b + n) * n)
        total += term
        if abs(term) < _TERM_EPS * abs(total):
            return (1.0 - x) ** (-b) * total
    raise RuntimeError("Pfaff series did not converge in 10000 terms")


def _inverse_argument(b: float, x: float) -> float:
    s = -x
    if b == 1.0:
        return math.log1p(s) / s
    head = math.pi * b / math.sin(math.pi * b) * s ** (-b)
    tail = 0.0
    sign = 1.0
    power = 1.0 / s
    for n in range(_MAX_TERMS):
        term = sign * power / (n + 1.0 - b)
        tail += term
        if abs(term) < _TERM_EPS * max(abs(tail), 1e-300):
            break
        sign = -sign
        power /= s
    return head - b * tail


def hyp2f1(a: float, b: float, c: float, x: float) -> float:
    """2F1(a, b; c; x) on the supported family (a=1, c=1+b, x<=0)."""
    _check_family(a, b, c, x)
    if x == 0.0:
        return 1.0
    if x > -0.9:
        return _maclaurin(b, x)
    if x >= -8.0:
        return _pfaff(b, x)
    return _inverse_argument(b, x)


def hyp2f1_oracle(a: float, b: float, c: float, x: float,
                  abs_tol: float = 1e-12) -> float:
    """Slow independent check: adaptive quadrature of the Euler integral.

    2F1(1,b;1+b;x) = b * int_0^1 t^(b-1) (1 - x t)^(-1) dt. Substituting
    t = e^(-u) removes the endpoint singularity and gives

        b * int_0^inf e^(-b u) / (1 + s e^(-u)) du,   s = -x,

    whose single knee sits near u = log(1 + s) with O(1) width; splitting
    there lets the quadrature deliver relative as well as absolute accuracy
    even where the function value is tiny.
    """
    _check_family(a, b, c, x)
    if x == 0.0:
        return 1.0
    s = -x

    def integrand(u: float) -> float:
        return b * math.exp(-b * u) / (1.0 + s * math.exp(-u))

    split = math.log1p(s)
    head, err_head = quad(integrand, 0.0, split, epsabs=abs_tol / 2, epsrel=1e-13,
                          limit=300)
    tail, err_tail = quad(integrand, split, math.inf, epsabs=abs_tol / 2,
                          epsrel=1e-13, limit=300)
    value = head + tail
    err = err_head + err_tail
    if err > 10.0 * abs_tol:
        raise QuadratureError(
            f"quadrature reached absolute tolerance {err:.3e}, requested {abs_tol:.3e}"
        )
    return value
