"""Closed-form quantities and certified inequality checks.

Every check whose two sides are rational is decided in exact integer or
rational arithmetic; the entropy-vs-binomial comparisons are certified by
clearing denominators (for x = p/q with q | n both sides become integers), so
no floating-point rounding can flip a verdict.  Asymptotic statements are
reported as numeric trends, never asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


def s(n: int) -> int:
    """floor(n/3) * floor((n+1)/3) * floor((n+2)/3): the maximum edge count of
    a tripartite triple system on n vertices."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return (n // 3) * ((n + 1) // 3) * ((n + 2) // 3)


def balanced_split(n: int) -> tuple[int, int, int]:
    """The near-equal part sizes (floor((n+2)/3), floor((n+1)/3), floor(n/3))."""
    return ((n + 2) // 3, (n + 1) // 3, n // 3)


def entropy(x: float) -> float:
    """Binary entropy -x*log2(x) - (1-x)*log2(1-x), continuously extended to 0
    at the endpoints."""
    if not 0 <= x <= 1:
        raise ValueError(f"entropy argument must be in [0,1], got {x}")
    if x in (0, 1):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def multinomial(n: int, a: int, b: int, c: int) -> int:
    """n! / (a! b! c!) for a + b + c = n."""
    if min(a, b, c) < 0 or a + b + c != n:
        raise ValueError(f"need nonnegative a+b+c = n, got {a}+{b}+{c} != {n}")
    return math.comb(n, a) * math.comb(n - a, b)


def chernoff_bound(m: int, p: float, a: float) -> float:
    """Lower-tail bound exp(-a^2 / (2pm)) for Binomial(m, p)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0 < p <= 1:
        raise ValueError("p must be in (0, 1]")
    if a <= 0:
        raise ValueError("a must be positive")
    return math.exp(-a * a / (2 * p * m))


@dataclass(frozen=True)
class BoundCheck:
    """One evaluated inequality: name, parameters, both sides, verdict.

    `asserted` marks checks that are expected to hold everywhere tested;
    the rest are observational.
    """

    name: str
    params: dict = field(compare=False)
    lhs: object
    rhs: object
    holds: bool
    asserted: bool = True
    note: str = ""


def check_t_bounds(n: int, t_exact: int) -> BoundCheck:
    """T(n) < 3^n * 2^s(n), with the balanced-partition ratio reported as the
    lower-bound trend."""
    rhs = 3**n * 2 ** s(n)
    a, b, c = balanced_split(n)
    denom = multinomial(n, a, b, c) * 2 ** s(n)
    ratio = float(Fraction(t_exact, denom)) if denom else float("nan")
    return BoundCheck(
        name="T(n) < 3^n 2^s(n)",
        params={"n": n, "T": t_exact},
        lhs=t_exact,
        rhs=rhs,
        holds=t_exact < rhs,
        note=f"T/(multinomial*2^s) = {ratio:.6f}",
    )


def check_s_gap(n_max: int) -> list[BoundCheck]:
    """s(n) - s(n-2) >= 2n^2/9 - n for 3 <= n <= n_max, exact arithmetic."""
    if n_max < 3:
        raise ValueError("n_max must be >= 3")
    out = []
    for n in range(3, n_max + 1):
        lhs = s(n) - s(n - 2)
        rhs = Fraction(2 * n * n, 9) - n
        out.append(
            BoundCheck(
                name="s(n)-s(n-2) >= 2n^2/9 - n",
                params={"n": n},
                lhs=lhs,
                rhs=rhs,
                holds=Fraction(lhs) >= rhs,
            )
        )
    return out


def _entropy_pow2_rhs(n: int, x: Fraction) -> Fraction:
    """Exact value of 2^(H(x) n) as a rational, valid when x*n is integral:
    write x = p/q in lowest terms (then q | n) and clear denominators."""
    p, q = x.numerator, x.denominator
    if n % q:
        raise ValueError("x*n must be integral")
    k = n // q
    return Fraction(q ** (q * k), p ** (p * k) * (q - p) ** ((q - p) * k))


#: Partial binomial sums are only asserted below this density.
PARTIAL_SUM_SMALLNESS = Fraction(1, 10)


def check_entropy_binomial(n: int, x: Fraction) -> list[BoundCheck]:
    """Certified checks of C(n, xn) < 2^(H(x)n) and of the partial-sum variant
    sum_{i<=xn} C(n,i) < 2^(H(x)n).

    Requires 0 < x < 1/2 with x*n integral.  The single-binomial inequality is
    asserted; the partial-sum one is asserted only for x below
    PARTIAL_SUM_SMALLNESS and reported otherwise.
    """
    x = Fraction(x)
    if not Fraction(0) < x < Fraction(1, 2):
        raise ValueError(f"x must satisfy 0 < x < 1/2, got {x}")
    if (x * n).denominator != 1:
        raise ValueError(f"x*n must be integral, got {x}*{n}")
    k = int(x * n)
    rhs = _entropy_pow2_rhs(n, x)
    single = math.comb(n, k)
    partial = sum(math.comb(n, i) for i in range(k + 1))
    rhs_float = float(2 ** (entropy(float(x)) * n))
    return [
        BoundCheck(
            name="C(n,xn) < 2^(H(x)n)",
            params={"n": n, "x": str(x)},
            lhs=single,
            rhs=rhs_float,
            holds=Fraction(single) < rhs,
        ),
        BoundCheck(
            name="sum_{i<=xn} C(n,i) < 2^(H(x)n)",
            params={"n": n, "x": str(x)},
            lhs=partial,
            rhs=rhs_float,
            holds=Fraction(partial) < rhs,
            asserted=x <= PARTIAL_SUM_SMALLNESS,
            note="asserted only for small x",
        ),
    ]


def partial_sum_threshold(n: int) -> Fraction | None:
    """Largest x = k/n < 1/2 for which the partial-sum inequality holds at
    this n (the empirical smallness threshold); None if it holds nowhere."""
    best = None
    for k in range(1, (n - 1) // 2 + 1):
        x = Fraction(k, n)
        rhs = _entropy_pow2_rhs(n, x)
        if Fraction(sum(math.comb(n, i) for i in range(k + 1))) < rhs:
            best = x
    return best


def check_multinomial_sum(n: int) -> BoundCheck:
    """Exact identity: sum over a+b+c=n of multinomial(n;a,b,c) equals 3^n."""
    total = sum(
        multinomial(n, a, b, n - a - b)
        for a in range(n + 1)
        for b in range(n - a + 1)
    )
    return BoundCheck(
        name="sum multinomial = 3^n",
        params={"n": n},
        lhs=total,
        rhs=3**n,
        holds=total == 3**n,
    )


def check_balanced_maximizes(n: int) -> BoundCheck:
    """The balanced split maximizes the multinomial coefficient (exhaustive)."""
    a, b, c = balanced_split(n)
    best = multinomial(n, a, b, c)
    ok = all(
        multinomial(n, i, j, n - i - j) <= best
        for i in range(n + 1)
        for j in range(n - i + 1)
    )
    return BoundCheck(
        name="multinomial maximal at balanced split",
        params={"n": n},
        lhs=best,
        rhs=best,
        holds=ok,
    )


def balanced_floor_threshold(n_max: int) -> int | None:
    """Smallest n in 1..n_max from which 3^n <= 0.6 n^2 * multinomial(balanced)
    holds for every larger n up to n_max (exact rational comparison)."""
    holds_from = None
    for n in range(1, n_max + 1):
        a, b, c = balanced_split(n)
        ok = Fraction(3**n) <= Fraction(3, 5) * n * n * multinomial(n, a, b, c)
        if ok and holds_from is None:
            holds_from = n
        if not ok:
            holds_from = None
    return holds_from
