"""Exact rational linear algebra: elimination, least-norm solutions and
Fourier-Motzkin feasibility for  A x = b, x > 0."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def solve_square(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan on an invertible square matrix."""
    n = len(M)
    aug = [list(row) + [r] for row, r in zip(M, rhs)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [v / p for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    return [aug[r][n] for r in range(n)]


@dataclass
class Reduced:
    pivots: list          # pivot variable index per row
    rows: list            # row coefficients (dense, pivot coefficient 1)
    rhs: list
    prov: list            # multipliers over the original equations
    inconsistent: tuple | None = None   # (multipliers, rhs) of a 0 = c row


def row_reduce(A: list[list[Fraction]], b: list[Fraction]) -> Reduced:
    m = len(A)
    n = len(A[0]) if A else 0
    rows = [list(map(Fraction, r)) for r in A]
    rhs = [Fraction(x) for x in b]
    prov = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        for lst in (rows, rhs, prov):
            lst[r], lst[piv] = lst[piv], lst[r]
        p = rows[r][c]
        rows[r] = [v / p for v in rows[r]]
        rhs[r] /= p
        prov[r] = [v / p for v in prov[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
                rhs[i] -= f * rhs[r]
                prov[i] = [x - f * y for x, y in zip(prov[i], prov[r])]
        pivots.append(c)
        r += 1
    bad = None
    for i in range(r, m):
        if rhs[i] != 0:
            bad = (prov[i], rhs[i])
            break
    return Reduced(pivots, rows[:r], rhs[:r], prov[:r], bad)


def least_change_solution(A, b, x0) -> list[Fraction] | None:
    """Solution of A x = b closest to x0 in the Euclidean norm (None if inconsistent)."""
    red = row_reduce(A, b)
    if red.inconsistent is not None:
        return None
    x0 = [Fraction(v) for v in x0]
    if not red.rows:
        return x0
    R = red.rows
    resid = [bi - sum(a * x for a, x in zip(row, x0)) for row, bi in zip(R, red.rhs)]
    gram = [[sum(a * c for a, c in zip(r1, r2)) for r2 in R] for r1 in R]
    z = solve_square(gram, resid)
    return [x0[j] + sum(z[i] * R[i][j] for i in range(len(R))) for j in range(len(x0))]


@dataclass
class Certificate:
    """Multipliers y on the equations with y^T A = weights >= 0 (not all zero)
    and y^T b = value <= 0; together with x > 0 this is contradictory."""

    multipliers: list
    weights: list
    value: Fraction

    @property
    def forced_zero(self) -> list[int]:
        if self.value != 0:
            return []
        return [j for j, w in enumerate(self.weights) if w > 0]


@dataclass
class _Ineq:
    coeffs: dict      # free variable -> coefficient; meaning sum(coeffs) < rhs
    rhs: Fraction
    y: tuple          # equation multipliers
    mu: tuple         # positivity multipliers

    def key(self):
        return tuple(sorted(self.coeffs.items())), self.rhs


def _normalize(q: _Ineq) -> _Ineq:
    scale = max((abs(v) for v in q.coeffs.values()), default=Fraction(0))
    if scale == 0:
        scale = abs(q.rhs) or Fraction(1)
    return _Ineq({k: v / scale for k, v in q.coeffs.items()}, q.rhs / scale,
                 tuple(v / scale for v in q.y), tuple(v / scale for v in q.mu))


def _combine(p: _Ineq, a: Fraction, q: _Ineq, b: Fraction) -> _Ineq:
    keys = set(p.coeffs) | set(q.coeffs)
    coeffs = {}
    for k in keys:
        v = a * p.coeffs.get(k, 0) + b * q.coeffs.get(k, 0)
        if v != 0:
            coeffs[k] = v
    return _Ineq(coeffs, a * p.rhs + b * q.rhs,
                 tuple(a * x + b * y for x, y in zip(p.y, q.y)),
                 tuple(a * x + b * y for x, y in zip(p.mu, q.mu)))


def _make_certificate(A, b, y) -> Certificate:
    n = len(A[0]) if A else 0
    weights = [sum(y[i] * A[i][j] for i in range(len(A))) for j in range(n)]
    value = sum(y[i] * b[i] for i in range(len(A)))
    # clear denominators for readability
    from math import gcd, lcm
    den = 1
    for v in list(y) + weights + [value]:
        den = lcm(den, Fraction(v).denominator)
    num = 0
    for v in list(y):
        num = gcd(num, int(v * den))
    num = num or 1
    s = Fraction(den, num)
    return Certificate([v * s for v in y], [v * s for v in weights], value * s)


@dataclass
class Feasibility:
    feasible: bool
    solution: list | None = None
    certificate: Certificate | None = None


def positive_solution(A: list[list[Fraction]], b: list[Fraction]) -> Feasibility:
    """Decide A x = b, x > 0 exactly.

    Equalities are eliminated first; the remaining strict inequalities are
    handled by Fourier-Motzkin elimination with multiplier bookkeeping, so an
    infeasible system comes with a Motzkin certificate.
    """
    m = len(A)
    n = len(A[0]) if A else 0
    red = row_reduce(A, b) if m else Reduced([], [], [], [])
    if red.inconsistent is not None:
        y, c = red.inconsistent
        return Feasibility(False, certificate=_make_certificate(A, b, [v * (-1 if c > 0 else 1) for v in y]))
    pivset = set(red.pivots)
    free = [j for j in range(n) if j not in pivset]
    zero_y = tuple(Fraction(0) for _ in range(m))
    system = []
    for j in range(n):
        mu = tuple(Fraction(int(k == j)) for k in range(n))
        if j in pivset:
            r = red.pivots.index(j)
            coeffs = {k: red.rows[r][k] for k in free if red.rows[r][k] != 0}
            system.append(_Ineq(coeffs, red.rhs[r], tuple(red.prov[r]), mu))
        else:
            system.append(_Ineq({j: Fraction(-1)}, Fraction(0), zero_y, mu))
    stages = []
    current = [_normalize(q) for q in system]
    for var in free:
        stages.append((var, current))
        pos = [q for q in current if q.coeffs.get(var, 0) > 0]
        neg = [q for q in current if q.coeffs.get(var, 0) < 0]
        nxt = [q for q in current if q.coeffs.get(var, 0) == 0]
        for p in pos:
            for q in neg:
                nxt.append(_normalize(_combine(p, -q.coeffs[var], q, p.coeffs[var])))
        seen = {}
        for q in nxt:
            seen.setdefault(q.key(), q)
        current = list(seen.values())
        for q in current:
            if not q.coeffs and q.rhs <= 0:
                return Feasibility(False, certificate=_make_certificate(A, b, list(q.y)))
    for q in current:
        if not q.coeffs and q.rhs <= 0:
            return Feasibility(False, certificate=_make_certificate(A, b, list(q.y)))
    # back substitution, innermost variable first
    values: dict[int, Fraction] = {}
    for var, cons in reversed(stages):
        lo, hi = None, None
        for q in cons:
            a = q.coeffs.get(var, 0)
            if a == 0:
                continue
            rest = q.rhs - sum(v * values[k] for k, v in q.coeffs.items() if k != var)
            bound = rest / a
            if a > 0:
                hi = bound if hi is None else min(hi, bound)
            else:
                lo = bound if lo is None else max(lo, bound)
        if lo is not None and hi is not None:
            values[var] = (lo + hi) / 2
        elif lo is not None:
            values[var] = lo + 1
        elif hi is not None:
            values[var] = hi - 1
        else:
            values[var] = Fraction(1)
    x = [Fraction(0)] * n
    for j in free:
        x[j] = values[j]
    for r, j in enumerate(red.pivots):
        x[j] = red.rhs[r] - sum(red.rows[r][k] * x[k] for k in free)
    return Feasibility(True, solution=x)
