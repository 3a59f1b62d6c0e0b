"""Exact rational helpers: parsing, affine rank, barycentric coordinates."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Point = tuple[Fraction, ...]


def parse_rational(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(str(s).strip())


def fmt_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_point(s: str | Sequence) -> Point:
    """``"1/3,2/5"`` or a sequence of numbers/strings -> tuple of Fractions."""
    if isinstance(s, str):
        parts = [p for p in s.split(",") if p.strip()]
    else:
        parts = list(s)
    return tuple(parse_rational(p) for p in parts)


def _row_reduce(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the first ``ncols`` columns."""
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    if not vectors:
        return 0
    rows = [[Fraction(x) for x in v] for v in vectors]
    return len(_row_reduce(rows, len(rows[0]))[1])


def affine_rank(points: Sequence[Point]) -> int:
    """Dimension of the affine hull (-1 for no points)."""
    if not points:
        return -1
    p0 = points[0]
    return rank([[a - b for a, b in zip(p, p0)] for p in points[1:]]) if len(points) > 1 else 0


def affinely_independent(points: Sequence[Point]) -> bool:
    return affine_rank(points) == len(points) - 1


def barycentric(vertices: Sequence[Point], p: Point) -> list[Fraction] | None:
    """Coefficients ``l`` with ``sum l_i v_i = p`` and ``sum l_i = 1``.

    ``vertices`` must be affinely independent. Returns ``None`` when ``p`` is
    off their affine hull.
    """
    k = len(vertices)
    n = len(p)
    # one row per coordinate plus the affine row; unknowns are the k coefficients
    rows = [[Fraction(vertices[j][i]) for j in range(k)] + [Fraction(p[i])] for i in range(n)]
    rows.append([Fraction(1)] * k + [Fraction(1)])
    red, pivots = _row_reduce(rows, k)
    for row in red[len(pivots):]:
        if row[k] != 0:
            return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(pivots):
        sol[c] = red[i][k]
    return sol


def in_hull(vertices: Sequence[Point], p: Point) -> bool:
    lam = barycentric(vertices, p)
    return lam is not None and all(x >= 0 for x in lam)


def in_relint(vertices: Sequence[Point], p: Point) -> bool:
    lam = barycentric(vertices, p)
    return lam is not None and all(x > 0 for x in lam)
