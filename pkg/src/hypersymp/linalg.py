"""Exact rational vectors and matrices.

Vectors are tuples of :class:`fractions.Fraction`; matrices are tuples of
row tuples.  Products skip zero entries, since every operator in this
package is very sparse.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError

ZERO = Fraction(0)
ONE = Fraction(1)

Vector = tuple  # tuple[Fraction, ...]
Matrix = tuple  # tuple[tuple[Fraction, ...], ...]


def parse_rational(value) -> Fraction:
    """Parse an exact rational from an int, a Fraction or a ``"p/q"`` string.

    Floats are rejected: they would silently lose exactness.
    """
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE"):
            raise InputError(f"not an exact rational: {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not an exact rational: {value!r}") from exc
    raise InputError(f"not an exact rational: {value!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def vector(values: Iterable) -> Vector:
    return tuple(parse_rational(v) for v in values)


def parse_vector(text: str) -> Vector:
    """Parse ``"1,-1/2,0"`` into a vector."""
    parts = [p for p in text.replace(" ", "").split(",") if p != ""]
    return vector(parts)


def zero_vector(n: int) -> Vector:
    return (ZERO,) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(ONE if k == i else ZERO for k in range(n))


def vec_add(u: Sequence, v: Sequence) -> Vector:
    return tuple((a + b if a else b) if b else a for a, b in zip(u, v))


def vec_sub(u: Sequence, v: Sequence) -> Vector:
    return tuple((a - b if a else -b) if b else a for a, b in zip(u, v))


def vec_scale(s, u: Sequence) -> Vector:
    if not s:
        return (ZERO,) * len(u)
    if s == 1:
        return tuple(u)
    return tuple(s * a if a else ZERO for a in u)


def vec_neg(u: Sequence) -> Vector:
    return tuple(-a if a else ZERO for a in u)


def is_zero(v: Sequence) -> bool:
    return not any(v)


def dot(u: Sequence, v: Sequence) -> Fraction:
    total = ZERO
    for a, b in zip(u, v):
        if a and b:
            total += a * b
    return total


def matrix(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(vector(r) for r in rows)
    if out and len({len(r) for r in out}) != 1:
        raise InputError("ragged matrix")
    return out


def zeros(n: int, m: int | None = None) -> Matrix:
    row = (ZERO,) * (n if m is None else m)
    return (row,) * n


def identity(n: int) -> Matrix:
    return tuple(unit_vector(n, i) for i in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple((vec_add(r, s) if any(r) else tuple(s)) if any(s) else tuple(r) for r, s in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(vec_sub(r, s) if any(s) else tuple(r) for r, s in zip(a, b))


def mat_scale(s, a: Matrix) -> Matrix:
    return tuple(vec_scale(s, r) if any(r) else tuple(r) for r in a)


def mat_neg(a: Matrix) -> Matrix:
    return tuple(vec_neg(r) for r in a)


def mat_is_zero(a: Matrix) -> bool:
    return not any(any(r) for r in a)


def mat_vec(a: Matrix, v: Sequence) -> Vector:
    nz = [(j, x) for j, x in enumerate(v) if x]
    out = []
    for row in a:
        total = ZERO
        for j, x in nz:
            r = row[j]
            if r:
                total += r * x
        out.append(total)
    return tuple(out)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return ()
    ncols = len(b[0]) if b else 0
    b_nz = [[(j, x) for j, x in enumerate(row) if x] for row in b]
    out = []
    for row in a:
        acc = [ZERO] * ncols
        for k, x in enumerate(row):
            if x:
                for j, y in b_nz[k]:
                    acc[j] += x * y
        out.append(tuple(acc))
    return tuple(out)


def block(blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a block matrix from a grid of equally sized row blocks."""
    rows = []
    for block_row in blocks:
        for parts in zip(*block_row):
            rows.append(tuple(x for part in parts for x in part))
    return tuple(rows)


def sub_block(a: Matrix, rows: range, cols: range) -> Matrix:
    return tuple(tuple(a[i][j] for j in cols) for i in rows)


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    work = [list(r) for r in rows]
    if ncols is None:
        ncols = len(work[0]) if work else 0
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(work)) if work[i][col]), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        p = work[r][col]
        if p != 1:
            work[r] = [x / p for x in work[r]]
        prow = work[r]
        nz = [(j, x) for j, x in enumerate(prow) if x]
        for i in range(len(work)):
            if i != r:
                f = work[i][col]
                if f:
                    row = work[i]
                    for j, x in nz:
                        row[j] -= f * x
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    return tuple(tuple(Fraction(x) for x in row) for row in work[:r]), tuple(pivots)


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[0])


def nullspace(a: Matrix, ncols: int | None = None) -> Matrix:
    """Basis of {v : a v = 0}, one vector per free column."""
    if ncols is None:
        ncols = len(a[0]) if a else 0
    reduced, pivots = rref(a, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return tuple(basis)


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [tuple(a[i]) + unit_vector(n, i) for i in range(n)]
    reduced, pivots = rref(aug, n)
    if pivots[:n] != tuple(range(n)):
        raise ZeroDivisionError("singular matrix")
    return tuple(row[n:] for row in reduced)


def det(a: Matrix) -> Fraction:
    n = len(a)
    work = [list(r) for r in a]
    result = ONE
    for col in range(n):
        pivot = next((i for i in range(col, n) if work[i][col]), None)
        if pivot is None:
            return ZERO
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            result = -result
        p = work[col][col]
        result *= p
        for i in range(col + 1, n):
            f = work[i][col] / p
            if f:
                for j in range(col, n):
                    work[i][j] -= f * work[col][j]
    return result


def is_symmetric(a: Matrix) -> bool:
    return all(a[i][j] == a[j][i] for i in range(len(a)) for j in range(i))


def is_antisymmetric(a: Matrix) -> bool:
    return all(a[i][j] == -a[j][i] for i in range(len(a)) for j in range(i + 1))


def signature(a: Matrix) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix.

    Uses symmetric Gaussian elimination (congruence), so no eigenvalues are
    ever approximated.
    """
    if not is_symmetric(a):
        raise ValueError("signature needs a symmetric matrix")
    work = [list(r) for r in a]
    n = len(work)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if work[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if j > i and work[i][j]), None)
            if pair is None:
                break
            i, j = pair
            # e_i <- e_i + e_j makes the (i, i) entry 2 a_ij != 0
            for k in range(n):
                work[i][k] += work[j][k]
            for k in range(n):
                work[k][i] += work[k][j]
            piv = i
        p = work[piv][piv]
        if p > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        prow = work[piv]
        for i in active:
            f = work[i][piv]
            if f:
                f = f / p
                row = work[i]
                for k in active:
                    if prow[k]:
                        row[k] -= f * prow[k]
                row[piv] = ZERO
        for i in active:
            work[piv][i] = ZERO
    return pos, neg, n - pos - neg


def format_matrix(a: Matrix) -> list[list[str]]:
    return [[format_rational(x) for x in row] for row in a]


def format_vector(v: Sequence) -> list[str]:
    return [format_rational(x) for x in v]
