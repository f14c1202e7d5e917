"""The Lie algebra and Lie group built from validated affine-symplectic data.

The algebra lives on R^m + R^m with ordered basis (e_1..e_m, f_1..f_m),
``e_i = (e_i, 0)`` and ``f_i = (0, e_i)``.  Its bracket is

    [(x, x'), (y, y')] = (nabla'_y x' - nabla'_x y', nabla_x y' - nabla_y x')

and the group is R^m x R^m with

    (x, x') . (y, y') = (x + alpha(x', y), beta(x', y) + y')
    alpha(x', y) = y + nabla'_y x' - 1/2 nabla'_y nabla_y x'
    beta(x', y)  = x' - nabla_{x'} y - 1/2 nabla_{x'} nabla'_{x'} y
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg as la
from .algebra_core import PASS, AffineSymplecticData, BilinearMap, Check
from .errors import InputError

HALF = Fraction(1, 2)


class LieAlgebra(BilinearMap):
    """Structure constants ``coeffs[k][i][j]`` = k-th component of [b_i, b_j].

    Antisymmetry is enforced on construction; the Jacobi identity is not,
    so that corrupted tables can be built and diagnosed with
    :func:`jacobi_check`.
    """

    def __post_init__(self):
        super().__post_init__()
        for i in range(self.dim):
            for j in range(i, self.dim):
                if self.product(i, j) != la.vec_neg(self.product(j, i)):
                    raise InputError(f"bracket is not antisymmetric at ({i}, {j})")

    def bracket(self, u: Sequence, v: Sequence) -> la.Vector:
        return self.apply(u, v)

    def ad(self, u: Sequence) -> la.Matrix:
        return self.left(u)

    def labels(self) -> list[str]:
        return basis_labels(self.dim)


def basis_labels(dim: int) -> list[str]:
    """``e1..em, f1..fm`` for even dims; ``b1..bd`` otherwise."""
    if dim % 2:
        return [f"b{i + 1}" for i in range(dim)]
    m = dim // 2
    return [f"e{i + 1}" for i in range(m)] + [f"f{i + 1}" for i in range(m)]


def build_bracket(data: AffineSymplecticData) -> LieAlgebra:
    m = data.dim
    nabla, nabla_p = data.nabla, data.nabla_prime
    products = {}
    for i in range(m):
        for j in range(m):
            # [e_i, f_j] = (-nabla'_{e_i} e_j, nabla_{e_i} e_j)
            top = la.vec_neg(nabla_p.product(i, j))
            bottom = nabla.product(i, j)
            if la.is_zero(top) and la.is_zero(bottom):
                continue
            vec = top + bottom
            products[(i, m + j)] = vec
            products[(m + j, i)] = la.vec_neg(vec)
    return LieAlgebra.from_products(2 * m, products)


def jacobi_check(L: LieAlgebra) -> Check:
    """[[x,y],z] + [[y,z],x] + [[z,x],y] == 0 on all basis triples i<j<k."""
    d = L.dim
    for i, j, k in itertools.combinations(range(d), 3):
        bi, bj, bk = la.unit_vector(d, i), la.unit_vector(d, j), la.unit_vector(d, k)
        total = la.vec_add(
            la.vec_add(L(L.product(i, j), bk), L(L.product(j, k), bi)), L(L.product(k, i), bj)
        )
        if not la.is_zero(total):
            return Check.failed(i, j, k)
    return PASS


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^dim held as a reduced row-echelon basis."""

    dim: int
    basis: tuple

    @classmethod
    def span(cls, vectors: Iterable[Sequence], dim: int) -> "Subspace":
        rows = [tuple(v) for v in vectors]
        return cls(dim, la.rref(rows, dim)[0] if rows else ())

    @classmethod
    def whole(cls, dim: int) -> "Subspace":
        return cls(dim, la.identity(dim))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def contains(self, v: Sequence) -> bool:
        return la.rank(self.basis + (tuple(v),)) == self.rank

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def to_json(self) -> list[list[str]]:
        return la.format_matrix(self.basis)


@dataclass(frozen=True)
class NilpotencyResult:
    terms: tuple
    nilpotent: bool
    step: int | None

    @property
    def dims(self) -> list[int]:
        return [t.rank for t in self.terms]


def lower_central_series(L: LieAlgebra) -> NilpotencyResult:
    """g = C^1 > C^2 = [g, g] > C^3 = [g, C^2] > ...

    ``terms`` lists the nonzero terms; ``step`` is their number, i.e. the k
    with C^{k+1} = 0 (1 for abelian).  ``step`` is ``None`` when the series
    stabilizes at a nonzero term.
    """
    d = L.dim
    terms = [Subspace.whole(d)]
    for _ in range(d + 1):
        current = terms[-1]
        vectors = [L(la.unit_vector(d, i), v) for i in range(d) for v in current.basis]
        nxt = Subspace.span([v for v in vectors if not la.is_zero(v)], d)
        if nxt.is_zero():
            return NilpotencyResult(tuple(terms), True, len(terms))
        if nxt.rank == current.rank:
            return NilpotencyResult(tuple(terms), False, None)
        terms.append(nxt)
    raise AssertionError("lower central series did not stabilize")


def centre(L: LieAlgebra) -> Subspace:
    """Null space of x -> ([x, b_1], ..., [x, b_d])."""
    d = L.dim
    rows = []
    for j in range(d):
        # x -> [x, b_j] has matrix right(b_j)
        rows.extend(L.right(la.unit_vector(d, j)))
    return Subspace(d, la.rref(la.nullspace(rows, d), d)[0])


def centre_from_connections(data: AffineSymplecticData) -> Subspace:
    """{(x, x') : nabla_x = nabla_{x'} = nabla'_x = nabla'_{x'} = 0}."""
    m = data.dim
    rows = []
    for c in (data.nabla, data.nabla_prime):
        # x -> nabla_x e_j is linear in x with matrix right(e_j)
        for j in range(m):
            rows.extend(c.right(la.unit_vector(m, j)))
    kernel = la.nullspace(rows, m)
    vectors = [tuple(v) + la.zero_vector(m) for v in kernel]
    vectors += [la.zero_vector(m) + tuple(v) for v in kernel]
    return Subspace.span(vectors, 2 * m)


# ---------------------------------------------------------------------------
# The group


@dataclass(frozen=True)
class GroupElement:
    x: tuple
    x_prime: tuple

    def __post_init__(self):
        x, xp = la.vector(self.x), la.vector(self.x_prime)
        if len(x) != len(xp):
            raise InputError("x and x' must have the same length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "x_prime", xp)

    @classmethod
    def identity(cls, m: int) -> "GroupElement":
        return cls(la.zero_vector(m), la.zero_vector(m))

    @classmethod
    def from_vector(cls, v: Sequence) -> "GroupElement":
        if len(v) % 2:
            raise InputError("group element needs an even number of coordinates")
        m = len(v) // 2
        return cls(tuple(v[:m]), tuple(v[m:]))

    def as_vector(self) -> tuple:
        return self.x + self.x_prime

    @property
    def dim(self) -> int:
        return len(self.x)


def alpha(data: AffineSymplecticData, xp: Sequence, y: Sequence) -> la.Vector:
    nabla, nabla_p = data.nabla, data.nabla_prime
    inner = nabla(y, xp)
    return la.vec_add(la.vec_add(tuple(y), nabla_p(y, xp)), la.vec_scale(-HALF, nabla_p(y, inner)))


def beta(data: AffineSymplecticData, xp: Sequence, y: Sequence) -> la.Vector:
    nabla, nabla_p = data.nabla, data.nabla_prime
    inner = nabla_p(xp, y)
    return la.vec_sub(la.vec_sub(tuple(xp), nabla(xp, y)), la.vec_scale(HALF, nabla(xp, inner)))


def _check_element(data, *points):
    for p in points:
        if p.dim != data.dim:
            raise InputError(f"group element has dimension {p.dim}, data has {data.dim}")


def group_multiply(data: AffineSymplecticData, p: GroupElement, q: GroupElement) -> GroupElement:
    _check_element(data, p, q)
    return GroupElement(
        la.vec_add(p.x, alpha(data, p.x_prime, q.x)),
        la.vec_add(beta(data, p.x_prime, q.x), q.x_prime),
    )


def group_inverse(data: AffineSymplecticData, p: GroupElement) -> GroupElement:
    _check_element(data, p)
    nx, nxp = la.vec_neg(p.x), la.vec_neg(p.x_prime)
    return GroupElement(alpha(data, nxp, nx), beta(data, nxp, nx))


def left_translation_jacobian(data: AffineSymplecticData, p: GroupElement, q: GroupElement) -> la.Matrix:
    """Jacobian of r -> p . r at r = q, in the chart (y, y').

    Closed form: with R_z = (v -> nabla_v z) and L_z = (v -> nabla_z v),

        d alpha_{x'} at y = I + R'_{x'} - 1/2 (R'_{nabla_y x'} + L'_y R_{x'})
        d beta         = -L_{x'} - 1/2 L_{x'} L'_{x'}

    and the y' block is (0, I).
    """
    _check_element(data, p, q)
    m = data.dim
    nabla, nabla_p = data.nabla, data.nabla_prime
    xp, y = p.x_prime, q.x
    d_alpha = la.mat_add(
        la.identity(m),
        la.mat_sub(
            nabla_p.right(xp),
            la.mat_scale(HALF, la.mat_add(nabla_p.right(nabla(y, xp)), la.mat_mul(nabla_p.left(y), nabla.right(xp)))),
        ),
    )
    lx = nabla.left(xp)
    d_beta = la.mat_neg(la.mat_add(lx, la.mat_scale(HALF, la.mat_mul(lx, nabla_p.left(xp)))))
    return la.block([[d_alpha, la.zeros(m)], [d_beta, la.identity(m)]])


# ---------------------------------------------------------------------------
# Audit of the group axioms


SCALES = (-1, 1, 2)


def basis_grid(m: int, scales: Sequence = SCALES) -> list[GroupElement]:
    """s * b for every basis vector b of R^{2m} and every scale s."""
    points = []
    for i in range(2 * m):
        for s in scales:
            points.append(GroupElement.from_vector(la.vec_scale(Fraction(s), la.unit_vector(2 * m, i))))
    return points


@dataclass
class AuditReport:
    checks: dict = field(default_factory=dict)
    n_triples: int = 0

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def record(self, name: str, ok: bool, witness=None):
        if name not in self.checks:
            self.checks[name] = PASS
        if not ok and self.checks[name]:
            self.checks[name] = Check(False, witness)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "triples": self.n_triples,
            "checks": {k: bool(v) for k, v in self.checks.items()},
        }


def double_group_audit(
    data: AffineSymplecticData,
    samples: Iterable[tuple[GroupElement, GroupElement, GroupElement]] = (),
    grid: Sequence[GroupElement] | None = None,
) -> AuditReport:
    """Exact check of the group and matched-pair axioms on sample points.

    Triples are the user samples plus every (p, q, r) drawn from ``grid``
    (default: :func:`basis_grid`).  Pairs are the first two entries of each
    triple.  A failure contradicts the construction and is an internal error
    for validated data; the caller decides how to surface it.
    """
    m = data.dim
    if grid is None:
        grid = basis_grid(m)
    triples = list(samples) + list(itertools.product(grid, repeat=3))
    report = AuditReport(n_triples=len(triples))
    e = GroupElement.identity(m)
    products = {}

    def mul(p, q):
        key = (p, q)
        out = products.get(key)
        if out is None:
            out = products[key] = group_multiply(data, p, q)
        return out

    zero = la.zero_vector(m)

    points = {}
    for t in triples:
        for p in t:
            points[p.as_vector()] = p
    for p in points.values():
        x, xp = p.x, p.x_prime
        report.record("identity", mul(e, p) == p and mul(p, e) == p, p.as_vector())
        inv = group_inverse(data, p)
        report.record("inverse", mul(p, inv) == e and mul(inv, p) == e, p.as_vector())
        report.record("alpha_0", alpha(data, zero, x) == x and alpha(data, xp, zero) == zero, p.as_vector())
        report.record("beta_0", beta(data, xp, zero) == xp and beta(data, zero, x) == zero, p.as_vector())

    pair_cache = set()
    for p, q, r in triples:
        report.record("associativity", mul(mul(p, q), r) == mul(p, mul(q, r)), (p, q, r))
        key = (p.as_vector(), q.as_vector())
        if key in pair_cache:
            continue
        pair_cache.add(key)
        # p supplies (x, x'), q supplies (y, y'); z is the x of the third point
        x, xp, y, yp = p.x, p.x_prime, q.x, q.x_prime
        z = r.x
        sum_xp = la.vec_add(xp, yp)
        report.record(
            "alpha_action",
            alpha(data, sum_xp, z) == alpha(data, xp, alpha(data, yp, z)),
            (p, q, r),
        )
        sum_x = la.vec_add(x, y)
        report.record(
            "beta_action",
            beta(data, r.x_prime, sum_x) == beta(data, beta(data, r.x_prime, x), y),
            (p, q, r),
        )
        report.record(
            "alpha_compat",
            alpha(data, xp, sum_x) == la.vec_add(alpha(data, xp, x), alpha(data, beta(data, xp, x), y)),
            (p, q),
        )
        report.record(
            "beta_compat",
            beta(data, sum_xp, x) == la.vec_add(beta(data, xp, alpha(data, yp, x)), beta(data, yp, x)),
            (p, q),
        )
    return report


def linearization_check(data: AffineSymplecticData, points: Iterable[Sequence]) -> Check:
    """(d alpha_{x'})_0 = I + nabla'_{x'} and (d beta_y)_0 = I - nabla_y.

    Derivatives are taken exactly from the polynomial maps by central
    differences, which are exact for maps of degree <= 2 in the variable.
    """
    m = data.dim
    h = Fraction(1)
    for v in points:
        v = la.vector(v)
        d_alpha = []
        d_beta = []
        for j in range(m):
            ej = la.vec_scale(h, la.unit_vector(m, j))
            plus = alpha(data, v, ej)
            minus = alpha(data, v, la.vec_neg(ej))
            d_alpha.append(la.vec_scale(1 / (2 * h), la.vec_sub(plus, minus)))
            plus = beta(data, ej, v)
            minus = beta(data, la.vec_neg(ej), v)
            d_beta.append(la.vec_scale(1 / (2 * h), la.vec_sub(plus, minus)))
        d_alpha = la.transpose(tuple(d_alpha))
        d_beta = la.transpose(tuple(d_beta))
        if d_alpha != la.mat_add(la.identity(m), data.nabla_prime.left(v)):
            return Check.failed("alpha", v)
        if d_beta != la.mat_sub(la.identity(m), data.nabla.left(v)):
            return Check.failed("beta", v)
    return PASS


# ---------------------------------------------------------------------------


def bracket_table_json(L: LieAlgebra) -> dict:
    """Nonzero [b_i, b_j] for i < j, exact rationals as strings."""
    brackets = []
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            v = L.product(i, j)
            if not la.is_zero(v):
                brackets.append({"i": i, "j": j, "coeffs": la.format_vector(v)})
    return {"dim": L.dim, "basis": L.labels(), "brackets": brackets}


def lie_algebra_from_json(obj: dict) -> LieAlgebra:
    d = obj["dim"]
    products = {}
    for entry in obj["brackets"]:
        i, j = entry["i"], entry["j"]
        v = la.vector(entry["coeffs"])
        products[(i, j)] = v
        products[(j, i)] = la.vec_neg(v)
    return LieAlgebra.from_products(d, products)
