"""Left-invariant hypersymplectic geometry of the double Lie algebra.

All tensors are written in the basis (e_1..e_m, f_1..f_m).  Matrices of
bilinear forms hold ``B(b_i, b_j)`` at (i, j); endomorphism matrices act on
column vectors.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg as la
from .algebra_core import PASS, AffineSymplecticData, BilinearMap, Check
from .double_lie import LieAlgebra, build_bracket, lower_central_series
from .errors import InputError, InternalError
from .linalg import ZERO


@dataclass(frozen=True)
class TwoForm:
    matrix: tuple

    def __post_init__(self):
        mat = la.matrix(self.matrix)
        if not la.is_antisymmetric(mat):
            raise InputError("2-form matrix is not antisymmetric")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def __call__(self, u: Sequence, v: Sequence) -> Fraction:
        return la.dot(u, la.mat_vec(self.matrix, v))

    def is_nondegenerate(self) -> bool:
        return la.det(self.matrix) != 0


@dataclass(frozen=True)
class Endomorphism:
    matrix: tuple

    def __post_init__(self):
        object.__setattr__(self, "matrix", la.matrix(self.matrix))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def __call__(self, v: Sequence) -> la.Vector:
        return la.mat_vec(self.matrix, v)

    def __matmul__(self, other: "Endomorphism") -> "Endomorphism":
        return Endomorphism(la.mat_mul(self.matrix, other.matrix))

    def __neg__(self) -> "Endomorphism":
        return Endomorphism(la.mat_neg(self.matrix))

    def __eq__(self, other) -> bool:
        return isinstance(other, Endomorphism) and self.matrix == other.matrix

    __hash__ = None

    @classmethod
    def identity(cls, dim: int) -> "Endomorphism":
        return cls(la.identity(dim))


@dataclass(frozen=True)
class Metric:
    matrix: tuple

    def __post_init__(self):
        mat = la.matrix(self.matrix)
        if not la.is_symmetric(mat):
            raise InputError("metric matrix is not symmetric")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def __call__(self, u: Sequence, v: Sequence) -> Fraction:
        return la.dot(u, la.mat_vec(self.matrix, v))

    def signature(self) -> tuple[int, int]:
        pos, neg, zero = la.signature(self.matrix)
        if zero:
            raise InternalError("metric is degenerate")
        return pos, neg


class MetricConnection(BilinearMap):
    """Levi-Civita connection on left-invariant fields: (u, v) -> nabla^g_u v."""


# ---------------------------------------------------------------------------
# Forms, complex and product structures


def _omega_blocks(data: AffineSymplecticData):
    w = data.omega.matrix
    return w, la.zeros(data.dim)


def build_forms(data: AffineSymplecticData) -> tuple[TwoForm, TwoForm, TwoForm]:
    """omega_1 = w(x,y) + w(x',y'), omega_2 = -w(x,y') + w(y,x'), omega_3 = w(x,y) - w(x',y')."""
    w, z = _omega_blocks(data)
    neg_w = la.mat_neg(w)
    forms = (
        TwoForm(la.block([[w, z], [z, w]])),
        TwoForm(la.block([[z, neg_w], [neg_w, z]])),
        TwoForm(la.block([[w, z], [z, neg_w]])),
    )
    for k, f in enumerate(forms, 1):
        if not f.is_nondegenerate():
            raise InternalError(f"omega_{k} is degenerate")
    return forms


def d_closed(form: TwoForm, L: LieAlgebra) -> Check:
    """d w(x,y,z) = w(x,[y,z]) + w(y,[z,x]) + w(z,[x,y]) vanishes on basis triples."""
    d = L.dim
    if form.dim != d:
        raise InputError("form and algebra dimensions differ")
    W = form.matrix
    for i, j, k in itertools.combinations(range(d), 3):
        total = (
            la.dot(W[i], L.product(j, k))
            + la.dot(W[j], L.product(k, i))
            + la.dot(W[k], L.product(i, j))
        )
        if total:
            return Check.failed(i, j, k)
    return PASS


def build_J_E(m: int) -> tuple[Endomorphism, Endomorphism]:
    """J(x, y) = (-y, x) and E(x, y) = (x, -y) on R^m + R^m."""
    z, i = la.zeros(m), la.identity(m)
    neg_i = la.mat_neg(i)
    J = Endomorphism(la.block([[z, neg_i], [i, z]]))
    E = Endomorphism(la.block([[i, z], [z, neg_i]]))
    return J, E


def integrability_check(S: Endomorphism, kind: str, L: LieAlgebra) -> Check:
    """Vanishing Nijenhuis-type tensor of S on all basis pairs.

    product: S[u,v] = [Su,v] + [u,Sv] - S[Su,Sv]
    complex: S[u,v] = [Su,v] + [u,Sv] + S[Su,Sv]
    """
    d = L.dim
    sign = {"product": -1, "complex": 1}.get(kind)
    if sign is None:
        raise ValueError(f"kind must be 'product' or 'complex', not {kind!r}")
    expected = la.identity(d) if kind == "product" else la.mat_neg(la.identity(d))
    if la.mat_mul(S.matrix, S.matrix) != expected:
        raise InputError(f"S^2 != {'Id' if kind == 'product' else '-Id'}")
    cols = la.transpose(S.matrix)  # cols[i] = S b_i
    for i in range(d):
        for j in range(i + 1, d):
            bi, bj = la.unit_vector(d, i), la.unit_vector(d, j)
            lhs = S(L.product(i, j))
            rhs = la.vec_add(L(cols[i], bj), L(bi, cols[j]))
            rhs = la.vec_add(rhs, la.vec_scale(sign, S(L(cols[i], cols[j]))))
            if lhs != rhs:
                return Check.failed(i, j)
    return PASS


# ---------------------------------------------------------------------------
# Metric and Levi-Civita connection


def build_metric(data: AffineSymplecticData) -> Metric:
    """g((x,x'),(y,y')) = -w(x,y') + w(x',y)."""
    w, z = _omega_blocks(data)
    return Metric(la.block([[z, la.mat_neg(w)], [w, z]]))


def hermitian_checks(data: AffineSymplecticData) -> dict[str, bool]:
    """Exact matrix forms of g(J.,J.) = g, g(E.,E.) = -g and the recovery of omega_1..3."""
    g = build_metric(data).matrix
    J, E = build_J_E(data.dim)
    JE = J @ E
    w1, w2, w3 = (f.matrix for f in build_forms(data))

    def pullback(S):
        return la.mat_mul(la.mat_mul(la.transpose(S.matrix), g), S.matrix)

    def recovered(S):
        # (u, v) -> g(S u, v) has matrix S^T g
        return la.mat_mul(la.transpose(S.matrix), g)

    return {
        "g_J_invariant": pullback(J) == g,
        "g_E_anti_invariant": pullback(E) == la.mat_neg(g),
        "omega1_is_gJ": recovered(J) == w1,
        "omega2_is_gE": recovered(E) == w2,
        "omega3_is_gJE": recovered(JE) == w3,
        "J_squared": la.mat_mul(J.matrix, J.matrix) == la.mat_neg(la.identity(2 * data.dim)),
        "E_squared": la.mat_mul(E.matrix, E.matrix) == la.identity(2 * data.dim),
        "JE_anticommute": (J @ E).matrix == (-(E @ J)).matrix,
    }


def isotropy_check(data: AffineSymplecticData) -> bool:
    g = build_metric(data).matrix
    m = data.dim
    return all(g[i][j] == 0 for i in range(m) for j in range(m)) and all(
        g[m + i][m + j] == 0 for i in range(m) for j in range(m)
    )


def levi_civita_closed_form(data: AffineSymplecticData) -> MetricConnection:
    """nabla^g_{(x,x')} = diag(nabla_x + nabla'_{x'}, nabla_x + nabla'_{x'})."""
    m = data.dim
    products = {}
    for u in range(2 * m):
        src = data.nabla if u < m else data.nabla_prime
        i = u % m
        for j in range(m):
            v = src.product(i, j)
            if not la.is_zero(v):
                products[(u, j)] = v + la.zero_vector(m)
                products[(u, m + j)] = la.zero_vector(m) + v
    return MetricConnection.from_products(2 * m, products)


def koszul_connection(L: LieAlgebra, g: Metric) -> MetricConnection:
    """Levi-Civita connection from the Koszul formula for left-invariant fields:

        2 g(nabla_u v, w) = g([u,v], w) - g([v,w], u) + g([w,u], v)
    """
    d = L.dim
    G = g.matrix
    G_inv = la.inverse(G)
    ad = [L.left_basis(i) for i in range(d)]
    # g([v, w], u) over w is row u of G applied to ad_v: (ad_v^T G)[w][u]
    adT_G = [la.mat_mul(la.transpose(a), G) for a in ad]
    half = Fraction(1, 2)
    products = {}
    for i in range(d):
        for j in range(d):
            first = la.mat_vec(G, L.product(i, j))  # g([b_i, b_j], w) over w
            second = tuple(adT_G[j][w][i] for w in range(d))  # g([b_j, w], b_i)
            third = tuple(-adT_G[i][w][j] for w in range(d))  # g([w, b_i], b_j) = -g([b_i, w], b_j)
            rhs = tuple(half * (a - b + c) for a, b, c in zip(first, second, third))
            if any(rhs):
                products[(i, j)] = la.mat_vec(G_inv, rhs)
    return MetricConnection.from_products(d, products)


def levi_civita(data: AffineSymplecticData, verify: bool = True) -> MetricConnection:
    """Closed-form Levi-Civita connection, cross-checked against the Koszul formula."""
    conn = levi_civita_closed_form(data)
    if verify:
        L = build_bracket(data)
        if conn != koszul_connection(L, build_metric(data)):
            raise InternalError("closed-form Levi-Civita connection disagrees with Koszul formula")
    return conn


def torsion_check(conn: BilinearMap, L: LieAlgebra) -> Check:
    """nabla_u v - nabla_v u == [u, v]."""
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            if la.vec_sub(conn.product(i, j), conn.product(j, i)) != L.product(i, j):
                return Check.failed(i, j)
    return PASS


def metric_compat_check(conn: BilinearMap, g: Metric) -> Check:
    """g(nabla_u v, w) + g(v, nabla_u w) == 0, i.e. nabla_u is g-skew."""
    G = g.matrix
    for i in range(conn.dim):
        A = la.mat_mul(G, conn.left_basis(i))
        if la.mat_add(A, la.transpose(A)) != la.zeros(conn.dim):
            return Check.failed(i)
    return PASS


def parallel_check(conn: BilinearMap, S: Endomorphism) -> Check:
    """nabla_u S == S nabla_u for every basis u."""
    for i in range(conn.dim):
        A = conn.left_basis(i)
        if la.mat_mul(A, S.matrix) != la.mat_mul(S.matrix, A):
            return Check.failed(i)
    return PASS


# ---------------------------------------------------------------------------
# Curvature


@dataclass(frozen=True)
class CurvatureTensor:
    """``operators[i][j]`` is the matrix of R(b_i, b_j)."""

    operators: tuple

    @property
    def dim(self) -> int:
        return len(self.operators)

    def component(self, i: int, j: int, k: int) -> la.Vector:
        """R(b_i, b_j) b_k."""
        return tuple(row[k] for row in self.operators[i][j])

    def is_zero(self) -> bool:
        return all(la.mat_is_zero(op) for row in self.operators for op in row)


def curvature_from_connection(conn: BilinearMap, L: LieAlgebra) -> CurvatureTensor:
    """R(u, v) = nabla_u nabla_v - nabla_v nabla_u - nabla_[u,v]."""
    d = L.dim
    ops = [conn.left_basis(i) for i in range(d)]
    zero = la.zeros(d)
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            if i == j:
                row.append(zero)
                continue
            R = la.mat_sub(la.mat_mul(ops[i], ops[j]), la.mat_mul(ops[j], ops[i]))
            bracket = L.product(i, j)
            if not la.is_zero(bracket):
                R = la.mat_sub(R, conn.left(bracket))
            row.append(R)
        rows.append(tuple(row))
    return CurvatureTensor(tuple(rows))


def curvature_identity_check(R: CurvatureTensor, L: LieAlgebra) -> Check:
    """R(u, v) == -4 ad_[u,v] on all basis pairs."""
    for i in range(L.dim):
        for j in range(L.dim):
            expected = la.mat_scale(-4, L.ad(L.product(i, j)))
            if R.operators[i][j] != expected:
                return Check.failed(i, j)
    return PASS


def bianchi_check(R: CurvatureTensor) -> Check:
    """R(u,v)w + R(v,w)u + R(w,u)v == 0 on basis triples."""
    d = R.dim
    for i, j, k in itertools.combinations(range(d), 3):
        total = la.vec_add(
            la.vec_add(R.component(i, j, k), R.component(j, k, i)), R.component(k, i, j)
        )
        if not la.is_zero(total):
            return Check.failed(i, j, k)
    return PASS


def curvature(data: AffineSymplecticData) -> CurvatureTensor:
    L = build_bracket(data)
    R = curvature_from_connection(levi_civita(data, verify=False), L)
    check = curvature_identity_check(R, L)
    if not check:
        raise InternalError(f"R(u,v) != -4 ad_[u,v] at {check.witness}")
    return R


def ricci_from_curvature(R: CurvatureTensor) -> la.Matrix:
    """Ric(b_i, b_j) = trace(w -> R(w, b_i) b_j)."""
    d = R.dim
    return tuple(
        tuple(sum((R.operators[l][i][l][j] for l in range(d)), ZERO) for j in range(d))
        for i in range(d)
    )


def ricci(data: AffineSymplecticData) -> la.Matrix:
    ric = ricci_from_curvature(curvature(data))
    if not la.mat_is_zero(ric):
        raise InternalError("Ricci tensor is not zero")
    return ric


def nabla_product_zero(data: AffineSymplecticData) -> bool:
    """nabla_x nabla'_y == 0 for all basis x, y."""
    L, P = data.nabla.left_basis, data.nabla_prime.left_basis
    return all(la.mat_is_zero(la.mat_mul(L(i), P(j))) for i in range(data.dim) for j in range(data.dim))


@dataclass(frozen=True)
class FlatnessReport:
    step: int
    nabla_product_zero: bool
    flat: bool

    def to_json(self) -> dict:
        return {"step": self.step, "nabla_product_zero": self.nabla_product_zero, "flat": self.flat}


def flatness_report(data: AffineSymplecticData, R: CurvatureTensor | None = None) -> FlatnessReport:
    """2-step nilpotent <=> nabla nabla' = 0 <=> R = 0, each computed separately."""
    series = lower_central_series(build_bracket(data))
    if not series.nilpotent or series.step > 3:
        raise InternalError(f"algebra is not at most 3-step nilpotent: {series.dims}")
    if R is None:
        R = curvature(data)
    report = FlatnessReport(series.step, nabla_product_zero(data), R.is_zero())
    if not (report.step <= 2) == report.nabla_product_zero == report.flat:
        raise InternalError(f"flatness conditions disagree: {report}")
    return report


def flat_nilpotency_check(data: AffineSymplecticData) -> Check:
    """When flat, (u -> nabla^g_u v)^2 == 0 for every basis v."""
    conn = levi_civita(data, verify=False)
    d = conn.dim
    for j in range(d):
        A = conn.right(la.unit_vector(d, j))
        if not la.mat_is_zero(la.mat_mul(A, A)):
            return Check.failed(j)
    return PASS


# ---------------------------------------------------------------------------
# Geodesics:  a' = -nabla_a a - nabla'_b a,  b' = -nabla_a b - nabla'_b b


@dataclass(frozen=True)
class GeodesicCurve:
    """a(t) = A t + a0, b(t) = B t + b0, defined for every real t."""

    a0: tuple
    b0: tuple
    A: tuple
    B: tuple

    def at(self, t) -> tuple[la.Vector, la.Vector]:
        t = Fraction(t) if not isinstance(t, float) else t
        return (
            tuple(p * t + q for p, q in zip(self.A, self.a0)),
            tuple(p * t + q for p, q in zip(self.B, self.b0)),
        )

    def sample(self, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t = np.asarray(times, dtype=float)[..., None]
        a = t * np.array(self.A, dtype=float) + np.array(self.a0, dtype=float)
        b = t * np.array(self.B, dtype=float) + np.array(self.b0, dtype=float)
        return a, b


def _bilinear_poly(c: BilinearMap, u: tuple, v: tuple) -> list[la.Vector]:
    """Coefficients (t^0, t^1, t^2) of c(u1 t + u0, v1 t + v0) for u = (u1, u0)."""
    (u1, u0), (v1, v0) = u, v
    return [c(u0, v0), la.vec_add(c(u1, v0), c(u0, v1)), c(u1, v1)]


def geodesic_rhs(data: AffineSymplecticData, a: Sequence, b: Sequence) -> tuple[la.Vector, la.Vector]:
    n, p = data.nabla, data.nabla_prime
    return (
        la.vec_neg(la.vec_add(n(a, a), p(b, a))),
        la.vec_neg(la.vec_add(n(a, b), p(b, b))),
    )


def geodesic_residual(data: AffineSymplecticData, curve: GeodesicCurve) -> list[la.Vector]:
    """Coefficients of t^0, t^1, t^2 of (a' - rhs_a, b' - rhs_b)."""
    n, p = data.nabla, data.nabla_prime
    a = (curve.A, curve.a0)
    b = (curve.B, curve.b0)
    rhs_a = [la.vec_add(x, y) for x, y in zip(_bilinear_poly(n, a, a), _bilinear_poly(p, b, a))]
    rhs_b = [la.vec_add(x, y) for x, y in zip(_bilinear_poly(n, a, b), _bilinear_poly(p, b, b))]
    derivative_a = [curve.A, la.zero_vector(len(curve.A)), la.zero_vector(len(curve.A))]
    derivative_b = [curve.B, la.zero_vector(len(curve.B)), la.zero_vector(len(curve.B))]
    return [
        la.vec_add(da, ra) + la.vec_add(db, rb)
        for da, ra, db, rb in zip(derivative_a, rhs_a, derivative_b, rhs_b)
    ]


def geodesic_closed_form(data: AffineSymplecticData, a0: Sequence, b0: Sequence) -> GeodesicCurve:
    """Linear solution through (a0, b0); raises InternalError if it leaves a residual."""
    a0, b0 = la.vector(a0), la.vector(b0)
    if len(a0) != data.dim or len(b0) != data.dim:
        raise InputError(f"initial vectors must have length {data.dim}")
    n, p = data.nabla, data.nabla_prime
    A = la.vec_neg(la.vec_add(n(a0, a0), p(a0, b0)))
    B = la.vec_neg(la.vec_add(n(a0, b0), p(b0, b0)))
    curve = GeodesicCurve(a0, b0, A, B)
    residual = geodesic_residual(data, curve)
    if any(not la.is_zero(c) for c in residual):
        raise InternalError(f"closed-form geodesic leaves a residual {residual}")
    return curve


def geodesic_acceleration(data: AffineSymplecticData, a0: Sequence, b0: Sequence) -> tuple[la.Vector, la.Vector]:
    """(a'', b'') at t = 0, obtained by differentiating the system once."""
    n, p = data.nabla, data.nabla_prime
    a0, b0 = la.vector(a0), la.vector(b0)
    da, db = geodesic_rhs(data, a0, b0)
    dda = la.vec_neg(
        la.vec_add(
            la.vec_add(n(da, a0), n(a0, da)),
            la.vec_add(p(db, a0), p(b0, da)),
        )
    )
    ddb = la.vec_neg(
        la.vec_add(
            la.vec_add(n(da, b0), n(a0, db)),
            la.vec_add(p(db, b0), p(b0, db)),
        )
    )
    return dda, ddb


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    a: np.ndarray  # (..., steps + 1, m)
    b: np.ndarray


def _float_coeffs(c: BilinearMap) -> np.ndarray:
    return np.array([[[float(q) for q in row] for row in plane] for plane in c.coeffs])


def geodesic_numeric(
    data: AffineSymplecticData,
    a0,
    b0,
    t_end: float = 10.0,
    step: float = 1e-3,
) -> Trajectory:
    """Classical fixed-step RK4 in double precision, compensated summation.

    ``a0`` and ``b0`` may carry leading batch dimensions; all trajectories
    are integrated together.
    """
    if step <= 0:
        raise InputError("step must be positive")
    n_steps = int(round(float(t_end) / float(step)))
    if n_steps <= 0:
        raise InputError("t_end must be positive")
    h = float(t_end) / n_steps
    G = _float_coeffs(data.nabla)
    P = _float_coeffs(data.nabla_prime)
    m = data.dim
    # x = (a, b); the system is x' = -T(x, x) with
    # T(x, x) = (nabla_a a + nabla'_b a, nabla_a b + nabla'_b b)
    T = np.zeros((2 * m, 2 * m, 2 * m))
    T[:m, :m, :m] = G
    T[:m, m:, :m] = P
    T[m:, :m, m:] = G
    T[m:, m:, m:] = P
    T = -T.reshape(2 * m, -1).T

    def rhs(x):
        return (x[..., :, None] * x[..., None, :]).reshape(x.shape[:-1] + (-1,)) @ T

    x = np.concatenate(
        [np.asarray(a0, dtype=float), np.asarray(b0, dtype=float)], axis=-1
    )
    out = np.empty(x.shape[:-1] + (n_steps + 1, 2 * m))
    out[..., 0, :] = x
    comp = np.zeros_like(x)  # Kahan compensation for the state update
    for s in range(n_steps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        incr = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4) - comp
        new = x + incr
        comp = (new - x) - incr
        x = new
        out[..., s + 1, :] = x
    t = np.linspace(0.0, n_steps * h, n_steps + 1)
    return Trajectory(t, out[..., :m], out[..., m:])


def max_deviation(data: AffineSymplecticData, curve: GeodesicCurve, traj: Trajectory) -> float:
    a, b = curve.sample(traj.t)
    return float(max(np.max(np.abs(traj.a - a)), np.max(np.abs(traj.b - b))))


def trajectory_csv(traj: Trajectory) -> str:
    """CSV with header ``t,a_1..a_m,b_1..b_m``; rows use repr-exact floats."""
    m = traj.a.shape[-1]
    header = ["t"] + [f"a_{i + 1}" for i in range(m)] + [f"b_{i + 1}" for i in range(m)]
    lines = [",".join(header)]
    for k in range(len(traj.t)):
        values = [traj.t[k], *traj.a[k], *traj.b[k]]
        lines.append(",".join(repr(float(v)) for v in values))
    return "\n".join(lines) + "\n"
