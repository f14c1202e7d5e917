"""Built-in affine-symplectic data and computations in the global chart.

* :func:`kodaira_data` - the flat 2-step family on R^{4n} (group of dim 8n).
* :func:`threestep_data` - the (a, b, c) family on R^4; 3-step iff b != c.
* :func:`affA_data` - any omega-compatible affine structure with nabla' = 0.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import linalg as la
from .algebra_core import (
    AffineSymplecticData,
    Connection,
    SymplecticForm,
    check_affine,
    check_omega_compat,
)
from .double_lie import GroupElement, left_translation_jacobian
from .errors import InputError, InternalError
from .geometry import build_metric


@dataclass(frozen=True)
class KodairaParams:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InputError(f"n must be a positive integer, got {self.n!r}")


@dataclass(frozen=True)
class ThreeStepParams:
    a: object = 0
    b: object = 1
    c: object = 0

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, la.parse_rational(getattr(self, name)))


def kodaira_connections(n: int) -> tuple[Connection, Connection]:
    """nabla_{e_i} e_i = e_{i+1} for odd i <= 2n; nabla' the same for odd i > 2n."""
    m = 4 * n
    first, second = {}, {}
    for i in range(0, m, 2):  # 0-based even index == odd 1-based index
        target = first if i < 2 * n else second
        target[(i, i)] = la.unit_vector(m, i + 1)
    return Connection.from_products(m, first), Connection.from_products(m, second)


def kodaira_data(p: KodairaParams | int) -> AffineSymplecticData:
    if isinstance(p, int):
        p = KodairaParams(p)
    nabla, nabla_p = kodaira_connections(p.n)
    return AffineSymplecticData(nabla, nabla_p, SymplecticForm.canonical(4 * p.n))


def threestep_matrices(a, b, c):
    """Matrices of nabla_{e_1..e_4} and nabla'_{e_1..e_4}."""
    a, b, c = (la.parse_rational(v) for v in (a, b, c))
    n1 = [[1, 0, 1, 0], [0, -1, 0, 1], [-1, 0, -1, 0], [0, -1, 0, 1]]
    n2 = [[0, 0, 0, 0], [-1, 0, -1, 0], [0, 0, 0, 0], [-1, 0, -1, 0]]
    n4 = [[-x for x in row] for row in n2]
    p1 = [[a, 0, a, 0], [b, -a, c, a], [-a, 0, -a, 0], [c, -a, -b + 2 * c, a]]
    p2 = [[0, 0, 0, 0], [-a, 0, -a, 0], [0, 0, 0, 0], [-a, 0, -a, 0]]
    p3 = [[a, 0, a, 0], [c, -a, -b + 2 * c, a], [-a, 0, -a, 0], [-b + 2 * c, -a, -2 * b + 3 * c, a]]
    p4 = [[-x for x in row] for row in p2]
    return [n1, n2, n1, n4], [p1, p2, p3, p4]


def threestep_data(p: ThreeStepParams | None = None, **kwargs) -> AffineSymplecticData:
    if p is None:
        p = ThreeStepParams(**kwargs)
    nab, prime = threestep_matrices(p.a, p.b, p.c)
    return AffineSymplecticData(
        Connection.from_matrices(nab), Connection.from_matrices(prime), SymplecticForm.canonical(4)
    )


def affA_data(c: Connection, w: SymplecticForm) -> AffineSymplecticData:
    """Data (c, 0, w); its algebra is the semidirect product aff(A)."""
    for check, what in ((check_affine(c), "affine"), (check_omega_compat(c, w), "omega-compatible")):
        if not check:
            raise InputError(f"connection is not {what} (witness {check.witness})")
    return AffineSymplecticData(c, Connection.zero(c.dim), w)


# ---------------------------------------------------------------------------
# The global chart (x, x') of the group


def coframe_at_point(data: AffineSymplecticData, p: GroupElement) -> la.Matrix:
    """Rows: the left-invariant 1-forms e^1..e^m, f^1..f^m at p in dx, dx' components."""
    jac = left_translation_jacobian(data, p, GroupElement.identity(data.dim))
    try:
        return la.inverse(jac)
    except ZeroDivisionError as exc:
        raise InternalError("left translation has a singular differential") from exc


def metric_at_point(data: AffineSymplecticData, p: GroupElement) -> la.Matrix:
    """Coefficients g_ij of g = sum g_ij dX_i (x) dX_j with X = (x, x')."""
    theta = coframe_at_point(data, p)
    g = build_metric(data).matrix
    return la.mat_mul(la.mat_mul(la.transpose(theta), g), theta)
