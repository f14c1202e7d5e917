"""Affine-symplectic data on R^m and the identities it must satisfy.

Coefficient convention, used for every bilinear map in the package::

    coeffs[k][i][j] = k-th component of B(e_i, e_j)

so for a connection ``coeffs[k][i][j]`` is the k-th component of
``nabla_{e_i} e_j``, and ``left(e_i)`` is the matrix of ``nabla_{e_i}``
(row k, column j) exactly as such matrices are usually displayed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

from . import linalg as la
from .errors import InputError, InternalError
from .linalg import ZERO


@dataclass(frozen=True)
class Check:
    """Outcome of an exact identity check; falsy on failure.

    ``witness`` holds the (0-based) basis indices of the first violation.
    """

    ok: bool
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def passed(cls) -> "Check":
        return cls(True)

    @classmethod
    def failed(cls, *witness) -> "Check":
        return cls(False, tuple(witness))


PASS = Check(True)


@dataclass(frozen=True)
class BilinearMap:
    """Bilinear map R^d x R^d -> R^d given by its coefficient array."""

    coeffs: tuple
    _terms: tuple = field(init=False, repr=False, compare=False)
    _left: dict = field(init=False, repr=False, compare=False)
    _by_first: tuple = field(init=False, repr=False, compare=False)
    _by_second: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        raw = self.coeffs
        d = len(raw)
        if d == 0:
            raise InputError("dimension must be positive")
        try:
            coeffs = tuple(
                tuple(tuple(la.parse_rational(q) for q in raw[k][i]) for i in range(d))
                for k in range(d)
            )
        except (TypeError, IndexError) as exc:
            raise InputError("coefficient array is not d x d x d") from exc
        if any(len(plane) != d or any(len(row) != d for row in plane) for plane in raw):
            raise InputError(f"coefficient array must have shape {d}x{d}x{d}")
        object.__setattr__(self, "coeffs", coeffs)
        terms = tuple(
            tuple(
                tuple((k, coeffs[k][i][j]) for k in range(d) if coeffs[k][i][j])
                for j in range(d)
            )
            for i in range(d)
        )
        object.__setattr__(self, "_terms", terms)
        object.__setattr__(self, "_left", {})
        # (other index, k, q) for every nonzero coefficient, grouped by i and by j
        object.__setattr__(self, "_by_first", tuple(
            tuple((j, k, q) for j in range(d) for k, q in terms[i][j]) for i in range(d)
        ))
        object.__setattr__(self, "_by_second", tuple(
            tuple((i, k, q) for i in range(d) for k, q in terms[i][j]) for j in range(d)
        ))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @classmethod
    def zero(cls, dim: int, **kwargs):
        return cls(_zero_coeffs(dim), **kwargs)

    @classmethod
    def from_products(cls, dim: int, products: Mapping[tuple[int, int], Sequence], **kwargs):
        """Build from ``{(i, j): B(e_i, e_j)}``; omitted pairs map to zero."""
        coeffs = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
        for (i, j), vec in products.items():
            for k, q in enumerate(vec):
                coeffs[k][i][j] = la.parse_rational(q)
        return cls(coeffs, **kwargs)

    @classmethod
    def from_matrices(cls, matrices: Sequence[Sequence[Sequence]], **kwargs):
        """Build from the matrices of ``x -> B(e_i, x)``, one per basis vector."""
        d = len(matrices)
        return cls([[[matrices[i][k][j] for j in range(d)] for i in range(d)] for k in range(d)], **kwargs)

    def product(self, i: int, j: int) -> la.Vector:
        out = [ZERO] * self.dim
        for k, q in self._terms[i][j]:
            out[k] = q
        return tuple(out)

    def apply(self, x: Sequence, y: Sequence) -> la.Vector:
        d = self.dim
        if len(x) != d or len(y) != d:
            raise InputError(f"expected vectors of length {d}")
        out = [ZERO] * d
        ynz = [(j, b) for j, b in enumerate(y) if b]
        for i, a in enumerate(x):
            if not a:
                continue
            row = self._terms[i]
            for j, b in ynz:
                terms = row[j]
                if terms:
                    ab = a * b
                    for k, q in terms:
                        out[k] += ab * q
        return tuple(out)

    __call__ = apply

    def left_basis(self, i: int) -> la.Matrix:
        """Matrix of y -> B(e_i, y)."""
        cached = self._left.get(i)
        if cached is None:
            c = self.coeffs
            cached = tuple(c[k][i] for k in range(self.dim))
            self._left[i] = cached
        return cached

    def left(self, x: Sequence) -> la.Matrix:
        """Matrix of y -> B(x, y)."""
        d = self.dim
        acc = [[ZERO] * d for _ in range(d)]
        for i, a in enumerate(x):
            if a:
                for j, k, q in self._by_first[i]:
                    acc[k][j] += a * q
        return tuple(tuple(r) for r in acc)

    def right(self, y: Sequence) -> la.Matrix:
        """Matrix of x -> B(x, y)."""
        d = self.dim
        acc = [[ZERO] * d for _ in range(d)]
        for j, b in enumerate(y):
            if b:
                for i, k, q in self._by_second[j]:
                    acc[k][i] += b * q
        return tuple(tuple(r) for r in acc)

    def is_zero(self) -> bool:
        return not any(any(t) for t in self._terms)

    def nonzero_products(self):
        """Yield ``(i, j, B(e_i, e_j))`` for every nonzero basis product."""
        for i in range(self.dim):
            for j in range(self.dim):
                if self._terms[i][j]:
                    yield i, j, self.product(i, j)


def _zero_coeffs(dim: int):
    return [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]


class Connection(BilinearMap):
    """A connection on R^m, i.e. the bilinear map (x, y) -> nabla_x y."""


@dataclass(frozen=True)
class SymplecticForm:
    matrix: tuple

    def __post_init__(self):
        mat = la.matrix(self.matrix)
        n = len(mat)
        if n == 0 or any(len(r) != n for r in mat):
            raise InputError("symplectic form must be a non-empty square matrix")
        if not la.is_antisymmetric(mat):
            raise InputError("symplectic form is not antisymmetric")
        if la.det(mat) == 0:
            raise InputError("symplectic form is degenerate")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @classmethod
    def canonical(cls, m: int) -> "SymplecticForm":
        """e^1 ^ e^2 + e^3 ^ e^4 + ... on R^m."""
        if m <= 0 or m % 2:
            raise InputError("canonical symplectic form needs a positive even dimension")
        rows = [[0] * m for _ in range(m)]
        for i in range(0, m, 2):
            rows[i][i + 1] = 1
            rows[i + 1][i] = -1
        return cls(rows)

    def __call__(self, x: Sequence, y: Sequence) -> Fraction:
        return la.dot(x, la.mat_vec(self.matrix, y))


# ---------------------------------------------------------------------------
# Equation checks.  Bilinearity reduces each to a finite loop over basis
# indices, so every check is exact and exhaustive.


def _first_diff_column(a: la.Matrix, b: la.Matrix) -> int | None:
    for col in range(len(a[0])):
        if any(a[r][col] != b[r][col] for r in range(len(a))):
            return col
    return None


def _first_nonzero_column(a: la.Matrix) -> int | None:
    for col in range(len(a[0])):
        if any(a[r][col] for r in range(len(a))):
            return col
    return None


def check_torsion_free(c: Connection) -> Check:
    """nabla_x y == nabla_y x."""
    for i in range(c.dim):
        for j in range(i + 1, c.dim):
            if c.product(i, j) != c.product(j, i):
                return Check.failed(i, j)
    return PASS


def check_flat(c: Connection) -> Check:
    """nabla_x nabla_y == nabla_y nabla_x as operators."""
    for i in range(c.dim):
        for j in range(i + 1, c.dim):
            li, lj = c.left_basis(i), c.left_basis(j)
            col = _first_diff_column(la.mat_mul(li, lj), la.mat_mul(lj, li))
            if col is not None:
                return Check.failed(i, j, col)
    return PASS


def check_affine(c: Connection) -> Check:
    """Torsion-free and flat; witness (i, j) or (i, j, k)."""
    return check_torsion_free(c) and check_flat(c)


def _check_dims(*objs) -> int:
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise InputError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def check_omega_compat(c: Connection, w: SymplecticForm) -> Check:
    """omega(nabla_x y, z) == omega(nabla_x z, y); witness (i, j, k)."""
    m = _check_dims(c, w)
    # row[j] of the pairing matrix P_i = W^T-contracted: omega(nabla_i e_j, e_k)
    for i in range(m):
        pair = la.mat_mul(la.transpose(c.left_basis(i)), w.matrix)
        for j in range(m):
            for k in range(j + 1, m):
                if pair[j][k] != pair[k][j]:
                    return Check.failed(i, j, k)
    return PASS


def _check_operator_identity(lhs, rhs, m: int) -> Check:
    for i in range(m):
        for j in range(m):
            col = _first_diff_column(lhs(i, j), rhs(i, j))
            if col is not None:
                return Check.failed(i, j, col)
    return PASS


def check_square_zero(c: Connection) -> Check:
    """nabla_x nabla_y == 0."""
    m = c.dim
    for i in range(m):
        for j in range(m):
            col = _first_nonzero_column(la.mat_mul(c.left_basis(i), c.left_basis(j)))
            if col is not None:
                return Check.failed(i, j, col)
    return PASS


def check_pair(c1: Connection, c2: Connection) -> Check:
    """nabla_x nabla'_y == nabla_y nabla'_x; witness (i, j, k)."""
    m = _check_dims(c1, c2)
    L, P = c1.left_basis, c2.left_basis
    return _check_operator_identity(
        lambda i, j: la.mat_mul(L(i), P(j)), lambda i, j: la.mat_mul(L(j), P(i)), m
    )


def check_pair_transposed(c1: Connection, c2: Connection) -> Check:
    """nabla'_x nabla_y == nabla'_y nabla_x."""
    return check_pair(c2, c1)


def check_anticommute(c1: Connection, c2: Connection) -> Check:
    """nabla_x nabla'_y == -nabla'_y nabla_x."""
    m = _check_dims(c1, c2)
    L, P = c1.left_basis, c2.left_basis
    return _check_operator_identity(
        lambda i, j: la.mat_mul(L(i), P(j)), lambda i, j: la.mat_neg(la.mat_mul(P(j), L(i))), m
    )


EQUATIONS = ("eq1", "eq2", "eq3", "eq4", "eq5", "eq6", "eq7")
HYPOTHESES = ("eq1", "eq2", "eq3", "eq5")
DESCRIPTIONS = {
    "eq1": "torsion-free: nabla_x y = nabla_y x",
    "eq2": "flat: nabla_x nabla_y = nabla_y nabla_x",
    "eq3": "omega-compatible: omega(nabla_x y, z) = omega(nabla_x z, y)",
    "eq4": "nabla_x nabla_y = 0 (derived)",
    "eq5": "nabla_x nabla'_y = nabla_y nabla'_x",
    "eq6": "nabla'_x nabla_y = nabla'_y nabla_x (derived)",
    "eq7": "nabla_x nabla'_y = -nabla'_y nabla_x (derived)",
}


@dataclass(frozen=True)
class ValidationReport:
    flags: dict
    witnesses: dict
    internal_errors: tuple = ()

    @property
    def valid(self) -> bool:
        return all(self.flags[e] for e in HYPOTHESES)

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "equations": {
                e: {
                    "pass": self.flags[e],
                    "witness": list(self.witnesses[e]) if e in self.witnesses else None,
                }
                for e in EQUATIONS
            },
            "internal_errors": list(self.internal_errors),
        }

    def describe_failures(self) -> list[str]:
        return [
            f"{e} failed ({DESCRIPTIONS[e]}) at {self.witnesses.get(e)}"
            for e in EQUATIONS
            if not self.flags[e]
        ]


class ValidationError(InputError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("data is not affine-symplectic: " + "; ".join(report.describe_failures()))


def check_data(nabla: Connection, nabla_prime: Connection, omega) -> ValidationReport:
    """Evaluate Eqs. 1-7 on raw data without raising for equation failures."""
    if not isinstance(omega, SymplecticForm):
        omega = SymplecticForm(omega)
    m = _check_dims(nabla, nabla_prime, omega)
    if m % 2:
        raise InputError(f"dimension must be even, got {m}")

    flags, witnesses = {}, {}

    def record(eq, results):
        flags[eq] = all(r for _, r in results)
        for name, r in results:
            if not r:
                witnesses[eq] = (name, *r.witness) if name else r.witness
                break

    both = (("nabla", nabla), ("nabla_prime", nabla_prime))
    per = {name: {} for name, _ in both}
    for name, c in both:
        per[name]["eq1"] = check_torsion_free(c)
        per[name]["eq2"] = check_flat(c)
        per[name]["eq3"] = check_omega_compat(c, omega)
        per[name]["eq4"] = check_square_zero(c)
    for eq in ("eq1", "eq2", "eq3", "eq4"):
        record(eq, [(name, per[name][eq]) for name, _ in both])
    record("eq5", [(None, check_pair(nabla, nabla_prime))])
    record("eq6", [(None, check_pair_transposed(nabla, nabla_prime))])
    record("eq7", [(None, check_anticommute(nabla, nabla_prime))])

    internal = []
    for name, _ in both:
        if all(per[name][e] for e in ("eq1", "eq2", "eq3")) and not per[name]["eq4"]:
            internal.append(f"eq4 fails for {name} although eqs 1-3 hold")
    if all(flags[e] for e in ("eq1", "eq2", "eq3", "eq4", "eq5")):
        internal += [f"{e} fails although eqs 1-5 hold" for e in ("eq6", "eq7") if not flags[e]]
    return ValidationReport(flags, witnesses, tuple(internal))


@dataclass(frozen=True)
class AffineSymplecticData:
    """A validated triple (nabla, nabla', omega); construction runs every check."""

    nabla: Connection
    nabla_prime: Connection
    omega: SymplecticForm
    report: ValidationReport = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        omega = self.omega if isinstance(self.omega, SymplecticForm) else SymplecticForm(self.omega)
        object.__setattr__(self, "omega", omega)
        report = check_data(self.nabla, self.nabla_prime, omega)
        if report.internal_errors:
            raise InternalError("; ".join(report.internal_errors))
        if not report.valid:
            raise ValidationError(report)
        object.__setattr__(self, "report", report)

    @property
    def dim(self) -> int:
        return self.nabla.dim


def validate_data(nabla: Connection, nabla_prime: Connection, omega) -> AffineSymplecticData:
    return AffineSymplecticData(nabla, nabla_prime, omega)


# ---------------------------------------------------------------------------
# JSON data files


def _encode(q: Fraction):
    return q.numerator if q.denominator == 1 else la.format_rational(q)


def data_to_json(data: AffineSymplecticData) -> dict:
    return {
        "dim": data.dim,
        "nabla": [[[_encode(q) for q in row] for row in plane] for plane in data.nabla.coeffs],
        "nabla_prime": [[[_encode(q) for q in row] for row in plane] for plane in data.nabla_prime.coeffs],
        "omega": [[_encode(q) for q in row] for row in data.omega.matrix],
    }


def parse_data(obj: Any) -> tuple[Connection, Connection, SymplecticForm]:
    """Parse the JSON data layout into raw (unvalidated) objects."""
    if not isinstance(obj, Mapping):
        raise InputError("data file must hold a JSON object")
    missing = [k for k in ("dim", "nabla", "nabla_prime", "omega") if k not in obj]
    if missing:
        raise InputError(f"data file is missing keys: {', '.join(missing)}")
    m = obj["dim"]
    if not isinstance(m, int) or isinstance(m, bool) or m <= 0:
        raise InputError(f"dim must be a positive integer, got {m!r}")

    def shaped(value, depth, what):
        if depth == 0:
            return value
        if not isinstance(value, list) or len(value) != m:
            raise InputError(f"{what} must be a nested list of shape {'x'.join([str(m)] * depth)}")
        return [shaped(v, depth - 1, what) for v in value]

    nabla = Connection(shaped(obj["nabla"], 3, "nabla"))
    nabla_prime = Connection(shaped(obj["nabla_prime"], 3, "nabla_prime"))
    omega = SymplecticForm(shaped(obj["omega"], 2, "omega"))
    return nabla, nabla_prime, omega


def load_data_file(path: str | Path) -> tuple[Connection, Connection, SymplecticForm]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return parse_data(obj)
