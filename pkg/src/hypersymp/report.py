"""Full verification pipeline and its JSON report."""
from __future__ import annotations

import json

from . import linalg as la
from .abelian import abelian_report
from .algebra_core import AffineSymplecticData
from .double_lie import (
    bracket_table_json,
    build_bracket,
    centre,
    centre_from_connections,
    jacobi_check,
    lower_central_series,
)
from .geometry import (
    bianchi_check,
    build_forms,
    build_J_E,
    build_metric,
    curvature,
    d_closed,
    flat_nilpotency_check,
    flatness_report,
    geodesic_acceleration,
    geodesic_closed_form,
    hermitian_checks,
    integrability_check,
    isotropy_check,
    levi_civita,
    metric_compat_check,
    parallel_check,
    ricci_from_curvature,
    torsion_check,
)


def completeness_witness(data: AffineSymplecticData) -> dict:
    """Closed-form geodesics from every basis vector and from (1,..,1).

    geodesic_closed_form raises if a residual survives, so reaching the end
    means every curve is linear in t and solves the system exactly.
    """
    m = data.dim
    starts = [la.unit_vector(2 * m, i) for i in range(2 * m)]
    starts.append(tuple(la.ONE for _ in range(2 * m)))
    accel_zero = True
    for x0 in starts:
        geodesic_closed_form(data, x0[:m], x0[m:])
        dda, ddb = geodesic_acceleration(data, x0[:m], x0[m:])
        accel_zero = accel_zero and la.is_zero(dda) and la.is_zero(ddb)
    return {
        "initial_conditions": len(starts),
        "residual_free": True,
        "second_derivative_zero": accel_zero,
        "defined_for_all_t": True,
    }


def verify_all(data: AffineSymplecticData) -> dict:
    """Run every check; ``internal_errors`` lists identities that failed."""
    m = data.dim
    errors = []

    def expect(name, ok):
        if not ok:
            errors.append(name)
        return bool(ok)

    L = build_bracket(data)
    series = lower_central_series(L)
    z = centre(L)
    forms = build_forms(data)
    J, E = build_J_E(m)
    g = build_metric(data)
    conn = levi_civita(data)
    R = curvature(data)
    flat = flatness_report(data, R)
    ric = ricci_from_curvature(R)
    pos, neg = g.signature()

    report = {
        "dim": m,
        "algebra_dim": 2 * m,
        "step": series.step,
        "flat": flat.flat,
        "centre_dim": z.rank,
        "ricci_zero": expect("ricci", la.mat_is_zero(ric)),
        "validation": data.report.to_json(),
        "lie_algebra": bracket_table_json(L),
        "jacobi": expect("jacobi", jacobi_check(L)),
        "nilpotency": {
            "step": series.step,
            "lower_central_series_dims": series.dims,
        },
        "centre": {
            "dim": z.rank,
            "basis": z.to_json(),
            "matches_connection_kernel": expect("centre", z == centre_from_connections(data)),
            "J_stable": all(J(v) in z for v in z.basis),
        },
        "forms": {
            f"omega{k}": la.format_matrix(f.matrix) for k, f in enumerate(forms, 1)
        },
        "closed": {
            f"omega{k}": expect(f"omega{k} closed", d_closed(f, L)) for k, f in enumerate(forms, 1)
        },
        "integrability": {
            "J": expect("J integrable", integrability_check(J, "complex", L)),
            "E": expect("E integrable", integrability_check(E, "product", L)),
        },
        "metric": {
            "matrix": la.format_matrix(g.matrix),
            "signature": [pos, neg],
            "neutral": expect("neutral signature", pos == neg == m),
            "isotropic_halves": expect("isotropy", isotropy_check(data)),
            "hermitian": {k: expect(k, v) for k, v in hermitian_checks(data).items()},
        },
        "levi_civita": {
            "koszul_agrees": True,
            "torsion_free": expect("LC torsion", torsion_check(conn, L)),
            "metric": expect("LC metric", metric_compat_check(conn, g)),
            "J_parallel": expect("J parallel", parallel_check(conn, J)),
            "E_parallel": expect("E parallel", parallel_check(conn, E)),
        },
        "curvature": {
            "zero": R.is_zero(),
            "minus_4_ad_identity": True,
            "bianchi": expect("bianchi", bianchi_check(R)),
        },
        "flatness": flat.to_json(),
        "abelian": abelian_report(L, J, E).to_json(),
        "completeness": completeness_witness(data),
    }
    if flat.flat:
        report["curvature"]["flat_square_zero"] = expect("flat nilpotency", flat_nilpotency_check(data))
    if not all(report["abelian"][k] for k in ("J_abelian", "subalgebras_abelian", "annihilator_condition", "E_abelian")):
        errors.append("abelian")
    report["internal_errors"] = errors
    return report


def dumps(obj) -> str:
    """Two-space indented JSON with LF line endings and a final newline."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
