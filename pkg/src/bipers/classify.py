"""Top-level classification predicates and the implication checker.

A module is classified along five membership questions: free,
hook-decomposable, satisfying the diagonal structure theorem, being a
product of two monoparameter modules, and projective dimension.  The middle
three coincide, so one decision procedure (hook decomposition) answers all
of them and its certificate doubles as the diagonal-form data.  The report
must always satisfy the implication diagram:

    free  ⇒  hook-decomposable = structure-theorem = product  ⇒  pd ≤ 1

with free ⇔ pd = 0; `check_implications` re-checks this on every report.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .bigraded import INF, Hook, Presentation, classification_box, minimize, stable_grid, validate
from .decomposition import GridMorphism, HookCertificate, grid_direct_sum, hook_decompose, hook_grid
from .resolution import BettiTable, betti_table


@dataclass
class ClassificationReport:
    free: bool
    hook_decomposable: bool
    structure_theorem: bool
    gamma_product: bool
    projective_dimension: int
    betti: BettiTable
    certificate: HookCertificate | None
    field_modulus: int
    box: tuple
    timings: dict = field(default_factory=dict)


def classify(pres: Presentation) -> ClassificationReport:
    """Full classification with certificate; deterministic up to timings."""
    pres = validate(pres)
    timings = {}
    t0 = time.perf_counter()

    t = time.perf_counter()
    mpres = minimize(pres)
    timings["minimize"] = time.perf_counter() - t

    t = time.perf_counter()
    bt = betti_table(pres)
    timings["betti"] = time.perf_counter() - t

    free = mpres.n_rels == 0
    pd = 0 if free else (1 if bt.total(2) == 0 else 2)

    t = time.perf_counter()
    cert = hook_decompose(pres)
    timings["decompose"] = time.perf_counter() - t
    hook = cert is not None

    timings["total"] = time.perf_counter() - t0
    report = ClassificationReport(
        free=free,
        hook_decomposable=hook,
        structure_theorem=hook,
        gamma_product=hook,
        projective_dimension=pd,
        betti=bt,
        certificate=cert,
        field_modulus=pres.p,
        box=classification_box(pres),
        timings=timings,
    )
    return report


def check_implications(report: ClassificationReport) -> bool:
    """True iff the report obeys the full implication diagram."""
    if not (report.structure_theorem == report.hook_decomposable == report.gamma_product):
        return False
    if report.free and not report.hook_decomposable:
        return False
    if report.hook_decomposable and report.projective_dimension > 1:
        return False
    if report.free != (report.projective_dimension == 0):
        return False
    return True


def verify_certificate(pres: Presentation, cert: HookCertificate) -> bool:
    """Check a certificate against a presentation from scratch.

    Rebuilds the canonical grid of the (minimized) presentation on its
    classification box and checks that the certificate's embedding maps the
    direct sum of its hook grids onto it naturally and bijectively at every
    degree.  Component matrices are interpreted in the canonical grid bases,
    which are deterministic.
    """
    pres = validate(pres)
    grid, box = stable_grid(minimize(pres))
    p = pres.p
    if cert.embedding.source.box != box or cert.embedding.source.p != p:
        return False
    expected_source = grid_direct_sum([hook_grid(h, p, box) for h in cert.hooks], p, box)
    if not (expected_source.dims == cert.embedding.source.dims).all():
        return False
    for a in range(box[0] + 1):
        for b in range(box[1] + 1):
            m = cert.embedding.at(a, b)
            if m.shape != (grid.dim(a, b), expected_source.dim(a, b)):
                return False
    rebased = GridMorphism(expected_source, grid, cert.embedding.comps)
    return rebased.is_natural() and rebased.is_isomorphism()


def _degree_json(d):
    return ["inf" if v == INF else int(v) for v in d]


def report_to_dict(report: ClassificationReport, include_timings: bool = True) -> dict:
    """JSON-ready dict with stable field names and deterministic ordering."""
    cert_json = None
    if report.certificate is not None:
        hooks = sorted(report.certificate.hooks, key=Hook.sort_key)
        diag = report.certificate.diagonal_presentation()
        cert_json = {
            "hooks": [{"p": list(h.p), "q": _degree_json(h.q)} for h in hooks],
            "smith_diagonal": {
                "field": diag.p,
                "gens": [list(g) for g in diag.gens],
                "rels": [list(r) for r in diag.rels],
                "coeffs": diag.coeffs.a.tolist(),
            },
        }
    out = {
        "field": report.field_modulus,
        "box": list(report.box),
        "free": report.free,
        "hook_decomposable": report.hook_decomposable,
        "structure_theorem": report.structure_theorem,
        "gamma_product": report.gamma_product,
        "projective_dimension": report.projective_dimension,
        "betti": {str(i): tri for i, tri in report.betti.as_triples().items()},
        "certificate": cert_json,
    }
    if include_timings:
        out["timings"] = report.timings
    return out


def report_to_json(report: ClassificationReport, include_timings: bool = True, indent=None) -> str:
    return json.dumps(
        report_to_dict(report, include_timings=include_timings),
        sort_keys=True,
        indent=indent,
        separators=(",", ": ") if indent else (",", ":"),
    )
