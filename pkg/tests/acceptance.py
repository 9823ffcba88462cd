"""Acceptance checks, one function per criterion.

Each check returns ``(passed, detail)``.  Run this file directly to print the
status lines without pytest:

    python3 tests/acceptance.py
"""

import json
import os
import sys
import time

from liewb import catalog
from liewb.cli import verify_invariants, virtual_copy_report
from liewb.enveloping import Enveloping, algebraic_independence, casimir_search, in_span, symmetrize, verify_central
from liewb.extensions import solve_central_extension
from liewb.lie import (
    NotEigenvector,
    from_realization,
    is_ideal,
    label_vector,
    lower_central_series,
    verify_grading,
)
from liewb.linalg import SpanSolver
from liewb.poisson import poisson_casimir_search

TITLES = {
    1: "Appendix A reproduction",
    2: "grading",
    3: "sl(2) and radical",
    4: "derived subalgebra",
    5: "V2 enveloping Casimirs",
    6: "V2 Poisson Casimirs",
    7: "rational-power invariants",
    8: "realization invariants",
    9: "central extension family",
    10: "virtual copy",
    11: "invariants of V0, V-1, V12 and subalgebras",
    12: "W triviality probe",
    13: "label vectors",
    14: "Appendix B diff",
    15: "property suites",
}

# criteria that cannot pass on the printed data; the reasons are in the notes
EXPECTED_RED = {1, 5, 6, 7, 13}


def criterion_1():
    t0 = time.perf_counter()
    fx = catalog.load("W")
    ops = catalog.realization_ops("W")
    W = from_realization([ops[g["name"]] for g in fx["generators"]], [g["name"] for g in fx["generators"]])
    rep = catalog.table_diff(W, catalog.load("appendix_A"))
    again = catalog.table_diff(W, catalog.load("appendix_A"))
    secs = time.perf_counter() - t0
    stable = rep.as_dict() == again.as_dict()
    ok = rep.matched >= 300 and stable and secs < 30
    return ok, (
        f"closure ok, {rep.matched} matched (needs 300; W has {len(W.sc)} nonzero brackets), "
        f"{len(rep.missing_from_paper) + len(rep.value_mismatch) + len(rep.unresolved)} discrepancies, "
        f"stable={stable}, {secs:.1f}s"
    )


def criterion_2():
    W, g = catalog.grading()
    rep = verify_grading(W, g)
    dims = tuple(rep.dims[d] for d in (-1, 0, 1, 2))
    return rep.ok and dims == (6, 17, 9, 7), f"dims {dims}, {len(rep.violations)} violations"


def criterion_3():
    W = catalog.algebra("W")
    J2, J0, Jm2 = W.element("L14"), W.element("L16 - L13"), W.element("L15")
    rels = [
        W.bracket(J0, J2) == J2 * 2,
        W.bracket(J0, Jm2) == Jm2 * -2,
        W.bracket(J2, Jm2) == J0,
    ]
    M = catalog.algebra("multiplet_basis")
    radical = [M.basis(n) for n in M.names if n not in ("J0", "J2", "Jm2")]
    ideal = not is_ideal(M, radical)
    return all(rels) and ideal and len(radical) == 36, f"relations {rels}, radical dim {len(radical)} ideal={ideal}"


def criterion_4():
    M = catalog.algebra("multiplet_basis")
    dim, basis = lower_central_series(M)[1]
    solver = SpanSolver()
    for k, x in enumerate(basis):
        solver.add(dict(x.coords), k)
    excluded = {n: not solver.contains({M.index[n]: 1}) for n in ("S01", "S02", "S03")}
    return dim == 36 and all(excluded.values()), f"dim [W,W] = {dim}, singlets excluded {excluded}"


def criterion_5():
    t0 = time.perf_counter()
    V2 = catalog.algebra("V2")
    res = casimir_search(V2, 4)
    secs = time.perf_counter() - t0
    U = Enveloping(V2)
    fx = catalog.load("inv_V2")
    printed = {it["label"]: U.parse(it["expr"]) for it in fx["items"]}
    contained = {k: in_span(p, res.basis) for k, p in printed.items()}
    central = {k: not verify_central(p) for k, p in printed.items()}
    best = [U.parse(it.get("corrected", it["expr"])) for it in fx["items"]]
    rank, _ = algebraic_independence(best)
    ok = all(contained.values()) and all(central.values()) and rank == 4 and secs < 60
    bad = sorted(k for k in printed if not (contained[k] and central[k]))
    return ok, (
        f"{len(res.basis)}-dim solution space in {secs:.1f}s; printed forms failing: {bad or 'none'}; "
        f"rank {rank} (with corrected K3)"
    )


def criterion_6():
    S = catalog.poisson_structure("V2_dual")
    full = poisson_casimir_search(S, 4)
    rad = poisson_casimir_search(S, 4, restrict=[f"x{i}" for i in range(4, 11)])
    solver = SpanSolver()
    for k, p in enumerate(full.basis):
        solver.add(dict(p.terms), k)
    U = Enveloping(S.L)
    fx = catalog.load("inv_V2_poisson")
    inside, bridged = {}, {}
    for it in fx["items"]:
        p = S.parse(it["expr"])
        inside[it["label"]] = solver.contains(dict(p.terms))
        bridged[it["label"]] = not verify_central(symmetrize(p, U, S.gen_of))
    counts = (full.monomials, rad.monomials)
    ok = counts == (1001, 330) and all(inside.values()) and all(bridged.values())
    bad = sorted(k for k in inside if not (inside[k] and bridged[k]))
    return ok, f"monomials {counts[0]}/{counts[1]}, {rad.equations} equations; printed forms failing: {bad or 'none'}"


def criterion_7():
    r = verify_invariants("inv_V2_rational")
    bad = [x["label"] for x in r["results"] if not x["ok"]]
    return not bad, f"{r['passed']}/{r['total']} pass; failing: {', '.join(bad) or 'none'}"


def criterion_8():
    r = verify_invariants("inv_V2_realization")
    V2 = catalog.algebra("V2")
    U = Enveloping(V2)
    fx = catalog.load("inv_V2")
    zero = {}
    for it in fx["items"][1:]:
        zero[it["label"]] = not catalog.realize(U.parse(it.get("corrected", it["expr"])), V2)
    zero["K3 printed"] = not catalog.realize(U.parse(fx["items"][2]["expr"]), V2)
    ok = r["passed"] == r["total"] == 6 and all(zero.values())
    return ok, f"Kh1..Kh6 {r['passed']}/{r['total']}; realize to zero: {zero}"


def criterion_9():
    ans, _, _ = catalog.extension_ansatz("V2_extension")
    sol = solve_central_extension(ans)
    want = {"a1": "0", "a2": "0", "a3": "-1/3*a4", "a4": "a4", "a5": "0", "a6": "0", "a7": "a7"}
    got = {u: sol.expression(u) for u in sol.unknowns}
    ok = got == want and sol.triples == 120
    return ok, f"{got}; {sol.triples} triples (printed 120), {sol.nonzero_equations} nonzero constraints"


def criterion_10():
    d = virtual_copy_report("V2_extension")
    E = catalog.algebra("V2_extension")
    diff = d["printed_casimir_diff"]
    ok = d["checks"]["ok"] and d["casimir_central"] and E.dim == 11
    return ok, (
        f"checks a/b/c {d['checks']['ok']}, K' central over {E.dim} generators; "
        f"printed form: {diff['matched']} terms agree, {len(diff['only_computed'])} extra, "
        f"{len(diff['only_expected'])} missing, {len(diff['coefficient_mismatch'])} differ"
    )


def criterion_11():
    names = ["inv_V0", "inv_Vm1", "inv_V12", "inv_sub1", "inv_sub2"]
    passed = total = 0
    vectors, witnessed = [], True
    for n in names:
        r = verify_invariants(n)
        again = verify_invariants(n)
        vectors.append([x["ok"] for x in r["results"]] == [x["ok"] for x in again["results"]])
        passed += r["passed"]
        total += r["total"]
        witnessed &= all(x["ok"] or x["witnesses"] for x in r["results"])
    ok = all(vectors) and witnessed and passed >= 0.8 * total
    return ok, f"{passed}/{total} pass ({100 * passed // total}%), stable={all(vectors)}, witnesses complete={witnessed}"


def criterion_12():
    t0 = time.perf_counter()
    W = catalog.algebra("W")
    res = casimir_search(W, 2)
    secs = time.perf_counter() - t0
    nonconstant = [p for p in res.basis if p.degree() > 0]
    detail = f"N=2: {len(res.basis)}-dim space ({len(nonconstant)} nonconstant), {res.monomials} monomials, {secs:.1f}s"
    if os.environ.get("LIEWB_STRETCH"):
        t1 = time.perf_counter()
        r3 = casimir_search(W, 3)
        detail += f"; N=3: {len(r3.basis)}-dim, {time.perf_counter() - t1:.0f}s"
    return not nonconstant and secs < 300, detail


def criterion_13():
    L, g, cartan, _ = catalog.multiplets()
    labels, fails = {}, []
    for n in L.names:
        try:
            labels[n] = label_vector(L, L.basis(n), g, cartan)
        except (NotEigenvector, ValueError):
            fails.append(n)
    checked = bad = 0
    for (i, j), res in L.sc.items():
        a, b = L.names[i], L.names[j]
        if a in labels and b in labels:
            for k in res:
                checked += 1
                got = labels.get(L.names[k])
                if got is None or got.astuple() != (labels[a] + labels[b]).astuple():
                    bad += 1
    ok = not fails and not bad
    return ok, f"{len(labels)}/{L.dim} labelled (fails: {fails or 'none'}), additivity {checked - bad}/{checked}"


def criterion_14():
    M = catalog.algebra("multiplet_basis")
    rep = catalog.table_diff(M, catalog.load("appendix_B"))
    stable = rep.as_dict() == catalog.table_diff(M, catalog.load("appendix_B")).as_dict()
    return rep.matched >= 200 and stable, (
        f"{rep.matched} matched, {len(rep.value_mismatch)} value mismatches, "
        f"{len(rep.missing_from_paper)} missing from table, {len(rep.missing_from_computation)} missing from computation"
    )


def criterion_15(outcomes=None):
    """``outcomes`` maps property test names to pass/fail from the current pytest session."""
    if not outcomes:
        import test_properties as tp

        outcomes = {}
        for name in sorted(dir(tp)):
            if name.startswith("test_"):
                try:
                    getattr(tp, name)()
                    outcomes[name] = True
                except Exception:
                    outcomes[name] = False
    bad = sorted(k for k, v in outcomes.items() if not v)
    return bool(outcomes) and not bad, f"{len(outcomes) - len(bad)}/{len(outcomes)} properties x 1000 cases; failing: {bad or 'none'}"


CHECKS = {n: globals()[f"criterion_{n}"] for n in TITLES}


def line(n, ok, detail):
    return f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {TITLES[n]}: {detail}"


if __name__ == "__main__":
    sys.path.insert(0, os.path.dirname(__file__))
    results = {}
    for n, fn in CHECKS.items():
        ok, detail = fn()
        results[n] = ok
        print(line(n, ok, detail), flush=True)
    if "--json" in sys.argv:
        print(json.dumps(results))
