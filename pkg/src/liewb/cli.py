"""liewb command line.

Exit codes: 0 all requested verifications passed, 1 a verification failed
(diff commands only with --strict), 2 bad input, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import catalog
from .enveloping import (
    Enveloping,
    TooManyMonomials,
    casimir_search,
    symmetrize,
    verify_central,
)
from .extensions import (
    ExtensionAnsatz,
    VirtualCopyMap,
    casimir_from_virtual_copy,
    compare_ncpoly,
    solve_central_extension,
    verify_extended_realization,
    verify_virtual_copy,
)
from .lie import (
    NotEigenvector,
    SpanSolver,
    is_ideal,
    label_vector,
    lower_central_series,
    derived_series,
    verify_grading,
    verify_jacobi,
)
from .poisson import (
    RationalPowerCandidate,
    poisson_casimir_search,
    verify_functional_relations,
    verify_rational_invariant,
)
from .poly import ParseError, VarSet
from .weyl import DiffOp

OK, FAILED, BAD_INPUT, CAPPED = 0, 1, 2, 3


class CommandError(Exception):
    pass


def _emit(args, data: dict, text_lines: list[str]) -> None:
    if args.json:
        sys.stdout.write(json.dumps(data, indent=2, ensure_ascii=False) + "\n")
    else:
        for line in text_lines:
            print(line)


def _audit(msg: str) -> None:
    # timings go to stderr so the JSON stays byte-identical across runs
    print(msg, file=sys.stderr)


def _find(kind: str, **match):
    for n in catalog.names():
        fx = catalog.load(n)
        if fx.kind == kind and all(fx.get(k) == v for k, v in match.items()):
            return fx
    return None


def _split(text):
    if not text:
        return None
    return [t.strip() for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------------------


def cmd_verify_tables(args):
    jobs = []
    if args.expected:
        fx = catalog.expected_table(args.expected)
        jobs.append((args.algebra or fx["algebra"], fx))
    else:
        if args.algebra:
            raise CommandError("--algebra needs --expected")
        jobs = [("W", catalog.load("appendix_A")), ("multiplet_basis", catalog.load("appendix_B"))]
    out = {}
    lines = []
    dirty = False
    for alg, fx in jobs:
        names_map = None
        src = catalog.load(alg)
        if src.kind == "poisson-coordinates":
            names_map = src["coordinates"]
            L = catalog.algebra(src["algebra"], jobs=args.jobs)
        else:
            L = catalog.algebra(alg, jobs=args.jobs)
        rep = catalog.table_diff(L, fx, names_map)
        dirty |= not rep.clean
        out[fx.name] = {"algebra": alg, "computed_nonzero": len(L.sc), **rep.as_dict()}
        lines.append(
            f"{fx.name} vs {alg}: matched {rep.matched}, missing from table {len(rep.missing_from_paper)}, "
            f"missing from computation {len(rep.missing_from_computation)}, "
            f"value mismatches {len(rep.value_mismatch)}, duplicates {len(rep.duplicates)}, "
            f"unresolved {len(rep.unresolved)}"
        )
        for m in rep.value_mismatch:
            lines.append(f"  {m['lhs']}: printed {m['printed']}, computed {m['computed']}")
        for m in rep.missing_from_paper:
            lines.append(f"  {m['lhs']} = {m['computed']} (not printed)")
        for m in rep.missing_from_computation:
            lines.append(f"  {m['lhs']}: printed {m['printed']}, computed 0")
        for m in rep.unresolved:
            lines.append(f"  unresolved: {m['source']} ({m['reason']})")
    _emit(args, out, lines)
    return FAILED if (dirty and args.strict) else OK


def cmd_grading(args):
    gfx = _find("grading", algebra=args.algebra)
    if gfx is None:
        raise CommandError(f"no grading fixture for {args.algebra}")
    L, g = catalog.grading(gfx.name)
    rep = verify_grading(L, g)
    jac = verify_jacobi(L)
    series = lower_central_series(L)
    data = {
        "algebra": args.algebra,
        "dims": {str(d): n for d, n in sorted(rep.dims.items())},
        "violations": [list(v) for v in rep.violations],
        "jacobi_failures": len(jac),
        "lower_central_series": [d for d, _ in series],
    }
    ok = rep.ok and not jac
    lines = [
        f"{args.algebra}: subspace dims " + ", ".join(f"{d}:{n}" for d, n in sorted(rep.dims.items())),
        f"grading violations: {len(rep.violations)}",
        f"Jacobi failures: {len(jac)}",
        "lower central series dims: " + " > ".join(str(d) for d, _ in series),
    ]
    mfx = _find("multiplet-set")
    if mfx is not None and catalog.load(mfx["basis"]).get("base") == args.algebra:
        M = catalog.algebra(mfx["basis"])
        j0, j2, jm2 = (M.element(mfx[k]) for k in ("J0", "J2", "Jm2"))
        rel = {
            "[J0,J2]=2J2": M.bracket(j0, j2) == j2 * 2,
            "[J0,Jm2]=-2Jm2": M.bracket(j0, jm2) == jm2 * -2,
            "[J2,Jm2]=J0": M.bracket(j2, jm2) == j0,
        }
        sl2 = {mfx[k] for k in ("J0", "J2", "Jm2")}
        radical = [M.basis(n) for n in M.names if n not in sl2]
        ideal = is_ideal(M, radical)
        dseries = derived_series(M, radical)
        # derived algebra membership of the degree-zero singlets
        dim1, basis1 = series[1] if len(series) > 1 else (L.dim, [])
        solver = SpanSolver()
        for idx, x in enumerate(basis1):
            solver.add(x.coords, idx)
        singlets = [n for n in M.names if n.startswith("S0")]
        excluded = {}
        base_elems = {e["name"]: L.element(e["expr"]) for e in catalog.load(mfx["basis"])["elements"]}
        for n in singlets:
            _, residual = solver.express(base_elems[n].coords)
            excluded[n] = bool(residual)
        data["sl2"] = rel
        data["radical"] = {
            "dim": len(radical),
            "ideal": not ideal,
            "derived_series": dseries,
            "solvable": dseries[-1] == 0,
        }
        data["derived_algebra"] = {"dim": dim1, "singlets_excluded": excluded}
        ok = ok and all(rel.values()) and not ideal and dseries[-1] == 0
        lines += [
            "sl(2) relations: " + ", ".join(f"{k} {'ok' if v else 'FAILS'}" for k, v in rel.items()),
            f"radical: dim {len(radical)}, ideal {'yes' if not ideal else 'no'}, derived series "
            + " > ".join(map(str, dseries)),
            f"derived algebra: dim {dim1}; singlets outside it: "
            + ", ".join(n for n, v in excluded.items() if v),
        ]
    _emit(args, data, lines)
    return OK if ok else FAILED


def _nc_strings(ps):
    return [p.to_string() for p in ps]


def cmd_casimir_nc(args):
    L = catalog.algebra(args.algebra, jobs=args.jobs)
    res = casimir_search(
        L,
        args.max_degree,
        weight_element=args.weight_filter,
        restrict=_split(args.restrict_vars),
        max_monomials=args.max_monomials,
        jobs=args.jobs,
    )
    nontrivial = [p for p in res.reduced if p.degree() > 0]
    data = {
        "algebra": args.algebra,
        "max_degree": args.max_degree,
        "filters": res.filters,
        "monomials": res.monomials,
        "equations": res.equations,
        "dimension": len(res.basis),
        "basis": _nc_strings(res.basis),
        "reduced": _nc_strings(res.reduced),
        "trivial": not nontrivial,
    }
    _audit(f"casimir-nc {args.algebra} N={args.max_degree}: {res.monomials} monomials, "
           f"{res.equations} equations, {res.seconds:.2f} s, jobs={args.jobs}")
    lines = [
        f"{args.algebra}, degree <= {args.max_degree}: {res.monomials} monomials, {res.equations} equations",
        f"solution space dimension {len(res.basis)}",
    ] + [f"  {s}" for s in data["basis"]] + ["reduced generating set:"] + [f"  {s}" for s in data["reduced"]]
    _emit(args, data, lines)
    return OK


def cmd_casimir_poisson(args):
    S = catalog.poisson_structure(args.algebra)
    res = poisson_casimir_search(S, args.max_degree, _split(args.restrict_vars), args.max_monomials)
    data = {
        "algebra": args.algebra,
        "max_degree": args.max_degree,
        "restrict": res.restrict,
        "monomials": res.monomials,
        "equations": res.equations,
        "dimension": len(res.basis),
        "basis": [p.to_string() for p in res.basis],
    }
    _audit(f"casimir-poisson {args.algebra} N={args.max_degree}: {res.monomials} monomials, "
           f"{res.equations} equations, {res.seconds:.2f} s")
    lines = [
        f"{args.algebra}, degree <= {args.max_degree}: {res.monomials} unknown coefficients, {res.equations} equations",
        f"solution space dimension {len(res.basis)}",
    ] + [f"  {p}" for p in data["basis"]]
    _emit(args, data, lines)
    return OK


def _poisson_item(S, U, text):
    P = S.parse(text)
    bad = {}
    for i, X in enumerate(S.characteristic_fields()):
        v = X.apply(P)
        if v:
            bad[S.L.names[i]] = v.to_string()
    wit = verify_central(symmetrize(P, U, S.gen_of))
    return {
        "ok": not bad and not wit,
        "witnesses": bad,
        "symmetrized_central": not wit,
        "symmetrized_witnesses": {g: c.to_string() for g, c in wit},
    }


def verify_invariants(name: str) -> dict:
    """Machine check of one expected-invariants fixture (shared with the tests)."""
    fx = catalog.load(name)
    if fx.kind != "expected-invariants":
        raise CommandError(f"{name} is not an expected-invariants fixture")
    form = fx["form"]
    results = []
    if form == "enveloping":
        L = catalog.algebra(fx["algebra"])
        U = Enveloping(L)
        for it in fx["items"]:
            wit = verify_central(U.parse(it["expr"]))
            r = {"label": it["label"], "ok": not wit, "witnesses": {g: c.to_string() for g, c in wit}}
            if "corrected" in it:
                r["corrected_ok"] = not verify_central(U.parse(it["corrected"]))
            results.append(r)
    elif form == "realization":
        L = catalog.algebra(fx["algebra"])
        U = Enveloping(L)
        for it in fx["items"]:
            rep = catalog.verify_realization_invariant(U.parse(it["expr"]), L, it["label"])
            results.append(
                {
                    "label": it["label"],
                    "ok": rep.ok,
                    "realized": rep.realized.to_string(),
                    "witnesses": {g: c.to_string() for g, c in rep.commutators.items()},
                }
            )
    elif form == "polynomial":
        S = catalog.poisson_structure(fx["algebra"])
        U = Enveloping(S.L)
        for it in fx["items"]:
            r = _poisson_item(S, U, it["expr"])
            r = {"label": it["label"], **r}
            if "corrected" in it:
                r["corrected_ok"] = _poisson_item(S, U, it["corrected"])["ok"]
            results.append(r)
    elif form == "rational-power":
        S = catalog.poisson_structure(fx["algebra"])
        cands = {}
        for it in fx["items"]:
            c = RationalPowerCandidate(S.parse(it["numerator"]), it["base"], Fraction(it["exponent"]), it["label"])
            cands[it["label"]] = c
            rep = verify_rational_invariant(c, S)
            results.append(
                {
                    "label": it["label"],
                    "ok": rep.ok,
                    "witnesses": {S.L.names[i]: p.to_string() for i, p in rep.failures},
                }
            )
        if fx.get("relations"):
            pfx = catalog.load(fx["polynomials"])
            polys = {it["label"]: S.parse(it["expr"]) for it in pfx["items"]}
            fixed = {it["label"]: S.parse(it.get("corrected", it["expr"])) for it in pfx["items"]}
            bases = {c.base for c in cands.values() if c.exponent != 0}
            if len(bases) != 1:
                raise CommandError("candidates do not share one base variable")
            base = bases.pop()
            plain = verify_functional_relations(fx["relations"], polys, cands, base)
            repaired = verify_functional_relations(fx["relations"], fixed, cands, base)
            for r, r2 in zip(plain, repaired):
                out = {"label": "relation " + r["label"], "ok": r["ok"],
                       "witnesses": {} if r["ok"] else {"residual": r["residual"]}}
                if polys != fixed:
                    out["corrected_ok"] = r2["ok"]
                results.append(out)
    else:
        raise CommandError(f"unknown invariant form {form!r}")
    return {"fixture": name, "algebra": fx["algebra"], "form": form, "results": results,
            "passed": sum(r["ok"] for r in results), "total": len(results)}


def cmd_verify_invariants(args):
    data = verify_invariants(args.fixture)
    lines = [f"{args.fixture} ({data['form']} on {data['algebra']}): {data['passed']}/{data['total']} pass"]
    for r in data["results"]:
        extra = ""
        if "corrected_ok" in r:
            extra = f" (corrected form: {'pass' if r['corrected_ok'] else 'FAIL'})"
        lines.append(f"  {r['label']}: {'pass' if r['ok'] else 'FAIL'}{extra}")
        for g, w in r["witnesses"].items():
            lines.append(f"    [{g}, .] = {w}")
    _emit(args, data, lines)
    return OK if data["passed"] == data["total"] else FAILED


def cmd_central_ext(args):
    vfx = _find("virtual-copy-map", algebra=args.algebra)
    L = catalog.algebra(args.algebra)
    if args.pairs:
        pairs = [tuple(p.split(":")) for p in _split(args.pairs)]
        if any(len(p) != 2 for p in pairs):
            raise CommandError("--pairs expects X:Y,X:Y,...")
        ans = ExtensionAnsatz(L, pairs)
        expected = None
    elif vfx is not None:
        ans, _, _ = catalog.extension_ansatz(vfx.name)
        expected = vfx
    else:
        raise CommandError(f"no extension ansatz for {args.algebra}; give --pairs")
    sol = solve_central_extension(ans)
    data = {"algebra": args.algebra, "pairs": [list(p) for p in ans.pairs], **sol.as_dict()}
    ok = True
    if expected is not None:
        want = {u: expected.get("expected_solution", {}).get(u, u) for u in ans.unknowns}
        uvs_match = all(
            VarSet(ans.unknowns).parse(want[u]) == VarSet(ans.unknowns).parse(sol.expression(u))
            for u in ans.unknowns
        )
        data["expected_solution_matches"] = uvs_match
        data["printed_counts"] = expected.get("expected_counts", {})
        ok = uvs_match
    lines = [
        f"{sol.triples} Jacobi triples, {sol.nonzero_equations} nonzero equations, rank {sol.rank}",
        f"free parameters: {', '.join(sol.free) or 'none'}",
    ] + [f"  {u} = {sol.expression(u)}" for u in sol.unknowns]
    if expected is not None:
        pc = data["printed_counts"]
        lines.append(f"printed counts: {pc.get('equations')} equations, {pc.get('nonvanishing')} nonvanishing")
        lines.append(f"matches the expected family: {'yes' if ok else 'no'}")
    _emit(args, data, lines)
    return OK if ok else FAILED


def virtual_copy_report(name: str) -> dict:
    fx = catalog.load(name)
    if fx.kind != "virtual-copy-map":
        raise CommandError(f"{name} is not a virtual-copy-map fixture")
    E = catalog.algebra(name)
    U = Enveloping(E)
    m = VirtualCopyMap.parse(U, fx["map"], fx["central"])
    radical = [n for n in catalog.algebra(fx["algebra"]).names if n not in ("J0", "J2", "Jm2")]
    checks = verify_virtual_copy(m, radical)
    K = casimir_from_virtual_copy(m, fx.get("casimir_scale", "1"))
    wit = [(g, m.quotient(c)) for g, c in verify_central(K)]
    wit = [(g, c) for g, c in wit if c]
    data = {
        "fixture": name,
        "checks": checks,
        "casimir": K.to_string(),
        "casimir_degree": K.degree(),
        "casimir_central": not wit,
        "casimir_witnesses": {g: c.to_string() for g, c in wit},
    }
    if fx.get("expected_casimir"):
        exp = m.quotient(U.parse(fx["expected_casimir"]["expr"]))
        data["printed_casimir_diff"] = compare_ncpoly(K, exp)
    rfx = _find("extension-realization", algebra=name)
    if rfx is not None:
        ops = catalog.realization_ops(rfx.name)
        vs = next(iter(ops.values())).vs
        expected_op = DiffOp.parse(vs, rfx["expected_casimir"]) if rfx.get("expected_casimir") else None
        data["realization"] = {"fixture": rfx.name, **verify_extended_realization(E, ops, K, expected_op)}
    data["ok"] = checks["ok"] and not wit
    return data


def cmd_virtual_copy(args):
    data = virtual_copy_report(args.fixture)
    ch = data["checks"]
    lines = [
        f"(a) primed triple commutes with the radical: {'pass' if ch['a_commutes_with_radical']['ok'] else 'FAIL'}",
        f"(b) sl(2) relations at Z = 1: {'pass' if ch['b_sl2_relations']['ok'] else 'FAIL'}",
        f"(c) K' central: {'pass' if ch['c_casimir_central']['ok'] else 'FAIL'}",
        f"degree {data['casimir_degree']} Casimir (central: {'yes' if data['casimir_central'] else 'no'}):",
        f"  {data['casimir']}",
    ]
    d = data.get("printed_casimir_diff")
    if d is not None:
        lines.append(f"printed form: {'identical' if d['equal'] else 'differs'} ({d['matched']} terms agree)")
        for e in d["only_computed"]:
            lines.append(f"  only computed: {e['monomial']} coefficient {e['computed']}")
        for e in d["only_expected"]:
            lines.append(f"  only printed: {e['monomial']} coefficient {e['expected']}")
        for e in d["coefficient_mismatch"]:
            lines.append(f"  {e['monomial']}: computed {e['computed']}, printed {e['expected']}")
    r = data.get("realization")
    if r is not None:
        lines.append(f"realization {r['fixture']}: {len(r['mismatches'])} commutators differ from the abstract table")
        for mm in r["mismatches"]:
            lines.append(f"  [{mm['pair'][0]},{mm['pair'][1]}] realized {mm['realized']}, abstract {mm['abstract']}")
        for a, b in r["identical_operators"]:
            lines.append(f"  {a} and {b} are realized by the same operator")
        if "casimir_matches_expected" in r:
            lines.append(f"  realized Casimir equals the printed operator: {'yes' if r['casimir_matches_expected'] else 'no'}")
    _emit(args, data, lines)
    return OK if data["ok"] else FAILED


def cmd_realize(args):
    fx = catalog.load(args.fixture)
    if fx.kind == "extension-realization":
        L = catalog.algebra(fx["algebra"])
        table = catalog.realization_ops(args.fixture)
        ops = [table[n] for n in L.names]
    elif fx.kind in ("realized-algebra", "basis-change"):
        # basis changes inherit the realization of their base
        L = catalog.algebra(args.fixture, jobs=args.jobs)
        ops = L.realization
    else:
        ops = None
    if ops is None:
        raise CommandError(f"{args.fixture} carries no realization")
    U = Enveloping(L)
    op = catalog.realize(U.parse(args.expression), ops)
    data = {"fixture": args.fixture, "expression": args.expression, "operator": op.to_string()}
    _emit(args, data, [op.to_string()])
    return OK


def cmd_labels(args):
    mfx = catalog.load(args.algebra)
    if mfx.kind != "multiplet-set":
        raise CommandError(f"{args.algebra} is not a multiplet-set fixture")
    L, g, cartan, _ = catalog.multiplets(args.algebra)
    labels, failures = {}, {}
    for n in L.names:
        try:
            labels[n] = label_vector(L, L.basis(n), g, cartan)
        except (NotEigenvector, ValueError) as err:
            failures[n] = str(getattr(err, "residual", err))
    add_fail = []
    checked = 0
    for (i, j), res in sorted(L.sc.items()):
        a, b = L.names[i], L.names[j]
        if a not in labels or b not in labels:
            continue
        want = labels[a] + labels[b]
        for k in sorted(res):
            checked += 1
            got = labels.get(L.names[k])
            if got is None or got.astuple() != want.astuple():
                add_fail.append({"bracket": f"[{a},{b}]", "component": L.names[k],
                                 "expected": str(want), "label": str(got) if got else None})
    data = {
        "algebra": args.algebra,
        "labels": {n: str(v) for n, v in labels.items()},
        "not_eigenvectors": failures,
        "additivity_checked": checked,
        "additivity_failures": add_fail,
    }
    lines = [f"{n:8s} {v}" for n, v in labels.items()]
    lines += [f"{n:8s} not a common eigenvector: {w}" for n, w in failures.items()]
    lines.append(f"additivity: {checked - len(add_fail)}/{checked} bracket components consistent")
    lines += [f"  {f['bracket']} -> {f['component']}: {f['label']} vs {f['expected']}" for f in add_fail]
    _emit(args, data, lines)
    return OK if not failures and not add_fail else FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    common.add_argument("--max-monomials", type=int, default=2_000_000,
                        help="abort searches with more candidate monomials (default 2000000)")
    common.add_argument("--strict", action="store_true", help="nonempty diffs make the exit code 1")

    p = argparse.ArgumentParser(prog="liewb", description="Lie algebra invariants from polynomial vector fields")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-tables", parents=[common], help="diff recomputed brackets against printed tables")
    s.add_argument("--algebra", help="algebra fixture (default: the table's own)")
    s.add_argument("--expected", help="expected-table fixture (default: both appendices)")
    s.set_defaults(func=cmd_verify_tables)

    s = sub.add_parser("grading", parents=[common], help="grading, sl(2), radical and central series")
    s.add_argument("--algebra", default="W")
    s.set_defaults(func=cmd_grading)

    s = sub.add_parser("casimir-nc", parents=[common], help="Casimir search in the enveloping algebra")
    s.add_argument("--algebra", default="V2")
    s.add_argument("--max-degree", type=int, default=4)
    s.add_argument("--weight-filter", help="keep only monomials of weight zero for this element")
    s.add_argument("--restrict-vars", help="comma separated generators allowed in monomials")
    s.set_defaults(func=cmd_casimir_nc)

    s = sub.add_parser("casimir-poisson", parents=[common], help="polynomial Lie-Poisson Casimirs")
    s.add_argument("--algebra", default="V2_dual", help="poisson-coordinates fixture")
    s.add_argument("--max-degree", type=int, default=4)
    s.add_argument("--restrict-vars", help="comma separated coordinates allowed in monomials")
    s.set_defaults(func=cmd_casimir_poisson)

    s = sub.add_parser("verify-invariants", parents=[common], help="check an expected-invariants fixture")
    s.add_argument("--fixture", required=True)
    s.set_defaults(func=cmd_verify_invariants)

    s = sub.add_parser("central-ext", parents=[common], help="solve the Jacobi constraints of a central extension")
    s.add_argument("--algebra", default="V2")
    s.add_argument("--pairs", help="deformed brackets as X:Y,X:Y,... (default: the fixture's ansatz)")
    s.set_defaults(func=cmd_central_ext)

    s = sub.add_parser("virtual-copy", parents=[common], help="verify a virtual copy and build its Casimir")
    s.add_argument("--fixture", default="V2_extension")
    s.set_defaults(func=cmd_virtual_copy)

    s = sub.add_parser("realize", parents=[common], help="substitute a realization into an enveloping element")
    s.add_argument("--fixture", default="W")
    s.add_argument("--expression", required=True)
    s.set_defaults(func=cmd_realize)

    s = sub.add_parser("labels", parents=[common], help="label vectors and their additivity")
    s.add_argument("--algebra", default="multiplets", help="multiplet-set fixture")
    s.set_defaults(func=cmd_labels)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TooManyMonomials as err:
        print(f"liewb: {err}; raise --max-monomials to continue", file=sys.stderr)
        return CAPPED
    except KeyError as err:
        print(f"liewb: unknown name {err.args[0]!r}", file=sys.stderr)
        return BAD_INPUT
    except (CommandError, catalog.FixtureError, ParseError, ValueError) as err:
        print(f"liewb: {err}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
