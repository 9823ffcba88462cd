"""Built-in fixtures and the glue between abstract results and printed tables.

Fixtures are JSON files listed in ``manifest.json``.  The directory defaults
to the copy shipped with the package; ``LIEWB_FIXTURES`` overrides it.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Sequence

from .enveloping import Enveloping, NCPoly
from .lie import Grading, LieAlgebra, Multiplet, change_of_basis, from_realization, subalgebra
from .poly import ParseError, Polynomial, VarSet, as_fraction
from .weyl import DiffOp

__all__ = [
    "Fixture",
    "FixtureError",
    "DiffReport",
    "fixtures_dir",
    "names",
    "load",
    "algebra",
    "grading",
    "multiplets",
    "poisson_structure",
    "expected_table",
    "realize",
    "verify_realization_invariant",
    "table_diff",
]

KINDS = {
    "realized-algebra",
    "abstract-algebra",
    "basis-change",
    "grading",
    "multiplet-set",
    "expected-table",
    "expected-invariants",
    "virtual-copy-map",
    "extension-realization",
    "poisson-coordinates",
}


class FixtureError(ValueError):
    def __init__(self, name: str, where: str, message: str):
        super().__init__(f"{name}: {where}: {message}")
        self.name = name
        self.where = where


@dataclass(frozen=True)
class Fixture:
    name: str
    kind: str
    data: dict = field(hash=False, compare=False)
    path: str = ""

    def __getitem__(self, key):
        return self.data[key]

    def get(self, key, default=None):
        return self.data.get(key, default)


def fixtures_dir() -> Path:
    env = os.environ.get("LIEWB_FIXTURES")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "fixtures"


def _manifest(directory: Path) -> dict:
    path = directory / "manifest.json"
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise FixtureError("manifest", str(path), "not found") from None
    except json.JSONDecodeError as err:
        raise FixtureError("manifest", f"{path}:{err.lineno}:{err.colno}", err.msg) from None


def names(directory: Path | str | None = None) -> list[str]:
    return list(_manifest(Path(directory) if directory else fixtures_dir()))


def load(name: str, directory: Path | str | None = None) -> Fixture:
    """Read and structurally validate one fixture."""
    d = Path(directory) if directory else fixtures_dir()
    return _load(str(d), name)


@lru_cache(maxsize=None)
def _load(directory: str, name: str) -> Fixture:
    man = _manifest(Path(directory))
    if name not in man:
        raise FixtureError(name, "manifest", "unknown fixture")
    entry = man[name]
    path = Path(directory) / entry["file"]
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as err:
        raise FixtureError(name, f"{path}:{err.lineno}:{err.colno}", err.msg) from None
    kind = data.get("kind")
    if kind != entry["kind"]:
        raise FixtureError(name, "kind", f"manifest says {entry['kind']!r}, file says {kind!r}")
    if kind not in KINDS:
        raise FixtureError(name, "kind", f"unknown kind {kind!r}")
    _validate(name, kind, data)
    return Fixture(name, kind, data, str(path))


def _require(name, data, keys):
    for k in keys:
        if k not in data:
            raise FixtureError(name, k, "missing field")


def _validate(name: str, kind: str, data: dict) -> None:
    if kind in ("realized-algebra", "extension-realization"):
        _require(name, data, ["variables", "generators"])
        params = data.get("parameters", [])
        vs = VarSet(list(data["variables"]) + list(params), params=params)
        seen = set()
        for pos, g in enumerate(data["generators"]):
            where = f"generators[{pos}]"
            if g.get("name") in seen:
                raise FixtureError(name, where, f"duplicate generator {g.get('name')!r}")
            seen.add(g.get("name"))
            try:
                DiffOp.parse(vs, g["op"])
            except (ParseError, KeyError) as err:
                raise FixtureError(name, where, str(err)) from None
    elif kind == "abstract-algebra":
        _require(name, data, ["basis", "brackets"])
    elif kind == "basis-change":
        _require(name, data, ["base"])
        if ("elements" in data) == ("members" in data):
            raise FixtureError(name, "elements", "exactly one of 'elements' or 'members' is required")
    elif kind == "grading":
        _require(name, data, ["algebra", "prefixes", "allowed"])
    elif kind == "multiplet-set":
        _require(name, data, ["basis", "multiplets", "cartan", "grading"])
        for pos, m in enumerate(data["multiplets"]):
            ms = tuple(sorted(mm for _, mm in m["members"]))
            if ms != Multiplet.EIGENVALUES.get(m["kind"]):
                raise FixtureError(name, f"multiplets[{pos}]", f"{m['kind']} with eigenvalues {ms}")
    elif kind == "expected-table":
        _require(name, data, ["algebra", "entries"])
        for pos, e in enumerate(data["entries"]):
            if "lhs" not in e or "rhs" not in e:
                raise FixtureError(name, f"entries[{pos}]", "unparsed entry")
            if len(e["lhs"]) != 2:
                raise FixtureError(name, f"entries[{pos}]", "lhs must be a pair")
            for _, c in e["rhs"]:
                try:
                    as_fraction(c)
                except (ValueError, ZeroDivisionError):
                    raise FixtureError(name, f"entries[{pos}]", f"bad coefficient {c!r}") from None
    elif kind == "expected-invariants":
        _require(name, data, ["algebra", "form", "items"])
        for pos, it in enumerate(data["items"]):
            key = "numerator" if data["form"] == "rational-power" else "expr"
            if key not in it or "label" not in it:
                raise FixtureError(name, f"items[{pos}]", f"needs 'label' and {key!r}")
    elif kind == "virtual-copy-map":
        _require(name, data, ["algebra", "central", "unknowns", "parameters", "map"])
        for k in ("J0", "J2", "Jm2"):
            if k not in data["map"]:
                raise FixtureError(name, "map", f"missing {k}")
    elif kind == "poisson-coordinates":
        _require(name, data, ["algebra", "coordinates"])


# ---------------------------------------------------------------------------
# builders


def _opvs(fx: Fixture) -> VarSet:
    params = fx.get("parameters", [])
    return VarSet(list(fx["variables"]) + list(params), params=params)


def realization_ops(name: str) -> dict[str, DiffOp]:
    fx = load(name)
    vs = _opvs(fx)
    return {g["name"]: DiffOp.parse(vs, g["op"]) for g in fx["generators"]}


_ALGEBRAS: dict[tuple[str, str], LieAlgebra] = {}


def algebra(name: str, jobs: int = 1) -> LieAlgebra:
    """Build (and cache) the Lie algebra a fixture describes."""
    key = (str(fixtures_dir()), name)
    if key in _ALGEBRAS:
        return _ALGEBRAS[key]
    fx = load(name)
    if fx.kind == "realized-algebra":
        ops = realization_ops(name)
        L = from_realization(list(ops.values()), list(ops), label=name, jobs=jobs)
    elif fx.kind == "abstract-algebra":
        L = LieAlgebra.from_json(fx.data, label=name)
    elif fx.kind == "basis-change":
        base = algebra(fx["base"], jobs)
        if "elements" in fx.data:
            els = [base.element(e["expr"]) for e in fx["elements"]]
            nm = [e["name"] for e in fx["elements"]]
            if len(els) == base.dim:
                L = change_of_basis(base, els, nm, label=name)
            else:
                L = subalgebra(base, els, nm, label=name)
        else:
            nm = list(fx["members"])
            L = subalgebra(base, [base.basis(n) for n in nm], nm, label=name)
    elif fx.kind == "virtual-copy-map":
        from .extensions import extend

        ans, values, params = extension_ansatz(name)
        L = extend(ans, values, params, label=name)
    else:
        raise FixtureError(name, "kind", f"{fx.kind} does not describe an algebra")
    _ALGEBRAS[key] = L
    return L


def extension_ansatz(name: str):
    """``(ansatz, values of the unknowns in the parameters, parameter names)``.

    The unknowns named by ``parameters`` become the parameters; the others take
    the values forced by the expected solution.
    """
    from .extensions import ExtensionAnsatz

    fx = load(name)
    base = algebra(fx["algebra"])
    unknowns = [u["name"] for u in fx["unknowns"]]
    ans = ExtensionAnsatz(base, [tuple(u["pair"]) for u in fx["unknowns"]], unknowns, fx["central"])
    params = list(fx["parameters"])
    rename = {u: p for p, u in fx["parameters"].items()}
    uvs = VarSet(unknowns)
    pvs = VarSet(params, params=params)
    values = {}
    for u in unknowns:
        if u in rename:
            values[u] = rename[u]
            continue
        expr = uvs.parse(fx.get("expected_solution", {}).get(u, "0"))
        out = pvs.zero()
        for exps, c in expr.terms.items():
            mono = pvs.one().scale(c)
            for var, e in zip(unknowns, exps):
                if e:
                    if var not in rename:
                        raise FixtureError(name, "expected_solution", f"{u} depends on non-parameter {var}")
                    mono = mono * pvs.var(rename[var]) ** e
            out = out + mono
        values[u] = out.to_string()
    return ans, values, params


def grading(name: str = "W_grading") -> tuple[LieAlgebra, Grading]:
    fx = load(name)
    L = algebra(fx["algebra"])
    return L, Grading.from_prefixes(L, fx["prefixes"], fx["allowed"])


def prefix_grading(L: LieAlgebra, spec: Mapping[str, Sequence[str]]) -> Grading:
    """Grading from ``{degree: [name prefixes]}`` (longest prefix wins)."""
    table = sorted(((p, int(d)) for d, ps in spec.items() for p in ps), key=lambda t: -len(t[0]))
    degrees = {}
    for i, n in enumerate(L.names):
        for p, d in table:
            if n.startswith(p):
                degrees[i] = d
                break
        else:
            raise ValueError(f"no degree for {n}")
    return Grading(degrees, tuple(sorted(int(d) for d in spec)))


def multiplets(name: str = "multiplets"):
    """``(algebra, grading, cartan elements, [Multiplet])``."""
    fx = load(name)
    L = algebra(fx["basis"])
    g = prefix_grading(L, fx["grading"])
    cartan = [L.element(c) for c in fx["cartan"]]
    mults = []
    for m in fx["multiplets"]:
        mults.append(
            Multiplet(
                m["kind"],
                m["subspace"],
                m["index"],
                [(L.element(n), mm) for n, mm in m["members"]],
                [n for n, _ in m["members"]],
            )
        )
    return L, g, cartan, mults


def poisson_structure(name: str = "V2_dual"):
    from .poisson import PoissonStructure

    fx = load(name)
    return PoissonStructure(algebra(fx["algebra"]), fx["coordinates"])


def expected_table(name: str) -> Fixture:
    fx = load(name)
    if fx.kind != "expected-table":
        raise FixtureError(name, "kind", "not an expected table")
    return fx


# ---------------------------------------------------------------------------
# realizations


def realize(p: NCPoly, r) -> DiffOp:
    """Substitute operators for generators, composing each word left to right.

    ``r`` is a LieAlgebra with a realization, or a list aligned with the basis.
    Parametric coefficients are embedded into the operators' variable set.
    """
    ops = r.realization if isinstance(r, LieAlgebra) else list(r)
    if ops is None:
        raise ValueError("algebra has no realization")
    if len(ops) != p.U.L.dim:
        raise ValueError("realization does not match the algebra")
    vs = ops[0].vs
    total = DiffOp.zero(vs)
    cache: dict[tuple[int, ...], DiffOp] = {(): DiffOp.identity(vs)}

    def word(w):
        hit = cache.get(w)
        if hit is None:
            hit = word(w[:-1]).compose(ops[w[-1]])
            cache[w] = hit
        return hit

    for w, c in sorted(p.terms.items()):
        coeff = c.embed(vs) if isinstance(c, Polynomial) else Polynomial.constant(vs, c)
        total = total + word(w).scale(coeff)
    return total


@dataclass
class RealizationReport:
    label: str
    realized: DiffOp
    commutators: dict[str, DiffOp]

    @property
    def ok(self) -> bool:
        return not self.commutators

    @property
    def vanishes(self) -> bool:
        return not self.realized


def verify_realization_invariant(p: NCPoly, L: LieAlgebra | None = None, label: str = "") -> RealizationReport:
    """``[realize(Y_i), realize(p)]`` for every generator; empty iff all vanish."""
    L = L or p.U.L
    K = realize(p, L)
    bad = {}
    for n, op in zip(L.names, L.realization):
        c = op.commutator(K)
        if c:
            bad[n] = c
    return RealizationReport(label, K, bad)


# ---------------------------------------------------------------------------
# table diffs


@dataclass
class DiffReport:
    matched: int = 0
    missing_from_paper: list[dict] = field(default_factory=list)
    missing_from_computation: list[dict] = field(default_factory=list)
    value_mismatch: list[dict] = field(default_factory=list)
    duplicates: list[dict] = field(default_factory=list)
    unresolved: list[dict] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not (
            self.missing_from_paper
            or self.missing_from_computation
            or self.value_mismatch
            or self.duplicates
            or self.unresolved
        )

    def as_dict(self) -> dict:
        return {
            "matched": self.matched,
            "missing_from_paper": self.missing_from_paper,
            "missing_from_computation": self.missing_from_computation,
            "value_mismatch": self.value_mismatch,
            "duplicates": self.duplicates,
            "unresolved": self.unresolved,
            "clean": self.clean,
        }


def _fmt(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _rhs_text(names: Sequence[str], coords: Mapping[int, object]) -> str:
    parts = [f"{_fmt(c)}*{names[k]}" for k, c in sorted(coords.items())]
    return " + ".join(parts) or "0"


def table_diff(L: LieAlgebra, expected: Fixture | Mapping, names_map: Mapping[str, str] | None = None) -> DiffReport:
    """Compare every nonzero bracket of ``L`` with the expected entries.

    An expected entry ``[X, Y] = rhs`` is oriented to the basis order of ``L``
    before comparison.  The recomputed table is authoritative; nothing is
    patched.  ``names_map`` renames expected symbols (e.g. dual coordinates
    to generators).
    """
    entries = expected["entries"] if not isinstance(expected, Fixture) else expected.data["entries"]
    rename = dict(names_map or {})
    report = DiffReport()
    seen: dict[tuple[int, int], dict] = {}
    for pos, e in enumerate(entries):
        a, b = (rename.get(x, x) for x in e["lhs"])
        src = e.get("source", "")
        if a not in L.index or b not in L.index or a == b:
            report.unresolved.append({"entry": pos, "source": src, "reason": "unknown or repeated generator"})
            continue
        i, j = L.index[a], L.index[b]
        coords: dict[int, Fraction] = {}
        bad = None
        for nm, c in e["rhs"]:
            nm = rename.get(nm, nm)
            if nm not in L.index:
                bad = nm
                break
            k = L.index[nm]
            coords[k] = coords.get(k, 0) + as_fraction(c)
        if bad is not None:
            report.unresolved.append({"entry": pos, "source": src, "reason": f"unknown generator {bad}"})
            continue
        if i > j:
            i, j = j, i
            coords = {k: -v for k, v in coords.items()}
        coords = {k: v for k, v in coords.items() if v}
        key = (i, j)
        if key in seen:
            same = seen[key]["coords"] == coords
            report.duplicates.append(
                {"entry": pos, "source": src, "first": seen[key]["source"], "consistent": same}
            )
            continue
        seen[key] = {"coords": coords, "source": src}
    for (i, j), res in sorted(L.sc.items()):
        lhs = f"[{L.names[i]},{L.names[j]}]"
        computed = {k: Fraction(v) for k, v in res.items()}
        if (i, j) not in seen:
            report.missing_from_paper.append({"lhs": lhs, "computed": _rhs_text(L.names, computed)})
            continue
        exp = seen[(i, j)]
        if exp["coords"] == computed:
            report.matched += 1
        else:
            report.value_mismatch.append(
                {
                    "lhs": lhs,
                    "source": exp["source"],
                    "printed": _rhs_text(L.names, exp["coords"]),
                    "computed": _rhs_text(L.names, computed),
                }
            )
    for (i, j), exp in sorted(seen.items()):
        if (i, j) in L.sc:
            continue
        lhs = f"[{L.names[i]},{L.names[j]}]"
        if exp["coords"]:
            report.missing_from_computation.append(
                {"lhs": lhs, "source": exp["source"], "printed": _rhs_text(L.names, exp["coords"])}
            )
        else:
            report.matched += 1
    return report
