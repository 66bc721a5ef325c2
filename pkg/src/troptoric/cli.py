"""Command-line front end.

Every input is a JSON file; rationals travel as ``"p/q"`` strings.  Output
is a short human-readable listing by default and JSON with ``--json``.
Exit status is 0 on success, 1 on a domain error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Optional, Sequence

from .exactlinalg import as_fraction
from .matroid import (
    Matroid,
    bergman_fan,
    characteristic_polynomial,
    chromatic_polynomial,
    flat_lattice,
    matroid_from_graph,
    matroid_from_matrix,
    reduced_characteristic_polynomial,
)
from .polyhedra import Fan, cone_contains, fan_is_complete, fan_is_simplicial, fan_validate
from .toric import (
    ToricCycle,
    ToricDivisor,
    ToricVariety,
    cartesian_product,
    deg_cycle,
    divisor_times_cycle,
    make_transverse,
    render_cycle,
    render_divisor,
)
from .tropical import (
    LaurentPolynomial,
    TropicalCycle,
    check_balancing,
    pairing_vector,
    stable_intersection,
    tropical_hypersurface,
)


class DomainError(Exception):
    """Bad input data (as opposed to a malformed command line)."""


# --------------------------------------------------------------------------
# JSON encoding
# --------------------------------------------------------------------------

def rat(x) -> str:
    return str(Fraction(x))


def fan_to_json(fan: Fan) -> dict:
    return {
        "rays": [list(r) for r in fan.rays],
        "maximalCones": [list(c) for c in fan.maximal_cones],
        "ambientDim": fan.ambient_dim,
    }


def fan_from_json(data: dict) -> Fan:
    try:
        return Fan(data["rays"], data["maximalCones"], data.get("ambientDim"))
    except KeyError as e:
        raise DomainError(f"fan JSON is missing {e}") from None


def cycle_to_json(Z: ToricCycle) -> dict:
    return {"codim": Z.codim, "terms": [{"cone": list(c), "coeff": rat(w)} for c, w in sorted(Z.terms.items())]}


def cycle_from_json(X: ToricVariety, data: dict) -> ToricCycle:
    terms: dict = {}
    for t in data.get("terms", []):
        key = tuple(sorted(t["cone"]))
        terms[key] = terms.get(key, Fraction(0)) + as_fraction(t["coeff"])
    return ToricCycle(X, data["codim"], terms)


def divisor_to_json(D: ToricDivisor) -> dict:
    return {"coefficients": [rat(c) for c in D.coefficients]}


def divisor_from_json(X: ToricVariety, data: dict) -> ToricDivisor:
    if "coefficients" in data:
        return ToricDivisor(X, [as_fraction(c) for c in data["coefficients"]])
    Z = cycle_from_json(X, data)
    if Z.codim != 1:
        raise DomainError("a divisor needs a codimension-one cycle")
    return ToricDivisor(X, {c[0]: w for c, w in Z.terms.items()})


def tropical_to_json(T: TropicalCycle) -> dict:
    out = fan_to_json(T.fan)
    out["weights"] = [int(w) if Fraction(w).denominator == 1 else rat(w) for w in T.weights]
    out["dim"] = T.dim
    return out


def tropical_from_json(data: dict, check: bool = True) -> TropicalCycle:
    fan = fan_from_json(data)
    weights = [as_fraction(w) for w in data.get("weights", [1] * len(fan.maximal_cones))]
    return TropicalCycle(fan, weights, dim=data.get("dim"), check=check)


def poly_from_json(data: dict, negate: bool = False) -> LaurentPolynomial:
    """``{"vars": n, "terms": [{"exp": [...], "coeff": "p/q"}]}``."""
    terms: dict = {}
    for t in data["terms"]:
        e = tuple(t["exp"])
        terms[e] = terms.get(e, Fraction(0)) + as_fraction(t.get("coeff", 1))
    n = data.get("vars", len(next(iter(terms))) if terms else 0)
    f = LaurentPolynomial(n, terms)
    return f.negate_exponents() if negate else f


def matroid_from_json(data: dict) -> Matroid:
    if "matrix" in data:
        return matroid_from_matrix([[as_fraction(x) for x in r] for r in data["matrix"]])
    if "graph" in data:
        return matroid_from_graph(data["graph"]["edges"])
    if "linear" in data or "realization" in data:
        return ideal_from_json(data).matroid()
    raise DomainError('matroid JSON needs "matrix" or "graph"')


def matroid_to_json(M: Matroid) -> dict:
    if M.edges is not None:
        return {"graph": {"edges": [list(e) for e in M.edges]}}
    return {"matrix": [[rat(x) for x in r] for r in M.realization]}


def ideal_from_json(data: dict, negate: bool = False):
    from .classrecovery import StructuredIdeal

    if "principal" in data:
        return StructuredIdeal.principal(poly_from_json(data["principal"], negate))
    if "linear" in data:
        lin = data["linear"]
        return StructuredIdeal.linear(lin["matrix"], lin["constants"])
    if "realization" in data:
        return StructuredIdeal.from_realization(data["realization"])
    if "tropical" in data:
        return StructuredIdeal.explicit(tropical_from_json(data["tropical"]))
    raise DomainError('ideal JSON needs one of "principal", "linear", "realization", "tropical"')


def _load(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise DomainError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise DomainError(f"{path} is not valid JSON: {e}") from None


def _variety(path: str) -> ToricVariety:
    return ToricVariety(fan_from_json(_load(path)))


# --------------------------------------------------------------------------
# Commands; each returns (human text, JSON-able object)
# --------------------------------------------------------------------------

def _fan_check(a):
    rep = fan_validate(fan_from_json(_load(a.fan)))
    text = "valid" if rep.ok else "invalid\n" + "\n".join(rep.violations)
    return text, {"valid": rep.ok, "violations": list(rep.violations)}


def _fan_flag(test):
    def run(a):
        fan = fan_from_json(_load(a.fan))
        rep = fan_validate(fan)
        if not rep.ok:
            raise DomainError("invalid fan: " + "; ".join(rep.violations))
        v = test(fan, check=False)
        return str(v).lower(), v
    return run


def _toric_intersect(a):
    X = _variety(a.variety)
    D = divisor_from_json(X, _load(a.divisor))
    Z = cycle_from_json(X, _load(a.cycle))
    out = divisor_times_cycle(D, Z)
    return render_cycle(out), cycle_to_json(out)


def _toric_deg(a):
    X = _variety(a.variety)
    d = deg_cycle(cycle_from_json(X, _load(a.cycle)))
    return rat(d), rat(d)


def _toric_transverse(a):
    X = _variety(a.variety)
    D = divisor_from_json(X, _load(a.divisor))
    out = make_transverse(D, a.avoid)
    return render_divisor(out), divisor_to_json(out)


def _toric_product(a):
    X = cartesian_product(_variety(a.first), _variety(a.second))
    data = fan_to_json(X.fan)
    return json.dumps(data), data


def _trop_hypersurface(a):
    T = tropical_hypersurface(poly_from_json(_load(a.poly), a.max))
    data = tropical_to_json(T)
    return json.dumps(data), data


def _trop_balance(a):
    T = tropical_from_json(_load(a.cycle), check=False)
    rep = check_balancing(T)
    if rep.balanced:
        return "balanced", {"balanced": True}
    cone = list(rep.cone)
    defect = [rat(x) for x in rep.defect]
    return f"not balanced at cone {cone} (defect {defect})", {"balanced": False, "cone": cone, "defect": defect}


def _trop_stable(a):
    T = stable_intersection(tropical_from_json(_load(a.first)), tropical_from_json(_load(a.second)), seed=a.seed)
    data = tropical_to_json(T)
    return json.dumps(data), data


def _trop_pairing(a):
    X = _variety(a.variety)
    T = tropical_from_json(_load(a.cycle))
    pv = pairing_vector(T, X, seed=a.seed)
    lines = [f"{list(c)}: {rat(v)}" for c, v in sorted(pv.items())]
    return "\n".join(lines), [{"cone": list(c), "value": rat(v)} for c, v in sorted(pv.items())]


def _matroid_flats(a):
    L = flat_lattice(matroid_from_json(_load(a.matroid)))
    by_rank = [[sorted(f) for f in fl] for fl in L.flats]
    text = "\n".join(f"rank {r}: {fl}" for r, fl in enumerate(by_rank))
    return text, by_rank


def _matroid_charpoly(a):
    M = matroid_from_json(_load(a.matroid))
    p = reduced_characteristic_polynomial(M) if a.reduced else characteristic_polynomial(M)
    return str(p), list(p.descending())


def _matroid_chromatic(a):
    data = _load(a.graph)
    g = data.get("graph", data)
    p = chromatic_polynomial(g["edges"], g.get("vertices"))
    return str(p), list(p.descending())


def _matroid_bergman(a):
    B = bergman_fan(matroid_from_json(_load(a.matroid)), building=a.building, dehomogenize_index=a.dehomogenize_index)
    data = tropical_to_json(B)
    text = f"rays: {[list(r) for r in B.fan.rays]}\ncones: {[list(c) for c in B.fan.maximal_cones]}"
    return text, data


def _class_from_trop(a):
    from .classrecovery import recover_class

    X = _variety(a.variety)
    res = recover_class(X, ideal_from_json(_load(a.ideal), a.max), seed=a.seed)
    data = cycle_to_json(res.cycle)
    data["solutionSpaceDim"] = res.solution_space_dim
    return render_cycle(res.cycle), data


def _class_from_cox(a):
    from .classrecovery import CoxPolynomial, class_from_tropical_cox

    X = _variety(a.variety)
    data = _load(a.poly)
    g = CoxPolynomial(X, tuple((as_fraction(t.get("coeff", 1)), tuple(t["exp"])) for t in data["terms"]))
    Z = class_from_tropical_cox(X, g, seed=a.seed)
    return render_cycle(Z), cycle_to_json(Z)


def _class_wonderful(a):
    from .classrecovery import StructuredIdeal, class_wonderful_compactification

    data = _load(a.matroid)
    if "matrix" in data:
        I = StructuredIdeal.from_realization(data["matrix"])
    else:
        I = ideal_from_json(data)
    B = bergman_fan(I.matroid(), building=a.building)
    X = ToricVariety(B.fan, check=False)
    f = poly_from_json(_load(a.poly), a.max) if a.poly else None
    override = tropical_from_json(_load(a.trop)) if a.trop else None
    Z = class_wonderful_compactification(X, I, f, trop_override=override, method=a.method, seed=a.seed)
    out = cycle_to_json(Z)
    out["fan"] = fan_to_json(B.fan)
    return render_cycle(Z), out


def _class_huh_katz(a):
    from .classrecovery import huh_katz_check

    data = _load(a.graph)
    g = data.get("graph", data)
    r = huh_katz_check(edges=g["edges"], seed=a.seed)
    out = {
        "a": list(r.a),
        "classCoefficients": [rat(c) for c in r.class_coefficients],
        "match": r.match,
        "logConcave": r.log_concave,
    }
    return str(r), out


def _cone_contains(a):
    v = cone_contains(_load(a.point), _load(a.generators))
    return str(v).lower(), v


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="displacement RNG seed (default 0)")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    p.add_argument("--max", action="store_true", default=argparse.SUPPRESS, help="inputs use the MAX convention")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="troptoric", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", action="store_true")
    parser.add_argument("--max", action="store_true")
    groups = parser.add_subparsers(dest="group", metavar="{fan,toric,trop,matroid,class,cone}", required=True)

    def group(name, help_text):
        g = groups.add_parser(name, help=help_text)
        return g.add_subparsers(dest="command", required=True)

    def command(sub, name, fn, help_text):
        c = sub.add_parser(name, help=help_text, parents=[common])
        c.set_defaults(func=fn)
        return c

    fan = group("fan", "fan validation and flags")
    for name, fn, h in (
        ("check", _fan_check, "validate a fan"),
        ("complete", _fan_flag(fan_is_complete), "is the fan complete"),
        ("simplicial", _fan_flag(fan_is_simplicial), "is the fan simplicial"),
    ):
        command(fan, name, fn, h).add_argument("fan")

    toric = group("toric", "cycles on toric varieties")
    c = command(toric, "intersect", _toric_intersect, "divisor times cycle")
    c.add_argument("--variety", required=True)
    c.add_argument("--divisor", required=True)
    c.add_argument("--cycle", required=True)
    c = command(toric, "deg", _toric_deg, "degree of a zero-cycle")
    c.add_argument("--variety", required=True)
    c.add_argument("--cycle", required=True)
    c = command(toric, "make-transverse", _toric_transverse, "equivalent divisor avoiding rays")
    c.add_argument("--variety", required=True)
    c.add_argument("--divisor", required=True)
    c.add_argument("--avoid", type=int, nargs="+", required=True)
    c = command(toric, "product", _toric_product, "fan of a product variety")
    c.add_argument("first")
    c.add_argument("second")

    trop = group("trop", "tropical cycles")
    command(trop, "hypersurface", _trop_hypersurface, "tropical hypersurface of a polynomial").add_argument("--poly", required=True)
    command(trop, "balance", _trop_balance, "check the balancing condition").add_argument("cycle")
    c = command(trop, "stable-intersect", _trop_stable, "stable intersection")
    c.add_argument("first")
    c.add_argument("second")
    c = command(trop, "pairing", _trop_pairing, "degrees against orbit closures")
    c.add_argument("--variety", required=True)
    c.add_argument("--cycle", required=True)

    mat = group("matroid", "matroids and Bergman fans")
    command(mat, "flats", _matroid_flats, "lattice of flats").add_argument("matroid")
    c = command(mat, "charpoly", _matroid_charpoly, "characteristic polynomial")
    c.add_argument("matroid")
    c.add_argument("--reduced", action="store_true")
    c = command(mat, "bergman", _matroid_bergman, "Bergman fan")
    c.add_argument("matroid")
    c.add_argument("--building", choices=("maximal", "minimal"), default="maximal")
    c.add_argument("--dehomogenize-index", type=int, default=0)
    command(mat, "chromatic", _matroid_chromatic, "chromatic polynomial of a graph").add_argument("graph")

    cls = group("class", "class recovery")
    c = command(cls, "from-trop", _class_from_trop, "class from tropical data")
    c.add_argument("--variety", required=True)
    c.add_argument("--ideal", required=True)
    c = command(cls, "from-cox", _class_from_cox, "class of a Cox-ring hypersurface")
    c.add_argument("--variety", required=True)
    c.add_argument("--poly", required=True)
    c = command(cls, "wonderful", _class_wonderful, "divisor class in a wonderful compactification")
    c.add_argument("--matroid", required=True)
    c.add_argument("--poly")
    c.add_argument("--trop")
    c.add_argument("--building", choices=("maximal", "minimal"), default="maximal")
    c.add_argument("--method", choices=("valuation", "stable"), default="valuation")
    command(cls, "huh-katz", _class_huh_katz, "characteristic polynomial versus class").add_argument("--graph", required=True)

    cone = group("cone", "cone membership")
    c = command(cone, "contains", _cone_contains, "is a point in the cone spanned by generators")
    c.add_argument("--point", required=True)
    c.add_argument("--generators", required=True)
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.group == "class" and args.command == "wonderful" and not (args.poly or args.trop):
        parser.print_usage(err)
        print("troptoric: error: class wonderful needs --poly or --trop", file=err)
        return 2
    try:
        text, data = args.func(args)
    except (DomainError, ValueError, TypeError, KeyError, ZeroDivisionError, NotImplementedError, RuntimeError) as e:
        msg = f"missing key {e}" if isinstance(e, KeyError) else str(e)
        print(f"error: {msg}", file=err)
        return 1
    if args.json:
        print(json.dumps(data, sort_keys=True), file=out)
    else:
        print(text, file=out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
