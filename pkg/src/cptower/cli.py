"""Command-line front end.

Subcommands
-----------
ring          print a tower's quotient presentation (text or JSON)
iso           search for a ring-isomorphism certificate between two towers
sweep         run an all-pairs distinctness regression over a family list
chern         tensor / whitney-sum / normalization / hypersurface helpers
catalog-list  print the family ids a sweep would cover

Tower arguments accept three spellings everywhere: a catalog id
("Family:params", e.g. "Eta2:0,-3"), a base id ("CPn" or a Hirzebruch
surface "Hk", k any integer), or a path to a tower JSON file.  All emitted
JSON carries ``"schema": "cpt/1"`` and serializes integers as decimal
strings.  Exit codes: 0 success (for ``iso``: certificate found; for
``sweep``: zero failures), 1 negative verdict, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time

from . import __version__
from .catalog import (
    THEOREMS,
    FamilyId,
    _cached_search,
    build,
    families_for_theorem,
    sweep_distinctness,
)
from .chern import (
    BundleDescriptor,
    dual_complement_of_tautological,
    normalize_c1,
    tensor_line,
    whitney_sum_of_lines,
)
from .isosearch import search_all
from .polyring import Poly
from .towers import (
    RingPresentation,
    Stage,
    TowerSpec,
    presentation,
    towerspec_from_json,
    towerspec_to_json,
)

_SCHEMA = "cpt/1"


# -- tower argument resolution ---------------------------------------------


def _cp_spec(n: int) -> TowerSpec:
    return TowerSpec((
        Stage(n, tuple(Poly.zero(0) for _ in range(n + 1))),
    ))


def _hirzebruch_spec(k: int) -> TowerSpec:
    return TowerSpec((
        Stage(1, (Poly.zero(0), Poly.zero(0))),
        Stage(1, (Poly(1, {(1,): k}), Poly.zero(1))),
    ))


def resolve_ring_arg(text: str) -> TowerSpec:
    """Catalog id, base id (CPn / Hk), or path to a tower JSON file."""
    if os.path.sep in text or text.endswith(".json") or os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            return towerspec_from_json(json.load(fh))
    m = re.fullmatch(r"CP([0-9]+)", text)
    if m:
        return _cp_spec(int(m.group(1)))
    m = re.fullmatch(r"H(-?[0-9]+)", text)
    if m:
        return _hirzebruch_spec(int(m.group(1)))
    return build(FamilyId.parse(text))


def _resolve_presentation(text: str) -> RingPresentation:
    return presentation(resolve_ring_arg(text))


# -- polynomial text parsing / printing ------------------------------------


def _gen_names(g: int) -> list[str]:
    if g <= 4:
        return list("xyzw")[:g]
    return [f"x{i + 1}" for i in range(g)]


def _var_index(token: str, names: list[str]) -> int:
    if token in names:
        return names.index(token)
    m = re.fullmatch(r"x([0-9]+)", token)
    if m:
        idx = int(m.group(1)) - 1
        if 0 <= idx < len(names):
            return idx
    raise ValueError(f"unknown generator {token!r}")


def parse_poly_text(text: str, nvars: int, names=None) -> Poly:
    """Parse "3x^2 - x*y + 2" style input into an exact polynomial.

    Generators are x, y, z, w (or x1..xN for wider rings); '*' is optional,
    exponents use '^'.  Note "x2" names the second generator -- powers always
    need the caret.
    """
    names = names if names is not None else _gen_names(nvars)
    s = text.replace(" ", "").replace("*", "")
    if not s:
        raise ValueError("empty polynomial")
    total = Poly.zero(nvars)
    consumed = 0
    for chunk in re.findall(r"[+-]?[^+-]+|[+-]", s):
        consumed += len(chunk)
        sign = 1
        body = chunk
        if body and body[0] in "+-":
            sign = -1 if body[0] == "-" else 1
            body = body[1:]
        m = re.fullmatch(
            r"([0-9]+)?((?:[a-zA-Z][0-9]*(?:\^[0-9]+)?)*)", body
        )
        if not m or (not m.group(1) and not m.group(2)):
            raise ValueError(f"cannot parse term {chunk!r} in {text!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        exps = [0] * nvars
        for fac in re.finditer(
            r"([a-zA-Z][0-9]*)(?:\^([0-9]+))?", m.group(2) or ""
        ):
            exps[_var_index(fac.group(1), names)] += int(fac.group(2) or "1")
        total = total + Poly(nvars, {tuple(exps): sign * coeff})
    if consumed != len(s):
        raise ValueError(f"cannot parse polynomial {text!r}")
    return total


def _format_monomial(mono, names) -> str:
    factors = []
    for idx, e in enumerate(mono):
        if e == 1:
            factors.append(names[idx])
        elif e > 1:
            factors.append(f"{names[idx]}^{e}")
    return "*".join(factors) if factors else "1"


def format_poly(p: Poly, names=None) -> str:
    names = names if names is not None else _gen_names(p.nvars)
    if p.is_zero():
        return "0"
    parts = []
    for mono, coeff in p.sorted_terms(reverse=True):
        mag = abs(coeff)
        body = _format_monomial(mono, names)
        if body == "1":
            body = str(mag)
        elif mag != 1:
            body = f"{mag}*{body}"
        if not parts:
            parts.append(body if coeff > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(parts)


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


# -- subcommands -----------------------------------------------------------


def _cmd_ring(args) -> int:
    pres = _resolve_presentation(args.spec)
    names = _gen_names(pres.ngens)
    if args.json:
        payload = {"schema": _SCHEMA, **pres.to_json()}
        if args.poincare:
            payload["poincare"] = [str(b) for b in pres.poincare()]
        if args.basis is not None:
            payload["basis"] = [
                [str(e) for e in mono]
                for mono in pres.graded_basis(args.basis)
            ]
        _print_json(payload)
        return 0
    print("generators:", " ".join(names))
    print("caps:", " ".join(str(c) for c in pres.caps))
    for i, rel in enumerate(pres.relations, start=1):
        print(f"relation {i}: {format_poly(rel, names)}")
    if args.poincare:
        print("poincare:", " ".join(str(b) for b in pres.poincare()))
    if args.basis is not None:
        monos = pres.graded_basis(args.basis)
        body = " ".join(_format_monomial(m, names) for m in monos)
        print(f"basis[{args.basis}]: {body if body else '(none)'}")
    return 0


def _cmd_iso(args) -> int:
    pres_a = _resolve_presentation(args.a)
    pres_b = _resolve_presentation(args.b)
    if args.all:
        mats = search_all(pres_a, pres_b, args.bound)
        _print_json({
            "schema": _SCHEMA,
            "bound": str(args.bound),
            "count": str(len(mats)),
            "matrices": [
                [[str(e) for e in row] for row in mat] for mat in mats
            ],
        })
        return 0 if mats else 1
    verdict = _cached_search(
        pres_a, pres_b, args.bound, os.environ.get("CPT_CACHE_DIR")
    )
    _print_json({"schema": _SCHEMA, **verdict.to_json()})
    return 0 if verdict.found else 1


def _cmd_sweep(args) -> int:
    started = time.monotonic()
    body = sweep_distinctness(
        args.theorem,
        args.range,
        args.bound,
        jobs=args.jobs,
        cache_dir=os.environ.get("CPT_CACHE_DIR"),
    )
    report = {
        "schema": _SCHEMA,
        "meta": {
            "tool": "cpt",
            "version": __version__,
            "theorem": args.theorem,
            "range": str(args.range),
            "bound": str(args.bound),
            "jobs": str(args.jobs),
            "elapsed_seconds": f"{time.monotonic() - started:.3f}",
        },
        "rows": body["rows"],
        "summary": body["summary"],
    }
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0 if body["summary"]["failures"] == "0" else 1


def _cmd_chern_tensor(args) -> int:
    base = _resolve_presentation(args.base)
    names = _gen_names(base.ngens)
    xi = BundleDescriptor(
        base,
        2,
        (
            parse_poly_text(args.c1, base.ngens, names),
            parse_poly_text(args.c2, base.ngens, names),
        ),
        args.alpha,
    )
    twisted = tensor_line(xi, parse_poly_text(args.by, base.ngens, names))
    _print_json({"schema": _SCHEMA, **twisted.to_json()})
    return 0


def _cmd_chern_sum(args) -> int:
    base = _resolve_presentation(args.base)
    names = _gen_names(base.ngens)
    lines = [
        parse_poly_text(part, base.ngens, names)
        for part in args.lines.split(",")
    ]
    desc = whitney_sum_of_lines(base, lines)
    _print_json({"schema": _SCHEMA, **desc.to_json()})
    return 0


def _cmd_chern_milnor(args) -> int:
    spec = dual_complement_of_tautological(args.i, args.j)
    _print_json({"schema": _SCHEMA, **towerspec_to_json(spec)})
    return 0


def _cmd_chern_normalize(args) -> int:
    base = _resolve_presentation(args.base)
    names = _gen_names(base.ngens)
    xi = BundleDescriptor(
        base,
        2,
        (
            parse_poly_text(args.c1, base.ngens, names),
            parse_poly_text(args.c2, base.ngens, names),
        ),
        args.alpha,
    )
    normalized, twist = normalize_c1(xi)
    _print_json({
        "schema": _SCHEMA,
        **normalized.to_json(),
        "twist": twist.to_json(),
    })
    return 0


def _cmd_catalog_list(args) -> int:
    fams = families_for_theorem(args.theorem, args.range)
    if args.json:
        _print_json({
            "schema": _SCHEMA,
            "theorem": args.theorem,
            "range": str(args.range),
            "families": [str(f) for f in fams],
        })
        return 0
    for fid in fams:
        print(fid)
    return 0


# -- wiring ----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpt",
        description="Exact cohomology rings of projective towers: "
        "presentations, Chern arithmetic, isomorphism certificates.",
    )
    parser.add_argument(
        "--version", action="version", version=f"cpt {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ring = sub.add_parser(
        "ring", help="print the quotient presentation of a tower"
    )
    ring.add_argument("spec", help="catalog id, CPn / Hk, or JSON path")
    ring.add_argument(
        "--poincare", action="store_true", help="also print graded ranks"
    )
    ring.add_argument(
        "--basis", type=int, metavar="DEGREE",
        help="also print the reduced monomial basis in this degree",
    )
    ring.add_argument("--json", action="store_true", help="emit JSON")
    ring.set_defaults(func=_cmd_ring)

    iso = sub.add_parser(
        "iso", help="search for a graded ring isomorphism certificate"
    )
    iso.add_argument("a", help="source tower (catalog id, CPn / Hk, path)")
    iso.add_argument("b", help="target tower")
    iso.add_argument(
        "--bound", type=int, default=3,
        help="matrix entry bound (default 3)",
    )
    iso.add_argument(
        "--all", action="store_true",
        help="list every certificate within the bound",
    )
    iso.set_defaults(func=_cmd_iso)

    sweep = sub.add_parser(
        "sweep", help="all-pairs distinctness regression over a family list"
    )
    sweep.add_argument("--theorem", choices=THEOREMS, required=True)
    sweep.add_argument(
        "--range", type=int, default=4,
        help="family parameters run over [-N, N] (default 4)",
    )
    sweep.add_argument("--bound", type=int, default=3)
    sweep.add_argument("--out", help="write the JSON report here")
    sweep.add_argument(
        "--jobs", type=int, default=1, help="parallel worker processes"
    )
    sweep.set_defaults(func=_cmd_sweep)

    chern = sub.add_parser("chern", help="Chern-class helpers")
    csub = chern.add_subparsers(dest="chern_command", required=True)

    tensor = csub.add_parser(
        "tensor", help="twist a rank-2 bundle by a line bundle"
    )
    tensor.add_argument("--base", required=True)
    tensor.add_argument("--c1", required=True)
    tensor.add_argument("--c2", required=True)
    tensor.add_argument("--by", required=True, help="c1 of the line bundle")
    tensor.add_argument("--alpha", type=int, choices=(0, 1))
    tensor.set_defaults(func=_cmd_chern_tensor)

    sum_parser = csub.add_parser(
        "sum", help="whitney sum of line bundles"
    )
    sum_parser.add_argument("--base", required=True)
    sum_parser.add_argument(
        "--lines", required=True,
        help="comma-separated line classes, e.g. 'x,0,0'",
    )
    sum_parser.set_defaults(func=_cmd_chern_sum)

    milnor = csub.add_parser(
        "milnor",
        help="tower description of the bidegree-(1,1) hypersurface "
        "in CPi x CPj",
    )
    milnor.add_argument("i", type=int)
    milnor.add_argument("j", type=int)
    milnor.set_defaults(func=_cmd_chern_milnor)

    normalize = csub.add_parser(
        "normalize", help="twist a rank-2 bundle so c1 has {0,1} coordinates"
    )
    normalize.add_argument("--base", required=True)
    normalize.add_argument("--c1", required=True)
    normalize.add_argument("--c2", required=True)
    normalize.add_argument("--alpha", type=int, choices=(0, 1))
    normalize.set_defaults(func=_cmd_chern_normalize)

    cat = sub.add_parser(
        "catalog-list", help="print the family ids a sweep would cover"
    )
    cat.add_argument("--theorem", choices=THEOREMS, default="main")
    cat.add_argument("--range", type=int, default=4)
    cat.add_argument("--json", action="store_true")
    cat.set_defaults(func=_cmd_catalog_list)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except Exception as exc:  # single error funnel: message to stderr, exit 2
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
