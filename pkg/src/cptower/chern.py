"""Chern-class arithmetic for the bundles that feed tower stages.

Everything here manipulates Chern classes as reduced polynomials over a base
presentation: Whitney sums of line bundles, twisting a rank-2 bundle by a
line bundle, the mod-2 normalization of c_1, and the hyperplane-complement
construction behind the Milnor hypersurfaces.  A small splitting-principle
expansion is included purely as an independent oracle for the twist
formulas; the tests play the two against each other on random inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .polyring import Monomial, Poly
from .towers import RingPresentation, Stage, TowerSpec, presentation


class BundleError(ValueError):
    """Malformed bundle descriptor or unsupported operation."""


def _is_cp3(base: RingPresentation) -> bool:
    if base.caps != (3,):
        return False
    return base.relations[0] == Poly(1, {(4,): 1})


@dataclass(frozen=True)
class BundleDescriptor:
    """A complex vector bundle over a tower stage, up to its Chern data.

    ``chern`` lists c_1..c_rank as polynomials over the base presentation's
    generators; they are stored in normal form (the constructor reduces
    them).  ``alpha`` is an optional Z/2 tag completing (c_1, c_2) to a
    classification of rank-2 bundles over CP^3; it is recorded data only,
    nothing here ever computes it, and it is forced to 0 whenever c_1 is
    odd.
    """

    base: RingPresentation
    rank: int
    chern: tuple[Poly, ...]
    alpha: int | None = None

    def __post_init__(self):
        if self.rank < 1:
            raise BundleError("rank must be positive")
        if len(self.chern) != self.rank:
            raise BundleError(
                f"rank {self.rank} bundle needs {self.rank} chern classes, "
                f"got {len(self.chern)}"
            )
        reduced = []
        for i, c in enumerate(self.chern, start=1):
            if c.nvars != self.base.ngens:
                raise BundleError(
                    f"chern class {i} has {c.nvars} generators, base has "
                    f"{self.base.ngens}"
                )
            r = self.base.normal_form(c)
            if not r.is_homogeneous(i):
                raise BundleError(
                    f"chern class {i} must be homogeneous of cohomological "
                    f"degree {2 * i} after reduction"
                )
            reduced.append(r)
        object.__setattr__(self, "chern", tuple(reduced))
        if self.alpha is not None:
            if self.alpha not in (0, 1):
                raise BundleError("alpha must be 0 or 1")
            if self.rank != 2:
                raise BundleError("alpha tag only applies to rank-2 bundles")
            if not _is_cp3(self.base):
                raise BundleError("alpha tag only applies over CP^3")
            if self.alpha == 1 and _c1_is_odd(self.chern[0]):
                raise BundleError("alpha is forced to 0 when c1 is odd")

    @property
    def c1(self) -> Poly:
        return self.chern[0]

    def to_json(self) -> dict:
        return {
            "rank": str(self.rank),
            "chern": [c.to_json() for c in self.chern],
            "alpha": None if self.alpha is None else str(self.alpha),
        }


def _c1_is_odd(c1: Poly) -> bool:
    return any(c % 2 for c in c1.terms.values())


def tensor_line(xi: BundleDescriptor, gamma_c1: Poly) -> BundleDescriptor:
    """Twist a rank-2 bundle by the line bundle with first Chern class
    ``gamma_c1``:

        c_1' = c_1 + 2 t,    c_2' = t^2 + t c_1 + c_2,   t = c_1(gamma).

    The projectivization is unchanged by the twist, so the alpha tag rides
    along untouched.
    """
    if xi.rank != 2:
        raise BundleError("tensor_line expects a rank-2 bundle")
    t = xi.base.normal_form(gamma_c1)
    if not t.is_homogeneous(1):
        raise BundleError("line-bundle class must be homogeneous of degree 2")
    c1, c2 = xi.chern
    new_c1 = c1 + 2 * t
    new_c2 = t * t + t * c1 + c2
    return BundleDescriptor(
        base=xi.base, rank=2, chern=(new_c1, new_c2), alpha=xi.alpha
    )


def whitney_sum_of_lines(
    base: RingPresentation, c1s: Sequence[Poly]
) -> BundleDescriptor:
    """Sum of line bundles; c_i is the i-th elementary symmetric polynomial
    of the line classes."""
    if not c1s:
        raise BundleError("whitney sum of an empty list of line bundles")
    roots = []
    for i, c in enumerate(c1s, start=1):
        r = base.normal_form(c)
        if not r.is_homogeneous(1):
            raise BundleError(
                f"line class {i} must be homogeneous of degree 2 (or zero)"
            )
        roots.append(r)
    # elementary symmetric functions by the usual one-root-at-a-time update
    elems = [Poly.constant(base.ngens, 1)] + [
        Poly.zero(base.ngens) for _ in roots
    ]
    for r in roots:
        for i in range(len(roots), 0, -1):
            elems[i] = elems[i] + r * elems[i - 1]
    return BundleDescriptor(base=base, rank=len(roots), chern=tuple(elems[1:]))


def normalize_c1(xi: BundleDescriptor) -> tuple[BundleDescriptor, Poly]:
    """Twist so that every coordinate of c_1 lands in {0, 1}.

    Returns the twisted descriptor together with the line class used, so a
    caller can report how c_2 moved.  Requires c_1 to be a linear form in
    the generators (true for every bundle this package constructs).
    """
    if xi.rank != 2:
        raise BundleError("normalize_c1 expects a rank-2 bundle")
    g = xi.base.ngens
    coords = [0] * g
    for mono, coeff in xi.c1.terms.items():
        if sum(mono) != 1:
            raise BundleError("c1 must be a linear form in the generators")
        coords[mono.index(1)] = coeff
    twist_terms: dict[Monomial, int] = {}
    for idx, s in enumerate(coords):
        t = -((s - (s % 2)) // 2)  # s + 2t lands in {0, 1}
        if t:
            exps = [0] * g
            exps[idx] = 1
            twist_terms[tuple(exps)] = t
    twist = Poly(g, twist_terms)
    return tensor_line(xi, twist), twist


def dual_complement_of_tautological(i: int, j: int) -> TowerSpec:
    """Tower description of the bidegree-(1,1) hypersurface in CP^i x CP^j.

    Realized as the projectivization, over CP^i, of the rank-j complement
    of the tautological line bundle inside a trivial bundle.  In terms of
    the hyperplane generator x of the base, the complement's total Chern
    class is 1 + x + x^2 + ... truncated at rank j and reduced mod x^(i+1).
    """
    if i < 1:
        raise BundleError("base exponent must be at least 1")
    if i > j:
        raise BundleError(f"need i <= j, got ({i}, {j})")
    if j < 2:
        raise BundleError(
            f"({i}, {j}) is degenerate: the rank-{j} complement projectivizes "
            "to a point fiber"
        )
    base_stage = Stage(fiber_dim=i, chern=(Poly.zero(0),) * (i + 1))
    chern = []
    for q in range(1, j + 1):
        chern.append(Poly(1, {(q,): 1}) if q <= i else Poly.zero(1))
    fiber_stage = Stage(fiber_dim=j - 1, chern=tuple(chern))
    return TowerSpec(stages=(base_stage, fiber_stage))


def splitting_oracle_tensor() -> tuple[Poly, Poly]:
    """Splitting-principle derivation of the rank-2 twist formulas.

    Works in an auxiliary ring with formal line roots t1, t2 and twist s:
    expands (1 + t1 + s)(1 + t2 + s), then rewrites the degree-1 and
    degree-2 parts in terms of e1 = t1 + t2, e2 = t1 t2 and s by generic
    symmetric reduction (nothing here knows the closed-form answers).
    Returns (c1, c2) as polynomials in the variables (e1, e2, s).
    """
    t1 = Poly.variable(3, 0)
    t2 = Poly.variable(3, 1)
    s = Poly.variable(3, 2)
    one = Poly.constant(3, 1)
    total = (one + t1 + s) * (one + t2 + s)
    deg1 = Poly(3, {m: c for m, c in total.terms.items() if sum(m) == 1})
    deg2 = Poly(3, {m: c for m, c in total.terms.items() if sum(m) == 2})
    return _symmetric_reduce(deg1), _symmetric_reduce(deg2)


def _symmetric_reduce(p: Poly) -> Poly:
    """Rewrite a polynomial in (t1, t2, s), symmetric in t1 <-> t2, as a
    polynomial in (e1, e2, s) (same variable slots reused in that order).

    Classic elimination: repeatedly take the largest remaining t-monomial
    t1^a t2^b s^c (a >= b for the largest one, by symmetry), emit
    e1^(a-b) e2^b s^c, and subtract its expansion.  Terminates because the
    subtracted expansion only contains smaller monomials.
    """
    t1 = Poly.variable(3, 0)
    t2 = Poly.variable(3, 1)
    remaining = p
    out: dict[Monomial, int] = {}
    while remaining:
        (a, b, c), coeff = remaining.leading()
        if a < b:
            a, b = b, a
        out_mono = (a - b, b, c)
        out[out_mono] = out.get(out_mono, 0) + coeff
        expansion = (t1 + t2) ** (a - b) * (t1 * t2) ** b
        expansion = expansion * Poly(3, {(0, 0, c): coeff})
        remaining = remaining - expansion
    return Poly(3, out)


def projectivize(base_spec: TowerSpec, xi: BundleDescriptor) -> TowerSpec:
    """Append the projectivization of ``xi`` as a new stage."""
    if xi.base != presentation(base_spec):
        raise BundleError("bundle is not defined over the given base tower")
    if xi.rank < 2:
        raise BundleError("projectivizing a line bundle gives a point fiber")
    stage = Stage(fiber_dim=xi.rank - 1, chern=xi.chern)
    return TowerSpec(stages=base_spec.stages + (stage,))


def bundle_from_json(base: RingPresentation, data) -> BundleDescriptor:
    if not isinstance(data, dict):
        raise BundleError("bundle descriptor must be an object")
    extra = set(data) - {"rank", "chern", "alpha", "schema"}
    if extra:
        raise BundleError(f"unknown keys {sorted(extra)}")
    if "rank" not in data or "chern" not in data:
        raise BundleError("bundle descriptor needs 'rank' and 'chern'")
    try:
        rank = int(data["rank"])
    except (TypeError, ValueError):
        raise BundleError("rank must be an integer")
    chern_raw = data["chern"]
    if not isinstance(chern_raw, list):
        raise BundleError("chern must be a list of polynomials")
    chern = tuple(
        Poly.from_json(base.ngens, entry) for entry in chern_raw
    )
    alpha_raw = data.get("alpha")
    alpha = None if alpha_raw is None else int(alpha_raw)
    return BundleDescriptor(base=base, rank=rank, chern=chern, alpha=alpha)
