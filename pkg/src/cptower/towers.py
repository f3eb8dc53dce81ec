"""Quotient presentations of projective-tower cohomology rings.

A tower is built stage by stage: stage k projectivizes a rank-(n_k+1)
complex bundle over the stage-(k-1) total space and contributes one new
degree-2 generator x_k with the single relation

    x_k^(n_k+1) + c_1 x_k^(n_k) + c_2 x_k^(n_k-1) + ... + c_(n_k+1) = 0,

where c_i are the Chern classes of the stage bundle, polynomials in the
earlier generators.  (The generators are the duals of the stage tautological
classes, which is what makes all the signs come out positive.)  Iterating
gives H* of the tower as Z[x_1..x_m] modulo one such relation per stage.

Reduction to normal form rewrites x_k^(n_k+1) by the relation tail.  Each
rewrite strictly decreases the monomial order of :mod:`cptower.polyring`
(the tail involves lower powers of x_k and earlier generators only), so the
process terminates; and because the leading monomials x_k^(n_k+1) are powers
of pairwise distinct variables, the rewriting system is confluent -- the
normal form does not depend on the rewrite order.  ``dense_multiplication_
table`` below re-derives products with a deliberately different strategy and
the tests compare the two.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .polyring import Monomial, Poly, PolyJSONError, monomial_key


class TowerSpecError(ValueError):
    """Malformed tower description."""


class DualityError(ArithmeticError):
    """A pairing matrix that should have been unimodular was not."""


@dataclass(frozen=True)
class Stage:
    """One projectivization step.

    ``fiber_dim`` is n_k (the fiber is CP^{n_k}); ``chern`` lists the
    n_k + 1 Chern classes c_1..c_(n_k+1) of the stage bundle, polynomials in
    the k-1 earlier generators.
    """

    fiber_dim: int
    chern: tuple[Poly, ...]


@dataclass(frozen=True)
class TowerSpec:
    stages: tuple[Stage, ...]

    def __post_init__(self):
        for idx, stage in enumerate(self.stages, start=1):
            base_gens = idx - 1
            if stage.fiber_dim < 1:
                raise TowerSpecError(
                    f"stage {idx} fiber_dim must be at least 1 (fiber at least CP^1)"
                )
            rank = stage.fiber_dim + 1
            if len(stage.chern) != rank:
                raise TowerSpecError(
                    f"stage {idx} expects {rank} chern classes, got {len(stage.chern)}"
                )
            for i, c in enumerate(stage.chern, start=1):
                if c.nvars != base_gens:
                    raise TowerSpecError(
                        f"stage {idx} chern entry {i} must be a polynomial in "
                        f"{base_gens} generators, got {c.nvars}"
                    )
                if not c.is_homogeneous(i):
                    raise TowerSpecError(
                        f"stage {idx} chern entry {i} must be homogeneous of "
                        f"cohomological degree {2 * i}"
                    )

    @property
    def ngens(self) -> int:
        return len(self.stages)

    @property
    def real_dimension(self) -> int:
        return 2 * sum(s.fiber_dim for s in self.stages)


class RingPresentation:
    """Z[x_1..x_g] modulo one monic relation per generator.

    ``caps[k]`` is the largest surviving exponent of x_{k+1}; the reduced
    monomial basis is every exponent tuple below the caps and has
    prod(caps[k]+1) elements.  Instances are immutable (the only interior
    state is a memo table for monomial normal forms, which is a pure cache).
    """

    def __init__(self, caps: Sequence[int], relations: Sequence[Poly]):
        caps = tuple(int(n) for n in caps)
        relations = tuple(relations)
        g = len(caps)
        if len(relations) != g:
            raise ValueError("need one relation per generator")
        tails: list[list[tuple[Monomial, int]]] = []
        for k, (cap, rel) in enumerate(zip(caps, relations)):
            if cap < 1:
                raise ValueError(f"cap for generator {k + 1} must be >= 1")
            if rel.nvars != g:
                raise ValueError("relations must live in the full ambient ring")
            lead = [0] * g
            lead[k] = cap + 1
            lead_mono = tuple(lead)
            mono, coeff = rel.leading()
            if mono != lead_mono or coeff != 1:
                raise ValueError(
                    f"relation {k + 1} must be monic with leading monomial "
                    f"x_{k + 1}^{cap + 1}"
                )
            tails.append(
                [(m, c) for m, c in rel.terms.items() if m != lead_mono]
            )
        self.caps = caps
        self.relations = relations
        self.ngens = g
        self._tails = tails
        self._nf_memo: dict[Monomial, dict[Monomial, int]] = {}

    # -- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingPresentation):
            return NotImplemented
        return self.caps == other.caps and self.relations == other.relations

    def __hash__(self) -> int:
        return hash((self.caps, self.relations))

    def __repr__(self) -> str:
        return f"RingPresentation(caps={self.caps})"

    @property
    def top_degree(self) -> int:
        return 2 * sum(self.caps)

    @property
    def rank(self) -> int:
        r = 1
        for cap in self.caps:
            r *= cap + 1
        return r

    # -- normal form ------------------------------------------------------

    def _reduce_monomial(self, mono: Monomial) -> dict[Monomial, int]:
        """Normal form of a single monomial as a term dict.

        Rewrites the highest offending generator first; by confluence (see
        module docstring) any choice gives the same answer, and the dense
        oracle below double-checks that in the tests.
        """
        memo = self._nf_memo
        done = memo.get(mono)
        if done is not None:
            return done
        k = -1
        for idx in range(self.ngens - 1, -1, -1):
            if mono[idx] > self.caps[idx]:
                k = idx
                break
        if k < 0:
            result = {mono: 1}
            memo[mono] = result
            return result
        # mono = x_k^(cap+1) * rest ; replace the power by minus the tail
        rest = list(mono)
        rest[k] -= self.caps[k] + 1
        result: dict[Monomial, int] = {}
        for tail_mono, tail_coeff in self._tails[k]:
            shifted = tuple(r + t for r, t in zip(rest, tail_mono))
            for m, c in self._reduce_monomial(shifted).items():
                acc = result.get(m, 0) - tail_coeff * c
                if acc:
                    result[m] = acc
                else:
                    del result[m]
        memo[mono] = result
        return result

    def normal_form(self, p: Poly) -> Poly:
        """Unique representative supported on the reduced monomial basis."""
        if p.nvars != self.ngens:
            raise ValueError(
                f"polynomial has {p.nvars} generators, presentation has {self.ngens}"
            )
        acc: dict[Monomial, int] = {}
        for mono, coeff in p.terms.items():
            for m, c in self._reduce_monomial(mono).items():
                v = acc.get(m, 0) + coeff * c
                if v:
                    acc[m] = v
                else:
                    del acc[m]
        return Poly(self.ngens, acc)

    # -- graded structure -------------------------------------------------

    def graded_basis(self, degree: int) -> list[Monomial]:
        """Reduced-basis monomials of the given cohomological degree,
        ascending in the canonical order."""
        if degree < 0 or degree % 2:
            return []
        w = degree // 2
        out: list[Monomial] = []

        def walk(idx: int, remaining: int, prefix: tuple[int, ...]):
            if idx == self.ngens:
                if remaining == 0:
                    out.append(prefix)
                return
            upper = min(self.caps[idx], remaining)
            for e in range(upper + 1):
                walk(idx + 1, remaining - e, prefix + (e,))

        walk(0, w, ())
        out.sort(key=monomial_key)
        return out

    def poincare(self) -> tuple[int, ...]:
        """Ranks of the graded pieces in degrees 0, 2, ..., top."""
        # convolution of (1, 1, ..., 1) blocks, one per stage
        coeffs = [1]
        for cap in self.caps:
            new = [0] * (len(coeffs) + cap)
            for i, c in enumerate(coeffs):
                for j in range(cap + 1):
                    new[i + j] += c
            coeffs = new
        return tuple(coeffs)

    def top_monomial(self) -> Monomial:
        return tuple(self.caps)

    def graded_basis_all(self) -> list[Monomial]:
        """The full reduced basis, degree by degree."""
        out: list[Monomial] = []
        for degree in range(0, self.top_degree + 2, 2):
            out.extend(self.graded_basis(degree))
        return out

    def top_pairing_matrix(self, degree: int) -> list[list[int]]:
        """Pairing of degree ``degree`` against its complementary degree.

        Entry [i][j] is the coefficient of the top basis monomial in the
        product of the i-th basis monomial of ``degree`` with the j-th basis
        monomial of ``top_degree - degree``.  For these quotients the matrix
        is a Poincare-duality pairing and must be unimodular; a non-unit
        determinant raises :class:`DualityError`.
        """
        rows_basis = self.graded_basis(degree)
        cols_basis = self.graded_basis(self.top_degree - degree)
        top = self.top_monomial()
        matrix: list[list[int]] = []
        for bm in rows_basis:
            row = []
            for cm in cols_basis:
                prod = tuple(a + b for a, b in zip(bm, cm))
                row.append(self._reduce_monomial(prod).get(top, 0))
            matrix.append(row)
        if rows_basis and cols_basis:
            if len(rows_basis) != len(cols_basis):
                raise DualityError(
                    f"pairing in degree {degree} is not square "
                    f"({len(rows_basis)}x{len(cols_basis)})"
                )
            if matrix_det(matrix) not in (1, -1):
                raise DualityError(
                    f"pairing in degree {degree} has determinant "
                    f"{matrix_det(matrix)}, expected a unit"
                )
        return matrix

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "caps": [str(c) for c in self.caps],
            "relations": [rel.to_json() for rel in self.relations],
        }


def presentation(spec: TowerSpec) -> RingPresentation:
    """Build the iterated quotient presentation for a tower description.

    Chern classes are stored already reduced: each stage's classes are put
    in normal form in the presentation of the base below it before the
    relation is assembled.
    """
    g = spec.ngens
    caps: list[int] = []
    relations: list[Poly] = []
    base: RingPresentation | None = None
    for k, stage in enumerate(spec.stages):
        n = stage.fiber_dim
        reduced = []
        for c in stage.chern:
            reduced.append(base.normal_form(c) if base is not None else c)
        lead = [0] * g
        lead[k] = n + 1
        terms: dict[Monomial, int] = {tuple(lead): 1}
        for i, c in enumerate(reduced, start=1):
            shift = [0] * g
            shift[k] = n + 1 - i
            for mono, coeff in c.embed(g).terms.items():
                m = tuple(a + b for a, b in zip(mono, shift))
                v = terms.get(m, 0) + coeff
                if v:
                    terms[m] = v
                else:
                    del terms[m]
        caps.append(n)
        relations.append(Poly(g, terms))
        # presentation of the prefix tower, for normalizing the next stage
        prefix_caps = caps[: k + 1]
        prefix_rels = [
            _restrict(rel, k + 1) for rel in relations[: k + 1]
        ]
        base = RingPresentation(prefix_caps, prefix_rels)
    return RingPresentation(caps, relations)


def _restrict(p: Poly, nvars: int) -> Poly:
    """Drop unused trailing generators (they must not occur)."""
    terms = {}
    for mono, coeff in p.terms.items():
        if any(mono[nvars:]):
            raise ValueError("polynomial uses generators beyond the restriction")
        terms[mono[:nvars]] = coeff
    return Poly(nvars, terms)


# -- independent dense oracle ---------------------------------------------


def dense_multiplication_table(pres: RingPresentation) -> dict:
    """Full basis-times-basis multiplication table, derived independently.

    This deliberately avoids ``normal_form``: it reduces with the *smallest*
    offending monomial first, keeps no memo table, and walks the generators
    bottom-up.  Intended for towers of small total rank (the tests use it up
    to rank 8) as a cross-check that the rewriting strategy does not matter.
    Returns {(i, j): coefficient tuple over the basis} with i, j indexing
    the full basis in canonical order.
    """
    basis = pres.graded_basis_all()
    index = {m: i for i, m in enumerate(basis)}
    table = {}
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            prod = {tuple(a + b for a, b in zip(bi, bj)): 1}
            reduced = _reduce_smallest_first(pres, prod)
            vec = [0] * len(basis)
            for mono, coeff in reduced.items():
                vec[index[mono]] = coeff
            table[(i, j)] = tuple(vec)
    return table


def _reduce_smallest_first(pres: RingPresentation, terms: dict) -> dict:
    current = dict(terms)
    while True:
        offending = [
            m
            for m in current
            if any(e > cap for e, cap in zip(m, pres.caps))
        ]
        if not offending:
            return current
        mono = min(offending, key=monomial_key)
        coeff = current.pop(mono)
        # rewrite the *lowest* offending generator, unlike normal_form
        k = next(
            idx
            for idx in range(pres.ngens)
            if mono[idx] > pres.caps[idx]
        )
        rest = list(mono)
        rest[k] -= pres.caps[k] + 1
        for tail_mono, tail_coeff in pres._tails[k]:
            m = tuple(r + t for r, t in zip(rest, tail_mono))
            v = current.get(m, 0) - coeff * tail_coeff
            if v:
                current[m] = v
            else:
                current.pop(m, None)


# -- integer determinants --------------------------------------------------


def matrix_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a small integer matrix (Bareiss elimination)."""
    n = len(rows)
    if n == 0:
        return 1
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# -- JSON ------------------------------------------------------------------


def towerspec_to_json(spec: TowerSpec) -> dict:
    return {
        "stages": [
            {
                "fiber_dim": str(stage.fiber_dim),
                "chern": [c.to_json() for c in stage.chern],
            }
            for stage in spec.stages
        ]
    }


def towerspec_from_json(data) -> TowerSpec:
    """Parse a tower description, with stage-anchored error messages.

    Chern exponent vectors may mention any generator slot; a non-zero
    exponent on a generator at or above the stage's own is reported as e.g.
    ``stage 2 chern references generator 3``.
    """
    if not isinstance(data, dict):
        raise TowerSpecError("tower spec must be an object")
    extra = set(data) - {"stages", "schema"}
    if extra:
        raise TowerSpecError(f"unknown keys {sorted(extra)}")
    schema = data.get("schema")
    if schema is not None and schema != "cpt/1":
        raise TowerSpecError(f"unsupported schema {schema!r}")
    stages_raw = data.get("stages")
    if not isinstance(stages_raw, list) or not stages_raw:
        raise TowerSpecError("tower spec needs a non-empty 'stages' list")
    stages: list[Stage] = []
    for idx, raw in enumerate(stages_raw, start=1):
        if not isinstance(raw, dict):
            raise TowerSpecError(f"stage {idx} must be an object")
        unknown = set(raw) - {"fiber_dim", "chern"}
        if unknown:
            raise TowerSpecError(f"stage {idx}: unknown keys {sorted(unknown)}")
        if "fiber_dim" not in raw:
            raise TowerSpecError(f"stage {idx}: missing fiber_dim")
        try:
            n = int(raw["fiber_dim"])
        except (TypeError, ValueError):
            raise TowerSpecError(f"stage {idx}: fiber_dim must be an integer")
        chern_raw = raw.get("chern", [])
        if not isinstance(chern_raw, list):
            raise TowerSpecError(f"stage {idx}: chern must be a list")
        base_gens = idx - 1
        chern: list[Poly] = []
        for i, entry in enumerate(chern_raw, start=1):
            try:
                loose = _poly_from_json_loose(entry)
            except PolyJSONError as exc:
                raise TowerSpecError(f"stage {idx} chern entry {i}: {exc}")
            width, terms = loose
            for mono in terms:
                for gen_idx in range(base_gens, width):
                    if mono[gen_idx]:
                        raise TowerSpecError(
                            f"stage {idx} chern references generator {gen_idx + 1}"
                        )
            trimmed = {
                mono[:base_gens]
                if len(mono) >= base_gens
                else mono + (0,) * (base_gens - len(mono)): coeff
                for mono, coeff in terms.items()
            }
            chern.append(Poly(base_gens, trimmed))
        try:
            stages.append(Stage(fiber_dim=n, chern=tuple(chern)))
            TowerSpec(stages=tuple(stages))  # validate incrementally
        except TowerSpecError:
            raise
    return TowerSpec(stages=tuple(stages))


def _poly_from_json_loose(data):
    """Like Poly.from_json but with a free exponent-vector width.

    Returns (width, {monomial: coeff}); used by the tower parser, which
    wants to report forward references by generator number instead of
    rejecting on length.
    """
    if not isinstance(data, list):
        raise PolyJSONError("polynomial must be a list of terms")
    width = 0
    rows = []
    for idx, item in enumerate(data, start=1):
        if not isinstance(item, dict) or "coeff" not in item or "exps" not in item:
            raise PolyJSONError(f"term {idx}: needs 'coeff' and 'exps'")
        exps = item["exps"]
        if not isinstance(exps, list):
            raise PolyJSONError(f"term {idx}: exps must be a list")
        width = max(width, len(exps))
        rows.append(item)
    parsed = Poly.from_json(width, [
        {
            "coeff": item["coeff"],
            "exps": list(item["exps"]) + ["0"] * (width - len(item["exps"])),
        }
        for item in rows
    ])
    return width, dict(parsed.terms)
