"""Graded ring isomorphism between quotient presentations, by bounded
exhaustive search over unimodular integer matrices.

All generators sit in degree 2, so a candidate ring map is a g x g integer
matrix M; column k holds the coordinates of the image of source generator k
in the target generators.  M is a certificate when |det M| = 1 and every
source relation maps into the target ideal (i.e. reduces to zero).  That
suffices for a ring isomorphism here: a degree-preserving map carrying the
degree-2 lattice onto itself by a unimodular matrix is surjective because
the rings are generated in degree 2, and a graded surjection between free
graded rings of equal finite rank per degree is injective as well.

A ``none_within_bound`` verdict is exactly what it says -- *bounded*
non-existence over entries in [-B, B] -- and is deliberately weaker than a
non-isomorphism proof.  Reports should label it "bounded non-existence".

Enumeration order is part of the contract: matrices are tried in
lexicographic order of the column-major flattened entry vector, entries
running -B..B, so runs are reproducible bit for bit.  The engine assigns
whole columns left to right, which lets it (a) check each source relation as
soon as all the generators it mentions have images, (b) discard prefixes
whose columns are already linearly dependent (every completion has det 0),
and (c) test |det| = 1 before the final relation checks.  None of that
skips a certificate, so the first matrix found is the same one the plain
flat enumeration (``search_all_reference``) finds; the tests compare the
two engines directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

from .polyring import Poly
from .towers import RingPresentation, matrix_det

Matrix = tuple  # tuple[tuple[int, ...], ...] -- rows


class IsoShapeError(ValueError):
    """Presentations or matrices of incompatible shape (a caller bug, as
    opposed to a legitimate negative verdict)."""


@dataclass(frozen=True)
class SearchVerdict:
    result: str  # "found" | "none_within_bound"
    matrix: Matrix | None
    det: int | None
    bound: int
    reason: str | None  # "exhausted" | "betti_mismatch" for negative verdicts

    @property
    def found(self) -> bool:
        return self.result == "found"

    def to_json(self) -> dict:
        if self.found:
            return {
                "result": "found",
                "matrix": [[str(e) for e in row] for row in self.matrix],
                "det": str(self.det),
            }
        return {
            "result": "none_within_bound",
            "bound": str(self.bound),
            "reason": self.reason,
        }

    @classmethod
    def from_json(cls, data, bound: int | None = None) -> "SearchVerdict":
        if not isinstance(data, dict) or "result" not in data:
            raise ValueError("malformed verdict")
        if data["result"] == "found":
            matrix = tuple(
                tuple(int(e) for e in row) for row in data["matrix"]
            )
            return cls("found", matrix, int(data["det"]),
                       bound if bound is not None else 0, None)
        if data["result"] == "none_within_bound":
            return cls(
                "none_within_bound", None, None, int(data["bound"]),
                data.get("reason", "exhausted"),
            )
        raise ValueError(f"unknown verdict result {data['result']!r}")


# -- verification ----------------------------------------------------------


def _check_matrix(g: int, rows) -> Matrix:
    try:
        mat = tuple(tuple(int(e) for e in row) for row in rows)
    except (TypeError, ValueError):
        raise IsoShapeError("matrix entries must be integers")
    if len(mat) != g or any(len(row) != g for row in mat):
        raise IsoShapeError(f"expected a {g}x{g} matrix")
    return mat


def images_from_matrix(pres_b: RingPresentation, rows: Matrix) -> list[Poly]:
    """Column k as a linear form in the target generators."""
    g = pres_b.ngens
    images = []
    for k in range(g):
        terms = {}
        for i in range(g):
            if rows[i][k]:
                exps = [0] * g
                exps[i] = 1
                terms[tuple(exps)] = rows[i][k]
        images.append(Poly(g, terms))
    return images


def verify(pres_a: RingPresentation, pres_b: RingPresentation, rows) -> bool:
    """Check a certificate the slow, direct way (substitute and reduce).

    Raises :class:`IsoShapeError` for mismatched generator counts or a
    wrongly shaped matrix; returns False for a Poincare mismatch, which is
    a legitimate "trivially non-isomorphic" signal rather than a bug.
    """
    g = pres_a.ngens
    if pres_b.ngens != g:
        raise IsoShapeError(
            f"generator counts differ: {g} vs {pres_b.ngens}"
        )
    mat = _check_matrix(g, rows)
    if pres_a.poincare() != pres_b.poincare():
        return False
    if matrix_det(mat) not in (1, -1):
        return False
    images = images_from_matrix(pres_b, mat)
    for rel in pres_a.relations:
        if not pres_b.normal_form(rel.substitute(images)).is_zero():
            return False
    return True


def invert_unimodular(rows: Matrix) -> Matrix:
    """Integer inverse of a matrix with det +-1 (via the adjugate)."""
    g = len(rows)
    mat = _check_matrix(g, rows)
    d = matrix_det(mat)
    if d not in (1, -1):
        raise ValueError(f"matrix has determinant {d}, not a unit")
    inv = []
    for i in range(g):
        row = []
        for j in range(g):
            minor = [
                [mat[r][c] for c in range(g) if c != i]
                for r in range(g)
                if r != j
            ]
            row.append(d * (-1) ** (i + j) * matrix_det(minor))
        inv.append(tuple(row))
    return tuple(inv)


def compose(m_ab: Matrix, m_bc: Matrix) -> Matrix:
    """Certificate for A -> C from certificates A -> B and B -> C.

    Columns are images, so the composite matrix is the ordinary product
    (B -> C) . (A -> B); entries may leave the search bound, which is fine
    for verification.
    """
    g = len(m_ab)
    return tuple(
        tuple(
            sum(m_bc[i][j] * m_ab[j][k] for j in range(g)) for k in range(g)
        )
        for i in range(g)
    )


# -- the search engine -----------------------------------------------------


class _TargetTables:
    """Structure constants of the target quotient, graded by weight.

    ``mult[w][i][k]`` is the coefficient vector, over the weight-(w+1)
    basis, of (w-basis monomial i) * x_k reduced to normal form.  Products
    past the top weight are zero and are represented by empty vectors.
    """

    def __init__(self, pres: RingPresentation):
        self.g = pres.ngens
        self.maxw = sum(pres.caps)
        self.bases = [
            pres.graded_basis(2 * w) for w in range(self.maxw + 1)
        ]
        index = [
            {m: i for i, m in enumerate(basis)} for basis in self.bases
        ]
        self.mult = []
        for w in range(self.maxw):
            dim_next = len(self.bases[w + 1])
            level = []
            for mono in self.bases[w]:
                per_gen = []
                for k in range(self.g):
                    bumped = list(mono)
                    bumped[k] += 1
                    reduced = pres._reduce_monomial(tuple(bumped))
                    vec = [0] * dim_next
                    for m, c in reduced.items():
                        vec[index[w + 1][m]] = c
                    per_gen.append(vec)
                level.append(per_gen)
            self.mult.append(level)

    def mul_linear(self, vec: list, w: int, col: Sequence[int]) -> list:
        """Multiply a weight-w coefficient vector by the linear form with
        generator coordinates ``col``."""
        if w >= self.maxw:
            return []
        dim_next = len(self.bases[w + 1])
        out = [0] * dim_next
        level = self.mult[w]
        for i, vi in enumerate(vec):
            if not vi:
                continue
            per_gen = level[i]
            for k, ck in enumerate(col):
                if not ck:
                    continue
                s = vi * ck
                tk = per_gen[k]
                for j in range(dim_next):
                    c = tk[j]
                    if c:
                        out[j] += s * c
        return out

    def relation_maps_to_zero(self, terms, cols) -> bool:
        """Evaluate a prepared source relation on the assigned columns."""
        acc = None
        for coeff, exps in terms:
            vec = [1]  # the weight-0 basis {1}
            w = 0
            for gidx, e in enumerate(exps):
                for _ in range(e):
                    vec = self.mul_linear(vec, w, cols[gidx])
                    w += 1
            if acc is None:
                acc = [coeff * v for v in vec]
            else:
                for j, v in enumerate(vec):
                    acc[j] += coeff * v
        return acc is None or not any(acc)


def _prepare_relations(pres_a: RingPresentation):
    """Source relations as term lists, grouped by the last generator they
    mention (the depth at which they become checkable)."""
    groups: list[list[list]] = [[] for _ in range(pres_a.ngens)]
    for rel in pres_a.relations:
        depth = 0
        terms = []
        for mono, coeff in rel.sorted_terms(reverse=True):
            terms.append((coeff, mono))
            for idx in range(len(mono) - 1, -1, -1):
                if mono[idx]:
                    depth = max(depth, idx)
                    break
        groups[depth].append(terms)
    return groups


def _reduce_column(pivots, col):
    """Fraction-free reduction of ``col`` against the pivot columns.

    Returns (lead index, reduced vector) when independent, None when the
    column lies in the span of the pivots (so every completion of the
    prefix has determinant zero).
    """
    v = list(col)
    for lead, piv in pivots:
        if v[lead]:
            f = v[lead]
            lc = piv[lead]
            v = [lc * a - f * b for a, b in zip(v, piv)]
    for i, a in enumerate(v):
        if a:
            return (i, v)
    return None


def _cofactors(cols: list, g: int) -> list[int]:
    """det(M) = sum_i cof[i] * last_column[i], from the first g-1 columns."""
    if g == 1:
        return [1]
    cof = []
    for i in range(g):
        minor = [
            [cols[k][r] for k in range(g - 1)]
            for r in range(g)
            if r != i
        ]
        cof.append((-1) ** (i + g - 1) * matrix_det(minor))
    return cof


def _search_matrices(
    pres_a: RingPresentation,
    pres_b: RingPresentation,
    bound: int,
) -> Iterator[tuple[Matrix, int]]:
    """Yield every certificate matrix in the contract order."""
    g = pres_a.ngens
    tables = _TargetTables(pres_b)
    groups = _prepare_relations(pres_a)
    column_space = list(product(range(-bound, bound + 1), repeat=g))
    cols: list = [None] * g

    def walk(depth: int, pivots) -> Iterator[tuple[Matrix, int]]:
        last = depth == g - 1
        cof = _cofactors(cols, g) if last else None
        for col in column_space:
            cols[depth] = col
            if last:
                det = sum(c * e for c, e in zip(cof, col))
                if det != 1 and det != -1:
                    continue
            else:
                reduced = _reduce_column(pivots, col)
                if reduced is None:
                    continue
            ok = True
            for terms in groups[depth]:
                if not tables.relation_maps_to_zero(terms, cols):
                    ok = False
                    break
            if not ok:
                continue
            if last:
                rows = tuple(
                    tuple(cols[k][i] for k in range(g)) for i in range(g)
                )
                yield rows, det
            else:
                yield from walk(depth + 1, pivots + [reduced])

    yield from walk(0, [])


def _check_searchable(pres_a: RingPresentation, pres_b: RingPresentation,
                      bound: int) -> None:
    if pres_a.ngens != pres_b.ngens:
        raise IsoShapeError(
            f"generator counts differ: {pres_a.ngens} vs {pres_b.ngens}"
        )
    if bound < 0:
        raise ValueError("bound must be non-negative")


def search(
    pres_a: RingPresentation, pres_b: RingPresentation, bound: int = 3
) -> SearchVerdict:
    """First certificate in the contract order, or bounded non-existence.

    A Poincare mismatch short-circuits: no degree-preserving unimodular
    map can exist at any bound, and the verdict says so via its reason.
    """
    _check_searchable(pres_a, pres_b, bound)
    if pres_a.poincare() != pres_b.poincare():
        return SearchVerdict(
            "none_within_bound", None, None, bound, "betti_mismatch"
        )
    for rows, det in _search_matrices(pres_a, pres_b, bound):
        if not verify(pres_a, pres_b, rows):
            raise RuntimeError(
                f"engine produced a non-verifying certificate {rows}"
            )
        return SearchVerdict("found", rows, det, bound, None)
    return SearchVerdict("none_within_bound", None, None, bound, "exhausted")


def search_all(
    pres_a: RingPresentation, pres_b: RingPresentation, bound: int = 3
) -> list[Matrix]:
    """Every certificate with entries in [-bound, bound], contract order."""
    _check_searchable(pres_a, pres_b, bound)
    if pres_a.poincare() != pres_b.poincare():
        return []
    out = []
    for rows, _det in _search_matrices(pres_a, pres_b, bound):
        if not verify(pres_a, pres_b, rows):
            raise RuntimeError(
                f"engine produced a non-verifying certificate {rows}"
            )
        out.append(rows)
    return out


def search_all_reference(
    pres_a: RingPresentation, pres_b: RingPresentation, bound: int = 3
) -> list[Matrix]:
    """Unpruned reference engine: enumerate the whole flattened entry box
    and verify each matrix directly.  Exists to pin the pruned engine's
    enumeration order and acceptance predicate; use only on small cases.
    """
    _check_searchable(pres_a, pres_b, bound)
    if pres_a.poincare() != pres_b.poincare():
        return []
    g = pres_a.ngens
    out = []
    for flat in product(range(-bound, bound + 1), repeat=g * g):
        # column-major flattening: column k occupies flat[k*g : (k+1)*g]
        rows = tuple(
            tuple(flat[k * g + i] for k in range(g)) for i in range(g)
        )
        if matrix_det(rows) not in (1, -1):
            continue
        images = images_from_matrix(pres_b, rows)
        if all(
            pres_b.normal_form(rel.substitute(images)).is_zero()
            for rel in pres_a.relations
        ):
            out.append(rows)
    return out
