"""Quivers, admissible relations and finite-dimensional bound quiver algebras.

Paths list their arrows in traversal order: in ``a.b`` the arrow ``a`` is
traversed first, so composability means ``target(a) == source(b)``, and the
algebra product of two residue paths is concatenation followed by reduction
modulo the relation ideal.  Right modules are then representations whose
arrow maps point along the arrows.

Vertices are numbered 1..n.  Algebras built by quotients or corners keep
track of the original vertex numbers through ``vertex_labels``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .linalg import DEFAULT_PRIME


class NotFiniteDimensional(Exception):
    """Nonzero residue paths survive at the configured length cap."""


class BadRelation(ValueError):
    """A relation is not admissible (non-parallel terms or short paths)."""


@dataclass(frozen=True)
class Quiver:
    vertex_count: int
    arrows: tuple[tuple[str, int, int], ...]

    def __post_init__(self):
        names = [a[0] for a in self.arrows]
        if len(set(names)) != len(names):
            raise ValueError("arrow names must be unique")
        for name, s, t in self.arrows:
            if not (1 <= s <= self.vertex_count and 1 <= t <= self.vertex_count):
                raise ValueError(f"arrow {name}: endpoints outside 1..{self.vertex_count}")

    @property
    def vertices(self) -> range:
        return range(1, self.vertex_count + 1)

    def arrow(self, name: str) -> tuple[str, int, int]:
        for a in self.arrows:
            if a[0] == name:
                return a
        raise KeyError(name)

    def arrows_from(self, v: int):
        return [a for a in self.arrows if a[1] == v]

    def arrows_to(self, v: int):
        return [a for a in self.arrows if a[2] == v]

    def is_acyclic(self) -> bool:
        adj = {v: [t for (_, s, t) in self.arrows if s == v] for v in self.vertices}
        state = dict.fromkeys(self.vertices, 0)  # 0 new, 1 open, 2 done

        def visit(v):
            state[v] = 1
            for w in adj[v]:
                if state[w] == 1 or (state[w] == 0 and not visit(w)):
                    return False
            state[v] = 2
            return True

        return all(state[v] == 2 or visit(v) for v in self.vertices)

    def reversed(self) -> "Quiver":
        return Quiver(self.vertex_count, tuple((n, t, s) for (n, s, t) in self.arrows))


@dataclass(frozen=True)
class Path:
    """A path of the quiver; ``arrows`` in traversal order, empty for e_v."""

    source: int
    target: int
    arrows: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.arrows)

    def __str__(self):
        if not self.arrows:
            return f"e{self.source}"
        return ".".join(self.arrows)


def path_from_arrows(q: Quiver, arrows: tuple[str, ...]) -> Path:
    if not arrows:
        raise ValueError("use trivial_path for length zero")
    first = q.arrow(arrows[0])
    prev = first
    for name in arrows[1:]:
        nxt = q.arrow(name)
        if prev[2] != nxt[1]:
            raise ValueError(f"arrows {prev[0]} and {name} not composable")
        prev = nxt
    return Path(first[1], prev[2], tuple(arrows))


def trivial_path(v: int) -> Path:
    return Path(v, v, ())


@dataclass(frozen=True)
class Relation:
    """A linear combination of parallel paths of length >= 2."""

    terms: tuple[tuple[int, tuple[str, ...]], ...]

    def validated(self, q: Quiver, p: int) -> "Relation":
        if not self.terms:
            raise BadRelation("empty relation")
        paths = [path_from_arrows(q, arrows) for _, arrows in self.terms]
        if any(pt.length < 2 for pt in paths):
            raise BadRelation("relation paths must have length >= 2")
        src = {pt.source for pt in paths}
        tgt = {pt.target for pt in paths}
        if len(src) > 1 or len(tgt) > 1:
            raise BadRelation("relation terms must be parallel paths")
        terms = tuple((c % p, arrows) for c, arrows in self.terms if c % p)
        if not terms:
            raise BadRelation("relation is zero mod p")
        return Relation(terms)

    def reversed(self) -> "Relation":
        return Relation(tuple((c, tuple(reversed(a))) for c, a in self.terms))

    def __str__(self):
        return " + ".join(f"{c} {'.'.join(a)}" for c, a in self.terms)


@dataclass
class BoundQuiverAlgebra:
    """A finite-dimensional path algebra modulo an admissible ideal.

    ``basis`` holds the residue paths surviving reduction, ``mult[i, j]``
    the coordinate vector of ``basis[i] * basis[j]``.  ``vertex_labels``
    carries original vertex names through quotient constructions.
    """

    quiver: Quiver
    relations: tuple[Relation, ...]
    p: int
    basis: tuple[Path, ...]
    mult: np.ndarray
    vertex_idempotents: dict[int, int]
    vertex_labels: tuple[int, ...]
    _opposite: "BoundQuiverAlgebra | None" = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def n(self) -> int:
        return self.quiver.vertex_count

    def basis_index(self, path: Path) -> int:
        return self._index[path]

    def __post_init__(self):
        self._index = {b: i for i, b in enumerate(self.basis)}

    def idempotent_index(self, v: int) -> int:
        return self.vertex_idempotents[v]

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.dim == 0:
            return np.zeros(0, dtype=np.int64)
        return np.einsum("i,j,ijk->k", x, y, self.mult) % self.p

    def right_mult_matrix(self, j: int) -> np.ndarray:
        """Matrix of x -> x * basis[j] in basis coordinates (dim x dim)."""
        return self.mult[:, j, :].T.copy()

    def left_mult_matrix(self, i: int) -> np.ndarray:
        return self.mult[i, :, :].T.copy()

    def cartan_matrix(self) -> np.ndarray:
        """C[i, j] = dim e_{v_i} A e_{v_j} = number of residue paths v_i -> v_j."""
        n = self.n
        c = np.zeros((n, n), dtype=np.int64)
        for b in self.basis:
            c[b.source - 1, b.target - 1] += 1
        return c

    def arrow_index(self, name: str) -> int:
        a = self.quiver.arrow(name)
        return self.basis_index(Path(a[1], a[2], (name,)))

    def canonical_key(self) -> str:
        """Deterministic structural key used for memoising classifications."""
        arrows = ",".join(f"{n}:{s}>{t}" for n, s, t in sorted(self.quiver.arrows))
        rels = ";".join(sorted(str(r) for r in self.relations))
        return f"p{self.p}|v{self.n}|{arrows}|{rels}"


def _path_sort_key(pt: Path):
    return (pt.length, pt.arrows, pt.source)


def _enumerate_paths(q: Quiver, max_len: int) -> list[Path]:
    paths = [trivial_path(v) for v in q.vertices]
    frontier = list(paths)
    length = 0
    while frontier and length < max_len:
        nxt = []
        for pt in frontier:
            for name, s, t in q.arrows_from(pt.target):
                nxt.append(Path(pt.source, t, pt.arrows + (name,)))
        paths.extend(nxt)
        frontier = nxt
        length += 1
    return paths


def build_algebra(
    q: Quiver,
    rels: list[Relation] | tuple[Relation, ...] = (),
    max_len: int = 30,
    p: int = DEFAULT_PRIME,
    vertex_labels: tuple[int, ...] | None = None,
) -> BoundQuiverAlgebra:
    """Construct the bound quiver algebra kQ / <rels>.

    The ideal span is assembled from all products u*r*v of relation
    generators with paths and reduced by row echelon over F_p; the column
    order is length-then-lexicographic (largest first), so normal forms
    rewrite longer paths into shorter ones deterministically.

    Raises :class:`NotFiniteDimensional` if the quiver has cycles and
    nonzero residue paths survive at length ``max_len``.
    """
    rels = tuple(r.validated(q, p) for r in rels)
    acyclic = q.is_acyclic()
    cap = max_len if not acyclic else max(max_len, q.vertex_count)
    paths = _enumerate_paths(q, cap)
    if not acyclic and any(pt.length >= cap for pt in paths):
        # tentative basis must not touch the cap; checked again after reduction
        pass

    order = sorted(paths, key=_path_sort_key, reverse=True)
    col_of = {pt: i for i, pt in enumerate(order)}
    ncols = len(order)

    by_source: dict[int, list[Path]] = {v: [] for v in q.vertices}
    by_target: dict[int, list[Path]] = {v: [] for v in q.vertices}
    for pt in paths:
        by_source[pt.source].append(pt)
        by_target[pt.target].append(pt)

    rows = []
    for rel in rels:
        ref = path_from_arrows(q, rel.terms[0][1])
        for u in by_target[ref.source]:
            for v in by_source[ref.target]:
                row = np.zeros(ncols, dtype=np.int64)
                ok = True
                for coeff, arrows in rel.terms:
                    full = u.arrows + arrows + v.arrows
                    key = Path(u.source, v.target, full)
                    if key not in col_of:
                        ok = False  # exceeds the cap; cannot represent this generator
                        break
                    row[col_of[key]] = (row[col_of[key]] + coeff) % p
                if ok and row.any():
                    rows.append(row)
    if rows:
        ideal, npiv, pivots = linalg.rref(np.stack(rows), p)
        ideal = ideal[:npiv]
    else:
        ideal, pivots = linalg.zeros(0, ncols), []

    pivot_set = set(pivots)
    basis_paths = [order[i] for i in range(ncols) if i not in pivot_set]
    if not acyclic:
        survivors = [pt for pt in basis_paths if pt.length >= cap]
        if survivors:
            raise NotFiniteDimensional(
                f"{len(survivors)} residue paths of length {cap} survive; raise max_len"
            )
        basis_paths = [pt for pt in basis_paths if pt.length < cap]

    basis_paths.sort(key=lambda pt: (pt.length, pt.source, pt.arrows))
    basis = tuple(basis_paths)
    dim = len(basis)
    bidx = {pt: i for i, pt in enumerate(basis)}

    def normal_form(pt: Path) -> np.ndarray:
        vec = np.zeros(ncols, dtype=np.int64)
        vec[col_of[pt]] = 1
        red = linalg.residual(vec.reshape(1, -1), ideal, pivots, p)[0]
        out = np.zeros(dim, dtype=np.int64)
        for i in np.nonzero(red)[0]:
            out[bidx[order[i]]] = red[i]
        return out

    mult = np.zeros((dim, dim, dim), dtype=np.int64)
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            if bi.target != bj.source:
                continue
            full = Path(bi.source, bj.target, bi.arrows + bj.arrows)
            if full in col_of:
                mult[i, j] = normal_form(full)
            # else: product exceeds the cap; in the admissible regime it is zero

    idem = {v: bidx[trivial_path(v)] for v in q.vertices}
    labels = vertex_labels if vertex_labels is not None else tuple(q.vertices)
    return BoundQuiverAlgebra(q, rels, p, basis, mult, idem, labels)


def idempotent_quotient(a: BoundQuiverAlgebra, cut) -> BoundQuiverAlgebra:
    """A / <e> for e the sum of the trivial paths at ``cut``.

    The result lives on the full subquiver of the kept vertices; induced
    relations are the originals with every term passing through ``cut``
    dropped (killing a vertex idempotent kills exactly those paths).
    """
    cut = set(cut)
    if not cut:
        return a
    kept = [v for v in a.quiver.vertices if v not in cut]
    renum = {v: i + 1 for i, v in enumerate(kept)}
    arrows = tuple(
        (n, renum[s], renum[t]) for (n, s, t) in a.quiver.arrows if s not in cut and t not in cut
    )
    q = Quiver(len(kept), arrows)
    arrow_ok = {n for (n, _, _) in arrows}
    rels = []
    for rel in a.relations:
        terms = tuple(
            (c, arrs) for c, arrs in rel.terms if all(name in arrow_ok for name in arrs)
        )
        if terms:
            rels.append(Relation(terms))
    labels = tuple(a.vertex_labels[v - 1] for v in kept)
    return build_algebra(q, rels, p=a.p, vertex_labels=labels)


def corner_algebra(a: BoundQuiverAlgebra, keep):
    """The corner eAe for e the sum of trivial paths at ``keep``.

    Returns an :class:`~siltlab.assoc.AssociativeAlgebra` whose basis is the
    set of residue paths of A with both endpoints in ``keep`` (the paths may
    traverse dropped vertices); feed the result to
    :func:`siltlab.endo.gabriel_presentation` for a quiver form.
    """
    from .assoc import AssociativeAlgebra

    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must be nonempty")
    sel = [i for i, b in enumerate(a.basis) if b.source in keep and b.target in keep]
    pos = {g: i for i, g in enumerate(sel)}
    d = len(sel)
    table = np.zeros((d, d, d), dtype=np.int64)
    for i, gi in enumerate(sel):
        for j, gj in enumerate(sel):
            prod = a.mult[gi, gj]
            for g in np.nonzero(prod)[0]:
                table[i, j, pos[int(g)]] = prod[g]
    labels = tuple(str(a.basis[g]) for g in sel)
    idem = tuple(pos[a.vertex_idempotents[v]] for v in keep)
    return AssociativeAlgebra(p=a.p, table=table, labels=labels, idempotents=idem)


def opposite_algebra(a: BoundQuiverAlgebra) -> BoundQuiverAlgebra:
    """The opposite algebra, presented on the reversed quiver.

    The pairing is cached so that ``opposite_algebra(opposite_algebra(a))``
    is ``a`` itself, which keeps duality functors strictly involutive.
    """
    if a._opposite is not None:
        return a._opposite
    q = a.quiver.reversed()
    rels = tuple(r.reversed() for r in a.relations)
    opp = build_algebra(q, rels, p=a.p, vertex_labels=a.vertex_labels)
    a._opposite = opp
    opp._opposite = a
    return opp


# ---------------------------------------------------------------------------
# algebra file format


def parse_algebra(text: str, p: int = DEFAULT_PRIME, max_len: int = 30) -> BoundQuiverAlgebra:
    """Parse the line-based algebra format.

    ::

        vertices N
        arrow <name> <source> <target>
        relation <coeff> <a>.<b>[.<c>...] [ + <coeff> <path> ]...

    ``#`` starts a comment.  Coefficients are integers reduced mod p.
    """
    vertices = None
    arrows: list[tuple[str, int, int]] = []
    rels: list[Relation] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "vertices":
            vertices = int(rest[0])
        elif head == "arrow":
            name, s, t = rest[0], int(rest[1]), int(rest[2])
            arrows.append((name, s, t))
        elif head == "relation":
            chunks = " ".join(rest).split("+")
            terms = []
            for chunk in chunks:
                coeff_str, path_str = chunk.split()
                terms.append((int(coeff_str), tuple(path_str.split("."))))
            rels.append(Relation(tuple(terms)))
        else:
            raise ValueError(f"unknown directive: {head}")
    if vertices is None:
        raise ValueError("missing 'vertices' line")
    return build_algebra(Quiver(vertices, tuple(arrows)), rels, max_len=max_len, p=p)


def format_algebra(a: BoundQuiverAlgebra) -> str:
    lines = [f"vertices {a.n}"]
    for name, s, t in a.quiver.arrows:
        lines.append(f"arrow {name} {s} {t}")
    for rel in a.relations:
        lines.append("relation " + " + ".join(f"{c} {'.'.join(ar)}" for c, ar in rel.terms))
    return "\n".join(lines) + "\n"
