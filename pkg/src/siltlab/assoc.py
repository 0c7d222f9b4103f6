"""Abstract associative F_p-algebras given by structure constants.

This is the exchange format between corner algebras, endomorphism algebras
and the Gabriel presentation extractor: a basis, a multiplication table and
a chosen complete set of orthogonal idempotents (one per summand of the
object the algebra came from).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg


class SemisimpleQuotientError(Exception):
    """The radical heuristic failed to verify; use a larger field characteristic."""


@dataclass
class AssociativeAlgebra:
    p: int
    table: np.ndarray  # (dim, dim, dim); table[i, j] = coords of b_i * b_j
    labels: tuple[str, ...]
    idempotents: tuple[int, ...]  # basis indices of the orthogonal idempotents
    _rad: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.table.shape[0]

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.dim == 0:
            return np.zeros(0, dtype=np.int64)
        return np.einsum("i,j,ijk->k", x, y, self.table) % self.p

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def identity_vector(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        for i in self.idempotents:
            v[i] += 1
        return v % self.p

    def left_mult_matrix(self, x: np.ndarray) -> np.ndarray:
        # (L_x)[k, j] = sum_i x_i c[i, j, k]
        if self.dim == 0:
            return linalg.zeros(0, 0)
        return np.einsum("i,ijk->kj", x, self.table) % self.p

    def right_mult_matrix(self, x: np.ndarray) -> np.ndarray:
        if self.dim == 0:
            return linalg.zeros(0, 0)
        return np.einsum("j,ijk->ki", x, self.table) % self.p

    def is_associative(self) -> bool:
        if self.dim == 0:
            return True
        lhs = np.einsum("ijm,mkl->ijkl", self.table, self.table) % self.p
        rhs = np.einsum("jkm,iml->ijkl", self.table, self.table) % self.p
        return np.array_equal(lhs, rhs)

    def check_idempotents(self) -> bool:
        for i in self.idempotents:
            ei = self.basis_vector(i)
            if not np.array_equal(self.multiply(ei, ei), ei):
                return False
        for i in self.idempotents:
            for j in self.idempotents:
                if i != j and self.multiply(self.basis_vector(i), self.basis_vector(j)).any():
                    return False
        one = self.identity_vector()
        for k in range(self.dim):
            bk = self.basis_vector(k)
            if not np.array_equal(self.multiply(one, bk), bk):
                return False
            if not np.array_equal(self.multiply(bk, one), bk):
                return False
        return True

    # -- radical ------------------------------------------------------------

    def radical(self) -> np.ndarray:
        """Rows spanning the Jacobson radical.

        Computed as the radical of the trace form of the left regular
        representation, which is exact whenever p exceeds the matrix sizes
        of the simple blocks (always true at this workbench's scale with
        the default prime).  The result is verified nilpotent; failure
        raises :class:`SemisimpleQuotientError`.
        """
        if self._rad is not None:
            return self._rad
        d = self.dim
        if d == 0:
            self._rad = linalg.zeros(0, 0)
            return self._rad
        lm = np.stack([self.left_mult_matrix(self.basis_vector(i)) for i in range(d)])
        gram = np.einsum("iab,jba->ij", lm, lm) % self.p
        rad = linalg.kernel_basis(gram, self.p).T  # rows
        span = linalg.row_space_basis(rad, self.p) if rad.size else linalg.zeros(0, d)
        power = span
        for _ in range(d + 1):
            if power.shape[0] == 0:
                self._rad = span
                return span
            prods = [self.multiply(x, y) for x in power for y in span]
            power = linalg.row_space_basis(np.stack(prods), self.p) if prods else linalg.zeros(0, d)
        raise SemisimpleQuotientError(
            "trace-form radical is not nilpotent; rerun with a larger --field-char"
        )

    def radical_power(self, k: int) -> np.ndarray:
        """Rows spanning rad^k."""
        cur = self.radical()
        base = cur
        for _ in range(k - 1):
            if cur.shape[0] == 0:
                break
            prods = [self.multiply(x, y) for x in cur for y in base]
            cur = linalg.row_space_basis(np.stack(prods), self.p) if prods else linalg.zeros(0, self.dim)
        return cur

    # -- ideals and quotients -------------------------------------------------

    def two_sided_ideal(self, gens: np.ndarray) -> np.ndarray:
        """Rows spanning the two-sided ideal generated by the given row vectors."""
        if self.dim == 0 or gens.size == 0:
            return linalg.zeros(0, self.dim)
        span = linalg.RowSpace(self.dim, self.p)
        for g in np.asarray(gens, dtype=np.int64):
            span.add((g % self.p).reshape(1, -1))
        frontier = list(span.basis())
        while frontier:
            new = []
            for x in frontier:
                for i in range(self.dim):
                    b = self.basis_vector(i)
                    for prod in (self.multiply(b, x), self.multiply(x, b)):
                        if prod.any() and span.add(prod.reshape(1, -1)):
                            new.append(prod)
            frontier = new
        return span.basis()

    def idempotent_ideal(self, which: tuple[int, ...]) -> np.ndarray:
        """The ideal <e> for e the sum of the listed chosen idempotents."""
        e = np.zeros(self.dim, dtype=np.int64)
        for i in which:
            e[i] += 1
        return self.two_sided_ideal(e.reshape(1, -1) % self.p)

    def quotient(self, ideal_rows: np.ndarray) -> tuple["AssociativeAlgebra", np.ndarray]:
        """Quotient by a two-sided ideal.

        Returns ``(B, proj)`` where ``proj`` (newdim x dim) sends old
        coordinates to quotient coordinates; the quotient basis is the set
        of non-pivot coordinates of the ideal, so the construction is
        deterministic.  Idempotents of the quotient are the surviving
        images of the chosen idempotents.
        """
        d = self.dim
        red, rk, pivots = linalg.rref(ideal_rows if ideal_rows.size else linalg.zeros(0, d), self.p)
        red = red[:rk]
        keep = [c for c in range(d) if c not in set(pivots)]
        nd = len(keep)

        def project(vec: np.ndarray) -> np.ndarray:
            r = linalg.residual(vec.reshape(1, -1), red, pivots, self.p)[0]
            return r[keep]

        proj = np.stack([project(self.basis_vector(i)) for i in range(d)]).T if d else linalg.zeros(0, 0)
        table = np.zeros((nd, nd, nd), dtype=np.int64)
        for a, ka in enumerate(keep):
            for b, kb in enumerate(keep):
                table[a, b] = project(self.multiply(self.basis_vector(ka), self.basis_vector(kb)))
        # surviving idempotent images must be basis vectors again for the
        # quotient to carry a chosen idempotent set; re-expression is allowed
        new_idem = []
        for i in self.idempotents:
            img = project(self.basis_vector(i))
            if not img.any():
                continue
            hits = np.nonzero(img)[0]
            if len(hits) == 1 and img[hits[0]] == 1 and keep[hits[0]] == i:
                new_idem.append(int(hits[0]))
            else:
                raise ValueError("idempotent does not survive as a basis vector")
        labels = tuple(self.labels[k] for k in keep)
        return AssociativeAlgebra(self.p, table, labels, tuple(new_idem)), proj

    def quotient_by_idempotents(self, which: tuple[int, ...]) -> "AssociativeAlgebra":
        ideal = self.idempotent_ideal(tuple(which))
        return self.quotient(ideal)[0]

    def block(self, i: int, j: int, subspace_rows: np.ndarray) -> np.ndarray:
        """Rows spanning e_i * S * e_j for a subspace S given by rows."""
        if subspace_rows.shape[0] == 0:
            return linalg.zeros(0, self.dim)
        ei = self.basis_vector(self.idempotents[i])
        ej = self.basis_vector(self.idempotents[j])
        rows = [self.multiply(self.multiply(ei, x), ej) for x in subspace_rows]
        return linalg.row_space_basis(np.stack(rows), self.p)


def algebra_to_assoc(a) -> AssociativeAlgebra:
    """View a bound quiver algebra as an abstract associative algebra."""
    labels = tuple(str(b) for b in a.basis)
    idem = tuple(a.vertex_idempotents[v] for v in a.quiver.vertices)
    return AssociativeAlgebra(p=a.p, table=a.mult.copy(), labels=labels, idempotents=idem)
