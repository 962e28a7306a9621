"""Lie subalgebras of W(m;n) whose brackets are computed in the ambient algebra."""

import numpy as np
import scipy.sparse as sp

from . import fp
from .ambient import FilteredBasis, WittAmbient, modp
from .liecore import LieAlgebra, Subspace, _row_label


class EmbeddedLieAlgebra(LieAlgebra):
    """Basis = rows of a FilteredBasis inside W(m;n).

    Basis vectors are ordered by lowest degree, so the filtration levels are
    the lead degrees.  When every basis row is homogeneous the algebra is
    graded by those degrees.
    """

    def __init__(self, amb, fb, name=None, labels=None):
        self.amb = amb
        self.fb = fb
        self.B = fb.rows()
        levels = fb.lead_degrees()
        graded = self._homogeneous()
        if labels is None:
            labels = [self._label(r) for r in range(self.B.shape[0])]
        super().__init__(amb.p, labels, None, grading=levels if graded else None,
                         levels=levels, name=name)

    @classmethod
    def from_rows(cls, amb, rows, name=None, expect_dim=None):
        fb = FilteredBasis(amb.p, amb.degree)
        fb.insert(sp.csr_matrix(rows))
        L = cls(amb, fb, name=name)
        if expect_dim is not None and L.dim != expect_dim:
            raise AssertionError("%s: dim %d, expected %d" % (name, L.dim, expect_dim))
        return L

    @classmethod
    def from_derivations(cls, amb, Ds, name=None):
        return cls.from_rows(amb, amb.matrix(list(Ds)), name=name)

    def _homogeneous(self):
        B = sp.csr_matrix(self.B)
        if B.nnz == 0:
            return True
        d = self.amb.degree[B.indices]
        lo = np.minimum.reduceat(d, B.indptr[:-1][np.diff(B.indptr) > 0])
        hi = np.maximum.reduceat(d, B.indptr[:-1][np.diff(B.indptr) > 0])
        return bool((lo == hi).all())

    def _label(self, r):
        row = self.B[r]
        if row.nnz <= 2:
            return str(self.amb.derivation(row))
        return "b%d" % r

    # -- W coordinates --------------------------------------------------------
    def to_w(self, X):
        """Coordinate rows -> sparse rows of W."""
        X = np.atleast_2d(fp.as_array(X)) % self.p
        return modp(sp.csr_matrix(X) @ self.B, self.p)

    def from_w(self, V):
        return self.fb.coords(V)

    def contains_w(self, V):
        return self.fb.contains(V)

    def ad_w(self, x):
        return self.amb.ad(self.to_w(x))

    # -- structure -------------------------------------------------------------
    def ad(self, x):
        x = self._vec(x)
        V = modp((self.ad_w(x) @ self.B.T).T, self.p)     # rows [x, b_j]
        return self.fb.coords(V).T % self.p

    def bracket(self, x, y):
        v = self.amb.bracket(self.to_w(x), self.to_w(y))
        return self.fb.coords(v)[0]

    def brackets(self, x, Y):
        V = modp((self.ad_w(x) @ self.to_w(Y).T).T, self.p)
        return self.fb.coords(V)

    def _build_adT(self):
        n, p = self.dim, self.p
        blocks = []
        step = max(1, 20000 // max(n, 1))
        for s in range(0, n, step):
            idx = range(s, min(n, s + step))
            V = sp.vstack([modp((self.amb.ad(self.B[i]) @ self.B.T).T, p) for i in idx], format="csr")
            C = self.fb.coords(V)
            for a, i in enumerate(idx):
                blocks.append(sp.csr_matrix(C[a * n:(a + 1) * n].T.reshape(1, n * n)))
        return sp.vstack(blocks, format="csr")

    def ad_basis(self, i):
        hit = self._ad_cache.get(i)
        if hit is None:
            if self._adT is not None:
                return super().ad_basis(i)
            hit = self.ad(self.unit(i))
            if len(self._ad_cache) < 64:
                self._ad_cache[i] = hit
        return hit

    def closure(self, S):
        S = np.atleast_2d(fp.as_array(S)).reshape(-1, self.dim) % self.p
        fb = self._spin_w(self.to_w(S), self.to_w(S))
        return self._sub_from_fb(fb)

    def ideal(self, S):
        S = np.atleast_2d(fp.as_array(S)).reshape(-1, self.dim) % self.p
        fb = self._spin_w(self.to_w(S), self.to_w(self.generators()))
        return self._sub_from_fb(fb)

    def derived_subspace(self):
        """[L, L] as the span of all basis brackets, reduced inside W."""
        amb, p = self.amb, self.p
        fb = FilteredBasis(p, amb.degree)
        for i in range(self.dim):
            fb.insert(modp((amb.ad(self.B[i]) @ self.B.T).T, p))
            if fb.dim == self.dim:
                break
        return self._sub_from_fb(fb)

    def _spin_w(self, start, gens):
        amb, p = self.amb, self.p
        ads = [amb.ad(g) for g in gens if g.nnz]
        fb = FilteredBasis(p, amb.degree)
        frontier = fb.insert(start)
        while frontier.shape[0] and fb.dim < self.dim:
            cand = sp.vstack([modp((A @ frontier.T).T, p) for A in ads], format="csr")
            frontier = fb.insert(cand)
        return fb

    def _sub_from_fb(self, fb):
        if fb.dim == self.dim:
            return Subspace.full(self.p, self.dim)
        if fb.dim == 0:
            return Subspace.zero(self.p, self.dim)
        return Subspace(self.p, self.dim, self.fb.coords(fb.rows()))

    def subalgebra(self, sub, name=None):
        rows = self.to_w(sub.rows)
        S = EmbeddedLieAlgebra.from_rows(self.amb, rows, name=name)
        S.parent_rows = self.fb.coords(S.B)
        return S

    def symbol_algebra(self, name=None):
        """gr L realized as the graded subalgebra of W spanned by lowest-degree parts."""
        G = EmbeddedLieAlgebra.from_rows(self.amb, self.fb.leads(), name=name or "gr " + self.name)
        assert G.grading is not None
        return G

    def degree_space(self, d):
        """Span (in W) of the basis rows with lead degree d, as a sparse block."""
        g = self.fb.groups.get(d)
        return g["rows"] if g is not None else sp.csr_matrix((0, self.amb.N), dtype=np.int64)

    def layer(self, d):
        """Subspace of L spanned by basis vectors of lead degree d."""
        idx = np.flatnonzero(np.array(self.levels) == d)
        return Subspace(self.p, self.dim, np.eye(self.dim, dtype=np.int64)[idx], idx)

    def piece(self, d):
        """L_(d): basis vectors of lead degree >= d."""
        idx = np.flatnonzero(np.array(self.levels) >= d)
        return Subspace(self.p, self.dim, np.eye(self.dim, dtype=np.int64)[idx], idx)


def same_span_w(p, A, B):
    """Do the sparse row blocks A and B span the same subspace of W?"""
    A = sp.csr_matrix(A)
    B = sp.csr_matrix(B)
    cols = np.union1d(A.indices, B.indices)
    if len(cols) == 0:
        return True
    a = A[:, cols].toarray()
    b = B[:, cols].toarray()
    ra, rb = fp.rank(a, p), fp.rank(b, p)
    return ra == rb == fp.rank(np.vstack([a, b]), p)


__all__ = ["EmbeddedLieAlgebra", "WittAmbient", "same_span_w", "_row_label"]
