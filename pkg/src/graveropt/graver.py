"""Circuits, conformal test sets, and sign-compatible decompositions.

For an integer matrix A the test set computed here is the set of nonzero
integer kernel vectors that cannot be written as u + w with u, w nonzero
kernel vectors lying in the same closed orthant (conformal minimality).
Circuits are the primitive kernel vectors of support-minimal support.

The test set is computed by a completion procedure: start from a lattice
basis of ker(A) and its negations, repeatedly form pairwise sums, reduce
each sum to a normal form by conformal subtraction, and keep the nonzero
normal forms until no pair produces anything new.  A final filter keeps
the conformally minimal elements.  Pairs that already lie in a common
orthant reduce to zero and are skipped up front.

Everything is exact; element coordinates are unbounded Python ints.
"""

from dataclasses import dataclass
from itertools import combinations

from . import kernels
from .errors import BoundExceeded, DimMismatch, NotInKernel
from .linalg import Mat, conforms, is_zero, kernel_basis, primitive_part, vec_neg

__all__ = ["CircuitSet", "GraverBasis", "Decomposition", "circuits", "graver", "graver_composite", "decompose"]


@dataclass(frozen=True)
class CircuitSet:
    matrix: Mat
    elements: tuple

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, v):
        return tuple(v) in set(self.elements)


@dataclass(frozen=True)
class GraverBasis:
    matrix: Mat
    elements: tuple
    # composite bases keep full-width elements; project_to marks how many
    # leading coordinates carry the actual step direction
    project_to: int = None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, v):
        return tuple(v) in set(self.elements)

    def directions(self):
        """Step directions for augmentation: projected and deduplicated
        for composite bases, the elements themselves otherwise."""
        if self.project_to is None:
            return self.elements
        n = self.project_to
        seen = set()
        out = []
        for e in self.elements:
            p = e[:n]
            if p not in seen and not is_zero(p):
                seen.add(p)
                out.append(p)
        return tuple(sorted(out))


@dataclass(frozen=True)
class Decomposition:
    terms: tuple  # of (coeff, dir) with positive integer coeff

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def total(self):
        if not self.terms:
            return ()
        n = len(self.terms[0][1])
        acc = [0] * n
        for c, g in self.terms:
            for i in range(n):
                acc[i] += c * g[i]
        return tuple(acc)


def _graver_elements(A):
    basis = kernel_basis(A)
    if not basis:
        return ()
    k = kernels.active
    pool = k.complete(basis)
    return tuple(sorted(k.minimal_elements(pool)))


def graver(A):
    """Conformal test set of A (closed under negation, canonical order)."""
    return GraverBasis(A, _graver_elements(A))


def graver_composite(A, C):
    """Test set of the block matrix [[A,0],[C,I]] with projection marker.

    The leading A.cols coordinates of each element are the usable step;
    the trailing C.rows coordinates track the row values C·step and are
    kept so the projection stays recoverable.  With no C rows this is
    exactly graver(A).
    """
    if C.cols != A.cols:
        raise DimMismatch("C must have %d columns, has %d" % (A.cols, C.cols))
    s = C.rows
    if s == 0:
        return graver(A)
    top = Mat.hstack(A, Mat.zeros(A.rows, s))
    bottom = Mat.hstack(C, Mat.identity(s))
    M = Mat.vstack(top, bottom)
    return GraverBasis(M, _graver_elements(M), project_to=A.cols)


def circuits(A):
    """Primitive support-minimal nonzero kernel vectors of A.

    Enumerates candidate supports; a support S carries a circuit exactly
    when ker of the column submatrix is one-dimensional and its generator
    has no zero inside S.
    """
    if A.cols < 1:
        raise DimMismatch("need at least one column")
    n = A.cols
    from .linalg import rank as _rank

    r = _rank(A)
    found = set()
    for k in range(1, min(r + 1, n) + 1):
        for S in combinations(range(n), k):
            sub = A.submatrix_cols(S)
            kb = kernel_basis(sub)
            if len(kb) != 1:
                continue
            w = kb[0]
            if 0 in w:
                continue
            v = [0] * n
            for pos, j in enumerate(S):
                v[j] = w[pos]
            v = primitive_part(tuple(v))
            found.add(v)
            found.add(vec_neg(v))
    return CircuitSet(A, tuple(sorted(found)))


def decompose(v, G, bound):
    """Write v as a positive-integer conformal combination of at most
    `bound` distinct test-set elements.

    Exhaustive depth-first search over the elements conforming to v, in
    canonical order; raises BoundExceeded when no combination within the
    bound exists.  NotInKernel when v is not a kernel vector of G.matrix.
    """
    v = tuple(v)
    if len(v) != G.matrix.cols:
        raise DimMismatch("vector has %d coordinates, matrix %d columns" % (len(v), G.matrix.cols))
    if not is_zero(G.matrix.mul_vec(v)):
        raise NotInKernel("decompose target is not in the kernel")
    if is_zero(v):
        return Decomposition(())
    cands = [g for g in G.elements if conforms(g, v)]

    def dfs(rem, start, terms):
        if is_zero(rem):
            return terms
        if len(terms) >= bound:
            return None
        for idx in range(start, len(cands)):
            g = cands[idx]
            if not conforms(g, rem):
                continue
            m = min(rem[i] // g[i] for i in range(len(rem)) if g[i])
            for c in range(m, 0, -1):
                nxt = tuple(rem[i] - c * g[i] for i in range(len(rem)))
                got = dfs(nxt, idx + 1, terms + [(c, g)])
                if got is not None:
                    return got
        return None

    got = dfs(v, 0, [])
    if got is None:
        raise BoundExceeded("no conformal decomposition with at most %d distinct elements" % bound)
    return Decomposition(tuple(got))
