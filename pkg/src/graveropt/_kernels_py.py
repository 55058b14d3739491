"""Pure-Python reduction kernels.

These are the inner loops of the completion procedure that computes
conformal test sets: sign checks, conformal comparison, and normal-form
reduction of a vector against a pool of reducers.  A compiled twin lives
in _speedups.pyx with identical semantics; graveropt.kernels picks one at
import time.  Vectors are plain tuples of Python ints, so every kernel is
exact at any magnitude.
"""

BACKEND = "python"


def sign_compatible(u, v):
    """True iff u[i]*v[i] >= 0 for all i (no coordinate fights the other)."""
    for a, b in zip(u, v):
        if a * b < 0:
            return False
    return True


def conforms(g, v):
    """True iff g lies in the same closed orthant as v and |g| <= |v| entrywise.

    This is the partial order whose minimal nonzero kernel elements form
    the test set; zero coordinates of v force zero coordinates of g.
    """
    for a, b in zip(g, v):
        if a > 0:
            if b < a:
                return False
        elif a < 0:
            if b > a:
                return False
    return True


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vec_neg(u):
    return tuple(-a for a in u)


def is_zero(u):
    for a in u:
        if a:
            return False
    return True


def l1(u):
    n = 0
    for a in u:
        n += a if a >= 0 else -a
    return n


def conformal_multiple(s, g):
    """Largest m >= 0 with m*g conformally below s.

    Positive exactly when g conforms to s and g is nonzero; every
    coordinate of g must share s's sign and divide into it at least
    once.
    """
    m = None
    for a, b in zip(s, g):
        if b == 0:
            continue
        if b > 0:
            if a < b:
                return 0
        elif a > b:
            return 0
        q = a // b
        if m is None or q < m:
            m = q
    return m or 0


def reduce_ordered(s, red):
    """Reduce s against reducers sorted by ascending l1 norm.

    red holds (norm, vector) pairs in ascending order; a reducer can
    only apply when its norm is at most the current norm of s, so the
    scan stops early.  After each subtraction the scan restarts from the
    front, preferring small reducers; the result depends only on red's
    order.  Returns the irreducible remainder.
    """
    cur = s
    norm = l1(cur)
    while norm:
        hit = False
        for ng, g in red:
            if ng > norm:
                break
            m = conformal_multiple(cur, g)
            if m:
                cur = tuple(a - m * b for a, b in zip(cur, g))
                norm = l1(cur)
                hit = True
                break
        if not hit:
            break
    return cur


def normal_form(s, pool):
    """Reduce s by conformal subtraction against pool until irreducible.

    Each applicable reducer is subtracted with the largest conformal
    multiple; scanning restarts from the front of the pool after a hit,
    so the result only depends on the pool order, not on timing.
    """
    while True:
        if is_zero(s):
            return s
        hit = False
        for g in pool:
            m = conformal_multiple(s, g)
            if m:
                s = tuple(a - m * b for a, b in zip(s, g))
                hit = True
                break
        if not hit:
            return s


def complete(generators):
    """Close a kernel lattice basis under conformal summation (Pottier).

    Seeds the pool with both signs of every generator, then works
    through sign-incompatible pairs in ascending order of combined l1
    norm.  Each pair sum is reduced against the pool (small reducers
    first); an irreducible nonzero remainder joins the pool with its
    negative.  Returns the full pool, which still contains non-minimal
    elements; callers filter with minimal_elements.
    """
    from bisect import insort
    from heapq import heappush, heappop

    pool = []
    norms = []
    seen = set()
    red = []
    heap = []

    def add(v):
        idx = len(pool)
        seen.add(v)
        pool.append(v)
        norms.append(l1(v))
        insort(red, (norms[idx], v))
        for t in range(idx):
            # sign-compatible pairs reduce to zero; never queue them
            if not sign_compatible(pool[t], v):
                heappush(heap, (norms[t] + norms[idx], t, idx))

    for b in generators:
        for v in (b, vec_neg(b)):
            if v not in seen and not is_zero(v):
                add(v)
    while heap:
        _, i, j = heappop(heap)
        s = vec_add(pool[i], pool[j])
        if is_zero(s):
            continue
        r = reduce_ordered(s, red)
        if is_zero(r) or r in seen:
            continue
        add(r)
        add(vec_neg(r))
    return pool


def minimal_elements(elems):
    """Filter a list of nonzero vectors down to its conformally minimal ones.

    An element is dropped when a different element conforms to it.  The
    input order is irrelevant; the output is sorted by (norm, value).
    """
    # A reducer conformally below v has l1 norm at most v's, so after
    # sorting by norm it suffices to test against the kept minimal ones.
    ordered = sorted(set(elems), key=lambda v: (l1(v), v))
    kept = []
    for v in ordered:
        for g in kept:
            if g != v and conforms(g, v):
                break
        else:
            kept.append(v)
    return kept
