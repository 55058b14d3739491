"""Independent brute-force oracles used as ground truth.

Everything here is deliberately written from scratch on plain lists and
itertools, sharing no code with the package under test: enumeration
replaces completion, so agreement between the two routes is evidence,
not tautology.
"""

from itertools import product
from math import gcd


def mul(A, v):
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def in_kernel(A, v):
    return all(s == 0 for s in mul(A, v))


def kernel_points(A, radius):
    """All nonzero integer kernel vectors of A inside [-radius, radius]^n
    by plain product enumeration; fine for tiny boxes only."""
    n = len(A[0])
    return [
        v
        for v in product(range(-radius, radius + 1), repeat=n)
        if any(v) and in_kernel(A, v)
    ]


def _suffix_bounds(A, box):
    m, n = len(A), len(A[0])
    lo = [[0] * (n + 1) for _ in range(m)]
    hi = [[0] * (n + 1) for _ in range(m)]
    for r in range(m):
        for j in range(n - 1, -1, -1):
            a, b = A[r][j] * box[j][0], A[r][j] * box[j][1]
            lo[r][j] = lo[r][j + 1] + min(a, b)
            hi[r][j] = hi[r][j + 1] + max(a, b)
    return lo, hi


def _kernel_dfs(A, box, emit):
    """Depth-first walk of {v in box: Av = 0} with per-row interval
    pruning; calls emit on every solution (including zero)."""
    m, n = len(A), len(A[0])
    lo, hi = _suffix_bounds(A, box)
    v = [0] * n

    def walk(j, sums):
        if j == n:
            emit(tuple(v))
            return
        for x in range(box[j][0], box[j][1] + 1):
            ns = []
            for r in range(m):
                s = sums[r] + A[r][j] * x
                if s + lo[r][j + 1] > 0 or s + hi[r][j + 1] < 0:
                    ns = None
                    break
                ns.append(s)
            if ns is not None:
                v[j] = x
                walk(j + 1, ns)

    walk(0, [0] * m)


class _Found(Exception):
    pass


def has_proper_conformal_summand(A, v):
    """True iff some kernel u with 0 != u != v lies in the sign box of v
    (same orthant, entrywise no larger)."""
    box = [(min(0, x), max(0, x)) for x in v]
    target = tuple(v)

    def emit(u):
        if any(u) and u != target:
            raise _Found

    try:
        _kernel_dfs(A, box, emit)
    except _Found:
        return True
    return False


def minimal_kernel_in_box(A, radius):
    """Conformally minimal nonzero kernel vectors inside [-radius, radius]^n.

    Only complete if radius covers the true basis; callers verify that by
    re-running at radius + 2 and checking the set is unchanged.
    """
    n = len(A[0])
    out = []

    def emit(v):
        if any(v) and not has_proper_conformal_summand(A, v):
            out.append(v)

    _kernel_dfs(A, [(-radius, radius)] * n, emit)
    return sorted(out)


def circuits_oracle(A, radius):
    """Primitive kernel vectors of support-minimal support inside the box."""
    pts = kernel_points(A, radius)
    supports = {}
    for v in pts:
        supports.setdefault(frozenset(i for i, x in enumerate(v) if x), []).append(v)
    minimal = [S for S in supports if not any(T < S for T in supports)]
    out = set()
    for S in minimal:
        for v in supports[S]:
            g = 0
            for x in v:
                g = gcd(g, abs(x))
            if g == 1:
                out.add(v)
    return sorted(out)


def feasible_points(A, b, lower, upper):
    ranges = [range(l, u + 1) for l, u in zip(lower, upper)]
    for z in product(*ranges):
        if mul(A, z) == tuple(b):
            yield z


def solve_ip_oracle(A, b, lower, upper, f):
    """(best_value, set of argmins) by full enumeration; (None, set()) when
    infeasible.  f is any exact callable on integer tuples."""
    best = None
    argmins = set()
    for z in feasible_points(A, b, lower, upper):
        v = f(z)
        if best is None or v < best:
            best = v
            argmins = {z}
        elif v == best:
            argmins.add(z)
    return best, argmins
