"""Greedy augmentation engines.

The integer solver repeats one move: over all candidate directions g and
feasible step lengths a, take the (a, g) minimizing the objective at
z + a*g, and stop when nothing improves.  With the direction set equal
to the conformal test set of the constraint matrix (projected, for
composite objectives) the stopping point is a global optimum.

The linear-programming solver walks circuit directions instead, and
after every strict improvement runs a support-shrinking phase (moves
with nonincreasing objective that zero out a coordinate) so it cannot
zigzag between interior points: naive_lp_greedy demonstrates the
halving-forever failure mode the shrink phase exists to prevent.

Step lengths along a fixed direction are found by exact three-point
bisection on integers; all arithmetic is int/Fraction.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .errors import (
    DimMismatch,
    DomainError,
    EmptyInterval,
    InfeasibleBase,
    UnboundedBox,
    UnboundedObjective,
)
from .linalg import Mat, dot
from .objective import CompositeObjective, LinearObjective, _norm, evaluate, range_bound

__all__ = [
    "UNBOUNDED",
    "FeasibleBox",
    "GreedyStep",
    "TraceStep",
    "AugmentTrace",
    "line_search",
    "max_step",
    "greedy_step",
    "solve_ip_greedy",
    "solve_lp_circuit",
    "naive_lp_greedy",
]


class _Unbounded:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "UNBOUNDED"


UNBOUNDED = _Unbounded()


def _is_rat(x):
    return isinstance(x, (int, Fraction))


@dataclass(frozen=True)
class FeasibleBox:
    """Constraint system A z = b with bounds lower <= z <= upper.

    upper entries may be None (no bound on that coordinate); integer
    solvers require a fully finite integer box.
    """

    A: Mat
    b: tuple
    lower: tuple
    upper: tuple

    def __post_init__(self):
        b = tuple(self.b)
        lower = tuple(self.lower)
        upper = tuple(self.upper)
        if len(b) != self.A.rows:
            raise DimMismatch("b has %d entries, A has %d rows" % (len(b), self.A.rows))
        if len(lower) != self.A.cols or len(upper) != self.A.cols:
            raise DimMismatch("bounds must have %d entries" % (self.A.cols,))
        for l in lower:
            if not _is_rat(l):
                raise DomainError("lower bounds must be finite rationals")
        for l, u in zip(lower, upper):
            if u is None:
                continue
            if not _is_rat(u):
                raise DomainError("upper bounds must be rationals or None")
            if l > u:
                raise DomainError("lower bound exceeds upper bound")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self):
        return self.A.cols

    def is_finite_integer(self):
        return all(isinstance(l, int) for l in self.lower) and all(
            isinstance(u, int) for u in self.upper
        )

    def inside_bounds(self, z):
        for x, l, u in zip(z, self.lower, self.upper):
            if x < l:
                return False
            if u is not None and x > u:
                return False
        return True

    def check_point(self, z):
        z = tuple(z)
        if len(z) != self.dim:
            raise DimMismatch("point has %d coordinates, box %d" % (len(z), self.dim))
        if self.A.mul_vec(z) != self.b:
            raise InfeasibleBase("point violates the equality constraints")
        if not self.inside_bounds(z):
            raise InfeasibleBase("point violates the bounds")
        return z


@dataclass(frozen=True)
class GreedyStep:
    direction: tuple
    steplen: object  # nonnegative int (integer mode) or Fraction
    new_value: object

    @property
    def is_zero(self):
        return self.steplen == 0


@dataclass(frozen=True)
class TraceStep:
    value_before: object
    value_after: object
    direction: tuple
    steplen: object


@dataclass(frozen=True)
class AugmentTrace:
    """Per-iteration record of strict objective decreases.

    h_bound is the telemetry range bound (None when not computable);
    n_eff is the step-count parameter of the engine that produced the
    trace; shrink_moves counts equal-value support-shrinking moves of
    the LP solver, which are not iterations; basis_size is the number
    of candidate directions each greedy sweep evaluated.
    """

    iterations: tuple
    h_bound: object
    n_eff: int
    shrink_moves: int = 0
    basis_size: int = 0

    def __len__(self):
        return len(self.iterations)

    def values(self):
        if not self.iterations:
            return ()
        return (self.iterations[0].value_before,) + tuple(t.value_after for t in self.iterations)


def line_search(f, l, u):
    """Smallest integer minimizer of a convex f on [l, u].

    Three evaluations around the midpoint decide which side holds the
    minimum, so the interval halves per round: O(log(u - l)) calls.
    Ties break toward the smallest argument.
    """
    if l > u:
        raise EmptyInterval("empty interval [%s, %s]" % (l, u))
    memo = {}

    def F(t):
        if t not in memo:
            memo[t] = f(t)
        return memo[t]

    while u - l >= 2:
        m = (l + u) // 2
        if F(m - 1) <= F(m):
            # nondecreasing from m-1 on; smallest minimizer is left of m
            u = m - 1
        elif F(m) > F(m + 1):
            l = m + 1
        else:
            return m
    return l if F(l) <= F(u) else u


def max_step(z, g, box, mode="integer"):
    """Largest a >= 0 with z + a*g inside the bounds, or UNBOUNDED.

    Integer mode floors the exact bound.  Equality constraints are not
    rechecked: g is assumed to be a kernel vector.
    """
    z = tuple(z)
    if len(z) != box.dim or len(g) != box.dim:
        raise DimMismatch("point/direction must have %d coordinates" % (box.dim,))
    if not box.inside_bounds(z):
        raise InfeasibleBase("base point violates the bounds")
    best = None
    for x, d, l, u in zip(z, g, box.lower, box.upper):
        if d > 0:
            if u is None:
                continue
            cap = Fraction(u - x, d)
        elif d < 0:
            cap = Fraction(l - x, d)
        else:
            continue
        if best is None or cap < best:
            best = cap
    if best is None:
        return UNBOUNDED
    if mode == "integer":
        return floor(best)
    return best


def _add_scaled(z, a, g):
    out = []
    for x, d in zip(z, g):
        y = x + a * d
        if isinstance(y, Fraction) and y.denominator == 1:
            y = int(y)
        out.append(y)
    return tuple(out)


def _ray_improves(obj, g):
    # only linear objectives can certify improvement along an infinite ray
    if isinstance(obj, LinearObjective):
        return dot(obj.c, g) < 0
    raise UnboundedBox("composite objective over an unbounded ray; finite bounds required")


def _per_coordinate(obj):
    """Per-coordinate split of a composite objective, or None.

    Possible exactly when every function row acts on one coordinate.
    Index j then maps to the (scale, function) rows hitting z[j]; the
    greedy engine can price a move on the support of its direction
    instead of re-evaluating the whole point.  Rows that are all zero
    contribute a constant and drop out of any difference.
    """
    if not isinstance(obj, CompositeObjective):
        return None
    coord = [[] for _ in range(obj.dim)]
    for row, f in obj.rows:
        nz = [(j, r) for j, r in enumerate(row) if r]
        if len(nz) > 1:
            return None
        if nz:
            j, r = nz[0]
            coord[j].append((r, f))
    return coord


def greedy_step(z, S, obj, box, mode="integer", threads=None):
    """Best single move from z: minimize obj(z + a*g) over g in S and
    feasible a > 0.

    Integer mode searches a by bisection per direction; rational mode is
    for linear objectives, where only the bound endpoint can be optimal.
    Returns the zero step when nothing strictly improves.  Ties break by
    (new value, step length, direction) so the result is deterministic
    and independent of evaluation order.
    """
    z = box.check_point(z)
    cur = evaluate(obj, z)
    if mode not in ("integer", "rational"):
        raise DomainError("mode must be 'integer' or 'rational'")
    if mode == "rational" and not isinstance(obj, LinearObjective):
        raise DomainError("rational mode requires a linear objective")
    percoord = _per_coordinate(obj) if mode == "integer" else None
    if percoord is not None:
        base = [sum(f(r * x) for r, f in rows) if rows else 0 for x, rows in zip(z, percoord)]

    def best_for(g):
        a_max = max_step(z, g, box, mode)
        if a_max is UNBOUNDED:
            if _ray_improves(obj, g):
                raise UnboundedObjective("objective decreases without bound along %r" % (g,))
            return None
        if mode == "rational":
            cg = dot(obj.c, g)
            if cg >= 0 or a_max <= 0:
                return None
            return (cur + a_max * cg, a_max, g)
        if a_max < 1:
            return None
        if percoord is not None:
            sup = [(j, d) for j, d in enumerate(g) if d]
            cg = dot(obj.c, g)

            def delta(t):
                acc = t * cg
                for j, d in sup:
                    x = z[j] + t * d
                    for r, f in percoord[j]:
                        acc += f(r * x)
                    acc -= base[j]
                return acc

            a = line_search(delta, 1, a_max)
            dv = delta(a)
            if dv >= 0:
                return None
            return (_norm(cur + dv), a, g)
        a = line_search(lambda t: evaluate(obj, _add_scaled(z, t, g)), 1, a_max)
        v = evaluate(obj, _add_scaled(z, a, g))
        if v >= cur:
            return None
        return (v, a, g)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(best_for, S))
    else:
        results = [best_for(g) for g in S]
    cands = [r for r in results if r is not None]
    if not cands:
        return GreedyStep((0,) * box.dim, 0, cur)
    v, a, g = min(cands)
    return GreedyStep(g, a, v)


def _h_telemetry(obj, box, warn_factor):
    try:
        h = range_bound(obj, box.lower, box.upper)
    except (UnboundedBox, DomainError):
        return None
    if warn_factor is not None and h > 0:
        hbits = h.numerator.bit_length() if isinstance(h, Fraction) else int(h).bit_length()
        data_bits = 0
        for row in box.A.data:
            for a in row:
                data_bits += abs(a).bit_length() + 1
        for x in box.b + box.lower + box.upper:
            n = x if isinstance(x, int) else int(x)
            data_bits += abs(n).bit_length() + 1
        if hbits > warn_factor * max(1, data_bits):
            warnings.warn(
                "objective range needs %d bits against %d instance bits; step-count "
                "guarantees assume the range bound has polynomial encoding" % (hbits, data_bits)
            )
    return h


def solve_ip_greedy(z0, basis, obj, box, threads=None, h_warn_factor=8):
    """Greedy augmentation to integer optimality over a finite box.

    basis must be the conformal test set of box.A (projected composite
    test set for composite objectives); that is what makes the final
    point a certified global optimum rather than a local stopping point.
    Returns (optimum, trace); the trace holds every strict decrease.
    """
    z = box.check_point(z0)
    if not all(isinstance(x, int) for x in z):
        raise DomainError("integer solver needs an integer start point")
    if not box.is_finite_integer():
        raise UnboundedBox("integer solver needs a finite integer box")
    n = box.dim
    if isinstance(obj, CompositeObjective):
        n_eff = max(1, 2 * (n + obj.s) - 2)
    else:
        n_eff = max(1, 2 * n - 2)
    h = _h_telemetry(obj, box, h_warn_factor)
    dirs = basis.directions() if hasattr(basis, "directions") else tuple(basis)
    steps = []
    cur = evaluate(obj, z)
    while True:
        st = greedy_step(z, dirs, obj, box, "integer", threads)
        if st.is_zero:
            break
        assert st.new_value < cur
        steps.append(TraceStep(cur, st.new_value, st.direction, st.steplen))
        z = _add_scaled(z, st.steplen, st.direction)
        cur = st.new_value
    return z, AugmentTrace(tuple(steps), h, n_eff, basis_size=len(dirs))


def _shrink_to_vertex(z, circuits, c, box):
    """Support-shrinking moves until none applies.

    A move is the first circuit (canonical order) that vanishes outside
    supp(z), does not increase c.z, and can zero out a coordinate within
    the bounds; its length is the smallest positive zero-creating value.
    Each move removes a nonzero coordinate, so there are at most dim
    moves.  Requires all-zero lower bounds.
    """
    records = []
    moves = 0
    n = len(z)
    while True:
        applied = False
        for g in circuits.elements:
            if any(d and not x for x, d in zip(z, g)):
                continue
            cg = dot(c, g)
            if cg > 0:
                continue
            touches = [Fraction(x, -d) for x, d in zip(z, g) if d < 0 and x > 0]
            if not touches:
                continue
            a = min(touches)
            cap = max_step(z, g, box, "rational")
            if cap is not UNBOUNDED and a > cap:
                continue
            before = dot(c, z)
            z = _add_scaled(z, a, g)
            moves += 1
            if cg < 0:
                records.append(TraceStep(before, dot(c, z), g, a))
            applied = True
            break
        if not applied:
            return z, records, moves
        assert moves <= n, "support can shrink at most dim times"


def solve_lp_circuit(z0, circuits, c, box, threads=None):
    """Linear program over the box, walked along circuit directions.

    Alternates one greedy circuit step with the support-shrinking phase
    and stops when the greedy step is zero; the stopping point is an
    optimal solution.  Bounds may be rational; lower bounds must be all
    zero (the shrinking phase identifies "leaves the support" with
    "reaches zero").  Returns (optimum, trace): iterations are the
    strict decreases, shrink_moves counts the equal-value moves.
    """
    if any(l != 0 for l in box.lower):
        raise DomainError("circuit LP solver requires zero lower bounds")
    obj = c if isinstance(c, LinearObjective) else LinearObjective(tuple(c))
    z = box.check_point(z0)
    n = box.dim
    try:
        h = range_bound(obj, box.lower, box.upper)
    except (UnboundedBox, DomainError):
        h = None
    steps = []
    shrunk = 0
    while True:
        st = greedy_step(z, circuits.elements, obj, box, "rational", threads)
        if st.is_zero:
            break
        cur = evaluate(obj, z)
        steps.append(TraceStep(cur, st.new_value, st.direction, st.steplen))
        z = _add_scaled(z, st.steplen, st.direction)
        z2, recs, moves = _shrink_to_vertex(z, circuits, obj.c, box)
        z = z2
        steps.extend(recs)
        shrunk += moves - len(recs)
    return z, AugmentTrace(
        tuple(steps), h, n, shrink_moves=shrunk, basis_size=len(circuits.elements)
    )


def naive_lp_greedy(z0, directions, c, box, max_iter=25):
    """Diagnostic: endpoint greedy over a fixed direction list, with no
    support shrinking.  Returns the value sequence (including the start)
    so callers can watch it fail to terminate on adversarial direction
    sets.  Stops after max_iter moves or at a point with no improving
    move, whichever is first.
    """
    obj = c if isinstance(c, LinearObjective) else LinearObjective(tuple(c))
    z = box.check_point(z0)
    values = [evaluate(obj, z)]
    for _ in range(max_iter):
        st = greedy_step(z, tuple(directions), obj, box, "rational")
        if st.is_zero:
            break
        z = _add_scaled(z, st.steplen, st.direction)
        values.append(st.new_value)
    return values, z
