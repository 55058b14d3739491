"""Two-stage programs: one shared decision, N scenario corrections.

Constraints are T x + W y^(i) = b^(i) per scenario, with bounds on x
and each y^(i).  Kernel vectors of the stacked matrix are exactly the
(v, w_1..w_N) with T v + W w_i = 0 for every i, so test-set elements
decompose into a first-stage block v and scenario blocks w that pair
with it.  The pool of distinct blocks stops growing as the scenario
count increases; it is harvested from directly computed test sets for
N = 1..cap with an explicit stabilization check, and improving moves
for any larger N are assembled per scenario from the pool.  Assembled
moves need not be test-set elements themselves; any strict improvement
is accepted, and "no assembled move improves" still certifies
optimality because assembly covers every projected test-set element.

Composite objectives with shared rows (c_j, d_j) fold into the pair as
stacked matrices (T over C) and ((W, 0) over (D, I)), mirroring the
plain block construction.  Step lengths are enumerated directly over
the box span, which is the one deliberate concession to simplicity over
asymptotic step-count guarantees.
"""

from dataclasses import dataclass

from .augment import GreedyStep, TraceStep, AugmentTrace
from .errors import DimMismatch, DomainError, Infeasible, NotStabilized, UnboundedBox
from .graver import graver
from .linalg import Mat, is_zero
from .objective import CompositeObjective, LinearObjective, evaluate, range_bound

__all__ = [
    "TwoStageInstance",
    "TwoStagePoint",
    "BuildingBlocks",
    "build_twostage_matrix",
    "extract_building_blocks",
    "improving_vector",
    "greedy_step_twostage",
    "solve_twostage",
]


def build_twostage_matrix(T, W, N):
    """T repeated in the first column block, W block-diagonal after it."""
    if T.rows != W.rows:
        raise DimMismatch("T and W must share a row count")
    if N < 1:
        raise DomainError("N must be at least 1")
    d, n = T.rows, W.cols
    body = []
    for i in range(N):
        parts = [T]
        if i:
            parts.append(Mat.zeros(d, i * n))
        parts.append(W)
        if i < N - 1:
            parts.append(Mat.zeros(d, (N - 1 - i) * n))
        body.append(Mat.hstack(*parts))
    return Mat.vstack(*body)


@dataclass(frozen=True)
class TwoStagePoint:
    x: tuple
    ys: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "ys", tuple(tuple(y) for y in self.ys))

    def flatten(self):
        return self.x + sum(self.ys, ())

    @staticmethod
    def from_flat(flat, m, N, n):
        if len(flat) != m + N * n:
            raise DimMismatch("flat point has %d coordinates, expected %d" % (len(flat), m + N * n))
        x = tuple(flat[:m])
        ys = tuple(tuple(flat[m + i * n : m + (i + 1) * n]) for i in range(N))
        return TwoStagePoint(x, ys)


@dataclass(frozen=True)
class BuildingBlocks:
    """first_stage holds the v blocks; second_stage maps each v to the
    w blocks seen with it (every stored pair satisfies Tv + Ww = 0)."""

    first_stage: tuple
    second_stage: dict

    def pool(self, v):
        return self.second_stage.get(tuple(v), ())


def extract_building_blocks(T, W, C=None, D=None, cap=4):
    """Harvest first- and second-stage blocks from the test sets of the
    stacked pair at N = 1..cap.

    With objective rows (C, D) the pair is (T over C) and ((W, 0) over
    (D, I)); the auxiliary coordinates are dropped again after the
    computation since they are a linear image of (v, w).  Raises
    NotStabilized(cap) unless the harvested sets are identical after
    N = cap - 1 and N = cap.
    """
    if cap < 2:
        raise DomainError("cap must be at least 2")
    if (C is None) != (D is None):
        raise DomainError("C and D must be given together")
    m, n = T.cols, W.cols
    if C is not None and C.rows:
        if C.cols != m or D.cols != n or C.rows != D.rows:
            raise DimMismatch("objective rows must be s x m and s x n")
        s = C.rows
        Tc = Mat.vstack(T, C)
        Wc = Mat.vstack(Mat.hstack(W, Mat.zeros(T.rows, s)), Mat.hstack(D, Mat.identity(s)))
        width = n + s
    else:
        Tc, Wc, width = T, W, n

    first = set()
    second = {}

    def snapshot():
        return (frozenset(first), {v: frozenset(ws) for v, ws in second.items()})

    prev = None
    for N in range(1, cap + 1):
        G = graver(build_twostage_matrix(Tc, Wc, N))
        for e in G.elements:
            v = e[:m]
            first.add(v)
            bucket = second.setdefault(v, set())
            for i in range(N):
                w = e[m + i * width : m + i * width + n]
                bucket.add(w)
        if N == cap - 1:
            prev = snapshot()
    if prev != snapshot():
        raise NotStabilized(cap, "building blocks still growing at N = %d" % (cap,))
    return BuildingBlocks(
        tuple(sorted(first)),
        {v: tuple(sorted(ws)) for v, ws in second.items()},
    )


def _check_point(z, inst):
    if len(z.x) != inst.m or len(z.ys) != inst.N or any(len(y) != inst.n for y in z.ys):
        raise DimMismatch("point shape does not match the instance")


def _scenario_candidates(inst, blocks, v, alpha):
    """Per-scenario w pools for first-stage block v: harvested partners
    plus the zero block when v alone is in the kernel of T."""
    pool = blocks.pool(v)
    if is_zero(inst.T.mul_vec(v)) and (0,) * inst.n not in pool:
        pool = pool + ((0,) * inst.n,)
    return pool


def _boxed(point, delta, alpha, upper):
    out = []
    for p, d, u in zip(point, delta, upper):
        q = p + alpha * d
        if q < 0 or q > u:
            return None
        out.append(q)
    return tuple(out)


def _assemble(z, blocks, inst, alpha):
    """Best assembled move of length alpha, as (total, v, ws), or None.

    For each feasible first-stage block the scenarios decouple: each
    picks its own best partner block independently, and the sums of the
    per-scenario minima are compared across first-stage blocks.
    """
    best = None
    zero_v = (0,) * inst.m
    vs = blocks.first_stage if zero_v in blocks.first_stage else ((zero_v,) + blocks.first_stage)
    for v in sorted(vs):
        x2 = _boxed(z.x, v, alpha, inst.ux)
        if x2 is None:
            continue
        pool = _scenario_candidates(inst, blocks, v, alpha)
        total = 0
        ws = []
        dead = False
        for i in range(inst.N):
            best_i = None
            for w in pool:
                y2 = _boxed(z.ys[i], w, alpha, inst.uy[i])
                if y2 is None:
                    continue
                val = evaluate(inst.objective[i], x2 + y2)
                if best_i is None or (val, w) < best_i:
                    best_i = (val, w)
            if best_i is None:
                dead = True
                break
            total = total + best_i[0]
            ws.append(best_i[1])
        if dead:
            continue
        cand = (total, v, tuple(ws))
        if best is None or cand < best:
            best = cand
    return best


def improving_vector(z, blocks, inst):
    """One-step improving move (v, w_1..w_N), or None as an optimality
    certificate.  The move is in the kernel of the stacked matrix and
    feasible at step length one."""
    _check_point(z, inst)
    cur = inst.value(z)
    got = _assemble(z, blocks, inst, 1)
    if got is None:
        return None
    total, v, ws = got
    if total >= cur:
        return None
    if is_zero(v) and all(is_zero(w) for w in ws):
        return None
    return TwoStagePoint(v, ws)


def greedy_step_twostage(z, blocks, inst):
    """Best assembled move over all step lengths within the box span.

    Step lengths are enumerated 1..max bound; candidates are compared by
    (new value, length, move) so the result is deterministic.  Returns
    the zero step when nothing strictly improves.
    """
    _check_point(z, inst)
    cur = inst.value(z)
    span = max([0] + list(inst.ux) + [u for uy in inst.uy for u in uy])
    best = None
    for alpha in range(1, span + 1):
        got = _assemble(z, blocks, inst, alpha)
        if got is None:
            continue
        total, v, ws = got
        if total >= cur:
            continue
        if is_zero(v) and all(is_zero(w) for w in ws):
            continue
        cand = (total, alpha, v + sum(ws, ()))
        if best is None or cand < best:
            best = cand
    if best is None:
        return GreedyStep((0,) * (inst.m + inst.N * inst.n), 0, cur)
    total, alpha, flat = best
    return GreedyStep(flat, alpha, total)


@dataclass(frozen=True)
class TwoStageInstance:
    T: Mat
    W: Mat
    N: int
    b: tuple  # N right-hand sides, d entries each
    ux: tuple
    uy: tuple  # N bound vectors for the scenario stages
    objective: tuple  # N CompositeObjective over m + n coordinates

    def __post_init__(self):
        if self.T.rows != self.W.rows:
            raise DimMismatch("T and W must share a row count")
        if self.N < 1:
            raise DomainError("N must be at least 1")
        d = self.T.rows
        m, n = self.T.cols, self.W.cols
        b = tuple(tuple(x) for x in self.b)
        uy = tuple(tuple(x) for x in self.uy)
        ux = tuple(self.ux)
        obj = tuple(self.objective)
        if len(b) != self.N or len(uy) != self.N or len(obj) != self.N:
            raise DimMismatch("need exactly N right-hand sides, bounds, and objectives")
        for x in b:
            if len(x) != d:
                raise DimMismatch("scenario right-hand side dimension mismatch")
        if len(ux) != m or not all(isinstance(v, int) for v in ux):
            raise DomainError("ux must be an integer vector of the first-stage width")
        for u in uy:
            if len(u) != n or not all(isinstance(v, int) for v in u):
                raise DomainError("uy entries must be integer vectors of the scenario width")
        rows0 = None
        for f in obj:
            if not isinstance(f, CompositeObjective) or f.dim != m + n:
                raise DomainError("objectives must be composites over first plus scenario width")
            rows = tuple(r for r, _ in f.rows)
            if rows0 is None:
                rows0 = rows
            elif rows != rows0:
                raise DomainError("objective coefficient rows must be shared across scenarios")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "ux", ux)
        object.__setattr__(self, "uy", uy)
        object.__setattr__(self, "objective", obj)

    @property
    def m(self):
        return self.T.cols

    @property
    def n(self):
        return self.W.cols

    @property
    def s(self):
        return self.objective[0].s

    def rows_CD(self):
        m = self.m
        rows = tuple(r for r, _ in self.objective[0].rows)
        C = Mat(tuple(r[:m] for r in rows), cols=m)
        D = Mat(tuple(r[m:] for r in rows), cols=self.n)
        return C, D

    def matrix(self):
        return build_twostage_matrix(self.T, self.W, self.N)

    def value(self, z):
        return sum(evaluate(f, z.x + y) for f, y in zip(self.objective, z.ys))

    def check_feasible(self, z):
        _check_point(z, self)
        if any(x < 0 or x > u for x, u in zip(z.x, self.ux)):
            raise Infeasible("first-stage point violates its bounds")
        for i in range(self.N):
            if any(y < 0 or y > u for y, u in zip(z.ys[i], self.uy[i])):
                raise Infeasible("scenario %d point violates its bounds" % (i,))
            got = tuple(
                a + b
                for a, b in zip(self.T.mul_vec(z.x), self.W.mul_vec(z.ys[i]))
            )
            if got != self.b[i]:
                raise Infeasible("scenario %d constraints violated" % (i,))
        return z


def _phase_one_twostage(inst, cap):
    """Feasible point via slack columns on the scenario stages.

    The scenario matrix becomes (W, I, -I) with all-ones linear cost on
    the slack coordinates; the all-slack point is trivially feasible and
    the greedy walk over assembled block moves drives the slack sum to
    zero or certifies that it cannot reach zero."""
    d, m, n, N = inst.T.rows, inst.m, inst.n, inst.N
    if d == 0:
        return TwoStagePoint((0,) * m, tuple((0,) * n for _ in range(N)))
    W_ext = Mat.hstack(inst.W, Mat.identity(d), Mat(tuple(tuple(-1 if i == j else 0 for j in range(d)) for i in range(d)), cols=d))
    caps = []
    for r in range(d):
        c = max(abs(b[r]) for b in inst.b)
        c += sum(abs(inst.T.data[r][j]) * inst.ux[j] for j in range(m))
        c += sum(abs(inst.W.data[r][j]) * max(u[j] for u in inst.uy) for j in range(n))
        caps.append(c)
    slack_cost = (0,) * m + (0,) * n + (1,) * (2 * d)
    slack_obj = tuple(CompositeObjective(slack_cost, ()) for _ in range(N))
    uy_ext = tuple(tuple(u) + tuple(caps) * 2 for u in inst.uy)
    ys0 = []
    for bvec in inst.b:
        plus = tuple(max(v, 0) for v in bvec)
        minus = tuple(max(-v, 0) for v in bvec)
        ys0.append((0,) * n + plus + minus)
    slack_inst = TwoStageInstance(inst.T, W_ext, N, inst.b, inst.ux, uy_ext, slack_obj)
    z = TwoStagePoint((0,) * m, tuple(ys0))
    blocks = extract_building_blocks(inst.T, W_ext, cap=cap)
    while True:
        st = greedy_step_twostage(z, blocks, slack_inst)
        if st.is_zero:
            break
        z = _apply(z, st, m, N, n + 2 * d)
    if slack_inst.value(z) > 0:
        raise Infeasible("slack optimum is positive: no feasible point in the bounds")
    return TwoStagePoint(z.x, tuple(y[:n] for y in z.ys))


def _apply(z, step, m, N, n):
    v = step.direction[:m]
    x = tuple(a + step.steplen * d for a, d in zip(z.x, v))
    ys = []
    for i in range(N):
        w = step.direction[m + i * n : m + (i + 1) * n]
        ys.append(tuple(a + step.steplen * d for a, d in zip(z.ys[i], w)))
    return TwoStagePoint(x, ys)


def solve_twostage(inst, cap=4):
    """Global optimum of the instance with an augmentation trace.

    Phase one repairs feasibility through scenario slack columns; the
    main loop assembles greedy moves from the stabilized block pools
    until none improves, which certifies optimality.
    """
    C, D = inst.rows_CD()
    blocks = extract_building_blocks(inst.T, inst.W, C, D, cap=cap)
    z = _phase_one_twostage(inst, cap)
    inst.check_feasible(z)
    m, n, N = inst.m, inst.n, inst.N
    n_eff = max(1, 2 * (m + N * n + N * inst.s) - 2)
    try:
        h = range_bound(
            _flatten_objective(inst),
            (0,) * (m + N * n),
            inst.ux + sum(inst.uy, ()),
        )
    except (UnboundedBox, DomainError):
        h = None
    steps = []
    cur = inst.value(z)
    while True:
        st = greedy_step_twostage(z, blocks, inst)
        if st.is_zero:
            break
        assert st.new_value < cur
        steps.append(TraceStep(cur, st.new_value, st.direction, st.steplen))
        z = _apply(z, st, m, N, n)
        cur = st.new_value
    pairs = sum(len(blocks.pool(v)) for v in blocks.first_stage)
    return z, AugmentTrace(tuple(steps), h, n_eff, basis_size=pairs)


def _flatten_objective(inst):
    m, n, N = inst.m, inst.n, inst.N
    dim = m + N * n
    c = [0] * dim
    rows = []
    for i, f in enumerate(inst.objective):
        for k in range(m):
            c[k] += f.c[k]
        for k in range(n):
            c[m + i * n + k] += f.c[m + k]
        for r, fn in f.rows:
            row = [0] * dim
            for k in range(m):
                row[k] = r[k]
            for k in range(n):
                row[m + i * n + k] = r[m + k]
            rows.append((tuple(row), fn))
    return CompositeObjective(tuple(c), tuple(rows))
