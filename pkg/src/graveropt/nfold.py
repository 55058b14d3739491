"""Block-structured programs with a repeated block and coupling rows.

An instance has N copies of a block variable x^(i) (n coordinates each),
per-block constraints A x^(i) = b^(i), and coupling constraints
sum_i B x^(i) = b0.  The full constraint matrix (B repeated across the
top, A block-diagonal below) has a key property: the maximum number of
nonzero blocks over its conformal test-set elements is bounded by a
constant g depending on (A, B) only, not on N.  That constant is
detected empirically here (stabilization of the maximum type between
two consecutive N, with a cap), and the test set for any larger N is
then assembled by embedding the nonzero-block sequences of the small
basis into N slots in every order-preserving way.

Composite objectives ride along by folding their shared coefficient
rows into the block: [[A,0],[rows,I]] is again a block matrix of the
same shape, so the same lifting applies.

Feasibility (phase one) is a two-tier slack construction: first each
block alone against its A-rows, then the coupling rows with slack
columns attached to them only.  Both tiers start from a trivially
feasible slack point and greedily drive the slack sum to zero; a
positive optimum is a certificate of infeasibility because the greedy
walk uses the complete test set of the extended matrix.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .augment import FeasibleBox, solve_ip_greedy
from .errors import DimMismatch, DomainError, Infeasible, NotStabilized, NTooSmall
from .graver import GraverBasis, graver, graver_composite
from .linalg import Mat, is_zero, vec_neg
from .objective import CompositeObjective, LinearObjective, evaluate

# Repeated solves over the same constraint matrix (decode batches, the
# per-block feasibility subproblems) reuse the test set; matrices are
# immutable and hashable so the cache key is the matrix itself.
_graver_cached = lru_cache(maxsize=64)(graver)
_graver_composite_cached = lru_cache(maxsize=64)(graver_composite)

__all__ = [
    "NFoldInstance",
    "BlockVector",
    "LiftedGraver",
    "build_nfold_matrix",
    "compose_with_C",
    "graver_complexity",
    "analyze_pair",
    "lift_graver",
    "phase_one",
    "solve_nfold",
]

DIRECT_THRESHOLD = 24  # flat variable count up to which the test set is computed directly


def build_nfold_matrix(A, B, N):
    """[B B ... B] across the top, A block-diagonal below."""
    if A.cols != B.cols:
        raise DimMismatch("A and B must share a column count")
    if N < 1:
        raise DomainError("N must be at least 1")
    n = A.cols
    top = Mat.hstack(*([B] * N))
    body = []
    for i in range(N):
        parts = []
        if i:
            parts.append(Mat.zeros(A.rows, i * n))
        parts.append(A)
        if i < N - 1:
            parts.append(Mat.zeros(A.rows, (N - 1 - i) * n))
        body.append(Mat.hstack(*parts))
    return Mat.vstack(top, *body)


def compose_with_C(A, B, C, N):
    """Block matrix with objective rows C folded in, plus the row and
    column maps onto its per-block-interleaved form.

    The returned matrix keeps all x-columns first (block-diagonal C with
    an identity to the right, below the plain block matrix).  The same
    system, with each block's auxiliary columns interleaved after its
    x-columns, is the block matrix of the pair ((A 0; C I), (B 0)); the
    maps say which interleaved row/column each returned row/column is,
    so printed[i][j] == interleaved[row_map[i]][col_map[j]].
    """
    if C.cols != A.cols:
        raise DimMismatch("C must have %d columns" % (A.cols,))
    n = A.cols
    s = C.rows
    da = A.rows
    db = B.rows
    base = build_nfold_matrix(A, B, N)
    if s == 0:
        return base, (tuple(range(base.rows)), tuple(range(base.cols)))
    left = Mat.vstack(base, *[_embed_block(C, i, N) for i in range(N)])
    right = Mat.vstack(Mat.zeros(db + N * da, N * s), Mat.identity(N * s))
    printed = Mat.hstack(left, right)
    col_map = []
    for i in range(N):
        for k in range(n):
            col_map.append(i * (n + s) + k)
    for i in range(N):
        for k in range(s):
            col_map.append(i * (n + s) + n + k)
    row_map = list(range(db))
    for i in range(N):
        for k in range(da):
            row_map.append(db + i * (da + s) + k)
    for i in range(N):
        for k in range(s):
            row_map.append(db + i * (da + s) + da + k)
    return printed, (tuple(row_map), tuple(col_map))


def _embed_block(M, i, N):
    parts = []
    if i:
        parts.append(Mat.zeros(M.rows, i * M.cols))
    parts.append(M)
    if i < N - 1:
        parts.append(Mat.zeros(M.rows, (N - 1 - i) * M.cols))
    return Mat.hstack(*parts)


@dataclass(frozen=True)
class BlockVector:
    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))

    def flatten(self):
        return sum(self.blocks, ())

    @property
    def btype(self):
        return sum(1 for b in self.blocks if not is_zero(b))

    @staticmethod
    def from_flat(flat, N, n):
        if len(flat) != N * n:
            raise DimMismatch("flat vector has %d coordinates, expected %d" % (len(flat), N * n))
        return BlockVector(tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(N)))


def _block_split(flat, n):
    return tuple(tuple(flat[i : i + n]) for i in range(0, len(flat), n))


def _nonzero_blocks(flat, n):
    return tuple(b for b in _block_split(flat, n) if not is_zero(b))


@dataclass(frozen=True)
class LiftedGraver:
    """Type-bounded generators of the block test sets of a pair.

    seed_elements maps each type t (number of nonzero blocks) to the
    canonical tuple of nonzero-block sequences occurring at that type;
    embedding those sequences order-preservingly into N slots yields the
    full test set for every N >= target_N.
    """

    A: Mat
    B: Mat
    generator_type_bound: int
    seed_elements: tuple  # of (type, tuple of block sequences)
    target_N: int

    def sequences(self):
        for t, seqs in self.seed_elements:
            for seq in seqs:
                yield t, seq


def _max_type(elements, n):
    worst = 0
    for e in elements:
        worst = max(worst, len(_nonzero_blocks(e, n)))
    return worst


def analyze_pair(A, B, cap=6):
    """Detect the type bound of the pair and collect seed generators.

    Walks N = 1, 2, ... computing the test set directly; stops at the
    smallest g with maximum type exactly g at both N = g and N = g + 1.
    A pair whose test sets are empty at N = 1 and 2 stabilizes trivially
    at bound 1.  NotStabilized(cap) when no g <= cap qualifies.
    """
    if cap < 2:
        raise DomainError("cap must be at least 2")
    if A.cols != B.cols:
        raise DimMismatch("A and B must share a column count")
    n = A.cols
    bases = {}

    def basis_at(N):
        if N not in bases:
            bases[N] = graver(build_nfold_matrix(A, B, N)).elements
        return bases[N]

    if not basis_at(1) and not basis_at(2):
        return LiftedGraver(A, B, 1, (), 1)
    for g in range(1, cap + 1):
        if _max_type(basis_at(g), n) == g and _max_type(basis_at(g + 1), n) == g:
            grouped = {}
            for e in basis_at(g):
                seq = _nonzero_blocks(e, n)
                grouped.setdefault(len(seq), set()).add(seq)
            seeds = tuple((t, tuple(sorted(grouped[t]))) for t in sorted(grouped))
            return LiftedGraver(A, B, g, seeds, g)
    raise NotStabilized(cap, "maximum block type kept growing through N = %d" % (cap + 1,))


def graver_complexity(A, B, cap=6):
    """Smallest bound on the number of nonzero blocks of test-set
    elements of the pair, detected by stabilization up to the cap."""
    return analyze_pair(A, B, cap).generator_type_bound


def lift_graver(seed, N):
    """Test set of the pair at width N, assembled from the seeds.

    Every order-preserving placement of each seed's nonzero blocks into
    the N slots, padded with zero blocks.  Complete because the directly
    computed sets are closed under block permutation and their elements
    never have more than generator_type_bound nonzero blocks.
    """
    if N < seed.generator_type_bound:
        raise NTooSmall(
            "N = %d below the generator type bound %d" % (N, seed.generator_type_bound)
        )
    n = seed.A.cols
    out = set()
    for t, seq in seed.sequences():
        for slots in combinations(range(N), t):
            v = [0] * (N * n)
            for blk, i in zip(seq, slots):
                v[i * n : (i + 1) * n] = blk
            out.add(tuple(v))
    return GraverBasis(build_nfold_matrix(seed.A, seed.B, N), tuple(sorted(out)))


@dataclass(frozen=True)
class NFoldInstance:
    """N repeated blocks under shared per-block matrix A and coupling
    matrix B; objectives are one composite per block over that block's
    coordinates, all sharing the same coefficient rows."""

    A: Mat
    B: Mat
    N: int
    b0: tuple
    b: tuple  # N right-hand sides, one per block
    upper: tuple  # N bound vectors, one per block
    objective: tuple  # N CompositeObjective over n coordinates

    def __post_init__(self):
        if self.A.cols != self.B.cols:
            raise DimMismatch("A and B must share a column count")
        if self.N < 1:
            raise DomainError("N must be at least 1")
        n = self.A.cols
        b0 = tuple(self.b0)
        if len(b0) != self.B.rows:
            raise DimMismatch("b0 has %d entries, B has %d rows" % (len(b0), self.B.rows))
        b = tuple(tuple(x) for x in self.b)
        upper = tuple(tuple(x) for x in self.upper)
        obj = tuple(self.objective)
        if len(b) != self.N or len(upper) != self.N or len(obj) != self.N:
            raise DimMismatch("need exactly N right-hand sides, bounds, and objectives")
        for x in b:
            if len(x) != self.A.rows:
                raise DimMismatch("block right-hand side dimension mismatch")
        for x in upper:
            if len(x) != n or not all(isinstance(v, int) for v in x):
                raise DomainError("bounds must be integer vectors of block width")
        rows0 = None
        for f in obj:
            if not isinstance(f, CompositeObjective) or f.dim != n:
                raise DomainError("objectives must be composites over the block width")
            rows = tuple(r for r, _ in f.rows)
            if rows0 is None:
                rows0 = rows
            elif rows != rows0:
                raise DomainError("objective coefficient rows must be shared across blocks")
        object.__setattr__(self, "b0", b0)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "objective", obj)

    @property
    def n(self):
        return self.A.cols

    @property
    def s(self):
        return self.objective[0].s

    def shared_rows(self):
        return Mat(tuple(r for r, _ in self.objective[0].rows), cols=self.n)

    def matrix(self):
        return build_nfold_matrix(self.A, self.B, self.N)

    def box(self):
        flat_b = self.b0 + sum(self.b, ())
        flat_u = sum(self.upper, ())
        dim = self.N * self.n
        return FeasibleBox(self.matrix(), flat_b, (0,) * dim, flat_u)

    def flatten_objective(self):
        n, N = self.n, self.N
        c = sum((f.c for f in self.objective), ())
        rows = []
        for i, f in enumerate(self.objective):
            pad_l = (0,) * (i * n)
            pad_r = (0,) * ((N - 1 - i) * n)
            for r, fn in f.rows:
                rows.append((pad_l + r + pad_r, fn))
        return CompositeObjective(c, tuple(rows))


def _unit_rows_only(C):
    # +-unit coefficient rows make the auxiliary coordinates mirror plain
    # ones, so folding them into the matrix changes nothing about the set
    # of usable step directions
    for row in C.data:
        nz = [a for a in row if a]
        if len(nz) != 1 or abs(nz[0]) != 1:
            return False
    return True


def _ones_cost(total, slack_from):
    return LinearObjective((0,) * slack_from + (1,) * (total - slack_from))


def _neg_identity(k):
    return Mat(tuple(tuple(-1 if i == j else 0 for j in range(k)) for i in range(k)), cols=k)


def _min_slack(E, rhs, x_upper, slack_upper, x_start, slack_start, threads=None):
    """Drive the slack sum to zero over E (x-columns then slack columns).

    Returns the x-part on success, None when the certified optimum of
    the slack sum is positive.
    """
    nx = len(x_upper)
    lower = (0,) * E.cols
    upper = tuple(x_upper) + tuple(slack_upper)
    box = FeasibleBox(E, tuple(rhs), lower, upper)
    z0 = tuple(x_start) + tuple(slack_start)
    cost = _ones_cost(E.cols, nx)
    basis = _graver_cached(E)
    z, _ = solve_ip_greedy(z0, basis, cost, box, threads=threads, h_warn_factor=None)
    if evaluate(cost, z) > 0:
        return None
    return z[:nx]


def _split_residual(r):
    plus = tuple(max(x, 0) for x in r)
    minus = tuple(max(-x, 0) for x in r)
    return plus, minus


def phase_one(inst, threads=None):
    """Feasible block point of the instance, or a certified Infeasible.

    Tier one treats each block alone: A x = b^(i) with slack columns
    +-identity on the A-rows, starting from the all-slack point.  Tier
    two keeps the found blocks and repairs the coupling rows the same
    way, with slack columns attached to the coupling rows only.  Both
    tiers certify a positive slack optimum as infeasibility because the
    greedy walk uses the complete test set of the extended matrix.
    """
    A, B, N, n = inst.A, inst.B, inst.N, inst.n
    da, db = A.rows, B.rows
    xs = []
    if da:
        E1 = Mat.hstack(A, Mat.identity(da), _neg_identity(da))
        slack_cap = []
        for r in range(da):
            cap = max(abs(bb[r]) for bb in inst.b) if inst.b else 0
            cap += sum(abs(A.data[r][j]) * max(u[j] for u in inst.upper) for j in range(n))
            slack_cap.append(cap)
        basis_cache = _graver_cached(E1)
        for i in range(N):
            rhs = inst.b[i]
            plus, minus = _split_residual(rhs)
            box = FeasibleBox(
                E1,
                rhs,
                (0,) * E1.cols,
                tuple(inst.upper[i]) + tuple(slack_cap) * 2,
            )
            z0 = (0,) * n + plus + minus
            cost = _ones_cost(E1.cols, n)
            z, _ = solve_ip_greedy(z0, basis_cache, cost, box, threads=threads, h_warn_factor=None)
            if evaluate(cost, z) > 0:
                raise Infeasible("block %d: A x = b^(%d) has no point in the bounds" % (i, i))
            xs.append(z[:n])
    else:
        xs = [(0,) * n for _ in range(N)]
    if db == 0:
        return BlockVector(tuple(xs))

    flat_x = sum((tuple(x) for x in xs), ())
    coupled = tuple(sum(B.data[r][j] * xs[i][j] for i in range(N) for j in range(n)) for r in range(db))
    residual = tuple(inst.b0[r] - coupled[r] for r in range(db))
    if all(v == 0 for v in residual):
        return BlockVector(tuple(xs))

    base = inst.matrix()
    slack_rows = Mat.vstack(
        Mat.hstack(Mat.identity(db), _neg_identity(db)),
        Mat.zeros(N * da, 2 * db),
    )
    E2 = Mat.hstack(base, slack_rows)
    cap = []
    for r in range(db):
        c = abs(inst.b0[r])
        c += sum(abs(B.data[r][j]) * max(u[j] for u in inst.upper) for j in range(n)) * N
        cap.append(c)
    plus, minus = _split_residual(residual)
    rhs = inst.b0 + sum(inst.b, ())
    x_part = _min_slack(
        E2,
        rhs,
        sum(inst.upper, ()),
        tuple(cap) * 2,
        flat_x,
        plus + minus,
        threads=threads,
    )
    if x_part is None:
        raise Infeasible("coupling rows cannot be met within the bounds")
    return BlockVector.from_flat(x_part, N, n)


def solve_nfold(inst, threads=None, graver_cap=6, direct_threshold=DIRECT_THRESHOLD, z0=None):
    """Global optimum of the instance with an augmentation trace.

    Directions come from the test set of the full matrix (with the
    objective's shared coefficient rows folded in unless they are all
    +-unit rows, which contribute nothing).  Up to direct_threshold flat
    variables the set is computed directly; beyond that it is lifted
    from the stabilized seed generators.  Then phase one and the greedy
    walk; a caller that already holds a feasible point can pass it as z0
    (a BlockVector or flat tuple) to skip phase one.
    """
    n, N = inst.n, inst.N
    C = inst.shared_rows()
    flat = inst.flatten_objective()
    box = inst.box()
    plain = C.rows == 0 or _unit_rows_only(C)
    if N * n <= direct_threshold:
        M = inst.matrix()
        if plain:
            basis = _graver_cached(M)
        else:
            C_flat = Mat.vstack(*[_embed_block(C, i, N) for i in range(N)])
            basis = _graver_composite_cached(M, C_flat)
        dirs = basis.directions()
    elif plain:
        seed = analyze_pair(inst.A, inst.B, cap=graver_cap)
        dirs = lift_graver(seed, N).elements
    else:
        s = C.rows
        Abar = Mat.vstack(
            Mat.hstack(inst.A, Mat.zeros(inst.A.rows, s)),
            Mat.hstack(C, Mat.identity(s)),
        )
        Bbar = Mat.hstack(inst.B, Mat.zeros(inst.B.rows, s))
        seed = analyze_pair(Abar, Bbar, cap=graver_cap)
        lifted = lift_graver(seed, N)
        width = n + s
        seen = set()
        proj = []
        for e in lifted.elements:
            p = sum((e[i * width : i * width + n] for i in range(N)), ())
            if not is_zero(p) and p not in seen:
                seen.add(p)
                proj.append(p)
        dirs = tuple(sorted(proj))
    if z0 is None:
        start = phase_one(inst, threads=threads).flatten()
    else:
        start = z0.flatten() if isinstance(z0, BlockVector) else tuple(z0)
        box.check_point(start)
    zopt, trace = solve_ip_greedy(start, dirs, flat, box, threads=threads)
    return BlockVector.from_flat(zopt, N, n), trace
