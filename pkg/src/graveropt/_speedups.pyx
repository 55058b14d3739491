# distutils: language = c++
# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled reduction kernels.

Twin of graveropt._kernels_py with identical results.  The hot paths run
on C int64 arrays; any value outside the guarded magnitude window makes
the affected call fall back to the pure twin, so exactness never depends
on the machine word size.  cdivision is safe here because every quotient
taken has operands of equal sign, where C truncation agrees with Python
floor division.
"""

from libcpp.vector cimport vector

from cpython.bytes cimport PyBytes_FromStringAndSize

from . import _kernels_py as _py

cdef extern from "Python.h":
    long long PyLong_AsLongLongAndOverflow(object, int*) except? -1

BACKEND = "cython"

# Seeds of a completion run must fit 31 bits; pool entries may grow to
# 2**48 before the run restarts in the pure twin.  Within those caps
# every pair sum, conformal multiple and l1 norm fits int64 up to
# DIM_CAP coordinates.
cdef long long INPUT_CAP = (<long long>1) << 31
cdef long long POOL_CAP = (<long long>1) << 48
cdef Py_ssize_t DIM_CAP = 2048


class _Overflow(Exception):
    pass


def sign_compatible(u, v):
    """True iff u[i]*v[i] >= 0 for all i (no coordinate fights the other)."""
    cdef int ov = 0
    cdef long long a, b
    for x, y in zip(u, v):
        a = PyLong_AsLongLongAndOverflow(x, &ov)
        if ov:
            return _py.sign_compatible(u, v)
        b = PyLong_AsLongLongAndOverflow(y, &ov)
        if ov:
            return _py.sign_compatible(u, v)
        if (a > 0 and b < 0) or (a < 0 and b > 0):
            return False
    return True


def conforms(g, v):
    """True iff g lies in the same closed orthant as v and |g| <= |v| entrywise."""
    cdef int ov = 0
    cdef long long a, b
    for x, y in zip(g, v):
        a = PyLong_AsLongLongAndOverflow(x, &ov)
        if ov:
            return _py.conforms(g, v)
        b = PyLong_AsLongLongAndOverflow(y, &ov)
        if ov:
            return _py.conforms(g, v)
        if a > 0:
            if b < a:
                return False
        elif a < 0:
            if b > a:
                return False
    return True


def vec_add(u, v):
    return tuple([a + b for a, b in zip(u, v)])


def vec_sub(u, v):
    return tuple([a - b for a, b in zip(u, v)])


def vec_neg(u):
    return tuple([-a for a in u])


def is_zero(u):
    for a in u:
        if a:
            return False
    return True


def l1(u):
    cdef int ov = 0
    cdef long long total = 0, a
    if len(u) > DIM_CAP:
        return _py.l1(u)
    for x in u:
        a = PyLong_AsLongLongAndOverflow(x, &ov)
        if ov or a >= POOL_CAP or a <= -POOL_CAP:
            return _py.l1(u)
        total += a if a >= 0 else -a
    return total


def conformal_multiple(s, g):
    """Largest m >= 0 with m*g conformally below s."""
    cdef int ov = 0
    cdef long long a, b, q, m = 0
    cdef bint have = False
    for x, y in zip(s, g):
        b = PyLong_AsLongLongAndOverflow(y, &ov)
        if ov:
            return _py.conformal_multiple(s, g)
        if b == 0:
            continue
        a = PyLong_AsLongLongAndOverflow(x, &ov)
        if ov:
            return _py.conformal_multiple(s, g)
        if b > 0:
            if a < b:
                return 0
        elif a > b:
            return 0
        q = a // b
        if not have or q < m:
            m = q
            have = True
    return m if have else 0


def reduce_ordered(s, red):
    """Reduce s against reducers sorted by ascending l1 norm."""
    cur = s
    norm = l1(cur)
    while norm:
        hit = False
        for ng, g in red:
            if ng > norm:
                break
            m = conformal_multiple(cur, g)
            if m:
                cur = tuple([a - m * b for a, b in zip(cur, g)])
                norm = l1(cur)
                hit = True
                break
        if not hit:
            break
    return cur


def normal_form(s, pool):
    """Reduce s by conformal subtraction against pool until irreducible."""
    while True:
        if is_zero(s):
            return s
        hit = False
        for g in pool:
            m = conformal_multiple(s, g)
            if m:
                s = tuple([a - m * b for a, b in zip(s, g)])
                hit = True
                break
        if not hit:
            return s


cdef class _Completer:
    cdef Py_ssize_t n
    cdef vector[long long] pool   # flat rows, width n
    cdef vector[long long] norms
    cdef vector[Py_ssize_t] red   # pool indices sorted by (norm, lex)
    cdef vector[long long] hkey   # binary heap of (key, i, j)
    cdef vector[Py_ssize_t] hi
    cdef vector[Py_ssize_t] hj
    cdef set seen

    cdef bytes _key(self, vector[long long]& row):
        return PyBytes_FromStringAndSize(<char*>&row[0], self.n * sizeof(long long))

    cdef long long _norm_of(self, vector[long long]& row):
        cdef long long t = 0, a
        cdef Py_ssize_t k
        for k in range(self.n):
            a = row[k]
            t += a if a >= 0 else -a
        return t

    cdef bint _sign_comp(self, Py_ssize_t ta, vector[long long]& row):
        cdef Py_ssize_t k, off = ta * self.n
        cdef long long a, b
        for k in range(self.n):
            a = self.pool[off + k]
            b = row[k]
            if (a > 0 and b < 0) or (a < 0 and b > 0):
                return False
        return True

    cdef int _cmp_pool_row(self, Py_ssize_t ta, vector[long long]& row):
        # lexicographic compare pool[ta] against row: -1, 0, or 1
        cdef Py_ssize_t k, off = ta * self.n
        for k in range(self.n):
            if self.pool[off + k] != row[k]:
                return -1 if self.pool[off + k] < row[k] else 1
        return 0

    cdef void _hpush(self, long long key, Py_ssize_t i, Py_ssize_t j):
        cdef Py_ssize_t c = self.hkey.size(), p
        self.hkey.push_back(key)
        self.hi.push_back(i)
        self.hj.push_back(j)
        while c:
            p = (c - 1) >> 1
            if not self._hless(c, p):
                break
            self._hswap(c, p)
            c = p

    cdef bint _hless(self, Py_ssize_t a, Py_ssize_t b):
        if self.hkey[a] != self.hkey[b]:
            return self.hkey[a] < self.hkey[b]
        if self.hi[a] != self.hi[b]:
            return self.hi[a] < self.hi[b]
        return self.hj[a] < self.hj[b]

    cdef void _hswap(self, Py_ssize_t a, Py_ssize_t b):
        self.hkey[a], self.hkey[b] = self.hkey[b], self.hkey[a]
        self.hi[a], self.hi[b] = self.hi[b], self.hi[a]
        self.hj[a], self.hj[b] = self.hj[b], self.hj[a]

    cdef void _hpop(self, Py_ssize_t* i, Py_ssize_t* j):
        cdef Py_ssize_t last = self.hkey.size() - 1, c = 0, l, r, m
        i[0] = self.hi[0]
        j[0] = self.hj[0]
        self._hswap(0, last)
        self.hkey.pop_back()
        self.hi.pop_back()
        self.hj.pop_back()
        last -= 1
        while True:
            l = 2 * c + 1
            if l > last:
                break
            r = l + 1
            m = l
            if r <= last and self._hless(r, l):
                m = r
            if self._hless(m, c):
                self._hswap(c, m)
                c = m
            else:
                break

    cdef int _add(self, vector[long long]& row) except -1:
        cdef Py_ssize_t idx = self.norms.size(), t, lo, hi, mid, k
        cdef long long nv, a
        for k in range(self.n):
            a = row[k]
            if a >= POOL_CAP or a <= -POOL_CAP:
                raise _Overflow()
        nv = self._norm_of(row)
        self.seen.add(self._key(row))
        for k in range(self.n):
            self.pool.push_back(row[k])
        self.norms.push_back(nv)
        # insertion point in red: first entry with (norm, lex) above row
        lo = 0
        hi = self.red.size()
        while lo < hi:
            mid = (lo + hi) >> 1
            t = self.red[mid]
            if self.norms[t] < nv or (self.norms[t] == nv and self._cmp_pool_row(t, row) < 0):
                lo = mid + 1
            else:
                hi = mid
        self.red.insert(self.red.begin() + lo, idx)
        # queue sign-incompatible pairs only; compatible sums reduce to zero
        for t in range(idx):
            if not self._sign_comp(t, row):
                self._hpush(self.norms[t] + nv, t, idx)
        return 0

    cdef int _reduce(self, vector[long long]& cur) except -1:
        # in-place ordered reduction; red is scanned ascending with an
        # early stop once reducer norms pass the current norm
        cdef long long norm = self._norm_of(cur), m, q, a, b, ng
        cdef Py_ssize_t k, pos, t, off
        cdef bint hit, have
        while norm:
            hit = False
            for pos in range(self.red.size()):
                t = self.red[pos]
                ng = self.norms[t]
                if ng > norm:
                    break
                off = t * self.n
                m = 0
                have = True
                for k in range(self.n):
                    b = self.pool[off + k]
                    if b == 0:
                        continue
                    a = cur[k]
                    if b > 0:
                        if a < b:
                            have = False
                            break
                    elif a > b:
                        have = False
                        break
                    q = a // b
                    if m == 0 or q < m:
                        m = q
                if have and m:
                    for k in range(self.n):
                        cur[k] -= m * self.pool[off + k]
                    norm = self._norm_of(cur)
                    hit = True
                    break
            if not hit:
                break
        return 0

    cdef list run(self, list gens):
        cdef vector[long long] tmp
        cdef Py_ssize_t i, j, k
        cdef int ov = 0
        cdef long long x
        cdef bint nonzero
        self.n = len(gens[0])
        self.seen = set()
        for b in gens:
            if len(b) != self.n:
                raise _Overflow()
            tmp.clear()
            nonzero = False
            for item in b:
                x = PyLong_AsLongLongAndOverflow(item, &ov)
                if ov or x >= INPUT_CAP or x <= -INPUT_CAP:
                    raise _Overflow()
                if x:
                    nonzero = True
                tmp.push_back(x)
            for _ in range(2):
                if nonzero and self._key(tmp) not in self.seen:
                    self._add(tmp)
                for k in range(self.n):
                    tmp[k] = -tmp[k]
        while self.hkey.size():
            self._hpop(&i, &j)
            tmp.clear()
            nonzero = False
            for k in range(self.n):
                x = self.pool[i * self.n + k] + self.pool[j * self.n + k]
                if x:
                    nonzero = True
                tmp.push_back(x)
            if not nonzero:
                continue
            self._reduce(tmp)
            nonzero = False
            for k in range(self.n):
                if tmp[k]:
                    nonzero = True
                    break
            if not nonzero or self._key(tmp) in self.seen:
                continue
            self._add(tmp)
            for k in range(self.n):
                tmp[k] = -tmp[k]
            self._add(tmp)
        out = []
        for i in range(self.norms.size()):
            out.append(tuple([self.pool[i * self.n + k] for k in range(self.n)]))
        return out


def complete(generators):
    """Close a kernel lattice basis under conformal summation (Pottier).

    Same procedure and ordering as the pure twin; see there for the
    algorithm.  Falls back to the pure twin when a value leaves the
    int64-safe window.
    """
    gens = [tuple(g) for g in generators]
    if not gens:
        return []
    if len(gens[0]) == 0 or len(gens[0]) > DIM_CAP:
        return _py.complete(gens)
    try:
        return _Completer().run(gens)
    except _Overflow:
        return _py.complete(gens)


def minimal_elements(elems):
    """Filter a list of nonzero vectors down to its conformally minimal ones."""
    ordered = sorted(set(elems), key=lambda v: (l1(v), v))
    if not ordered:
        return []
    cdef Py_ssize_t N = len(ordered), n = len(ordered[0])
    cdef Py_ssize_t i, j, k, off_g, off_v
    cdef int ov = 0
    cdef long long x, a, b
    cdef bint ok
    if n == 0 or n > DIM_CAP:
        return _py.minimal_elements(elems)
    cdef vector[long long] data
    for v in ordered:
        if len(v) != n:
            return _py.minimal_elements(elems)
        for item in v:
            x = PyLong_AsLongLongAndOverflow(item, &ov)
            if ov or x >= POOL_CAP or x <= -POOL_CAP:
                return _py.minimal_elements(elems)
            data.push_back(x)
    cdef vector[Py_ssize_t] kept
    out = []
    for i in range(N):
        ok = True
        for j in range(<Py_ssize_t>kept.size()):
            off_g = kept[j] * n
            off_v = i * n
            ok = False
            for k in range(n):
                a = data[off_g + k]
                b = data[off_v + k]
                if a > 0:
                    if b < a:
                        ok = True
                        break
                elif a < 0:
                    if b > a:
                        ok = True
                        break
            if not ok:
                break
        if ok:
            kept.push_back(i)
            out.append(ordered[i])
    return out
