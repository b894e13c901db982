"""Exact linear algebra over the expression field and over plain rationals.

Expression matrices use field elimination with is_zero() pivot tests, so
parametric entries are handled generically (a pivot is usable whenever it is
not identically zero).  Pure-rational paths take lists of Fractions and stay
fast for the sampling-based rank computations.
"""

from __future__ import annotations

from fractions import Fraction

from .expr import EXPR_ONE, EXPR_ZERO, KernelError


class Matrix:
    """A dense matrix of expressions."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows):
        self.rows = tuple(tuple(r) for r in rows)
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != self.ncols:
                raise KernelError("ragged matrix")

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "Matrix(%d x %d)" % (self.nrows, self.ncols)

    @staticmethod
    def identity(n):
        return Matrix(
            [[EXPR_ONE if i == j else EXPR_ZERO for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zeros(n, m=None):
        m = n if m is None else m
        return Matrix([[EXPR_ZERO] * m for _ in range(n)])

    def mul(self, other):
        if self.ncols != other.nrows:
            raise KernelError("shape mismatch in matrix product")
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = EXPR_ZERO
                for k in range(self.ncols):
                    a = self.rows[i][k]
                    b = other.rows[k][j]
                    if a.is_zero() or b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Matrix(out)

    def add(self, other):
        return Matrix(
            [
                [self.rows[i][j] + other.rows[i][j] for j in range(self.ncols)]
                for i in range(self.nrows)
            ]
        )

    def sub(self, other):
        return Matrix(
            [
                [self.rows[i][j] - other.rows[i][j] for j in range(self.ncols)]
                for i in range(self.nrows)
            ]
        )

    def scale(self, c):
        return Matrix([[c * v for v in row] for row in self.rows])

    def shift(self, c):
        """self + c * identity."""
        out = [list(r) for r in self.rows]
        for i in range(self.nrows):
            out[i][i] = out[i][i] + c
        return Matrix(out)

    def transpose(self):
        return Matrix(
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)]
        )

    def map(self, fn):
        return Matrix([[fn(v) for v in row] for row in self.rows])

    def row_vector_times(self, vec):
        """vec (length nrows) times self, returning a list of expressions."""
        out = []
        for j in range(self.ncols):
            acc = EXPR_ZERO
            for i in range(self.nrows):
                v = vec[i]
                m = self.rows[i][j]
                if v.is_zero() or m.is_zero():
                    continue
                acc = acc + v * m
            out.append(acc)
        return out

    def is_zero(self):
        return all(v.is_zero() for row in self.rows for v in row)

    def is_identity(self):
        for i in range(self.nrows):
            for j in range(self.ncols):
                want_one = i == j
                v = self.rows[i][j]
                if want_one and not v.is_one():
                    return False
                if not want_one and not v.is_zero():
                    return False
        return True

    def power(self, k):
        out = Matrix.identity(self.nrows)
        base = self
        n = k
        while n:
            if n & 1:
                out = out.mul(base)
            n >>= 1
            if n:
                base = base.mul(base)
        return out


# ---------------------------------------------------------------------------
# elimination over the expression field


def rref_exprs(rows):
    """Reduced row echelon form; returns (rows, pivot_columns, pivot_values).

    pivot_values collects the expressions that were divided by, i.e. the
    genericity assumptions under which the echelon form is valid.
    """
    m = [list(r) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    pivots = []
    assumptions = []
    r = 0
    for c in range(nc):
        pr = None
        for i in range(r, nr):
            if not m[i][c].is_zero():
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        if not pv.is_one():
            assumptions.append(pv)
            m[r] = [v / pv for v in m[r]]
        for i in range(nr):
            if i == r:
                continue
            f = m[i][c]
            if f.is_zero():
                continue
            m[i] = [m[i][j] - f * m[r][j] for j in range(nc)]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return m, pivots, assumptions


def rank_exprs(rows):
    _, pivots, _ = rref_exprs(rows)
    return len(pivots)


def nullspace_exprs(rows):
    """Basis of the right kernel as lists of expressions."""
    m, pivots, _ = rref_exprs(rows)
    nc = len(rows[0]) if rows else 0
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fc in free:
        vec = [EXPR_ZERO] * nc
        vec[fc] = EXPR_ONE
        for r, pc in enumerate(pivots):
            vec[pc] = -m[r][fc]
        basis.append(vec)
    return basis


def inverse_exprs(mat):
    n = mat.nrows
    if n != mat.ncols:
        raise KernelError("inverse of a non-square matrix")
    aug = [list(mat.rows[i]) + list(Matrix.identity(n).rows[i]) for i in range(n)]
    red, pivots, _ = rref_exprs(aug)
    if pivots[:n] != list(range(n)):
        raise KernelError("matrix is singular")
    return Matrix([row[n:] for row in red])


def det_exprs(mat):
    n = mat.nrows
    m = [list(r) for r in mat.rows]
    det = EXPR_ONE
    for c in range(n):
        pr = None
        for i in range(c, n):
            if not m[i][c].is_zero():
                pr = i
                break
        if pr is None:
            return EXPR_ZERO
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            det = -det
        pv = m[c][c]
        det = det * pv
        for i in range(c + 1, n):
            if m[i][c].is_zero():
                continue
            f = m[i][c] / pv
            m[i] = [m[i][j] - f * m[c][j] if j >= c else m[i][j] for j in range(n)]
    return det


def charpoly_exprs(mat):
    """Berkowitz characteristic polynomial, division-free.

    Returns monic coefficients [1, c1, ..., cn] so that
    det(t*I - mat) = t^n + c1 t^(n-1) + ... + cn.
    """
    n = mat.nrows
    if n == 0:
        return [EXPR_ONE]
    a = mat.rows
    poly = [EXPR_ONE, -a[0][0]]
    for k in range(1, n):
        row = a[k][:k]
        col = [a[i][k] for i in range(k)]
        corner = a[k][k]
        svals = []
        vec = list(col)
        for i in range(k):
            acc = EXPR_ZERO
            for t in range(k):
                if row[t].is_zero() or vec[t].is_zero():
                    continue
                acc = acc + row[t] * vec[t]
            svals.append(acc)
            if i < k - 1:
                nxt = []
                for r in range(k):
                    tot = EXPR_ZERO
                    for t in range(k):
                        if a[r][t].is_zero() or vec[t].is_zero():
                            continue
                        tot = tot + a[r][t] * vec[t]
                    nxt.append(tot)
                vec = nxt
        first = [EXPR_ONE, -corner] + [-s for s in svals]
        out = []
        for i in range(k + 2):
            acc = EXPR_ZERO
            for j in range(len(poly)):
                d = i - j
                if 0 <= d < len(first):
                    acc = acc + first[d] * poly[j]
            out.append(acc)
        poly = out
    return poly


# ---------------------------------------------------------------------------
# pure-rational fast paths


def rank_rational(rows):
    m = [list(r) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    rank = 0
    for c in range(nc):
        pr = None
        for i in range(rank, nr):
            if m[i][c]:
                pr = i
                break
        if pr is None:
            continue
        m[rank], m[pr] = m[pr], m[rank]
        pv = m[rank][c]
        for i in range(rank + 1, nr):
            if not m[i][c]:
                continue
            f = m[i][c] / pv
            mi = m[i]
            mr = m[rank]
            for j in range(c, nc):
                mi[j] -= f * mr[j]
        rank += 1
        if rank == nr:
            break
    return rank


def rational_roots(coeffs):
    """All roots with multiplicity of a monic rational polynomial.

    coeffs: [1, c1, ..., cn] as Fractions.  Returns a list of
    (root, multiplicity) pairs, or None when the polynomial does not split
    over the rationals.
    """
    work = [Fraction(c) for c in coeffs]
    roots = {}
    while len(work) > 1:
        root = _find_rational_root(work)
        if root is None:
            return None
        roots[root] = roots.get(root, 0) + 1
        # synthetic division by (t - root)
        out = [work[0]]
        for c in work[1:-1]:
            out.append(c + out[-1] * root)
        rem = work[-1] + out[-1] * root
        if rem != 0:
            raise KernelError("inexact deflation")
        work = out
    return sorted(roots.items())


def _find_rational_root(coeffs):
    n = len(coeffs) - 1
    if n == 0:
        return None
    if coeffs[-1] == 0:
        return Fraction(0)
    den = 1
    for c in coeffs:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    a0 = abs(ints[-1])
    an = abs(ints[0])
    for p in _divisors(a0):
        for q in _divisors(an):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if _horner(coeffs, cand) == 0:
                    return cand
    return None


def _horner(coeffs, x):
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _divisors(n):
    n = abs(n)
    if n == 0:
        return [1]
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)
