"""Finite-dimensional Lie algebras given by exact structure constants.

Brackets are stored for index pairs i < j (1-based); [e_j, e_i] is implied by
antisymmetry.  Coefficients are expressions, so parametric families are
first-class: validation and nullspaces then hold identically in the
parameters, and sampling-based ranks substitute generic rational parameter
values.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .expr import (
    EXPR_ZERO,
    Expr,
    KernelError,
    SingularPoint,
    coord,
    coord_atom,
    evaluate,
    param_atom,
    rational,
)
from .linalg import Matrix, nullspace_exprs, rank_rational

SAMPLE_BOUND = 10_000


class StructureError(ValueError):
    """Malformed structure-constant input."""


class LieAlgebra:
    """An n-dimensional Lie algebra over exact scalars."""

    __slots__ = ("dim", "brackets", "params", "name", "labels", "coord_labels")

    def __init__(self, dim, brackets, params=(), name="", labels=None, coord_labels=None):
        self.dim = dim
        self.brackets = brackets
        self.params = tuple(params)
        self.name = name
        self.labels = tuple(labels) if labels else tuple("e%d" % i for i in range(1, dim + 1))
        self.coord_labels = (
            tuple(coord_labels) if coord_labels else tuple("x%d" % i for i in range(1, dim + 1))
        )

    def __repr__(self):
        return "LieAlgebra(%r, dim=%d)" % (self.name, self.dim)

    def bracket(self, i, j):
        """Coefficients of [e_i, e_j] as a dict k -> Expr (any index order)."""
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), {}))
        flipped = self.brackets.get((j, i), {})
        return {k: -c for k, c in flipped.items()}

    def ad_matrix(self, i):
        """Matrix of ad_{e_i}: column j holds the coordinates of [e_i, e_j]."""
        n = self.dim
        rows = [[EXPR_ZERO] * n for _ in range(n)]
        for j in range(1, n + 1):
            for k, c in self.bracket(i, j).items():
                rows[k - 1][j - 1] = c
        return Matrix(rows)

    def structure_matrix(self):
        """The n x n matrix with (i, j) entry sum_k c_ijk * x_k."""
        n = self.dim
        rows = []
        for i in range(1, n + 1):
            row = []
            for j in range(1, n + 1):
                acc = EXPR_ZERO
                for k, c in self.bracket(i, j).items():
                    acc = acc + c * coord(k)
                row.append(acc)
            rows.append(row)
        return Matrix(rows)

    def coadjoint_fields(self):
        """Row i is the coefficient vector of the field attached to e_i."""
        return [list(row) for row in self.structure_matrix().rows]

    def bracket_vectors(self, u, v):
        """[u, v] for coefficient vectors of expressions (0-based lists)."""
        n = self.dim
        out = [EXPR_ZERO] * n
        for (i, j), coeffs in self.brackets.items():
            f = u[i - 1] * v[j - 1] - u[j - 1] * v[i - 1]
            if f.is_zero():
                continue
            for k, c in coeffs.items():
                out[k - 1] = out[k - 1] + f * c
        return out


def lie_algebra(dim, entries, params=(), name="", labels=None, coord_labels=None):
    """Build an algebra from (i, j) -> {k: coeff} entries of either order.

    Entries for both (i, j) and (j, i) must be antisymmetric if both appear.
    Coefficients may be int, Fraction or Expr.
    """
    if dim < 1:
        raise StructureError("dimension must be positive")
    norm = {}
    for (i, j), coeffs in entries.items():
        if not (1 <= i <= dim and 1 <= j <= dim):
            raise StructureError("bracket [%d,%d] out of range for dim %d" % (i, j, dim))
        cleaned = {}
        for k, c in coeffs.items():
            if not (1 <= k <= dim):
                raise StructureError("target e%d out of range in [%d,%d]" % (k, i, j))
            c = c if isinstance(c, Expr) else rational(c)
            if not c.is_zero():
                cleaned[k] = c
        if i == j:
            if cleaned:
                raise StructureError("[e%d,e%d] must vanish" % (i, j))
            continue
        key, flip = ((i, j), False) if i < j else ((j, i), True)
        if flip:
            cleaned = {k: -c for k, c in cleaned.items()}
        if key in norm:
            old = norm[key]
            same = set(old) == set(cleaned) and all(old[k].equals(cleaned[k]) for k in old)
            if not same:
                raise StructureError(
                    "conflicting entries for [%d,%d] under antisymmetry" % key
                )
        elif cleaned:
            norm[key] = cleaned
    return LieAlgebra(dim, norm, params=params, name=name, labels=labels, coord_labels=coord_labels)


def jacobi_defects(g):
    """All violated Jacobi triples as (i, j, k, residual dict)."""
    out = []
    n = g.dim
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(j + 1, n + 1):
                res = {}
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    for m, cm in g.bracket(a, b).items():
                        for t, ct in g.bracket(m, c).items():
                            acc = res.get(t, EXPR_ZERO) + cm * ct
                            if acc.is_zero():
                                res.pop(t, None)
                            else:
                                res[t] = acc
                if res:
                    out.append((i, j, k, res))
    return out


def validate(g):
    """Exact validation report; empty list means the algebra is consistent."""
    problems = []
    for i, j, k, res in jacobi_defects(g):
        worst = sorted(res.items())[0]
        problems.append(
            "jacobi identity fails on (e%d, e%d, e%d): coefficient of e%d is %s"
            % (i, j, k, worst[0], worst[1].skey())
        )
    return problems


def center(g):
    """Basis of the center as coefficient vectors over the expression field."""
    n = g.dim
    rows = []
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            row = [EXPR_ZERO] * n
            touched = False
            for i in range(1, n + 1):
                c = g.bracket(i, j).get(k)
                if c is not None:
                    row[i - 1] = c
                    touched = True
            if touched:
                rows.append(row)
    if not rows:
        return [
            [rational(1) if t == s else EXPR_ZERO for t in range(n)] for s in range(n)
        ]
    return nullspace_exprs(rows)


def _echelon_insert(basis, vec):
    """Insert vec into a row-reduced basis; True if the span grew."""
    v = list(vec)
    n = len(v)
    for lead, row in basis:
        if not v[lead].is_zero():
            f = v[lead]
            v = [v[t] - f * row[t] for t in range(n)]
    for t in range(n):
        if not v[t].is_zero():
            piv = v[t]
            v = [u / piv for u in v]
            basis.append((t, v))
            basis.sort(key=lambda it: it[0])
            return True
    return False


def derived_series(g):
    """Dimensions [dim g, dim g', dim g'', ...] until stabilization."""
    return _series_dims(g, lambda cur: [(u, v) for u in cur for v in cur])


def lower_central_series(g):
    """Dimensions of g, [g, g], [g, [g, g]], ..."""
    n = g.dim
    full = [
        [rational(1) if t == s else EXPR_ZERO for t in range(n)] for s in range(n)
    ]
    return _series_dims(g, lambda cur: [(u, v) for u in full for v in cur])


def _series_dims(g, pair_source):
    n = g.dim
    cur = [[rational(1) if t == s else EXPR_ZERO for t in range(n)] for s in range(n)]
    dims = [n]
    while True:
        basis = []
        for u, v in pair_source(cur):
            w = g.bracket_vectors(u, v)
            if any(not c.is_zero() for c in w):
                _echelon_insert(basis, w)
        d = len(basis)
        dims.append(d)
        if d == 0 or d == dims[-2]:
            return dims
        cur = [row for _, row in basis]


def is_nilpotent(g):
    return lower_central_series(g)[-1] == 0


def is_solvable(g):
    return derived_series(g)[-1] == 0


def is_abelian(g):
    return not g.brackets


def sample_fraction(rng):
    return Fraction(rng.randint(-SAMPLE_BOUND, SAMPLE_BOUND))


def rank_coadjoint(g, seed=0, trials=8, param_point=None):
    """Generic rank of the coadjoint structure matrix by exact sampling.

    Returns (rank, witness) where witness maps coordinate index to the
    sampled value attaining the maximal rank.  Deterministic in seed.
    Parameter atoms are taken from param_point when given, else sampled.
    """
    rng = random.Random(seed)
    smat = g.structure_matrix()
    n = g.dim
    best = -1
    witness = None
    for _ in range(max(1, trials)):
        point = {coord_atom(i): sample_fraction(rng) for i in range(1, n + 1)}
        for p in g.params:
            a = param_atom(p)
            if param_point and a in param_point:
                point[a] = Fraction(param_point[a])
            else:
                point[a] = sample_fraction(rng)
        try:
            rows = [
                [evaluate(v, point) for v in row]
                for row in smat.rows
            ]
        except SingularPoint:
            continue
        r = rank_rational(rows)
        if r > best:
            best = r
            witness = {i: point[coord_atom(i)] for i in range(1, n + 1)}
        if best == n:
            break
    if best < 0:
        raise KernelError("all sample points were singular")
    return best, witness


def num_invariants(g, seed=0, trials=8, param_point=None):
    """dim g minus the generic coadjoint rank."""
    r, _ = rank_coadjoint(g, seed=seed, trials=trials, param_point=param_point)
    return g.dim - r


def direct_sum(g1, g2, name=None):
    dim = g1.dim + g2.dim
    entries = {}
    for (i, j), coeffs in g1.brackets.items():
        entries[(i, j)] = dict(coeffs)
    off = g1.dim
    for (i, j), coeffs in g2.brackets.items():
        entries[(i + off, j + off)] = {k + off: c for k, c in coeffs.items()}
    return LieAlgebra(
        dim,
        entries,
        params=tuple(dict.fromkeys(g1.params + g2.params)),
        name=name or ("%s (+) %s" % (g1.name or "g1", g2.name or "g2")),
        labels=g1.labels + g2.labels,
        coord_labels=g1.coord_labels + g2.coord_labels,
    )
