"""Inner automorphisms as products of exponentiated adjoint maps.

A frame is the ordered product B(th) = prod_i exp(sign_i * th_i * ad_{e_i})
over the non-central basis directions.  Lifting the coordinate row vector
through B gives the lifted invariants; their generic Jacobian rank in the
frame parameters equals the coadjoint orbit dimension, which is checked
against the structure-matrix rank.

Exponentials are exact: nilpotent matrices use the finite series, matrices
whose characteristic polynomial splits over the rationals go through a
generalized eigenspace decomposition, and anything else must be supplied as a
closed-form factor by the caller (family constructors do this for rotation
blocks and formal-parameter eigenvalues).
"""

from __future__ import annotations

import random
from fractions import Fraction

from .algebra import sample_fraction
from .expr import (
    EXPR_ONE,
    EXPR_ZERO,
    KernelError,
    coord,
    exp_of,
    from_atom,
    param_atom,
    rational,
    substitute,
    theta_atom,
)
from .linalg import (
    Matrix,
    charpoly_exprs,
    inverse_exprs,
    nullspace_exprs,
    rank_rational,
    rational_roots,
)


class RecipeNeeded(KernelError):
    """The adjoint map has no rational closed form; a recipe must be given."""


def exp_nilpotent(mat, t):
    """exp(t * mat) for a nilpotent matrix, as a finite series."""
    n = mat.nrows
    acc = Matrix.identity(n)
    power = mat
    tk = t
    k = 1
    while not power.is_zero():
        if k > n:
            raise KernelError("matrix is not nilpotent")
        acc = acc.add(power.scale(tk * rational(Fraction(1, _factorial(k)))))
        power = power.mul(mat)
        tk = tk * t
        k += 1
    return acc


def _factorial(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def exp_ad(mat, t):
    """exp(t * mat) exactly, or raise RecipeNeeded.

    Handles nilpotent matrices and matrices whose characteristic polynomial
    has rational coefficients and splits over the rationals (generalized
    eigenspace decomposition, one polynomial-times-exponential block per
    eigenvalue).
    """
    n = mat.nrows
    probe = mat
    for _ in range(n):
        if probe.is_zero():
            return exp_nilpotent(mat, t)
        probe = probe.mul(mat)
    coeffs = charpoly_exprs(mat)
    fracs = []
    for c in coeffs:
        if not c.is_rational():
            raise RecipeNeeded(
                "characteristic polynomial has non-constant coefficients"
            )
        fracs.append(c.as_fraction())
    roots = rational_roots(fracs)
    if roots is None:
        raise RecipeNeeded("characteristic polynomial does not split rationally")
    columns = []
    blocks = []
    for lam, mult in roots:
        shifted = mat.shift(rational(-lam))
        powered = shifted.power(mult)
        kernel = nullspace_exprs([list(r) for r in powered.rows])
        if len(kernel) != mult:
            raise KernelError("generalized eigenspace has unexpected dimension")
        blocks.append((lam, len(kernel)))
        columns.extend(kernel)
    if len(columns) != n:
        raise KernelError("eigenspaces do not fill the space")
    s = Matrix(columns).transpose()
    s_inv = inverse_exprs(s)
    triangular = s_inv.mul(mat).mul(s)
    out_rows = [[EXPR_ZERO] * n for _ in range(n)]
    offset = 0
    for lam, size in blocks:
        sub = [
            [triangular.rows[offset + i][offset + j] for j in range(size)]
            for i in range(size)
        ]
        nil = Matrix(sub).shift(rational(-lam))
        eblock = exp_nilpotent(nil, t)
        scalar = exp_of(rational(lam) * t) if lam else EXPR_ONE
        for i in range(size):
            for j in range(size):
                v = eblock.rows[i][j]
                if not v.is_zero():
                    out_rows[offset + i][offset + j] = scalar * v
        offset += size
    return s.mul(Matrix(out_rows)).mul(s_inv)


class FrameFactor:
    """One factor exp(sign * th * ad_{e_i}) of the automorphism product."""

    __slots__ = ("gen_index", "theta", "sign", "ad", "closed")

    def __init__(self, gen_index, theta, sign, ad, closed):
        self.gen_index = gen_index
        self.theta = theta
        self.sign = sign
        self.ad = ad
        self.closed = closed


class MovingFrame:
    """Ordered factor list with a lazily materialized product matrix."""

    __slots__ = ("algebra", "factors", "_matrix")

    def __init__(self, algebra, factors):
        self.algebra = algebra
        self.factors = factors
        self._matrix = None

    @property
    def thetas(self):
        return [f.theta for f in self.factors]

    def matrix(self):
        if self._matrix is None:
            acc = Matrix.identity(self.algebra.dim)
            for f in self.factors:
                acc = acc.mul(f.closed)
            self._matrix = acc
        return self._matrix

    def det_formula(self):
        """det B = exp(sum_i sign_i th_i tr(ad_i)), computed factor-wise."""
        total = EXPR_ZERO
        for f in self.factors:
            tr = EXPR_ZERO
            for i in range(f.ad.nrows):
                tr = tr + f.ad.rows[i][i]
            total = total + rational(f.sign) * (from_atom(f.theta) * tr)
        return exp_of(total)


def build_frame(g, signs=None, order=None, recipes=None):
    """Construct the frame for an algebra.

    signs: optional dict index -> +1/-1 (default +1); order: generator index
    order (default 1..n); recipes: dict index -> callable(t_expr) -> Matrix
    giving exp(t * ad_i) in closed form for factors the rational path cannot
    handle.
    """
    signs = signs or {}
    recipes = recipes or {}
    order = order or range(1, g.dim + 1)
    factors = []
    for i in order:
        ad = g.ad_matrix(i)
        if ad.is_zero():
            continue
        sign = signs.get(i, 1)
        th = theta_atom(i)
        t = from_atom(th) * rational(sign)
        recipe = recipes.get(i)
        closed = recipe(t) if recipe is not None else exp_ad(ad, t)
        factors.append(FrameFactor(i, th, sign, ad, closed))
    return MovingFrame(g, factors)


class LiftedSet:
    """The row vector of lifted invariants x -> x . B(th)."""

    __slots__ = ("frame", "_exprs")

    def __init__(self, frame):
        self.frame = frame
        self._exprs = None

    @property
    def algebra(self):
        return self.frame.algebra

    @property
    def thetas(self):
        return self.frame.thetas

    def exprs(self):
        if self._exprs is None:
            n = self.algebra.dim
            xs = [coord(i) for i in range(1, n + 1)]
            self._exprs = self.frame.matrix().row_vector_times(xs)
        return list(self._exprs)


def lifted_invariants(g, signs=None, order=None, recipes=None, frame=None):
    if frame is None:
        frame = build_frame(g, signs=signs, order=order, recipes=recipes)
    return LiftedSet(frame)


# ---------------------------------------------------------------------------
# sampled Jacobian rank


class _FactorSample:
    """Exact rational specialization of one frame factor.

    The polynomial occurrences of th get an independent rational value, the
    exponentials exp(q*th) become eps**(D*q) for a sampled positive rational
    eps (D clears the denominators of all q seen), and cos/sin of multiples
    nu*th are rational points on the unit circle produced by integer rotation
    powers of a sampled primitive angle, so every trig identity between
    multiples of the same angle is honored.
    """

    def __init__(self, factor, param_map, rng):
        self.theta = factor.theta
        self.tval = sample_fraction(rng)
        self.param_map = param_map
        exp_dens = [1]
        trig_dens = [1]
        for row in factor.closed.rows:
            for entry in row:
                for ep in entry.exp_parts():
                    q = self._theta_coefficient(ep.base)
                    exp_dens.append(q.denominator)
                for atom in entry.generator_atoms():
                    if atom.head in ("cos", "sin"):
                        nu = self._theta_coefficient(atom.arg)
                        trig_dens.append(nu.denominator)
                    elif atom.head in ("log", "atan"):
                        raise KernelError(
                            "unexpected %s inside a frame factor" % atom.head
                        )
        self.exp_den = _lcm_all(exp_dens)
        self.trig_den = _lcm_all(trig_dens)
        base = Fraction(rng.randint(2, 97), rng.randint(2, 97))
        self.exp_unit = base if base != 1 else Fraction(2)
        r = Fraction(rng.randint(1, 40), rng.randint(41, 80))
        one = Fraction(1)
        self.cos_unit = (one - r * r) / (one + r * r)
        self.sin_unit = 2 * r / (one + r * r)

    def _theta_coefficient(self, arg):
        """Rational coefficient of th in a linear argument."""
        sub = substitute(arg, self.param_map) if self.param_map else arg
        at_one = substitute(sub, {self.theta: rational(1)})
        at_zero = substitute(sub, {self.theta: EXPR_ZERO})
        if not at_zero.is_zero():
            raise KernelError("affine offset in a transcendental argument")
        diff = at_one
        if not diff.is_rational():
            raise KernelError("non-constant frequency in a frame factor")
        return diff.as_fraction()

    def value_of_ep(self, ep):
        q = self._theta_coefficient(ep.base)
        power = q * self.exp_den
        if power.denominator != 1:
            raise KernelError("exponent denominators changed between passes")
        return self.exp_unit ** int(power)

    def value_of_trig(self, atom):
        nu = self._theta_coefficient(atom.arg)
        m = nu * self.trig_den
        if m.denominator != 1:
            raise KernelError("frequency denominators changed between passes")
        c, s = _rotation_power(self.cos_unit, self.sin_unit, int(m))
        return c if atom.head == "cos" else s

    def evaluate_entry(self, entry):
        point = dict(self.param_map_fractions())
        point[self.theta] = self.tval
        total = self._eval_poly(entry.num, point)
        den = self._eval_poly(entry.den, point)
        if den == 0:
            raise ZeroDivisionError
        return total / den

    def _eval_poly(self, poly, point):
        total = Fraction(0)
        for m, c in poly.terms.items():
            v = Fraction(c)
            for a, e in m.vars:
                if a.is_generator:
                    v *= self.value_of_trig(a) ** e
                else:
                    v *= point[a] ** e
            if m.ep is not None:
                if m.ep.terms:
                    raise KernelError("generator inside a frame exponential")
                v *= self.value_of_ep(m.ep)
            total += v
        return total

    def param_map_fractions(self):
        out = {}
        for a, v in (self.param_map or {}).items():
            out[a] = v.as_fraction()
        return out

    def matrix(self, mat):
        return [[self.evaluate_entry(v) for v in row] for row in mat.rows]


def _lcm_all(values):
    acc = 1
    for v in values:
        acc = acc * v // _gcd(acc, v)
    return acc


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _rotation_power(c, s, m):
    """(cos, sin) of m times the angle with rational cosine c and sine s."""
    if m < 0:
        c2, s2 = _rotation_power(c, s, -m)
        return c2, -s2
    rc, rs = Fraction(1), Fraction(0)
    bc, bs = c, s
    while m:
        if m & 1:
            rc, rs = rc * bc - rs * bs, rc * bs + rs * bc
        m >>= 1
        if m:
            bc, bs = bc * bc - bs * bs, 2 * bc * bs
    return rc, rs


def jacobian_rank(lifted, seed=0, trials=8, param_point=None):
    """Generic rank of d(lifted)/d(theta) by exact rational sampling.

    Deterministic in seed; the maximum over the requested trials is
    returned.  This equals the coadjoint orbit dimension generically.
    """
    frame = lifted.frame
    g = frame.algebra
    n = g.dim
    rng = random.Random(seed)
    param_map = {}
    for p in g.params:
        a = param_atom(p)
        if param_point and a in param_point:
            param_map[a] = rational(Fraction(param_point[a]))
        else:
            param_map[a] = rational(sample_fraction(rng))
    ads = []
    for f in frame.factors:
        mat = f.ad.map(lambda v: substitute(v, param_map)) if param_map else f.ad
        rows = []
        for row in mat.rows:
            rows.append([v.as_fraction() for v in row])
        ads.append(rows)
    best = 0
    for _ in range(max(1, trials)):
        try:
            xhat = [sample_fraction(rng) for _ in range(n)]
            samples = [_FactorSample(f, param_map, rng) for f in frame.factors]
            mats = [s.matrix(f.closed) for s, f in zip(samples, frame.factors)]
            suffix = [None] * (len(mats) + 1)
            suffix[len(mats)] = _id_rows(n)
            for i in range(len(mats) - 1, -1, -1):
                suffix[i] = _mat_mul(mats[i], suffix[i + 1])
            rows = []
            prefix_vec = list(xhat)
            for i, f in enumerate(frame.factors):
                deriv = _vec_mat(prefix_vec, ads[i])
                if f.sign < 0:
                    deriv = [-v for v in deriv]
                deriv = _vec_mat(deriv, mats[i])
                rows.append(_vec_mat(deriv, suffix[i + 1]))
                prefix_vec = _vec_mat(prefix_vec, mats[i])
            r = rank_rational(rows)
            best = max(best, r)
        except ZeroDivisionError:
            continue
    return best


def _id_rows(n):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


def _mat_mul(a, b):
    n = len(a)
    m = len(b[0])
    k = len(b)
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(m):
            tot = Fraction(0)
            for t in range(k):
                if ai[t]:
                    tot += ai[t] * b[t][j]
            row.append(tot)
        out.append(row)
    return out


def _vec_mat(vec, mat):
    m = len(mat[0])
    out = []
    for j in range(m):
        tot = Fraction(0)
        for i, v in enumerate(vec):
            if v:
                tot += v * mat[i][j]
        out.append(tot)
    return out
