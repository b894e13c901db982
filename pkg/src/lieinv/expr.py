"""Exact symbolic expressions over the rationals.

The kernel represents rational functions of three groups of variables
(coordinates x1..xn, frame parameters th1..thr, free parameters) extended by
four transcendental generators: log(u), atan(u), cos(u), sin(u) with
transcendental-free arguments, plus one formal exponential factor per
monomial.  The exponential factor exp(w) carries w = base + sum(c_g * g) where
base and the coefficients c_g are transcendental-free expressions and g ranges
over non-exponential generators.  This is exactly the closure needed so that
products of exponentials stay exponentials (their w parts add) and forms like
exp(q*log(u)) with non-integer rational q (i.e. fractional powers) or
exp(c*atan(u)) remain first-class values.

Canonical rules enforced on construction:

* monomials are ordered graded-lexicographically, coordinates before frame
  parameters before free parameters before transcendental atoms;
* sin(u)^2 is rewritten to 1 - cos(u)^2, so sin-exponents stay <= 1;
* cos(-u) = cos(u), sin(-u) = -sin(u), atan(-u) = -atan(u);
* atan((A*sin(u) + B*cos(u))/(A*cos(u) - B*sin(u))) = u + atan(B/A), which is
  the angle-addition normalization needed when a rotation angle is recovered
  from a ratio of rotated components;
* log(c * m * P) splits into log(c) + sum(e*log(v)) + log(P) with P primitive
  and positive-leading, and log(m * exp(w)) absorbs w;
* exp(n*log(u)) with integer n collapses to u**n;
* fractions clear a common exponential factor and a common monomial factor,
  divide out the polynomial gcd when both sides are transcendental-free, and
  keep a monic denominator.

Zero-testing is structural on the canonical form.  Distinct generator atoms
(and exponentials of inequivalent w) are treated as algebraically independent
apart from the rules above; that is sound for every expression this library
produces, where arguments are canonicalized before atoms are compared.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import cmp_to_key

QZERO = Fraction(0)
QONE = Fraction(1)

_GROUP = {"x": 0, "th": 1, "p": 2, "log": 3, "atan": 3, "cos": 3, "sin": 3}
_HEAD_RANK = {"log": 0, "atan": 1, "cos": 2, "sin": 3}
_GEN_HEADS = ("log", "atan", "cos", "sin")


class KernelError(ValueError):
    """Raised when an operation leaves the representable closure."""


class ZeroDivision(KernelError, ZeroDivisionError):
    """Raised on division by an expression that is identically zero."""


class SingularPoint(ArithmeticError):
    """Raised when an evaluation hits a vanishing denominator."""


# ---------------------------------------------------------------------------
# atoms


class Atom:
    """An interned variable or transcendental generator."""

    __slots__ = ("head", "data", "skey", "_hash")

    def __init__(self, head, data, skey):
        self.head = head
        self.data = data
        self.skey = skey
        self._hash = hash(skey)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (isinstance(other, Atom) and self.skey == other.skey)

    def __repr__(self):
        return "Atom(%s)" % (atom_str(self),)

    @property
    def is_generator(self):
        return self.head in _HEAD_RANK

    @property
    def arg(self):
        """Argument expression of a generator atom."""
        if not self.is_generator:
            raise KernelError("atom %r has no argument" % (self.head,))
        return self.data


_ATOMS = {}


def _intern(head, data, skey):
    key = (head, skey)
    got = _ATOMS.get(key)
    if got is None:
        got = Atom(head, data, skey)
        _ATOMS[key] = got
    return got


def coord_atom(i):
    return _intern("x", i, (0, 0, i))


def theta_atom(i):
    return _intern("th", i, (1, 0, i))


def param_atom(name):
    return _intern("p", name, (2, 0, name))


def _gen_atom(head, arg):
    return _intern(head, arg, (3, _HEAD_RANK[head], arg.skey()))


def atom_str(a):
    if a.head == "x":
        return "x%d" % a.data
    if a.head == "th":
        return "th%d" % a.data
    if a.head == "p":
        return a.data
    return "%s(%s)" % (a.head, a.data.skey())


# ---------------------------------------------------------------------------
# exponential parts


class ExpPart:
    """The w of a formal factor exp(w).

    base is a transcendental-free Expr; terms is a sorted tuple of
    (generator atom, transcendental-free nonzero Expr coefficient).
    """

    __slots__ = ("base", "terms", "_hash", "_skey")

    def __init__(self, base, terms):
        self.base = base
        self.terms = terms
        self._hash = hash((base, terms))
        self._skey = None

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, ExpPart)
            and self.base == other.base
            and self.terms == other.terms
        )

    def skey(self):
        if self._skey is None:
            bits = [self.base.skey()]
            for atom, coeff in self.terms:
                bits.append(atom.skey)
                bits.append(coeff.skey())
            self._skey = tuple(bits)
        return self._skey

    def as_expr(self):
        """Rebuild w as an ordinary expression."""
        acc = self.base
        for atom, coeff in self.terms:
            acc = acc + coeff * from_atom(atom)
        return acc

    def scaled(self, k):
        """w * k for an integer k (used when powering a monomial)."""
        if k == 0:
            return None
        kq = rational(k)
        return make_exppart(self.base * kq, [(a, c * kq) for a, c in self.terms])

    def merged(self, other):
        """w1 + w2 (used when multiplying monomials)."""
        if other is None:
            return self
        acc = dict(self.terms)
        for atom, coeff in other.terms:
            tot = acc.get(atom)
            tot = coeff if tot is None else tot + coeff
            if tot.is_zero():
                acc.pop(atom, None)
            else:
                acc[atom] = tot
        return make_exppart(self.base + other.base, acc.items())

    def negated(self):
        return make_exppart(-self.base, [(a, -c) for a, c in self.terms])


def make_exppart(base, terms):
    items = []
    for atom, coeff in terms:
        if not coeff.is_zero():
            items.append((atom, coeff))
    items.sort(key=lambda it: it[0].skey)
    if not items and base.is_zero():
        return None
    return ExpPart(base, tuple(items))


# ---------------------------------------------------------------------------
# monomials


class Monomial:
    """A power product of atoms with one optional exponential factor."""

    __slots__ = ("vars", "ep", "degree", "_hash")

    def __init__(self, vars, ep):
        self.vars = vars
        self.ep = ep
        self.degree = sum(e for _, e in vars)
        self._hash = hash((vars, ep))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Monomial)
            and self.vars == other.vars
            and self.ep == other.ep
        )

    def __repr__(self):
        return "Monomial(%s)" % (monomial_str(self, QONE),)

    def exponent(self, atom):
        for a, e in self.vars:
            if a == atom:
                return e
        return 0

    def mul(self, other):
        if not other.vars and other.ep is None:
            return self
        if not self.vars and self.ep is None:
            return other
        acc = dict(self.vars)
        for a, e in other.vars:
            acc[a] = acc.get(a, 0) + e
        ep = self.ep.merged(other.ep) if self.ep is not None else other.ep
        return make_monomial(acc.items(), ep)

    def pow(self, k):
        if k == 0:
            return MONO_ONE
        if k == 1:
            return self
        ep = self.ep.scaled(k) if self.ep is not None else None
        return make_monomial([(a, e * k) for a, e in self.vars], ep)

    def without(self, atom, k):
        """Divide out atom**k (k must not exceed the stored exponent)."""
        out = []
        for a, e in self.vars:
            if a == atom:
                if e < k:
                    raise KernelError("monomial not divisible")
                if e > k:
                    out.append((a, e - k))
            else:
                out.append((a, e))
        return make_monomial(out, self.ep)

    def with_ep(self, ep):
        return Monomial(self.vars, ep)


def make_monomial(items, ep):
    vars = tuple(sorted(((a, e) for a, e in items if e != 0), key=lambda it: it[0].skey))
    return Monomial(vars, ep)


MONO_ONE = Monomial((), None)


def _cmp_monomial(m1, m2):
    if m1.degree != m2.degree:
        return -1 if m1.degree < m2.degree else 1
    v1, v2 = m1.vars, m2.vars
    i = j = 0
    while i < len(v1) and j < len(v2):
        a1, e1 = v1[i]
        a2, e2 = v2[j]
        if a1 == a2:
            if e1 != e2:
                return 1 if e1 > e2 else -1
            i += 1
            j += 1
        elif a1.skey < a2.skey:
            return 1
        else:
            return -1
    if i < len(v1):
        return 1
    if j < len(v2):
        return -1
    k1 = () if m1.ep is None else m1.ep.skey()
    k2 = () if m2.ep is None else m2.ep.skey()
    if k1 == k2:
        return 0
    return -1 if k1 < k2 else 1


_MONO_KEY = cmp_to_key(_cmp_monomial)


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Sum of monomials with Fraction coefficients, canonically reduced."""

    __slots__ = ("terms", "_items", "_hash")

    def __init__(self, terms):
        self.terms = terms
        self._items = None
        self._hash = None

    def items(self):
        """Terms sorted leading-first; cached."""
        if self._items is None:
            self._items = tuple(
                sorted(self.terms.items(), key=lambda kv: _MONO_KEY(kv[0]), reverse=True)
            )
        return self._items

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.items())
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Poly) and self.terms == other.terms

    def __repr__(self):
        return "Poly(%s)" % (poly_str(self),)

    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_one(self):
        return len(self.terms) == 1 and self.terms.get(MONO_ONE) == QONE

    def lead(self):
        return self.items()[0]

    def degree(self):
        return max((m.degree for m in self.terms), default=0)

    def degree_in(self, atom):
        return max((m.exponent(atom) for m in self.terms), default=0)

    def coeff_in(self, atom, k):
        """The polynomial coefficient of atom**k (atom divided out)."""
        acc = {}
        for m, c in self.terms.items():
            if m.exponent(atom) == k:
                key = m.without(atom, k)
                acc[key] = acc.get(key, QZERO) + c
        return make_poly(acc)

    def add(self, other):
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        acc = dict(self.terms)
        for m, c in other.terms.items():
            tot = acc.get(m, QZERO) + c
            if tot:
                acc[m] = tot
            else:
                acc.pop(m, None)
        return Poly(acc)

    def neg(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def sub(self, other):
        return self.add(other.neg())

    def mul(self, other):
        if self.is_zero or other.is_zero:
            return POLY_ZERO
        if self.is_one:
            return other
        if other.is_one:
            return self
        acc = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1.mul(m2)
                c = c1 * c2
                tot = acc.get(m, QZERO) + c
                if tot:
                    acc[m] = tot
                else:
                    acc.pop(m, None)
        return make_poly(acc)

    def scale(self, q):
        if not q:
            return POLY_ZERO
        if q == QONE:
            return self
        return Poly({m: c * q for m, c in self.terms.items()})

    def mul_monomial(self, mono, q=QONE):
        acc = {}
        for m, c in self.terms.items():
            acc[m.mul(mono)] = c * q
        return make_poly(acc)

    def mul_ep(self, ep):
        """Multiply every monomial by exp(w); ep may be None."""
        if ep is None:
            return self
        acc = {}
        for m, c in self.terms.items():
            nep = m.ep.merged(ep) if m.ep is not None else ep
            key = m.with_ep(nep)
            tot = acc.get(key, QZERO) + c
            if tot:
                acc[key] = tot
            else:
                acc.pop(key, None)
        return make_poly(acc)

    def pow(self, k):
        out = POLY_ONE
        base = self
        n = k
        while n:
            if n & 1:
                out = out.mul(base)
            base = base.mul(base) if n > 1 else base
            n >>= 1
        return out

    def atoms(self):
        seen = set()
        for m in self.terms:
            for a, _ in m.vars:
                seen.add(a)
        return seen

    def has_transcendentals(self):
        for m in self.terms:
            if m.ep is not None:
                return True
            for a, _ in m.vars:
                if a.is_generator:
                    return True
        return False

    def common_monomial(self, other=None):
        """Greatest monomial dividing every term (of both polys if given)."""
        monos = list(self.terms)
        if other is not None:
            monos += list(other.terms)
        if not monos:
            return MONO_ONE
        acc = dict(monos[0].vars)
        for m in monos[1:]:
            if not acc:
                break
            cur = dict(m.vars)
            for a in list(acc):
                e = cur.get(a, 0)
                if e == 0:
                    del acc[a]
                else:
                    acc[a] = min(acc[a], e)
        return make_monomial(acc.items(), None)

    def div_monomial(self, mono):
        if mono is MONO_ONE or not mono.vars:
            return self
        acc = {}
        for m, c in self.terms.items():
            out = []
            need = dict(mono.vars)
            for a, e in m.vars:
                k = need.pop(a, 0)
                if e - k:
                    out.append((a, e - k))
            if need:
                raise KernelError("monomial does not divide every term")
            acc[make_monomial(out, m.ep)] = c
        return make_poly(acc)


def make_poly(terms):
    """Build a polynomial, rewriting sin(u)^k with k >= 2 via sin^2 = 1 - cos^2."""
    acc = {m: c for m, c in terms.items() if c} if isinstance(terms, dict) else {}
    if not isinstance(terms, dict):
        for m, c in terms:
            if not c:
                continue
            tot = acc.get(m, QZERO) + c
            if tot:
                acc[m] = tot
            else:
                acc.pop(m, None)
    while True:
        offender = None
        for m in acc:
            for a, e in m.vars:
                if a.head == "sin" and e >= 2:
                    offender = (m, a, e)
                    break
            if offender:
                break
        if offender is None:
            return Poly(acc)
        m, a, e = offender
        c = acc.pop(m)
        base = m.without(a, e)
        half, rem = divmod(e, 2)
        cos_a = _gen_atom("cos", a.data)
        # sin^e = sin^rem * (1 - cos^2)^half
        for t in range(half + 1):
            coeff = c * Fraction(math.comb(half, t) * (-1) ** t)
            extra = [(cos_a, 2 * t)]
            if rem:
                extra.append((a, 1))
            piece = base.mul(make_monomial(extra, None))
            tot = acc.get(piece, QZERO) + coeff
            if tot:
                acc[piece] = tot
            else:
                acc.pop(piece, None)


POLY_ZERO = Poly({})
POLY_ONE = Poly({MONO_ONE: QONE})


def poly_const(q):
    return Poly({MONO_ONE: q}) if q else POLY_ZERO


def poly_var(atom):
    return Poly({make_monomial([(atom, 1)], None): QONE})


# ---------------------------------------------------------------------------
# polynomial gcd (transcendental-free only)

_GCD_TERM_LIMIT = 400


def _content(p):
    """Signed rational content: p / content is primitive with positive lead."""
    if p.is_zero:
        return QONE
    num = 0
    den = 1
    for c in p.terms.values():
        num = math.gcd(num, abs(c.numerator))
        den = den * c.denominator // math.gcd(den, c.denominator)
    cont = Fraction(num, den)
    if p.lead()[1] < 0:
        cont = -cont
    return cont


def _as_univariate(p, atom):
    out = {}
    for m, c in p.terms.items():
        e = m.exponent(atom)
        rest = m.without(atom, e)
        bucket = out.setdefault(e, {})
        bucket[rest] = bucket.get(rest, QZERO) + c
    return {e: make_poly(d) for e, d in out.items()}


def _from_univariate(coeffs, atom):
    acc = POLY_ZERO
    for e, p in coeffs.items():
        acc = acc.add(p.mul_monomial(make_monomial([(atom, e)], None)))
    return acc


def _gcd_many(polys):
    acc = POLY_ZERO
    for p in polys:
        acc = poly_gcd(acc, p)
        if acc.is_one:
            return acc
    return acc


def poly_gcd(p, q):
    """Multivariate gcd of transcendental-free polynomials.

    Primitive Euclid with pseudo-division; bails out to 1 if intermediate
    results grow past a size guard, which only costs canonical reduction,
    never correctness.
    """
    if p.is_zero:
        return q.scale(QONE / _content(q)) if not q.is_zero else POLY_ZERO
    if q.is_zero:
        return p.scale(QONE / _content(p))
    atoms = p.atoms() | q.atoms()
    if not atoms:
        return POLY_ONE
    v = max(atoms, key=lambda a: a.skey)
    pu = _as_univariate(p, v)
    qu = _as_univariate(q, v)
    cont_p = _gcd_many(pu.values())
    cont_q = _gcd_many(qu.values())
    cont = poly_gcd(cont_p, cont_q)
    pp = {e: _poly_exact_div(c, cont_p) for e, c in pu.items()}
    qp = {e: _poly_exact_div(c, cont_q) for e, c in qu.items()}
    a, b = (pp, qp) if max(pp) >= max(qp) else (qp, pp)
    while True:
        if not b:
            g = a
            break
        r = _pseudo_rem(a, b, v)
        if r is None:
            return cont  # size guard tripped: settle for the content part
        if not r:
            g = b
            break
        a, b = b, _primitive_univ(r)
        if sum(len(c.terms) for c in b.values()) > _GCD_TERM_LIMIT:
            return cont
    g = _primitive_univ(g)
    out = cont.mul(_from_univariate(g, v))
    return out.scale(QONE / _content(out))


def _primitive_univ(u):
    cont = _gcd_many(u.values())
    if cont.is_zero or cont.is_one:
        return u
    return {e: _poly_exact_div(c, cont) for e, c in u.items()}


def _pseudo_rem(a, b, v):
    da, db = max(a), max(b)
    lb = b[db]
    r = dict(a)
    steps = 0
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        nr = {}
        for e, c in r.items():
            if e == dr:
                continue
            nr[e] = c.mul(lb)
        for e, c in b.items():
            if e == db:
                continue
            k = e + dr - db
            piece = c.mul(lr)
            nr[k] = nr[k].sub(piece) if k in nr else piece.neg()
        r = {e: c for e, c in nr.items() if not c.is_zero}
        steps += 1
        if steps > 64 or sum(len(c.terms) for c in r.values()) > _GCD_TERM_LIMIT:
            return None
    return r


def _poly_exact_div(p, d):
    """Exact division p / d for transcendental-free polynomials."""
    if d.is_one:
        return p
    if p.is_zero:
        return POLY_ZERO
    if len(d.terms) == 1:
        mono, c = d.lead()
        return p.div_monomial(mono).scale(QONE / c)
    atoms = sorted(d.atoms(), key=lambda a: a.skey)
    v = atoms[-1]
    du = _as_univariate(d, v)
    dd = max(du)
    lead = du[dd]
    rem = p
    out = POLY_ZERO
    while not rem.is_zero:
        ru = _as_univariate(rem, v)
        dr = max(ru)
        if dr < dd:
            raise KernelError("inexact polynomial division")
        q = _poly_exact_div(ru[dr], lead)
        shift = q.mul_monomial(make_monomial([(v, dr - dd)], None))
        out = out.add(shift)
        rem = rem.sub(shift.mul(d))
    return out


# ---------------------------------------------------------------------------
# expressions


class Expr:
    """A quotient of canonical polynomials."""

    __slots__ = ("num", "den", "_hash", "_skey")

    def __init__(self, num, den):
        self.num = num
        self.den = den
        self._hash = None
        self._skey = None

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __eq__(self, other):
        """Structural equality of canonical forms; use equals() for semantic tests."""
        if self is other:
            return True
        return isinstance(other, Expr) and self.num == other.num and self.den == other.den

    def __repr__(self):
        return "Expr(%s)" % (self.skey(),)

    def __str__(self):
        return self.skey()

    def skey(self):
        if self._skey is None:
            self._skey = expr_str(self)
        return self._skey

    # -- predicates

    def is_zero(self):
        return self.num.is_zero

    def is_one(self):
        return self.num.is_one and self.den.is_one

    def equals(self, other):
        return (self - other).is_zero()

    def is_rational(self):
        return (
            self.den.is_one
            and (self.num.is_zero or (len(self.num.terms) == 1 and MONO_ONE in self.num.terms))
        )

    def as_fraction(self):
        if not self.is_rational():
            raise KernelError("not a rational constant: %s" % self.skey())
        return self.num.terms.get(MONO_ONE, QZERO)

    def is_integer(self):
        return self.is_rational() and self.as_fraction().denominator == 1

    def has_transcendentals(self):
        return self.num.has_transcendentals() or self.den.has_transcendentals()

    # -- structure scans

    def atoms(self):
        """All atoms appearing at any depth (inside arguments and exp parts)."""
        seen = set()
        _collect_atoms(self, seen)
        return seen

    def var_atoms(self):
        return {a for a in self.atoms() if not a.is_generator}

    def depends_on(self, atom):
        return atom in self.atoms()

    def exp_parts(self):
        out = []
        seen = set()
        for poly in (self.num, self.den):
            for m in poly.terms:
                if m.ep is not None and m.ep not in seen:
                    seen.add(m.ep)
                    out.append(m.ep)
        return out

    def generator_atoms(self):
        out = set()
        for poly in (self.num, self.den):
            for m in poly.terms:
                for a, _ in m.vars:
                    if a.is_generator:
                        out.add(a)
                if m.ep is not None:
                    for a, _ in m.ep.terms:
                        out.add(a)
        return out

    # -- arithmetic

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return make_expr(self.num.add(other.num), self.den)
        return make_expr(
            self.num.mul(other.den).add(other.num.mul(self.den)),
            self.den.mul(other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return Expr(self.num.neg(), self.den)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return EXPR_ZERO
        return make_expr(self.num.mul(other.num), self.den.mul(other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivision("division by zero expression")
        return make_expr(self.num.mul(other.den), self.den.mul(other.num))

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, k):
        if isinstance(k, Fraction):
            if k.denominator == 1:
                k = k.numerator
            else:
                return pow_rational(self, k)
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return EXPR_ONE
        if k < 0:
            if self.is_zero():
                raise ZeroDivision("zero to a negative power")
            return make_expr(self.den.pow(-k), self.num.pow(-k))
        return make_expr(self.num.pow(k), self.den.pow(k))


def _coerce(v):
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return rational(v)
    return NotImplemented


def _collect_atoms(f, seen):
    for poly in (f.num, f.den):
        for m in poly.terms:
            for a, _ in m.vars:
                if a in seen:
                    continue
                seen.add(a)
                if a.is_generator:
                    _collect_atoms(a.data, seen)
            if m.ep is not None:
                _collect_atoms(m.ep.base, seen)
                for a, c in m.ep.terms:
                    if a not in seen:
                        seen.add(a)
                        _collect_atoms(a.data, seen)
                    _collect_atoms(c, seen)


def make_expr(num, den):
    """Canonicalize a quotient of polynomials."""
    if den.is_zero:
        raise ZeroDivision("zero denominator")
    if num.is_zero:
        return EXPR_ZERO
    # clear the exponential of the denominator's leading monomial
    wlead = den.lead()[0].ep
    if wlead is not None:
        neg = wlead.negated()
        num = num.mul_ep(neg)
        den = den.mul_ep(neg)
    # collapse exp(n*log u) with integer n
    ex_num = _extract_integer_logs(num)
    ex_den = _extract_integer_logs(den)
    if ex_num is not None or ex_den is not None:
        fn = ex_num if ex_num is not None else Expr(num, POLY_ONE)
        fd = ex_den if ex_den is not None else Expr(den, POLY_ONE)
        return fn / fd
    # cancel the common monomial factor
    common = num.common_monomial(den)
    if common.vars:
        num = num.div_monomial(common)
        den = den.div_monomial(common)
    # cancel the polynomial gcd when transcendental-free
    if (
        not den.is_one
        and len(num.terms) + len(den.terms) > 2
        and not num.has_transcendentals()
        and not den.has_transcendentals()
    ):
        g = poly_gcd(num, den)
        if not g.is_one and not g.is_zero and g.degree() > 0:
            num = _poly_exact_div(num, g)
            den = _poly_exact_div(den, g)
    # monic denominator
    lc = den.lead()[1]
    if lc != QONE:
        inv = QONE / lc
        num = num.scale(inv)
        den = den.scale(inv)
    return Expr(num, den)


def _extract_integer_logs(poly):
    """Rewrite monomials whose exp part has an integer log coefficient.

    Returns an Expr when a rewrite happened, else None.
    """
    dirty = None
    for m in poly.terms:
        if m.ep is None:
            continue
        for atom, coeff in m.ep.terms:
            if atom.head == "log" and coeff.is_integer():
                dirty = (m, atom, coeff.as_fraction().numerator)
                break
        if dirty:
            break
    if dirty is None:
        return None
    m, atom, n = dirty
    c = poly.terms[m]
    rest = Poly({mm: cc for mm, cc in poly.terms.items() if mm is not m and mm != m})
    kept = [(a, co) for a, co in m.ep.terms if a is not atom and a != atom]
    new_ep = make_exppart(m.ep.base, kept)
    piece = Expr(Poly({m.with_ep(new_ep): c}), POLY_ONE) * (atom.data ** n)
    tail = _extract_integer_logs(rest)
    if tail is None:
        tail = Expr(rest, POLY_ONE)
    return piece + tail


EXPR_ZERO = Expr(POLY_ZERO, POLY_ONE)
EXPR_ONE = Expr(POLY_ONE, POLY_ONE)


# ---------------------------------------------------------------------------
# constructors


def rational(q):
    if isinstance(q, int):
        q = Fraction(q)
    if not isinstance(q, Fraction):
        raise KernelError("expected int or Fraction, got %r" % (q,))
    if q == 0:
        return EXPR_ZERO
    if q == 1:
        return EXPR_ONE
    return Expr(poly_const(q), POLY_ONE)


def from_atom(atom):
    return Expr(poly_var(atom), POLY_ONE)


def coord(i):
    return from_atom(coord_atom(i))


def theta(i):
    return from_atom(theta_atom(i))


def param(name):
    return from_atom(param_atom(name))


def _split_sign(f):
    """Return (g, sign) with g = sign * f and g's leading coefficient positive."""
    if f.num.lead()[1] < 0:
        return -f, -1
    return f, 1


def exp_of(f):
    """exp(f) for f = base + sum(c_g * g) linear over generator atoms."""
    if f.is_zero():
        return EXPR_ONE
    if f.den.has_transcendentals():
        raise KernelError("unsupported exp argument (transcendental denominator)")
    base_terms = {}
    gen_coeffs = {}
    for m, c in f.num.terms.items():
        if m.ep is not None:
            raise KernelError("unsupported exp argument (nested exponential)")
        gens = [(a, e) for a, e in m.vars if a.is_generator]
        if not gens:
            base_terms[m] = c
            continue
        if len(gens) > 1 or gens[0][1] != 1:
            raise KernelError("unsupported exp argument (nonlinear in generators)")
        atom = gens[0][0]
        rest = m.without(atom, 1)
        bucket = gen_coeffs.setdefault(atom, {})
        bucket[rest] = bucket.get(rest, QZERO) + c
    base = make_expr(make_poly(base_terms), f.den) if base_terms else EXPR_ZERO
    mult = EXPR_ONE
    terms = []
    for atom, bucket in gen_coeffs.items():
        coeff = make_expr(make_poly(bucket), f.den)
        if coeff.is_zero():
            continue
        if atom.head == "log" and coeff.is_integer():
            mult = mult * (atom.data ** coeff.as_fraction().numerator)
        else:
            terms.append((atom, coeff))
    ep = make_exppart(base, terms)
    if ep is None:
        return mult
    return mult * Expr(Poly({Monomial((), ep): QONE}), POLY_ONE)


def log_of(f):
    """log(f), decomposed over monomial factors and exponentials."""
    if f.is_zero():
        raise KernelError("log of zero")
    if f.is_one():
        return EXPR_ZERO
    return _log_poly(f.num) - _log_poly(f.den)


def _log_poly(p):
    if p.is_one:
        return EXPR_ZERO
    if len(p.terms) == 1:
        (m, c), = p.terms.items()
        acc = EXPR_ZERO
        if c != QONE:
            acc = acc + from_atom(_log_const_atom(c))
        for a, e in m.vars:
            if a.is_generator:
                raise KernelError("log of a transcendental factor")
            acc = acc + rational(e) * from_atom(_gen_atom("log", from_atom(a)))
        if m.ep is not None:
            acc = acc + m.ep.as_expr()
        return acc
    if p.has_transcendentals():
        eps = {m.ep for m in p.terms}
        if len(eps) == 1:
            # a shared exponential factor comes out of the log additively
            ep = next(iter(eps))
            if ep is not None:
                stripped = Poly({m.with_ep(None): c for m, c in p.terms.items()})
                return _log_poly(stripped) + ep.as_expr()
        raise KernelError("log of a transcendental polynomial")
    common = p.common_monomial()
    if common.vars:
        return _log_poly(Poly({common: QONE})) + _log_poly(p.div_monomial(common))
    cont = _content(p)
    prim = p.scale(QONE / cont)
    acc = from_atom(_gen_atom("log", Expr(prim, POLY_ONE)))
    if cont != QONE:
        acc = acc + from_atom(_log_const_atom(cont))
    return acc


def _log_const_atom(c):
    return _gen_atom("log", rational(c))


def atan_of(f):
    """atan(f) with sign normalization and rotation extraction."""
    if f.is_zero():
        return EXPR_ZERO
    g, sign = _split_sign(f)
    rot = _atan_rotation(g)
    if rot is not None:
        return rot if sign > 0 else -rot
    if g.has_transcendentals():
        raise KernelError("unsupported atan argument: %s" % g.skey())
    out = from_atom(_gen_atom("atan", g))
    return out if sign > 0 else -out


def _atan_rotation(f):
    """Undo a rotation: atan((A s + B c)/(A c - B s)) = u + atan(B/A)."""
    args = {}
    for poly in (f.num, f.den):
        for m in poly.terms:
            for a, _ in m.vars:
                if a.head in ("cos", "sin"):
                    args.setdefault(a.data.skey(), a.data)
    for _, u in sorted(args.items()):
        c_at = _gen_atom("cos", u)
        s_at = _gen_atom("sin", u)
        split_n = _linear_in_pair(f.num, c_at, s_at)
        if split_n is None:
            continue
        split_d = _linear_in_pair(f.den, c_at, s_at)
        if split_d is None:
            continue
        nc, ns = split_n
        dc, ds = split_d
        # numerator = A s + B c, denominator = A c - B s
        a_poly, b_poly = ns, nc
        if a_poly.is_zero:
            continue
        if dc == a_poly and ds == b_poly.neg():
            inner = make_expr(b_poly, POLY_ONE) / make_expr(a_poly, POLY_ONE)
            return u + atan_of(inner)
        if dc == a_poly.neg() and ds == b_poly:
            inner = make_expr(b_poly, POLY_ONE) / make_expr(a_poly, POLY_ONE)
            return -(u + atan_of(inner))
    return None


def _linear_in_pair(p, c_at, s_at):
    """Split p = C*cos + S*sin; None unless homogeneous of degree 1 in the pair."""
    c_part = {}
    s_part = {}
    for m, c in p.terms.items():
        ec = m.exponent(c_at)
        es = m.exponent(s_at)
        if ec + es != 1:
            return None
        if ec:
            c_part[m.without(c_at, 1)] = c
        else:
            s_part[m.without(s_at, 1)] = c
    return make_poly(c_part), make_poly(s_part)


def cos_of(f):
    if f.is_zero():
        return EXPR_ONE
    if f.has_transcendentals():
        raise KernelError("unsupported cos argument: %s" % f.skey())
    g, _ = _split_sign(f)
    return from_atom(_gen_atom("cos", g))


def sin_of(f):
    if f.is_zero():
        return EXPR_ZERO
    if f.has_transcendentals():
        raise KernelError("unsupported sin argument: %s" % f.skey())
    g, sign = _split_sign(f)
    out = from_atom(_gen_atom("sin", g))
    return out if sign > 0 else -out


def pow_rational(f, q):
    """f**q for rational q; non-integer exponents go through exp(q*log f)."""
    if isinstance(q, int):
        return f ** q
    if q.denominator == 1:
        return f ** q.numerator
    return exp_of(rational(q) * log_of(f))


# ---------------------------------------------------------------------------
# calculus and substitution


def differentiate(f, atom):
    """Exact partial derivative with respect to a variable atom."""
    if atom.is_generator:
        raise KernelError("can only differentiate by a variable atom")
    dn = _diff_poly(f.num, atom)
    dd = _diff_poly(f.den, atom)
    if dd.is_zero():
        return dn * make_expr(POLY_ONE, f.den)
    fn = Expr(f.num, POLY_ONE)
    fd = Expr(f.den, POLY_ONE)
    return (dn * fd - fn * dd) / (fd * fd)


def _diff_poly(p, atom):
    acc = EXPR_ZERO
    for m, c in p.terms.items():
        acc = acc + rational(c) * _diff_monomial(m, atom)
    return acc


def _diff_monomial(m, atom):
    acc = EXPR_ZERO
    whole = Expr(Poly({m: QONE}), POLY_ONE)
    for a, e in m.vars:
        da = _diff_atom(a, atom)
        if da.is_zero():
            continue
        rest = Poly({m.without(a, e).mul(make_monomial([(a, e - 1)], None)): QONE})
        acc = acc + rational(e) * da * Expr(rest, POLY_ONE)
    if m.ep is not None:
        dw = differentiate(m.ep.base, atom)
        for a, coeff in m.ep.terms:
            dw = dw + differentiate(coeff, atom) * from_atom(a)
            dw = dw + coeff * _diff_atom(a, atom)
        if not dw.is_zero():
            acc = acc + dw * whole
    return acc


def _diff_atom(a, atom):
    if not a.is_generator:
        return EXPR_ONE if a == atom else EXPR_ZERO
    du = differentiate(a.data, atom)
    if du.is_zero():
        return EXPR_ZERO
    if a.head == "log":
        return du / a.data
    if a.head == "atan":
        return du / (EXPR_ONE + a.data * a.data)
    if a.head == "cos":
        return -sin_of(a.data) * du
    return cos_of(a.data) * du


def substitute(f, mapping):
    """Substitute variable atoms by expressions, rebuilding canonically.

    mapping: dict Atom -> Expr (or int/Fraction).  Generator arguments and
    exponential parts are rebuilt through the smart constructors, so all
    canonical rules (rotation extraction, integer-log collapse, ...) re-fire.
    """
    mapping = {a: _coerce(v) for a, v in mapping.items()}
    cache = {}
    num = _subst_poly(f.num, mapping, cache)
    den = _subst_poly(f.den, mapping, cache)
    return num / den


def _subst_poly(p, mapping, cache):
    acc = EXPR_ZERO
    for m, c in p.terms.items():
        term = rational(c)
        for a, e in m.vars:
            term = term * _subst_atom(a, mapping, cache) ** e
        if m.ep is not None:
            w = substitute(m.ep.base, mapping)
            for a, coeff in m.ep.terms:
                w = w + substitute(coeff, mapping) * _subst_atom(a, mapping, cache)
            term = term * exp_of(w)
        acc = acc + term
    return acc


def _subst_atom(a, mapping, cache):
    if not a.is_generator:
        got = mapping.get(a)
        return got if got is not None else from_atom(a)
    got = cache.get(a)
    if got is not None:
        return got
    arg = substitute(a.data, mapping)
    builder = {"log": log_of, "atan": atan_of, "cos": cos_of, "sin": sin_of}[a.head]
    out = builder(arg)
    cache[a] = out
    return out


def evaluate(f, point):
    """Evaluate a transcendental-free expression to a Fraction.

    point: dict Atom -> Fraction.  Raises SingularPoint on a zero denominator
    and KernelError if a transcendental or unassigned atom remains.
    """
    num = _eval_poly(f.num, point)
    den = _eval_poly(f.den, point)
    if den == 0:
        raise SingularPoint("denominator vanishes at the sample point")
    return num / den


def _eval_poly(p, point):
    tot = QZERO
    for m, c in p.terms.items():
        if m.ep is not None:
            raise KernelError("cannot numerically evaluate an exponential factor")
        v = c
        for a, e in m.vars:
            if a.is_generator:
                raise KernelError("cannot numerically evaluate %s" % atom_str(a))
            if a not in point:
                raise KernelError("no value for %s" % atom_str(a))
            v *= point[a] ** e
        tot += v
    return tot


# ---------------------------------------------------------------------------
# rendering (canonical strings; io builds on these)


def frac_str(q):
    return str(q.numerator) if q.denominator == 1 else "%d/%d" % (q.numerator, q.denominator)


def monomial_str(m, coeff):
    parts = []
    if coeff != QONE or (not m.vars and m.ep is None):
        parts.append(frac_str(coeff))
    for a, e in m.vars:
        s = atom_str(a)
        parts.append(s if e == 1 else "%s^%d" % (s, e))
    if m.ep is not None:
        parts.append("exp(%s)" % expr_str(m.ep.as_expr()))
    return "*".join(parts)


def poly_str(p):
    if p.is_zero:
        return "0"
    bits = []
    for m, c in p.items():
        if not bits:
            bits.append(monomial_str(m, c))
        elif c < 0:
            bits.append("- " + monomial_str(m, -c))
        else:
            bits.append("+ " + monomial_str(m, c))
    return " ".join(bits)


def expr_str(f):
    if f.den.is_one:
        return poly_str(f.num)
    num = poly_str(f.num)
    den = poly_str(f.den)
    if len(f.num.terms) > 1:
        num = "(%s)" % num
    if len(f.den.terms) > 1 or "*" in den or "^" in den or den.startswith("-"):
        den = "(%s)" % den
    return "%s/%s" % (num, den)
