"""Normalization: eliminate frame parameters from the lifted invariants.

The active set starts as the lifted invariants.  Each round scans the set in
order and tries, per expression, three pivot patterns for each remaining
frame parameter th (lowest index first):

* linear: the expression is exp(w) * (A*th + B) / D with A, B, D free of th
  (w may be anything, an exponential never vanishes).  Normalize to 0 and
  substitute th = -B/A everywhere.
* exponential unknown: the expression is (V*exp(w) + W) / D where w carries
  th linearly and V, W, D are free of th, and everywhere else th occurs only
  linearly inside exponential bases.  Normalize to 1; the whole exponential
  direction is replaced, exp parts picking up rational-function multiples of
  log(solution).
* logarithmic: the expression is exp(w) * V / D with V, D free of th and w
  carrying th linearly; th itself is solved as a combination of logarithms
  and substituted, so polynomial occurrences of th become logarithmic terms.
  Requires th to stay out of cos/sin/atan arguments.

When no pivot applies, registered recipes may replace chosen entries by
combinations (sum of squares of a rotation pair, exponentiated arctangent,
cross ratios); then pivoting resumes.  Survivors must be parameter-free and
are re-verified exactly against the annihilation system before they are
returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .expr import (
    EXPR_ZERO,
    Expr,
    KernelError,
    Poly,
    POLY_ONE,
    atan_of,
    coord_atom,
    differentiate,
    exp_of,
    from_atom,
    log_of,
    make_expr,
    make_poly,
    rational,
    substitute,
)
from .linalg import rank_exprs


@dataclass
class PivotRecord:
    kind: str
    theta: object
    label: str
    constant: int
    solution: Expr
    assumptions: list


@dataclass
class Recipe:
    """Replace chosen active entries by combinations of them.

    inputs are 1-based positions in the original lifted list; consumes must
    be a subset of inputs.  build receives the current expressions at the
    input positions, in order, and returns the replacement expressions.
    """

    name: str
    inputs: tuple
    consumes: tuple
    build: object


@dataclass
class EliminationResult:
    invariants: list
    pivots: list
    assumptions: list
    residual: list
    applied_recipes: list
    complete: bool

    @property
    def count(self):
        return len(self.invariants)


def _theta_atoms(f):
    return sorted((a for a in f.atoms() if a.head == "th"), key=lambda a: a.skey)


def _occurs_in_generator_args(f, th):
    for poly in (f.num, f.den):
        for m in poly.terms:
            for a, _ in m.vars:
                if a.is_generator and a.data.depends_on(th):
                    return True
            if m.ep is not None:
                for ga, c in m.ep.terms:
                    if ga.data.depends_on(th) or c.depends_on(th):
                        return True
    return False


def _occurs_explicitly(f, th):
    for poly in (f.num, f.den):
        for m in poly.terms:
            if m.exponent(th):
                return True
    return False


def _ep_bases_linear(f, th):
    """True when every exp-part base of f is at most linear in th."""
    for poly in (f.num, f.den):
        for m in poly.terms:
            if m.ep is None:
                continue
            base = m.ep.base
            if base.den.degree_in(th) or base.num.degree_in(th) > 1:
                return False
    return True


def _strip_common_ep(poly):
    """(stripped poly, ep) when all monomials share one exp part, else None."""
    eps = {m.ep for m in poly.terms}
    if len(eps) != 1:
        return None
    ep = next(iter(eps))
    if ep is None:
        return poly, None
    return Poly({m.with_ep(None): c for m, c in poly.terms.items()}), ep


def _linear_coefficient(base, th):
    """Coefficient of th in an expression linear in th (else None)."""
    if base.den.degree_in(th):
        return None
    if base.num.degree_in(th) > 1:
        return None
    c = make_expr(base.num.coeff_in(th, 1), base.den)
    return c


# ---------------------------------------------------------------------------
# pivot kinds


def _try_linear(f, th, label, others):
    stripped = _strip_common_ep(f.num)
    if stripped is None:
        return None
    num, _ = stripped
    if num.degree_in(th) != 1 or f.den.degree_in(th) != 0:
        return None
    body = make_expr(num, POLY_ONE)
    den_body = make_expr(f.den, POLY_ONE)
    if _occurs_in_generator_args(body, th) or _occurs_in_generator_args(den_body, th):
        return None
    for m in num.terms:
        if m.ep is not None and m.ep.base.depends_on(th):
            return None
    for m in f.den.terms:
        if m.ep is not None and m.ep.base.depends_on(th):
            return None
    a = make_expr(num.coeff_in(th, 1), f.den)
    if a.is_zero():
        return None
    b = make_expr(num.coeff_in(th, 0), f.den)
    sol = -(b / a)
    record = PivotRecord("linear", th, label, 0, sol, [a])
    return record, lambda h: substitute(h, {th: sol})


def _exp_shape(f, th):
    """Split f.num into (V, w0, W) for the exponential patterns, or None.

    V collects the monomials whose exp part depends on th (they must all
    share the same exp part w0); W is the rest.  Both V and W must be free
    of th in every other way, as must the denominator.
    """
    if f.den.degree_in(th):
        return None
    v_terms = {}
    w_terms = {}
    w0 = None
    for m, c in f.num.terms.items():
        dep = m.ep is not None and (
            m.ep.base.depends_on(th)
            or any(g.data.depends_on(th) or cc.depends_on(th) for g, cc in m.ep.terms)
        )
        if dep:
            if w0 is None:
                w0 = m.ep
            elif m.ep != w0:
                return None
            v_terms[m.with_ep(None)] = c
        else:
            w_terms[m] = c
        if m.exponent(th):
            return None
        if any(a.is_generator and a.data.depends_on(th) for a, _ in m.vars):
            return None
    if w0 is None:
        return None
    for g, cc in w0.terms:
        if g.data.depends_on(th) or cc.depends_on(th):
            return None
    for m in f.den.terms:
        if m.ep is not None and m.ep.base.depends_on(th):
            return None
        if any(a.is_generator and a.data.depends_on(th) for a, _ in m.vars):
            return None
    c0 = _linear_coefficient(w0.base, th)
    if c0 is None or c0.is_zero() or c0.depends_on(th):
        return None
    v = make_poly(v_terms)
    w = make_poly(w_terms)
    return v, w0, c0, w


def _try_exp_unknown(f, th, label, others):
    shape = _exp_shape(f, th)
    if shape is None:
        return None
    v, w0, c0, w = shape
    # guard: everywhere else th may live only inside linear exponential bases
    for h in others:
        if not h.depends_on(th):
            continue
        if _occurs_explicitly(h, th) or _occurs_in_generator_args(h, th):
            return None
        if not _ep_bases_linear(h, th):
            return None
    th_expr = from_atom(th)
    w_rest = w0.as_expr() - c0 * th_expr
    v_expr = make_expr(v, POLY_ONE)
    w_expr = make_expr(w, POLY_ONE)
    d_expr = make_expr(f.den, POLY_ONE)
    numer = d_expr - w_expr
    if numer.is_zero():
        return None
    try:
        sol = numer * exp_of(-w_rest) / v_expr
        log_sol = log_of(sol)
    except KernelError:
        return None
    record = PivotRecord("exp", th, label, 1, sol, [v_expr, numer])
    return record, lambda h: _substitute_exp_direction(h, th, c0, log_sol)


def _substitute_exp_direction(h, th, c0, log_sol):
    """Rewrite every exp(c'*th + rest) in h as exp((c'/c0)*log_sol + rest)."""
    if not h.depends_on(th):
        return h
    th_expr = from_atom(th)
    num = _subst_dir_poly(h.num, th, c0, log_sol, th_expr)
    den = _subst_dir_poly(h.den, th, c0, log_sol, th_expr)
    return num / den


def _subst_dir_poly(p, th, c0, log_sol, th_expr):
    acc = EXPR_ZERO
    for m, c in p.terms.items():
        term = rational(c)
        for a, e in m.vars:
            if a == th:
                raise KernelError("explicit parameter inside exponential pivot")
            term = term * from_atom(a) ** e
        if m.ep is not None:
            base = m.ep.base
            cp = _linear_coefficient(base, th)
            if cp is None:
                raise KernelError("nonlinear exponential base in pivot")
            w = base - cp * th_expr
            for g, cc in m.ep.terms:
                w = w + cc * from_atom(g)
            if not cp.is_zero():
                w = w + (cp / c0) * log_sol
            term = term * exp_of(w)
        acc = acc + term
    return acc


def _try_exp_log(f, th, label, others):
    shape = _exp_shape(f, th)
    if shape is None:
        return None
    v, w0, c0, w = shape
    if not w.is_zero:
        return None
    # guard: th must stay out of generator arguments everywhere
    for h in others:
        if h.depends_on(th) and _occurs_in_generator_args(h, th):
            return None
    th_expr = from_atom(th)
    w_rest = w0.as_expr() - c0 * th_expr
    v_expr = make_expr(v, POLY_ONE)
    d_expr = make_expr(f.den, POLY_ONE)
    try:
        sol = (log_of(d_expr) - log_of(v_expr) - w_rest) / c0
    except KernelError:
        return None
    record = PivotRecord("exp-log", th, label, 1, sol, [v_expr, d_expr, c0])
    return record, lambda h: substitute(h, {th: sol})


# ---------------------------------------------------------------------------
# the driver


def eliminate(lifted, recipes=()):
    """Run the normalization and return the invariants with a full trace."""
    from .verify import check_invariant

    exprs = lifted.exprs()
    active = [(str(i + 1), f) for i, f in enumerate(exprs)]
    pivots = []
    applied = []
    pending = list(recipes)
    assumptions = []
    seen_assumptions = set()

    def note_assumptions(exprs_):
        for a in exprs_:
            if a.is_rational():
                continue
            key = a.skey()
            if key not in seen_assumptions:
                seen_assumptions.add(key)
                assumptions.append(a)

    poisoned = set()

    def find_pivot():
        for kind_fn in (_try_linear, _try_exp_unknown, _try_exp_log):
            for label, f in active:
                if f.is_zero():
                    continue
                thetas = _theta_atoms(f)
                if not thetas:
                    continue
                others = [h for (l2, h) in active if l2 != label]
                for th in thetas:
                    if (label, kind_fn.__name__, th.skey) in poisoned:
                        continue
                    hit = kind_fn(f, th, label, others)
                    if hit is not None:
                        return hit, (label, kind_fn.__name__, th.skey)
        return None, None

    while True:
        hit, key = find_pivot()
        if hit is not None:
            record, apply = hit
            label = key[0]
            rebuilt = []
            try:
                for l2, h in active:
                    if l2 == label:
                        continue
                    rebuilt.append((l2, apply(h)))
            except (KernelError, ZeroDivisionError):
                poisoned.add(key)
                continue
            note_assumptions(record.assumptions)
            pivots.append(record)
            active = rebuilt
            continue
        # stall: try a recipe
        fired = None
        labels_present = {l for l, _ in active}
        for ridx, recipe in enumerate(pending):
            need = [str(i) for i in recipe.inputs]
            if not all(n in labels_present for n in need):
                continue
            current = {l: h for l, h in active}
            try:
                built = recipe.build([current[n] for n in need])
            except (KernelError, ZeroDivisionError):
                continue
            fired = (ridx, recipe, built)
            break
        if fired is None:
            break
        ridx, recipe, built = fired
        pending.pop(ridx)
        applied.append(recipe.name)
        consumed = {str(i) for i in recipe.consumes}
        slot = min(
            i for i, (l, _) in enumerate(active) if l in consumed
        )
        kept_before = [it for it in active[:slot] if it[0] not in consumed]
        kept_after = [it for it in active[slot:] if it[0] not in consumed]
        newly = [
            ("%s.%d" % (recipe.name, k + 1), h) for k, h in enumerate(built)
        ]
        active = kept_before + newly + kept_after
        poisoned.clear()

    survivors = []
    residual = []
    for label, f in active:
        if not any(a.head == "x" for a in f.atoms()):
            continue
        if _theta_atoms(f):
            residual.append(f)
        else:
            survivors.append(f)
    g = lifted.algebra
    for f in survivors:
        report = check_invariant(g, f)
        if not report.ok:
            raise KernelError(
                "internal error: eliminated expression fails annihilation: %s"
                % f.skey()
            )
    return EliminationResult(
        invariants=survivors,
        pivots=pivots,
        assumptions=assumptions,
        residual=residual,
        applied_recipes=applied,
        complete=not residual,
    )


# ---------------------------------------------------------------------------
# recipe builders


def sum_of_squares(i, j, name=None):
    return Recipe(
        name or "sum-of-squares(%d,%d)" % (i, j),
        (i, j),
        (i, j),
        lambda es: [es[0] * es[0] + es[1] * es[1]],
    )


def rotation_pair(i, j, coeff, name=None):
    """Replace a rotation pair by its radius-square and twisted exponential."""
    coeff = coeff if isinstance(coeff, Expr) else rational(coeff)

    def build(es):
        return [
            es[0] * es[0] + es[1] * es[1],
            exp_of(coeff * atan_of(es[1] / es[0])),
        ]

    return Recipe(name or "rotation-pair(%d,%d)" % (i, j), (i, j), (i, j), build)


def paired_ratios(i, j, k, l, freq, name=None):
    """Cross ratios of a second rotation pair against a base pair.

    Emits nu*(Ei*Ek + Ej*El)/(Ei^2 + Ej^2) - atan(Ej/Ei) and
    (Ei*El - Ej*Ek)/(Ei^2 + Ej^2).
    """
    freq = freq if isinstance(freq, Expr) else rational(freq)

    def build(es):
        ei, ej, ek, el = es
        r2 = ei * ei + ej * ej
        return [
            freq * (ei * ek + ej * el) / r2 - atan_of(ej / ei),
            (ei * el - ej * ek) / r2,
        ]

    return Recipe(
        name or "paired-ratios(%d,%d;%d,%d)" % (i, j, k, l),
        (i, j, k, l),
        (k, l),
        build,
    )


# ---------------------------------------------------------------------------
# utilities on invariant lists


def rescale_to_polynomial(exprs, scaler=None, max_power=12):
    """Clear denominators by multiplying with powers of an invariant scaler.

    When no scaler is given, the polynomial transcendental-free members of
    exprs themselves are tried; multiplying by powers of a fellow invariant
    keeps invariance.  Returns (rescaled list, notes).  Entries that cannot
    be cleared within max_power multiplications are returned unchanged with
    a note.
    """
    if scaler is not None:
        candidates = [scaler]
    else:
        candidates = [
            f for f in exprs if f.den.is_one and not f.has_transcendentals()
        ]
    out = []
    notes = []
    for f in exprs:
        if f.den.is_one:
            out.append(f)
            continue
        cleared = None
        for s in candidates:
            cand = f
            for _ in range(max_power):
                if cand.den.is_one:
                    cleared = cand
                    break
                cand = cand * s
            if cand.den.is_one:
                cleared = cand
            if cleared is not None:
                break
        if cleared is not None:
            out.append(cleared)
        else:
            out.append(f)
            notes.append("could not clear denominator of %s" % f.skey())
    return out, notes


def functionally_equivalent(first, second, g, seed=0, trials=6, param_point=None):
    """Exact test that two invariant families generate each other.

    Substitutes random rational coordinates, leaving residual transcendental
    values as formal field elements, and compares the ranks of the two
    Jacobians and of their union; equality of generic ranks in all three
    positions over the sampled points decides the answer.
    """
    import random

    from .algebra import sample_fraction

    rng = random.Random(seed)
    n = g.dim
    subs = {}
    if param_point:
        subs.update({a: rational(Fraction(v)) for a, v in param_point.items()})
    firsts = [substitute(f, subs) if subs else f for f in first]
    seconds = [substitute(f, subs) if subs else f for f in second]
    grad_a = [
        [differentiate(f, coord_atom(i)) for i in range(1, n + 1)] for f in firsts
    ]
    grad_b = [
        [differentiate(f, coord_atom(i)) for i in range(1, n + 1)] for f in seconds
    ]
    best = None
    for _ in range(max(1, trials)):
        point = {coord_atom(i): rational(sample_fraction(rng)) for i in range(1, n + 1)}
        try:
            rows_a = [[substitute(v, point) for v in row] for row in grad_a]
            rows_b = [[substitute(v, point) for v in row] for row in grad_b]
        except (ZeroDivisionError, KernelError):
            continue
        ra = rank_exprs(rows_a) if rows_a else 0
        rb = rank_exprs(rows_b) if rows_b else 0
        rab = rank_exprs(rows_a + rows_b) if rows_a or rows_b else 0
        if best is None:
            best = [ra, rb, rab]
        else:
            best[0] = max(best[0], ra)
            best[1] = max(best[1], rb)
            best[2] = max(best[2], rab)
    if best is None:
        raise KernelError("all sample points were singular")
    return best[0] == best[1] == best[2]
