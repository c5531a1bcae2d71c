"""Degreewise dualization, evaluation/coevaluation, shifts, and the
double construction.

For a finite graded space the dual basis element of ``e`` is named
``e^`` with degree -|e|.  Dual maps are produced by a brute-force
adjunction solve from

    ev(f_dual (x) 1) = ev(1 (x) f),

where the pairing of tensor powers contracts factors inside out, so the
dual of a tensor power reverses slot order.  The double of an instance
with vanishing copairing lives on the direct sum of the space and its
shifted dual; shifted dual names carry a prime: ``e'`` has degree
-|e| + |lambda|.  Each structure map of the double is assembled from
six named components so that sign errors localize; the tests recompute
every component along an independent evaluation/coevaluation route.
"""

from __future__ import annotations

from .core import (Element, EngineError, FiniteSpace, GradedMap,
                   basis_element, identity, permute, scalar_element,
                   source_basis_keys, zero_element)
from .structures import FrobeniusInstance


class DoubleError(EngineError):
    pass


# ---------------------------------------------------------------------------
# dual spaces and dual maps
# ---------------------------------------------------------------------------

_dual_cache = {}


def dual_space(space):
    """A^vee with basis e^ of degree -|e|; finite spaces only."""
    if not space.is_finite():
        raise DoubleError("cannot dualize the infinite space %s" % space.name)
    got = _dual_cache.get(id(space))
    if got is None:
        got = FiniteSpace(space.name + "^",
                          {n + "^": -space.degree(n) for n in space.basis_names()})
        _dual_cache[id(space)] = (space, got)
        return got
    return got[1]


def dual_name(name):
    return name + "^"


def rev_dual_key(key):
    return tuple(dual_name(n) for n in reversed(key))


def dual_map(f, name=None):
    """The adjoint of a map between finite tensor powers.

    Satisfies ev(f_dual (x) 1) = ev(1 (x) f); the slot order of source
    and target reverses.  Contravariance carries the Koszul sign:
    dual(f . g) = (-1)^{|f||g|} dual(g) . dual(f).
    """
    field = f.field
    src = tuple(dual_space(t) for t in reversed(f.target))
    tgt = tuple(dual_space(s) for s in reversed(f.source))
    sign_flip = f.degree % 2
    table = {}
    for key in source_basis_keys(f.source):
        out = f.on_key(key)
        if out.is_zero():
            continue
        image_key = rev_dual_key(key)
        for okey, coeff in out.coeffs.items():
            phi = rev_dual_key(okey)
            # (-1)^{|f||phi|} with |phi| = -|f(key)|
            value = coeff
            if sign_flip and (sum(f.target[i].degree(n)
                                  for i, n in enumerate(okey)) % 2):
                value = field.neg(value)
            row = table.setdefault(phi, {})
            row[image_key] = field.add(row.get(image_key, field.coerce(0)), value)
    elem_table = {k: Element(tgt, field, v) for k, v in table.items()}
    elem_table = {k: v for k, v in elem_table.items() if not v.is_zero()}
    return GradedMap(src, tgt, f.degree, field,
                     name=name or "dual(%s)" % f.name, table=elem_table)


def build_ev_coev(space, field):
    """The canonical pairing and copairing of a finite space.

    ev(e^ (x) e) = 1 and coev(1) = sum e (x) e^; the four zig-zag
    identities hold exactly.
    """
    if not space.is_finite():
        raise DoubleError("cannot build ev/coev on infinite %s" % space.name)
    dv = dual_space(space)
    ev_table = {(dual_name(n), n): scalar_element(field)
                for n in space.basis_names()}
    ev = GradedMap((dv, space), (), 0, field, name="ev", table=ev_table)
    coev_out = Element((space, dv), field,
                       {(n, dual_name(n)): field.coerce(1)
                        for n in space.basis_names()})
    coev = GradedMap((), (space, dv), 0, field, name="coev",
                     table={(): coev_out})
    return ev, coev


def double_dual_identification(space, field):
    """The canonical iso A -> A^vee^vee, e |-> (-1)^{|e|} e^^.

    With this sign, dual(dual(f)) composed around the identification
    recovers f exactly for maps of any degree.
    """
    ddual = dual_space(dual_space(space))

    def rule(key):
        deg = space.degree(key[0])
        return basis_element((ddual,), field, (dual_name(dual_name(key[0])),),
                             -1 if deg % 2 else 1)

    return GradedMap((space,), (ddual,), 0, field, name="iota", rule=rule)


# ---------------------------------------------------------------------------
# shifts
# ---------------------------------------------------------------------------

def shift_space(space, lam_degree, tag="'"):
    """The shifted dual part of the double: e' has degree -|e| + |lambda|."""
    return FiniteSpace(space.name + tag,
                       {n + tag: -space.degree(n) + lam_degree
                        for n in space.basis_names()})


def build_shifts(space, shifted, lam_degree, field):
    """Mutually inverse s (degree |lambda|) and omega (degree -|lambda|)."""
    dv = dual_space(space)
    s_table = {}
    w_table = {}
    for n in space.basis_names():
        s_table[(dual_name(n),)] = basis_element((shifted,), field, (n + "'",))
        w_table[(n + "'",)] = basis_element((dv,), field, (dual_name(n),))
    s = GradedMap((dv,), (shifted,), lam_degree, field, name="s", table=s_table)
    w = GradedMap((shifted,), (dv,), -lam_degree, field, name="omega",
                  table=w_table)
    return s, w


# ---------------------------------------------------------------------------
# the double construction
# ---------------------------------------------------------------------------

class DoubleData:
    """The assembled double plus its named component maps.

    ``mu_components`` and ``lam_components`` are keyed by (input parts)
    respectively (output parts) so the tests can exercise each of the
    six product and six coproduct pieces in isolation.
    """

    def __init__(self, instance, base, parts):
        self.instance = instance
        self.base = base
        for key, value in parts.items():
            setattr(self, key, value)


def build_double(instance):
    """Frobenius structure on the sum of a finite instance with
    vanishing copairing and its shifted dual."""
    return build_double_data(instance).instance


def build_double_data(instance):
    A = instance.space
    field = instance.field
    if not A.is_finite():
        raise DoubleError("the double needs a finite-dimensional instance, "
                          "%s is rule-generated" % A.name)
    cop = instance.copairing()
    if not cop.is_zero():
        raise DoubleError("the double needs lambda . eta = 0, got %s" % cop)

    d = instance.lam_degree
    Av = dual_space(A)
    Sh = shift_space(A, d)
    names = {}
    for n in A.basis_names():
        names[n] = A.degree(n)
    for n in Sh.basis_names():
        names[n] = Sh.degree(n)
    D = FiniteSpace("D(%s)" % instance.name, names)

    iA = identity(A, field)
    iAv = identity(Av, field)
    mu, lam, delta = instance.mu, instance.lam, instance.delta
    ev, coev = build_ev_coev(A, field)
    s, w = build_shifts(A, Sh, d, field)
    tau_AAv = permute((1, 0), (A, Av), field)
    ev_t = ev * tau_AAv          # (A, Av) -> scalars
    coev_t = tau_AAv * coev      # scalars -> (Av, A)
    mu_d = dual_map(mu)
    lam_d = dual_map(lam)
    delta_d = dual_map(delta)

    # product components, by input parts (a = base, v = shifted dual)
    mu_comp = {
        ("a", "a", "a"): mu,
        ("v", "a", "v"): s * (iAv @ ev) * (mu_d @ iA) * (w @ iA),
        ("a", "v", "v"): s * (ev_t @ iAv) * (iA @ mu_d) * (iA @ w),
        ("v", "v", "v"): s * lam_d * (w @ w),
        ("v", "a", "a"): ((ev @ iA) * (iAv @ lam) * (w @ iA)).scale(-1),
        ("a", "v", "a"): (iA @ ev_t) * (lam @ iAv) * (iA @ w),
    }
    # coproduct components, by source part and output parts
    lam_comp = {
        ("a", "a", "a"): lam,
        ("v", "a", "v"): (iA @ s) * (ev @ iA @ iAv) * (iAv @ lam @ iAv)
                         * (iAv @ coev) * w,
        ("v", "v", "a"): (s @ iA) * (iAv @ iA @ ev_t) * (iAv @ lam @ iAv)
                         * (coev_t @ iAv) * w,
        ("v", "v", "v"): (s @ s) * mu_d * w,
        ("a", "a", "v"): ((iA @ s) * (mu @ iAv) * (iA @ coev)).scale(-1),
        ("a", "v", "a"): (s @ iA) * (iAv @ mu) * (coev_t @ iA),
    }

    def part(name):
        return "a" if A.contains(name) else "v"

    def into(elem, spaces):
        return Element(spaces, field, elem.coeffs)

    mu_table = {}
    for key in source_basis_keys((D, D)):
        out = zero_element((D,), field)
        p = (part(key[0]), part(key[1]))
        for (p1, p2, _), comp in mu_comp.items():
            if (p1, p2) == p:
                out = out + into(comp.on_key(key), (D,))
        if not out.is_zero():
            mu_table[key] = out
    mu_D = GradedMap((D, D), (D,), 0, field, name="mu", table=mu_table)

    lam_table = {}
    for key in source_basis_keys((D,)):
        out = zero_element((D, D), field)
        p = part(key[0])
        for (p0, _, _2), comp in lam_comp.items():
            if p0 == p:
                out = out + into(comp.on_key(key), (D, D))
        if not out.is_zero():
            lam_table[key] = out
    lam_D = GradedMap((D,), (D, D), d, field, name="lambda", table=lam_table)

    delta_sh = (s * delta_d * w).scale(-1)
    delta_table = {}
    for key in source_basis_keys((D,)):
        comp = delta if part(key[0]) == "a" else delta_sh
        out = comp.on_key(key)
        if not out.is_zero():
            delta_table[key] = into(out, (D,))
    delta_D = GradedMap((D,), (D,), 1, field, name="Delta", table=delta_table)

    eta_D = into(instance.eta, (D,))
    eps_table = {}
    for n, coeff in instance.eta.coeffs.items():
        eps_table[(n[0] + "'",)] = scalar_element(field, coeff)
    eps_D = GradedMap((D,), (), -d, field, name="epsilon", table=eps_table)

    frob = FrobeniusInstance("D(%s)" % instance.name, D, field, mu_D, eta_D,
                             lam_D, delta_D, d, eps_D)
    return DoubleData(frob, instance, {
        "mu_components": mu_comp,
        "lam_components": lam_comp,
        "delta_shifted": delta_sh,
        "spaces": (A, Av, Sh, D),
        "shifts": (s, w),
        "ev_coev": (ev, coev),
        "duals": {"mu": mu_d, "lambda": lam_d, "Delta": delta_d},
    })
