"""Built-in instances.

The flagship model is the rule-based loop homology of an odd sphere:
the free graded-commutative algebra on a class A of degree -n and a
class U of degree n-1, with the explicit coproduct

    lambda(AU^k) = sum_{i+j=k-1} AU^i (x) AU^j
    lambda(U^k)  = sum_{i+j=k-1} (AU^i (x) U^j - U^i (x) AU^j)

and operator Delta(U^k) = 0, Delta(AU^k) = k U^{k-1}.  All operations
preserve finite support, so nothing is ever truncated; only the inputs
enumerated by a check window are bounded.
"""

from __future__ import annotations

import re

from .core import (Element, EngineError, FiniteSpace, GradedMap, GradedSpace,
                   QQ, basis_element, zero_element)
from .structures import BVUIInstance, FrobeniusInstance


# ---------------------------------------------------------------------------
# odd-sphere loop model
# ---------------------------------------------------------------------------

_SPHERE_NAME = re.compile(r"^(A?)U\^(\d+)$|^(A?)(U?)$")


def sphere_key(name):
    """Decode a sphere basis name into (a_flag, u_power), else None."""
    if name == "1":
        return (False, 0)
    m = _SPHERE_NAME.match(name)
    if not m:
        return None
    if m.group(2) is not None:
        return (m.group(1) == "A", int(m.group(2)))
    a, u = m.group(3), m.group(4)
    if not a and not u:
        return None
    return (a == "A", 1 if u == "U" else 0)


def sphere_name(a_flag, k):
    if k < 0:
        raise EngineError("negative U-power")
    head = "A" if a_flag else ""
    if k == 0:
        return head or "1"
    if k == 1:
        return head + "U"
    return "%sU^%d" % (head, k)


class SphereSpace(GradedSpace):
    """Rule-generated basis {U^k, AU^k : k >= 0} for odd n >= 3."""

    def __init__(self, n):
        self.n = n
        self.name = "sphere:%d" % n

    def degree(self, basis_name):
        key = sphere_key(basis_name)
        if key is None or sphere_name(*key) != basis_name:
            from .core import UnknownBasisName
            raise UnknownBasisName("%r is not a basis element of %s"
                                   % (basis_name, self.name))
        a, k = key
        return k * (self.n - 1) - (self.n if a else 0)

    def contains(self, basis_name):
        key = sphere_key(basis_name)
        return key is not None and sphere_name(*key) == basis_name

    def window_names(self, k):
        names = [sphere_name(a, i) for a in (False, True) for i in range(k + 1)]
        return tuple(sorted(names))


def sphere_model(n, field=QQ):
    """The odd-sphere loop homology instance; |lambda| = 1 - 2n."""
    if n < 3 or n % 2 == 0:
        raise EngineError("sphere model needs odd n >= 3, got %d" % n)
    space = SphereSpace(n)
    spaces1 = (space,)
    spaces2 = (space, space)

    def mu_rule(key):
        (a1, k1), (a2, k2) = sphere_key(key[0]), sphere_key(key[1])
        if a1 and a2:
            return zero_element(spaces1, field)
        return basis_element(spaces1, field, (sphere_name(a1 or a2, k1 + k2),))

    def lam_rule(key):
        a, k = sphere_key(key[0])
        out = zero_element(spaces2, field)
        one = field.coerce(1)
        minus = field.coerce(-1)
        for i in range(k):
            j = k - 1 - i
            if a:
                out = out + Element(spaces2, field, {
                    (sphere_name(True, i), sphere_name(True, j)): one})
            else:
                out = out + Element(spaces2, field, {
                    (sphere_name(True, i), sphere_name(False, j)): one,
                    (sphere_name(False, i), sphere_name(True, j)): minus})
        return out

    def delta_rule(key):
        a, k = sphere_key(key[0])
        if not a or k == 0:
            return zero_element(spaces1, field)
        return basis_element(spaces1, field, (sphere_name(False, k - 1),), k)

    mu = GradedMap(spaces2, spaces1, 0, field, name="mu", rule=mu_rule)
    lam = GradedMap(spaces1, spaces2, 1 - 2 * n, field, name="lambda",
                    rule=lam_rule)
    delta = GradedMap(spaces1, spaces1, 1, field, name="Delta", rule=delta_rule)
    eta = basis_element(spaces1, field, ("1",))
    return BVUIInstance("sphere:%d" % n, space, field, mu, eta, lam, delta,
                        1 - 2 * n)


def normalize_sphere_name(raw):
    key = sphere_key(raw)
    return None if key is None else sphere_name(*key)


# ---------------------------------------------------------------------------
# finite models
# ---------------------------------------------------------------------------

def _table_map(space, field, src_arity, tgt_arity, degree, name, entries):
    spaces_src = (space,) * src_arity
    spaces_tgt = (space,) * tgt_arity
    table = {}
    for key, out in entries.items():
        table[tuple(key)] = Element(
            spaces_tgt, field,
            {tuple(k): field.coerce(c) for k, c in out.items()})
    return GradedMap(spaces_src, spaces_tgt, degree, field, name=name,
                     table=table)


def sphere_frobenius_model(n, field=QQ):
    """Two-dimensional odd Frobenius model {1, x} with |x| = -n.

    Product unital with x^2 = 0; lambda(1) = x(x)1 - 1(x)x,
    lambda(x) = x(x)x; epsilon(1) = 0, epsilon(x) = 1; Delta = 0.
    """
    if n < 3 or n % 2 == 0:
        raise EngineError("Frobenius sphere model needs odd n >= 3, got %d" % n)
    space = FiniteSpace("sphere-frob:%d" % n, {"1": 0, "x": -n})
    mu = _table_map(space, field, 2, 1, 0, "mu", {
        ("1", "1"): {("1",): 1},
        ("1", "x"): {("x",): 1},
        ("x", "1"): {("x",): 1},
        ("x", "x"): {},
    })
    lam = _table_map(space, field, 1, 2, -n, "lambda", {
        ("1",): {("x", "1"): 1, ("1", "x"): -1},
        ("x",): {("x", "x"): 1},
    })
    delta = _table_map(space, field, 1, 1, 1, "Delta", {})
    epsilon = _table_map(space, field, 1, 0, n, "epsilon", {
        ("x",): {(): 1},
    })
    eta = basis_element((space,), field, ("1",))
    return FrobeniusInstance("sphere-frob:%d" % n, space, field, mu, eta, lam,
                             delta, -n, epsilon)


def trivial_model(field=QQ):
    """The one-dimensional instance: everything but the unit vanishes."""
    space = FiniteSpace("trivial", {"1": 0})
    mu = _table_map(space, field, 2, 1, 0, "mu", {("1", "1"): {("1",): 1}})
    lam = _table_map(space, field, 1, 2, -1, "lambda", {})
    delta = _table_map(space, field, 1, 1, 1, "Delta", {})
    eta = basis_element((space,), field, ("1",))
    return BVUIInstance("trivial", space, field, mu, eta, lam, delta, -1)


def exterior_model(field=QQ):
    """Free graded-commutative algebra on one odd generator, zero coproduct."""
    space = FiniteSpace("exterior", {"1": 0, "x": -1})
    mu = _table_map(space, field, 2, 1, 0, "mu", {
        ("1", "1"): {("1",): 1},
        ("1", "x"): {("x",): 1},
        ("x", "1"): {("x",): 1},
        ("x", "x"): {},
    })
    lam = _table_map(space, field, 1, 2, -1, "lambda", {})
    delta = _table_map(space, field, 1, 1, 1, "Delta", {})
    eta = basis_element((space,), field, ("1",))
    return BVUIInstance("exterior", space, field, mu, eta, lam, delta, -1)


def three_dim_model(field=QQ):
    """Nonzero coproduct with vanishing copairing: lambda(b) = a(x)a."""
    space = FiniteSpace("three-dim", {"1": 0, "a": -1, "b": -1})
    mu = _table_map(space, field, 2, 1, 0, "mu", {
        ("1", "1"): {("1",): 1},
        ("1", "a"): {("a",): 1},
        ("a", "1"): {("a",): 1},
        ("1", "b"): {("b",): 1},
        ("b", "1"): {("b",): 1},
    })
    lam = _table_map(space, field, 1, 2, -1, "lambda", {
        ("b",): {("a", "a"): 1},
    })
    delta = _table_map(space, field, 1, 1, 1, "Delta", {})
    eta = basis_element((space,), field, ("1",))
    return BVUIInstance("three-dim", space, field, mu, eta, lam, delta, -1)


_verified_examples = set()


def finite_bvui_examples(field=QQ):
    """The finite built-ins, each verified against the full suite before
    being handed out (once per field)."""
    out = [trivial_model(field), exterior_model(field), three_dim_model(field)]
    if field.name not in _verified_examples:
        from .checks import Window
        from .structures import BVUI_FULL, check_structure
        for inst in out:
            reports = check_structure(inst, BVUI_FULL, Window())
            bad = [r.relation for r in reports if r.status != "pass"]
            if bad:
                raise EngineError("built-in example %s fails %s"
                                  % (inst.name, ", ".join(bad)))
        _verified_examples.add(field.name)
    return out


# ---------------------------------------------------------------------------
# mutations for negative testing
# ---------------------------------------------------------------------------

MUTATIONS = {
    "identity": "no change; every suite still passes",
    "lambda-u-flip": "flip the sign of the U^i (x) AU^j terms in lambda(U^k)",
    "delta-au-doubled": "set Delta(AU^1) = 2 instead of 1 times U^0",
}


def mutate(instance, mutation):
    """A named structure-constant mutation, expected to break a relation."""
    if mutation == "identity":
        return instance
    if mutation not in MUTATIONS:
        raise EngineError("unknown mutation %r (have: %s)"
                          % (mutation, ", ".join(sorted(MUTATIONS))))
    if not isinstance(instance.space, SphereSpace):
        raise EngineError("mutation %r targets the sphere model" % mutation)
    field = instance.field
    space = instance.space
    spaces1 = (space,)
    spaces2 = (space, space)

    if mutation == "lambda-u-flip":
        def lam_rule(key):
            a, k = sphere_key(key[0])
            out = zero_element(spaces2, field)
            one = field.coerce(1)
            for i in range(k):
                j = k - 1 - i
                if a:
                    out = out + Element(spaces2, field, {
                        (sphere_name(True, i), sphere_name(True, j)): one})
                else:
                    out = out + Element(spaces2, field, {
                        (sphere_name(True, i), sphere_name(False, j)): one,
                        (sphere_name(False, i), sphere_name(True, j)): one})
            return out
        lam = GradedMap(spaces1, spaces2, instance.lam_degree, field,
                        name="lambda[mutated]", rule=lam_rule)
        return BVUIInstance(instance.name + "+lambda-u-flip", space, field,
                            instance.mu, instance.eta, lam, instance.delta,
                            instance.lam_degree)

    if mutation == "delta-au-doubled":
        def delta_rule(key):
            a, k = sphere_key(key[0])
            if not a or k == 0:
                return zero_element(spaces1, field)
            coeff = 2 if k == 1 else k
            return basis_element(spaces1, field, (sphere_name(False, k - 1),),
                                 coeff)
        delta = GradedMap(spaces1, spaces1, 1, field, name="Delta[mutated]",
                          rule=delta_rule)
        return BVUIInstance(instance.name + "+delta-au-doubled", space, field,
                            instance.mu, instance.eta, instance.lam, delta,
                            instance.lam_degree)

    raise EngineError("unhandled mutation %r" % mutation)


# ---------------------------------------------------------------------------
# model registry for the CLI
# ---------------------------------------------------------------------------

def builtin_model(name, field=QQ):
    """Resolve a model name: sphere:<n>, sphere-frob:<n>, trivial,
    exterior, three-dim."""
    if name == "trivial":
        return trivial_model(field)
    if name == "exterior":
        return exterior_model(field)
    if name == "three-dim":
        return three_dim_model(field)
    if name.startswith("sphere-frob:"):
        return sphere_frobenius_model(int(name.split(":", 1)[1]), field)
    if name.startswith("sphere:"):
        return sphere_model(int(name.split(":", 1)[1]), field)
    raise EngineError("unknown model %r" % name)


BUILTIN_MODEL_NAMES = ("sphere:<n>", "sphere-frob:<n>", "trivial", "exterior",
                       "three-dim")
