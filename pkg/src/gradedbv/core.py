"""Exact sparse linear algebra over graded bases.

Everything downstream (expression evaluation, relation checking, the
double construction) reduces to the primitives in this module: exact
scalars, graded spaces with named basis elements, finitely supported
elements of tensor powers, and homogeneous linear maps combined with the
Koszul sign convention

    (f (x) g)(a (x) b) = (-1)^{|g||a|} f(a) (x) g(b).

That single rule is the only place signs are introduced; permutation
signs, composition of tensored maps and dualization are all derived
from it. No floating point is used anywhere.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


class EngineError(Exception):
    """Base class for all errors raised by the engine."""


class ArityMismatch(EngineError):
    pass


class DegreeError(EngineError):
    pass


class UnknownBasisName(EngineError):
    pass


# ---------------------------------------------------------------------------
# scalar fields
# ---------------------------------------------------------------------------

class Rationals:
    """Exact rational scalars (arbitrary precision)."""

    name = "Q"

    def coerce(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        raise EngineError("cannot coerce %r into Q" % (value,))

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise EngineError("division by zero in Q")
        return 1 / Fraction(a)

    def is_zero(self, a):
        return a == 0

    def fmt(self, a):
        return str(a)

    def __repr__(self):
        return "Q"


class PrimeField:
    """Integers mod an odd prime p; p = 2 erases all signs (diagnostic)."""

    def __init__(self, p):
        if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise EngineError("Fp modulus must be prime, got %d" % p)
        self.p = p
        self.name = "Fp:%d" % p

    def coerce(self, value):
        if isinstance(value, int):
            return value % self.p
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise EngineError(
                    "denominator of %s not invertible mod %d" % (value, self.p))
            return value.numerator * pow(den, -1, self.p) % self.p
        if isinstance(value, str):
            return self.coerce(Fraction(value))
        raise EngineError("cannot coerce %r into %s" % (value, self.name))

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise EngineError("division by zero in %s" % self.name)
        return pow(a, -1, self.p)

    def is_zero(self, a):
        return a == 0

    def fmt(self, a):
        return str(a)

    def __repr__(self):
        return self.name


QQ = Rationals()


def field_by_name(name):
    """Parse a field tag: "Q" or "Fp:<prime>"."""
    if name == "Q":
        return QQ
    if name.startswith("Fp:"):
        return PrimeField(int(name[3:]))
    raise EngineError("unknown field %r (expected Q or Fp:<prime>)" % name)


# ---------------------------------------------------------------------------
# graded spaces
# ---------------------------------------------------------------------------

class GradedSpace:
    """A set of named basis elements with integer degrees.

    Spaces compare by identity; every instance owns its spaces.  A space
    is either finite (explicit ordered basis) or rule-generated, in
    which case checks enumerate a finite window of the basis.
    """

    name = "?"

    def degree(self, basis_name):
        raise NotImplementedError

    def contains(self, basis_name):
        raise NotImplementedError

    def is_finite(self):
        return False

    def basis_names(self):
        """Ordered basis for finite spaces; EngineError otherwise."""
        raise EngineError("space %s has no finite basis enumeration" % self.name)

    def window_names(self, k):
        """Canonically ordered basis names enumerated for window index k."""
        raise NotImplementedError

    def __repr__(self):
        return "<space %s>" % self.name


class FiniteSpace(GradedSpace):
    def __init__(self, name, degrees):
        self.name = name
        self._degrees = dict(degrees)

    def degree(self, basis_name):
        try:
            return self._degrees[basis_name]
        except KeyError:
            raise UnknownBasisName(
                "%r is not a basis element of %s" % (basis_name, self.name)) from None

    def contains(self, basis_name):
        return basis_name in self._degrees

    def is_finite(self):
        return True

    def basis_names(self):
        return tuple(self._degrees)

    def window_names(self, k):
        return tuple(sorted(self._degrees))

    def dim(self):
        return len(self._degrees)


class ScalarSpace(GradedSpace):
    """The ground field as a graded space (the empty tensor factor)."""

    name = "k"

    def degree(self, basis_name):
        raise UnknownBasisName("the scalar space has no basis names")

    def contains(self, basis_name):
        return False

    def is_finite(self):
        return True

    def basis_names(self):
        return ()

    def window_names(self, k):
        return ()


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

def _spaces_key(spaces):
    return tuple(s.name for s in spaces)


class Element:
    """Finitely supported linear combination of tensor basis elements.

    Keys are tuples of basis names, one per tensor slot; ``spaces`` gives
    the ambient space of each slot.  Zero coefficients are pruned eagerly
    so that equality-to-zero is just emptiness of the support.
    """

    __slots__ = ("spaces", "field", "coeffs")

    def __init__(self, spaces, field, coeffs=None):
        self.spaces = tuple(spaces)
        self.field = field
        self.coeffs = {}
        if coeffs:
            for key, value in coeffs.items():
                if len(key) != len(self.spaces):
                    raise ArityMismatch(
                        "key %r does not match arity %d" % (key, len(self.spaces)))
                if not field.is_zero(value):
                    self.coeffs[key] = value

    @property
    def arity(self):
        return len(self.spaces)

    def is_zero(self):
        return not self.coeffs

    def key_degree(self, key):
        return sum(space.degree(name) for space, name in zip(self.spaces, key))

    def degrees(self):
        """Sorted degrees present in the support."""
        return sorted({self.key_degree(k) for k in self.coeffs})

    def degree(self):
        """The single degree of a homogeneous element (None when zero)."""
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise DegreeError("inhomogeneous element has degrees %s" % degs)
        return degs[0]

    def homogeneous_parts(self):
        parts = {}
        for key, value in self.coeffs.items():
            parts.setdefault(self.key_degree(key), {})[key] = value
        return {d: Element(self.spaces, self.field, c)
                for d, c in sorted(parts.items())}

    def items(self):
        """Support in canonical (lexicographic by basis name) order."""
        return sorted(self.coeffs.items())

    def scale(self, scalar):
        scalar = self.field.coerce(scalar)
        mul = self.field.mul
        return Element(self.spaces, self.field,
                       {k: mul(scalar, v) for k, v in self.coeffs.items()})

    def __add__(self, other):
        self._check_compatible(other)
        add, is_zero = self.field.add, self.field.is_zero
        coeffs = dict(self.coeffs)
        for key, value in other.coeffs.items():
            acc = add(coeffs.get(key, self.field.coerce(0)), value)
            if is_zero(acc):
                coeffs.pop(key, None)
            else:
                coeffs[key] = acc
        out = Element(self.spaces, self.field)
        out.coeffs = coeffs
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def tensor(self, other):
        if self.field is not other.field:
            raise EngineError("cannot tensor elements over different fields")
        mul = self.field.mul
        coeffs = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                coeffs[k1 + k2] = mul(v1, v2)
        return Element(self.spaces + other.spaces, self.field, coeffs)

    def _check_compatible(self, other):
        if _spaces_key(self.spaces) != _spaces_key(other.spaces):
            raise ArityMismatch(
                "elements live in different tensor products: %s vs %s"
                % (_spaces_key(self.spaces), _spaces_key(other.spaces)))

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return (_spaces_key(self.spaces) == _spaces_key(other.spaces)
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((_spaces_key(self.spaces), tuple(self.items())))

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return "Element(%s)" % format_element(self)


def format_element(elem):
    """Render an element canonically: ``2*A(x)1 - 2*1(x)A`` style."""
    if elem.is_zero():
        return "0"
    pieces = []
    for key, value in elem.items():
        body = "(x)".join(key) if key else "1"
        text = elem.field.fmt(value)
        negative = text.startswith("-")
        mag = text[1:] if negative else text
        term = body if mag == "1" else "%s*%s" % (mag, body)
        if not pieces:
            pieces.append("-" + term if negative else term)
        else:
            pieces.append(("- " if negative else "+ ") + term)
    return " ".join(pieces)


def basis_element(spaces, field, key, coeff=1):
    return Element(spaces, field, {tuple(key): field.coerce(coeff)})


def scalar_element(field, value=1):
    """An element of the empty tensor power (the ground field)."""
    return Element((), field, {(): field.coerce(value)})


def zero_element(spaces, field):
    return Element(spaces, field)


# ---------------------------------------------------------------------------
# Koszul signs and permutations
# ---------------------------------------------------------------------------

def koszul_sign(perm, degrees):
    """Sign of reordering homogeneous factors: perm[i] is the target
    position (0-indexed) of the factor currently in position i.

    The sign is the product of (-1)^{|a||b|} over every inverted pair,
    which is independent of any decomposition into adjacent swaps.
    """
    if len(perm) != len(degrees):
        raise ArityMismatch("permutation length %d != degrees length %d"
                            % (len(perm), len(degrees)))
    if sorted(perm) != list(range(len(perm))):
        raise EngineError("%r is not a permutation of 0..%d" % (perm, len(perm) - 1))
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j] and (degrees[i] % 2) and (degrees[j] % 2):
                sign = -sign
    return sign


def apply_permutation_key(perm, key):
    out = [None] * len(key)
    for i, name in enumerate(key):
        out[perm[i]] = name
    return tuple(out)


# ---------------------------------------------------------------------------
# graded maps
# ---------------------------------------------------------------------------

class GradedMap:
    """Homogeneous linear map between tensor powers of graded spaces.

    The action is a finite table or a rule producing a finitely
    supported Element for every source basis key.  Rule outputs are
    memoized; every application asserts degree additivity.
    """

    def __init__(self, source, target, degree, field, name="?",
                 table=None, rule=None):
        self.source = tuple(source)
        self.target = tuple(target)
        self.degree = degree
        self.field = field
        self.name = name
        self._table = table
        self._rule = rule
        self._cache = {}
        if table is None and rule is None:
            raise EngineError("map %s has neither table nor rule" % name)

    @property
    def source_arity(self):
        return len(self.source)

    @property
    def target_arity(self):
        return len(self.target)

    def source_degree(self, key):
        return sum(s.degree(n) for s, n in zip(self.source, key))

    def on_key(self, key):
        key = tuple(key)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        if len(key) != len(self.source):
            raise ArityMismatch("map %s expects arity %d, got key %r"
                                % (self.name, len(self.source), key))
        if self._table is not None:
            out = self._table.get(key)
            if out is None:
                out = zero_element(self.target, self.field)
        else:
            out = self._rule(key)
        if not out.is_zero():
            want = self.source_degree(key) + self.degree
            for okey in out.coeffs:
                got = out.key_degree(okey)
                if got != want:
                    raise DegreeError(
                        "map %s violates degree additivity on %r: output %r "
                        "has degree %d, expected %d"
                        % (self.name, key, okey, got, want))
        self._cache[key] = out
        return out

    def __call__(self, elem):
        if _spaces_key(elem.spaces) != _spaces_key(self.source):
            raise ArityMismatch(
                "map %s defined on %s applied to element of %s"
                % (self.name, _spaces_key(self.source), _spaces_key(elem.spaces)))
        out = zero_element(self.target, self.field)
        for key, value in elem.coeffs.items():
            out = out + self.on_key(key).scale(value)
        return out

    # -- algebra of maps ----------------------------------------------------

    def __mul__(self, other):
        """Composition self(other(x))."""
        return compose(self, other)

    def __matmul__(self, other):
        return tensor_maps(self, other)

    def __add__(self, other):
        if (_spaces_key(self.source) != _spaces_key(other.source)
                or _spaces_key(self.target) != _spaces_key(other.target)
                or self.degree != other.degree):
            raise ArityMismatch("cannot add maps %s and %s" % (self.name, other.name))
        return GradedMap(self.source, self.target, self.degree, self.field,
                         name="(%s + %s)" % (self.name, other.name),
                         rule=lambda key: self.on_key(key) + other.on_key(key))

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, scalar):
        return GradedMap(self.source, self.target, self.degree, self.field,
                         name="(%s*%s)" % (scalar, self.name),
                         rule=lambda key: self.on_key(key).scale(scalar))

    def as_table(self):
        """Materialize the action on a finite source basis."""
        table = {}
        for key in source_basis_keys(self.source):
            out = self.on_key(key)
            if not out.is_zero():
                table[key] = out
        return table

    def equal_on(self, other, keys):
        return all(self.on_key(k) == other.on_key(k) for k in keys)

    def __repr__(self):
        return "<map %s: %s -> %s deg %d>" % (
            self.name, _spaces_key(self.source), _spaces_key(self.target), self.degree)


def source_basis_keys(spaces):
    """All basis keys of a finite tensor product, in canonical order."""
    pools = []
    for space in spaces:
        if not space.is_finite():
            raise EngineError("space %s is not finite" % space.name)
        pools.append(sorted(space.basis_names()))
    return [()] if not pools else list(itertools.product(*pools))


def identity(space, field):
    return GradedMap((space,), (space,), 0, field, name="id",
                     rule=lambda key: basis_element((space,), field, key))


def zero_map(source, target, degree, field, name="0"):
    return GradedMap(source, target, degree, field, name=name,
                     rule=lambda key: zero_element(target, field))


def compose(f, g):
    """f after g; degree |f| + |g|."""
    if _spaces_key(g.target) != _spaces_key(f.source):
        raise ArityMismatch(
            "cannot compose %s : ->%s with %s : %s->"
            % (g.name, _spaces_key(g.target), f.name, _spaces_key(f.source)))
    return GradedMap(g.source, f.target, f.degree + g.degree, f.field,
                     name="(%s . %s)" % (f.name, g.name),
                     rule=lambda key: f(g.on_key(key)))


def tensor_maps(*factors):
    """Tensor product of maps with the global Koszul sign rule.

    (f1 (x) ... (x) fk)(x1 (x) ... (x) xk) picks up
    (-1)^{sum_j |f_j| * (|x_1| + ... + |x_{j-1}|)}.
    """
    if not factors:
        raise EngineError("empty tensor product of maps")
    if len(factors) == 1:
        return factors[0]
    field = factors[0].field
    source = tuple(s for f in factors for s in f.source)
    target = tuple(t for f in factors for t in f.target)
    degree = sum(f.degree for f in factors)
    arities = [f.source_arity for f in factors]

    def rule(key):
        blocks = []
        pos = 0
        for a in arities:
            blocks.append(key[pos:pos + a])
            pos += a
        sign = 1
        consumed = 0
        for f, block in zip(factors, blocks):
            if f.degree % 2 and consumed % 2:
                sign = -sign
            consumed += sum(s.degree(n) for s, n in zip(f.source, block))
        out = scalar_element(field, sign)
        for f, block in zip(factors, blocks):
            part = f.on_key(block)
            if part.is_zero():
                return zero_element(target, field)
            out = out.tensor(part)
        return out

    name = "(" + " (x) ".join(f.name for f in factors) + ")"
    return GradedMap(source, target, degree, field, name=name, rule=rule)


def permute(perm, spaces, field):
    """Signed permutation map; perm[i] is the 0-indexed target slot of
    factor i.  tau = permute((1, 0), ...), sigma = permute((1, 2, 0), ...).
    """
    perm = tuple(perm)
    if len(perm) != len(spaces):
        raise ArityMismatch("permutation %r does not match arity %d"
                            % (perm, len(spaces)))
    if sorted(perm) != list(range(len(perm))):
        raise EngineError("%r is not a permutation" % (perm,))
    target = [None] * len(spaces)
    for i, space in enumerate(spaces):
        target[perm[i]] = space

    def rule(key):
        degrees = [s.degree(n) for s, n in zip(spaces, key)]
        sign = koszul_sign(perm, degrees)
        return basis_element(tuple(target), field,
                             apply_permutation_key(perm, key), sign)

    return GradedMap(spaces, tuple(target), 0, field,
                     name="perm%s" % (perm,), rule=rule)


def map_from_entries(source, target, degree, field, entries, name):
    """Build a finite-table map from (input key, output element) pairs."""
    table = {}
    for key, out in entries:
        key = tuple(key)
        if key in table:
            table[key] = table[key] + out
        else:
            table[key] = out
    table = {k: v for k, v in table.items() if not v.is_zero()}
    return GradedMap(source, target, degree, field, name=name, table=table)
