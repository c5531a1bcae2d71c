"""Expression language over the operation signature.

Concrete syntax: generators by name, ``.`` (or the unicode ring) for
composition, ``(x)`` (or the unicode tensor sign) for tensor, ``+``/``-``
for formal sums, an optional rational coefficient prefix like ``2*`` or
``1/2*``, parentheses for grouping, and ``dual(f)`` for dualization.
Composition binds tighter than tensor, which binds tighter than sums.
ASCII is canonical on output; print . parse is a fixed point.

Expressions are evaluated sign-exactly against a context of named
GradedMaps.  ``id`` / ``tau`` / ``sigma`` / ``sigma2`` are polymorphic:
they resolve against whatever tensor slots flow into them, so the same
relation text works on the base space and on derived spaces.

The same tokenizer parses element literals (``AU^1 (x) U^1``,
``2*A(x)1 - 2*1(x)A``); see parse_element.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .core import (ArityMismatch, DegreeError, EngineError,
                   basis_element, permute, scalar_element, zero_element,
                   _spaces_key)


class ParseError(EngineError):
    pass


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Compose:
    children: tuple  # applied right to left

    def __post_init__(self):
        assert len(self.children) >= 2


@dataclass(frozen=True)
class Tensor:
    children: tuple

    def __post_init__(self):
        assert len(self.children) >= 2


@dataclass(frozen=True)
class Scal:
    coeff: Fraction
    child: object


@dataclass(frozen=True)
class Sum:
    terms: tuple

    def __post_init__(self):
        assert len(self.terms) >= 2


@dataclass(frozen=True)
class Dual:
    child: object


POLYMORPHIC_ARITY = {"id": 1, "tau": 2, "sigma": 3, "sigma2": 3}
PERMS = {"tau": (1, 0), "sigma": (1, 2, 0), "sigma2": (2, 0, 1)}


# ---------------------------------------------------------------------------
# tokenizer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<tensor>\(\s*x\s*\)|⊗)
  | (?P<number>\d+(?:/\d+)?)(?![A-Za-z_^'\d])
  | (?P<name>[A-Za-z_0-9][A-Za-z_0-9^'\[\]]*)
  | (?P<compose>\.|∘)
  | (?P<plus>\+)
  | (?P<minus>-|−)
  | (?P<star>\*)
  | (?P<lpar>\()
  | (?P<rpar>\))
""", re.VERBOSE)


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("syntax error at position %d: %r" % (pos, text[pos:pos + 10]))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError("expected %s at position %d, got %r" % (kind, tok[2], tok[1]))
        return tok

    def fail(self, msg):
        tok = self.peek()
        raise ParseError("%s at position %d (near %r)" % (msg, tok[2], tok[1]))

    # sum := signed term (('+'|'-') term)*
    def parse_sum(self):
        terms = [self.parse_term()]
        while self.peek()[0] in ("plus", "minus"):
            op = self.next()[0]
            term = self.parse_term()
            terms.append(_scale(term, -1) if op == "minus" else term)
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    # term := ['-'] [number '*'?] tensor
    def parse_term(self):
        sign = Fraction(1)
        while self.peek()[0] == "minus":
            self.next()
            sign = -sign
        coeff = sign
        if self.peek()[0] == "number":
            # a number is a coefficient when something follows it;
            # otherwise it is a basis-name literal such as "1"
            save = self.i
            value = self.next()[1]
            follower = self.peek()[0]
            if follower == "star":
                self.next()
                coeff *= Fraction(value)
            elif follower in ("name", "number", "lpar"):
                coeff *= Fraction(value)
            else:
                self.i = save
        node = self.parse_tensor()
        return _scale(node, coeff)

    # tensor := comp (TENSOR comp)*
    def parse_tensor(self):
        parts = [self.parse_comp()]
        while self.peek()[0] == "tensor":
            self.next()
            parts.append(self.parse_comp())
        return parts[0] if len(parts) == 1 else Tensor(tuple(parts))

    # comp := atom (('.') atom)*
    def parse_comp(self):
        parts = [self.parse_atom()]
        while self.peek()[0] == "compose":
            self.next()
            parts.append(self.parse_atom())
        return parts[0] if len(parts) == 1 else Compose(tuple(parts))

    def parse_atom(self):
        kind, value, _ = self.peek()
        if kind == "lpar":
            self.next()
            node = self.parse_sum()
            self.expect("rpar")
            return node
        if kind == "name":
            self.next()
            if value == "dual" and self.peek()[0] == "lpar":
                self.next()
                node = self.parse_sum()
                self.expect("rpar")
                return Dual(node)
            return Gen(value)
        if kind == "number":
            # bare numbers occur in element literals ("1" is a basis name)
            self.next()
            return Gen(value)
        self.fail("expected a generator, '(' or a coefficient")


def parse(text):
    """Parse an operation expression into its AST."""
    parser = _Parser(text)
    node = parser.parse_sum()
    if parser.peek()[0] != "end":
        parser.fail("trailing input")
    return node


def _scale(node, coeff):
    coeff = Fraction(coeff)
    if coeff == 1:
        return node
    if isinstance(node, Scal):
        return _scale(node.child, coeff * node.coeff)
    return Scal(coeff, node)


# ---------------------------------------------------------------------------
# printing (ASCII canonical)
# ---------------------------------------------------------------------------

def _print(node, level):
    # level: 0 sum, 1 tensor, 2 compose, 3 atom
    if isinstance(node, Gen):
        return node.name
    if isinstance(node, Dual):
        return "dual(%s)" % _print(node.child, 0)
    if isinstance(node, Compose):
        text = " . ".join(_print(c, 3) for c in node.children)
        return "(%s)" % text if level > 2 else text
    if isinstance(node, Tensor):
        text = " (x) ".join(_print(c, 2) for c in node.children)
        return "(%s)" % text if level > 1 else text
    if isinstance(node, Scal):
        if node.coeff == -1:
            inner = "-%s" % _print(node.child, 1)
        else:
            inner = "%s*%s" % (node.coeff, _print(node.child, 1))
        return "(%s)" % inner if level > 0 else inner
    if isinstance(node, Sum):
        parts = [_print(node.terms[0], 1)]
        for term in node.terms[1:]:
            if isinstance(term, Scal) and term.coeff < 0:
                parts.append("- " + _print(_scale(term, -1), 1))
            else:
                parts.append("+ " + _print(term, 1))
        text = " ".join(parts)
        return "(%s)" % text if level > 0 else text
    raise EngineError("unknown node %r" % (node,))


def print_expr(node):
    return _print(node, 0)


# ---------------------------------------------------------------------------
# resolution and evaluation against a context of maps
# ---------------------------------------------------------------------------

class OpContext:
    """Named GradedMaps an expression can reference, over one field."""

    def __init__(self, maps, field):
        self.maps = dict(maps)
        self.field = field
        self._perm_cache = {}

    def lookup(self, name):
        try:
            return self.maps[name]
        except KeyError:
            raise EngineError("unknown generator %r" % name) from None

    def perm(self, name, spaces):
        key = (name, _spaces_key(spaces))
        got = self._perm_cache.get(key)
        if got is None:
            got = permute(PERMS[name], spaces, self.field)
            self._perm_cache[key] = got
        return got


def source_arity(node, ctx):
    """Number of input tensor slots the expression consumes."""
    if isinstance(node, Gen):
        if node.name in POLYMORPHIC_ARITY:
            return POLYMORPHIC_ARITY[node.name]
        return ctx.lookup(node.name).source_arity
    if isinstance(node, Dual):
        return target_arity(node.child, ctx)
    if isinstance(node, Compose):
        return source_arity(node.children[-1], ctx)
    if isinstance(node, Tensor):
        return sum(source_arity(c, ctx) for c in node.children)
    if isinstance(node, (Scal,)):
        return source_arity(node.child, ctx)
    if isinstance(node, Sum):
        arities = {source_arity(t, ctx) for t in node.terms}
        if len(arities) != 1:
            raise ArityMismatch("summands have different source arities %s" % arities)
        return arities.pop()
    raise EngineError("unknown node %r" % (node,))


def target_arity(node, ctx):
    if isinstance(node, Gen):
        if node.name in POLYMORPHIC_ARITY:
            return POLYMORPHIC_ARITY[node.name]
        return ctx.lookup(node.name).target_arity
    if isinstance(node, Dual):
        return source_arity(node.child, ctx)
    if isinstance(node, Compose):
        return target_arity(node.children[0], ctx)
    if isinstance(node, Tensor):
        return sum(target_arity(c, ctx) for c in node.children)
    if isinstance(node, Scal):
        return target_arity(node.child, ctx)
    if isinstance(node, Sum):
        return target_arity(node.terms[0], ctx)
    raise EngineError("unknown node %r" % (node,))


def infer_degree(node, ctx):
    """Degree of the expression; sums must have agreeing summands."""
    if isinstance(node, Gen):
        if node.name in POLYMORPHIC_ARITY:
            return 0
        return ctx.lookup(node.name).degree
    if isinstance(node, Dual):
        return infer_degree(node.child, ctx)
    if isinstance(node, (Compose, Tensor)):
        return sum(infer_degree(c, ctx) for c in node.children)
    if isinstance(node, Scal):
        return infer_degree(node.child, ctx)
    if isinstance(node, Sum):
        degrees = {infer_degree(t, ctx) for t in node.terms}
        if len(degrees) != 1:
            raise DegreeError("summands have different degrees %s" % sorted(degrees))
        return degrees.pop()
    raise EngineError("unknown node %r" % (node,))


def resolve_spaces(node, ctx, in_spaces):
    """Output slot spaces of the expression on the given input slots."""
    in_spaces = tuple(in_spaces)
    if isinstance(node, Gen):
        if node.name == "id":
            if len(in_spaces) != 1:
                raise ArityMismatch("id consumes one slot, got %d" % len(in_spaces))
            return in_spaces
        if node.name in PERMS:
            return ctx.perm(node.name, in_spaces).target
        gmap = ctx.lookup(node.name)
        if _spaces_key(gmap.source) != _spaces_key(in_spaces):
            raise ArityMismatch(
                "generator %s defined on %s fed with %s"
                % (node.name, _spaces_key(gmap.source), _spaces_key(in_spaces)))
        return gmap.target
    if isinstance(node, Dual):
        return _dual_of(node, ctx).target
    if isinstance(node, Compose):
        spaces = in_spaces
        for child in reversed(node.children):
            spaces = resolve_spaces(child, ctx, spaces)
        return spaces
    if isinstance(node, Tensor):
        out = []
        pos = 0
        for child in node.children:
            a = source_arity(child, ctx)
            out.extend(resolve_spaces(child, ctx, in_spaces[pos:pos + a]))
            pos += a
        if pos != len(in_spaces):
            raise ArityMismatch("tensor consumed %d of %d slots" % (pos, len(in_spaces)))
        return tuple(out)
    if isinstance(node, Scal):
        return resolve_spaces(node.child, ctx, in_spaces)
    if isinstance(node, Sum):
        outs = {_spaces_key(resolve_spaces(t, ctx, in_spaces)) for t in node.terms}
        if len(outs) != 1:
            raise ArityMismatch("summands have different targets %s" % outs)
        return resolve_spaces(node.terms[0], ctx, in_spaces)
    raise EngineError("unknown node %r" % (node,))


def _dual_of(node, ctx):
    from .double import dual_map  # deferred: double builds on core only
    return dual_map(as_map(node.child, ctx, None), name="dual")


def evaluate(node, ctx, elem):
    """Apply the expression to an element, exactly and linearly."""
    if isinstance(node, Gen):
        if node.name == "id":
            return elem
        if node.name in PERMS:
            return ctx.perm(node.name, elem.spaces)(elem)
        return ctx.lookup(node.name)(elem)
    if isinstance(node, Dual):
        return _dual_of(node, ctx)(elem)
    if isinstance(node, Compose):
        out = elem
        for child in reversed(node.children):
            out = evaluate(child, ctx, out)
        return out
    if isinstance(node, Tensor):
        return _evaluate_tensor(node, ctx, elem)
    if isinstance(node, Scal):
        return evaluate(node.child, ctx, elem).scale(node.coeff)
    if isinstance(node, Sum):
        out = None
        for term in node.terms:
            value = evaluate(term, ctx, elem)
            out = value if out is None else out + value
        return out
    raise EngineError("unknown node %r" % (node,))


def _evaluate_tensor(node, ctx, elem):
    arities = [source_arity(c, ctx) for c in node.children]
    if sum(arities) != elem.arity:
        raise ArityMismatch("tensor of arities %s applied to arity %d"
                            % (arities, elem.arity))
    degrees = [infer_degree(c, ctx) for c in node.children]
    field = ctx.field
    out = None
    for key, value in elem.coeffs.items():
        pos = 0
        term = scalar_element(field, value)
        consumed = 0
        dead = False
        for child, a, deg in zip(node.children, arities, degrees):
            block_key = key[pos:pos + a]
            block_spaces = elem.spaces[pos:pos + a]
            if deg % 2 and consumed % 2:
                term = term.scale(-1)
            consumed += sum(s.degree(n) for s, n in zip(block_spaces, block_key))
            part = evaluate(child, ctx,
                            basis_element(block_spaces, field, block_key))
            if part.is_zero():
                dead = True
                break
            term = term.tensor(part)
            pos += a
        if dead:
            continue
        out = term if out is None else out + term
    if out is None:
        out_spaces = resolve_spaces(node, ctx, elem.spaces)
        return zero_element(out_spaces, field)
    return out


def as_map(node, ctx, in_spaces, name=None):
    """Materialize an expression as a GradedMap.

    ``in_spaces`` may be None when the expression determines its own
    source (leftmost composition/tensor of concrete generators).
    """
    from .core import GradedMap
    if in_spaces is None:
        in_spaces = _infer_source_spaces(node, ctx)
    in_spaces = tuple(in_spaces)
    out_spaces = resolve_spaces(node, ctx, in_spaces)
    degree = infer_degree(node, ctx)
    field = ctx.field

    def rule(key):
        return evaluate(node, ctx, basis_element(in_spaces, field, key))

    return GradedMap(in_spaces, out_spaces, degree, field,
                     name=name or print_expr(node), rule=rule)


def _infer_source_spaces(node, ctx):
    if isinstance(node, Gen):
        if node.name in POLYMORPHIC_ARITY:
            raise EngineError(
                "cannot infer source spaces of polymorphic %r" % node.name)
        return ctx.lookup(node.name).source
    if isinstance(node, Dual):
        dualized = _dual_of(node, ctx)
        return dualized.source
    if isinstance(node, Compose):
        return _infer_source_spaces(node.children[-1], ctx)
    if isinstance(node, Tensor):
        return tuple(s for c in node.children for s in _infer_source_spaces(c, ctx))
    if isinstance(node, Scal):
        return _infer_source_spaces(node.child, ctx)
    if isinstance(node, Sum):
        return _infer_source_spaces(node.terms[0], ctx)
    raise EngineError("unknown node %r" % (node,))


# ---------------------------------------------------------------------------
# element literals
# ---------------------------------------------------------------------------

def parse_element(text, spaces, field, normalize=None):
    """Parse an element literal like ``2*A(x)1 - 2*1(x)A``.

    ``spaces`` is the tuple of slot spaces; arity 0 parses a bare scalar.
    ``normalize`` optionally canonicalizes basis names (the sphere model
    accepts U^0, U^1, AU^0, AU^1 for 1, U, A, AU).
    """
    node = parse(text)
    spaces = tuple(spaces)

    def resolve(n, coeff):
        if isinstance(n, Scal):
            return resolve(n.child, coeff * n.coeff)
        if isinstance(n, Sum):
            out = zero_element(spaces, field)
            for t in n.terms:
                out = out + resolve(t, coeff)
            return out
        key = _flatten_key(n)
        if len(spaces) == 0:
            if key != ("1",):
                raise ParseError("expected a scalar literal, got %r" % (text,))
            return scalar_element(field, field.coerce(coeff))
        if len(key) != len(spaces):
            raise ArityMismatch(
                "element literal %r has %d slots, expected %d"
                % (text, len(key), len(spaces)))
        names = []
        for space, raw in zip(spaces, key):
            name = normalize(raw) if normalize else raw
            if name is None or not space.contains(name):
                raise UnknownName(raw, space)
            names.append(name)
        return basis_element(spaces, field, names, field.coerce(coeff))

    return resolve(node, Fraction(1))


class UnknownName(ParseError):
    def __init__(self, raw, space):
        super().__init__("%r is not a basis element of %s" % (raw, space.name))


def literal_slots(text):
    """Tensor slot count of an element literal (1 for a bare scalar)."""
    def slots(n):
        if isinstance(n, Scal):
            return slots(n.child)
        if isinstance(n, Sum):
            counts = {slots(t) for t in n.terms}
            if len(counts) != 1:
                raise ParseError("terms of %r have different slot counts" % text)
            return counts.pop()
        if isinstance(n, Tensor):
            return sum(slots(c) for c in n.children)
        if isinstance(n, Gen):
            return 1
        raise ParseError("element literals are tensors of basis names")
    return slots(parse(text))


def _flatten_key(n):
    if isinstance(n, Gen):
        return (n.name,)
    if isinstance(n, Tensor):
        out = []
        for c in n.children:
            out.extend(_flatten_key(c))
        return tuple(out)
    raise ParseError("element literals are tensors of basis names, got %r" % (n,))
