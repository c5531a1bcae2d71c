"""Relation specifications, check windows and reports.

A relation is a signed list of expression terms whose sum must evaluate
to zero on every input tuple of a finite window.  Identities stated as
two simultaneous equalities (unit, counit, the Frobenius displays) carry
more than one signed group under a single id; every group must vanish.

Reports are deterministic: tuples are enumerated in canonical
(lexicographic by basis name) order and witnesses record the first
failures in that order, so two runs with any thread count produce
byte-identical output.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .core import basis_element, scalar_element
from .expr import evaluate, parse

MAX_WITNESSES = 10


@dataclass(frozen=True)
class RelationSpec:
    rid: str
    arity: int
    description: str
    groups: tuple            # tuple of groups; group = tuple of (Fraction, expr AST)
    requires: tuple = ()     # applicability predicate names, see is_applicable

    def term_count(self):
        return sum(len(g) for g in self.groups)

    def texts(self):
        from .expr import print_expr
        return tuple(tuple((str(c), print_expr(e)) for c, e in g) for g in self.groups)


def make_relation(rid, arity, description, groups, requires=()):
    parsed = tuple(
        tuple((Fraction(coeff), parse(text)) for coeff, text in group)
        for group in groups)
    return RelationSpec(rid, arity, description, parsed, tuple(requires))


def flip_sign(spec, group_index, term_index):
    """Mutate one term's sign; used by the sign-rigidity suite."""
    groups = []
    for gi, group in enumerate(spec.groups):
        terms = []
        for ti, (coeff, expr) in enumerate(group):
            if gi == group_index and ti == term_index:
                coeff = -coeff
            terms.append((coeff, expr))
        groups.append(tuple(terms))
    return RelationSpec(spec.rid + "[flip %d.%d]" % (group_index, term_index),
                        spec.arity, spec.description, tuple(groups), spec.requires)


def sign_mutations(spec):
    """All single-sign mutations of a relation spec."""
    out = []
    for gi, group in enumerate(spec.groups):
        for ti in range(len(group)):
            out.append(flip_sign(spec, gi, ti))
    return out


@dataclass(frozen=True)
class Window:
    """Bounds the enumerated input tuples; values are never truncated.

    ``k`` is the maximal basis index per slot for rule-generated spaces
    (finite spaces always enumerate everything); ``k3`` optionally
    overrides it for relations with three or more input slots.
    """

    k: int = 4
    k3: int | None = None

    def index_for(self, arity):
        if arity >= 3 and self.k3 is not None:
            return self.k3
        return self.k

    def names_for(self, space, arity):
        return tuple(sorted(space.window_names(self.index_for(arity))))

    def describe(self, space, arity):
        if space.is_finite():
            return "all tuples"
        return "indices <= %d" % self.index_for(arity)


@dataclass(frozen=True)
class CheckReport:
    relation: str
    instance: str
    window: str
    tuples_checked: int
    status: str              # pass | fail | skipped
    witnesses: tuple = ()    # (input key, group index, residual element)
    skip_reason: str = ""

    @property
    def passed(self):
        return self.status == "pass"

    def first_witness(self):
        return self.witnesses[0] if self.witnesses else None

    def render(self):
        line = "[%s] %-22s %s (%d tuples, %s)" % (
            self.status.upper(), self.relation, self.instance,
            self.tuples_checked, self.window)
        if self.status == "skipped":
            line += " reason: %s" % self.skip_reason
        for key, group, residual in self.witnesses:
            where = "(x)".join(key) if key else "1"
            line += "\n    witness %s [group %d]: residual %s" % (where, group, residual)
        return line


def residual_on_key(spec, ctx, spaces, key):
    """Evaluate each signed group on one basis tuple.

    Returns (group index, residual) for the first non-vanishing group,
    or None when the relation holds on this input.
    """
    x = basis_element(spaces, ctx.field, key) if spaces else scalar_element(ctx.field)
    for gi, group in enumerate(spec.groups):
        residual = None
        for coeff, expr in group:
            value = evaluate(expr, ctx, x)
            if coeff != 1:
                value = value.scale(coeff)
            residual = value if residual is None else residual + value
        if residual is not None and not residual.is_zero():
            return gi, residual
    return None


def relation_residual(spec, ctx, space, window, instance_name="?", threads=1,
                      applicable=True, skip_reason=""):
    """Check one relation over a window of basis tuples of ``space``."""
    if not applicable:
        return CheckReport(spec.rid, instance_name,
                           window.describe(space, spec.arity), 0,
                           "skipped", (), skip_reason)
    names = window.names_for(space, spec.arity)
    spaces = (space,) * spec.arity
    if spec.arity == 0:
        tuples = [()]
    elif not names:
        if space.is_finite() and not space.basis_names():
            # the zero space: nothing exists to check, the relation holds
            return CheckReport(spec.rid, instance_name, "zero space", 0,
                               "pass", ())
        return CheckReport(spec.rid, instance_name,
                           window.describe(space, spec.arity), 0,
                           "skipped", (), "window enumeration is empty")
    else:
        tuples = list(itertools.product(names, repeat=spec.arity))

    def run_chunk(chunk):
        found = []
        for key in chunk:
            hit = residual_on_key(spec, ctx, spaces, key)
            if hit is not None:
                found.append((key, hit[0], hit[1]))
                if len(found) >= MAX_WITNESSES:
                    break
        return found

    if threads <= 1 or len(tuples) < 32:
        witnesses = run_chunk(tuples)
    else:
        size = max(1, (len(tuples) + threads - 1) // threads)
        chunks = [tuples[i:i + size] for i in range(0, len(tuples), size)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_chunk, chunks))
        witnesses = [w for part in parts for w in part][:MAX_WITNESSES]

    status = "pass" if not witnesses else "fail"
    return CheckReport(spec.rid, instance_name,
                       window.describe(space, spec.arity),
                       len(tuples), status, tuple(witnesses))


def all_passed(reports):
    return all(r.status == "pass" for r in reports)


def render_reports(reports):
    return "\n".join(r.render() for r in reports)
