"""Points-to graphs: the analysis lattice, transfer functions, and the
project-in / project-out call macros.

A graph holds variable edges ``(VarId, ObjectId)`` and heap edges
``(ObjectId, field, ObjectId)``; the meet of the analysis is set union and
``subsumes`` is componentwise containment.  Variables get strong updates,
object fields get weak updates (an abstract object may summarize many
concrete ones).  All values are immutable and safe to share.

Canonical text rendering (also the artifact file's edge syntax)::

    main/0 -> main:4          # variable (method/slot) -> object
    main:4 .f-> null          # object .field-> object

Objects render as ``method:label`` (allocation site), ``null`` (the one
null object), or ``method?i`` (placeholder for reference parameter i, used
by the intra-procedural entry convention).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .errors import ArityMismatchError
from .ir import (
    Alloc,
    AssignNull,
    Call,
    Copy,
    FieldLoad,
    FieldStore,
    LabeledStatement,
    Method,
    Return,
)


@dataclass(frozen=True)
class VarId:
    method: str
    slot: int


@dataclass(frozen=True)
class Site:
    method: str
    label: int


@dataclass(frozen=True)
class NullObject:
    """The single abstract object all null references point to."""


@dataclass(frozen=True)
class Placeholder:
    """Stand-in object for reference parameter ``index`` of ``method`` in
    intra-procedural analysis, where no caller heap is available."""

    method: str
    index: int


ObjectId = Union[Site, NullObject, Placeholder]
NULL_OBJECT = NullObject()

VarEdge = tuple[VarId, ObjectId]
FieldEdge = tuple[ObjectId, str, ObjectId]


@dataclass(frozen=True)
class PointsToGraph:
    var_edges: frozenset[VarEdge]
    field_edges: frozenset[FieldEdge]

    def __post_init__(self) -> None:
        for src, _, _ in self.field_edges:
            if isinstance(src, NullObject):
                raise ValueError("field edge with null source")

    @staticmethod
    def of(
        var_edges: Iterable[VarEdge] = (), field_edges: Iterable[FieldEdge] = ()
    ) -> PointsToGraph:
        return PointsToGraph(frozenset(var_edges), frozenset(field_edges))

    def pts(self, v: VarId) -> frozenset[ObjectId]:
        return frozenset(o for (w, o) in self.var_edges if w == v)

    def field_targets(self, o: ObjectId, f: str) -> frozenset[ObjectId]:
        return frozenset(t for (s, g, t) in self.field_edges if s == o and g == f)

    def kill_var(self, v: VarId) -> frozenset[VarEdge]:
        return frozenset(e for e in self.var_edges if e[0] != v)

    def objects(self) -> frozenset[ObjectId]:
        objs: set[ObjectId] = {o for (_, o) in self.var_edges}
        for s, _, t in self.field_edges:
            objs.add(s)
            objs.add(t)
        return frozenset(objs)

    def is_empty(self) -> bool:
        return not self.var_edges and not self.field_edges


EMPTY = PointsToGraph(frozenset(), frozenset())


def meet(g1: PointsToGraph, g2: PointsToGraph) -> PointsToGraph:
    """The analysis meet: componentwise set union."""
    return PointsToGraph(g1.var_edges | g2.var_edges, g1.field_edges | g2.field_edges)


def meet_all(graphs: Iterable[PointsToGraph]) -> PointsToGraph:
    var_edges: set[VarEdge] = set()
    field_edges: set[FieldEdge] = set()
    for g in graphs:
        var_edges |= g.var_edges
        field_edges |= g.field_edges
    return PointsToGraph(frozenset(var_edges), frozenset(field_edges))


def subsumes(g1: PointsToGraph, g2: PointsToGraph) -> bool:
    """True iff g2 is a subgraph of g1."""
    return g2.var_edges <= g1.var_edges and g2.field_edges <= g1.field_edges


def var_id(m: Method, name: str) -> VarId:
    return VarId(m.name, m.slot_of[name])


def ret_var(m: Method) -> VarId:
    return VarId(m.name, m.ret_slot)


def entry_graph(m: Method) -> PointsToGraph:
    """Intra-procedural entry value: each reference parameter points to its
    own placeholder object; no heap edges."""
    return PointsToGraph.of(
        (VarId(m.name, i), Placeholder(m.name, i)) for i in range(len(m.params))
    )


def transfer(s: LabeledStatement, g: PointsToGraph, m: Method) -> PointsToGraph:
    """Flow function of a non-call statement.

    Alloc, Copy, AssignNull, and FieldLoad strongly update their target
    variable; FieldStore weakly updates the heap; Return feeds the method's
    return carrier; Branch/Goto/Nop/void-Return are the identity.
    Dereferencing null or an empty points-to set contributes nothing.
    """
    instr = s.instr
    if isinstance(instr, Alloc):
        x = var_id(m, instr.x)
        return PointsToGraph(g.kill_var(x) | {(x, Site(m.name, s.label))}, g.field_edges)
    if isinstance(instr, Copy):
        x, y = var_id(m, instr.x), var_id(m, instr.y)
        added = {(x, o) for o in g.pts(y)}
        return PointsToGraph(g.kill_var(x) | added, g.field_edges)
    if isinstance(instr, AssignNull):
        x = var_id(m, instr.x)
        return PointsToGraph(g.kill_var(x) | {(x, NULL_OBJECT)}, g.field_edges)
    if isinstance(instr, FieldStore):
        x, y = var_id(m, instr.x), var_id(m, instr.y)
        added = {
            (o, instr.f, t)
            for o in g.pts(x)
            if not isinstance(o, NullObject)
            for t in g.pts(y)
        }
        return PointsToGraph(g.var_edges, g.field_edges | added)
    if isinstance(instr, FieldLoad):
        x, y = var_id(m, instr.x), var_id(m, instr.y)
        added = {
            (x, t) for o in g.pts(y) for t in g.field_targets(o, instr.f)
        }
        return PointsToGraph(g.kill_var(x) | added, g.field_edges)
    if isinstance(instr, Return):
        if instr.x is None:
            return g
        r, y = ret_var(m), var_id(m, instr.x)
        added = {(r, o) for o in g.pts(y)}
        return PointsToGraph(g.kill_var(r) | added, g.field_edges)
    if isinstance(instr, Call):
        raise ValueError("call statements are handled by the analysis engines")
    return g  # Branch / Goto / Nop


def reachable_field_edges(
    g: PointsToGraph, roots: Iterable[ObjectId]
) -> frozenset[FieldEdge]:
    """Field edges of ``g`` transitively reachable from ``roots``."""
    closure: set[ObjectId] = set(roots)
    edges: set[FieldEdge] = set()
    changed = True
    while changed:
        changed = False
        for e in g.field_edges:
            src, _, dst = e
            if src in closure and e not in edges:
                edges.add(e)
                if dst not in closure:
                    closure.add(dst)
                changed = True
    return frozenset(edges)


def project_in(
    g_at_callsite: PointsToGraph, caller: Method, s: LabeledStatement, callee: Method
) -> PointsToGraph:
    """Map the caller's state into the callee: formal_i points to whatever
    actual_i points to, plus the heap reachable from the actuals."""
    call = s.instr
    assert isinstance(call, Call)
    if len(call.args) != len(callee.params):
        raise ArityMismatchError(
            f"call at {caller.name}:{s.label} passes {len(call.args)} argument(s) "
            f"to '{callee.name}' which takes {len(callee.params)}"
        )
    var_edges: set[VarEdge] = set()
    roots: set[ObjectId] = set()
    for i, arg in enumerate(call.args):
        formal = VarId(callee.name, i)
        for o in g_at_callsite.pts(var_id(caller, arg)):
            var_edges.add((formal, o))
            roots.add(o)
    return PointsToGraph(
        frozenset(var_edges), reachable_field_edges(g_at_callsite, roots)
    )


def project_out(
    summary: PointsToGraph,
    caller: Method,
    s: LabeledStatement,
    g_at_callsite: PointsToGraph,
) -> PointsToGraph:
    """Fold a callee OUT-summary back into the call-site state: union the
    summary's heap (weak), and strongly rebind the receiver variable from the
    summary's return edges when the call binds one."""
    call = s.instr
    assert isinstance(call, Call)
    field_edges = g_at_callsite.field_edges | summary.field_edges
    if call.bind is None:
        return PointsToGraph(g_at_callsite.var_edges, field_edges)
    x = var_id(caller, call.bind)
    # A well-formed summary's variable edges are exactly its return edges.
    added = {(x, o) for (_, o) in summary.var_edges}
    return PointsToGraph(g_at_callsite.kill_var(x) | added, field_edges)


def restrict_to_summary(exit_graph: PointsToGraph, m: Method) -> PointsToGraph:
    """OUT-summary of a method: drop every variable edge except the return
    carrier's, keep the whole heap."""
    r = ret_var(m)
    return PointsToGraph(
        frozenset(e for e in exit_graph.var_edges if e[0] == r),
        exit_graph.field_edges,
    )


# ---------------------------------------------------------------------------
# Canonical rendering (defines graph equality for golden files)
# ---------------------------------------------------------------------------


def render_object(o: ObjectId) -> str:
    if isinstance(o, Site):
        return f"{o.method}:{o.label}"
    if isinstance(o, Placeholder):
        return f"{o.method}?{o.index}"
    return "null"


def render_edges(g: PointsToGraph) -> list[str]:
    """One line per edge: sorted variable edges, then sorted field edges."""
    var_lines = sorted(
        f"{v.method}/{v.slot} -> {render_object(o)}" for (v, o) in g.var_edges
    )
    field_lines = sorted(
        f"{render_object(s)} .{f}-> {render_object(t)}" for (s, f, t) in g.field_edges
    )
    return var_lines + field_lines


def render_graph(g: PointsToGraph) -> str:
    return "\n".join(render_edges(g))


def parse_object(text: str) -> ObjectId:
    if text == "null":
        return NULL_OBJECT
    if "?" in text:
        method, _, idx = text.partition("?")
        if not method or not idx.isdigit():
            raise ValueError(f"bad object {text!r}")
        return Placeholder(method, int(idx))
    method, sep, label = text.partition(":")
    if not sep or not method or not label.isdigit():
        raise ValueError(f"bad object {text!r}")
    return Site(method, int(label))


def parse_edge_line(line: str) -> tuple[str, VarEdge | FieldEdge]:
    """Parse one rendered edge line; returns ('var', edge) or ('field', edge)."""
    parts = line.split()
    if len(parts) != 3:
        raise ValueError(f"bad edge line {line!r}")
    lhs, op, rhs = parts
    if op == "->":
        method, sep, slot = lhs.partition("/")
        if not sep or not method or not slot.isdigit():
            raise ValueError(f"bad variable {lhs!r}")
        return "var", (VarId(method, int(slot)), parse_object(rhs))
    if op.startswith(".") and op.endswith("->"):
        fname = op[1:-2]
        if not fname:
            raise ValueError(f"bad field edge {line!r}")
        src = parse_object(lhs)
        if isinstance(src, NullObject):
            raise ValueError("field edge with null source")
        return "field", (src, fname, parse_object(rhs))
    raise ValueError(f"bad edge line {line!r}")


def parse_edges(lines: Iterable[str]) -> PointsToGraph:
    var_edges: set[VarEdge] = set()
    field_edges: set[FieldEdge] = set()
    for line in lines:
        kind, edge = parse_edge_line(line)
        if kind == "var":
            var_edges.add(edge)  # type: ignore[arg-type]
        else:
            field_edges.add(edge)  # type: ignore[arg-type]
    return PointsToGraph(frozenset(var_edges), frozenset(field_edges))
