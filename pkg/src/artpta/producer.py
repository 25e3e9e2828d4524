"""Least fixed-point producer: flow-sensitive, context-insensitive points-to
analysis, an independent chaotic-iteration oracle, and artifact emission.

``analyze_inter`` runs a statement-level worklist (reverse post-order) inside
a method-level worklist (call-graph SCCs bottom-up).  ``chaotic_oracle``
computes the same least fixed point by plain round-robin sweeps and exists
only to cross-check the worklist engine.  Both use the same flow equations:
per-statement transfer functions, ``OUT[call] = project_out(meet of target
summaries, call, IN[call])``, ``in_summary[M] = meet of project_in over all
call-sites of M`` (empty for the entry method), and ``out_summary[M]`` the
return/heap restriction of M's Exit value.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Mapping

from .artwork import Artwork
from .errors import ArtError
from .ir import (
    ENTRY,
    EXIT,
    REF_INSTRS,
    Call,
    CallGraph,
    ControlFlowGraph,
    LabeledStatement,
    Method,
    Node,
    Program,
    build_call_graph,
    build_cfg,
)
from .ptg import (
    EMPTY,
    PointsToGraph,
    entry_graph,
    meet,
    meet_all,
    project_in,
    project_out,
    restrict_to_summary,
    subsumes,
    transfer,
)

PointKey = tuple[str, Node]


@dataclass
class AnalysisResult:
    """Per-statement OUT graphs plus per-method IN/OUT summaries.

    ``out`` is keyed by (method, label) with the synthetic points keyed by
    (method, "entry") and (method, "exit").  ``iteration_count`` is the total
    number of statement evaluations performed.
    """

    out: dict[PointKey, PointsToGraph]
    in_summary: dict[str, PointsToGraph]
    out_summary: dict[str, PointsToGraph]
    iteration_count: int = 0

    def same_values(self, other: "AnalysisResult") -> bool:
        """Value equality of the three maps (iteration counts may differ)."""
        return (
            self.out == other.out
            and self.in_summary == other.in_summary
            and self.out_summary == other.out_summary
        )


@dataclass
class _Counter:
    n: int = 0


class _ProgramContext:
    """Parsed-program derivatives shared by the engines."""

    def __init__(self, program: Program):
        self.program = program
        self.methods: dict[str, Method] = {m.name: m for m in program.methods}
        self.cfgs: dict[str, ControlFlowGraph] = {
            m.name: build_cfg(m) for m in program.methods
        }
        self.stmts: dict[str, dict[int, LabeledStatement]] = {
            m.name: {s.label: s for s in m.body} for m in program.methods
        }
        self.call_graph: CallGraph = build_call_graph(program)

    def in_value(
        self, out: Mapping[PointKey, PointsToGraph], name: str, node: Node
    ) -> PointsToGraph:
        preds = self.cfgs[name].pred.get(node, ())
        return meet_all(out.get((name, p), EMPTY) for p in preds)


def _method_pass(
    ctx: _ProgramContext,
    name: str,
    entry_out: PointsToGraph,
    eval_stmt: Callable[[LabeledStatement, PointsToGraph], PointsToGraph],
    out: dict[PointKey, PointsToGraph],
    counter: _Counter,
) -> None:
    """Run one method's statements to a local fixed point (worklist in
    reverse post-order), then refresh its Exit value."""
    cfg = ctx.cfgs[name]
    stmts = ctx.stmts[name]
    out[(name, ENTRY)] = entry_out
    order = [s.label for b in cfg.topo_order for s in b.statements]
    rank = {label: i for i, label in enumerate(order)}
    heap = list(range(len(order)))
    heapq.heapify(heap)
    queued = set(order)
    while heap:
        label = order[heapq.heappop(heap)]
        if label not in queued:
            continue
        queued.discard(label)
        in_g = ctx.in_value(out, name, label)
        counter.n += 1
        new = eval_stmt(stmts[label], in_g)
        if new != out.get((name, label)):
            out[(name, label)] = new
            for v in cfg.succ[label]:
                if v != EXIT and v not in queued:
                    queued.add(v)
                    heapq.heappush(heap, rank[v])
    out[(name, EXIT)] = ctx.in_value(out, name, EXIT)


def analyze_intra(m: Method) -> AnalysisResult:
    """Intra-procedural least fixed point for a call-free method.

    The Entry value maps each reference parameter to its placeholder object.
    """
    if any(isinstance(s.instr, Call) for s in m.body):
        raise ValueError(f"method '{m.name}' contains calls; use analyze_inter")
    ctx = _ProgramContext(Program(methods=(m,), entry=m.name))
    counter = _Counter()
    out: dict[PointKey, PointsToGraph] = {}
    seed = entry_graph(m)
    _method_pass(ctx, m.name, seed, lambda s, g: transfer(s, g, m), out, counter)
    return AnalysisResult(
        out=out,
        in_summary={m.name: seed},
        out_summary={m.name: restrict_to_summary(out[(m.name, EXIT)], m)},
        iteration_count=counter.n,
    )


Injection = dict[str, dict]


def analyze_inter(program: Program, _inject: Injection | None = None) -> AnalysisResult:
    """Whole-program least fixed point over the call graph.

    ``_inject`` seeds extra graph content at specific result locations
    ({"loop": {(m, label): g}, "in": {m: g}, "out": {m: g}}) and computes the
    least fixed point above those seeds; it exists for conservative artifact
    mutation and is not part of the analysis proper.
    """
    ctx = _ProgramContext(program)
    inj = _inject or {}
    inj_loop: dict[tuple[str, int], PointsToGraph] = dict(inj.get("loop", {}))
    inj_in: dict[str, PointsToGraph] = dict(inj.get("in", {}))
    inj_out: dict[str, PointsToGraph] = dict(inj.get("out", {}))

    in_summary = {n: inj_in.get(n, EMPTY) for n in ctx.methods}
    out_summary = {n: inj_out.get(n, EMPTY) for n in ctx.methods}
    out: dict[PointKey, PointsToGraph] = {}
    counter = _Counter()

    order = ctx.call_graph.bottom_up_order()
    rank = {n: i for i, n in enumerate(order)}
    heap: list[int] = list(range(len(order)))
    heapq.heapify(heap)
    queued = set(order)

    def push(name: str) -> None:
        if name not in queued:
            queued.add(name)
            heapq.heappush(heap, rank[name])

    while heap:
        name = order[heapq.heappop(heap)]
        if name not in queued:
            continue
        queued.discard(name)
        m = ctx.methods[name]

        def eval_stmt(s: LabeledStatement, in_g: PointsToGraph) -> PointsToGraph:
            if isinstance(s.instr, Call):
                summary = meet_all(out_summary[t] for t in s.instr.targets)
                g = project_out(summary, m, s, in_g)
            else:
                g = transfer(s, in_g, m)
            extra = inj_loop.get((name, s.label))
            return meet(g, extra) if extra is not None else g

        _method_pass(ctx, name, in_summary[name], eval_stmt, out, counter)

        new_sum = restrict_to_summary(out[(name, EXIT)], m)
        if not subsumes(out_summary[name], new_sum):
            out_summary[name] = meet(out_summary[name], new_sum)
            for caller in ctx.call_graph.callers_of(name):
                push(caller)

        for s in m.body:
            if not isinstance(s.instr, Call):
                continue
            in_g = ctx.in_value(out, name, s.label)
            for t in s.instr.targets:
                contrib = project_in(in_g, m, s, ctx.methods[t])
                if not subsumes(in_summary[t], contrib):
                    in_summary[t] = meet(in_summary[t], contrib)
                    push(t)

    return AnalysisResult(
        out=out,
        in_summary=in_summary,
        out_summary=out_summary,
        iteration_count=counter.n,
    )


def chaotic_oracle(program: Program) -> AnalysisResult:
    """Independent oracle: evaluate every flow equation of every method
    round-robin until a full sweep changes nothing.  No worklist, no
    ordering cleverness; must agree exactly with ``analyze_inter``."""
    ctx = _ProgramContext(program)
    out: dict[PointKey, PointsToGraph] = {}
    for m in program.methods:
        out[(m.name, ENTRY)] = EMPTY
        out[(m.name, EXIT)] = EMPTY
        for s in m.body:
            out[(m.name, s.label)] = EMPTY
    in_summary = {n: EMPTY for n in ctx.methods}
    out_summary = {n: EMPTY for n in ctx.methods}
    counter = _Counter()

    changed = True
    while changed:
        changed = False
        for m in program.methods:
            name = m.name
            if out[(name, ENTRY)] != in_summary[name]:
                out[(name, ENTRY)] = in_summary[name]
                changed = True
            for s in m.body:
                in_g = ctx.in_value(out, name, s.label)
                counter.n += 1
                if isinstance(s.instr, Call):
                    summary = meet_all(out_summary[t] for t in s.instr.targets)
                    new = project_out(summary, m, s, in_g)
                else:
                    new = transfer(s, in_g, m)
                if new != out[(name, s.label)]:
                    out[(name, s.label)] = new
                    changed = True
            exit_g = ctx.in_value(out, name, EXIT)
            if out[(name, EXIT)] != exit_g:
                out[(name, EXIT)] = exit_g
                changed = True
            new_sum = restrict_to_summary(exit_g, m)
            if out_summary[name] != new_sum:
                out_summary[name] = new_sum
                changed = True
        new_in = {n: EMPTY for n in ctx.methods}
        for m in program.methods:
            for s in m.body:
                if not isinstance(s.instr, Call):
                    continue
                in_g = ctx.in_value(out, m.name, s.label)
                for t in s.instr.targets:
                    contrib = project_in(in_g, m, s, ctx.methods[t])
                    new_in[t] = meet(new_in[t], contrib)
        for name in ctx.methods:
            if in_summary[name] != new_in[name]:
                in_summary[name] = new_in[name]
                changed = True

    return AnalysisResult(
        out=out,
        in_summary=in_summary,
        out_summary=out_summary,
        iteration_count=counter.n,
    )


def validate_result(
    program: Program, result: AnalysisResult, exact_in: bool = True
) -> list[str]:
    """Check every flow equation against ``result``; returns the violations
    as strings (empty list when the result is a fixed point).

    With ``exact_in=False`` the per-method IN summaries may strictly subsume
    the meet of their call-site projections (a conservative fixed point);
    everything else must hold exactly.
    """
    ctx = _ProgramContext(program)
    problems: list[str] = []
    joined_in = {n: EMPTY for n in ctx.methods}
    for m in program.methods:
        name = m.name
        if result.out.get((name, ENTRY)) != result.in_summary.get(name):
            problems.append(f"{name}: entry value differs from IN summary")
        for s in m.body:
            in_g = ctx.in_value(result.out, name, s.label)
            if isinstance(s.instr, Call):
                summary = meet_all(
                    result.out_summary.get(t, EMPTY) for t in s.instr.targets
                )
                expect = project_out(summary, m, s, in_g)
                for t in s.instr.targets:
                    joined_in[t] = meet(
                        joined_in[t], project_in(in_g, m, s, ctx.methods[t])
                    )
            else:
                expect = transfer(s, in_g, m)
            if result.out.get((name, s.label)) != expect:
                problems.append(f"{name}:{s.label}: OUT does not satisfy its equation")
        exit_g = ctx.in_value(result.out, name, EXIT)
        if result.out.get((name, EXIT)) != exit_g:
            problems.append(f"{name}: exit value differs from meet of predecessors")
        if result.out_summary.get(name) != restrict_to_summary(exit_g, m):
            problems.append(f"{name}: OUT summary differs from restricted exit value")
    for name in ctx.methods:
        have = result.in_summary.get(name, EMPTY)
        if exact_in:
            if have != joined_in[name]:
                problems.append(f"{name}: IN summary differs from call-site meet")
        elif not subsumes(have, joined_in[name]):
            problems.append(f"{name}: IN summary does not cover call-site meet")
    return problems


# ---------------------------------------------------------------------------
# Artifact emission
# ---------------------------------------------------------------------------


def emit_artwork(program: Program, result: AnalysisResult) -> Artwork:
    """Encode the compact artifact: fixed-point OUT of every natural-loop
    header, the IN summary of every method, and the OUT summary of every
    method on a call-graph cycle."""
    problems = validate_result(program, result, exact_in=False)
    if problems:
        raise ArtError("result does not satisfy the flow equations: " + problems[0])
    ctx = _ProgramContext(program)
    i_loop = {
        (m.name, h): result.out[(m.name, h)]
        for m in program.methods
        for h in sorted(ctx.cfgs[m.name].loop_headers)
    }
    i_in = {m.name: result.in_summary[m.name] for m in program.methods}
    i_out = {
        m.name: result.out_summary[m.name]
        for m in program.methods
        if ctx.call_graph.is_recursive_method(m.name)
    }
    return Artwork(i_loop=i_loop, i_in=i_in, i_out=i_out, dedup_pool=None)


def optimize_artwork(program: Program, a: Artwork) -> Artwork:
    """Shrink a producer-emitted artifact without changing what the consumer
    regenerates: drop loop entries for heap-free loop bodies, IN entries whose
    call-site projections are all identical (or absent), OUT entries equal to
    the IN entry, then share duplicated graphs through an indexed pool when
    that makes the encoding smaller."""
    from .artwork import encode  # local import to keep module layering simple

    ctx = _ProgramContext(program)
    result = analyze_inter(program)

    i_loop = dict(a.i_loop)
    for (name, header) in list(i_loop):
        cfg = ctx.cfgs[name]
        body = cfg.loop_body(header)
        if not any(isinstance(ctx.stmts[name][l].instr, REF_INSTRS) for l in body):
            del i_loop[(name, header)]

    i_in = dict(a.i_in)
    for name in list(i_in):
        sites = ctx.call_graph.call_sites_of(name)
        if not sites:
            if i_in[name].is_empty():
                del i_in[name]
            continue
        # The consumer re-derives a dropped IN entry from the first call-site
        # it encounters, so dropping is only sound when every call-site sees
        # the full fixed-point value there: no call-site may be a loop header
        # (checked against forward predecessors only), and at least one must
        # lie outside the method's own SCC (a purely self-feeding IN summary
        # cannot be bootstrapped without the stored value).
        scc = ctx.call_graph.scc_of(name)
        if any(label in ctx.cfgs[caller].loop_headers for caller, label in sites):
            continue
        if not any(caller not in scc for caller, _ in sites):
            continue
        projections = []
        for caller, label in sites:
            in_g = ctx.in_value(result.out, caller, label)
            projections.append(
                project_in(in_g, ctx.methods[caller], ctx.stmts[caller][label], ctx.methods[name])
            )
        if all(p == projections[0] for p in projections) and projections[0] == i_in[name]:
            del i_in[name]

    i_out = dict(a.i_out)
    for name in list(i_out):
        if i_out[name] == a.i_in.get(name):
            del i_out[name]

    plain = Artwork(i_loop=i_loop, i_in=i_in, i_out=i_out, dedup_pool=None)

    ordered: list[PointsToGraph] = [g for _, g in sorted(i_loop.items())]
    ordered += [g for _, g in sorted(i_in.items())]
    ordered += [g for _, g in sorted(i_out.items())]
    counts: list[tuple[PointsToGraph, int]] = []
    for g in ordered:
        for i, (seen, n) in enumerate(counts):
            if seen == g:
                counts[i] = (seen, n + 1)
                break
        else:
            counts.append((g, 1))
    pool = tuple(g for g, n in counts if n >= 2 and not g.is_empty())
    if not pool:
        return plain
    pooled = Artwork(i_loop=i_loop, i_in=i_in, i_out=i_out, dedup_pool=pool)
    return pooled if len(encode(pooled)) < len(encode(plain)) else plain
