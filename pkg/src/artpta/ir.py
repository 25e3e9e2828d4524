"""Mini imperative IR: parsing, printing, control-flow graphs, call graphs.

Grammar (one statement per line, ``#`` starts a comment, whitespace between
tokens is insignificant)::

    program  := method+
    method   := "method" NAME "(" [NAME ("," NAME)*] ")" "{" stmt* "}"
    stmt     := INT ":" instr
    instr    := NAME "=" "new" NAME                               # Alloc
              | NAME "=" NAME                                     # Copy
              | NAME "=" "null"                                   # AssignNull
              | NAME "." NAME "=" NAME                            # FieldStore
              | NAME "=" NAME "." NAME                            # FieldLoad
              | [NAME "="] "call" "[" NAME ("," NAME)* "]"
                           "(" [NAME ("," NAME)*] ")"             # Call
              | "return" [NAME]                                   # Return
              | "if" "goto" INT                                   # Branch
              | "goto" INT                                        # Goto
              | "nop"

Branch conditions are nondeterministic: ``if goto L`` has both the fall
through statement and ``L`` as successors.  Call statements carry an explicit
resolved target list, standing in for devirtualization.  The entry method is
the method named ``main``; it must take no parameters.

Control-flow graphs are built over maximal basic blocks with synthetic Entry
and Exit nodes.  Back-edges are dominator based (edge ``u -> v`` with ``v``
dominating ``u``); graphs whose cycles are not all captured by such
back-edges are rejected as irreducible.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import (
    DuplicateNameError,
    IrreducibleCfgError,
    ParseError,
    ResolutionError,
)

ENTRY = "entry"
EXIT = "exit"

Node = Union[int, str]  # statement label, or ENTRY/EXIT sentinel

KEYWORDS = frozenset({"method", "new", "null", "call", "return", "if", "goto", "nop"})


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Alloc:
    x: str
    type_tag: str


@dataclass(frozen=True)
class Copy:
    x: str
    y: str


@dataclass(frozen=True)
class AssignNull:
    x: str


@dataclass(frozen=True)
class FieldStore:
    x: str
    f: str
    y: str


@dataclass(frozen=True)
class FieldLoad:
    x: str
    y: str
    f: str


@dataclass(frozen=True)
class Call:
    bind: str | None
    targets: tuple[str, ...]
    args: tuple[str, ...]


@dataclass(frozen=True)
class Return:
    x: str | None


@dataclass(frozen=True)
class Branch:
    target: int


@dataclass(frozen=True)
class Goto:
    target: int


@dataclass(frozen=True)
class Nop:
    pass


Instr = Union[Alloc, Copy, AssignNull, FieldStore, FieldLoad, Call, Return, Branch, Goto, Nop]

#: Instruction kinds that can change a points-to graph.  Loops whose body has
#: none of these carry no heap information and need no stored invariant.
REF_INSTRS = (Alloc, Copy, AssignNull, FieldStore, FieldLoad, Call)


@dataclass(frozen=True)
class LabeledStatement:
    label: int
    instr: Instr


def _uses(instr: Instr) -> tuple[str, ...]:
    if isinstance(instr, Copy):
        return (instr.y,)
    if isinstance(instr, FieldStore):
        return (instr.x, instr.y)
    if isinstance(instr, FieldLoad):
        return (instr.y,)
    if isinstance(instr, Call):
        return instr.args
    if isinstance(instr, Return) and instr.x is not None:
        return (instr.x,)
    return ()


def _defs(instr: Instr) -> str | None:
    if isinstance(instr, (Alloc, Copy, AssignNull, FieldLoad)):
        return instr.x
    if isinstance(instr, Call):
        return instr.bind
    return None


# ---------------------------------------------------------------------------
# Program structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Method:
    name: str
    params: tuple[str, ...]
    body: tuple[LabeledStatement, ...]
    #: variable name -> dense 0-based stack slot; params first, then locals
    #: in order of first assignment.  Derived deterministically from the body.
    slot_of: dict[str, int] = field(default_factory=dict, compare=False)

    def labels(self) -> tuple[int, ...]:
        return tuple(s.label for s in self.body)

    @property
    def var_count(self) -> int:
        return len(self.slot_of)

    @property
    def ret_slot(self) -> int:
        """Slot of the per-method return-value carrier (one past the locals)."""
        return len(self.slot_of)


@dataclass(frozen=True)
class Program:
    methods: tuple[Method, ...]
    entry: str

    def method(self, name: str) -> Method:
        for m in self.methods:
            if m.name == name:
                return m
        raise KeyError(name)

    @property
    def method_names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.methods)


def _build_slots(m_name: str, params: tuple[str, ...], body: tuple[LabeledStatement, ...]) -> dict[str, int]:
    slots: dict[str, int] = {}
    for p in params:
        if p in slots:
            raise DuplicateNameError(f"duplicate parameter '{p}' in method '{m_name}'")
        slots[p] = len(slots)
    for s in body:
        d = _defs(s.instr)
        if d is not None and d not in slots:
            slots[d] = len(slots)
    return slots


def _validate_method(m: Method) -> None:
    seen: set[int] = set()
    labels = set(m.labels())
    defined = set(m.params)
    for s in m.body:
        if s.label <= 0:
            raise ParseError(f"label {s.label} in method '{m.name}' must be positive")
        if s.label in seen:
            raise DuplicateNameError(f"duplicate label {s.label} in method '{m.name}'")
        seen.add(s.label)
        for u in _uses(s.instr):
            if u not in defined:
                raise ResolutionError(
                    f"variable '{u}' used at {m.name}:{s.label} before any assignment"
                )
        d = _defs(s.instr)
        if d is not None:
            defined.add(d)
        if isinstance(s.instr, (Branch, Goto)) and s.instr.target not in labels:
            raise ResolutionError(
                f"unknown branch label {s.instr.target} at {m.name}:{s.label}"
            )


def validate_program(p: Program) -> None:
    """Establish the Program invariants, raising on the first violation."""
    names = [m.name for m in p.methods]
    for n in names:
        if names.count(n) > 1:
            raise DuplicateNameError(f"duplicate method name '{n}'")
    by_name = {m.name: m for m in p.methods}
    if p.entry not in by_name:
        raise ResolutionError(f"program has no entry method '{p.entry}'")
    if by_name[p.entry].params:
        raise ResolutionError(f"entry method '{p.entry}' must take no parameters")
    for m in p.methods:
        _validate_method(m)
        for s in m.body:
            if isinstance(s.instr, Call):
                for t in s.instr.targets:
                    if t not in by_name:
                        raise ResolutionError(
                            f"unknown call target '{t}' at {m.name}:{s.label}"
                        )


# ---------------------------------------------------------------------------
# Lexer / parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[0-9]+|[(){}\[\],:.=]")


@dataclass(frozen=True)
class _Token:
    kind: str  # "name" | "int" | "punct"
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        pos = 0
        while pos < len(line):
            if line[pos].isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(line, pos)
            if m is None:
                raise ParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
            tok = m.group(0)
            if tok[0].isdigit():
                kind = "int"
            elif tok[0].isalpha() or tok[0] == "_":
                kind = "name"
            else:
                kind = "punct"
            tokens.append(_Token(kind, tok, lineno, pos + 1))
            pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def _err(self, message: str) -> ParseError:
        if self.i < len(self.tokens):
            t = self.tokens[self.i]
            return ParseError(f"{message}, found {t.text!r}", t.line, t.col)
        last = self.tokens[-1] if self.tokens else None
        return ParseError(
            f"{message}, found end of input",
            last.line if last else 0,
            last.col if last else 0,
        )

    def peek(self, offset: int = 0) -> _Token | None:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def at(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.text == text

    def expect(self, text: str) -> _Token:
        if not self.at(text):
            raise self._err(f"expected {text!r}")
        t = self.tokens[self.i]
        self.i += 1
        return t

    def ident(self) -> str:
        t = self.peek()
        if t is None or t.kind != "name" or t.text in KEYWORDS:
            raise self._err("expected identifier")
        self.i += 1
        return t.text

    def integer(self) -> int:
        t = self.peek()
        if t is None or t.kind != "int":
            raise self._err("expected integer")
        self.i += 1
        return int(t.text)

    def parse_program(self) -> Program:
        methods = []
        while self.peek() is not None:
            methods.append(self.parse_method())
        if not methods:
            raise ParseError("expected at least one method")
        return Program(methods=tuple(methods), entry="main")

    def parse_method(self) -> Method:
        self.expect("method")
        name = self.ident()
        self.expect("(")
        params: list[str] = []
        if not self.at(")"):
            params.append(self.ident())
            while self.at(","):
                self.expect(",")
                params.append(self.ident())
        self.expect(")")
        self.expect("{")
        body: list[LabeledStatement] = []
        while not self.at("}"):
            body.append(self.parse_statement())
        self.expect("}")
        slots = _build_slots(name, tuple(params), tuple(body))
        return Method(name=name, params=tuple(params), body=tuple(body), slot_of=slots)

    def parse_statement(self) -> LabeledStatement:
        first = self.peek()
        if first is None or first.kind != "int":
            raise self._err("expected statement label")
        label = self.integer()
        self.expect(":")
        instr = self.parse_instr()
        nxt = self.peek()
        if nxt is not None and nxt.text != "}" and nxt.line == first.line:
            raise ParseError("expected end of line after statement", nxt.line, nxt.col)
        return LabeledStatement(label=label, instr=instr)

    def parse_instr(self) -> Instr:
        if self.at("nop"):
            self.expect("nop")
            return Nop()
        if self.at("goto"):
            self.expect("goto")
            return Goto(self.integer())
        if self.at("if"):
            self.expect("if")
            self.expect("goto")
            return Branch(self.integer())
        if self.at("return"):
            self.expect("return")
            t = self.peek()
            if t is not None and t.kind == "name" and t.text not in KEYWORDS:
                return Return(self.ident())
            return Return(None)
        if self.at("call"):
            return self.parse_call(bind=None)
        x = self.ident()
        if self.at("."):
            self.expect(".")
            f = self.ident()
            self.expect("=")
            return FieldStore(x, f, self.ident())
        self.expect("=")
        if self.at("new"):
            self.expect("new")
            return Alloc(x, self.ident())
        if self.at("null"):
            self.expect("null")
            return AssignNull(x)
        if self.at("call"):
            return self.parse_call(bind=x)
        y = self.ident()
        if self.at("."):
            self.expect(".")
            return FieldLoad(x, y, self.ident())
        return Copy(x, y)

    def parse_call(self, bind: str | None) -> Call:
        self.expect("call")
        self.expect("[")
        targets = [self.ident()]
        while self.at(","):
            self.expect(",")
            targets.append(self.ident())
        self.expect("]")
        self.expect("(")
        args: list[str] = []
        if not self.at(")"):
            args.append(self.ident())
            while self.at(","):
                self.expect(",")
                args.append(self.ident())
        self.expect(")")
        return Call(bind=bind, targets=tuple(targets), args=tuple(args))


def parse_program(text: str) -> Program:
    """Parse IR text into a Program with all invariants established.

    Deterministic: identical text yields a structurally identical Program.
    Raises ParseError, ResolutionError, or DuplicateNameError.
    """
    program = _Parser(_lex(text)).parse_program()
    validate_program(program)
    return program


def _instr_text(instr: Instr) -> str:
    if isinstance(instr, Alloc):
        return f"{instr.x} = new {instr.type_tag}"
    if isinstance(instr, Copy):
        return f"{instr.x} = {instr.y}"
    if isinstance(instr, AssignNull):
        return f"{instr.x} = null"
    if isinstance(instr, FieldStore):
        return f"{instr.x}.{instr.f} = {instr.y}"
    if isinstance(instr, FieldLoad):
        return f"{instr.x} = {instr.y}.{instr.f}"
    if isinstance(instr, Call):
        head = f"{instr.bind} = call" if instr.bind is not None else "call"
        return f"{head} [{', '.join(instr.targets)}]({', '.join(instr.args)})"
    if isinstance(instr, Return):
        return "return" if instr.x is None else f"return {instr.x}"
    if isinstance(instr, Branch):
        return f"if goto {instr.target}"
    if isinstance(instr, Goto):
        return f"goto {instr.target}"
    return "nop"


def print_program(p: Program) -> str:
    """Canonical printer; ``parse_program(print_program(p)) == p``.

    Method order is preserved from the input program.
    """
    lines: list[str] = []
    for m in p.methods:
        lines.append(f"method {m.name}({', '.join(m.params)}) {{")
        for s in m.body:
            lines.append(f"  {s.label}: {_instr_text(s.instr)}")
        lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Control-flow graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BasicBlock:
    statements: tuple[LabeledStatement, ...]

    @property
    def leader(self) -> int:
        return self.statements[0].label


@dataclass(frozen=True)
class ControlFlowGraph:
    method: Method
    blocks: tuple[BasicBlock, ...]
    #: statement-level successor relation, Entry/Exit included
    succ: dict[Node, tuple[Node, ...]]
    pred: dict[Node, tuple[Node, ...]]
    #: (source statement label, header statement label) dominator back-edges
    back_edges: frozenset[tuple[int, int]]
    #: blocks in a topological order of the block graph minus back-edges
    topo_order: tuple[BasicBlock, ...]
    #: labels of natural-loop headers (back-edge targets)
    loop_headers: frozenset[int]

    def statement(self, label: int) -> LabeledStatement:
        for s in self.method.body:
            if s.label == label:
                return s
        raise KeyError(label)

    def loop_body(self, header: int) -> frozenset[int]:
        """Labels of all statements in the natural loop of ``header``
        (union over its back-edges), header included."""
        members: set[int] = {header}
        stack = [u for (u, h) in self.back_edges if h == header]
        while stack:
            n = stack.pop()
            if n in members:
                continue
            members.add(n)
            for p in self.pred.get(n, ()):
                if isinstance(p, int) and p not in members:
                    stack.append(p)
        return frozenset(members)


def _stmt_successors(m: Method) -> dict[Node, tuple[Node, ...]]:
    labels = [s.label for s in m.body]
    nxt = {labels[i]: labels[i + 1] for i in range(len(labels) - 1)}
    succ: dict[Node, tuple[Node, ...]] = {}
    if not labels:
        succ[ENTRY] = (EXIT,)
        return succ
    succ[ENTRY] = (labels[0],)
    for s in m.body:
        fall: Node = nxt.get(s.label, EXIT)
        if isinstance(s.instr, Goto):
            succ[s.label] = (s.instr.target,)
        elif isinstance(s.instr, Branch):
            targets = [fall]
            if s.instr.target != fall:
                targets.append(s.instr.target)
            succ[s.label] = tuple(targets)
        elif isinstance(s.instr, Return):
            succ[s.label] = (EXIT,)
        else:
            succ[s.label] = (fall,)
    return succ


def build_cfg(m: Method) -> ControlFlowGraph:
    """Build the CFG: maximal basic blocks, dominator back-edges, and a
    deterministic topological block order.  Raises IrreducibleCfgError when
    removing the dominator back-edges leaves a cycle (equivalently, a
    retreating edge that is not a dominator back-edge)."""
    succ = _stmt_successors(m)
    pred: dict[Node, list[Node]] = {ENTRY: [], EXIT: []}
    for s in m.body:
        pred.setdefault(s.label, [])
    for u, vs in succ.items():
        for v in vs:
            pred.setdefault(v, []).append(u)
    pred_t = {n: tuple(ps) for n, ps in pred.items()}

    # Leaders: first statement, every jump target, every statement after a
    # control transfer.
    leaders: set[int] = set()
    body = m.body
    if body:
        leaders.add(body[0].label)
        for i, s in enumerate(body):
            if isinstance(s.instr, (Branch, Goto)):
                leaders.add(s.instr.target)
                if i + 1 < len(body):
                    leaders.add(body[i + 1].label)
            elif isinstance(s.instr, Return) and i + 1 < len(body):
                leaders.add(body[i + 1].label)

    blocks: list[BasicBlock] = []
    current: list[LabeledStatement] = []
    for s in body:
        if s.label in leaders and current:
            blocks.append(BasicBlock(tuple(current)))
            current = []
        current.append(s)
    if current:
        blocks.append(BasicBlock(tuple(current)))

    block_of: dict[int, int] = {}
    for bi, b in enumerate(blocks):
        for s in b.statements:
            block_of[s.label] = bi

    # Block-level edges (last statement's successors are always leaders).
    bsucc: dict[int, set[int]] = {bi: set() for bi in range(len(blocks))}
    for bi, b in enumerate(blocks):
        for v in succ[b.statements[-1].label]:
            if v != EXIT:
                bsucc[bi].add(block_of[v])
    bpred: dict[int, set[int]] = {bi: set() for bi in range(len(blocks))}
    for u, vs in bsucc.items():
        for v in vs:
            bpred[v].add(u)

    # Dominators over blocks reachable from the entry block.
    back_block_edges: set[tuple[int, int]] = set()
    if blocks:
        root = block_of[body[0].label]
        reachable: set[int] = set()
        stack = [root]
        while stack:
            n = stack.pop()
            if n in reachable:
                continue
            reachable.add(n)
            stack.extend(bsucc[n])
        full = frozenset(reachable)
        dom: dict[int, frozenset[int]] = {bi: full for bi in reachable}
        dom[root] = frozenset({root})
        changed = True
        while changed:
            changed = False
            for bi in sorted(reachable):
                if bi == root:
                    continue
                preds = [p for p in bpred[bi] if p in reachable]
                new = full
                for p in preds:
                    new = new & dom[p]
                new = new | {bi}
                if new != dom[bi]:
                    dom[bi] = new
                    changed = True
        for u in sorted(reachable):
            for v in bsucc[u]:
                if v in reachable and v in dom[u]:
                    back_block_edges.add((u, v))

    # Kahn's algorithm over the back-edge-free block graph; a stall means
    # some cycle is not a natural loop.
    indeg = {bi: 0 for bi in range(len(blocks))}
    fwd: dict[int, list[int]] = {bi: [] for bi in range(len(blocks))}
    for u, vs in bsucc.items():
        for v in vs:
            if (u, v) not in back_block_edges:
                fwd[u].append(v)
                indeg[v] += 1
    heap = [(blocks[bi].leader, bi) for bi in indeg if indeg[bi] == 0]
    heapq.heapify(heap)
    topo: list[int] = []
    while heap:
        _, u = heapq.heappop(heap)
        topo.append(u)
        for v in sorted(fwd[u]):
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, (blocks[v].leader, v))
    if len(topo) != len(blocks):
        raise IrreducibleCfgError(
            f"method '{m.name}' has a cycle that is not a natural loop"
        )

    back_edges = frozenset(
        (blocks[u].statements[-1].label, blocks[v].leader) for u, v in back_block_edges
    )
    return ControlFlowGraph(
        method=m,
        blocks=tuple(blocks),
        succ={n: tuple(vs) for n, vs in succ.items()},
        pred=pred_t,
        back_edges=back_edges,
        topo_order=tuple(blocks[bi] for bi in topo),
        loop_headers=frozenset(h for _, h in back_edges),
    )


# ---------------------------------------------------------------------------
# Call graph
# ---------------------------------------------------------------------------

CallSite = tuple[str, int]  # (caller method, statement label)


@dataclass(frozen=True)
class CallGraph:
    nodes: tuple[str, ...]
    #: (call-site, caller, callee) for every target of every call statement
    edges: tuple[tuple[CallSite, str, str], ...]
    sccs: tuple[frozenset[str], ...]
    recursive_call_sites: frozenset[CallSite]

    def scc_of(self, name: str) -> frozenset[str]:
        for scc in self.sccs:
            if name in scc:
                return scc
        raise KeyError(name)

    def is_recursive_method(self, name: str) -> bool:
        return name in self._cyclic_members()

    def _cyclic_members(self) -> frozenset[str]:
        cyclic: set[str] = set()
        edge_pairs = {(c, t) for _, c, t in self.edges}
        for scc in self.sccs:
            if len(scc) > 1 or any((n, n) in edge_pairs for n in scc):
                cyclic |= scc
        return frozenset(cyclic)

    def is_recursive_edge(self, caller: str, callee: str) -> bool:
        """True when the call edge lies on a call-graph cycle."""
        scc = self.scc_of(caller)
        if callee not in scc:
            return False
        if len(scc) > 1:
            return True
        return any(c == caller and t == callee for _, c, t in self.edges)

    def callers_of(self, name: str) -> tuple[str, ...]:
        seen: list[str] = []
        for _, caller, callee in self.edges:
            if callee == name and caller not in seen:
                seen.append(caller)
        return tuple(seen)

    def call_sites_of(self, name: str) -> tuple[CallSite, ...]:
        seen: list[CallSite] = []
        for site, _, callee in self.edges:
            if callee == name and site not in seen:
                seen.append(site)
        return tuple(seen)

    def bottom_up_order(self) -> tuple[str, ...]:
        """Methods ordered callees-first (SCC condensation order)."""
        index = {n: i for i, scc in enumerate(self.sccs) for n in scc}
        succs: dict[int, set[int]] = {i: set() for i in range(len(self.sccs))}
        for _, caller, callee in self.edges:
            if index[caller] != index[callee]:
                succs[index[caller]].add(index[callee])
        order: list[int] = []
        seen: set[int] = set()

        def visit(i: int) -> None:
            if i in seen:
                return
            seen.add(i)
            for j in sorted(succs[i]):
                visit(j)
            order.append(i)

        for i in range(len(self.sccs)):
            visit(i)
        out: list[str] = []
        for i in order:
            out.extend(sorted(self.sccs[i]))
        return tuple(out)


def build_call_graph(p: Program) -> CallGraph:
    """Enumerate call edges and classify recursive call-sites via SCCs."""
    edges: list[tuple[CallSite, str, str]] = []
    adjacency: dict[str, list[str]] = {m.name: [] for m in p.methods}
    for m in p.methods:
        for s in m.body:
            if isinstance(s.instr, Call):
                for t in s.instr.targets:
                    edges.append(((m.name, s.label), m.name, t))
                    adjacency[m.name].append(t)

    # Tarjan's algorithm, iterative, with sorted adjacency for determinism.
    index_of: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[frozenset[str]] = []
    counter = [0]

    def strongconnect(root: str) -> None:
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            node, pi = work.pop()
            if pi == 0:
                index_of[node] = low[node] = counter[0]
                counter[0] += 1
                stack.append(node)
                on_stack.add(node)
            recurse = False
            children = sorted(set(adjacency[node]))
            for j in range(pi, len(children)):
                w = children[j]
                if w not in index_of:
                    work.append((node, j + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[node] = min(low[node], index_of[w])
            if recurse:
                continue
            if low[node] == index_of[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(frozenset(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])

    for name in sorted(adjacency):
        if name not in index_of:
            strongconnect(name)

    scc_index = {n: i for i, scc in enumerate(sccs) for n in scc}
    edge_pairs = {(c, t) for _, c, t in edges}
    cyclic = {
        i
        for i, scc in enumerate(sccs)
        if len(scc) > 1 or any((n, n) in edge_pairs for n in scc)
    }
    recursive = frozenset(
        site
        for site, caller, callee in edges
        if scc_index[caller] == scc_index[callee] and scc_index[caller] in cyclic
    )
    return CallGraph(
        nodes=tuple(m.name for m in p.methods),
        edges=tuple(edges),
        sccs=tuple(sccs),
        recursive_call_sites=recursive,
    )


def iter_statements(p: Program) -> Iterator[tuple[Method, LabeledStatement]]:
    for m in p.methods:
        for s in m.body:
            yield m, s
