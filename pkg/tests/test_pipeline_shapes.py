"""Whole-pipeline checks over structurally tricky program shapes: oracle
agreement, exact regeneration from plain and optimized artifacts, and full
campaign detection."""

import pytest

from artpta import (
    NothingToTamperError,
    analyze_inter,
    chaotic_oracle,
    decode,
    emit_artwork,
    encode,
    optimize_artwork,
    parse_program,
    regen_inter,
    render_edges,
    rq2_campaign,
)

MUTUAL_RECURSION = """\
method main() {
  1: a = new A
  2: a.f = a
  3: call [even](a)
}
method even(x) {
  1: if goto 4
  2: y = x.f
  3: call [odd](y)
  4: return
}
method odd(z) {
  1: z.g = z
  2: if goto 4
  3: call [even](z)
  4: return
}
"""

CYCLE_THROUGH_MAIN = """\
method main() {
  1: b = new B
  2: if goto 4
  3: call [h]()
  4: b.f = b
}
method h() {
  1: c = new C
  2: if goto 4
  3: call [main]()
  4: c.g = c
}
"""

RECURSIVE_RETURN = """\
method main() {
  1: s = new S
  2: r = call [dup](s)
  3: r.f = s
}
method dup(p) {
  1: if goto 4
  2: q = call [dup](p)
  3: return q
  4: return p
}
"""

EMPTY_BODY = "method main() { }\n"

EMPTY_CALLEE = """\
method main() {
  1: call [nil]()
}
method nil() { }
"""

SHAPES = {
    "mutual-recursion": MUTUAL_RECURSION,
    "cycle-through-main": CYCLE_THROUGH_MAIN,
    "recursive-return": RECURSIVE_RETURN,
    "empty-body": EMPTY_BODY,
    "empty-callee": EMPTY_CALLEE,
}


@pytest.mark.parametrize("label", sorted(SHAPES))
def test_pipeline_shape(label):
    p = parse_program(SHAPES[label])
    r = analyze_inter(p)
    assert r.same_values(chaotic_oracle(p))
    a = emit_artwork(p, r)
    out = regen_inter(p, decode(encode(a), p))
    assert out.safe and out.result.same_values(r)
    assert all(n == 1 for n in out.visits.values())
    opt = optimize_artwork(p, a)
    assert len(encode(opt)) <= len(encode(a))
    opted = regen_inter(p, decode(encode(opt), p))
    assert opted.safe and opted.result.same_values(r)
    try:
        report = rq2_campaign(p, a, 10, seed=17)
        assert report.detected == report.n == 10
    except NothingToTamperError:
        assert all(g.is_empty() for g in a.i_in.values())
        assert not a.i_loop and not a.i_out


def test_recursive_return_summary_carries_return_edge():
    p = parse_program(RECURSIVE_RETURN)
    a = emit_artwork(p, analyze_inter(p))
    # dup's slots: p=0, q=1, return carrier=2
    assert "dup/2 -> main:1" in render_edges(a.i_out["dup"])
