"""Flow-sensitive, context-insensitive points-to analysis whose results ship
as a compact, verifiable artifact: a producer computes the least fixed point
and encodes loop-header, IN-summary, and recursive OUT-summary invariants; a
consumer regenerates every per-statement result in a single pass and either
proves the artifact safe or pinpoints the tampered entry."""

from .artwork import Artwork, ArtworkStats, decode, encode, naive_encode, parse_artwork, stats
from .consumer import (
    RegenOutcome,
    Violation,
    check_in_safety,
    check_intra_safety,
    check_out_safety,
    regen_inter,
    regen_intra,
)
from .corpus import ARITH, FIXTURES, LOOPY, REC, CorpusConfig, generate_corpus
from .errors import (
    ArityMismatchError,
    ArtError,
    DuplicateNameError,
    IrreducibleCfgError,
    MalformedArtworkError,
    NothingToTamperError,
    ParseError,
    ResolutionError,
    UnknownReferenceError,
)
from .ir import (
    CallGraph,
    ControlFlowGraph,
    Method,
    Program,
    build_call_graph,
    build_cfg,
    parse_program,
    print_program,
)
from .producer import (
    AnalysisResult,
    analyze_inter,
    analyze_intra,
    chaotic_oracle,
    emit_artwork,
    optimize_artwork,
    validate_result,
)
from .ptg import (
    EMPTY,
    NULL_OBJECT,
    Placeholder,
    PointsToGraph,
    Site,
    VarId,
    meet,
    meet_all,
    project_in,
    project_out,
    render_edges,
    render_graph,
    restrict_to_summary,
    subsumes,
    transfer,
)
from .tamper import CampaignReport, TamperKind, TamperSpec, rq2_campaign, tamper

__all__ = [
    "ARITH",
    "AnalysisResult",
    "ArityMismatchError",
    "ArtError",
    "Artwork",
    "ArtworkStats",
    "CallGraph",
    "CampaignReport",
    "ControlFlowGraph",
    "CorpusConfig",
    "DuplicateNameError",
    "EMPTY",
    "FIXTURES",
    "IrreducibleCfgError",
    "LOOPY",
    "MalformedArtworkError",
    "Method",
    "NULL_OBJECT",
    "NothingToTamperError",
    "ParseError",
    "Placeholder",
    "PointsToGraph",
    "Program",
    "REC",
    "RegenOutcome",
    "ResolutionError",
    "Site",
    "TamperKind",
    "TamperSpec",
    "UnknownReferenceError",
    "VarId",
    "Violation",
    "analyze_inter",
    "analyze_intra",
    "build_call_graph",
    "build_cfg",
    "chaotic_oracle",
    "check_in_safety",
    "check_intra_safety",
    "check_out_safety",
    "decode",
    "emit_artwork",
    "encode",
    "generate_corpus",
    "meet",
    "meet_all",
    "naive_encode",
    "optimize_artwork",
    "parse_artwork",
    "parse_program",
    "print_program",
    "project_in",
    "project_out",
    "regen_inter",
    "regen_intra",
    "render_edges",
    "render_graph",
    "restrict_to_summary",
    "rq2_campaign",
    "stats",
    "subsumes",
    "tamper",
    "transfer",
    "validate_result",
]
