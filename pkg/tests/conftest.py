import pytest

from artpta import (
    ARITH,
    LOOPY,
    REC,
    CorpusConfig,
    analyze_inter,
    emit_artwork,
    generate_corpus,
    parse_program,
)

ACCEPTANCE_SEED = 2024


@pytest.fixture(scope="session")
def loopy():
    return parse_program(LOOPY)


@pytest.fixture(scope="session")
def rec():
    return parse_program(REC)


@pytest.fixture(scope="session")
def arith():
    return parse_program(ARITH)


@pytest.fixture(scope="session")
def loopy_pipeline(loopy):
    result = analyze_inter(loopy)
    return loopy, result, emit_artwork(loopy, result)


@pytest.fixture(scope="session")
def rec_pipeline(rec):
    result = analyze_inter(rec)
    return rec, result, emit_artwork(rec, result)


@pytest.fixture(scope="session")
def arith_pipeline(arith):
    result = analyze_inter(arith)
    return arith, result, emit_artwork(arith, result)


@pytest.fixture(scope="session")
def small_corpus():
    """Parsed 10-program corpus for module-level sweeps (the acceptance suite
    runs the full 50-program one)."""
    files = generate_corpus(CorpusConfig(program_count=10, seed=ACCEPTANCE_SEED))
    return [(name, parse_program(text)) for name, text in files]
