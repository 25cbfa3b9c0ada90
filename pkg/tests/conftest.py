import sys
from pathlib import Path

from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from sumset_density.periodic_sets import make  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def periodic_sets(draw, max_q=12, max_blocks=3):
    """Random eventually periodic set with its raw description."""
    q = draw(st.integers(1, max_q))
    residues = draw(st.sets(st.integers(0, q - 1)))
    T = q * draw(st.integers(0, max_blocks))
    exceptions = draw(st.sets(st.integers(0, T - 1), max_size=T)) if T else set()
    return make(q, residues, T, exceptions), (q, residues, T, exceptions)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    RESULTS = module.RESULTS
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
