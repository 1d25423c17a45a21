import os
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from szlenk_lab.vecspace import SparseVec

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

nonzero_floats = st.floats(-10, 10, allow_nan=False).filter(lambda x: abs(x) > 1e-3)
nonzero_fractions = st.builds(
    Fraction, st.integers(-20, 20).filter(bool), st.integers(1, 8)
)


@st.composite
def sparse_vecs(draw, max_index=12, max_size=8, min_size=0, values=nonzero_floats):
    idx = draw(st.lists(st.integers(1, max_index), min_size=min_size, max_size=max_size, unique=True))
    return SparseVec.from_dict({i: draw(values) for i in idx})


def rational_vecs(**kw):
    return sparse_vecs(values=nonzero_fractions, **kw)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
