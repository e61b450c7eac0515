from fractions import Fraction

from hypothesis import strategies as st

from curvmo.poly import Polynomial


def rationals(max_num=20, max_den=12):
    return st.builds(
        Fraction,
        st.integers(-max_num, max_num),
        st.integers(1, max_den),
    )


@st.composite
def polynomials(draw, dim=3, max_degree=4, max_terms=6, homogeneous_degree=None):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        if homogeneous_degree is None:
            exps = draw(st.lists(st.integers(0, max_degree), min_size=dim, max_size=dim))
            if sum(exps) > max_degree:
                continue
        else:
            # compositions of the degree into dim parts
            cuts = sorted(draw(st.lists(st.integers(0, homogeneous_degree), min_size=dim - 1, max_size=dim - 1)))
            bounds = [0] + cuts + [homogeneous_degree]
            exps = [b - a for a, b in zip(bounds, bounds[1:])]
        terms[tuple(exps)] = terms.get(tuple(exps), 0) + draw(rationals())
    return Polynomial(dim, terms)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
