from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from rispaces import INF, Domain, PiecewiseFn, SeqFn

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

rationals = st.fractions(min_value=Fraction(-5), max_value=Fraction(5), max_denominator=12)
heights = st.fractions(min_value=Fraction(0), max_value=Fraction(5), max_denominator=12)


@st.composite
def step_fns(draw, domain=Domain.HALFLINE, signed=False, flat_tail=False, max_pieces=6):
    """Random step functions with rational breakpoints."""
    n = draw(st.integers(1, max_pieces))
    top = 1 if domain is Domain.UNIT else 20
    cuts = sorted(set(draw(st.lists(st.fractions(Fraction(0), Fraction(top), max_denominator=16),
                                    min_size=n + 1, max_size=n + 1))))
    if len(cuts) < 2:
        cuts = [Fraction(0), Fraction(top)]
    vals = draw(st.lists(rationals if signed else heights, min_size=len(cuts) - 1, max_size=len(cuts) - 1))
    blocks = [(a, b, v) for a, b, v in zip(cuts, cuts[1:], vals)]
    if flat_tail and domain is Domain.HALFLINE:
        blocks.append((max(cuts[-1], Fraction(top)), INF, draw(heights)))
    return PiecewiseFn.step(domain, blocks)


@st.composite
def seqs(draw, tail=True):
    head = draw(st.lists(heights, min_size=1, max_size=10))
    if tail and draw(st.booleans()):
        return SeqFn.const_tail(head, draw(heights))
    return SeqFn(head)
