import math

from hypothesis import assume, given, settings, strategies as st

import densities
from entropy import normal_entropy_closed_form, renyi_entropy
from exponents import WeightVector, big_A, conjugate, constant_ram_sason, discrete_entropy, make_triple

finite = dict(allow_nan=False, allow_infinity=False)


@st.composite
def weight_vectors(draw, min_size: int = 2, max_size: int = 4) -> WeightVector:
    raw = draw(st.lists(st.floats(min_value=0.0, max_value=1.0, **finite), min_size=min_size, max_size=max_size))
    total = math.fsum(raw)
    assume(total > 1e-3)
    return WeightVector.of(value / total for value in raw)


@given(st.floats(min_value=0.05, max_value=50.0, **finite))
def test_conjugate_identity(p: float) -> None:
    assume(abs(p - 1.0) > 1e-3)
    assert abs(1.0 / p + 1.0 / conjugate(p) - 1.0) < 1e-9


@given(st.floats(min_value=1.05, max_value=1.9, **finite), st.floats(min_value=1.05, max_value=1.9, **finite))
def test_triple_identity(p: float, q: float) -> None:
    triple = make_triple(p, q)
    assert abs(1.0 / triple.p.p_prime + 1.0 / triple.q.p_prime - 1.0 / triple.r.p_prime) < 1e-12
    assert 0.0 < triple.lam < 1.0
    assert abs(triple.lam - triple.r.p_prime / triple.p.p_prime) < 1e-12


@given(weight_vectors(max_size=6))
def test_discrete_entropy_range(w: WeightVector) -> None:
    value = discrete_entropy(w)
    assert -1e-15 <= value <= math.log(w.m) + 1e-12


@given(st.floats(min_value=1.05, max_value=10.0, **finite), weight_vectors())
def test_big_a_is_minimised_at_uniform(r: float, w: WeightVector) -> None:
    assert big_A(r, w) >= math.log(constant_ram_sason(r, w.m)) - 1e-12


@st.composite
def weight_segments(draw) -> tuple[WeightVector, WeightVector, float]:
    m = draw(st.integers(min_value=2, max_value=4))
    return draw(weight_vectors(m, m)), draw(weight_vectors(m, m)), draw(st.floats(min_value=0.0, max_value=1.0, **finite))


@given(st.floats(min_value=0.1, max_value=10.0, **finite), weight_segments())
def test_big_a_is_convex_along_segments(r: float, segment: tuple[WeightVector, WeightVector, float]) -> None:
    assume(abs(r - 1.0) > 1e-2)
    first, second, t = segment
    between = WeightVector.of(t * a + (1.0 - t) * b for a, b in zip(first.lambdas, second.lambdas))
    chord = t * big_A(r, first) + (1.0 - t) * big_A(r, second)
    assert big_A(r, between) <= chord + 1e-10


@given(
    st.floats(min_value=0.01, max_value=100.0, **finite),
    st.floats(min_value=0.1, max_value=10.0, **finite),
    st.floats(min_value=0.1, max_value=10.0, **finite),
)
def test_gaussian_closed_form_decreases_in_order(sigma2: float, low: float, high: float) -> None:
    assume(low < high)
    first = normal_entropy_closed_form(sigma2, 1, low).nats
    second = normal_entropy_closed_form(sigma2, 1, high).nats
    assert first >= second - 1e-12


@settings(max_examples=10, deadline=None)
@given(
    st.floats(min_value=0.5, max_value=4.0, **finite),
    st.floats(min_value=0.3, max_value=5.0, **finite),
    st.floats(min_value=0.3, max_value=5.0, **finite),
)
def test_quadrature_entropy_decreases_in_order(scale: float, low: float, high: float) -> None:
    assume(high - low > 1e-2)
    f = densities.laplace(scale)
    first = renyi_entropy(f, low, grid_n=4096).nats
    second = renyi_entropy(f, high, grid_n=4096).nats
    assert first >= second - 1e-9


if __name__ == "__main__":
    test_conjugate_identity()
    test_triple_identity()
    test_discrete_entropy_range()
    test_big_a_is_minimised_at_uniform()
    test_big_a_is_convex_along_segments()
    test_gaussian_closed_form_decreases_in_order()
    test_quadrature_entropy_decreases_in_order()
    print("SUCCESS: property checks passed.")
