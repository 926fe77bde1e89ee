import math

import pytest

from hyperwitten import polygon_solver, transfer
from hyperwitten.errors import ConstantTermSurvives
from hyperwitten.semiclassical import tunneling_data
from hyperwitten.transseries import TransSeries, TransTerm, leading_term, product
from hyperwitten.trigpoly import TrigPoly, morse_data

PI = math.pi


@pytest.fixture
def two_well_td(two_well_md):
    return tunneling_data(two_well_md)


def test_two_well_quantization_vertices(two_well_td):
    q = transfer.quantization_series(two_well_td)
    assert q.min_degree == 1
    polygon = polygon_solver.build_polygon(q)
    first, second = polygon.point_at(1), polygon.point_at(2)
    assert first.rate == pytest.approx(25 / (8 * PI), rel=1e-10)
    assert first.coeff == pytest.approx(2 / math.sqrt(75), rel=1e-10)
    assert second.rate == pytest.approx(34 / (8 * PI), rel=1e-10)
    assert second.coeff == pytest.approx(-1 / math.sqrt(3375), rel=1e-10)


def test_two_well_trace_leading_term(two_well_td):
    lead = leading_term(transfer.assemble_G0(two_well_td).trace())
    assert lead.e_deg == 2
    assert lead.rate == pytest.approx(34 / (8 * PI), rel=1e-10)
    assert lead.coeff == pytest.approx(1 / math.sqrt(3375), rel=1e-10)


def test_leading_term_matrix(two_well_td):
    g0 = transfer.assemble_G0(two_well_td)
    for entry, expected in zip(g0.entries, transfer.leading_term_matrix(two_well_td)):
        found = leading_term(entry)
        assert (found.e_deg, found.h2_pow) == (expected.e_deg, expected.h2_pow)
        assert found.rate == pytest.approx(expected.rate, abs=1e-12)
        assert found.coeff == pytest.approx(expected.coeff, rel=1e-10)


@pytest.mark.parametrize("fixture", ["sine_potential", "two_well_potential", "three_well_potential"])
def test_det_is_multiplicative(request, fixture):
    td = tunneling_data(morse_data(request.getfixturevalue(fixture)))
    det = transfer.assemble_G0(td).det()
    factors = product([transfer.tunneling_factor(td, k).det() for k in range(1, td.n + 1)])
    closed = transfer.det_closed_form(td)
    for E, h in ((0.3, 0.5), (1.7, 0.25), (-0.4 + 0.2j, 0.8)):
        scale = max(det.max_term(E, h), closed.max_term(E, h))
        assert abs(det.evaluate(E, h) - factors.evaluate(E, h)) <= 1e-10 * scale
        assert abs(det.evaluate(E, h) - closed.evaluate(E, h)) <= 1e-10 * scale


def test_identity_matrix(two_well_td):
    factor = transfer.tunneling_factor(two_well_td, 1)
    one = transfer.TransMatrix2.identity()
    for a, b in zip((one @ factor).entries, factor.entries):
        assert a.approx_equal(b)


def test_zero_mode_cancels(two_well_td):
    g0 = transfer.assemble_G0(two_well_td)
    q = 1.0 - g0.trace() + g0.det()
    constant = q.block(0)
    scale = max(abs(t.coeff) for t in q)
    assert all(abs(t.coeff) < 1e-10 * scale for t in constant)


def test_sine_reduced_series(sine_potential):
    td = tunneling_data(morse_data(sine_potential))
    reduced = transfer.reduced_quantization_series(td)
    assert reduced.min_degree == 0
    assert polygon_solver.build_polygon(reduced).positive_edges == ()
    top = leading_term(reduced)
    assert top.e_deg == 0
    assert top.rate == pytest.approx(2 / PI, rel=1e-12)
    assert top.coeff == pytest.approx(0.5, rel=1e-12)


def test_two_well_low_lying(two_well_md):
    zero, mode = transfer.low_lying(two_well_md)
    assert zero.is_zero_mode and zero.value(0.1) == 0
    assert not mode.is_zero_mode
    assert mode.rate == pytest.approx(9 / (8 * PI), rel=1e-10)
    assert mode.prefactor.real == pytest.approx(2 * math.sqrt(45), rel=1e-10)
    assert abs(mode.prefactor.imag) < 1e-9 * mode.prefactor.real
    assert mode.hpow == 1.0
    assert not mode.caveat
    h = 0.05
    assert mode.value(h, depth=1).real == pytest.approx(
        2 * math.sqrt(45) * h * math.exp(-9 / (8 * PI * h)), rel=1e-10
    )


def test_sine_low_lying(sine_potential):
    modes = transfer.low_lying(morse_data(sine_potential))
    assert len(modes) == 1 and modes[0].is_zero_mode


def test_three_well_low_lying(three_well_potential):
    modes = transfer.low_lying(morse_data(three_well_potential))
    assert len(modes) == 3
    assert modes[0].is_zero_mode
    for mode in modes[1:]:
        assert mode.rate > 0
        assert mode.prefactor.real > 0
        assert abs(mode.prefactor.imag) < 1e-9 * mode.prefactor.real


def test_low_lying_is_shift_invariant(two_well_potential):
    base = transfer.low_lying(morse_data(two_well_potential))
    lifted = transfer.low_lying(morse_data(two_well_potential + 5.0))
    for a, b in zip(base, lifted):
        assert a.rate == pytest.approx(b.rate, rel=1e-9, abs=1e-12)
        assert a.prefactor == pytest.approx(b.prefactor, rel=1e-9, abs=1e-12)


def test_deep_corrections_carry_caveat(two_well_md):
    _, mode = transfer.low_lying(two_well_md, depth=3)
    assert mode.caveat


def test_eigen_json(two_well_md):
    _, mode = transfer.low_lying(two_well_md)
    data = mode.to_json()
    assert set(data) >= {"rate", "prefactor", "hpow", "corrections"}
    assert data["prefactor"]["re"] == pytest.approx(2 * math.sqrt(45))


def test_surviving_constant_term_is_rejected(two_well_td):
    two = TransSeries.constant(2.0)
    with pytest.raises(ConstantTermSurvives):
        transfer.quantization_series(two_well_td, g0=transfer.TransMatrix2.diag(two, two))


def test_rounding_in_constant_block_is_removed(two_well_td):
    g11 = TransSeries([TransTerm(1.0000000000000002), TransTerm(1e-12, e_deg=1, rate=1.0)])
    g0 = transfer.TransMatrix2.diag(g11, TransSeries.constant(3.0))
    q = transfer.quantization_series(two_well_td, g0=g0)
    assert len(q) == 1
    (term,) = q
    assert (term.e_deg, term.h2_pow) == (1, 0)
    assert term.rate == pytest.approx(1.0)
    assert term.coeff == pytest.approx(2e-12, rel=1e-9)


def test_random_potentials_low_lying(rng):
    for _ in range(15):
        M = int(rng.integers(1, 5))
        md = morse_data(TrigPoly(a=tuple(rng.standard_normal(M + 1)), b=tuple(rng.standard_normal(M))))
        modes = transfer.low_lying(md)
        assert len(modes) == md.n
        assert modes[0].is_zero_mode
        for mode in modes[1:]:
            assert not mode.is_zero_mode
            assert mode.rate > 0
            assert mode.prefactor.real > 0
            assert abs(mode.prefactor.imag) <= 1e-9 * mode.prefactor.real


def test_non_real_correction_is_reported():
    level = polygon_solver.Level(1.0, 2.0)
    imaginary = polygon_solver.TransSolution(levels=(level, polygon_solver.Level(2.0, 3j)))
    mode = transfer.EigenAsym.from_solution(imaginary, depth=2)
    assert len(mode.warnings) == 1
    assert "correction 2" in mode.warnings[0] and "is not real" in mode.warnings[0]

    real = polygon_solver.TransSolution(levels=(level, polygon_solver.Level(2.0, -0.5)))
    assert not transfer.EigenAsym.from_solution(real, depth=2).warnings


def test_residual_at_small_h(two_well_td):
    q = transfer.reduced_quantization_series(two_well_td)
    (solution,) = polygon_solver.solve(q)
    for h in (0.005, 0.001):
        assert polygon_solver.residual(q, solution, h) < 1e-8
    with pytest.raises(ValueError, match="too small"):
        q.evaluate(1.0, 1e-3)
