import math
from fractions import Fraction

import pytest

from tropcur.coeffs import CoefficientFn, Poly, bump
from tropcur.currents import (LagerbergCurrent, WeightedComplex, balancing_check,
                              c_finite_test, canonical_decomposition,
                              closedness_test, evaluate, extend_by_zero,
                              from_cocoefficients, integration_current,
                              positivity_check, resum, wedge_with_form)
from tropcur.errors import (MixedDimension, NotCFinite, NotPositive,
                            SupportEscapesU)
from tropcur.fans import orthant_fan
from tropcur.fields import LagerbergFormField, bump_box_field
from tropcur.gallery import (degenerate_form_current, derivative_atom_current,
                             omega_degenerate, positive_not_liftable,
                             closed_not_positive,
                             positive_not_positively_liftable, tropical_line,
                             tropical_line_current)
from tropcur.measures import (Atom, OpenBox, Piece, PieceMeasure,
                              lebesgue_piece)
from tropcur.polyhedra import Polyhedron


def interval(lo, hi):
    rows = []
    if hi is not None:
        rows.append(((1,), hi))
    if lo is not None:
        rows.append(((-1,), -Fraction(lo)))
    return Polyhedron(1, rows)


def _chart(n, infinite=False):
    fan = orthant_fan(n)
    if infinite:
        gens = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        return fan.toric_chart(fan.cone_id(gens))
    return fan.toric_chart(0)


def test_evaluate_lebesgue_unit():
    # T with T^{(0),(0)} = Lebesgue on [0,1] (n=1, p=0) eats (1,1)-forms
    chart = _chart(1)
    mu = PieceMeasure(1, pieces=[lebesgue_piece((), interval(0, 1))])
    T = LagerbergCurrent(chart, 0, {((0,), (0,)): mu})
    from tropcur.measures import integrate_against
    assert integrate_against(CoefficientFn.const(1, 1), mu) == pytest.approx(1.0, abs=1e-9)
    alpha = bump_box_field(chart, 1, 1, [(((0,), (0,)), Poly.const(1, 1))], [(-1, 2)])
    val = evaluate(T, alpha)
    from tropcur.quadrature import adaptive_box
    fn = alpha.coefficient(frozenset(), (0,), (0,))
    oracle = adaptive_box(lambda pts: fn.eval_np(pts), [(0.0, 1.0)], 1e-10)
    assert val == pytest.approx(oracle, abs=1e-8)


def test_evaluate_support_escape():
    chart = _chart(1)
    mu = PieceMeasure(1, pieces=[lebesgue_piece((), interval(0, 1))])
    U = OpenBox(chart, ((Fraction(-1), Fraction(2), False),))
    T = LagerbergCurrent(chart, 0, {((0,), (0,)): mu}, U)
    alpha = bump_box_field(chart, 1, 1, [(((0,), (0,)), Poly.const(1, 1))], [(0, 5)])
    with pytest.raises(SupportEscapesU):
        evaluate(T, alpha)


def test_positive_not_liftable_current():
    T = positive_not_liftable()
    v = positivity_check(T, samples=8)
    assert v.yes
    cf = c_finite_test(T)
    assert not cf.yes
    assert cf.witness["ray"] == (1,)
    cv = closedness_test(T, test_basis_size=10, tol=1e-8, seed=3)
    assert not cv.closed
    assert cv.residual > 1e-3


def test_exm1_evaluation_bound():
    # alpha_k = e^{-k^2} rho(u - k) d'u ^ d''u with rho == 1 on [k, k+1]:
    # the value exceeds int_k^{k+1} e^{x^2-k^2} dx > 1
    from tropcur.coeffs import table
    T = positive_not_liftable()
    chart = T.chart
    for k in (2, 3):
        rho = table(1, 0, k, k + 1)
        fld = LagerbergFormField(chart, 1, 1, 1,
                                 {frozenset(): {((0,), (0,)): rho}})
        val = evaluate(T, fld, tol=1e-6) * math.exp(-k * k)
        assert val > 1.0


def test_evaluate_indicator_exactly_one():
    # f == 1 on [0,1] against Lebesgue on [0,1]: the value is 1
    from tropcur.coeffs import table
    chart = _chart(1)
    mu = PieceMeasure(1, pieces=[lebesgue_piece((), interval(0, 1))])
    T = LagerbergCurrent(chart, 0, {((0,), (0,)): mu})
    fld = LagerbergFormField(chart, 1, 1, 1,
                             {frozenset(): {((0,), (0,)): table(1, 0, 0, 1)}})
    assert evaluate(T, fld) == pytest.approx(1.0, abs=1e-8)


def test_closed_not_positive_current():
    T = closed_not_positive()
    cv = closedness_test(T)
    assert cv.closed and cv.exact        # top bidegree: vacuous
    v = positivity_check(T, samples=6)
    assert v.answer == "no"
    kind, beta, val = v.witness
    assert val < 0
    # the witness re-verifies
    assert evaluate(T, beta, check=False) == pytest.approx(val)


def test_exm3_not_c_finite():
    T = positive_not_positively_liftable()
    assert positivity_check(T, samples=6).yes
    cf = c_finite_test(T)
    assert not cf.yes


def test_degenerate_form_current_fails_estimate():
    T = degenerate_form_current()
    v = positivity_check(T, samples=6)
    assert v.answer == "no"
    assert v.witness[0] in ("estimate_piece", "estimate_atom")


def test_degenerate_current_cocoefficient_table():
    # T^{(2,3),(0,1)} = +Lebesgue, T^{(1,3),(0,2)} = -Lebesgue (0-based)
    T = degenerate_form_current()
    mu = T.cocoeff((2, 3), (0, 1))
    assert len(mu.pieces) == 1 and mu.pieces[0].sign > 0
    assert mu.pieces[0].weight_poly == Poly.const(1, 4)
    mu2 = T.cocoeff((1, 3), (0, 2))
    assert len(mu2.pieces) == 1 and mu2.pieces[0].sign < 0
    # diagonal co-coefficients vanish
    assert T.cocoeff((0, 1), (0, 1)).is_zero()
    # symmetry T^{IJ} = T^{JI}
    assert mu == T.cocoeff((0, 1), (2, 3))


def test_derivative_atom_current_flagged():
    T = derivative_atom_current()
    assert not T.is_measure_class()
    v = positivity_check(T, samples=4)
    assert v.answer == "no" and v.witness[0] == "non_measure"


def test_wedge_degenerate_form_with_derivative_atom():
    # beta = constant degenerate form field, T' = derivative atom current:
    # the output co-coefficient is again a derivative atom (non-measure)
    Tp = derivative_atom_current()
    chart = Tp.chart
    omega = omega_degenerate()
    tables = {frozenset(): {k: CoefficientFn.const(c, 4)
                            for k, c in omega.coeff.items()}}
    beta = LagerbergFormField(chart, 4, 2, 2, tables)
    out = wedge_with_form(beta, Tp)
    assert out.p == 2
    assert not out.is_measure_class()
    mu = out.cocoeff((2, 3), (0, 1))
    assert len(mu.derivative_atoms) == 1


def test_wedge_with_constant_one():
    T = tropical_line_current()
    chart = T.chart
    one = LagerbergFormField(chart, 2, 0, 0,
                             {frozenset(): {((), ()): CoefficientFn.const(1, 2)}})
    out = wedge_with_form(one, T)
    assert out == T


def test_decomposition_atoms_and_density():
    # one atom at u = (inf, 0), one Lebesgue density on N_R inside R_inf^2
    chart = _chart(2, infinite=True)
    square = Polyhedron.box([(0, 1), (0, 1)])
    mu11 = PieceMeasure(2, pieces=[lebesgue_piece((), square)])
    mu22 = PieceMeasure(2, atoms=[Atom(frozenset({0}), (Fraction(0),), Fraction(1))],
                        pieces=[lebesgue_piece((), square)])
    T = LagerbergCurrent(chart, 1, {((0,), (0,)): mu11, ((1,), (1,)): mu22})
    parts = canonical_decomposition(T, assume_positive=True)
    strata = {tuple(sorted(M)) for M in parts}
    assert strata == {(), (0,)}
    assert resum(parts, T) == T
    bdry = parts[frozenset({0})]
    assert len(bdry.cocoeff((1,), (1,)).atoms) == 1
    assert bdry.cocoeff((0,), (0,)).is_zero()


def test_decomposition_requires_positive():
    T = degenerate_form_current()
    with pytest.raises(NotPositive):
        canonical_decomposition(T, samples=5)


def test_tropical_line_balanced_closed_positive():
    C = tropical_line()
    assert balancing_check(C).balanced
    T = tropical_line_current()
    assert positivity_check(T, samples=8).yes
    cv = closedness_test(T)
    assert cv.closed and cv.exact
    assert c_finite_test(T).yes


def test_tropical_line_sampled_closedness():
    # force the sampled route (strip the meta) and expect tiny residuals
    T0 = tropical_line_current()
    T = LagerbergCurrent(T0.chart, T0.p, T0.cocoeffs, T0.U)
    cv = closedness_test(T, test_basis_size=12, tol=1e-8, seed=1)
    assert cv.closed, cv.residual


def test_unbalanced_line_detected():
    C = tropical_line(weights=(1, 1, 2))
    bal = balancing_check(C)
    assert not bal.balanced
    assert bal.witness["residual"] is not None
    T = integration_current(C, _chart(2))
    cv = closedness_test(T, test_basis_size=16, tol=1e-8, seed=2)
    assert not cv.closed
    assert cv.residual > 1e-3


def test_single_segment_weight_zero_balanced():
    seg = Polyhedron(2, [((0, 1), 0), ((0, -1), 0), ((1, 0), 1), ((-1, 0), 0)])
    C = WeightedComplex(((seg, 0),), declared_dim=1)
    assert balancing_check(C).balanced
    assert integration_current(C, _chart(2)).is_zero()


def test_single_ray_unbalanced():
    ray = Polyhedron(2, [((0, 1), 0), ((0, -1), 0), ((-1, 0), 0)])
    C = WeightedComplex(((ray, 1),), declared_dim=1)
    assert not balancing_check(C).balanced


def test_mixed_dimension_rejected():
    seg = Polyhedron(2, [((0, 1), 0), ((0, -1), 0), ((1, 0), 1), ((-1, 0), 0)])
    pt = Polyhedron(2, [((1, 0), 0), ((-1, 0), 0), ((0, 1), 0), ((0, -1), 0)])
    C = WeightedComplex(((seg, 1), (pt, 1)))
    with pytest.raises(MixedDimension):
        C.dim()


def test_delta_segment_cocoefficients():
    # segment [0,1] e_0 in R^2, weight 1: only T^{(0,),(0,)} = Lebesgue
    seg = Polyhedron(2, [((0, 1), 0), ((0, -1), 0), ((1, 0), 1), ((-1, 0), 0)])
    C = WeightedComplex(((seg, 1),), declared_dim=1)
    T = integration_current(C, _chart(2))
    assert T.p == 1
    assert set(T.cocoeffs) == {((0,), (0,))}
    mu = T.cocoeff((0,), (0,))
    assert mu.pieces[0].weight_poly == Poly.const(1, 2)
    # evaluation against a (1,1) field is a 1-d integral over the segment
    alpha = bump_box_field(T.chart, 1, 1,
                           [(((0,), (0,)), Poly.const(1, 2))], [(-1, 2), (-1, 1)])
    val = evaluate(T, alpha)
    import numpy as np
    from tropcur.quadrature import adaptive_box
    fn = alpha.coefficient(frozenset(), (0,), (0,))
    oracle = adaptive_box(
        lambda pts: fn.eval_np(np.column_stack([pts[:, 0], np.zeros(len(pts))])),
        [(0.0, 1.0)], 1e-10)
    assert val == pytest.approx(oracle, abs=1e-8)


def test_extension_by_zero_ray_through_boundary():
    # delta of a ray toward the boundary stratum, bounded weight: extends
    chart = _chart(2, infinite=True)
    ray = Polyhedron(2, [((0, 1), 0), ((0, -1), 0), ((-1, 0), 0)])
    C = WeightedComplex(((ray, 1),), declared_dim=1)
    T = integration_current(C, chart)
    ext = extend_by_zero(T, [frozenset({0})], check_positive=False)
    assert ext.cocoeffs == T.cocoeffs


def test_extension_not_c_finite_rejected():
    T = positive_not_positively_liftable()
    with pytest.raises(NotCFinite):
        extend_by_zero(T, [frozenset({0})], check_positive=False)


def test_extension_of_zero():
    chart = _chart(1, infinite=True)
    T = LagerbergCurrent(chart, 0, {})
    out = extend_by_zero(T, [frozenset({0})], check_positive=False)
    assert out.is_zero()


def test_reconstruction_identity():
    T = tropical_line_current()
    back = from_cocoefficients(T.chart, T.p, T.cocoeffs, T.U)
    assert back == T


def test_top_degree_vacuously_closed():
    chart = _chart(2)
    full = ((0, 1), (0, 1))
    mu = PieceMeasure(2, atoms=[Atom(frozenset(), (Fraction(0), Fraction(0)),
                                     Fraction(1))])
    T = LagerbergCurrent(chart, 2, {((), ()): mu})
    cv = closedness_test(T)
    assert cv.closed and cv.exact


def test_j_symmetry_of_positive_currents():
    # positivity includes symmetry: T^{IJ} = T^{JI} verified on the line
    T = tropical_line_current()
    for (I, J) in T.cocoeffs:
        assert T.cocoeff(I, J) == T.cocoeff(J, I)
