import random
from fractions import Fraction

import pytest

from tropcur import exact
from tropcur.exact import QC
from tropcur.errors import BidegreeMismatch, WrongAlgebra
from tropcur.fiber import (ComplexFiberForm, LagerbergFiberForm, apply_involution,
                           complex_orientation, decomposable_test, dual_pairing,
                           embed_complex, embed_preimage, gram_form,
                           is_symmetric, lagerberg_orientation,
                           positive_generator, positivity_verdict,
                           reverify, strong_generator, subsets, wedge)
from tropcur.gallery import omega_degenerate, omega_rank_two


# --- brute-force oracle: forms as generator sequences -------------------------
# An independent expansion of the wedge product: keep every term as an
# explicit sequence of degree-one generators ('p', i) or ('q', j) and sort
# by bubble sort, counting swaps.

def _bubble_normalize(seq):
    seq = list(seq)
    sign = 1
    changed = True
    while changed:
        changed = False
        for t in range(len(seq) - 1):
            if seq[t] > seq[t + 1]:
                seq[t], seq[t + 1] = seq[t + 1], seq[t]
                sign = -sign
                changed = True
            elif seq[t] == seq[t + 1]:
                return 0, None
    return sign, tuple(seq)


def _oracle_wedge(a, b):
    out = {}
    for (I1, J1), c1 in a.coeff.items():
        for (I2, J2), c2 in b.coeff.items():
            seq = ([("p", i) for i in I1] + [("q", j) for j in J1]
                   + [("p", i) for i in I2] + [("q", j) for j in J2])
            sign, norm = _bubble_normalize(seq)
            if sign == 0:
                continue
            I = tuple(i for k, i in norm if k == "p")
            J = tuple(j for k, j in norm if k == "q")
            out[(I, J)] = out.get((I, J), 0) + sign * c1 * c2
    out = {k: v for k, v in out.items() if v != 0}
    return out


def _random_form(rng, n, p, q, cls=LagerbergFiberForm):
    coeff = {}
    for I in subsets(n, p):
        for J in subsets(n, q):
            c = rng.randint(-3, 3)
            if c and cls is ComplexFiberForm:
                coeff[(I, J)] = QC(c, rng.randint(-3, 3))
            elif c:
                coeff[(I, J)] = c
    return cls(n, p, q, coeff)


def test_wedge_against_bubble_oracle():
    rng = random.Random(1)
    for _ in range(40):
        n = rng.randint(1, 4)
        p1, q1 = rng.randint(0, n), rng.randint(0, n)
        p2, q2 = rng.randint(0, n), rng.randint(0, n)
        a = _random_form(rng, n, p1, q1)
        b = _random_form(rng, n, p2, q2)
        w = wedge(a, b)
        assert w.coeff == _oracle_wedge(a, b)


def test_wedge_sign_bookkeeping_example():
    # (d'u_1 ^ d''u_1) ^ (d'u_2 ^ d''u_2) = -(d'u_1 ^ d'u_2) ^ J(d'u_1 ^ d'u_2)
    n = 2
    e1 = LagerbergFiberForm.basis_form(n, (0,), (0,))
    e2 = LagerbergFiberForm.basis_form(n, (1,), (1,))
    lhs = wedge(e1, e2)
    a = LagerbergFiberForm.basis_form(n, (0, 1), ())
    rhs = wedge(a, apply_involution("J", a)).scale(-1)
    assert lhs == rhs


def test_wedge_graded_commutativity():
    rng = random.Random(7)
    for _ in range(30):
        n = rng.randint(1, 4)
        p1, q1 = rng.randint(0, 2), rng.randint(0, 2)
        p2, q2 = rng.randint(0, 2), rng.randint(0, 2)
        a = _random_form(rng, n, min(p1, n), min(q1, n))
        b = _random_form(rng, n, min(p2, n), min(q2, n))
        ab = wedge(a, b)
        ba = wedge(b, a)
        s = (-1) ** ((a.p + a.q) * (b.p + b.q))
        assert ab == ba.scale(s)


def test_degenerate_form_kills_strong_generators():
    # omega ^ eta = 0 for eta = a ^ Ja ^ b ^ Jb, any a, b
    w = omega_degenerate()
    rng = random.Random(3)
    for _ in range(50):
        vecs = [tuple(rng.randint(-4, 4) for _ in range(4)) for _ in range(2)]
        g = strong_generator(vecs, 4)
        assert wedge(w, g).is_zero()
        assert dual_pairing(w, g) == 0


def test_involutions_are_involutions():
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randint(1, 4)
        p, q = rng.randint(0, n), rng.randint(0, n)
        a = _random_form(rng, n, p, q)
        assert apply_involution("J", apply_involution("J", a)) == a
        w = _random_form(rng, n, p, q, ComplexFiberForm)
        assert apply_involution("F", apply_involution("F", w)) == w
        assert apply_involution("conjugation", apply_involution("conjugation", w)) == w


def test_involution_wrong_algebra():
    a = LagerbergFiberForm.basis_form(2, (0,), ())
    with pytest.raises(WrongAlgebra):
        apply_involution("F", a)
    w = ComplexFiberForm.basis_form(2, (0,), ())
    with pytest.raises(WrongAlgebra):
        apply_involution("J", w)


def test_f_fixes_i_du_dubar():
    # F(i du_1 ^ dubar_1) = i du_1 ^ dubar_1
    w = ComplexFiberForm(1, 1, 1, {((0,), (0,)): QC(0, 1)})
    assert apply_involution("F", w) == w


def test_j_generator_swap_with_sign():
    # J is the algebra involution: J(d'u_1 ^ d''u_2) = d''u_1 ^ d'u_2
    #                                                = -d'u_2 ^ d''u_1
    a = LagerbergFiberForm.basis_form(2, (0,), (1,))
    expected = LagerbergFiberForm(2, 1, 1, {((1,), (0,)): -1})
    assert apply_involution("J", a) == expected


def test_f_conj_anticommute_on_one_forms():
    # eq: F(conj(alpha)) = -conj(F(alpha)) for (1,0)- and (0,1)-forms
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randint(1, 3)
        for (p, q) in ((1, 0), (0, 1)):
            a = _random_form(rng, n, p, q, ComplexFiberForm)
            lhs = apply_involution("F", apply_involution("conjugation", a))
            rhs = apply_involution("conjugation", apply_involution("F", a)).scale(-1)
            assert lhs == rhs


def test_conj_f_sign_rule_all_degrees():
    # conj(F eta) = (-1)^{p+q} F(conj eta)
    rng = random.Random(13)
    for _ in range(40):
        n = rng.randint(1, 4)
        p, q = rng.randint(0, n), rng.randint(0, n)
        a = _random_form(rng, n, p, q, ComplexFiberForm)
        lhs = apply_involution("conjugation", apply_involution("F", a))
        rhs = apply_involution("F", apply_involution("conjugation", a)).scale((-1) ** (p + q))
        assert lhs == rhs


def test_embed_orientation():
    for n in (1, 2, 3, 4):
        assert embed_complex(lagerberg_orientation(n)) == complex_orientation(n)


def test_embed_multiplicative_injective():
    rng = random.Random(17)
    for _ in range(25):
        n = rng.randint(1, 3)
        a = _random_form(rng, n, rng.randint(0, 1), rng.randint(0, 1))
        b = _random_form(rng, n, rng.randint(0, 1), rng.randint(0, 1))
        assert embed_complex(wedge(a, b)) == wedge(embed_complex(a), embed_complex(b))
        if not a.is_zero():
            assert not embed_complex(a).is_zero()


def test_embed_image_is_f_fixed_and_dimension_count():
    rng = random.Random(19)
    n = 2
    for _ in range(20):
        a = _random_form(rng, n, rng.randint(0, n), rng.randint(0, n))
        w = embed_complex(a)
        assert apply_involution("F", w) == w
        assert embed_preimage(w) == a
    # real dimension of the F-fixed space: one real parameter per basis
    # pair (I,J), so 4^n = 2^(2n)
    count = sum(len(subsets(n, p)) * len(subsets(n, q))
                for p in range(n + 1) for q in range(n + 1))
    assert count == 2 ** (2 * n)
    # F-fixed sampling: symmetrized random forms come from Lagerberg forms
    for _ in range(10):
        w = _random_form(rng, n, 1, 1, ComplexFiberForm)
        fixed = w + apply_involution("F", w)
        assert embed_preimage(fixed) is not None


def test_embed_j_conjugation_rule():
    # embed(J a) = i^{p+q} conj(embed(a))
    rng = random.Random(23)
    for _ in range(40):
        n = rng.randint(1, 4)
        p, q = rng.randint(0, n), rng.randint(0, n)
        a = _random_form(rng, n, p, q)
        lhs = embed_complex(apply_involution("J", a))
        rhs = apply_involution("conjugation", embed_complex(a)).scale(QC.i_pow((p + q) % 4))
        assert lhs == rhs


def test_gram_simple():
    a = LagerbergFiberForm.basis_form(2, (0,), (0,))
    g = gram_form(a)
    assert g.kind == "symmetric"
    assert g.matrix == [[1, 0], [0, 0]]


def test_gram_outer_product_psd_rank_one():
    rng = random.Random(29)
    for _ in range(20):
        n = rng.randint(2, 4)
        p = rng.randint(1, n - 1)
        coeffs = {(K, ()): rng.randint(-3, 3) for K in subsets(n, p)}
        alpha = LagerbergFiberForm(n, p, 0, coeffs)
        g = positive_generator(alpha)
        res = exact.psd_decompose([[Fraction(x) for x in row]
                                   for row in gram_form(g).matrix])
        assert res.psd and res.rank <= 1


def test_gram_rank_two_example():
    g = gram_form(omega_rank_two())
    res = exact.psd_decompose([[Fraction(x) for x in row] for row in g.matrix])
    assert res.psd and res.rank == 2


def test_dual_pairing_trivial():
    a = LagerbergFiberForm.basis_form(2, (0,), (0,))
    b = LagerbergFiberForm.basis_form(2, (1,), (1,))
    assert dual_pairing(a, b) == 1
    bad = LagerbergFiberForm.basis_form(3, (0,), (0,))
    with pytest.raises(BidegreeMismatch):
        dual_pairing(bad, bad)


def test_dual_pairing_positive_cone():
    # <positive, positive> >= 0 exactly on random samples
    rng = random.Random(31)
    for _ in range(60):
        n = rng.randint(2, 4)
        p = rng.randint(1, n - 1)
        q = n - p
        a = positive_generator(LagerbergFiberForm(
            n, p, 0, {(K, ()): rng.randint(-2, 2) for K in subsets(n, p)}))
        b = positive_generator(LagerbergFiberForm(
            n, q, 0, {(K, ()): rng.randint(-2, 2) for K in subsets(n, q)}))
        assert dual_pairing(a, b) >= 0


def test_strong_generator_linear_relation_dim4():
    # w_{1,3,2,4} - w_{1,2,3,4} + w_{1,2,4,3} = 0 for every a^Ja^b^Jb;
    # in block-basis coefficients: -c[(0,1),(2,3)] + c[(0,2),(1,3)]
    #                              - c[(0,3),(1,2)] = 0
    rng = random.Random(37)
    for _ in range(200):
        vecs = [tuple(rng.randint(-5, 5) for _ in range(4)) for _ in range(2)]
        g = strong_generator(vecs, 4)
        val = (-g.get((0, 1), (2, 3)) + g.get((0, 2), (1, 3))
               - g.get((0, 3), (1, 2)))
        assert val == 0


def test_positivity_positive_tier_exact():
    rng = random.Random(41)
    for _ in range(15):
        n = rng.randint(2, 4)
        p = rng.randint(1, n - 1)
        a = positive_generator(LagerbergFiberForm(
            n, p, 0, {(K, ()): rng.randint(-2, 2) for K in subsets(n, p)}))
        b = positive_generator(LagerbergFiberForm(
            n, p, 0, {(K, ()): rng.randint(-2, 2) for K in subsets(n, p)}))
        form = a + b.scale(Fraction(3, 2))
        v = positivity_verdict(form, "positive")
        assert v.yes and reverify(form, v)


def test_positivity_negative_witness_reverifies():
    w = omega_degenerate()
    v = positivity_verdict(w, "positive")
    assert v.no and reverify(w, v)
    # witness is a dual form with strictly negative exact pairing
    kind, dual = v.witness
    assert kind == "dual_form"
    assert dual_pairing(w, dual) < 0


def test_degenerate_form_weak_tier():
    w = omega_degenerate()
    for form in (w, w.scale(-1), w.scale(7)):
        v = positivity_verdict(form, "weak", pool_size=40)
        assert v.yes, v.reason
        assert reverify(form, v)


def test_rank_two_example_verdicts():
    w = omega_rank_two()
    vpos = positivity_verdict(w, "positive")
    assert vpos.yes and reverify(w, vpos)
    vstr = positivity_verdict(w, "strong", pool_size=60)
    assert vstr.no
    assert vstr.witness[0] == "kernel_obstruction"
    quads = vstr.witness[1]["quadratics"]
    # the obstruction quadric is y^2 + z^2 up to scale
    assert any(A > 0 and B == 0 and C > 0 and A == C for A, B, C in quads)
    assert reverify(w, vstr)


def test_p1_equivalence_all_tiers():
    a = LagerbergFiberForm.basis_form(2, (0,), (0,))
    for tier in ("strong", "positive", "weak"):
        assert positivity_verdict(a, tier).yes


def test_strong_tier_conic_certificate():
    # tau_2-like: sum of coordinate strong generators has an exact certificate
    n = 2
    g1 = strong_generator([(1, 0)], n)
    g2 = strong_generator([(0, 1)], n)
    form = g1 + g2.scale(2)
    v = positivity_verdict(form, "strong", pool_size=12)
    assert v.answer in ("yes", "unknown")
    if v.yes:
        assert reverify(form, v)
    # away from the tier-equivalence range: p=2, n=4
    vecs1 = [(1, 0, 0, 0), (0, 1, 0, 0)]
    vecs2 = [(0, 0, 1, 0), (0, 0, 0, 1)]
    form = strong_generator(vecs1, 4) + strong_generator(vecs2, 4)
    v = positivity_verdict(form, "strong", pool_size=40, seed=2)
    assert v.yes and reverify(form, v)


def test_weak_tier_negative_witness():
    # -tau_2 is not weakly positive: pairing with 1 is -1
    n = 2
    form = lagerberg_orientation(n).scale(-1)
    v = positivity_verdict(form, "weak")
    assert v.no


def test_tier_hierarchy_never_contradicts():
    rng = random.Random(43)
    for _ in range(10):
        n = 4
        p = 2
        a = positive_generator(LagerbergFiberForm(
            n, p, 0, {(K, ()): rng.randint(-2, 2) for K in subsets(n, p)}))
        vs = positivity_verdict(a, "strong", pool_size=50, seed=5)
        vp = positivity_verdict(a, "positive")
        vw = positivity_verdict(a, "weak", pool_size=50, seed=5)
        if vs.yes:
            assert vp.yes
        if vp.yes:
            assert vw.answer in ("yes", "unknown")
        if vw.no:
            assert vp.no and vs.no


def test_f_preserves_positive_tier():
    rng = random.Random(47)
    for _ in range(10):
        n = 3
        p = rng.randint(1, 2)
        coeffs = {(K, ()): QC(rng.randint(-2, 2), rng.randint(-2, 2))
                  for K in subsets(n, p)}
        alpha = ComplexFiberForm(n, p, 0, coeffs)
        from tropcur.fiber import positive_generator_complex
        form = positive_generator_complex(alpha)
        ff = apply_involution("F", form)
        v1 = positivity_verdict(form, "positive")
        v2 = positivity_verdict(ff, "positive")
        assert v1.yes and v2.yes


def test_lagerberg_positive_iff_complex_positive():
    rng = random.Random(53)
    for _ in range(25):
        n = rng.randint(2, 4)
        p = rng.randint(1, n - 1)
        coeffs = {}
        for K in subsets(n, p):
            for L in subsets(n, p):
                c = rng.randint(-2, 2)
                if c:
                    coeffs[(K, L)] = c
        form = LagerbergFiberForm(n, p, p, coeffs)
        sym = form + apply_involution("J", form).scale((-1) ** p)
        v_lag = positivity_verdict(sym, "positive")
        v_cpx = positivity_verdict(embed_complex(sym), "positive")
        assert v_lag.answer == v_cpx.answer


def test_complex_gram_hermitian_and_sign():
    # i^{p^2} alpha ^ conj(alpha) has Gram = outer(alpha, conj alpha): PSD
    rng = random.Random(59)
    from tropcur.fiber import positive_generator_complex
    for _ in range(10):
        n = rng.randint(2, 3)
        p = rng.randint(1, n - 1)
        coeffs = {(K, ()): QC(rng.randint(-2, 2), rng.randint(-2, 2))
                  for K in subsets(n, p)}
        form = positive_generator_complex(ComplexFiberForm(n, p, 0, coeffs))
        g = gram_form(form)
        assert g.kind == "hermitian"
        res = exact.psd_decompose_qc(g.matrix)
        assert res.psd and res.rank <= 1


def test_decomposable():
    n = 4
    a = LagerbergFiberForm(n, 2, 0, {((0, 1), ()): 1})
    assert decomposable_test(a) == "yes"
    b = LagerbergFiberForm(n, 2, 0, {((0, 1), ()): 1, ((2, 3), ()): 1})
    assert decomposable_test(b) == "no"
    c = LagerbergFiberForm(n, 2, 0, {((0, 2), ()): 1, ((1, 3), ()): -1})
    assert decomposable_test(c) == "no"
    # rank test route for p=3 in n=4: every 3-form is decomposable (p = n-1)
    d = LagerbergFiberForm(4, 3, 0, {((0, 1, 2), ()): 2, ((0, 1, 3), ()): 5})
    assert decomposable_test(d) == "yes"


def test_decomposable_rank_route_p3_n6():
    # decomposable: product structure detected by the support rank test
    n = 6
    a = LagerbergFiberForm(n, 2, 0, {((0, 1), ()): 1})
    b = LagerbergFiberForm(n, 1, 0, {((2,), ()): 1, ((3,), ()): 2})
    w = wedge(a, b)
    assert decomposable_test(w) == "yes"
    nd = LagerbergFiberForm(n, 3, 0, {((0, 1, 2), ()): 1, ((3, 4, 5), ()): 1})
    assert decomposable_test(nd) == "no"


def test_symmetric_checks():
    assert is_symmetric(lagerberg_orientation(3))
    assert is_symmetric(omega_degenerate())
    asym = LagerbergFiberForm(2, 1, 1, {((0,), (1,)): 1})
    assert not is_symmetric(asym)
    v = positivity_verdict(asym, "positive")
    assert v.no and reverify(asym, v)
