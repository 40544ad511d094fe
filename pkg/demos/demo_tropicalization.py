#!/usr/bin/env python3
"""Fans, charts and the normalized pullback of form fields.

Builds the projective-plane fan, follows a point to its limit on a
boundary stratum, and demonstrates that the normalized pullback to the
invariant complex frame intertwines the differentials exactly and
preserves top-degree integrals (tropical quadrature vs. the radial
route on the complex side).
"""

from fractions import Fraction

from tropcur import (bump_box_field, differentiate, integrate_top,
                     trop_pullback_field)
from tropcur.coeffs import CoefficientFn, Poly
from tropcur.fans import orthant_fan, p2_fan
from tropcur.fields import LagerbergFormField


def banner(text):
    print(f"\n=== {text} ===")


banner("the projective-plane fan and a boundary limit")
fan = p2_fan()
print("cones:", [c.generators for c in fan.cones])
p = (Fraction(17, 5), Fraction(-3))
lim = fan.limit_point(p, (0, 1))
print(f"lim_t {p} + t(0,1)  lands on stratum", fan.cones[lim.stratum].generators,
      "with quotient coordinate", lim.coords)

banner("pullback intertwines d' with the scaled del, exactly")
chart = orthant_fan(2).toric_chart(0)
field = bump_box_field(chart, 1, 0, [(((0,), ()), Poly.var(1, 2))], [(0, 2), (0, 2)])
lhs = trop_pullback_field(differentiate("d'", field))
rhs = differentiate("del", trop_pullback_field(field))
print("trop*(d' w) == pi^{-1/2} del trop*(w):", lhs == rhs)

banner("integration: tropical quadrature vs. the radial complex route")
full = (0, 1)
poly = Poly.const(2, 2) + Poly.var(0, 2)
fn = CoefficientFn.bump_box(2, {0: (0, 2), 1: (-1, 1)}, poly)
top = LagerbergFormField(chart, 2, 2, 2, {frozenset(): {(full, full): fn}})
t = integrate_top(top, "tropical", tol=1e-8)
c = integrate_top(top, "complex", tol=1e-8)
print(f"tropical side: {t:.12f}")
print(f"complex side:  {c:.12f}")
print(f"difference:    {abs(t - c):.2e}")
