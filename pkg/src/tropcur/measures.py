"""Concrete signed Radon measures on chart strata: atoms + densities.

A PieceMeasure lives on the strata of a toric chart: finitely many
weighted atoms at compactified points, plus densities pol(u) exp(E(u))
(deg E <= 2) on rational polyhedra inside single strata, each carrying a
certified constant sign.  One extra exemplar kind, derivative atoms,
represents the single non-measure co-coefficient needed by the weakly
positive counterexample; every measure-semantics operation rejects it
unless explicitly told otherwise.

Measures carry an exact global prefactor c * pi^k so that the
trop-normalization constants of the correspondence module stay symbolic
and round trips compare bit-for-bit.

Local finiteness toward the boundary is decided exactly on the quadratic
exponent family: along every generator of each escape subcone of a
piece's recession cone, the exponent must decay (negative quadratic
part, or vanishing quadratic part and negative supremum of the linear
rate over the piece).
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact, quadrature
from .coeffs import CoefficientFn, Poly
from .errors import (Divergent, NonMeasurePiece, NotLocallyFinite,
                     SignNotCertified, ToleranceNotMet)
from .exact import frac
from .polyhedra import Polyhedron, Row, parametrize


@dataclass(frozen=True)
class Atom:
    """Weighted point: stratum (axes at infinity) + finite coordinates.

    ``coords`` lists the finite-axis coordinates in increasing axis
    order (length = chart dim - len(stratum)).
    """
    stratum: frozenset
    coords: tuple
    weight: Fraction

    def key(self):
        return (tuple(sorted(self.stratum)), self.coords, self.weight)


@dataclass(frozen=True)
class DerivativeAtom:
    """Exemplar non-measure piece: f -> -weight * (directional derivative)."""
    stratum: frozenset
    coords: tuple
    direction: tuple
    weight: Fraction

    def key(self):
        return (tuple(sorted(self.stratum)), self.coords, self.direction, self.weight)


@dataclass(frozen=True)
class Piece:
    """Density pol * exp(expo) on a polyhedron inside one stratum.

    The polyhedron and both polynomials live in the stratum's finite-axis
    coordinates; ``sign`` is the certified constant sign of the density
    on the piece.
    """
    stratum: frozenset
    poly: Polyhedron
    weight_poly: Poly
    weight_expo: Poly
    sign: int

    def key(self):
        return (tuple(sorted(self.stratum)), self.poly.canonical_key(),
                self.weight_poly.key(), self.weight_expo.key(), self.sign)

    def density_fn(self):
        return CoefficientFn.poly_exp(self.weight_poly, self.weight_expo)


def lebesgue_piece(stratum, poly, weight=1, expo=None, sign=None):
    """Constant-or-polynomial density piece with automatic sign handling."""
    d = poly.dim
    if isinstance(weight, Poly):
        wp = weight
    else:
        wp = Poly.const(weight, d)
    we = expo if expo is not None else Poly.zero(d)
    if sign is None:
        if len(wp.exps) <= 1:
            c = next(iter(wp.exps.values()), Fraction(0))
            sign = 1 if c >= 0 else -1
        else:
            raise SignNotCertified("pass sign= for non-monomial weights")
    return Piece(frozenset(stratum), poly, wp, we, sign)


class PieceMeasure:
    """Signed Radon measure: atoms + sign-pure density pieces (+ exemplars)."""

    def __init__(self, n, atoms=(), pieces=(), derivative_atoms=(),
                 scale=(Fraction(1), 0), certify=True, rng_seed=0):
        self.n = n
        self.atoms = tuple(Atom(frozenset(a.stratum), tuple(frac(c) for c in a.coords),
                                frac(a.weight)) for a in atoms)
        self.pieces = tuple(pieces)
        self.derivative_atoms = tuple(derivative_atoms)
        fracpart, pipow = scale
        fracpart = frac(fracpart)
        if fracpart < 0:
            raise ValueError("scale prefactor must be positive; fold signs into weights")
        self.scale = (fracpart, int(pipow))
        for a in self.atoms:
            if len(a.coords) != n - len(a.stratum):
                raise ValueError("atom coords do not match its stratum")
        for p in self.pieces:
            if p.poly.dim != n - len(p.stratum):
                raise ValueError("piece polyhedron dim does not match its stratum")
            if p.weight_expo.degree() > 2:
                raise ValueError("exponent degree > 2 is outside the family")
            if certify:
                certify_sign(p, seed=rng_seed)

    # --- structure ---------------------------------------------------------
    def is_measure(self):
        return not self.derivative_atoms

    def is_zero(self):
        return not (self.atoms or self.pieces or self.derivative_atoms)

    def scale_float(self):
        c, k = self.scale
        return float(c) * math.pi ** k

    def canonical_key(self):
        c, k = self.scale
        if k == 0 and c != 1:
            return self.rescaled().canonical_key()
        return (self.n, c, k,
                tuple(sorted(a.key() for a in self.atoms if a.weight != 0)),
                tuple(sorted(p.key() for p in self.pieces
                             if not p.weight_poly.is_zero())),
                tuple(sorted(d.key() for d in self.derivative_atoms)))

    def rescaled(self):
        """Fold a pi-free prefactor into the weights (canonical form)."""
        c, k = self.scale
        if k != 0 or c == 1:
            return self
        atoms = [Atom(a.stratum, a.coords, a.weight * c) for a in self.atoms]
        pieces = [Piece(p.stratum, p.poly, p.weight_poly.scale(c), p.weight_expo,
                        p.sign) for p in self.pieces]
        der = [DerivativeAtom(d.stratum, d.coords, d.direction, d.weight * c)
               for d in self.derivative_atoms]
        return PieceMeasure(self.n, atoms, pieces, der, (Fraction(1), 0),
                            certify=False)

    def __eq__(self, other):
        return (isinstance(other, PieceMeasure)
                and self.canonical_key() == other.canonical_key())

    def __hash__(self):
        return hash(self.canonical_key())

    def with_scale(self, cfrac, pipow):
        c, k = self.scale
        return PieceMeasure(self.n, self.atoms, self.pieces, self.derivative_atoms,
                            (c * frac(cfrac), k + pipow), certify=False)

    def __add__(self, other):
        assert self.n == other.n
        a, b = self, other
        if a.scale != b.scale:
            if a.scale[1] != b.scale[1]:
                raise ValueError("cannot add measures with different pi powers")
            a, b = a.rescaled(), b.rescaled()
        return PieceMeasure(self.n, a.atoms + b.atoms, a.pieces + b.pieces,
                            a.derivative_atoms + b.derivative_atoms, a.scale,
                            certify=False)

    def scale_weights(self, c):
        """Multiply all weights by a rational scalar (sign flags tracked)."""
        c = frac(c)
        if c == 0:
            return PieceMeasure.zero(self.n)
        s = 1 if c > 0 else -1
        atoms = [Atom(a.stratum, a.coords, a.weight * c) for a in self.atoms]
        pieces = [Piece(p.stratum, p.poly, p.weight_poly.scale(c), p.weight_expo,
                        p.sign * s) for p in self.pieces]
        der = [DerivativeAtom(d.stratum, d.coords, d.direction, d.weight * c)
               for d in self.derivative_atoms]
        return PieceMeasure(self.n, atoms, pieces, der, self.scale, certify=False)

    def __repr__(self):
        return (f"PieceMeasure(n={self.n}, atoms={len(self.atoms)}, "
                f"pieces={len(self.pieces)}, der={len(self.derivative_atoms)}, "
                f"scale={self.scale})")

    @staticmethod
    def zero(n):
        return PieceMeasure(n)

    @staticmethod
    def dirac(n, stratum, coords, weight=1):
        return PieceMeasure(n, atoms=[Atom(frozenset(stratum), tuple(coords), frac(weight))])


# --- sign certification ---------------------------------------------------------

def _univariate_profile(poly):
    """(axis, coefficient dict) when the polynomial uses one variable."""
    used = set()
    for e in poly.exps:
        used |= {i for i, x in enumerate(e) if x}
    if len(used) > 1:
        return None
    axis = next(iter(used), 0)
    coeffs = {}
    for e, c in poly.exps.items():
        coeffs[e[axis] if used else 0] = c
    deg = max(coeffs, default=0)
    return axis, [coeffs.get(d, Fraction(0)) for d in range(deg + 1)]


def _squarefree_part(coeffs):
    p = [Fraction(c) for c in coeffs]
    while p and p[-1] == 0:
        p.pop()
    if len(p) <= 1:
        return p
    dp = [i * c for i, c in enumerate(p)][1:]
    g = _poly_gcd(p, dp)
    if len(g) <= 1:
        return p
    q, r = exact._poly_div(p, g)
    return q if not any(r) else p


def _poly_gcd(a, b):
    a, b = list(a), list(b)
    while b and any(b):
        _, r = exact._poly_div(a, b)
        while r and r[-1] == 0:
            r.pop()
        a, b = b, r
    if a and a[-1] != 0:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def certify_sign(piece, samples=1000, seed=0):
    """Check the declared sign of a density piece.

    Exponentials are positive, so the sign comes from the polynomial:
    constants are trivial; univariate polynomials get exact root
    isolation (no root of the square-free part inside the open projection
    interval proves constant sign); anything else counts as a declared
    certificate and is re-checked on random rational samples.  Raises
    SignNotCertified with a witness on failure.
    """
    poly = piece.weight_poly
    if poly.is_zero():
        return True
    if len(poly.exps) == 1 and sum(next(iter(poly.exps))) == 0:
        c = next(iter(poly.exps.values()))
        if (c > 0) == (piece.sign > 0):
            return True
        raise SignNotCertified("constant weight contradicts declared sign",
                               payload={"constant": c})
    prof = _univariate_profile(poly)
    if prof is not None:
        axis, coeffs = prof
        e = [Fraction(0)] * piece.poly.dim
        e[axis] = Fraction(1)
        lo, hi, empty = piece.poly.linear_bounds(tuple(e))
        if empty:
            return True
        sf = _squarefree_part(coeffs)
        interior = exact.sturm_roots_in(sf, lo, hi)        # roots in (lo, hi]
        if hi is not None and _eval_poly(sf, hi) == 0:
            interior -= 1
        if interior == 0:
            # constant sign inside: check one interior value exactly
            if lo is not None and hi is not None:
                x = (lo + hi) / 2
            elif lo is not None:
                x = lo + 1
            elif hi is not None:
                x = hi - 1
            else:
                x = Fraction(0)
            val = _eval_poly(coeffs, x)
            if val != 0 and (val > 0) != (piece.sign > 0):
                raise SignNotCertified("sign flag contradicts the density",
                                       payload={"axis_value": x, "value": val})
            return True
        # interior roots of the square-free part: fall through to sampling
    import random as _random
    rng = _random.Random(seed)
    pts = piece.poly.sample_points(rng, samples)
    for pt in pts:
        val = poly.eval(pt)
        if val != 0 and (val > 0) != (piece.sign > 0):
            raise SignNotCertified("sampled density value contradicts sign flag",
                                   payload={"point": pt, "value": val})
    return True


def _eval_poly(coeffs, x):
    out = Fraction(0)
    for c in reversed(coeffs):
        out = out * x + c
    return out


# --- open sets --------------------------------------------------------------------

@dataclass(frozen=True)
class OpenBox:
    """Open box in a chart: per-axis (lo, hi, infinity_included).

    ``lo``/``hi`` may be None for unbounded; ``infinity_included`` only
    matters on the chart's infinite axes and requires hi = None.
    """
    chart: object
    axes: tuple       # tuple of (lo, hi, inf_included)

    @staticmethod
    def whole_chart(chart):
        n = len(chart.basis)
        return OpenBox(chart, tuple((None, None, i in chart.infinite_axes)
                                    for i in range(n)))

    def n(self):
        return len(self.axes)

    def stratum_allowed(self, M):
        return all(self.axes[i][2] for i in M)

    def contains_point(self, stratum, coords):
        if not self.stratum_allowed(stratum):
            return False
        finite_axes = [i for i in range(self.n()) if i not in stratum]
        for i, c in zip(finite_axes, coords):
            lo, hi, _ = self.axes[i]
            if lo is not None and not c > frac(lo):
                return False
            if hi is not None and not c < frac(hi):
                return False
        return True


@dataclass(frozen=True)
class ImageMap:
    """Continuous map under which measures are transported.

    kind 'open_inclusion': inclusion of the measure's domain into the
    open set ``target`` (an OpenBox); requires the local-finiteness
    decision on every unbounded piece.  kind 'stratum_inclusion': closed
    immersion of a stratum closure (re-indexing only).  kind
    'projection': drop coordinates listed in ``drop_axes``.
    """
    kind: str
    target: object = None
    drop_axes: tuple = ()


# --- core operations -----------------------------------------------------------------

def integrate_against(f, mu, tol=1e-8, allow_derivative_atoms=False,
                      max_doublings=30):
    """sum of atom weights * f + sum over pieces of the density integral.

    ``f`` is a CoefficientFn on the chart coordinates or a dict stratum ->
    CoefficientFn.  Per piece the integral is computed in a lattice-adapted
    parametrization; bounded domains (after clipping by the integrand's
    support box) use closed forms when bump-free, else adaptive
    quadrature; unbounded domains require certified exponential decay and
    are truncated adaptively.
    """
    if mu.derivative_atoms and not allow_derivative_atoms:
        raise NonMeasurePiece("measure contains derivative-atom exemplars",
                              payload={"count": len(mu.derivative_atoms)})

    def table_for(stratum):
        if isinstance(f, dict):
            fn = f.get(frozenset(stratum))
            return fn
        return f

    total = 0.0
    n = mu.n
    for atom in mu.atoms:
        fn = table_for(atom.stratum)
        if fn is None:
            continue
        dead = fn.drop_axis_dependence() & atom.stratum
        if dead:
            raise ValueError(f"integrand depends on infinite axes {dead}")
        u = _embed_point(n, atom.stratum, atom.coords)
        total += float(atom.weight) * fn.eval_float(u)
    for datom in mu.derivative_atoms:
        fn = table_for(datom.stratum)
        if fn is None:
            continue
        finite_axes = [i for i in range(n) if i not in datom.stratum]
        dfn = CoefficientFn.zero(n)
        for t, axis in enumerate(finite_axes):
            c = frac(datom.direction[t])
            if c != 0:
                dfn = dfn + fn.diff(axis).scale(c)
        u = _embed_point(n, datom.stratum, datom.coords)
        total += float(datom.weight) * (-dfn.eval_float(u))
    for piece in mu.pieces:
        fn = table_for(piece.stratum)
        if fn is None or fn.is_zero():
            continue
        total += _integrate_piece(fn, piece, n, tol, max_doublings)
    return mu.scale_float() * total


def _embed_point(n, stratum, coords):
    u = [0.0] * n
    finite_axes = [i for i in range(n) if i not in stratum]
    for i, c in zip(finite_axes, coords):
        u[i] = float(c)
    return u


def _stratum_embedding(n, stratum):
    """Affine data (A, b) with u_chart = A t + b for stratum coordinates.

    Dead axes get value 0 (integrands never depend on them there)."""
    finite_axes = [i for i in range(n) if i not in stratum]
    A = [[Fraction(0)] * len(finite_axes) for _ in range(n)]
    for j, i in enumerate(finite_axes):
        A[i][j] = Fraction(1)
    b = [Fraction(0)] * n
    return A, b


def _integrate_piece(fn, piece, n, tol, max_doublings):
    dead = fn.drop_axis_dependence() & piece.stratum
    if dead:
        raise ValueError(f"integrand depends on infinite axes {dead}")
    d = piece.poly.dim
    # integrand on stratum coordinates
    A, b = _stratum_embedding(n, piece.stratum)
    f_strat = fn.substitute_affine(A, b, d)
    g = f_strat * piece.density_fn()
    dom = piece.poly
    # clip by the integrand's support box
    sup = g.support_box()
    rows = []
    for i in range(d):
        if sup[i] is not None:
            e = [Fraction(0)] * d
            e[i] = Fraction(1)
            rows.append(Row(tuple(e), frac(sup[i][1]), False))
            rows.append(Row(tuple(-x for x in e), -frac(sup[i][0]), False))
    clipped = dom.with_rows(rows) if rows else dom
    if clipped.is_empty():
        return 0.0
    par = parametrize(clipped)
    if par is None:
        return 0.0
    Amap, u0, domain = par
    k = domain.dim
    if k == 0:
        # single point: densities carry no mass on a zero-dimensional piece
        return 0.0
    h = g.substitute_affine(Amap, u0, k)
    if h.is_zero():
        return 0.0
    if domain.is_bounded():
        return _integrate_bounded(h, domain, tol)
    # unbounded: certify decay toward every recession direction, truncate
    _require_decay(h, domain)
    return _integrate_truncated(h, domain, tol, max_doublings)


def _axis_box(domain):
    """Per-axis exact bounds of a (bounded) domain; None if not box-like."""
    d = domain.dim
    bounds = []
    for i in range(d):
        e = [Fraction(0)] * d
        e[i] = Fraction(1)
        lo, hi, empty = domain.linear_bounds(tuple(e))
        if empty or lo is None or hi is None:
            return None
        bounds.append((lo, hi))
    # a domain is a box exactly when every row is axis-aligned
    for r in domain.rows:
        if sum(1 for c in r.a if c != 0) > 1:
            return None
    return bounds


def _integrate_bounded(h, domain, tol):
    box = _axis_box(domain)
    if box is not None:
        if all(lo < hi for lo, hi in box):
            if not h.has_windows() and h.max_exp_degree() <= 1:
                total = 0.0
                for poly, expo, _ in h.terms:
                    total += quadrature.poly_exp_box(poly, expo, box)
                return total
            return quadrature.adaptive_box(
                h.eval_np, [(float(lo), float(hi)) for lo, hi in box], tol)
        return 0.0
    verts = [tuple(float(x) for x in v) for v in domain.vertices()]
    if len(verts) < domain.dim + 1:
        return 0.0
    simplices = quadrature.triangulate_vertices(verts)
    total = 0.0
    per_tol = tol / max(len(simplices), 1)
    for s in simplices:
        total += quadrature.adaptive_simplex(h.eval_np, [verts[i] for i in s], per_tol)
    return total


def _expo_quadratic_on(expo, v):
    """Coefficient of t^2 in expo(u0 + t v) (u0-independent)."""
    out = Fraction(0)
    d = expo.nvars
    for e, c in expo.exps.items():
        if sum(e) != 2:
            continue
        idx = [i for i, x in enumerate(e) for _ in range(x)]
        out += c * frac(v[idx[0]]) * frac(v[idx[1]])
    return out


def _expo_linear_rate(expo, v):
    """gradient(expo)(u) . v as a Poly in u (affine when deg expo <= 2)."""
    d = expo.nvars
    out = Poly.zero(d)
    for i in range(d):
        c = frac(v[i])
        if c != 0:
            out = out + expo.diff(i).scale(c)
    return out


def decay_along(expo, domain, v):
    """'decays' / 'neutral_or_grows' for exp(expo) along recession ray v."""
    q = _expo_quadratic_on(expo, v)
    if q < 0:
        return "decays"
    if q > 0:
        return "neutral_or_grows"
    rate = _expo_linear_rate(expo, v)
    # affine rate: sup over the domain must be negative
    const = rate.exps.get(tuple([0] * rate.nvars), Fraction(0))
    lin = [rate.exps.get(tuple(int(j == i) for j in range(rate.nvars)), Fraction(0))
           for i in range(rate.nvars)]
    if all(c == 0 for c in lin):
        return "decays" if const < 0 else "neutral_or_grows"
    lo, hi, empty = domain.linear_bounds(tuple(lin))
    if empty:
        return "decays"
    if hi is None:
        return "neutral_or_grows"
    return "decays" if const + hi < 0 else "neutral_or_grows"


def _combined_expo(h):
    """Worst-case single exponent when all terms share it; None otherwise."""
    expos = {e.key() for _, e, _ in h.terms}
    if len(expos) == 1:
        return h.terms[0][1]
    return None


def _require_decay(h, domain):
    gens = [g for g in domain.recession_generators() if any(g)]
    for _, expo, _ in h.terms:
        for v in gens:
            if decay_along(expo, domain, v) != "decays":
                raise Divergent("integrand does not decay along a recession ray",
                                payload={"ray": v, "exponent": repr(expo)})
        if expo.degree() == 2 and len(gens) > 1:
            for i in range(len(gens)):
                for j in range(i + 1, len(gens)):
                    cross = _expo_quadratic_on(expo, tuple(a + b for a, b in
                                                           zip(gens[i], gens[j])))
                    ci = _expo_quadratic_on(expo, gens[i])
                    cj = _expo_quadratic_on(expo, gens[j])
                    if cross - ci - cj > 0:   # 2 Q(v_i, v_j) > 0
                        raise Divergent(
                            "indefinite quadratic exponent over a multi-ray cone",
                            payload={"rays": (gens[i], gens[j])})


def _integrate_truncated(h, domain, tol, max_doublings):
    verts = domain.vertices() or [domain.feasible_point()]
    base = max((abs(float(c)) for v in verts for c in v), default=1.0) + 1.0
    R = max(base, 4.0)
    prev = None
    for _ in range(max_doublings):
        box_rows = []
        d = domain.dim
        for i in range(d):
            e = [Fraction(0)] * d
            e[i] = Fraction(1)
            bound = Fraction(int(math.ceil(R)))
            box_rows.append(Row(tuple(e), bound, False))
            box_rows.append(Row(tuple(-x for x in e), bound, False))
        clipped = domain.with_rows(box_rows)
        val = _integrate_bounded(h, clipped, tol / 4)
        if prev is not None and abs(val - prev) <= tol / 2:
            return val
        prev = val
        R *= 2
    raise ToleranceNotMet("truncated integral did not stabilize",
                          payload={"radius": R})


def total_variation_decompose(mu):
    """Hahn-Jordan split (mu_plus, mu_minus); exact because pieces are sign-pure."""
    if not mu.is_measure():
        raise NonMeasurePiece("derivative atoms have no total variation")
    for p in mu.pieces:
        if p.sign == 0:
            raise SignNotCertified("piece without a certified sign",
                                   payload={"piece": p.key()})
    plus_atoms = [a for a in mu.atoms if a.weight > 0]
    minus_atoms = [Atom(a.stratum, a.coords, -a.weight) for a in mu.atoms if a.weight < 0]
    plus_pieces = [p for p in mu.pieces if p.sign > 0]
    minus_pieces = [Piece(p.stratum, p.poly, p.weight_poly.scale(-1), p.weight_expo, 1)
                    for p in mu.pieces if p.sign < 0]
    plus = PieceMeasure(mu.n, plus_atoms, plus_pieces, (), mu.scale, certify=False)
    minus = PieceMeasure(mu.n, minus_atoms, minus_pieces, (), mu.scale, certify=False)
    return plus, minus


def abs_measure(mu):
    p, m = total_variation_decompose(mu)
    return p + m


def boundary_escape_cones(piece, chart):
    """Nonzero escape subcones of a piece's recession cone, per limit stratum.

    Returns a list of (M, generators) for subsets M of the chart's
    remaining infinite axes: directions of the recession cone along which
    points converge to the stratum (piece.stratum | M).
    """
    n = len(chart.basis)
    finite_axes = [i for i in range(n) if i not in piece.stratum]
    inf_positions = [t for t, i in enumerate(finite_axes)
                     if i in chart.infinite_axes]
    out = []
    rec = piece.poly.recession()
    d = piece.poly.dim
    for mask in range(1, 1 << len(inf_positions)):
        pos = [inf_positions[t] for t in range(len(inf_positions)) if mask >> t & 1]
        rows = []
        for t in range(d):
            e = [Fraction(0)] * d
            e[t] = Fraction(1)
            if t in pos:
                rows.append(Row(tuple(-x for x in e), Fraction(0), False))
            else:
                rows.append(Row(tuple(e), Fraction(0), False))
                rows.append(Row(tuple(-x for x in e), Fraction(0), False))
        sub = rec.with_rows(rows)
        gens = [g for g in sub.recession_generators() if any(g)]
        # require strict escape: some coordinate in pos actually grows
        gens = [g for g in gens if any(g[t] > 0 for t in pos)]
        if gens:
            M = frozenset(finite_axes[t] for t in pos)
            out.append((M, gens))
    return out


def image_measure(mu, m):
    """Transport a measure along an ImageMap.

    Open inclusions into a chart box run the exact local-finiteness
    decision on every unbounded piece (the image Radon measure exists iff
    every escape direction has certified decay); stratum inclusions and
    coordinate projections transport the data.
    """
    if m.kind == "open_inclusion":
        target = m.target
        chart = target.chart
        for piece in mu.pieces:
            if piece.poly.is_bounded():
                continue
            for M, gens in boundary_escape_cones(piece, chart):
                if not target.stratum_allowed(piece.stratum | M):
                    continue
                for v in gens:
                    if decay_along(piece.weight_expo, piece.poly, v) != "decays":
                        raise NotLocallyFinite(
                            "weighted piece has infinite mass toward a boundary stratum",
                            payload={"stratum": tuple(sorted(piece.stratum | M)),
                                     "ray": v,
                                     "piece": piece.key()})
        return mu
    if m.kind == "stratum_inclusion":
        return mu
    if m.kind == "projection":
        drop = set(m.drop_axes)
        n2 = mu.n - len(drop)
        keep = [i for i in range(mu.n) if i not in drop]
        atoms = []
        for a in mu.atoms:
            finite_axes = [i for i in range(mu.n) if i not in a.stratum]
            coords = tuple(c for i, c in zip(finite_axes, a.coords) if i not in drop)
            stratum = frozenset(keep.index(i) for i in a.stratum if i not in drop)
            atoms.append(Atom(stratum, coords, a.weight))
        if any(p for p in mu.pieces):
            raise NonMeasurePiece(
                "projection pushforward of densities is outside the implemented family",
                payload={"pieces": len(mu.pieces)})
        return PieceMeasure(n2, atoms, (), (), mu.scale, certify=False)
    raise ValueError(f"unknown image map kind {m.kind!r}")


def restrict_measure(mu, parts):
    """Restriction to a finite union of (stratum, polyhedron-or-None) parts.

    Parts are assumed pairwise disjoint (relatively open pieces within
    strata); restriction then summing over a partition reproduces the
    measure exactly.
    """
    if isinstance(parts, (frozenset, set)):
        parts = [(frozenset(parts), None)]
    atoms, pieces, ders = [], [], []
    for M, region in parts:
        M = frozenset(M)
        for a in mu.atoms:
            if a.stratum != M:
                continue
            if region is None or region.contains(a.coords):
                atoms.append(a)
        for p in mu.pieces:
            if p.stratum != M:
                continue
            if region is None:
                pieces.append(p)
            else:
                inter = p.poly.intersect(region)
                if not inter.is_empty():
                    pieces.append(Piece(M, inter, p.weight_poly, p.weight_expo, p.sign))
        for d in mu.derivative_atoms:
            if d.stratum != M:
                continue
            if region is None or region.contains(d.coords):
                ders.append(d)
    return PieceMeasure(mu.n, atoms, pieces, ders, mu.scale, certify=False)
