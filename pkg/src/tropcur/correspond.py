"""Invariant complex currents as tropical shadows; pushforward and lift.

An S- and F-invariant complex (p,p)-current with measure co-coefficients
S^{IJ} is stored through its shadow measures

    sigma^{IJ}(f) = S^{IJ}( z^{-I} zbar^{-J} trop^*(f) ),

PieceMeasures on the tropical side carrying an exact pi-power prefactor.
The pushforward relation T^{IJ} = pi^{-q} 2^{-2q} sigma^{IJ} and the lift
sigma^{IJ} = pi^q 2^{2q} T^{IJ} are exact rescalings of the prefactor, so
push_forward(lift(T)) returns bit-identical piece data.

Shadow validity (the boundary-weighted measures admit image Radon
measures) encodes local finiteness of |S^{IJ}| and is exactly the
C-finite-mass criterion of the Lagerberg side.  Kernel exemplars --
nonzero invariant currents annihilated by the pushforward -- are carried
as direct evaluators and demonstrate the failure of injectivity without
closedness.
"""

import math
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import currents as currents_mod
from .currents import (CurrentVerdict, LagerbergCurrent,
                       c_finite_test, canonical_decomposition, closedness_test,
                       positivity_check, _boundary_weighted)
from .errors import InvalidShadow, NotCFinite, NotPositive
from .fiber import subsets
from .measures import (ImageMap, OpenBox, PieceMeasure, image_measure)


class InvariantComplexCurrent:
    """Shadow representation of an S-, F-invariant complex (p,p)-current.

    ``shadows[(I, J)]`` are PieceMeasures with prefactor scale; the
    Hermitian flag records sigma^{IJ} = sigma^{JI}; ``kernel`` holds
    direct-evaluator exemplars annihilated by trop_*.
    """

    def __init__(self, chart, p, shadows=None, hermitian=True, kernel=(),
                 U=None, meta=None):
        self.chart = chart
        self.n = len(chart.basis)
        self.p = p
        self.q = self.n - p
        self.U = U if U is not None else OpenBox.whole_chart(chart)
        self.hermitian = hermitian
        self.kernel = tuple(kernel)
        self.meta = meta or {}
        self.shadows = {}
        for (I, J), mu in (shadows or {}).items():
            I, J = tuple(I), tuple(J)
            if len(I) != self.q or len(J) != self.q:
                raise ValueError(f"shadow key ({I},{J}) needs |I|=|J|={self.q}")
            if not mu.is_zero():
                self.shadows[(I, J)] = mu

    def shadow(self, I, J):
        return self.shadows.get((tuple(I), tuple(J)), PieceMeasure.zero(self.n))

    def is_zero(self):
        return not self.shadows and not self.kernel

    def canonical_key(self):
        return tuple(sorted((k, mu.canonical_key()) for k, mu in self.shadows.items()))

    def __eq__(self, other):
        if not isinstance(other, InvariantComplexCurrent):
            return NotImplemented
        if self.kernel or other.kernel:
            return self is other
        return (self.n, self.p) == (other.n, other.p) and \
            self.canonical_key() == other.canonical_key()

    def __repr__(self):
        extra = f", kernel={len(self.kernel)}" if self.kernel else ""
        return (f"InvariantComplexCurrent(({self.p},{self.p}) on n={self.n}, "
                f"{len(self.shadows)} shadows{extra})")


def validate_shadow(S):
    """Shadow validity: boundary-weighted measures admit image Radon measures.

    This is the complex-side local finiteness of |S^{IJ}| expressed in
    tropical coordinates; fails with the offending ray.
    """
    target = OpenBox.whole_chart(S.chart)
    for (I, J), mu in S.shadows.items():
        weighted = _boundary_weighted(mu, I, J, S.n)
        image_measure(weighted, ImageMap("open_inclusion", target))
    return True


def push_forward(S):
    """trop_* on shadows: T^{IJ} = pi^{-q} 2^{-2q} sigma^{IJ}, exactly.

    Kernel exemplars are annihilated; averaging is built into the shadow
    class, so trop_*(S) = trop_*(S^av) holds by construction.
    """
    try:
        validate_shadow(S)
    except Exception as err:
        raise InvalidShadow("shadow fails the local-finiteness validity check",
                            payload=getattr(err, "payload", None)) from err
    q = S.q
    factor = Fraction(1, 4 ** q)
    coco = {}
    for (I, J), mu in S.shadows.items():
        coco[(I, J)] = mu.with_scale(factor, -q)
    return LagerbergCurrent(S.chart, S.p, coco, S.U, meta=S.meta)


def lift(T, require=("closed", "positive"), samples=12, seed=0):
    """The inverse correspondence on closed positive currents.

    Checks positivity (and closedness when requested), then C-finite
    local mass; the lift's shadows are pi^q 2^{2q} times the
    co-coefficients, assembled stratum by stratum from the canonical
    decomposition, so the pushforward returns T with exact piece data.
    """
    if "positive" in require:
        v = positivity_check(T, samples=samples, seed=seed)
        if not v.yes:
            raise NotPositive("lift needs a positive current", payload=v.witness)
    if "closed" in require:
        cv = closedness_test(T, seed=seed)
        if not cv.closed:
            raise NotCFinite("lift of a non-closed current is not attempted",
                             payload={"residual": cv.residual})
    cf = c_finite_test(T)
    if not cf.yes:
        raise NotCFinite("current does not have C-finite local mass",
                         payload=cf.witness)
    q = T.q
    parts = canonical_decomposition(T, assume_positive=True)
    shadows = {}
    for M, part in parts.items():
        for (I, J), mu in part.cocoeffs.items():
            lifted = mu.with_scale(Fraction(4 ** q), q)
            key = (I, J)
            if key in shadows:
                shadows[key] = shadows[key] + lifted
            else:
                shadows[key] = lifted
    return InvariantComplexCurrent(T.chart, T.p, shadows, hermitian=True,
                                   U=T.U, meta=T.meta)


@dataclass
class RoundTripReport:
    total: int
    failures: list = dc_field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def __bool__(self):
        return self.ok


def round_trip_verify(suite, seed=0):
    """push_forward(lift(T)) = T with exact piece-data equality.

    Also spot-checks injectivity of the construction: lifting twice from
    re-normalized piece data yields identical shadow normal forms.
    """
    failures = []
    for t, T in enumerate(suite):
        try:
            S = lift(T, seed=seed)
            back = push_forward(S)
        except Exception as err:  # noqa: BLE001 - report, do not crash the suite
            failures.append((t, f"lift/push raised: {err!r}"))
            continue
        if back != T:
            failures.append((t, "pushforward of the lift differs from the input"))
            continue
        S2 = lift(back, seed=seed)
        if S2.canonical_key() != S.canonical_key():
            failures.append((t, "lift is not reproducible on equal inputs"))
    return RoundTripReport(len(suite), failures)


def complex_positivity_check(S, samples=25, seed=0, tol=1e-9,
                             lambda_grid=(0, Fraction(1, 2), 1, 2)):
    """Positivity of the complex current from its shadow data.

    Pointwise PSD test of the Hermitian density matrix built from the
    boundary-weighted shadow densities (the weights are a positive
    diagonal congruence, so this matches positivity of S), the total
    variation estimate on a lambda grid, and sampled evaluation against
    positive invariant pullback fields via the pushforward.
    """
    if S.kernel:
        raise InvalidShadow("kernel exemplars carry no positivity data")
    import numpy as np
    n, q = S.n, S.q
    idx = subsets(n, q)
    # (i) hermitian symmetry of the shadow matrix
    for (I, J) in list(S.shadows):
        if S.shadow(I, J) != S.shadow(J, I):
            return CurrentVerdict("no", "shadow matrix is not symmetric",
                                  witness=("asymmetry", (I, J)))
    rng = random.Random(seed)
    # (ii)+(iii): pointwise PSD of the weighted density matrix on sampled
    # points of every piece, plus the estimate on the lambda grid
    sample_pts = []
    for (I, J), mu in S.shadows.items():
        for piece in mu.pieces:
            for pt in piece.poly.sample_points(rng, max(3, samples // 4)):
                sample_pts.append((piece.stratum, pt))
        for atom in mu.atoms:
            sample_pts.append((atom.stratum, None, atom))
    for entry in sample_pts:
        if len(entry) == 3:
            stratum, _, atom = entry
            H = np.zeros((len(idx), len(idx)))
            for a, I in enumerate(idx):
                for b, J in enumerate(idx):
                    if set(I) & stratum or set(J) & stratum:
                        continue
                    mu = S.shadows.get((I, J))
                    if mu is None:
                        continue
                    w = sum(float(x.weight) for x in mu.atoms
                            if (x.stratum, x.coords) == (atom.stratum, atom.coords))
                    H[a, b] = w * mu.scale_float()
        else:
            stratum, pt = entry
            H = np.zeros((len(idx), len(idx)))
            for a, I in enumerate(idx):
                for b, J in enumerate(idx):
                    if set(I) & stratum or set(J) & stratum:
                        continue
                    mu = S.shadows.get((I, J))
                    if mu is None:
                        continue
                    H[a, b] = currents_mod._piece_value_at(mu, stratum, pt)
            # boundary weights: positive diagonal congruence
            alive = [i for i in range(n) if i not in stratum]
            w = {}
            for a, I in enumerate(idx):
                ww = 1.0
                for i in I:
                    if i in alive:
                        ww *= math.exp(-float(pt[alive.index(i)]))
                w[a] = ww
            for a in range(len(idx)):
                for b in range(len(idx)):
                    H[a, b] *= w[a] * w[b]
        H = (H + H.T) / 2
        lam = np.linalg.eigvalsh(H)
        scale = max(1.0, float(np.abs(H).max()))
        if lam.min() < -tol * scale:
            return CurrentVerdict("no", "weighted shadow density matrix not PSD",
                                  witness=("psd", entry[0], lam.min()))
        # eq-style estimate on the lambda grid
        for a in range(len(idx)):
            for b in range(len(idx)):
                if a == b:
                    continue
                for la in lambda_grid:
                    for lb in lambda_grid:
                        lhs = float(la) * float(lb) * abs(H[a, b])
                        rhs = 0.5 * (float(la) ** 2 * H[a, a]
                                     + float(lb) ** 2 * H[b, b])
                        if lhs > rhs + tol * scale:
                            return CurrentVerdict(
                                "no", "total-variation estimate fails",
                                witness=("estimate", (idx[a], idx[b])))
    # (iv) sampled evaluation through the pushforward on positive fields
    T = push_forward(S)
    v = positivity_check(T, samples=max(4, samples // 3), seed=seed)
    if not v.yes:
        return CurrentVerdict("no", "pushforward fails positivity: " + v.reason,
                              witness=v.witness)
    return CurrentVerdict("yes")


@dataclass
class CompatReport:
    ok: bool
    records: list = dc_field(default_factory=list)

    def __bool__(self):
        return self.ok


def compat_checks(S, samples=10, seed=0):
    """Structural compatibilities of the correspondence on a shadow current.

    (a) the canonical decomposition commutes with the pushforward,
    piece by piece; (b) supports match: the support descriptors of the
    shadows and of the pushforward agree; (c) in top degree the
    pushforward is the identity on the measure data (the measure-level
    bijection).
    """
    records = []
    ok = True
    T = push_forward(S)
    # (a) decomposition commutes
    parts_T = canonical_decomposition(T, assume_positive=True)
    total = None
    q = S.q
    factor = Fraction(1, 4 ** q)
    for M, mus in _shadow_decomposition(S).items():
        pushed = {k: mu.with_scale(factor, -q) for k, mu in mus.items()}
        cur = LagerbergCurrent(S.chart, S.p, pushed, S.U)
        ref = parts_T.get(M)
        good = (ref is not None and cur == ref) or (ref is None and cur.is_zero())
        records.append(("decomposition", tuple(sorted(M)), good))
        ok = ok and good
        total = cur if total is None else total + cur
    resum_good = (total or LagerbergCurrent(S.chart, S.p, {}, S.U)) == T
    records.append(("decomposition_resum", None, resum_good))
    ok = ok and resum_good
    # (b) support descriptors agree
    sup_S = _support_descriptor(S.shadows)
    sup_T = _support_descriptor(T.cocoeffs)
    good = sup_S == sup_T
    records.append(("support", None, good))
    ok = ok and good
    # (c) top degree: measure-level bijection
    if S.p == S.n:
        key = ((), ())
        sigma = S.shadow((), ())
        mu = T.cocoeff((), ())
        good = sigma.rescaled() == mu.rescaled() if q == 0 else False
        records.append(("top_degree", None, good))
        ok = ok and good
    return CompatReport(ok, records)


def _shadow_decomposition(S):
    from .measures import restrict_measure
    from .fields import _stratum_subsets
    out = {}
    for M in _stratum_subsets(S.chart):
        mus = {}
        for k, mu in S.shadows.items():
            part = restrict_measure(mu, frozenset(M))
            if not part.is_zero():
                mus[k] = part
        if mus:
            out[frozenset(M)] = mus
    return out


def _support_descriptor(measures):
    desc = set()
    for k, mu in measures.items():
        for a in mu.atoms:
            desc.add((k, "atom", tuple(sorted(a.stratum)), a.coords))
        for piece in mu.pieces:
            desc.add((k, "piece", tuple(sorted(piece.stratum)),
                      piece.poly.canonical_key()))
    return desc


def kernel_point_current(chart, description="point evaluation killed by trop_*"):
    """The projective-line exemplar: S(f dz ^ i dzbar) = f(0).

    Nonzero and invariant, but every pullback test form vanishes near the
    origin, so the pushforward is zero: injectivity fails without
    closedness.  Evaluation is provided on invariant-frame fields: the
    value is the coefficient limit lim_{u -> inf} pi e^{2u} c_11(u),
    computed symbolically on the coefficient family.
    """
    n = len(chart.basis)
    if n != 1:
        raise ValueError("the kernel exemplar lives on a one-dimensional chart")

    def evaluator(field):
        # field: InvariantComplexFormField of bidegree (1,1) in the scaled
        # frame; the honest coefficient f(z) of dz ^ i dzbar at z = 0 is
        # lim_{u->inf} pi e^{2u} (pi^{-1} c(u)) = lim e^{2u} c(u),
        # evaluated term by term on the coefficient family.
        fn = field.coeff.get(((0,), (0,)))
        if fn is None:
            return 0.0
        total = 0.0
        for poly, expo, wins in fn.terms:
            lin = expo.exps.get((1,), Fraction(0))
            const = expo.exps.get((0,), Fraction(0))
            window_dies = any(w.fn.vanishes_above() for w in wins)
            if window_dies or lin < -2:
                continue                      # term vanishes at infinity
            if lin > -2:
                raise ValueError("coefficient grows toward the boundary")
            if wins:
                raise ValueError("window factor has no symbolic limit at infinity")
            if any(sum(e) > 0 for e in poly.exps):
                raise ValueError("polynomial times e^{-2u} has no limit")
            deg0 = poly.exps.get((0,), Fraction(0))
            total += float(deg0) * math.exp(float(const))
        return total

    return InvariantComplexCurrent(chart, 0, {}, kernel=[evaluator],
                                   meta={"name": description})
