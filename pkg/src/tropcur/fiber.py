"""Exterior algebra of Lagerberg and complex (p,q)-forms at a single fiber.

Forms are stored as sparse coefficient dictionaries over ordered
multi-index pairs.  A Lagerberg (p,q)-form is a combination of
``d'u_I ^ d''u_J`` with real coefficients; a complex (p,q)-form is a
combination of ``du_I ^ dubar_K`` with complex coefficients.  All degree-1
generators anticommute; the basis convention keeps both index blocks
strictly increasing with no interleaving sign.

The positivity machinery follows the three nested cones: strongly
positive (conic hull of decomposable products), positive (characterized
exactly by positive semidefiniteness of the associated Gram form), and
weakly positive (dual of the strongly positive cone).  The positive tier
is decided exactly over the rationals; the outer tiers return certified
Yes/No answers where an exact argument exists and Unknown otherwise.
"""

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact
from .exact import QC, frac
from .errors import (DimensionMismatch, WrongAlgebra, NotSquareBidegree,
                     BidegreeMismatch)


# --- multi-index helpers -----------------------------------------------------

def merge_indices(a, b):
    """(sign, merged) for concatenating two increasing index tuples.

    Returns (0, None) when the tuples share an index.
    """
    if set(a) & set(b):
        return 0, None
    sign = 1
    merged = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] < b[j]:
            merged.append(a[i])
            i += 1
        else:
            merged.append(b[j])
            j += 1
            if (len(a) - i) % 2:
                sign = -sign
    merged.extend(a[i:])
    merged.extend(b[j:])
    return sign, tuple(merged)


def _complement(idx, n):
    return tuple(sorted(set(range(n)) - set(idx)))


def _sign_complement(K, n):
    sign, merged = merge_indices(K, _complement(K, n))
    return sign


def subsets(n, p):
    return [tuple(c) for c in itertools.combinations(range(n), p)]


# --- scalar dispatch ---------------------------------------------------------

def _is_exact(x):
    return isinstance(x, (int, Fraction, QC))


def _conj(x):
    if isinstance(x, QC):
        return x.conj()
    if isinstance(x, complex):
        return x.conjugate()
    return x


def _to_float(x):
    if isinstance(x, QC):
        return complex(x)
    return x


# --- form classes ------------------------------------------------------------

class _FiberForm:
    """Shared sparse-coefficient container; do not instantiate directly."""

    algebra = None

    def __init__(self, n, p, q, coeff=None):
        self.n = n
        self.p = p
        self.q = q
        self.coeff = {}
        for (I, J), c in (coeff or {}).items():
            I, J = tuple(I), tuple(J)
            if len(I) != p or len(J) != q:
                raise ValueError(f"index ({I},{J}) does not match bidegree ({p},{q})")
            if list(I) != sorted(set(I)) or list(J) != sorted(set(J)):
                raise ValueError(f"multi-indices must be strictly increasing: ({I},{J})")
            if any(i < 0 or i >= n for i in I + J):
                raise ValueError("index out of range")
            if self._nonzero(c):
                self.coeff[(I, J)] = c

    @staticmethod
    def _nonzero(c):
        if isinstance(c, QC):
            return bool(c)
        return c != 0

    def is_exact(self):
        return all(_is_exact(c) for c in self.coeff.values())

    def get(self, I, J):
        return self.coeff.get((tuple(I), tuple(J)), self._zero())

    def is_zero(self):
        return not self.coeff

    def __eq__(self, other):
        if not isinstance(other, _FiberForm) or self.algebra != other.algebra:
            return NotImplemented
        if (self.n, self.p, self.q) != (other.n, other.p, other.q):
            return False
        keys = set(self.coeff) | set(other.coeff)
        return all(self.get(*k) == other.get(*k) for k in keys)

    def __hash__(self):
        raise TypeError("fiber forms are not hashable")

    def _new(self, p, q, coeff):
        return type(self)(self.n, p, q, coeff)

    def __add__(self, other):
        assert type(other) is type(self) and (self.p, self.q) == (other.p, other.q)
        out = dict(self.coeff)
        for k, c in other.coeff.items():
            out[k] = out.get(k, self._zero()) + c
        return self._new(self.p, self.q, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s):
        return self._new(self.p, self.q, {k: self._mul_scalar(c, s) for k, c in self.coeff.items()})

    def __repr__(self):
        terms = ", ".join(f"{k}: {c}" for k, c in sorted(self.coeff.items())[:6])
        more = "..." if len(self.coeff) > 6 else ""
        return (f"{type(self).__name__}(n={self.n}, ({self.p},{self.q}), "
                f"{{{terms}{more}}})")


class LagerbergFiberForm(_FiberForm):
    """Real (p,q)-form on the basis d'u_I ^ d''u_J."""

    algebra = "lagerberg"

    @staticmethod
    def _zero():
        return 0

    @staticmethod
    def _mul_scalar(c, s):
        return c * s

    @staticmethod
    def basis_form(n, I, J, c=1):
        return LagerbergFiberForm(n, len(I), len(J), {(tuple(I), tuple(J)): c})

    @staticmethod
    def zero(n, p, q):
        return LagerbergFiberForm(n, p, q, {})


class ComplexFiberForm(_FiberForm):
    """Complex (p,q)-form on the basis du_I ^ dubar_K."""

    algebra = "complex"

    @staticmethod
    def _zero():
        return QC(0)

    @staticmethod
    def _mul_scalar(c, s):
        if isinstance(c, QC) or isinstance(s, QC):
            return QC.of(c) * QC.of(s) if _is_exact(c) and _is_exact(s) else _to_float(c) * _to_float(s)
        return c * s

    def __init__(self, n, p, q, coeff=None):
        norm = {}
        for k, c in (coeff or {}).items():
            if _is_exact(c):
                c = QC.of(c)
            norm[k] = c
        super().__init__(n, p, q, norm)

    @staticmethod
    def basis_form(n, I, K, c=QC(1)):
        return ComplexFiberForm(n, len(I), len(K), {(tuple(I), tuple(K)): c})

    @staticmethod
    def zero(n, p, q):
        return ComplexFiberForm(n, p, q, {})


def lagerberg_orientation(n):
    """tau_n = d'u_1 ^ d''u_1 ^ ... ^ d'u_n ^ d''u_n in the block basis."""
    full = tuple(range(n))
    sign = (-1) ** (n * (n - 1) // 2)
    return LagerbergFiberForm(n, n, n, {(full, full): sign})


def complex_orientation(n):
    """omega_n = du_1 ^ i dubar_1 ^ ... ^ du_n ^ i dubar_n."""
    full = tuple(range(n))
    c = QC.i_pow(n) * Fraction((-1) ** (n * (n - 1) // 2))
    return ComplexFiberForm(n, n, n, {(full, full): c})


# --- core operations ---------------------------------------------------------

def wedge(a, b):
    """Graded-anticommutative product of two fiber forms."""
    if type(a) is not type(b):
        raise WrongAlgebra("cannot wedge forms from different algebras")
    if a.n != b.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {b.n}")
    out = {}
    zero = a._zero()
    for (I1, J1), c1 in a.coeff.items():
        for (I2, J2), c2 in b.coeff.items():
            s_blocks = -1 if (len(I2) * len(J1)) % 2 else 1
            sI, I = merge_indices(I1, I2)
            if sI == 0:
                continue
            sJ, J = merge_indices(J1, J2)
            if sJ == 0:
                continue
            sgn = s_blocks * sI * sJ
            term = a._mul_scalar(a._mul_scalar(c1, c2), sgn)
            key = (I, J)
            out[key] = out.get(key, zero) + term
    return a._new(a.p + b.p, a.q + b.q, out)


def apply_involution(kind, a):
    """One of the three involutions: J (Lagerberg), conjugation or F (complex).

    J is the algebra homomorphism swapping d' and d''; conjugation is the
    antilinear involution with du -> dubar; F is the antilinear involution
    fixing du and negating dubar.
    """
    if kind == "J":
        if a.algebra != "lagerberg":
            raise WrongAlgebra("J acts on Lagerberg forms")
        out = {}
        for (I, J), c in a.coeff.items():
            sgn = -1 if (len(I) * len(J)) % 2 else 1
            out[(J, I)] = c * sgn
        return LagerbergFiberForm(a.n, a.q, a.p, out)
    if kind == "conjugation":
        if a.algebra != "complex":
            raise WrongAlgebra("conjugation acts on complex forms")
        out = {}
        for (I, K), c in a.coeff.items():
            sgn = -1 if (len(I) * len(K)) % 2 else 1
            out[(K, I)] = a._mul_scalar(_conj(c), sgn)
        return ComplexFiberForm(a.n, a.q, a.p, out)
    if kind == "F":
        if a.algebra != "complex":
            raise WrongAlgebra("F acts on complex forms")
        out = {}
        for (I, K), c in a.coeff.items():
            sgn = -1 if len(K) % 2 else 1
            out[(I, K)] = a._mul_scalar(_conj(c), sgn)
        return ComplexFiberForm(a.n, a.p, a.q, out)
    raise ValueError(f"unknown involution {kind!r}")


def embed_complex(a):
    """Algebra embedding d'u_j -> du_j, d''u_j -> i dubar_j.

    The image is exactly the F-fixed subspace; the Lagerberg orientation
    maps to the complex one.
    """
    if a.algebra != "lagerberg":
        raise WrongAlgebra("embed_complex takes a Lagerberg form")
    out = {}
    for (I, J), c in a.coeff.items():
        if _is_exact(c):
            out[(I, J)] = QC.i_pow(len(J)) * QC.of(c)
        else:
            out[(I, J)] = (1j ** (len(J) % 4)) * c
    return ComplexFiberForm(a.n, a.p, a.q, out)


def embed_preimage(w):
    """Inverse of embed_complex on the F-fixed subspace; None if not fixed."""
    if w.algebra != "complex":
        raise WrongAlgebra("embed_preimage takes a complex form")
    if apply_involution("F", w) != w:
        return None
    out = {}
    for (I, K), c in w.coeff.items():
        q = len(K)
        val = QC.i_pow(-q % 4) * QC.of(c) if _is_exact(c) else c * (1j ** ((-q) % 4))
        if _is_exact(c):
            if val.im != 0:
                return None
            out[(I, K)] = val.re
        else:
            out[(I, K)] = val.real
    return LagerbergFiberForm(w.n, w.p, w.q, out)


@dataclass
class GramForm:
    """Square matrix of a (p,p)-form on the p-subset basis."""
    indices: tuple
    matrix: list
    kind: str                 # 'symmetric', 'hermitian' or 'none'

    def rank_exact(self):
        return exact.rank([[m.re if isinstance(m, QC) else m for m in row]
                           for row in self.matrix]) if self.kind != "hermitian" else None


def gram_form(a):
    """Bilinear/sesquilinear form |a| of a (p,p)-form as an explicit matrix.

    M[K][L] = (-1)^{p(p-1)/2} coeff[K,L] in the Lagerberg case and
    (-1)^{p(p-1)/2} i^{-p} coeff[K,L] in the complex case; ``kind`` records
    the verified symmetry (symmetric iff the form is symmetric, hermitian
    iff the complex form is real).
    """
    if a.p != a.q:
        raise NotSquareBidegree(f"bidegree ({a.p},{a.q}) is not (p,p)")
    p, n = a.p, a.n
    idx = subsets(n, p)
    pos = {K: t for t, K in enumerate(idx)}
    m = len(idx)
    sgn = (-1) ** (p * (p - 1) // 2)
    if a.algebra == "lagerberg":
        mat = [[a._zero() for _ in range(m)] for _ in range(m)]
        for (K, L), c in a.coeff.items():
            mat[pos[K]][pos[L]] = c * sgn
        symm = all(mat[i][j] == mat[j][i] for i in range(m) for j in range(i))
        return GramForm(tuple(idx), mat, "symmetric" if symm else "none")
    factor = QC.i_pow((-p) % 4) * Fraction(sgn)
    mat = [[QC(0) for _ in range(m)] for _ in range(m)]
    inexact = not a.is_exact()
    if inexact:
        mat = [[0j for _ in range(m)] for _ in range(m)]
    for (K, L), c in a.coeff.items():
        val = factor * c if not inexact else complex(factor) * _to_float(c)
        mat[pos[K]][pos[L]] = val
    herm = all(mat[i][j] == _conj(mat[j][i]) for i in range(m) for j in range(i + 1))
    return GramForm(tuple(idx), mat, "hermitian" if herm else "none")


def dual_pairing(a, b):
    """<a, b> defined by a ^ b = <a, b> tau_n (resp. omega_n)."""
    if a.p != a.q or b.p != b.q:
        raise NotSquareBidegree("pairing needs (p,p) x (q,q) forms")
    if a.p + b.p != a.n:
        raise BidegreeMismatch(f"bidegrees ({a.p},{a.p}) and ({b.p},{b.p}) "
                               f"do not pair in dimension {a.n}")
    w = wedge(a, b)
    full = tuple(range(a.n))
    top = w.get(full, full)
    n = a.n
    sgn = (-1) ** (n * (n - 1) // 2)
    if a.algebra == "lagerberg":
        return top * sgn
    # omega_n coefficient is i^n * sgn
    if isinstance(top, QC):
        return QC.i_pow((-n) % 4) * Fraction(sgn) * top
    return top / ((1j ** (n % 4)) * sgn)


# --- positivity ---------------------------------------------------------------

@dataclass
class PositivityVerdict:
    """Outcome of a positivity test at one of the three tiers.

    ``answer`` is 'yes', 'no' or 'unknown'.  Yes answers carry a
    certificate that re-verifies exactly; no answers carry a witness with
    a strictly negative exact pairing (or a structural reason such as a
    failed symmetry check).
    """
    tier: str
    answer: str
    certificate: object = None
    witness: object = None
    reason: str = ""

    @property
    def yes(self):
        return self.answer == "yes"

    @property
    def no(self):
        return self.answer == "no"


def is_symmetric(a):
    """J a = (-1)^p a for a Lagerberg (p,p)-form."""
    return apply_involution("J", a) == a.scale((-1) ** a.p)


def is_real(a):
    """conj a = a for a complex form."""
    return apply_involution("conjugation", a) == a


def positive_generator(alpha):
    """(-1)^{p(p-1)/2} alpha ^ J(alpha) from a Lagerberg (p,0)-form."""
    s = (-1) ** (alpha.p * (alpha.p - 1) // 2)
    return wedge(alpha, apply_involution("J", alpha)).scale(s)


def positive_generator_complex(alpha):
    """i^{p^2} alpha ^ conj(alpha) from a complex (p,0)-form."""
    w = wedge(alpha, apply_involution("conjugation", alpha))
    if w.is_exact():
        return w.scale(QC.i_pow((alpha.p * alpha.p) % 4))
    return w.scale(1j ** ((alpha.p * alpha.p) % 4))


def strong_generator(vectors, n, algebra="lagerberg"):
    """a_1 ^ J a_1 ^ ... ^ a_p ^ J a_p from degree-one coefficient vectors.

    In the complex case the factors are alpha_j ^ i conj(alpha_j).
    """
    acc = None
    for v in vectors:
        if algebra == "lagerberg":
            one = LagerbergFiberForm(n, 1, 0, {((j,), ()): c for j, c in enumerate(v) if c})
            factor = wedge(one, apply_involution("J", one))
        else:
            one = ComplexFiberForm(n, 1, 0, {((j,), ()): QC.of(c) for j, c in enumerate(v) if QC.of(c)})
            factor = wedge(one, apply_involution("conjugation", one))
            factor = factor.scale(QC(0, 1))
        acc = factor if acc is None else wedge(acc, factor)
    if acc is None:
        return (lagerberg_orientation(n).scale(0) if algebra == "lagerberg"
                else complex_orientation(n).scale(0))
    return acc


def coordinate_strong_generators(n, p, algebra="lagerberg"):
    gens = []
    for I in subsets(n, p):
        vecs = [tuple(int(j == i) for j in range(n)) for i in I]
        gens.append((strong_generator(vecs, n, algebra), ("coordinate", I)))
    return gens


def strong_generator_pool(n, p, size=10_000, seed=0, algebra="lagerberg", hints=()):
    """Seeded random decomposable generators plus all coordinate ones."""
    rng = random.Random(seed)
    pool = coordinate_strong_generators(n, p, algebra)
    for g in hints:
        pool.append((g, ("hint",)))
    while len(pool) < size:
        vecs = []
        for _ in range(p):
            v = tuple(rng.randint(-3, 3) for _ in range(n))
            vecs.append(v)
        g = strong_generator(vecs, n, algebra)
        if not g.is_zero():
            pool.append((g, ("random", tuple(vecs))))
    return pool


def _phi_inverse(x_coeffs, n, p, algebra):
    """(q,0)-form alpha with phi(alpha) = x for x over the p-subset basis.

    phi : Lambda^q V' -> Lambda^p V is the contraction against the full
    top form; alpha = sum_K x_K sign(K, K^c) (d'u_{K^c}).
    """
    out = {}
    for K, c in x_coeffs.items():
        if not _FiberForm._nonzero(c):
            continue
        sgn, _ = merge_indices(K, _complement(K, n))
        key = (_complement(K, n), ())
        if algebra == "lagerberg":
            out[key] = c * sgn
        else:
            out[key] = QC.of(c) * Fraction(sgn) if _is_exact(c) else c * sgn
    q = n - p
    if algebra == "lagerberg":
        return LagerbergFiberForm(n, q, 0, out)
    return ComplexFiberForm(n, q, 0, out)


def _gram_psd_exact(a):
    """(PSDResult, gram) for an exact (p,p)-form."""
    g = gram_form(a)
    if a.algebra == "lagerberg":
        return exact.psd_decompose([[Fraction(x) for x in row] for row in g.matrix]), g
    return exact.psd_decompose_qc(g.matrix), g


def _positive_tier(a, tol):
    """Exact (or float-tolerance) PSD decision of the Gram form."""
    n, p = a.n, a.p
    if a.algebra == "lagerberg" and not is_symmetric(a):
        return PositivityVerdict("positive", "no", reason="not symmetric")
    if a.algebra == "complex" and not is_real(a):
        return PositivityVerdict("positive", "no", reason="not real")
    if not a.is_exact():
        g = gram_form(a)
        m = np.array([[complex(_to_float(x)) for x in row] for row in g.matrix])
        lam = np.linalg.eigvalsh((m + m.conj().T) / 2)
        scale = max(1.0, float(np.abs(m).max()))
        if lam.min() >= -tol * scale:
            return PositivityVerdict("positive", "yes", reason="float PSD",
                                     certificate=("eigvals", lam.tolist()))
        return PositivityVerdict("positive", "no", reason="float eigenvalue",
                                 witness=("eigval", float(lam.min())))
    res, g = _gram_psd_exact(a)
    idx = g.indices
    if res.psd:
        cert = []
        for gamma, v in res.decomposition:
            coeffs = {idx[t]: v[t] for t in range(len(idx)) if _FiberForm._nonzero(v[t])}
            cert.append((gamma, coeffs))
        return PositivityVerdict("positive", "yes", certificate=("decomposition", cert))
    x = {idx[t]: res.witness[t] for t in range(len(idx))}
    alpha = _phi_inverse(x, n, p, a.algebra)
    if a.algebra == "lagerberg":
        dual = positive_generator(alpha)
    else:
        dual = positive_generator_complex(alpha)
    return PositivityVerdict("positive", "no", witness=("dual_form", dual),
                             reason="Gram form not PSD")


def _reconstruct_from_cert(n, p, cert, algebra):
    acc = None
    for gamma, coeffs in cert:
        if algebra == "lagerberg":
            alpha = LagerbergFiberForm(n, p, 0, {(K, ()): c for K, c in coeffs.items()})
            g = positive_generator(alpha).scale(gamma)
        else:
            alpha = ComplexFiberForm(n, p, 0, {(K, ()): QC.of(c) for K, c in coeffs.items()})
            g = positive_generator_complex(alpha).scale(Fraction(gamma))
        acc = g if acc is None else acc + g
    return acc


def _pairing_polynomial(a):
    """<a, strong generator> as an exact polynomial in the generator data.

    Variables are the p*n coordinates of the vectors a_1 .. a_p building
    the strong (q,q)-generator; identically zero or even-positive
    polynomials give exact weak-positivity certificates.
    """
    from .coeffs import Poly
    n, p = a.n, a.p
    q = n - p
    # symbolic strong generator of bidegree (q,q): product over j of
    # sum_{i,k} x_{j,i} x_{j,k} d'u_i ^ d''u_k
    nv = q * n

    def var(j, i):
        e = [0] * nv
        e[j * n + i] = 1
        return Poly({tuple(e): Fraction(1)})

    acc = {((), ()): Poly.const(1, nv)}
    for j in range(q):
        new = {}
        for (I1, J1), poly in acc.items():
            for i in range(n):
                for k in range(n):
                    s_blocks = -1 if len(J1) % 2 else 1
                    sI, I = merge_indices(I1, (i,))
                    if sI == 0:
                        continue
                    sJ, J = merge_indices(J1, (k,))
                    if sJ == 0:
                        continue
                    term = poly * var(j, i) * var(j, k)
                    sgn = s_blocks * sI * sJ
                    key = (I, J)
                    prev = new.get(key)
                    contrib = term.scale(sgn)
                    new[key] = contrib if prev is None else prev + contrib
        acc = new
    # pair: <a, G> = sum over complementary indices with the wedge sign
    full = tuple(range(n))
    out = Poly.zero(nv)
    top_sign = (-1) ** (n * (n - 1) // 2)
    for (I1, J1), c in a.coeff.items():
        key = (_complement(I1, n), _complement(J1, n))
        poly = acc.get(key)
        if poly is None:
            continue
        s_blocks = -1 if (len(key[0]) * len(J1)) % 2 else 1
        sI, _ = merge_indices(I1, key[0])
        sJ, _ = merge_indices(J1, key[1])
        sgn = s_blocks * sI * sJ * top_sign
        out = out + poly.scale(Fraction(c) * sgn)
    return out


def _strong_no_via_kernel(a, psd_res, gram):
    """For p = 2: decide if the Gram row space contains real decomposables.

    Any decomposition of a positive form uses (p,0)-parts inside the row
    space W of its Gram form; if W (dim <= 2) contains no nonzero real
    decomposable, the form cannot be strongly positive.  Returns
    (verdict_or_None, obstruction_data).
    """
    n, p = a.n, a.p
    if p != 2 or a.algebra != "lagerberg":
        return None, None
    basis = [v for _, v in psd_res.decomposition]
    if len(basis) > 2:
        return None, None
    idx = gram.indices
    forms = []
    for v in basis:
        coeffs = {(idx[t], ()): v[t] for t in range(len(idx)) if v[t] != 0}
        forms.append(LagerbergFiberForm(n, p, 0, coeffs))
    if len(forms) == 1:
        w = forms[0]
        sq = wedge(w, w)
        if sq.is_zero():
            return None, None       # decomposable: fall through to LP
        return PositivityVerdict(
            "strong", "no",
            witness=("kernel_obstruction", {"basis": [f.coeff for f in forms],
                                            "quadratic": None}),
            reason="Gram row space is a line with no decomposable element"), None
    if len(forms) == 0:
        return None, None
    w1, w2 = forms
    # alpha = y w1 + z w2 decomposable iff alpha ^ alpha = 0
    q11 = wedge(w1, w1)
    q12 = wedge(w1, w2) + wedge(w2, w1)
    q22 = wedge(w2, w2)
    keys = set(q11.coeff) | set(q12.coeff) | set(q22.coeff)
    quadratics = []
    for k in keys:
        A, B, C = q11.get(*k), q12.get(*k), q22.get(*k)
        if A or B or C:
            quadratics.append((Fraction(A), Fraction(B), Fraction(C)))
    if not quadratics:
        return None, None           # every element decomposable
    if _binary_system_has_real_root(quadratics):
        return None, None
    data = {"basis": [f.coeff for f in forms], "quadratics": quadratics}
    return PositivityVerdict("strong", "no", witness=("kernel_obstruction", data),
                             reason="no real decomposable in the Gram row space"), data


def _binary_system_has_real_root(quadratics):
    """Common nonzero real root of binary quadratics A y^2 + B yz + C z^2."""
    A0, B0, C0 = quadratics[0]
    roots = []       # projective roots as (y, z) pairs over Q(sqrt(D))
    if A0 == 0:
        roots.append((Fraction(1), Fraction(0), Fraction(0), Fraction(0), Fraction(0)))
        if B0 == 0 and C0 == 0:
            return True  # identically zero first quadratic: give up conservatively
        if B0 != 0:
            roots.append((-C0, Fraction(0), B0, Fraction(0), Fraction(0)))
        elif C0 == 0:
            pass
    else:
        D = B0 * B0 - 4 * A0 * C0
        if D < 0:
            return False
        # y/z = (-B +- sqrt(D)) / (2A); represent y = -B +- sqrt(D), z = 2A
        roots.append((-B0, Fraction(1), 2 * A0, Fraction(0), D))
        roots.append((-B0, Fraction(-1), 2 * A0, Fraction(0), D))

    def eval_quadratic(qd, root):
        Aq, Bq, Cq = qd
        ya, yb, za, zb, D = root
        # y = ya + yb sqrt(D), z = za + zb sqrt(D); compute A y^2 + B y z + C z^2
        def mul(p1, p2):
            (a1, b1), (a2, b2) = p1, p2
            return (a1 * a2 + b1 * b2 * D, a1 * b2 + a2 * b1)

        y2 = mul((ya, yb), (ya, yb))
        z2 = mul((za, zb), (za, zb))
        yz = mul((ya, yb), (za, zb))
        tot = (Aq * y2[0] + Bq * yz[0] + Cq * z2[0],
               Aq * y2[1] + Bq * yz[1] + Cq * z2[1])
        return tot == (0, 0)

    for root in roots:
        ya, yb, za, zb, D = root
        if (ya, yb) == (0, 0) and (za, zb) == (0, 0):
            continue
        if all(eval_quadratic(qd, root) for qd in quadratics):
            return True
    return False


def _strong_lp_certificate(a, pool):
    """Exact conic-combination certificate over the pool via LP + rational fit."""
    from scipy.optimize import linprog
    keys = sorted(set().union(*[set(g.coeff) for g, _ in pool]) | set(a.coeff))
    if not keys:
        return None

    def vec(form):
        out = []
        for k in keys:
            c = form.get(*k)
            if isinstance(c, QC):
                out.extend([float(c.re), float(c.im)])
            else:
                out.append(float(c))
        return out

    A_eq = np.array([vec(g) for g, _ in pool]).T
    b_eq = np.array(vec(a))
    res = linprog(c=np.zeros(len(pool)), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * len(pool), method="highs")
    if not res.success:
        return None
    support = [j for j, x in enumerate(res.x) if x > 1e-9]
    if not support:
        support = []
    # exact refit on the support
    rows = []
    rhs = []
    for k in keys:
        target = a.get(*k)
        if isinstance(target, QC):
            rows.append([QC.of(pool[j][0].get(*k)).re for j in support])
            rhs.append(target.re)
            rows.append([QC.of(pool[j][0].get(*k)).im for j in support])
            rhs.append(target.im)
        else:
            rows.append([Fraction(pool[j][0].get(*k)) for j in support])
            rhs.append(Fraction(target))
    if not support:
        return [] if all(x == 0 for x in rhs) else None
    sol = exact.solve(rows, rhs)
    if sol is None or any(x < 0 for x in sol):
        return None
    cert = [(sol[t], pool[support[t]][1], pool[support[t]][0])
            for t in range(len(support)) if sol[t] != 0]
    # verify exactly
    acc = None
    for lam, _, g in cert:
        gg = g.scale(lam)
        acc = gg if acc is None else acc + gg
    target = a
    if acc is None:
        return cert if target.is_zero() else None
    return cert if acc == target else None


def positivity_verdict(a, tier, *, seed=0, pool_size=2000, hints=(),
                       dual_certificate=None, tol=1e-9):
    """Three-tier positivity decision with certificates.

    tier='positive' is always decided (exactly for rational data).
    tier='strong' delegates to 'positive' for p in {0,1,n-1,n}; otherwise
    it searches an explicit conic decomposition over a generator pool and
    can return No via the decomposable-obstruction argument, else Unknown.
    tier='weak' requires symmetry, pairs against the strong pool for a No
    witness, and says Yes only on an exact dual argument.
    """
    if a.p != a.q:
        raise NotSquareBidegree(f"bidegree ({a.p},{a.q}) is not (p,p)")
    n, p = a.n, a.p
    boundary = p in (0, 1, n - 1, n)
    if tier == "positive":
        return _positive_tier(a, tol)

    if tier == "strong":
        if boundary:
            v = _positive_tier(a, tol)
            return PositivityVerdict("strong", v.answer, certificate=v.certificate,
                                     witness=v.witness,
                                     reason=v.reason or "tier equivalence p in {0,1,n-1,n}")
        base = _positive_tier(a, tol)
        if base.no:
            return PositivityVerdict("strong", "no", witness=base.witness,
                                     reason="not even positive: " + base.reason)
        if a.is_exact():
            psd_res, g = _gram_psd_exact(a)
            verdict, _ = _strong_no_via_kernel(a, psd_res, g)
            if verdict is not None:
                return verdict
        pool = strong_generator_pool(n, p, pool_size, seed, a.algebra, hints)
        cert = _strong_lp_certificate(a, pool) if a.is_exact() else None
        if cert is not None:
            return PositivityVerdict("strong", "yes", certificate=("conic", cert))
        return PositivityVerdict("strong", "unknown",
                                 reason="no certificate over the generator pool")

    if tier == "weak":
        if a.algebra == "lagerberg" and not is_symmetric(a):
            return PositivityVerdict("weak", "no", reason="not symmetric")
        if a.algebra == "complex" and not is_real(a):
            return PositivityVerdict("weak", "no", reason="not real")
        if boundary:
            v = _positive_tier(a, tol)
            return PositivityVerdict("weak", v.answer, certificate=v.certificate,
                                     witness=v.witness,
                                     reason=v.reason or "tier equivalence p in {0,1,n-1,n}")
        q = n - p
        pool = strong_generator_pool(n, q, pool_size, seed, a.algebra, hints)
        for g, tag in pool:
            val = dual_pairing(a, g)
            if isinstance(val, QC):
                neg = val.re < 0 if val.im == 0 else False
            elif isinstance(val, complex):
                neg = val.real < -tol
            else:
                neg = val < 0 if _is_exact(val) else val < -tol
            if neg:
                return PositivityVerdict("weak", "no", witness=("generator", tag, g),
                                         reason="negative pairing with a strongly positive form")
        if dual_certificate is not None:
            return PositivityVerdict("weak", "yes", certificate=("user", dual_certificate))
        if a.is_exact() and a.algebra == "lagerberg":
            poly = _pairing_polynomial(a)
            if poly.is_zero():
                return PositivityVerdict("weak", "yes",
                                         certificate=("pairing_polynomial_zero",),
                                         reason="pairing with every strong generator vanishes identically")
            if poly.is_even_nonnegative():
                return PositivityVerdict("weak", "yes",
                                         certificate=("pairing_polynomial_even_positive", poly),
                                         reason="pairing polynomial is a nonnegative combination of squares of monomials")
        return PositivityVerdict("weak", "unknown",
                                 reason="no exact dual argument applies")

    raise ValueError(f"unknown tier {tier!r}")


def reverify(a, verdict):
    """Exact re-check of a verdict's certificate or witness; bool."""
    if verdict.answer == "unknown":
        return True
    if verdict.answer == "yes":
        cert = verdict.certificate
        if cert is None:
            return False
        kind = cert[0]
        if kind == "decomposition":
            rec = _reconstruct_from_cert(a.n, a.p, cert[1], a.algebra)
            if rec is None:
                return a.is_zero()
            return rec == a
        if kind == "conic":
            acc = None
            for lam, _, g in cert[1]:
                gg = g.scale(lam)
                acc = gg if acc is None else acc + gg
            return (acc == a) if acc is not None else a.is_zero()
        if kind == "pairing_polynomial_zero":
            return _pairing_polynomial(a).is_zero()
        if kind == "pairing_polynomial_even_positive":
            return _pairing_polynomial(a).is_even_nonnegative()
        if kind in ("eigvals", "user"):
            return True
        return False
    # No answers
    w = verdict.witness
    if w is None:
        # structural reason (symmetry/reality failure)
        if "symmetric" in verdict.reason:
            return not is_symmetric(a)
        if "real" in verdict.reason:
            return not is_real(a)
        return False
    kind = w[0]
    if kind == "dual_form":
        val = dual_pairing(a, w[1])
        if isinstance(val, QC):
            return val.im == 0 and val.re < 0
        return val < 0
    if kind == "generator":
        val = dual_pairing(a, w[2])
        if isinstance(val, QC):
            return val.im == 0 and val.re < 0
        return val < 0
    if kind == "kernel_obstruction":
        data = w[1]
        if data.get("quadratics"):
            return not _binary_system_has_real_root(data["quadratics"])
        return True
    if kind == "eigval":
        return w[1] < 0
    return False


def decomposable_test(a):
    """'yes'/'no'/'unknown' for decomposability of a (p,0)-form.

    p = 2 uses the exact alternating-square criterion (the single Plucker
    relation in dimension 4 and its general-n analogue); other p use the
    exact support-space rank test.
    """
    if a.q != 0:
        raise NotSquareBidegree("decomposable_test needs a (p,0)-form")
    n, p = a.n, a.p
    if a.is_zero() or p <= 1 or p == n:
        return "yes"
    if not a.is_exact():
        return "unknown"
    if p == 2:
        return "yes" if wedge(a, a).is_zero() else "no"
    # support space: spans of contractions against (p-1)-subsets
    rows = []
    for S in subsets(n, p - 1):
        row = [Fraction(0)] * n
        for j in range(n):
            if j in S:
                continue
            sgn, merged = merge_indices(S, (j,))
            c = a.get(merged, ())
            if c:
                row[j] = Fraction(c) * sgn
        rows.append(row)
    dim = exact.rank(rows)
    if dim == p:
        return "yes"
    if dim > p:
        return "no"
    return "unknown"
