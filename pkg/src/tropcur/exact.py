"""Exact linear algebra over the rationals and integers.

Small dense routines used everywhere in the package: fraction-valued
Gaussian elimination, Hermite normal form and basis completion over Z,
an LDL^T positive-semidefiniteness decision with certificates, and Sturm
root counting for sign certification of univariate polynomials.

Matrices are lists of lists of ``int``/``Fraction``; vectors are tuples.
Everything here is pure and deterministic.
"""

from fractions import Fraction
from math import gcd


def frac(x):
    """Coerce ints, Fractions and 'p/q' strings (ASCII or U+2212 minus)."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.replace("−", "-").replace(" ", ""))
    if isinstance(x, float) and x == int(x):
        return Fraction(int(x))
    raise TypeError(f"not an exact scalar: {x!r}")


def mat_copy(m):
    return [list(row) for row in m]


def mat_mul_vec(m, v):
    return tuple(sum(mij * vj for mij, vj in zip(row, v)) for row in m)


def mat_mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def det(m):
    """Determinant by fraction-free-ish Gaussian elimination."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        out *= a[c][c]
        inv = 1 / a[c][c]
        for r in range(c + 1, n):
            if a[r][c] != 0:
                f = a[r][c] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return sign * out


def solve(m, rhs):
    """Solve m x = rhs exactly; returns None if inconsistent.

    For underdetermined systems returns one particular solution with free
    variables set to zero.
    """
    rows, cols = len(m), len(m[0]) if m else 0
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(m)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if a[i][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = a[i][cols]
    return tuple(x)


def rank(m):
    if not m:
        return 0
    a = [[Fraction(x) for x in row] for row in m]
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


def nullspace(m):
    """Rational basis of the right kernel of m (list of tuples)."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [[Fraction(x) for x in row] for row in m]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * cols
        v[fcol] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -a[i][fcol]
        basis.append(tuple(v))
    return basis


def primitive(v):
    """Scale a rational vector to a primitive integer vector (same ray)."""
    v = [Fraction(x) for x in v]
    if all(x == 0 for x in v):
        return tuple(0 for _ in v)
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)


# --- integer lattice routines --------------------------------------------

def hnf_columns(mat):
    """Column-style Hermite normal form of an integer matrix.

    Returns (h, u) with h = mat @ u, u unimodular, h lower triangular with
    nonnegative entries left of the pivot column.  ``mat`` is n x k given as
    list of rows.
    """
    n = len(mat)
    k = len(mat[0]) if n else 0
    h = [list(map(int, row)) for row in mat]
    u = [[int(i == j) for j in range(k)] for i in range(k)]

    def col(j):
        return [h[i][j] for i in range(n)]

    def addmul_col(dst, src, f):
        for i in range(n):
            h[i][dst] += f * h[i][src]
        for i in range(k):
            u[i][dst] += f * u[i][src]

    def swap_col(a, b):
        for i in range(n):
            h[i][a], h[i][b] = h[i][b], h[i][a]
        for i in range(k):
            u[i][a], u[i][b] = u[i][b], u[i][a]

    def neg_col(a):
        for i in range(n):
            h[i][a] = -h[i][a]
        for i in range(k):
            u[i][a] = -u[i][a]

    r = 0
    for i in range(n):
        # eliminate along row i among columns >= r via gcd steps
        while True:
            nz = [j for j in range(r, k) if h[i][j] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda j: abs(h[i][j]))
            j0 = nz[0]
            for j in nz[1:]:
                q = h[i][j] // h[i][j0]
                addmul_col(j, j0, -q)
        nz = [j for j in range(r, k) if h[i][j] != 0]
        if not nz:
            continue
        j0 = nz[0]
        if j0 != r:
            swap_col(r, j0)
        if h[i][r] < 0:
            neg_col(r)
        for j in range(r):
            q = h[i][j] // h[i][r]
            if q != 0:
                addmul_col(j, r, -q)
        r += 1
        if r == k:
            break
    return h, u


def lattice_saturated(gens):
    """True if independent integer vectors generate a saturated sublattice.

    Saturated means they extend to a Z-basis: all elementary divisors 1,
    equivalently the gcd of the maximal minors is 1.
    """
    k = len(gens)
    if k == 0:
        return True
    n = len(gens[0])
    from itertools import combinations
    g = 0
    rows = [list(map(int, v)) for v in gens]
    for sel in combinations(range(n), k):
        sub = [[rows[i][j] for j in sel] for i in range(k)]
        g = gcd(g, abs(int(det(sub))))
        if g == 1:
            return True
    return g == 1


def extend_to_basis(gens, n):
    """Deterministically extend saturated integer vectors to a Z-basis.

    Appends standard basis vectors e_1, e_2, ... greedily, keeping the
    collection saturated, until n vectors are present.  Raises ValueError
    when ``gens`` themselves are not part of a basis.
    """
    cur = [tuple(map(int, v)) for v in gens]
    if rank(cur) != len(cur) or not lattice_saturated(cur):
        raise ValueError("generators do not extend to a lattice basis")
    for i in range(n):
        if len(cur) == n:
            break
        e = tuple(int(j == i) for j in range(n))
        trial = cur + [e]
        if rank(trial) == len(trial) and lattice_saturated(trial):
            cur = trial
    if len(cur) != n:
        raise ValueError("could not complete lattice basis")
    return cur


def integer_kernel_basis(mat):
    """Basis of the integer kernel {x in Z^k : mat x = 0}, saturated."""
    rat = nullspace(mat)
    if not rat:
        return []
    prim = [primitive(v) for v in rat]
    # saturate: HNF of the column span of prim inside Z^k restricted to the
    # kernel subspace; for our small cases primitivizing a triangularized
    # basis suffices.
    k = len(prim[0])
    h, _ = hnf_columns([[prim[j][i] for j in range(len(prim))] for i in range(k)])
    cols = []
    for j in range(len(prim)):
        c = tuple(h[i][j] for i in range(k))
        if any(c):
            cols.append(c)
    # the HNF columns generate the same lattice as prim; saturate by solving
    # from the rational side: divide each by gcd (already primitive per col).
    return [primitive(c) for c in cols]


# --- Gaussian rationals ------------------------------------------------------

class QC:
    """Exact complex scalar with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, (int, Fraction)) else frac(re)
        self.im = im if isinstance(im, (int, Fraction)) else frac(im)

    @staticmethod
    def of(x):
        if isinstance(x, QC):
            return x
        if isinstance(x, (int, Fraction)):
            return QC(x, 0)
        if isinstance(x, str):
            return QC(frac(x), 0)
        raise TypeError(f"not an exact complex scalar: {x!r}")

    @staticmethod
    def i_pow(k):
        k %= 4
        return (QC(1), QC(0, 1), QC(-1), QC(0, -1))[k]

    def __add__(self, other):
        other = QC.of(other)
        return QC(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QC(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-QC.of(other))

    def __rsub__(self, other):
        return QC.of(other) + (-self)

    def __mul__(self, other):
        other = QC.of(other)
        return QC(self.re * other.re - self.im * other.im,
                  self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conj(self):
        return QC(self.re, -self.im)

    def __eq__(self, other):
        try:
            other = QC.of(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((Fraction(self.re), Fraction(self.im)))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"{self.re}"
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


def psd_decompose_qc(m):
    """Exact PSD decision for a Hermitian matrix with QC entries.

    Returns PSDResult with QC decomposition vectors (M = sum d v conj(v)^T)
    or a QC witness vector with conj(x)^T M x < 0.
    """
    n = len(m)
    a = [[QC.of(m[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        if a[i][i].im != 0:
            return PSDResult(False, witness=tuple(
                QC(1) if t == i else QC(0) for t in range(n)))
        for j in range(i):
            if a[i][j] != a[j][i].conj():
                raise ValueError("matrix not Hermitian")
    decomp = []
    pivots = []
    active = list(range(n))

    def orthogonalize(x):
        x = list(x)
        for pivot_d, (_, v) in reversed(list(zip(pivots, decomp))):
            # want v^H x = 0
            corr = QC(0)
            for vi, xi in zip(v, x):
                corr = corr + vi.conj() * xi
            x[pivot_d] = x[pivot_d] - corr
        return tuple(x)

    while active:
        d = next((idx for idx in active if a[idx][idx]), None)
        if d is None:
            for i in active:
                for j in active:
                    if i != j and a[i][j]:
                        # a_ii = a_jj = 0, a_ij = s: x_i = -s, x_j = 1 gives
                        # conj(x)^T M x = -2|s|^2 < 0
                        x = [QC(0)] * n
                        x[i] = -a[i][j]
                        x[j] = QC(1)
                        return PSDResult(False, witness=orthogonalize(x))
            return PSDResult(True, rank=len(decomp), decomposition=decomp)
        if a[d][d].re < 0:
            x = [QC(0)] * n
            x[d] = QC(1)
            return PSDResult(False, witness=orthogonalize(x))
        alpha = a[d][d].re
        inv = QC(Fraction(1) / Fraction(alpha))
        v = tuple(a[i][d] * inv for i in range(n))
        decomp.append((alpha, v))
        pivots.append(d)
        for i in range(n):
            if v[i]:
                for j in range(n):
                    a[i][j] = a[i][j] - alpha * v[i] * v[j].conj()
        active.remove(d)
    return PSDResult(True, rank=len(decomp), decomposition=decomp)


# --- symmetric PSD over Q --------------------------------------------------

class PSDResult:
    """Outcome of the exact LDL^T test.

    ``psd`` bool, ``rank`` int; on success ``decomposition`` is a list of
    (gamma, vector) with M = sum gamma * v^T v, gamma > 0; on failure
    ``witness`` is an exact vector x with x^T M x < 0.
    """

    def __init__(self, psd, rank=0, decomposition=None, witness=None):
        self.psd = psd
        self.rank = rank
        self.decomposition = decomposition
        self.witness = witness

    def __bool__(self):
        return self.psd


def psd_decompose(m):
    """Exact PSD decision for a symmetric rational matrix.

    Repeated rank-one peeling (LDL^T): the residual after k steps is
    R = M - sum_k d_k v_k^T v_k with v_k supported off earlier pivots.  A
    negative residual diagonal, or a vanishing residual diagonal with a
    nonzero residual row, produces an exact witness x with x^T M x < 0;
    otherwise the collected (d_k, v_k) certify PSD-ness.
    """
    n = len(m)
    a = [[Fraction(m[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            if a[i][j] != a[j][i]:
                raise ValueError("matrix not symmetric")
    decomp = []
    pivots = []
    active = list(range(n))

    def orthogonalize(x):
        # adjust entries at pivot positions so that v_k . x = 0 for all k
        x = list(x)
        for pivot_d, (_, v) in reversed(list(zip(pivots, decomp))):
            x[pivot_d] -= sum(vi * xi for vi, xi in zip(v, x))
        return tuple(x)

    while active:
        d = next((idx for idx in active if a[idx][idx] != 0), None)
        if d is None:
            for i in active:
                for j in active:
                    if i != j and a[i][j] != 0:
                        s = 1 if a[i][j] > 0 else -1
                        w = [Fraction(0)] * n
                        w[i], w[j] = Fraction(1), Fraction(-s)
                        return PSDResult(False, witness=orthogonalize(w))
            return PSDResult(True, rank=len(decomp), decomposition=decomp)
        if a[d][d] < 0:
            w = [Fraction(0)] * n
            w[d] = Fraction(1)
            return PSDResult(False, witness=orthogonalize(w))
        alpha = a[d][d]
        v = tuple(a[i][d] / alpha for i in range(n))
        decomp.append((alpha, v))
        pivots.append(d)
        for i in range(n):
            if v[i] != 0:
                for j in range(n):
                    a[i][j] -= alpha * v[i] * v[j]
        active.remove(d)
    return PSDResult(True, rank=len(decomp), decomposition=decomp)


def psd_decompose_hermitian(re, im):
    """Exact PSD test of a Hermitian matrix given by rational Re/Im parts.

    Uses the real embedding [[Re, -Im], [Im, Re]]; witnesses are mapped back
    to complex vectors (re_part, im_part).
    """
    n = len(re)
    big = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            big[i][j] = Fraction(re[i][j])
            big[n + i][n + j] = Fraction(re[i][j])
            big[i][n + j] = -Fraction(im[i][j])
            big[n + i][j] = Fraction(im[i][j])
    res = psd_decompose(big)
    if res.psd:
        return PSDResult(True, rank=res.rank // 2 + res.rank % 2,
                         decomposition=res.decomposition)
    w = res.witness
    return PSDResult(False, witness=(tuple(w[:n]), tuple(w[n:])))


# --- Sturm sequences --------------------------------------------------------

def _poly_div(num, den):
    num = list(num)
    dn = len(den) - 1
    while den and den[-1] == 0:
        den = den[:-1]
        dn -= 1
    q = [Fraction(0)] * max(len(num) - len(den) + 1, 1)
    while len(num) >= len(den) and any(num):
        while num and num[-1] == 0:
            num.pop()
        if len(num) < len(den):
            break
        c = num[-1] / den[-1]
        k = len(num) - len(den)
        q[k] = c
        for i, dcoef in enumerate(den):
            num[k + i] -= c * dcoef
        num.pop()
    return q, num


def _poly_eval(p, x):
    out = Fraction(0)
    for c in reversed(p):
        out = out * x + c
    return out


def sturm_roots_in(coeffs, lo, hi):
    """Number of distinct real roots of a rational polynomial in (lo, hi].

    ``coeffs`` ascending; lo/hi are Fractions or None for -/+infinity.
    """
    p = [Fraction(c) for c in coeffs]
    while p and p[-1] == 0:
        p.pop()
    if len(p) <= 1:
        return 0
    dp = [i * c for i, c in enumerate(p)][1:]
    chain = [p, dp]
    while True:
        _, rem = _poly_div(chain[-2], chain[-1])
        while rem and rem[-1] == 0:
            rem.pop()
        if not rem:
            break
        chain.append([-c for c in rem])

    def signs_at(x, at_inf=0):
        out = []
        for q in chain:
            if at_inf:
                lead = q[-1]
                s = lead if (len(q) - 1) % 2 == 0 or at_inf > 0 else -lead
            else:
                s = _poly_eval(q, x)
            out.append(0 if s == 0 else (1 if s > 0 else -1))
        return out

    def variations(sgns):
        v = 0
        prev = None
        for s in sgns:
            if s == 0:
                continue
            if prev is not None and s != prev:
                v += 1
            prev = s
        return v

    s_lo = signs_at(lo) if lo is not None else signs_at(None, at_inf=-1)
    s_hi = signs_at(hi) if hi is not None else signs_at(None, at_inf=+1)
    return variations(s_lo) - variations(s_hi)
