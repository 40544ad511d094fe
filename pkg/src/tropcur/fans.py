"""Smooth fans, strata of the partial compactification, and toric charts.

A fan is stored fully face-closed.  Each cone carries its generator list
(primitive integer vectors) plus a stored basis completion certifying
smoothness; quotient coordinates on the stratum N(sigma) = N_R / <sigma>
come from the Hermite-style deterministic completion, so all coordinates
are reproducible across runs.

Axes and cone ids are 0-based throughout the library; the JSON layer
(:mod:`tropcur.formats`) speaks 1-based indices.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import exact
from .errors import (NotStrictlyConvex, NotSmooth, BadIntersection,
                     OutsideSupport, NotAFace)
from .polyhedra import Polyhedron, Row


@dataclass(frozen=True)
class Cone:
    """Smooth rational cone given by primitive generators.

    ``basis`` is the stored smoothness certificate: a Z-basis of N whose
    first ``dim`` vectors are the generators.
    """
    generators: tuple
    basis: tuple

    @property
    def dim(self):
        return len(self.generators)

    def __repr__(self):
        return f"Cone{self.generators}"


@dataclass(frozen=True)
class CompactifiedPoint:
    """Point of N_Sigma: stratum cone id + coords in the quotient basis."""
    stratum: int
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(exact.frac(c) for c in self.coords))


@dataclass(frozen=True)
class ToricChart:
    """Adapted coordinates on the open star of a cone.

    ``basis`` is a Z-basis of N with the cone generated by the prefix;
    chart coordinates are the dual basis, so the cone's stratum directions
    are the ``infinite_axes`` prefix and the chart realizes the open set
    U_rho inside R_infty^n.
    """
    cone_id: int
    basis: tuple
    infinite_axes: frozenset
    dual: tuple = field(repr=False, default=())

    def coords_of(self, v):
        """Chart coordinates of a lattice/rational point of N_R."""
        return tuple(sum(Fraction(row[j]) * Fraction(v[j]) for j in range(len(v)))
                     for row in self.dual)


def _make_cone(gens, n):
    seen = []
    for g in gens:
        if len(g) != n:
            raise NotSmooth(f"generator {g} has wrong length", payload={"generator": g})
        if not any(g):
            raise NotStrictlyConvex("zero generator", payload={"generator": g})
        p = exact.primitive(g)
        if p not in seen:
            seen.append(p)
    if exact.rank([list(g) for g in seen]) != len(seen):
        # linearly dependent generators: either a line is contained
        # (a nonnegative nontrivial relation exists) or simply not simplicial
        m = len(seen)
        rows = [(tuple(-Fraction(int(i == j)) for j in range(m)), 0) for i in range(m)]
        eq_rows = []
        for coord in range(n):
            a = tuple(Fraction(seen[i][coord]) for i in range(m))
            eq_rows.append((a, 0))
            eq_rows.append((tuple(-x for x in a), 0))
        norm = [(tuple(Fraction(-1) for _ in range(m)), Fraction(-1))]
        probe = Polyhedron(m, rows + eq_rows + norm)
        if not probe.is_empty():
            raise NotStrictlyConvex("cone contains a line",
                                    payload={"generators": seen})
        raise NotSmooth("generators are linearly dependent",
                        payload={"generators": seen})
    try:
        basis = exact.extend_to_basis(seen, n)
    except ValueError:
        raise NotSmooth("generators are not part of a Z-basis",
                        payload={"generators": seen}) from None
    return Cone(tuple(seen), tuple(basis))


def _cone_hrep(cone, n):
    """H-representation of a smooth cone from its basis completion."""
    b = [[Fraction(x) for x in row] for row in cone.basis]
    binv = _inverse(b)
    rows = []
    k = cone.dim
    for i in range(n):
        a = tuple(binv[j][i] for j in range(n))
        if i < k:
            rows.append(Row(tuple(-x for x in a), Fraction(0), False))
        else:
            rows.append(Row(a, Fraction(0), False))
            rows.append(Row(tuple(-x for x in a), Fraction(0), False))
    return Polyhedron(n, rows)


def _inverse(m):
    n = len(m)
    aug = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def _membership(cone, v):
    """Coefficients of v over the cone's full basis (exact)."""
    n = len(cone.basis)
    mat = [[Fraction(cone.basis[j][i]) for j in range(n)] for i in range(n)]
    return exact.solve(mat, [Fraction(x) for x in v])


class Fan:
    """Face-closed smooth fan with the face partial order."""

    def __init__(self, rank, cones, faces):
        self.rank = rank
        self.cones = cones            # list of Cone, id = index; cones[0] = {0}
        self.faces = faces            # dict id -> frozenset of face ids
        self._key = {c.generators: i for i, c in enumerate(cones)}
        self._charts = {}
        self._quotients = {}

    def __len__(self):
        return len(self.cones)

    def cone_id(self, gens):
        key = tuple(sorted(exact.primitive(g) for g in gens))
        for c, i in self._key.items():
            if tuple(sorted(c)) == key:
                return i
        raise KeyError(f"no cone with generators {gens}")

    def is_face(self, tau_id, sigma_id):
        return tau_id in self.faces[sigma_id]

    # --- strata ----------------------------------------------------------
    def quotient_basis(self, sigma_id):
        """Rows of the projection N_R -> N(sigma) in the stored basis."""
        if sigma_id not in self._quotients:
            cone = self.cones[sigma_id]
            n, k = self.rank, cone.dim
            binv = _inverse([[Fraction(x) for x in row] for row in cone.basis])
            # coefficient of basis vector i is column i of the row-matrix inverse
            proj = [tuple(binv[j][i] for j in range(n)) for i in range(k, n)]
            self._quotients[sigma_id] = proj
        return self._quotients[sigma_id]

    def project(self, sigma_id, v):
        """pi_sigma: N_R -> N(sigma) in the deterministic quotient basis."""
        proj = self.quotient_basis(sigma_id)
        coords = tuple(sum(row[j] * Fraction(v[j]) for j in range(self.rank))
                       for row in proj)
        return CompactifiedPoint(sigma_id, coords)

    def stratum_lift(self, x):
        """A representative in N_R of a stratum point (section of pi_sigma)."""
        cone = self.cones[x.stratum]
        n, k = self.rank, cone.dim
        rep = [Fraction(0)] * n
        for t, coord in enumerate(x.coords):
            for j in range(n):
                rep[j] += coord * Fraction(cone.basis[k + t][j])
        return tuple(rep)

    # --- operations --------------------------------------------------------
    def locate_relint(self, v):
        """Unique cone with v in its relative interior."""
        v = tuple(exact.frac(x) for x in v)
        if not any(v):
            return 0
        for i, cone in enumerate(self.cones):
            if cone.dim == 0:
                continue
            lam = _membership(cone, v)
            if lam is None:
                continue
            k = cone.dim
            if all(lam[j] > 0 for j in range(k)) and all(lam[j] == 0 for j in range(k, self.rank)):
                return i
        raise OutsideSupport(f"{v} is not in the relative interior of any cone",
                             payload={"vector": v})

    def stratum_projection(self, sigma_id, tau_id, x):
        """pi_{sigma,tau}: N(tau) -> N(sigma) for tau a face of sigma."""
        if x.stratum != tau_id:
            raise NotAFace("point does not lie on the source stratum",
                           payload={"point": x, "tau": tau_id})
        if not self.is_face(tau_id, sigma_id):
            raise NotAFace(f"cone {tau_id} is not a face of {sigma_id}",
                           payload={"tau": tau_id, "sigma": sigma_id})
        if sigma_id == tau_id:
            return x
        return self.project(sigma_id, self.stratum_lift(x))

    def limit_point(self, p, v):
        """lim_{mu -> infty} p + mu v inside N_Sigma."""
        sigma = self.locate_relint(v)
        return self.project(sigma, p)

    def toric_chart(self, rho_id):
        """Deterministic adapted chart of the open star of a cone."""
        if rho_id not in self._charts:
            cone = self.cones[rho_id]
            basis = cone.basis
            dual = _inverse([[Fraction(x) for x in row] for row in basis])
            dual_rows = tuple(tuple(dual[j][i] for j in range(self.rank))
                              for i in range(self.rank))
            self._charts[rho_id] = ToricChart(
                cone_id=rho_id, basis=tuple(tuple(b) for b in basis),
                infinite_axes=frozenset(range(cone.dim)), dual=dual_rows)
        return self._charts[rho_id]


def validate_fan(cone_generators, rank=None):
    """Build a face-closed smooth Fan from raw generator lists.

    Rejects non-smooth cones and pairs of cones that do not intersect in a
    common face; the zero cone is always added and face closure computed.
    """
    gens_list = [list(c) for c in cone_generators]
    if rank is None:
        for c in gens_list:
            if c:
                rank = len(c[0])
                break
        if rank is None:
            raise NotSmooth("cannot infer rank from an empty fan; pass rank=")
    cones = {(): Cone((), tuple(exact.extend_to_basis([], rank)))}
    for raw in gens_list:
        cone = _make_cone(raw, rank)
        # face closure of a smooth cone: all generator subsets
        for r in range(1, cone.dim + 1):
            for sub in combinations(cone.generators, r):
                key = tuple(sorted(sub))
                if key not in cones:
                    cones[key] = _make_cone(list(sub), rank)

    ordered = sorted(cones, key=lambda k: (len(k), k))
    cone_list = [cones[k] for k in ordered]
    index = {k: i for i, k in enumerate(ordered)}

    # pairwise intersection must be the cone on the common generators
    hreps = [_cone_hrep(c, rank) for c in cone_list]
    for i in range(len(cone_list)):
        for j in range(i + 1, len(cone_list)):
            gi = set(cone_list[i].generators)
            gj = set(cone_list[j].generators)
            common = tuple(sorted(gi & gj))
            inter = hreps[i].intersect(hreps[j])
            for ray in inter.recession_generators():
                lam = _membership(cones[common], ray) if common else None
                ok = False
                if common:
                    k = len(common)
                    if lam is not None and all(lam[t] >= 0 for t in range(k)) \
                            and all(lam[t] == 0 for t in range(k, rank)):
                        ok = True
                if not ok:
                    raise BadIntersection(
                        "cones intersect outside a common face",
                        payload={"pair": (cone_list[i].generators,
                                          cone_list[j].generators),
                                 "ray": ray})

    faces = {}
    for k, i in index.items():
        sub = set()
        gens = set(k)
        for k2, i2 in index.items():
            if set(k2) <= gens:
                sub.add(i2)
        faces[i] = frozenset(sub)
    return Fan(rank, cone_list, faces)


def p2_fan():
    """The projective-plane fan: rays (1,0), (0,1), (-1,-1) and the 2-cones."""
    return validate_fan([
        [(1, 0), (0, 1)],
        [(0, 1), (-1, -1)],
        [(-1, -1), (1, 0)],
    ])


def orthant_fan(n):
    """The fan of the affine chart: the nonnegative orthant and its faces."""
    gens = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return validate_fan([gens], rank=n)
