"""The affine building of PGL_d over F_q((1/t)).

Vertices are homothety classes of lattices over the valuation ring at
infinity, keyed by a canonical Hermite form: upper triangular basis with
diagonal powers of pi = 1/t, off-diagonal entries reduced modulo the
column's diagonal power, and min diagonal exponent 0.  Simplices are
chains cl(L_0) > cl(L_1) > ... > cl(L_i) > cl(pi L_0); within the
building a simplex is determined by its vertex set, so the simplex key
joins the sorted vertex keys with '~'.

Apartments: the standard apartment has vertex set Z^d modulo the diagonal
copy of Z, and an i-simplex is a class of "small" chains
x_0 < x_1 < ... < x_i < x_0 + (1,..,1) under componentwise comparison.
The map sending x to the lattice with rows pi^(x_j) v_j embeds it into
the building for any basis v_1..v_d.
"""

from __future__ import annotations

import itertools
from collections import namedtuple

from .errors import (
    ComputationError, NotSmall, SingularBasis, WrongDimension,
)
from .ffield import (
    RZERO, InfinityLattice, lattice_canonical_rows, o_triangularize, radd,
    rfrom_tpow, rmat_det, rmul, rscale, rseries, rval,
)
from .homology import OrientedChain
from .linalg import subspaces
from .scomplex import Complex, OrientedSimplexRef, perm_sign

SIMPLEX_SEP = "~"


# -- vertex keys --------------------------------------------------------------

def vertex_canonical(F, rows):
    """Canonical key and Hermite rows of the homothety class of a lattice."""
    canon, exps, _ = lattice_canonical_rows(F, rows)
    return _encode_key(F, canon, exps), canon


def _encode_key(F, rows, exps):
    d = len(exps)
    parts = [",".join(str(a) for a in exps)]
    ents = []
    for i in range(d):
        for j in range(i + 1, d):
            x = rows[i][j]
            if x == RZERO:
                continue
            lo = rval(x)
            coeffs = rseries(F, x, lo, exps[j])
            items = ["%d^%d" % (lo + k, c)
                     for k, c in enumerate(coeffs) if c]
            ents.append("%d.%d:%s" % (i, j, ",".join(items)))
    if ents:
        parts.append(";".join(ents))
    return "/".join(parts)


def key_to_lattice(F, key):
    """Rebuild the canonical lattice from its vertex key."""
    parts = key.split("/")
    exps = [int(a) for a in parts[0].split(",")]
    d = len(exps)
    rows = [[rfrom_tpow(-exps[i]) if i == j else RZERO for j in range(d)]
            for i in range(d)]
    if len(parts) > 1 and parts[1]:
        for ent in parts[1].split(";"):
            pos, ser = ent.split(":")
            i, j = (int(x) for x in pos.split("."))
            for item in ser.split(","):
                e, c = item.split("^")
                # term c * u^e = c * t^(-e)
                rows[i][j] = radd(F, rows[i][j],
                                  rscale(F, rfrom_tpow(-int(e)), int(c)))
    return InfinityLattice(F, tuple(tuple(r) for r in rows))


def standard_vertex(F, d):
    return vertex_canonical(F, InfinityLattice.standard(F, d).rows)[0]


# -- adjacency ----------------------------------------------------------------

def sublattice_from_subspace(F, rows, W):
    """Preimage in L of the residue subspace W of L/(pi L).

    rows: a basis of L; W: rows of F_q-coordinates against that basis.
    """
    d = len(rows)
    pi = rfrom_tpow(-1)
    gens = []
    for w in W:
        acc = [RZERO] * d
        for i, c in enumerate(w):
            if c:
                for j in range(d):
                    if rows[i][j] != RZERO:
                        acc[j] = radd(F, acc[j], rscale(F, rows[i][j], c))
        gens.append(tuple(acc))
    for r in rows:
        gens.append(tuple(rmul(F, pi, x) for x in r))
    return o_triangularize(F, gens, d)


def neighbors(F, key):
    """All adjacent vertex classes, as (key, witness lattice rows) sorted
    by key.  Count is the number of proper nonzero subspaces of F_q^d."""
    lat = key_to_lattice(F, key)
    d = lat.d
    out = []
    for k in range(1, d):
        for W in subspaces(F, d, k):
            sub = sublattice_from_subspace(F, lat.rows, W)
            nk, canon = vertex_canonical(F, sub)
            out.append((nk, canon))
    out.sort(key=lambda p: p[0])
    return out


def lattice_contains(F, outer, inner):
    """O-lattice containment: every row of inner lies in the span of outer."""
    from .ffield import rmat_inv, rmat_mul
    inv = rmat_inv(F, tuple(tuple(r) for r in outer))
    prod = rmat_mul(F, tuple(tuple(r) for r in inner), inv)
    return all(rval(x) >= 0 for row in prod for x in row)


# -- building simplices --------------------------------------------------------

class BuildingSimplex:
    """A chain of lattice classes with its derived vertex keys.

    The witness chain is pointed (the first lattice is distinguished);
    the unpointed simplex key is the sorted vertex keys joined with '~',
    which is rotation independent.
    """

    __slots__ = ("field", "lattices", "vertex_keys", "key", "dim")

    def __init__(self, F, lattices, check=True):
        self.field = F
        given = []
        keys = []
        for lat in lattices:
            rows = lat.rows if isinstance(lat, InfinityLattice) \
                else tuple(tuple(r) for r in lat)
            given.append(rows)
            keys.append(vertex_canonical(F, rows)[0])
        self.lattices = tuple(given)
        self.vertex_keys = tuple(keys)
        self.dim = len(keys) - 1
        if len(set(keys)) != len(keys):
            raise ComputationError("chain has repeated vertex classes")
        if check and self.dim >= 1:
            # inclusions are checked on the witness representatives, not the
            # homothety-normalized forms
            pi = rfrom_tpow(-1)
            for a, b in zip(given, given[1:]):
                if not lattice_contains(F, a, b):
                    raise ComputationError("chain inclusions fail")
            bottom = [[rmul(F, pi, x) for x in row] for row in given[0]]
            if not lattice_contains(F, given[-1], bottom):
                raise ComputationError("pi L_0 not below the chain")
        self.key = SIMPLEX_SEP.join(sorted(keys))

    def __repr__(self):
        return "BuildingSimplex(%s)" % (self.key,)


# -- apartments -----------------------------------------------------------------

def apartment_point(x):
    """Canonical representative of x in Z^d mod Z(1,..,1): min coord 0."""
    m = min(x)
    return tuple(int(c) - m for c in x)


def _leq_strict(a, b):
    return all(x <= y for x, y in zip(a, b)) and a != b


def small_chain(points):
    """Order a small lift ascending; NotSmall if no valid chain exists."""
    pts = [tuple(int(c) for c in p) for p in points]
    if len(set(pts)) != len(pts):
        raise NotSmall("repeated points in the lift")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise NotSmall("mixed dimensions")
    pts.sort(key=lambda p: (sum(p), p))
    top = tuple(c + 1 for c in pts[0])
    for a, b in zip(pts, pts[1:]):
        if not _leq_strict(a, b):
            raise NotSmall("lift is not a chain: %r vs %r" % (a, b))
    if not _leq_strict(pts[-1], top):
        raise NotSmall("chain does not fit strictly below x_0 + (1,..,1)")
    return pts


def _basis_ok(F, basis_rows):
    rows = tuple(tuple(r) for r in basis_rows)
    if rmat_det(F, rows) == RZERO:
        raise SingularBasis("apartment basis is singular")
    return rows


def point_lattice(F, basis_rows, x):
    """The lattice with rows pi^(x_j) * v_j."""
    return tuple(tuple(rmul(F, rfrom_tpow(-x[j]), e) for e in basis_rows[j])
                 for j in range(len(x)))


def apartment_simplex(F, basis_rows, lift):
    """The building simplex reached from a small lift through the basis."""
    basis_rows = _basis_ok(F, basis_rows)
    chain = small_chain(lift)
    lats = [InfinityLattice(F, point_lattice(F, basis_rows, x))
            for x in chain]
    return BuildingSimplex(F, lats)


def _top_permutation(chain):
    """The coordinate picked up at each step of a top-dimensional chain."""
    d = len(chain[0])
    if len(chain) != d:
        raise WrongDimension("need a (d-1)-simplex lift with d points")
    w = []
    for a, b in zip(chain, chain[1:]):
        diff = [j for j in range(d) if b[j] != a[j]]
        if len(diff) != 1 or b[diff[0]] - a[diff[0]] != 1:
            raise NotSmall("steps of a top chain must be unit vectors")
        w.append(diff[0])
    missing = set(range(d)) - set(w)
    w.append(missing.pop())
    return w


def apartment_orientation(F, basis_rows, lift):
    """Oriented reference of a top apartment simplex.

    The sign is the parity of the permutation of picked-up coordinates,
    composed with the transport from the chain order to the canonical
    ascending key order; independent of the chosen small lift.
    """
    basis_rows = _basis_ok(F, basis_rows)
    chain = small_chain(lift)
    w = _top_permutation(chain)
    sgn_w = perm_sign(w)
    simplex = BuildingSimplex(
        F, [InfinityLattice(F, point_lattice(F, basis_rows, x))
            for x in chain])
    order = sorted(range(len(chain)), key=lambda i: simplex.vertex_keys[i])
    parity = sgn_w * perm_sign(order)
    return OrientedSimplexRef(simplex.dim, simplex.key, parity)


def apartment_top_lifts(d, lo, hi):
    """Deduplicated small lifts of top apartment simplices in the box
    [lo, hi]^d; one lift per simplex class."""
    seen = set()
    rng = range(lo, hi + 1)
    for x0 in itertools.product(rng, repeat=d):
        for w in itertools.permutations(range(d)):
            chain = [tuple(x0)]
            ok = True
            for j in w[:-1]:
                nxt = list(chain[-1])
                nxt[j] += 1
                if nxt[j] > hi:
                    ok = False
                    break
                chain.append(tuple(nxt))
            if not ok:
                continue
            cls = frozenset(apartment_point(x) for x in chain)
            if cls in seen:
                continue
            seen.add(cls)
            yield chain


def apartment_window_complex(F, basis_rows, lo, hi):
    """Complex of all apartment simplices whose small lifts fit in the box,
    together with the top-lift table {top simplex key: chain}.

    Faces of box simplices are sub-chains of box points, so the window is
    closed under faces by construction.
    """
    basis_rows = _basis_ok(F, basis_rows)
    d = len(basis_rows)
    C = Complex()
    tops = {}
    key_of = {}

    def simplex_for(chain):
        ck = frozenset(chain)
        if ck in key_of:
            return key_of[ck]
        lats = [InfinityLattice(F, point_lattice(F, basis_rows, x))
                for x in chain]
        simp = BuildingSimplex(F, lats)
        key_of[ck] = simp
        return simp

    def add_chain(chain):
        simp = simplex_for(chain)
        if len(chain) == 1:
            C.add_vertex(simp.vertex_keys[0])
            return simp
        if not C.has(len(chain) - 1, simp.key):
            faces = []
            sorted_keys = sorted(simp.vertex_keys)
            by_key = {simp.vertex_keys[i]: i for i in range(len(chain))}
            for vk in sorted_keys:
                sub = [chain[i] for i in range(len(chain))
                       if i != by_key[vk]]
                fsimp = add_chain(sub)
                faces.append(fsimp.key if len(sub) > 1
                             else fsimp.vertex_keys[0])
            C.add_simplex(simp.key, simp.vertex_keys, tuple(faces))
        return simp

    for chain in apartment_top_lifts(d, lo, hi):
        simp = add_chain(chain)
        tops[simp.key] = chain
    return C.seal(), tops


def fundamental_chain(F, basis_rows, window):
    """Restriction of the fundamental cycle to a window.

    window: either a (lo, hi) box or an iterable of small lifts of top
    simplices.  Every coefficient is +-1 relative to canonical parity.
    """
    basis_rows = _basis_ok(F, basis_rows)
    d = len(basis_rows)
    if d == 1:
        key = standard_vertex(F, 1)
        return OrientedChain(0, {key: 1})
    if isinstance(window, tuple) and len(window) == 2 \
            and all(isinstance(v, int) for v in window):
        lifts = apartment_top_lifts(d, window[0], window[1])
    else:
        lifts = window
    coeffs = {}
    for lift in lifts:
        ref = apartment_orientation(F, basis_rows, lift)
        if ref.key in coeffs:
            raise ComputationError("window repeats simplex %r" % (ref.key,))
        coeffs[ref.key] = ref.parity
    return OrientedChain(d - 1, coeffs)


# -- balls ------------------------------------------------------------------------

def residue_flags(F, d):
    """Strictly decreasing chains of proper nonzero subspaces of F_q^d,
    each chain listed from largest to smallest.  Dimension gaps are
    allowed, so every chain in the subspace order appears exactly once."""
    from .linalg import gf_in_span
    by_dim = {k: list(subspaces(F, d, k)) for k in range(1, d)}

    def contains(big, small):
        return all(gf_in_span(F, big, v) for v in small)

    def extend(chain, lastdim):
        yield chain
        for k in range(lastdim - 1, 0, -1):
            for W in by_dim[k]:
                if contains(chain[-1], W):
                    yield from extend(chain + [W], k)

    for start in range(d - 1, 0, -1):
        for W in by_dim[start]:
            yield from extend([W], start)


def building_ball(F, d, radius, center_rows=None):
    """Closed-star ball: all flag simplices at vertices within
    radius-1 of the center, closed under faces.

    Returns (Complex, dist) where dist maps vertex keys to BFS distance.
    """
    if center_rows is None:
        center = InfinityLattice.standard(F, d)
    else:
        center = InfinityLattice(F, center_rows)
    ckey, canon = vertex_canonical(F, center.rows)
    dist = {ckey: 0}
    rows_of = {ckey: canon}
    frontier = [ckey]
    for r in range(radius):
        nxt = []
        for key in frontier:
            for nk, nrows in neighbors(F, key):
                if nk not in dist:
                    dist[nk] = r + 1
                    rows_of[nk] = nrows
                    nxt.append(nk)
        frontier = nxt
    C = Complex()
    for key in dist:
        C.add_vertex(key)
    # collect simplices as sorted vertex key tuples
    simplices = set()
    for key, rr in dist.items():
        if rr > radius - 1:
            continue
        rows = rows_of[key]
        for flag in residue_flags(F, d):
            chain_keys = [key]
            cur = rows
            ok = True
            for W in flag:
                # subspace coordinates are against the top lattice's basis
                sub = sublattice_from_subspace(F, rows, W)
                nk, canon2 = vertex_canonical(F, sub)
                if nk in chain_keys:
                    ok = False
                    break
                chain_keys.append(nk)
            if ok:
                simplices.add(tuple(sorted(chain_keys)))
    # close under subsets
    full = set(simplices)
    for s in simplices:
        for size in range(2, len(s)):
            for sub in itertools.combinations(s, size):
                full.add(sub)
    for s in sorted(full, key=len):
        if len(s) < 2:
            continue
        faces = tuple(SIMPLEX_SEP.join(s[:p] + s[p + 1:]) if len(s) > 2
                      else (s[:p] + s[p + 1:])[0]
                      for p in range(len(s)))
        C.add_simplex(SIMPLEX_SEP.join(s), s, faces)
    return C.seal(), dist
