"""Quotients of the building by GL_d(F_q[t]) with principal level.

A vertex of the quotient is an isomorphism class of pairs (rank-d vector
bundle on the projective line, level structure).  Every such bundle
splits, so a class is a descending integer type normalized to end in 0
together with an orbit of level data.  A level structure for the ideal
(f) is a matrix over F_q[t]/(f) with unit determinant; automorphisms of
the split bundle act on it through reduction.

A simplex is an equivalence class of lattice chains L_0 > ... > L_i >
pi L_0 down at infinity.  Canonicalization reduces L_0 to the split
diagonal via a polynomial basis change, turns the rest of the chain into
a flag of subspaces of the d-dimensional fiber at infinity, transports
the level datum, and minimizes the (flag, level) pair over the finite
automorphism group of the split bundle and over the i+1 rotations of the
chain.
"""

from __future__ import annotations

import itertools
from collections import namedtuple

from .errors import (
    AutGroupTooLarge, ComputationError, EnumerationCeiling,
    LevelsIncompatible, NotInSupport,
)
from .ffield import (
    InfinityLattice, RZERO, lattice_reduce, padd, pdivmod, pm_det, pmul,
    pneg, pnorm, pscale, radd, rfrom_poly, rfrom_tpow, rmat_det, rmat_inv,
    rmat_mul, rmul, rseries, rval,
)
from .linalg import gf_rref, gf_vec_mat
from .building import residue_flags, sublattice_from_subspace
from .scomplex import Complex, ExhaustedComplex, SimplicialMap

PONE = (1,)


# -- polynomial matrix helpers -------------------------------------------------

def pm_adjugate_inverse(F, M):
    """Inverse of a polynomial matrix whose determinant is a unit."""
    d = len(M)
    if d == 1:
        det = M[0][0]
        if len(det) != 1:
            raise ComputationError("determinant is not a unit")
        return (((F.inv(det[0]),),),)
    det = pm_det(F, M)
    if len(det) != 1 or det[0] == 0:
        raise ComputationError("determinant is not a unit")
    dinv = F.inv(det[0])
    cof = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            minor = tuple(tuple(M[r][c] for c in range(d) if c != j)
                          for r in range(d) if r != i)
            m = pm_det(F, minor)
            if (i + j) % 2:
                m = pneg(F, m)
            cof[j][i] = pscale(F, m, dinv)
    return tuple(tuple(row) for row in cof)


def _pxgcd(F, a, b):
    # extended euclid: (g, x, y) with x*a + y*b = g, g monic or zero
    r0, r1 = pnorm(a), pnorm(b)
    x0, x1 = PONE, ()
    y0, y1 = (), PONE
    while r1:
        q, r = pdivmod(F, r0, r1)
        r0, r1 = r1, r
        x0, x1 = x1, padd(F, x0, pneg(F, pmul(F, q, x1)))
        y0, y1 = y1, padd(F, y0, pneg(F, pmul(F, q, y1)))
    if r0:
        lead = F.inv(r0[-1])
        r0 = pscale(F, r0, lead)
        x0 = pscale(F, x0, lead)
        y0 = pscale(F, y0, lead)
    return r0, x0, y0


# -- the residue ring A/(f) ----------------------------------------------------

class LevelRing:
    """Matrices over F_q[t]/(f) with just enough arithmetic for orbits."""

    def __init__(self, F, f):
        self.F = F
        self.f = pnorm(f)
        if not self.f or self.f[-1] != 1:
            raise ComputationError("level polynomial must be monic")
        self.deg = len(self.f) - 1

    @property
    def trivial(self):
        return self.deg == 0

    def red(self, p):
        if self.deg == 0:
            return ()
        return pdivmod(self.F, pnorm(p), self.f)[1]

    def mat_red(self, M):
        return tuple(tuple(self.red(x) for x in row) for row in M)

    def mat_mul(self, A, B):
        F, d = self.F, len(A)
        out = []
        for i in range(d):
            row = []
            for j in range(d):
                acc = ()
                for k in range(d):
                    acc = padd(F, acc, pmul(F, A[i][k], B[k][j]))
                row.append(self.red(acc))
            out.append(tuple(row))
        return tuple(out)

    def mat_inv(self, M):
        """Inverse modulo f via lifted adjugate; needs unit determinant."""
        F, d = self.F, len(M)
        det = self.red(pm_det(F, M))
        g, x, _ = _pxgcd(F, det, self.f)
        if g != PONE:
            raise ComputationError("matrix is not invertible modulo f")
        if d == 1:
            return ((self.red(x),),)
        cof = [[None] * d for _ in range(d)]
        for i in range(d):
            for j in range(d):
                minor = tuple(tuple(M[r][c] for c in range(d) if c != j)
                              for r in range(d) if r != i)
                m = pm_det(F, minor)
                if (i + j) % 2:
                    m = pneg(F, m)
                cof[j][i] = self.red(pmul(F, m, x))
        return tuple(tuple(row) for row in cof)

    def is_unit_det(self, M):
        g, _, _ = _pxgcd(self.F, self.red(pm_det(self.F, M)), self.f)
        return g == PONE

    def identity(self, d):
        return tuple(tuple(PONE if i == j else () for j in range(d))
                     for i in range(d))

    def all_invertible(self, d, ceiling):
        """Every matrix in GL_d of the residue ring, as reduced tuples."""
        q, m = self.F.q, self.deg
        total = q ** (d * d * m)
        if total > ceiling:
            raise EnumerationCeiling(
                "level group size %d exceeds ceiling %d" % (total, ceiling))
        pols = [tuple(c for c in cs)
                for cs in itertools.product(range(q), repeat=m)]
        pols = [pnorm(p) for p in pols]
        out = []
        for entries in itertools.product(pols, repeat=d * d):
            M = tuple(tuple(entries[i * d + j] for j in range(d))
                      for i in range(d))
            if self.is_unit_det(M):
                out.append(M)
        return out


# -- parameters -----------------------------------------------------------------

GL_ORDER_CACHE = {}


def gl_order(q, m):
    if (q, m) not in GL_ORDER_CACHE:
        n = 1
        for i in range(m):
            n *= q ** m - q ** i
        GL_ORDER_CACHE[(q, m)] = n
    return GL_ORDER_CACHE[(q, m)]


class QuotientParams:
    """Arithmetic quotient parameters.

    level: coefficient tuple of a monic f in F_q[t]; (1,) means full
    level.  alpha_max bounds the truncation parameter; enumeration
    ceilings keep orbit and group walks desk-scale.
    """

    LEVEL_DEG_CEILING = 3

    def __init__(self, F, d, level=(1,), alpha_max=6,
                 aut_ceiling=10 ** 7, enum_ceiling=10 ** 6):
        self.F = F
        self.d = d
        self.ring = LevelRing(F, level)
        if self.ring.deg > self.LEVEL_DEG_CEILING:
            raise ComputationError("level degree above configured ceiling")
        if alpha_max <= d - 1:
            raise ComputationError("alpha_max must exceed d-1")
        self.level = self.ring.f
        self.alpha_max = alpha_max
        self.aut_ceiling = aut_ceiling
        self.enum_ceiling = enum_ceiling
        self._aut = {}
        self._orbit = {}
        self._gl = None
        self._canon = {}

    @property
    def full_level(self):
        return self.ring.trivial

    def gl_level(self):
        if self._gl is None:
            self._gl = self.ring.all_invertible(self.d, self.enum_ceiling)
        return self._gl


# -- the automorphism group of a split bundle -----------------------------------

def aut_order(P, ntype):
    """Order of the automorphism group of the split bundle of this type."""
    q = P.F.q
    blocks = []
    for v in sorted(set(ntype), reverse=True):
        blocks.append(sum(1 for n in ntype if n == v))
    order = 1
    for m in blocks:
        order *= gl_order(q, m)
    for i in range(len(ntype)):
        for j in range(len(ntype)):
            if ntype[j] > ntype[i]:
                order *= q ** (ntype[j] - ntype[i] + 1)
    return order


def aut_generators(P, ntype):
    """Generator images: pairs (fiber matrix, inverse level reduction).

    Aut of the split bundle consists of polynomial matrices g with
    deg g[i][j] <= n_j - n_i; it is generated by single-monomial
    elementary matrices and one-spot diagonal scalings.  Each generator
    is recorded by its action data only: the matrix on the infinity
    fiber and the inverse of its reduction modulo the level.
    """
    F, d, ring = P.F, P.d, P.ring
    key = ntype
    if key in P._aut:
        return P._aut[key]
    order = aut_order(P, ntype)
    if order > P.aut_ceiling:
        raise AutGroupTooLarge(
            "automorphism group order %d exceeds ceiling %d"
            % (order, P.aut_ceiling))
    gens = []

    def add(g):
        fib = tuple(
            tuple(g[i][j][ntype[j] - ntype[i]]
                  if 0 <= ntype[j] - ntype[i] < len(g[i][j]) else 0
                  for j in range(d))
            for i in range(d))
        linv = None if ring.trivial else ring.mat_inv(ring.mat_red(g))
        gens.append((fib, linv))

    for i in range(d):
        for c in range(2, F.q):
            g = [[PONE if a == b else () for b in range(d)]
                 for a in range(d)]
            g[i][i] = (c,)
            add(tuple(tuple(r) for r in g))
    for i in range(d):
        for j in range(d):
            if i == j or ntype[j] < ntype[i]:
                continue
            for e in range(ntype[j] - ntype[i] + 1):
                for c in range(1, F.q):
                    g = [[PONE if a == b else () for b in range(d)]
                         for a in range(d)]
                    g[i][j] = pnorm((0,) * e + (c,))
                    add(tuple(tuple(r) for r in g))
    P._aut[key] = (order, gens)
    return P._aut[key]


def _act(P, gen, datum):
    """Right action of one generator on a (flag, level) pair."""
    F = P.F
    fib, linv = gen
    flag, lev = datum
    nflag = []
    for W in flag:
        moved = [gf_vec_mat(F, w, fib) for w in W]
        nflag.append(gf_rref(F, moved)[1])
    nlev = lev if lev is None else P.ring.mat_mul(linv, lev)
    return (tuple(nflag), nlev)


def orbit_minimum(P, ntype, flag, level):
    """Smallest datum in the automorphism orbit and the orbit size."""
    key = (ntype, flag, level)
    if key in P._orbit:
        return P._orbit[key]
    order, gens = aut_generators(P, ntype)
    start = (flag, level)
    seen = {start}
    frontier = [start]
    while frontier:
        if len(seen) > P.enum_ceiling:
            raise EnumerationCeiling("orbit walk exceeded ceiling")
        nxt = []
        for x in frontier:
            for gen in gens:
                y = _act(P, gen, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    best = min(seen)
    size = len(seen)
    if order % size:
        raise ComputationError("orbit size does not divide group order")
    for f2, l2 in seen:
        P._orbit[(ntype, f2, l2)] = (best, size)
    return best, size


# -- serialization ---------------------------------------------------------------

def _ser_poly(p):
    return ".".join(str(c) for c in p) if p else "0"


def _ser_level(M):
    return ",".join(";".join(_ser_poly(x) for x in row) for row in M)


def _ser_flag(flag):
    return "+".join(".".join("".join(str(c) for c in w) for w in W)
                    for W in flag)


def datum_key(ntype, flag, level):
    parts = ["t" + ",".join(str(n) for n in ntype)]
    if flag:
        parts.append("f" + _ser_flag(flag))
    if level is not None:
        parts.append("l" + _ser_level(level))
    return "&".join(parts)


# -- canonicalization -------------------------------------------------------------

CanonResult = namedtuple(
    "CanonResult",
    "key pointed_keys vertex_keys vertex_types vertex_dps stab_order "
    "self_identified")

BundleClass = namedtuple("BundleClass", "ntype level_orbit")


def vertex_class(P, rows, level=None):
    """Isomorphism class of the bundle pair at a single lattice."""
    res = canon_simplex(P, [rows], level)
    key = res.vertex_keys[0]
    orbit = key.split("&", 1)[1] if "&" in key else ""
    return BundleClass(ntype=res.vertex_types[0], level_orbit=orbit)


def _chain_rows(chain):
    rows = []
    for lat in chain:
        r = lat.rows if isinstance(lat, InfinityLattice) else lat
        rows.append(tuple(tuple(x) for x in r))
    return rows


def _pointed_reduce(P, chain_rows, level):
    """Reduce the chain at its first member: normalized type, fiber flag,
    transported level."""
    F, d = P.F, P.d
    ntype, gamma = lattice_reduce(F, chain_rows[0])
    shift = ntype[-1]
    norm = tuple(n - shift for n in ntype)
    gmat = tuple(tuple(rfrom_poly(x) for x in row) for row in gamma)
    sc = rfrom_tpow(-shift)

    flag = []
    for rows in chain_rows[1:]:
        moved = rmat_mul(F, rows, gmat)
        coords = []
        for w in moved:
            vec = []
            for i in range(d):
                x = rmul(F, rmul(F, w[i], sc), rfrom_tpow(-norm[i]))
                if x == RZERO:
                    vec.append(0)
                else:
                    if rval(x) < 0:
                        raise ComputationError(
                            "chain member is not below the reduced lattice")
                    vec.append(rseries(F, x, 0, 1)[0])
            coords.append(tuple(vec))
        _, basis = gf_rref(F, coords)
        if not basis:
            raise ComputationError("chain member equals pi L_0")
        flag.append(basis)

    if level is None:
        lev = None
    else:
        ginv = P.ring.mat_red(pm_adjugate_inverse(F, gamma))
        lev = P.ring.mat_mul(ginv, level)
    return norm, tuple(flag), lev


def canon_simplex(P, chain, level=None):
    """Canonical key of the quotient orbit of a lattice chain.

    chain: lattices with L_0 > ... > L_i > pi L_0; level present iff the
    parameters carry a nontrivial level.  The unpointed key minimizes
    over all chain rotations; per-rotation data give the vertex keys in
    chain order.
    """
    F = P.F
    if P.full_level != (level is None):
        raise ComputationError("level datum must be present iff level is"
                               " nontrivial")
    if hasattr(chain, "lattices"):
        chain = chain.lattices
    rows = _chain_rows(chain)
    cache_key = (tuple(rows), level)
    if cache_key in P._canon:
        return P._canon[cache_key]
    pi = rfrom_tpow(-1)
    pointed_keys = []
    vertex_keys = []
    vertex_types = []
    vertex_dps = []
    stab_orders = []
    for r in range(len(rows)):
        # members before position r reappear scaled by pi at the end
        rot = rows[r:] + [tuple(tuple(rmul(F, pi, x) for x in row)
                                for row in mat)
                          for mat in rows[:r]]
        norm, flag, lev = _pointed_reduce(P, rot, level)
        dims = [len(W) for W in flag]
        if any(dims[k] <= dims[k + 1] for k in range(len(dims) - 1)):
            raise ComputationError("chain flag dimensions must decrease")
        best, orbit_size = orbit_minimum(P, norm, flag, lev)
        pointed_keys.append(datum_key(norm, best[0], best[1]))
        vbest, vorbit = orbit_minimum(P, norm, (), lev)
        vertex_keys.append(datum_key(norm, (), vbest[1]))
        vertex_types.append(norm)
        vertex_dps.append(tuple(norm[i] - norm[i + 1]
                                for i in range(P.d - 1)))
        order, _ = aut_generators(P, norm)
        stab_orders.append(order // orbit_size)
    if len(set(vertex_keys)) != len(vertex_keys):
        raise ComputationError("chain identifies two of its own vertices")
    self_identified = len(set(pointed_keys)) != len(pointed_keys)
    if len(set(stab_orders)) != 1:
        raise ComputationError("rotation stabilizer orders disagree")
    res = CanonResult(
        key=min(pointed_keys),
        pointed_keys=tuple(pointed_keys),
        vertex_keys=tuple(vertex_keys),
        vertex_types=tuple(vertex_types),
        vertex_dps=tuple(vertex_dps),
        stab_order=stab_orders[0],
        self_identified=self_identified)
    P._canon[cache_key] = res
    return res


def canon_vertex(P, rows, level=None):
    return canon_simplex(P, [rows], level)


# -- Harder-Narasimhan data -------------------------------------------------------

HNFlagWitness = namedtuple("HNFlagWitness", "rank degree rows")


def hn_polygon(c):
    """Polygon values p(0..d) of a split type, descending entries."""
    ntype = c.ntype if isinstance(c, BundleClass) else c
    p = [0]
    for n in ntype:
        p.append(p[-1] + n)
    return tuple(p)


def delta_p(c, i):
    p = hn_polygon(c)
    return 2 * p[i] - p[i - 1] - p[i + 1]


def hn_flag(F, rows, i):
    """Destabilizing rank-i submodule of the pair (F_q[t]^d, L).

    Returns a polynomial row basis; the degree is the polygon value p(i).
    """
    ntype, gamma = lattice_reduce(F, rows)
    d = len(ntype)
    if not 1 <= i <= d - 1 or ntype[i - 1] == ntype[i]:
        raise NotInSupport("index %d is not in the support of Delta p" % i)
    ginv = pm_adjugate_inverse(F, gamma)
    wit = tuple(ginv[r] for r in range(i))
    return HNFlagWitness(rank=i, degree=sum(ntype[:i]), rows=wit)


def poly_rows_contain(F, big, vec):
    """Is the polynomial row vec in the F_q[t]-span of the rows of big?

    Solves x * big = vec on an invertible column subset, then checks that
    the solution is polynomial and satisfies the remaining columns.
    """
    i, d = len(big), len(big[0])
    bigr = tuple(tuple(rfrom_poly(x) for x in row) for row in big)
    vecr = tuple(rfrom_poly(x) for x in vec)
    for cols in itertools.combinations(range(d), i):
        sub = tuple(tuple(row[c] for c in cols) for row in bigr)
        if rmat_det(F, sub) == RZERO:
            continue
        inv = rmat_inv(F, sub)
        x = [RZERO] * i
        for j in range(i):
            for k in range(i):
                x[j] = radd(F, x[j], rmul(F, vecr[cols[k]], inv[k][j]))
        if any(xx[1] != PONE for xx in x):
            return False
        for c in range(d):
            acc = RZERO
            for k in range(i):
                acc = radd(F, acc, rmul(F, x[k], bigr[k][c]))
            if acc != vecr[c]:
                return False
        return True
    raise ComputationError("row basis is rank deficient")


def poly_span_equal(F, rows_a, rows_b):
    return (len(rows_a) == len(rows_b)
            and all(poly_rows_contain(F, rows_a, v) for v in rows_b)
            and all(poly_rows_contain(F, rows_b, v) for v in rows_a))


# -- assembly ----------------------------------------------------------------------

def split_lattice(F, ntype):
    # rows t^(n_i) e_i, the reduced form produced by lattice_reduce
    return InfinityLattice.diagonal_tpowers(F, list(ntype))


def enumerate_types(d, gap_cap):
    """Normalized descending types with successive gaps at most gap_cap."""
    out = []
    for gaps in itertools.product(range(gap_cap + 1), repeat=d - 1):
        n = [0] * d
        for i in range(d - 2, -1, -1):
            n[i] = n[i + 1] + gaps[i]
        out.append(tuple(n))
    out.sort()
    return out


def level_orbit_reps(P, ntype):
    """Orbit representatives of level data at a type: (rep, orbit size)."""
    if P.full_level:
        return [(None, 1)]
    reps = {}
    for M in P.gl_level():
        best, size = orbit_minimum(P, ntype, (), M)
        reps[best[1]] = size
    return sorted(reps.items())


def simplex_in_core(vertex_dps, d, alpha):
    """Not contained in any single-index stratum at this alpha."""
    return all(min(dp[i] for dp in vertex_dps) < alpha
               for i in range(d - 1))


def chain_vertex_dps(P, chain):
    """Convexity-gap vectors of the chain members, no orbit work."""
    F, d = P.F, P.d
    out = []
    for rows in _chain_rows(chain):
        ntype, _ = lattice_reduce(F, rows)
        out.append(tuple(ntype[i] - ntype[i + 1] for i in range(d - 1)))
    return out


def quotient_exhaustion(P, alphas=None):
    """Assemble the finite cores for the given truncation values.

    Every simplex outside the residual strata is enumerated from a split
    pointed representative; the slab adds all faces, so frontier
    vertices sit in the slab without being core members.  Candidates are
    screened by the core rule on bare splitting types before any orbit
    canonicalization, which keeps the automorphism ceiling out of play
    for types that only arise in the residual strata.
    """
    F, d = P.F, P.d
    if alphas is None:
        alphas = list(range(1, P.alpha_max + 1))
    alphas = sorted(set(alphas))
    if max(alphas) > P.alpha_max:
        raise ComputationError("alpha exceeds alpha_max")
    amax = max(alphas)
    # a chain member differs from L_0 by colength < d, moving each gap
    # by at most 2(d-1); larger types cannot meet the core rule
    gap_cap = amax - 1 + 2 * (d - 1)
    witnesses = {}
    results = {}

    def record(chain, level):
        res = canon_simplex(P, chain, level)
        key = (len(chain) - 1, res.key)
        if key not in results:
            results[key] = res
            witnesses[key] = (list(chain), level)
        return key, res

    ntypes = enumerate_types(d, gap_cap)
    candidates = 0
    for ntype in ntypes:
        base = split_lattice(F, ntype)
        chains = [[base.rows]]
        for flagchain in residue_flags(F, d):
            chain = [base.rows]
            for W in flagchain:
                chain.append(sublattice_from_subspace(F, base.rows, W))
            chains.append(chain)
        survivors = [c for c in chains
                     if simplex_in_core(chain_vertex_dps(P, c), d, amax)]
        if not survivors:
            continue
        for lev, _ in level_orbit_reps(P, ntype):
            for chain in survivors:
                candidates += 1
                if candidates > P.enum_ceiling:
                    raise EnumerationCeiling(
                        "candidate enumeration exceeded ceiling")
                record(chain, lev)

    cores = {}
    for alpha in alphas:
        cores[alpha] = frozenset(
            key for key, res in results.items()
            if simplex_in_core(res.vertex_dps, d, alpha))

    # slab: all core simplices plus every face, computed off the witnesses
    slab_keys = set(cores[max(alphas)])
    stack = list(slab_keys)
    faces_of = {}
    while stack:
        dim, key = stack.pop()
        if dim == 0:
            continue
        chain, lev = witnesses[(dim, key)]
        res = results[(dim, key)]
        face_keys = {}
        for r in range(dim + 1):
            sub = [chain[j] for j in range(dim + 1) if j != r]
            fkey, fres = record(sub, lev)
            face_keys[res.vertex_keys[r]] = fres.key
            if fkey not in slab_keys:
                slab_keys.add(fkey)
                stack.append(fkey)
        faces_of[(dim, key)] = face_keys

    C = Complex()
    by_dim = {}
    for dim, key in slab_keys:
        by_dim.setdefault(dim, []).append(key)
    for key in sorted(by_dim.get(0, [])):
        C.add_vertex(key)
    for dim in sorted(by_dim):
        if dim == 0:
            continue
        for key in sorted(by_dim[dim]):
            res = results[(dim, key)]
            verts = tuple(sorted(res.vertex_keys))
            faces = tuple(faces_of[(dim, key)][v] for v in verts)
            C.add_simplex(key, verts, faces)
    C.seal()

    meta = {
        "d": d,
        "q": F.q,
        "level": list(P.level),
        "alpha_max": P.alpha_max,
        "self_identified": sorted(
            key for (dim, key), res in results.items()
            if res.self_identified and (dim, key) in slab_keys),
    }
    E = ExhaustedComplex(C, cores, meta=meta)
    # keep canon data for export and level maps
    E.results = {k: results[k] for k in slab_keys}
    E.witnesses = {k: witnesses[k] for k in slab_keys}
    return E


def quotient_complex(P, alpha):
    return quotient_exhaustion(P, [alpha])


def quotient_sidecar(E):
    """Per-vertex and per-simplex audit data as a JSON-ready dict."""
    verts = {}
    simps = []
    for (dim, key), res in sorted(E.results.items()):
        if dim == 0:
            verts[key] = {
                "type": list(res.vertex_types[0]),
                "level_orbit": key.split("&", 1)[1] if "&" in key else "",
                "delta_p": list(res.vertex_dps[0]),
                "stabilizer_order": res.stab_order,
            }
        else:
            simps.append({
                "key": key,
                "dim": dim,
                "vertices": list(res.vertex_keys),
                "pointed_rotations": list(res.pointed_keys),
                "stabilizer_order": res.stab_order,
            })
    return {"vertices": verts, "simplices": simps, "meta": dict(E.meta)}


# -- level maps --------------------------------------------------------------------

def level_map(P_fine, P_coarse, alphas=None, fine=None, coarse=None):
    """Projection from the finer-level quotient to the coarser one.

    Returns (SimplicialMap, ramification, fine, coarse) where
    ramification maps (dim, fine key) to the stabilizer index e.
    """
    F = P_fine.F
    if P_coarse.F is not F or P_coarse.d != P_fine.d:
        raise LevelsIncompatible("parameter mismatch")
    rem = pdivmod(F, P_fine.level, P_coarse.level)[1]
    if rem:
        raise LevelsIncompatible("coarse level must divide the fine level")
    if fine is None:
        fine = quotient_exhaustion(P_fine, alphas)
    if coarse is None:
        coarse = quotient_exhaustion(P_coarse, alphas)
    maps = {}
    ram = {}
    for (dim, key), res in fine.results.items():
        chain, lev = fine.witnesses[(dim, key)]
        clev = None if P_coarse.full_level else P_coarse.ring.mat_red(
            lev if lev is not None else P_coarse.ring.identity(P_fine.d))
        cres = canon_simplex(P_coarse, chain, clev)
        maps.setdefault(dim, {})[key] = cres.key
        if cres.stab_order % res.stab_order:
            raise ComputationError("stabilizer orders do not divide")
        ram[(dim, key)] = cres.stab_order // res.stab_order
    f = SimplicialMap(fine.slab, coarse.slab, maps)
    return f, ram, fine, coarse
