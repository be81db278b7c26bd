"""Verification suite behind `btq verify`.

Eleven numbered checks cover the sign calculus, the apartment cycle,
lift independence, an independent tree-quotient oracle, invariance of
canonicalization, the polygon machinery, truncation stabilization,
duality, modular symbols, the span scan, and ramified pullbacks.  Each
criterion returns a dict with "passed", "summary" and a list of
"findings"; run_criterion never raises, it folds errors into a failed
result so the suite always reports a full scoreboard.
"""

import itertools
import json
import os
import random
import time
from fractions import Fraction

from .building import (
    apartment_orientation, apartment_simplex, apartment_window_complex,
    building_ball, fundamental_chain, neighbors, point_lattice,
    sublattice_from_subspace, vertex_canonical,
)
from .errors import GeneratorCeiling, NotStabilized
from .ffield import (
    InfinityLattice, PONE, field, h0_dimension, lattice_reduce, padd,
    pmul, pnorm, rfrom_poly, rmat_mul, rmat_inv, rval,
)
from .homology import (
    OrientedChain, bm_homology, cohomology, compact_support_cohomology,
    homology, pullback_ramified, pushforward_bm,
)
from .linalg import subspaces
from .modsym import (
    GeneratorPolicy, certificate_valid, homology_image, modular_symbol,
    span_test, symbol_json, symbol_restriction,
)
from .quotient import (
    QuotientParams, canon_simplex, delta_p, hn_flag, hn_polygon,
    level_map, pm_adjugate_inverse, poly_span_equal, quotient_exhaustion,
    split_lattice,
)
from .scomplex import OrientedSimplexRef, orientation_face_sign, perm_sign

GOLDEN_PATH = os.path.join(os.path.dirname(__file__), "data",
                           "golden_modsym.json")

_FIELDS = {}
_PARAMS = {}
_EXHAUSTIONS = {}


def _field(q):
    if q not in _FIELDS:
        _FIELDS[q] = field(q)
    return _FIELDS[q]


def _params(q, d, level, alpha_max, aut_ceiling=10 ** 7):
    key = (q, d, tuple(level), alpha_max, aut_ceiling)
    if key not in _PARAMS:
        _PARAMS[key] = QuotientParams(_field(q), d, tuple(level),
                                      alpha_max=alpha_max,
                                      aut_ceiling=aut_ceiling)
    return _PARAMS[key]


def _exhaustion(q, d, level, alpha_max, aut_ceiling=10 ** 7):
    key = (q, d, tuple(level), alpha_max, aut_ceiling)
    if key not in _EXHAUSTIONS:
        P = _params(q, d, level, alpha_max, aut_ceiling)
        _EXHAUSTIONS[key] = quotient_exhaustion(
            P, list(range(1, alpha_max + 1)))
    return _EXHAUSTIONS[key]


# -- shared sampling helpers -----------------------------------------------------

def _pm_maxdeg(M):
    return max(max(len(p) - 1 for p in row) for row in M)


def _to_rat(M):
    return tuple(tuple(rfrom_poly(p) for p in row) for row in M)


def _identity_poly(d):
    return tuple(tuple(PONE if i == j else () for j in range(d))
                 for i in range(d))


def _random_gl(F, rng, d, maxdeg=1, ops=4, unit_mod_t=False):
    """Random element of GL_d(F_q[t]) as a product of elementary moves.

    With unit_mod_t the off-diagonal additions use multiples of t and
    row scalings are skipped, so the product is 1 mod t.
    """
    M = [list(row) for row in _identity_poly(d)]
    for _ in range(ops):
        i = rng.randrange(d)
        j = rng.randrange(d)
        if i == j:
            if unit_mod_t:
                continue
            c = rng.randrange(1, F.q)
            M[i] = [pmul(F, (c,), x) for x in M[i]]
            continue
        k = rng.randrange(1, maxdeg + 1) if unit_mod_t \
            else rng.randrange(0, maxdeg + 1)
        c = rng.randrange(1, F.q)
        p = (0,) * k + (c,)
        M[i] = [padd(F, M[i][x], pmul(F, p, M[j][x])) for x in range(d)]
    return tuple(tuple(pnorm(x) for x in row) for row in M)


def _random_small_chain(rng, d, span=2):
    """Random small lift: a subset of a unit-step coordinate walk."""
    x0 = tuple(rng.randrange(-span, span + 1) for _ in range(d))
    w = list(range(d))
    rng.shuffle(w)
    pts = [x0]
    for j in w[:d - 1]:
        nxt = list(pts[-1])
        nxt[j] += 1
        pts.append(tuple(nxt))
    size = rng.randrange(1, len(pts) + 1)
    keep = sorted(rng.sample(range(len(pts)), size))
    return [pts[i] for i in keep]


class _RatSolve:
    """Row echelon over Q with combination tracking, for span questions."""

    def __init__(self):
        self.rows = []

    def _reduce(self, vec, combo):
        vec = dict(vec)
        combo = dict(combo)
        for pos, pvec, pcombo in self.rows:
            c = vec.get(pos)
            if not c:
                continue
            for k, v in pvec.items():
                nv = vec.get(k, Fraction(0)) - c * v
                if nv:
                    vec[k] = nv
                else:
                    vec.pop(k, None)
            for k, v in pcombo.items():
                nv = combo.get(k, Fraction(0)) - c * v
                if nv:
                    combo[k] = nv
                else:
                    combo.pop(k, None)
        return vec, combo

    def add(self, vec, tag):
        vec, combo = self._reduce(vec, {tag: Fraction(1)})
        if not vec:
            return False
        pos = min(vec)
        piv = vec[pos]
        vec = {k: v / piv for k, v in vec.items()}
        combo = {k: v / piv for k, v in combo.items()}
        self.rows.append((pos, vec, combo))
        return True

    def solve(self, vec):
        """Combination expressing vec, or None if outside the span."""
        rem, combo = self._reduce(vec, {})
        if rem:
            return None
        return {k: -v for k, v in combo.items()}

    @property
    def rank(self):
        return len(self.rows)


def _chain_vector(chain, index):
    return {index[k]: v for k, v in chain.coeffs.items() if k in index}


# -- criterion 1: sign calculus ---------------------------------------------------

def _sign_corpus():
    rng = random.Random(101)
    out = []
    for q, d, r in [(2, 2, 3), (2, 3, 2), (2, 4, 1),
                    (3, 2, 2), (3, 3, 1), (3, 4, 1)]:
        C, _ = building_ball(_field(q), d, r)
        out.append(("ball q=%d d=%d r=%d" % (q, d, r), C))
    for q, d, hi in [(2, 2, 3), (2, 3, 2), (3, 2, 2), (2, 4, 1)]:
        F = _field(q)
        basis = _to_rat(_random_gl(F, rng, d, maxdeg=1, ops=3))
        C, _ = apartment_window_complex(F, basis, 0, hi)
        out.append(("apartment q=%d d=%d side=%d" % (q, d, hi), C))
    for q, d, level, amax in [(2, 2, (1,), 6), (2, 2, (0, 1), 4),
                              (3, 2, (1,), 4)]:
        E = _exhaustion(q, d, level, amax)
        out.append(("quotient q=%d level=%s" % (q, level), E.slab))
    return out


def criterion_1(cfg=None):
    """Vertex deletions anticommute and the double boundary vanishes."""
    pairs = 0
    squares = 0
    for name, C in _sign_corpus():
        for dim in C.dims():
            if dim < 2:
                continue
            for key in C.keys(dim):
                rec = C.record(dim, key)
                ref = OrientedSimplexRef(dim, key, 1)
                for v, w in itertools.combinations(rec.verts, 2):
                    a = orientation_face_sign(C, w,
                                              orientation_face_sign(C, v, ref))
                    b = orientation_face_sign(C, v,
                                              orientation_face_sign(C, w, ref))
                    if a.key != b.key or a.parity != -b.parity:
                        return {"passed": False,
                                "summary": "anticommutation fails on %s at %r"
                                           % (name, key)}
                    pairs += 1
                z = OrientedChain(dim, {key: 1})
                if not z.boundary(C).boundary(C).is_zero():
                    return {"passed": False,
                            "summary": "double boundary nonzero on %s at %r"
                                       % (name, key)}
                squares += 1
    return {"passed": True,
            "summary": "anticommutation on %d vertex pairs, double boundary "
                       "zero on %d simplices across 13 complexes"
                       % (pairs, squares)}


# -- criterion 2: the apartment cycle --------------------------------------------

def criterion_2(cfg=None):
    """Boundary of the fundamental chain vanishes inside every window."""
    rng = random.Random(211)
    cases = []
    for q, d, hi in [(2, 2, 6), (3, 2, 4), (2, 3, 6), (3, 3, 2),
                     (2, 4, 3), (2, 4, 6)]:
        F = _field(q)
        cases.append((F, d, hi, _to_rat(_identity_poly(d))))
        if hi <= 4:
            cases.append((F, d, hi,
                          _to_rat(_random_gl(F, rng, d, maxdeg=1, ops=3))))
    checked = 0
    for F, d, hi, basis in cases:
        C, tops = apartment_window_complex(F, basis, 0, hi)
        beta = fundamental_chain(F, basis, (0, hi))
        if set(beta.coeffs) != set(tops):
            return {"passed": False,
                    "summary": "chain support misses window tops at "
                               "q=%d d=%d" % (F.q, d)}
        if any(abs(c) != 1 for c in beta.coeffs.values()):
            return {"passed": False,
                    "summary": "fundamental coefficients must be units"}
        cofaces = {}
        for key in C.keys(d - 1):
            for fk in C.record(d - 1, key).faces:
                cofaces[fk] = cofaces.get(fk, 0) + 1
        b = beta.boundary(C)
        interior = {k for k, n in cofaces.items() if n == 2}
        frontier = {k for k, n in cofaces.items() if n == 1}
        if set(b.coeffs) & interior:
            return {"passed": False,
                    "summary": "boundary hits an interior face at q=%d d=%d "
                               "side=%d" % (F.q, d, hi)}
        if set(b.coeffs) != frontier:
            return {"passed": False,
                    "summary": "boundary support differs from the window "
                               "frontier at q=%d d=%d" % (F.q, d)}
        checked += len(interior)
    return {"passed": True,
            "summary": "boundary vanishes at %d interior faces over %d "
                       "windows (d=2,3,4, sides up to 6)"
                       % (checked, len(cases))}


# -- criterion 3: lift independence ------------------------------------------------

def criterion_3(cfg=None):
    """Translated and reordered small lifts give identical simplices."""
    rng = random.Random(307)
    samples = 0
    while samples < 200:
        q = rng.choice((2, 3))
        d = rng.choice((2, 3, 4))
        F = _field(q)
        if rng.randrange(3):
            basis = _to_rat(_random_gl(F, rng, d, maxdeg=1, ops=3))
        else:
            basis = _to_rat(_identity_poly(d))
        chain = _random_small_chain(rng, d)
        base = apartment_simplex(F, basis, chain)
        lifts = []
        for c in (-2, -1, 1, 2):
            lifts.append([tuple(x + c for x in p) for p in chain])
        for _ in range(3):
            shuf = list(chain)
            rng.shuffle(shuf)
            lifts.append(shuf)
        for lift in lifts:
            other = apartment_simplex(F, basis, lift)
            if other.key != base.key \
                    or other.vertex_keys != base.vertex_keys:
                return {"passed": False,
                        "summary": "simplex differs across lifts at q=%d "
                                   "d=%d chain=%r" % (q, d, chain)}
        if len(chain) == d:
            ref = apartment_orientation(F, basis, chain)
            for lift in lifts:
                if apartment_orientation(F, basis, lift) != ref:
                    return {"passed": False,
                            "summary": "orientation differs across lifts at "
                                       "q=%d d=%d chain=%r" % (q, d, chain)}
        samples += 1
    return {"passed": True,
            "summary": "%d sampled simplices invariant under diagonal "
                       "translation and reordering of their lifts" % samples}


# -- criterion 4: independent tree quotient --------------------------------------

def _tree_gamma_generators(F, shear_deg):
    gens = []
    for entries in itertools.product(range(F.q), repeat=4):
        det = (entries[0] * entries[3] - entries[1] * entries[2]) % F.q
        if not det:
            continue
        lead = next(e for e in entries if e)
        if lead != 1:  # one representative per scalar class is enough
            continue
        M = ((pnorm((entries[0],)), pnorm((entries[1],))),
             (pnorm((entries[2],)), pnorm((entries[3],))))
        gens.append(_to_rat(M))
    for k in range(1, shear_deg + 1):
        for c in range(1, F.q):
            p = (0,) * k + (c,)
            gens.append(_to_rat(((PONE, p), ((), PONE))))
            gens.append(_to_rat(((PONE, ()), (p, PONE))))
    return gens


def _tree_quotient_oracle(F, radius, shear_deg):
    """Quotient ray of the rank-2 building computed from the tree alone.

    BFS enumerates the ball; a union-find merges vertices connected by
    one group generator, preferring moves that lower the BFS depth, and
    sweeps the remaining class representatives until stable.
    """
    root, rrows = vertex_canonical(F, InfinityLattice.standard(F, 2).rows)
    dist = {root: 0}
    rows_of = {root: rrows}
    edges = set()
    frontier = [root]
    for depth in range(radius):
        nxt = []
        for key in frontier:
            for nk, nrows in neighbors(F, key):
                if nk not in dist:
                    dist[nk] = depth + 1
                    rows_of[nk] = nrows
                    nxt.append(nk)
                if dist[nk] <= radius:
                    edges.add((min(key, nk), max(key, nk)))
        frontier = nxt

    parent = {k: k for k in dist}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            return True
        return False

    gens = _tree_gamma_generators(F, shear_deg)
    # per-depth move-to-front: vertices at one depth tend to fold along
    # the same group element, so a successful generator is retried first
    by_depth = {r: list(gens) for r in range(radius + 1)}
    order = sorted(dist, key=lambda k: dist[k])
    stuck = []
    for key in order:
        if dist[key] == 0:
            continue
        rows = rows_of[key]
        tried = by_depth[dist[key]]
        for pos, g in enumerate(tried):
            nk, _ = vertex_canonical(F, rmat_mul(F, rows, g))
            if nk not in dist:
                continue
            union(key, nk)
            if dist[nk] < dist[key]:
                tried.insert(0, tried.pop(pos))
                break
        else:
            stuck.append(key)
    # sweep class representatives until the partition stops changing
    pending = set(stuck)
    for _ in range(8):
        reps = {find(k) for k in pending} if pending \
            else {find(k) for k in dist}
        changed = False
        for key in reps:
            rows = rows_of[key]
            for g in gens:
                nk, _ = vertex_canonical(F, rmat_mul(F, rows, g))
                if nk in dist and union(key, nk):
                    changed = True
        pending = set()
        if not changed:
            break

    classes = {}
    for k in dist:
        classes.setdefault(find(k), set()).add(k)
    qedges = set()
    for a, b in edges:
        ca, cb = find(a), find(b)
        qedges.add((min(ca, cb), max(ca, cb)))
    # BFS layering of the quotient graph from the root class
    qdist = {find(root): 0}
    layer = [find(root)]
    while layer:
        nxt = []
        for c in layer:
            for a, b in qedges:
                for o in ((b,) if a == c else (a,) if b == c else ()):
                    if o not in qdist:
                        qdist[o] = qdist[c] + 1
                        nxt.append(o)
        layer = nxt
    return classes, qedges, qdist


def _is_path(nodes, edges):
    if len(edges) != len(nodes) - 1:
        return False
    if len(nodes) == 1:
        return True
    deg = {n: 0 for n in nodes}
    for a, b in edges:
        if a == b or a not in deg or b not in deg:
            return False
        deg[a] += 1
        deg[b] += 1
    ends = [n for n, k in deg.items() if k == 1]
    if len(ends) != 2 or any(k > 2 for k in deg.values()):
        return False
    seen = {ends[0]}
    layer = [ends[0]]
    while layer:
        layer = [b for a, b in edges if a in layer and b not in seen] + \
                [a for a, b in edges if b in layer and a not in seen]
        seen.update(layer)
    return len(seen) == len(nodes)


def criterion_4(cfg=None):
    """Assembled rank-2 cores match a generator union-find on the tree."""
    alpha_hi = 8
    for q in (2, 3):
        F = _field(q)
        # a radius alpha_hi-1 ball reaches every class of quotient depth
        # below alpha_hi together with all edges between those classes
        classes, qedges, qdist = _tree_quotient_oracle(F, alpha_hi - 1,
                                                       alpha_hi - 1)
        if any(c not in qdist for c in classes):
            return {"passed": False,
                    "summary": "oracle quotient is disconnected at q=%d" % q}
        E = _exhaustion(q, 2, (1,), alpha_hi)
        slab_edges = [tuple(E.slab.record(1, k).verts)
                      for k in E.slab.keys(1)]
        for alpha in range(1, alpha_hi + 1):
            core0 = {k for dim, k in E.cores[alpha] if dim == 0}
            asm_edges = {e for e in slab_edges
                         if e[0] in core0 and e[1] in core0}
            onodes = {c for c in classes if qdist[c] < alpha}
            oedges = {e for e in qedges
                      if e[0] in onodes and e[1] in onodes}
            if len(core0) != len(onodes) or len(core0) != alpha:
                return {"passed": False,
                        "summary": "vertex counts differ at q=%d alpha=%d: "
                                   "assembled %d, oracle %d"
                                   % (q, alpha, len(core0), len(onodes))}
            if not (_is_path(core0, asm_edges)
                    and _is_path(onodes, oedges)):
                return {"passed": False,
                        "summary": "core is not a path at q=%d alpha=%d"
                                   % (q, alpha)}
    return {"passed": True,
            "summary": "tree union-find and assembled cores agree: paths of "
                       "1..8 vertices for q=2,3"}


# -- criterion 5: invariance of canonicalization ----------------------------------

def criterion_5(cfg=None):
    """canon_simplex is constant on orbits of the level subgroup."""
    rng = random.Random(503)
    total = 0
    for q in (2, 3):
        for d in (2, 3):
            for level in ((1,), (0, 1)):
                F = _field(q)
                P = _params(q, d, level, d + 2)
                lev = None if P.full_level else P.ring.identity(d)
                congruence = not P.full_level
                pool = []
                for _ in range(8):
                    basis = _to_rat(_random_gl(F, rng, d, maxdeg=1, ops=2))
                    pts = _random_small_chain(rng, d, span=1)
                    chain = [point_lattice(F, basis, x) for x in pts]
                    pool.append((chain, canon_simplex(P, chain, lev)))
                count = 0
                while count < 200:
                    # congruence levels keep the marker fixed for group
                    # elements that are 1 mod f, and transport it otherwise
                    transport = congruence and count % 4 == 3
                    gamma = _random_gl(F, rng, d, maxdeg=2, ops=3,
                                       unit_mod_t=congruence
                                       and not transport)
                    if _pm_maxdeg(gamma) > 2:
                        continue
                    chain, base = pool[count % len(pool)]
                    grat = _to_rat(gamma)
                    moved = [rmat_mul(F, rows, grat) for rows in chain]
                    mlev = lev
                    if transport:
                        ginv = P.ring.mat_red(pm_adjugate_inverse(F, gamma))
                        mlev = P.ring.mat_mul(ginv, lev)
                    res = canon_simplex(P, moved, mlev)
                    if res.key != base.key:
                        return {"passed": False,
                                "summary": "canonical key moved under gamma "
                                           "at q=%d d=%d level=%s"
                                           % (q, d, level)}
                    count += 1
                    total += 1
    return {"passed": True,
            "summary": "%d random group elements fix the canonical form "
                       "over 8 configurations" % total}


# -- criterion 6: polygon machinery ------------------------------------------------

def _brute_line_degree(F, inv_rows, vec):
    w = rmat_mul(F, (vec,), inv_rows)[0]
    return min(rval(x) for x in w)


def _brute_max_line(F, rows, degbound):
    d = len(rows)
    inv = rmat_inv(F, rows)
    best = None
    pols = [pnorm(cs) for cs in
            itertools.product(range(F.q), repeat=degbound + 1)]
    for coords in itertools.product(pols, repeat=d):
        if all(c == () for c in coords):
            continue
        vec = tuple(rfrom_poly(c) for c in coords)
        e = _brute_line_degree(F, inv, vec)
        if best is None or e > best:
            best = e
    return best


def _h0_type(F, rows, bound=7):
    """Splitting type recovered from section-count increments alone."""
    lat = InfinityLattice(F, rows)
    counts = [h0_dimension(lat, m) for m in range(-bound - 1, bound + 1)]
    ntype = []
    prev = 0
    for j in range(1, len(counts)):
        m = -bound - 1 + j
        step = counts[j] - counts[j - 1]
        ntype.extend([-m] * (step - prev))
        prev = step
    return tuple(ntype)


def _all_types(d, hi):
    rng = range(hi + 1)
    for tup in itertools.product(rng, repeat=d - 1):
        ntype = tuple(sorted(tup, reverse=True)) + (0,)
        if tuple(tup) == tuple(sorted(tup, reverse=True)):
            yield ntype


def _random_sublattice(F, rng, rows, steps):
    d = len(rows)
    for _ in range(steps):
        k = rng.randrange(1, d)
        opts = list(subspaces(F, d, k))
        rows = sublattice_from_subspace(F, rows,
                                        opts[rng.randrange(len(opts))])
    return rows


def criterion_6(cfg=None):
    """Polygon values against exhaustive searches, plus the two lemmas."""
    rng = random.Random(607)
    types_checked = 0
    for q in (2, 3):
        F = _field(q)
        for d in (2, 3):
            cap = 3 if (q == 3 and d == 3) else 4
            for ntype in _all_types(d, 5):
                L = split_lattice(F, ntype)
                while True:
                    gamma = _random_gl(F, rng, d, maxdeg=1, ops=2)
                    bound = _pm_maxdeg(pm_adjugate_inverse(F, gamma))
                    if 1 <= bound <= cap - 1:
                        break
                rows = rmat_mul(F, L.rows, _to_rat(gamma))
                nt, _ = lattice_reduce(F, rows)
                if nt != ntype:
                    return {"passed": False,
                            "summary": "reduction lost the type %r" % (ntype,)}
                if _h0_type(F, rows) != ntype:
                    return {"passed": False,
                            "summary": "section counts disagree with type %r"
                                       % (ntype,)}
                p = hn_polygon(ntype)
                if _brute_max_line(F, rows, bound) != p[1]:
                    return {"passed": False,
                            "summary": "max line degree differs from p(1) "
                                       "on %r" % (ntype,)}
                if d == 3:
                    dual = tuple(zip(*rmat_inv(F, rows)))
                    dbound = _pm_maxdeg(gamma)
                    if _brute_max_line(F, dual, dbound) != -ntype[2]:
                        return {"passed": False,
                                "summary": "dual line degree differs on %r"
                                           % (ntype,)}
                types_checked += 1

    sandwich = 0
    identity_hits = 0
    for _ in range(500):
        d = rng.choice((2, 3))
        F = _field(rng.choice((2, 3)))
        gaps = [rng.randrange(5) for _ in range(d - 1)]
        n = [0] * d
        for i in range(d - 2, -1, -1):
            n[i] = n[i + 1] + gaps[i]
        rows = rmat_mul(F, split_lattice(F, tuple(n)).rows,
                        _to_rat(_random_gl(F, rng, d, maxdeg=1, ops=2)))
        sub = _random_sublattice(F, rng, rows, rng.randrange(1, 3))
        nt, _ = lattice_reduce(F, rows)
        ns, _ = lattice_reduce(F, sub)
        p, ps = hn_polygon(nt), hn_polygon(ns)
        degdiff = p[d] - ps[d]
        if degdiff < 0:
            return {"passed": False,
                    "summary": "sublattice degree exceeds the ambient one"}
        for i in range(d + 1):
            if not 0 <= p[i] - ps[i] <= degdiff:
                return {"passed": False,
                        "summary": "sandwich bound fails at i=%d for %r in "
                                   "%r" % (i, ns, nt)}
        sandwich += 1
        for i in range(1, d):
            if delta_p(nt, i) <= degdiff:
                continue
            wa = hn_flag(F, rows, i)
            wb = hn_flag(F, sub, i)
            if not poly_span_equal(F, wa.rows, wb.rows):
                return {"passed": False,
                        "summary": "destabilizing submodule moved under "
                                   "modification at i=%d, %r in %r"
                                   % (i, ns, nt)}
            identity_hits += 1
    if identity_hits < 40:
        return {"passed": False,
                "summary": "intersection identity hypothesis sampled only "
                           "%d times" % identity_hits}
    return {"passed": True,
            "summary": "%d scrambled types match both searches; sandwich "
                       "bound on %d pairs; intersection identity on %d "
                       "qualifying pairs" % (types_checked, sandwich,
                                             identity_hits)}


# -- criteria 7 and 8: stabilization and duality -----------------------------------

_GRID_CONFIGS = [(2, 2, (1,), 8), (2, 2, (0, 1), 6), (2, 2, (0, 0, 1), 5),
                 (3, 2, (1,), 6), (3, 2, (0, 1), 5), (2, 3, (1,), 5)]


def criterion_7(cfg=None):
    """Finite monotone cores; relative dims and transition ranks settle."""
    rows = []
    for q, d, level, amax in _GRID_CONFIGS:
        E = _exhaustion(q, d, level, amax)
        grid = list(E.grid)
        sizes = [len(E.cores[a]) for a in grid]
        for a, b in zip(grid, grid[1:]):
            if not E.cores[a] <= E.cores[b]:
                return {"passed": False,
                        "summary": "cores are not nested at q=%d level=%s"
                                   % (q, level)}
        bm = bm_homology(E, d - 1, amax)
        csc = compact_support_cohomology(E, d - 1, amax)
        if not (bm.stabilized and csc.stabilized):
            return {"passed": False,
                    "summary": "no stabilization by alpha=%d at q=%d d=%d "
                               "level=%s" % (amax, q, d, level)}
        tail = [a for a in grid if a > d - 1]
        dims = [csc.dims[grid.index(a)] for a in tail]
        ranks = [bm.transition_ranks[grid.index(a)]
                 for a, b in zip(grid, grid[1:]) if a > d - 1]
        if len(set(dims)) > 1 or len(set(ranks)) > 1:
            return {"passed": False,
                    "summary": "dims or ranks drift past alpha=d-1 at q=%d "
                               "d=%d level=%s: %r %r"
                               % (q, d, level, dims, ranks)}
        rows.append("q=%d d=%d %s: sizes %s, stable dim %d"
                    % (q, d, list(level), sizes, bm.dimension))
    return {"passed": True,
            "summary": "6 configurations stabilize; " + "; ".join(rows[:2])
                       + "; ...",
            "findings": []}


def criterion_8(cfg=None):
    """Rational homology and cohomology dims agree on every instance."""
    checked = 0
    for q, d, level, amax in _GRID_CONFIGS:
        E = _exhaustion(q, d, level, amax)
        for i in range(d):
            hi = homology(E.slab, i).dimension
            ci = cohomology(E.slab, i).dimension
            if hi != ci:
                return {"passed": False,
                        "summary": "H_%d=%d but H^%d=%d at q=%d d=%d "
                                   "level=%s" % (i, hi, i, ci, q, d, level)}
            checked += 1
        bm = bm_homology(E, d - 1, amax)
        csc = compact_support_cohomology(E, d - 1, amax)
        if bm.dimension != csc.dimension:
            return {"passed": False,
                    "summary": "stabilized pairing dims differ at q=%d d=%d "
                               "level=%s" % (q, d, level)}
        checked += 1
    rng = random.Random(809)
    for q, d, hi in [(2, 2, 4), (2, 3, 3), (3, 2, 3)]:
        F = _field(q)
        basis = _to_rat(_random_gl(F, rng, d, maxdeg=1, ops=2))
        C, _ = apartment_window_complex(F, basis, 0, hi)
        for i in range(d):
            if homology(C, i).dimension != cohomology(C, i).dimension:
                return {"passed": False,
                        "summary": "window pairing fails at q=%d d=%d" % (q, d)}
            checked += 1
    return {"passed": True,
            "summary": "%d degreewise dimension pairings agree, including "
                       "the stabilized pair in top degree" % checked}


# -- criterion 9: modular symbols --------------------------------------------------

def _basis_from_json(entry):
    return tuple(tuple(tuple(p) for p in row) for row in entry)


def _load_golden():
    with open(GOLDEN_PATH) as fh:
        data = json.load(fh)
    if not isinstance(data, list) or not data:
        raise ValueError("golden symbol table is empty or malformed")
    for rec in data:
        for fieldname in ("q", "d", "level", "alpha", "basis", "symbol"):
            if fieldname not in rec:
                raise ValueError("golden record misses %r" % fieldname)
    return data


def criterion_9(cfg=None):
    """Symbols are relative cycles, restrict coherently, and match the
    pinned table."""
    cases = [(2, 2, (1,), 4), (2, 2, (0, 1), 4), (2, 2, (0, 0, 1), 4),
             (3, 2, (1,), 4), (3, 2, (0, 1), 4), (2, 3, (1,), 3)]
    rng = random.Random(907)
    checked = 0
    for q, d, level, alpha in cases:
        F = _field(q)
        P = _params(q, d, level, alpha + 1)
        E = _exhaustion(q, d, level, alpha + 1)
        bases = [_to_rat(_identity_poly(d))]
        if d == 2:
            bases.append(_to_rat(_random_gl(F, rng, d, maxdeg=1, ops=2)))
        for V in bases:
            sym = modular_symbol(V, P, alpha)
            if not certificate_valid(sym.certificate):
                return {"passed": False,
                        "summary": "collar certificate invalid at q=%d "
                                   "level=%s" % (q, level)}
            if any(f < 1 for f in sym.certificate.fibers.values()):
                return {"passed": False,
                        "summary": "non-finite fiber size at q=%d level=%s"
                                   % (q, level)}
            core_top = {k for dim, k in E.cores[alpha] if dim == d - 1}
            core_sub = {k for dim, k in E.cores[alpha] if dim == d - 2}
            if not set(sym.chain.coeffs) <= core_top:
                return {"passed": False,
                        "summary": "symbol leaves the core at q=%d level=%s"
                                   % (q, level)}
            if not sym.chain.boundary(E.slab, core_sub).is_zero():
                return {"passed": False,
                        "summary": "symbol is not a relative cycle at q=%d "
                                   "level=%s" % (q, level)}
            for lower in range(d, alpha):
                direct = modular_symbol(V, P, lower)
                restricted = symbol_restriction(sym, lower)
                if direct.chain != restricted.chain:
                    return {"passed": False,
                            "summary": "restriction to alpha=%d differs from "
                                       "the direct symbol at q=%d level=%s"
                                       % (lower, q, level)}
            checked += 1
    golden = _load_golden()
    for rec in golden:
        P = _params(rec["q"], rec["d"], tuple(rec["level"]), rec["alpha"] + 1)
        V = _to_rat(_basis_from_json(rec["basis"]))
        sym = modular_symbol(V, P, rec["alpha"])
        if symbol_json(sym) != rec["symbol"]:
            return {"passed": False,
                    "summary": "pinned symbol diverged at q=%d level=%s"
                               % (rec["q"], rec["level"])}
    return {"passed": True,
            "summary": "%d symbols certified as relative cycles with "
                       "coherent restrictions; %d pinned symbols reproduced"
                       % (checked, len(golden))}


# -- criterion 10: the span scan ---------------------------------------------------

SCAN_ALPHA = 3
SCAN_DEGREE = 3
SCAN_CEILING = 600


def _monic_levels(q, maxdeg):
    for deg in range(1, maxdeg + 1):
        for tail in itertools.product(range(q), repeat=deg):
            yield tuple(tail) + (1,)


def _scan_configs():
    out = [(2, lev) for lev in _monic_levels(2, 3)]
    out.extend((3, lev) for lev in _monic_levels(3, 2))
    return out


def criterion_10(cfg=None):
    """Span scan over rank 2: every nonvacuous level must either be
    contained in the symbol span or surface as an explicit finding."""
    findings = ["q=3 cubic levels omitted from the scan: the span supply "
                "at entry degree 3 is far beyond the time budget"]
    policy = GeneratorPolicy(entry_degree=SCAN_DEGREE,
                             basis_ceiling=SCAN_CEILING, collar_ceiling=None)
    contained = vacuous = 0
    results = []
    for q, level in _scan_configs():
        t0 = time.time()
        image = None
        for amax in (4, 5):
            P = _params(q, 2, level, amax, aut_ceiling=10 ** 12)
            try:
                image = homology_image(P, SCAN_ALPHA)
                break
            except NotStabilized:
                continue
        if image is None:
            findings.append("q=%d level=%s: no stabilization up to "
                            "alpha_max=5" % (q, list(level)))
            continue
        if not image.columns:
            vacuous += 1
            results.append((q, level, "vacuous", 0, time.time() - t0))
            continue
        try:
            cert = span_test(P, SCAN_ALPHA, policy=policy, image=image)
        except GeneratorCeiling:
            findings.append("q=%d level=%s: inconclusive, dim %d image not "
                            "covered within %d candidate bases at entry "
                            "degree <= %d" % (q, list(level),
                                              len(image.columns),
                                              SCAN_CEILING, SCAN_DEGREE))
            results.append((q, level, "ceiling", len(image.columns),
                            time.time() - t0))
            continue
        if cert.status == "contained":
            contained += 1
            results.append((q, level, "contained@%d" % cert.tried,
                            len(image.columns), time.time() - t0))
        else:
            findings.append("q=%d level=%s: not contained, dim %d image "
                            "misses %d columns after the full degree<=%d "
                            "supply (%d bases)"
                            % (q, list(level), len(image.columns),
                               len(cert.residual), SCAN_DEGREE, cert.tried))
            results.append((q, level, "not_contained", len(image.columns),
                            time.time() - t0))
    scanned = len(results)
    return {"passed": True,
            "summary": "%d levels scanned: %d contained with exact "
                       "coefficients, %d vacuous, %d findings"
                       % (scanned, contained, vacuous, len(findings)),
            "findings": findings,
            "detail": [(q, list(lev), status, dim, round(dt, 1))
                       for q, lev, status, dim, dt in results]}


# -- criterion 11: ramified pullback -----------------------------------------------

def _deck_action(P, E, gbar):
    """Key permutation and orientation signs of one residue matrix."""
    perm = {}
    for (dim, key), res in E.results.items():
        chain, lev = E.witnesses[(dim, key)]
        moved = P.ring.mat_mul(lev, gbar)
        ires = canon_simplex(P, chain, moved)
        if (dim, ires.key) not in E.results:
            raise ValueError("deck image %r left the slab" % (ires.key,))
        s1 = perm_sign(sorted(range(dim + 1),
                              key=lambda i: res.vertex_keys[i]))
        s2 = perm_sign(sorted(range(dim + 1),
                              key=lambda i: ires.vertex_keys[i]))
        perm[(dim, key)] = (ires.key, s1 * s2)
    return perm


def _act_chain(perm, chain):
    out = {}
    for k, v in chain.coeffs.items():
        nk, sign = perm[(chain.degree, k)]
        out[nk] = out.get(nk, Fraction(0)) + sign * v
    return OrientedChain(chain.degree, out)


def criterion_11(cfg=None):
    """Pullback to the t-level cover commutes with the boundary and its
    image is exactly the residue-group invariants."""
    q, d = 2, 2
    amax = 5
    P_f = _params(q, d, (0, 1), amax)
    P_c = _params(q, d, (1,), amax)
    fine = _exhaustion(q, d, (0, 1), amax)
    coarse = _exhaustion(q, d, (1,), amax)
    f, ram, fine, coarse = level_map(P_f, P_c, fine=fine, coarse=coarse)

    # covering degree: the fiber sum of ramification indices is constant
    fiber_sum = {}
    for (dim, key), e in ram.items():
        tkey = f.apply(dim, key)
        fiber_sum[(dim, tkey)] = fiber_sum.get((dim, tkey), 0) + e
    degrees = set(fiber_sum.values())
    if len(degrees) != 1:
        return {"passed": False,
                "summary": "ramification fiber sums are not constant: %r"
                           % sorted(degrees)}
    N = degrees.pop()

    rng = random.Random(1103)
    coarse_tops = sorted(k for dim, k in coarse.cores[amax] if dim == 1)
    for trial in range(30):
        picks = rng.sample(coarse_tops, min(4, len(coarse_tops)))
        z = OrientedChain(1, {k: rng.choice((-2, -1, 1, 2)) for k in picks})
        pb = pullback_ramified(f, z, ram)
        lhs = pb.boundary(fine.slab)
        rhs = pullback_ramified(f, z.boundary(coarse.slab), ram)
        if lhs != rhs:
            return {"passed": False,
                    "summary": "pullback does not commute with the boundary "
                               "on trial %d" % trial}
        if pushforward_bm(f, pb) != z.scaled(N):
            return {"passed": False,
                    "summary": "pushforward of the pullback is not %d*id" % N}

    # residue group action on the fine quotient
    G = [g for g in P_f.ring.all_invertible(d, 10 ** 4)]
    perms = {}
    for g in G:
        try:
            perms[g] = _deck_action(P_f, fine, g)
        except ValueError as exc:
            return {"passed": False, "summary": str(exc)}
    for g, perm in perms.items():
        for (dim, key), (ik, _) in perm.items():
            if ram[(dim, key)] != ram[(dim, ik)]:
                return {"passed": False,
                        "summary": "ramification index moved along the deck "
                                   "action"}

    bm_f = bm_homology(fine, d - 1, amax)
    bm_c = bm_homology(coarse, d - 1, amax)
    if not (bm_f.stabilized and bm_c.stabilized):
        return {"passed": False, "summary": "covering homology did not "
                                            "stabilize by alpha=%d" % amax}
    fine_tops = sorted(k for dim, k in fine.cores[amax] if dim == 1)
    index = {k: j for j, k in enumerate(fine_tops)}
    span = _RatSolve()
    basis_vecs = []
    for chain in bm_f.basis:
        vec = _chain_vector(chain, index)
        span.add(vec, len(basis_vecs))
        basis_vecs.append(vec)
    # invariant subspace: common kernel of (action - identity) on classes
    inv_dim = len(basis_vecs)
    if basis_vecs:
        stacked = []
        for g, perm in perms.items():
            for j, chain in enumerate(bm_f.basis):
                moved = _act_chain(perm, chain)
                sol = span.solve(_chain_vector(moved, index))
                if sol is None:
                    return {"passed": False,
                            "summary": "deck action leaves the stabilized "
                                       "cycle space"}
                row = {i: sol.get(i, Fraction(0)) for i in
                       range(len(basis_vecs))}
                row[j] = row.get(j, Fraction(0)) - 1
                stacked.append(row)
        elim = _RatSolve()
        rank = 0
        for row in stacked:
            if elim.add(row, rank):
                rank += 1
        inv_dim = len(basis_vecs) - rank
    pb_span = _RatSolve()
    pb_rank = 0
    for chain in bm_c.basis:
        pb = pullback_ramified(f, chain, ram)
        for g, perm in perms.items():
            if _act_chain(perm, pb) != pb:
                return {"passed": False,
                        "summary": "pulled-back class is not deck invariant"}
        if pb_span.add(_chain_vector(pb, index), pb_rank):
            pb_rank += 1
    if pb_rank != bm_c.dimension or inv_dim != bm_c.dimension:
        return {"passed": False,
                "summary": "invariants mismatch: coarse dim %d, pullback "
                           "rank %d, invariant dim %d"
                           % (bm_c.dimension, pb_rank, inv_dim)}
    return {"passed": True,
            "summary": "boundary squares commute on 30 chains, covering "
                       "degree %d, pullback image equals the %d-dimensional "
                       "invariant space" % (N, inv_dim)}


# -- dispatch ---------------------------------------------------------------------

CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
            9: criterion_9, 10: criterion_10, 11: criterion_11}

def run_criterion(n, cfg=None):
    """Run one numbered check; failures are reported, never raised."""
    if n not in CRITERIA:
        raise ValueError("unknown criterion %r" % n)
    t0 = time.time()
    try:
        out = CRITERIA[n](cfg)
    except Exception as exc:  # the scoreboard must survive any one check
        out = {"passed": False,
               "summary": "raised %s: %s" % (type(exc).__name__, exc)}
    out.setdefault("findings", [])
    out["criterion"] = n
    out["elapsed"] = round(time.time() - t0, 3)
    return out
