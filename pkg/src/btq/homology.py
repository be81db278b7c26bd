"""Exact cellular homology over Q, plus the Borel-Moore variant computed
through an exhaustion by finite cores.

Chains are sparse maps from simplex keys to rationals, always expressed
against the canonical (ascending vertex key) orientation.  The boundary
of a simplex deletes each vertex with the sign of its 1-indexed position,
so for an edge {a, b} with a < b the boundary is [a] - [b].

Relative computations against a frontier subcomplex drop every
coefficient that lands on a frontier simplex.  Because frontiers are
closed under faces (equivalently: cores are closed under cofaces), the
restriction of a relative cycle to a smaller core is again a relative
cycle, which is what makes the limit over cores well defined.
"""

from __future__ import annotations

import json
from collections import namedtuple
from fractions import Fraction

from .errors import (
    ComputationError, CoreUnavailable, MissingRamificationData,
    NonFiniteFiber, SupportExceedsCore,
)
from .linalg import RatSpan, rat_echelon, rat_nullspace
from .scomplex import check_finite_map

HomologyResult = namedtuple("HomologyResult",
                            "degree dimension basis ranks")
BMResult = namedtuple(
    "BMResult",
    "degree grid dims transition_ranks stabilized dimension basis")


class OrientedChain:
    """Sparse rational chain in a fixed degree, canonical parities only."""

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree, coeffs=None):
        self.degree = degree
        self.coeffs = {}
        if coeffs:
            for k, v in coeffs.items():
                v = Fraction(v)
                if v:
                    self.coeffs[k] = v

    def copy(self):
        return OrientedChain(self.degree, self.coeffs)

    def support(self):
        return set(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def get(self, key):
        return self.coeffs.get(key, Fraction(0))

    def add(self, other, scale=1):
        if other.degree != self.degree:
            raise ComputationError("degree mismatch in chain addition")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            nv = out.get(k, Fraction(0)) + Fraction(scale) * v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        return OrientedChain(self.degree, out)

    def scaled(self, c):
        c = Fraction(c)
        return OrientedChain(self.degree,
                             {k: c * v for k, v in self.coeffs.items()} if c
                             else {})

    def restrict(self, keys):
        keys = set(keys)
        return OrientedChain(self.degree,
                             {k: v for k, v in self.coeffs.items()
                              if k in keys})

    def boundary(self, C, core_keys=None):
        """Boundary chain; coefficients landing outside core_keys (a set of
        degree-1 keys, when given) are discarded."""
        out = {}
        for key, c in self.coeffs.items():
            rec = C.record(self.degree, key)
            for p, fk in enumerate(rec.faces):
                if core_keys is not None and fk not in core_keys:
                    continue
                sign = 1 if (p + 1) % 2 == 0 else -1
                nv = out.get(fk, Fraction(0)) + sign * c
                if nv:
                    out[fk] = nv
                else:
                    out.pop(fk, None)
        return OrientedChain(self.degree - 1, out)

    def to_json(self):
        return json.dumps([[k, v.numerator, v.denominator]
                           for k, v in sorted(self.coeffs.items())])

    @classmethod
    def from_json(cls, degree, text):
        data = json.loads(text)
        return cls(degree, {k: Fraction(n, d) for k, n, d in data})

    def __eq__(self, other):
        return (isinstance(other, OrientedChain)
                and self.degree == other.degree
                and self.coeffs == other.coeffs)

    def __repr__(self):
        items = ", ".join("%s: %s" % (k, v)
                          for k, v in sorted(self.coeffs.items())[:6])
        more = "" if len(self.coeffs) <= 6 else ", ..."
        return "OrientedChain(%d, {%s%s})" % (self.degree, items, more)


BoundaryMatrix = namedtuple("BoundaryMatrix", "degree row_keys col_keys rows")


def boundary_matrix(C, i, core=None):
    """Sparse matrix of the degree-i boundary map.

    core: optional set of (dim, key) pairs; both chain groups are then
    restricted to the core and coefficients landing outside are dropped.
    rows[r] is a sparse dict {col_index: +-1}.
    """
    def keys(dim):
        ks = C.keys(dim)
        if core is not None:
            ks = [k for k in ks if (dim, k) in core]
        return ks

    col_keys = keys(i)
    row_keys = keys(i - 1) if i >= 1 else []
    row_index = {k: r for r, k in enumerate(row_keys)}
    rows = [dict() for _ in row_keys]
    for c, key in enumerate(col_keys):
        rec = C.record(i, key)
        for p, fk in enumerate(rec.faces):
            r = row_index.get(fk)
            if r is None:
                continue
            sign = 1 if (p + 1) % 2 == 0 else -1
            cur = rows[r].get(c, 0) + sign
            if cur:
                rows[r][c] = cur
            else:
                rows[r].pop(c, None)
    return BoundaryMatrix(i, tuple(row_keys), tuple(col_keys), rows)


def matrix_to_text(B):
    """Sparse triplet dump: row_key col_key value."""
    lines = []
    for r, row in enumerate(B.rows):
        for c in sorted(row):
            lines.append("%s\t%s\t%d" % (B.row_keys[r], B.col_keys[c], row[c]))
    return "\n".join(lines) + ("\n" if lines else "")


def _transpose_rows(B):
    cols = [dict() for _ in B.col_keys]
    for r, row in enumerate(B.rows):
        for c, v in row.items():
            cols[c][r] = v
    return cols


def _chain_from_vector(degree, col_keys, vec):
    return OrientedChain(degree, {col_keys[j]: v for j, v in vec.items()})


def _echelon_chains(degree, col_keys, vectors):
    """Reduce representative vectors among themselves for reproducibility."""
    ech = rat_echelon([dict(v) for v in vectors])
    return [_chain_from_vector(degree, col_keys, ech[c])
            for c in sorted(ech)]


def _homology_core(C, i, core):
    Ai = boundary_matrix(C, i, core)
    Au = boundary_matrix(C, i + 1, core)
    n = len(Ai.col_keys)
    kernel = rat_nullspace(Ai.rows, n)
    image_span = RatSpan()
    img_rank = 0
    for col in _transpose_rows(Au):
        if image_span.add(col):
            img_rank += 1
    reps = []
    for vec in kernel:
        if image_span.add(vec):
            reps.append(vec)
    dim = len(kernel) - img_rank
    assert dim == len(reps)
    basis = _echelon_chains(i, Ai.col_keys, reps)
    ranks = {"chains": n, "kernel": len(kernel), "boundary_rank": img_rank,
             "rank_lower": n - len(kernel)}
    return HomologyResult(i, dim, basis, ranks)


def homology(C, i):
    """H_i(C; Q) with an echelonized cycle basis."""
    return _homology_core(C, i, None)


def relative_homology(C, excluded, i):
    """H_i(C, A; Q) for the subcomplex A given as a set of (dim, key)."""
    excluded = set(excluded)
    core = {s for s in C.all_simplices() if s not in excluded}
    return _homology_core(C, i, core)


def cohomology(C, i, core=None):
    """H^i over Q, computed on the transposed complex (independent route;
    the dimension must agree with H_i by universal coefficients)."""
    Ai = boundary_matrix(C, i, core)
    Au = boundary_matrix(C, i + 1, core)
    n = len(Ai.col_keys)
    # delta^i as rows indexed by degree-(i+1) simplices
    dup_rows = [dict() for _ in Au.col_keys]
    for r, row in enumerate(Au.rows):
        for c, v in row.items():
            dup_rows[c][r] = v
    kernel = rat_nullspace(dup_rows, n)
    # delta^{i-1}: image inside C^i, spanned by rows of Ai transposed twice:
    # delta^{i-1}(f)(sigma) = f(boundary sigma), i.e. columns over C^{i-1}
    img = RatSpan()
    img_rank = 0
    for row in Ai.rows:  # each degree-(i-1) simplex gives a cochain on C_i
        if img.add(row):
            img_rank += 1
    reps = []
    for vec in kernel:
        if img.add(vec):
            reps.append(vec)
    dim = len(kernel) - img_rank
    basis = _echelon_chains(i, Ai.col_keys, reps)
    return HomologyResult(i, dim, basis,
                          {"cochains": n, "kernel": len(kernel),
                           "coboundary_rank": img_rank})


def _stable_tail(values, G=3):
    if len(values) < G:
        return False
    tail = values[-G:]
    return all(v == tail[0] for v in tail)


def bm_homology(E, degree, alpha_max, G=3):
    """Borel-Moore homology in one degree via the exhaustion by cores.

    Computes dim H_degree(X, X^(alpha)) for every grid alpha <= alpha_max,
    the ranks of the restriction transitions, and flags stabilization when
    dimensions and transition ranks are constant over the final G grid
    points.  The stabilized basis lives on the largest core.
    """
    grid = [a for a in E.grid if a <= alpha_max]
    if len(grid) < G:
        raise CoreUnavailable(
            "need at least %d cores up to alpha_max=%r, have %d"
            % (G, alpha_max, len(grid)))
    per_alpha = {}
    for a in grid:
        core = E.core(a)
        res = _homology_core(E.slab, degree, core)
        per_alpha[a] = res
    dims = [per_alpha[a].dimension for a in grid]
    # transition: restrict cycles on core(alpha') to core(alpha), compute
    # the rank of the induced map on relative homology
    transition_ranks = []
    for a_small, a_big in zip(grid, grid[1:]):
        small_core = E.core(a_small)
        # boundaries inside the small pair, as vectors over its row indices
        Au = boundary_matrix(E.slab, degree + 1, small_core)
        row_of = {k: r for r, k in enumerate(Au.row_keys)}
        span = RatSpan()
        for col in _transpose_rows(Au):
            span.add(col)
        rank = 0
        for chain in per_alpha[a_big].basis:
            vec = {row_of[k]: v for k, v in chain.coeffs.items()
                   if k in row_of}
            if span.add(vec):
                rank += 1
        transition_ranks.append(rank)
    stabilized = (_stable_tail(dims, G)
                  and _stable_tail(transition_ranks, max(1, G - 1)))
    top = grid[-1]
    return BMResult(degree, tuple(grid), tuple(dims),
                    tuple(transition_ranks), stabilized,
                    dims[-1], per_alpha[top].basis)


def compact_support_cohomology(E, degree, alpha_max, G=3):
    """H^degree_c via the colimit of relative cohomology over cores.

    Transition maps are extensions by zero (inclusions of cochain groups),
    which are cochain maps exactly because frontiers are coface-closed.
    Returns a BMResult-shaped record (dims, transition ranks, stabilized).
    """
    grid = [a for a in E.grid if a <= alpha_max]
    if len(grid) < G:
        raise CoreUnavailable(
            "need at least %d cores up to alpha_max=%r, have %d"
            % (G, alpha_max, len(grid)))
    per_alpha = {}
    for a in grid:
        per_alpha[a] = cohomology(E.slab, degree, core=E.core(a))
    dims = [per_alpha[a].dimension for a in grid]
    transition_ranks = []
    for a_small, a_big in zip(grid, grid[1:]):
        big_core = E.core(a_big)
        Ai_big = boundary_matrix(E.slab, degree, big_core)
        span = RatSpan()
        for row in Ai_big.rows:
            span.add(row)
        # reindex small-core cocycles into big-core columns
        col_of = {k: j for j, k in enumerate(Ai_big.col_keys)}
        rank = 0
        for chain in per_alpha[a_small].basis:
            vec = {col_of[k]: v for k, v in chain.coeffs.items()}
            if span.add(vec):
                rank += 1
        transition_ranks.append(rank)
    stabilized = (_stable_tail(dims, G)
                  and _stable_tail(transition_ranks, max(1, G - 1)))
    top = grid[-1]
    return BMResult(degree, tuple(grid), tuple(dims),
                    tuple(transition_ranks), stabilized,
                    dims[-1], per_alpha[top].basis)


def canonical_map(z, E, alpha_max=None):
    """Restrictions of a finitely supported cycle to every core.

    z must be a cycle supported inside core(alpha_max); the result is the
    compatible family {alpha: z| core(alpha)} realizing the canonical map
    from homology to the exhaustion limit.
    """
    grid = [a for a in E.grid if alpha_max is None or a <= alpha_max]
    if not grid:
        raise CoreUnavailable("no cores up to alpha_max=%r" % (alpha_max,))
    top_keys = {k for (d, k) in E.core(grid[-1]) if d == z.degree}
    if not z.support() <= top_keys:
        raise SupportExceedsCore(
            "cycle support leaves core(%r)" % (grid[-1],))
    if not z.boundary(E.slab).is_zero():
        raise ComputationError("input chain is not a cycle")
    out = {}
    for a in grid:
        keys = {k for (d, k) in E.core(a) if d == z.degree}
        out[a] = z.restrict(keys)
    return out


def pushforward_bm(f, chain, verify_fibers=False, fiber_ceiling=1 << 16):
    """Pushforward of a chain along a finite simplicial map.

    The coefficient at a target simplex is the signed sum over its
    preimages, with the orientation transport sign of the map.
    """
    if verify_fibers:
        targets = {(chain.degree, f.apply(chain.degree, k))
                   for k in chain.coeffs}
        rep = check_finite_map(f, targets, fiber_ceiling=fiber_ceiling)
        if rep["flags"] or rep["truncated"]:
            raise NonFiniteFiber("fibers exceed ceiling over %r"
                                 % (rep["flags"],))
    out = {}
    for key, c in chain.coeffs.items():
        tkey = f.apply(chain.degree, key)
        sign = f.orientation_sign(chain.degree, key)
        nv = out.get(tkey, Fraction(0)) + sign * c
        if nv:
            out[tkey] = nv
        else:
            out.pop(tkey, None)
    return OrientedChain(chain.degree, out)


def pullback_ramified(f, chain, ram):
    """Pullback along a level covering with ramification indices.

    f maps the fine complex to the coarse one; chain lives on the coarse
    side.  The output coefficient on a fine simplex s' is
    e(s') * sign_f(s') * chain(f(s')), with e looked up in ram as
    {(dim, key): positive integer}.
    """
    degree = chain.degree
    out = {}
    for key in f.maps.get(degree, {}):
        tkey = f.apply(degree, key)
        c = chain.coeffs.get(tkey)
        if not c:
            continue
        e = ram.get((degree, key))
        if e is None:
            raise MissingRamificationData(
                "no ramification index for %d-simplex %r" % (degree, key))
        sign = f.orientation_sign(degree, key)
        out[key] = Fraction(e) * sign * c
    return OrientedChain(degree, out)
