"""Exact linear algebra used by the homology and quotient code.

Two flavors live here:

* sparse elimination over Q (rows are dicts column -> Fraction), used for
  boundary matrices and induced maps on homology;
* dense elimination over F_q (rows are tuples of field codes), used for
  residue subspaces, flags and automorphism actions.

Subspaces of F_q^d are always identified with their reduced row echelon
basis, which makes them directly comparable and hashable.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


# -- sparse rational elimination ---------------------------------------------

def rat_echelon(rows):
    """Reduced echelon basis of the row space.

    rows: iterable of dicts {col: value}.  Returns {pivot_col: row} where
    each row has its pivot normalized to 1 and is reduced against every
    other pivot.  Pivot choice (smallest column) is deterministic.
    """
    ech = {}
    for row in rows:
        row = _reduce_row(row, ech)
        if not row:
            continue
        c = min(row)
        inv = Fraction(1, 1) / row[c]
        row = {j: v * inv for j, v in row.items()}
        for r2 in ech.values():
            if c in r2:
                f = r2[c]
                for j, v in row.items():
                    nv = r2.get(j, 0) - f * v
                    if nv:
                        r2[j] = nv
                    else:
                        r2.pop(j, None)
        ech[c] = row
    return ech


def _reduce_row(row, ech):
    row = {j: Fraction(v) for j, v in row.items() if v}
    for c in sorted(row):
        if c in row and c in ech:
            f = row[c]
            if not f:
                continue
            for j, v in ech[c].items():
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
    return row


def rat_rank(rows):
    return len(rat_echelon(rows))


def rat_nullspace(rows, ncols):
    """Basis of {x : A x = 0} for A given by sparse rows over columns
    0..ncols-1.  Returned vectors are sparse dicts, one per free column."""
    ech = rat_echelon(rows)
    out = []
    for j in range(ncols):
        if j in ech:
            continue
        vec = {j: Fraction(1)}
        for c, row in ech.items():
            v = row.get(j)
            if v:
                vec[c] = -v
        out.append(vec)
    return out


def rat_in_span(vec, ech):
    """True if vec lies in the row space captured by an echelon dict."""
    return not _reduce_row(vec, ech)


class RatSpan:
    """Incrementally grown subspace of Q^N with sparse vectors."""

    def __init__(self):
        self.ech = {}

    @property
    def dim(self):
        return len(self.ech)

    def contains(self, vec):
        return not _reduce_row(vec, self.ech)

    def add(self, vec):
        """Insert vec; returns True if the dimension grew."""
        row = _reduce_row(vec, self.ech)
        if not row:
            return False
        c = min(row)
        inv = Fraction(1, 1) / row[c]
        row = {j: v * inv for j, v in row.items()}
        for r2 in self.ech.values():
            if c in r2:
                f = r2[c]
                for j, v in row.items():
                    nv = r2.get(j, 0) - f * v
                    if nv:
                        r2[j] = nv
                    else:
                        r2.pop(j, None)
        self.ech[c] = row
        return True


# -- dense F_q elimination ----------------------------------------------------

def gf_rref(F, rows):
    """Reduced row echelon form.  Returns (pivot_cols, rows) with zero rows
    dropped; the result is the canonical basis of the row space."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return (), ()
    m = len(rows[0])
    add, mul, neg = F._add, F._mul, F._neg
    pivots = []
    r = 0
    for c in range(m):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        iv = F.inv(rows[r][c])
        if iv != 1:
            mr = mul[iv]
            rows[r] = [mr[x] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                mf = mul[f]
                rows[i] = [add[x][neg[mf[y]]] for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    out = tuple(tuple(row) for row in rows[:r])
    return tuple(pivots), out


def gf_rank(F, rows):
    return len(gf_rref(F, rows)[1])


def gf_nullspace(F, rows, ncols):
    pivots, red = gf_rref(F, rows)
    pivset = set(pivots)
    out = []
    neg = F._neg
    for j in range(ncols):
        if j in pivset:
            continue
        vec = [0] * ncols
        vec[j] = 1
        for c, row in zip(pivots, red):
            if row[j]:
                vec[c] = neg[row[j]]
        out.append(tuple(vec))
    return out


def gf_in_span(F, rref_rows, vec):
    """Membership of vec in the row space of an RREF basis."""
    add, mul, neg = F._add, F._mul, F._neg
    v = list(vec)
    for row in rref_rows:
        c = next(i for i, x in enumerate(row) if x)
        if v[c]:
            f = v[c]
            mf = mul[f]
            v = [add[x][neg[mf[y]]] for x, y in zip(v, row)]
    return not any(v)


def gf_mat_mul(F, A, B):
    add, mul = F._add, F._mul
    m = len(B[0])
    out = []
    for arow in A:
        row = [0] * m
        for x, brow in zip(arow, B):
            if x:
                mx = mul[x]
                row = [add[r][mx[b]] for r, b in zip(row, brow)]
        out.append(tuple(row))
    return tuple(out)


def gf_vec_mat(F, v, B):
    add, mul = F._add, F._mul
    row = [0] * len(B[0])
    for x, brow in zip(v, B):
        if x:
            mx = mul[x]
            row = [add[r][mx[b]] for r, b in zip(row, brow)]
    return tuple(row)


def gf_identity(d):
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


def gf_mat_inv(F, A):
    n = len(A)
    add, mul, neg = F._add, F._mul, F._neg
    M = [list(r) + [1 if i == j else 0 for j in range(n)]
         for i, r in enumerate(A)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        iv = F.inv(M[c][c])
        if iv != 1:
            mi = mul[iv]
            M[c] = [mi[x] for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                mf = mul[M[i][c]]
                M[i] = [add[x][neg[mf[y]]] for x, y in zip(M[i], M[c])]
    return tuple(tuple(r[n:]) for r in M)


def gf_mat_det(F, A):
    n = len(A)
    add, mul, neg = F._add, F._mul, F._neg
    M = [list(r) for r in A]
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = neg[det]
        det = mul[det][M[c][c]]
        iv = F.inv(M[c][c])
        for i in range(c + 1, n):
            if M[i][c]:
                f = mul[M[i][c]][iv]
                mf = mul[f]
                M[i] = [add[x][neg[mf[y]]] for x, y in zip(M[i], M[c])]
    return det


# -- subspace and flag enumeration --------------------------------------------

def all_vectors(F, d):
    return itertools.product(range(F.q), repeat=d)


def subspaces(F, d, k):
    """All k-dimensional subspaces of F_q^d as canonical RREF bases."""
    if k == 0:
        yield ()
        return
    for pivots in itertools.combinations(range(d), k):
        free = []
        for r, p in enumerate(pivots):
            # free slots of row r: columns right of p that are not pivots
            free.extend((r, c) for c in range(p + 1, d) if c not in pivots)
        for vals in itertools.product(range(F.q), repeat=len(free)):
            rows = [[0] * d for _ in range(k)]
            for r, p in enumerate(pivots):
                rows[r][p] = 1
            for (r, c), v in zip(free, vals):
                rows[r][c] = v
            yield tuple(tuple(row) for row in rows)


def subspaces_between(F, lower, d, k):
    """k-dimensional subspaces of F_q^d containing the span of lower
    (an RREF basis, possibly empty)."""
    for W in subspaces(F, d, k):
        if all(gf_in_span(F, W, v) for v in lower):
            yield W


def span_of(F, vecs):
    return gf_rref(F, vecs)[1]
