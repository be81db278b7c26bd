"""Generalized simplicial complexes with explicit face tables.

A simplex is not determined by its vertex set: two distinct simplices may
share all vertices, so every simplex carries its own key and an explicit
codimension-one face table.  The table entry at position p is the face
obtained by deleting the p-th vertex (vertices are kept sorted by key).
Deeper faces are composites of codimension-one faces; validate_complex
checks the diamond condition that makes those composites independent of
the deletion order.

Orientations: the canonical orientation of a simplex is the ascending
order of its vertex keys, and every OrientedSimplexRef stores a parity
relative to it.  The face sign of deleting the vertex at 0-based position
p is (-1)^(p+1), which is the (-1)^k of the defining formula with
1-indexed position k.
"""

from __future__ import annotations

from collections import namedtuple

from .errors import (
    ComputationError, NotASubset, VertexNotInSimplex, WrongDimension,
)

SimplexRec = namedtuple("SimplexRec", "verts faces")
OrientedSimplexRef = namedtuple("OrientedSimplexRef", "dim key parity")


def _check_key(key):
    if not isinstance(key, str) or not key or any(c.isspace() for c in key):
        raise ComputationError("simplex keys must be nonempty strings "
                               "without whitespace: %r" % (key,))


class Complex:
    """A finite generalized simplicial complex under construction.

    Vertices double as the 0-simplices (their key is the vertex key).
    Call seal() when done; sealed complexes are immutable and shareable.
    """

    def __init__(self):
        self._simp = {0: {}}
        self._sealed = False

    # -- construction ------------------------------------------------------

    def add_vertex(self, key):
        self._mutable()
        _check_key(key)
        if key not in self._simp[0]:
            self._simp[0][key] = SimplexRec((key,), ())
        return key

    def add_simplex(self, key, verts, faces):
        """Add a simplex with the given codim-1 face keys.

        faces[p] must be the key of the face deleting sorted(verts)[p];
        for an edge that is (key_of_other_endpoint_vertex, ...).
        """
        self._mutable()
        _check_key(key)
        verts = tuple(sorted(verts))
        dim = len(verts) - 1
        if dim == 0:
            if faces:
                raise WrongDimension("a vertex has no proper faces")
            return self.add_vertex(key)
        if len(set(verts)) != len(verts):
            raise ComputationError("vertices of a simplex must be distinct")
        if len(faces) != dim + 1:
            raise WrongDimension("need %d faces, got %d" % (dim + 1, len(faces)))
        table = self._simp.setdefault(dim, {})
        if key in table and table[key] != SimplexRec(verts, tuple(faces)):
            raise ComputationError("key %r reused for a different simplex" % key)
        table[key] = SimplexRec(verts, tuple(faces))
        return key

    def seal(self, validate=True):
        self._mutable()
        self._sealed = True
        if validate:
            report = validate_complex(self)
            if report:
                raise ComputationError("invalid complex: " + "; ".join(report[:5]))
        return self

    def _mutable(self):
        if self._sealed:
            raise ComputationError("complex is sealed")

    # -- inspection --------------------------------------------------------

    @property
    def dimension(self):
        return max((d for d, tab in self._simp.items() if tab), default=0)

    def dims(self):
        return sorted(d for d, tab in self._simp.items() if tab)

    def simplices(self, dim):
        return self._simp.get(dim, {})

    def keys(self, dim):
        return sorted(self._simp.get(dim, {}))

    def record(self, dim, key):
        try:
            return self._simp[dim][key]
        except KeyError:
            raise ComputationError("no %d-simplex with key %r" % (dim, key))

    def has(self, dim, key):
        return key in self._simp.get(dim, {})

    @property
    def vertices(self):
        return self._simp[0]

    def size(self):
        return sum(len(tab) for tab in self._simp.values())

    def all_simplices(self):
        for dim in self.dims():
            for key in self._simp[dim]:
                yield (dim, key)


def face(C, dim, key, subset):
    """The face of a simplex corresponding to a nonempty vertex subset."""
    rec = C.record(dim, key)
    subset = frozenset(subset)
    if not subset:
        raise NotASubset("face subset must be nonempty")
    if not subset <= set(rec.verts):
        raise NotASubset("%r is not a subset of %r" % (sorted(subset), rec.verts))
    cur_dim, cur_key, cur = dim, key, rec
    # delete highest positions first so earlier positions stay valid
    for p in range(dim, -1, -1):
        if cur.verts[p] in subset:
            continue
        cur_key = cur.faces[p]
        cur_dim -= 1
        cur = C.record(cur_dim, cur_key)
    return cur_dim, cur_key


def orientation_face_sign(C, v, ref):
    """s_v applied to an oriented simplex reference.

    Returns the oriented reference on the face deleting v; the sign is
    (-1)^k for k the 1-indexed position of v in the ascending vertex order,
    multiplied into the incoming parity.
    """
    rec = C.record(ref.dim, ref.key)
    if ref.dim < 1:
        raise WrongDimension("cannot delete a vertex from a 0-simplex")
    try:
        p = rec.verts.index(v)
    except ValueError:
        raise VertexNotInSimplex("%r not a vertex of %r" % (v, ref.key))
    sign = 1 if (p + 1) % 2 == 0 else -1
    return OrientedSimplexRef(ref.dim - 1, rec.faces[p], ref.parity * sign)


def validate_complex(C):
    """All axiom violations as human-readable strings (empty = valid)."""
    out = []
    for dim in C.dims():
        for key, rec in C.simplices(dim).items():
            name = "%d-simplex %r" % (dim, key)
            if tuple(sorted(rec.verts)) != rec.verts:
                out.append("%s: vertices not sorted" % name)
            if len(set(rec.verts)) != dim + 1:
                out.append("%s: vertex count != dim+1" % name)
                continue
            missing = [v for v in rec.verts if v not in C.simplices(0)]
            if missing:
                out.append("%s: unknown vertices %r" % (name, missing))
                continue
            if dim == 0:
                continue
            if len(rec.faces) != dim + 1:
                out.append("%s: face table has wrong size" % name)
                continue
            for p, fk in enumerate(rec.faces):
                if not C.has(dim - 1, fk):
                    out.append("%s: face %r missing in dimension %d"
                               % (name, fk, dim - 1))
                    continue
                frec = C.record(dim - 1, fk)
                want = rec.verts[:p] + rec.verts[p + 1:]
                if frec.verts != want:
                    out.append("%s: face at position %d has vertices %r, "
                               "expected %r" % (name, p, frec.verts, want))
            if dim >= 2:
                # diamond: deleting v_i then v_j agrees with v_j then v_i
                for i in range(dim + 1):
                    for j in range(i + 1, dim + 1):
                        if not (C.has(dim - 1, rec.faces[j])
                                and C.has(dim - 1, rec.faces[i])):
                            continue
                        a = C.record(dim - 1, rec.faces[j]).faces
                        b = C.record(dim - 1, rec.faces[i]).faces
                        if len(a) == dim and len(b) == dim and a[i] != b[j - 1]:
                            out.append("%s: faces at %d,%d do not commute"
                                       % (name, i, j))
    return out


# -- simplicial maps --------------------------------------------------------

class SimplicialMap:
    """A map of complexes given per dimension on simplex keys."""

    def __init__(self, source, target, maps):
        self.source = source
        self.target = target
        self.maps = {d: dict(m) for d, m in maps.items()}

    def apply(self, dim, key):
        try:
            return self.maps[dim][key]
        except KeyError:
            raise ComputationError("map undefined on %d-simplex %r" % (dim, key))

    def defined_on(self, dim, key):
        return key in self.maps.get(dim, {})

    def vertex_image(self, v):
        return self.apply(0, v)

    def orientation_sign(self, dim, key):
        """Parity of the canonical orientation transport along the map.

        The source's ascending vertex order maps to a sequence of target
        vertices; the sign is the permutation sign sorting that sequence.
        """
        rec = self.source.record(dim, key)
        imgs = [self.apply(0, v) for v in rec.verts]
        if len(set(imgs)) != len(imgs):
            raise ComputationError("map collapses vertices of %r" % (key,))
        perm = sorted(range(len(imgs)), key=lambda i: imgs[i])
        return perm_sign(perm)

    def domain(self):
        for dim in sorted(self.maps):
            for key in self.maps[dim]:
                yield (dim, key)


def perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def validate_map(f):
    """Simplicial map axioms on every simplex where f is defined."""
    out = []
    for dim, m in sorted(f.maps.items()):
        for key, tkey in m.items():
            name = "%d-simplex %r" % (dim, key)
            rec = f.source.record(dim, key)
            if not f.target.has(dim, tkey):
                out.append("%s: image %r missing" % (name, tkey))
                continue
            trec = f.target.record(dim, tkey)
            imgs = [f.apply(0, v) for v in rec.verts]
            if len(set(imgs)) != len(imgs):
                out.append("%s: vertex map not injective on simplex" % name)
                continue
            if tuple(sorted(imgs)) != trec.verts:
                out.append("%s: vertex images %r do not match target %r"
                           % (name, sorted(imgs), trec.verts))
                continue
            if dim >= 1:
                for p, fk in enumerate(rec.faces):
                    if not f.defined_on(dim - 1, fk):
                        out.append("%s: face %r has no image" % (name, fk))
                        continue
                    # deleting v maps to deleting f(v)
                    tv = imgs[p]
                    tp = trec.verts.index(tv)
                    if f.apply(dim - 1, fk) != trec.faces[tp]:
                        out.append("%s: face images do not commute at "
                                   "position %d" % (name, p))
    return out


def compose_maps(f, g):
    """g after f."""
    maps = {}
    for dim, m in f.maps.items():
        maps[dim] = {k: g.apply(dim, v) for k, v in m.items()}
    return SimplicialMap(f.source, g.target, maps)


def identity_map(C):
    return SimplicialMap(C, C, {d: {k: k for k in C.simplices(d)}
                                for d in C.dims()})


def check_finite_map(f, probes, fiber_ceiling=1 << 20, domain=None,
                     scan_ceiling=1 << 22):
    """Fiber cardinalities of f over the probe simplices.

    probes: iterable of (dim, key) in the target.  domain defaults to the
    simplices f is defined on; pass an iterable (possibly a generator over
    an infinite complex) to scan lazily.  Returns a dict with per-probe
    counts, the probes whose fiber crossed fiber_ceiling, and whether the
    scan was truncated by scan_ceiling.
    """
    probes = list(probes)
    want = set(probes)
    counts = {p: 0 for p in probes}
    flags = []
    truncated = False
    scanned = 0
    it = f.domain() if domain is None else iter(domain)
    for dim, key in it:
        scanned += 1
        if scanned > scan_ceiling:
            truncated = True
            break
        if not f.defined_on(dim, key):
            continue
        tgt = (dim, f.apply(dim, key))
        if tgt in want:
            counts[tgt] += 1
            if counts[tgt] == fiber_ceiling + 1 and tgt not in flags:
                flags.append(tgt)
        if flags and all(counts[p] > fiber_ceiling for p in probes):
            truncated = True
            break
    return {"fibers": counts, "flags": flags, "scanned": scanned,
            "truncated": truncated}


# -- exhausted complexes -----------------------------------------------------

class ExhaustedComplex:
    """A locally finite complex presented by a finite slab plus cores.

    For each grid value alpha, core(alpha) is the finite set of simplices
    NOT in the frontier subcomplex; cores grow with alpha and the frontier
    stays closed under faces, equivalently every coface (within the slab)
    of a core simplex is again in the core.
    """

    def __init__(self, slab, cores, depth=None, meta=None):
        self.slab = slab
        self.grid = tuple(sorted(cores))
        self.cores = {a: frozenset(cores[a]) for a in self.grid}
        self.depth = dict(depth) if depth else None
        self.meta = dict(meta) if meta else {}
        report = self.validate()
        if report:
            raise ComputationError("bad exhaustion: " + "; ".join(report[:5]))

    def core(self, alpha):
        if alpha not in self.cores:
            raise ComputationError("alpha %r not on the grid %r"
                                   % (alpha, self.grid))
        return self.cores[alpha]

    def frontier(self, alpha):
        core = self.core(alpha)
        return frozenset(s for s in self.slab.all_simplices()
                         if s not in core)

    def validate(self):
        out = []
        prev = None
        # cofaces within the slab, indexed by face
        cofaces = {}
        for dim in self.slab.dims():
            if dim == 0:
                continue
            for key, rec in self.slab.simplices(dim).items():
                for fk in rec.faces:
                    cofaces.setdefault((dim - 1, fk), []).append((dim, key))
        for a in self.grid:
            cur = self.cores[a]
            for s in cur:
                if not self.slab.has(*s):
                    out.append("core(%r) contains %r outside the slab" % (a, s))
            if prev is not None and not prev <= cur:
                out.append("cores not nested at alpha=%r" % (a,))
            for s in cur:
                for cf in cofaces.get(s, ()):
                    if cf not in cur:
                        out.append("frontier not closed under faces: %r in "
                                   "core(%r), coface %r outside" % (s, a, cf))
                        break
        return out


# -- text serialization -------------------------------------------------------

def complex_to_text(C):
    lines = []
    for dim in C.dims():
        for key in C.keys(dim):
            rec = C.record(dim, key)
            lines.append("%d\t%s\t%s\t%s" % (
                dim, key, " ".join(rec.verts), " ".join(rec.faces)))
    return "\n".join(lines) + "\n"


def complex_from_text(text):
    C = Complex()
    rows = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 4:
            raise ComputationError("bad complex record: %r" % line)
        dim = int(parts[0])
        verts = tuple(parts[2].split())
        faces = tuple(parts[3].split())
        rows.append((dim, parts[1], verts, faces))
    rows.sort(key=lambda r: r[0])
    for dim, key, verts, faces in rows:
        if dim == 0:
            C.add_vertex(key)
        else:
            C.add_simplex(key, verts, faces)
    return C.seal()


def strict_complex(facets):
    """Build a strict complex from maximal vertex tuples; simplex keys are
    the sorted vertex keys joined with ';'.  Handy for tests."""
    C = Complex()
    seen = set()

    def add(verts):
        verts = tuple(sorted(verts))
        key = ";".join(verts)
        if verts in seen:
            return key
        seen.add(verts)
        if len(verts) == 1:
            return C.add_vertex(verts[0])
        faces = tuple(add(verts[:p] + verts[p + 1:])
                      for p in range(len(verts)))
        return C.add_simplex(key, verts, faces)

    for f in facets:
        for v in f:
            _check_key(v)
            if ";" in v:
                raise ComputationError("';' is reserved in strict keys")
        add(f)
    return C.seal()
