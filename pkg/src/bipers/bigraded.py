"""Core data model for finitely presented bigraded modules over F_p[x, y].

A module is presented by generator bidegrees, relation bidegrees and a
scalar coefficient matrix; the monomial factor of entry (i, j) is implicit,
``x**(qx-px) * y**(qy-py)`` for generator degree p and relation degree q.
The same module can be evaluated functorially on a finite grid, giving one
vector space dimension per grid point and commuting horizontal / vertical
multiplication maps.

Bidegrees live in (N ∪ {∞})² with the componentwise partial order, where
every finite value is below ∞ and no finite value is above it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoxTooSmall, IllegalEntry, InvariantViolation
from .linalg import (
    Matrix,
    check_modulus,
    inverse_mod,
    rank,
    reduce_mod_rows,
    row_space_echelon,
)

INF = float("inf")

DEFAULT_FIELD = 2


def leq(a, b) -> bool:
    """Componentwise order on bigrades; finite < ∞, and ∞ ≤ ∞."""
    return a[0] <= b[0] and a[1] <= b[1]


def is_finite_degree(d) -> bool:
    return d[0] != INF and d[1] != INF


def join(a, b):
    return (max(a[0], b[0]), max(a[1], b[1]))


def _check_finite_degree(d):
    x, y = d
    if not (isinstance(x, (int, np.integer)) and isinstance(y, (int, np.integer))):
        raise ValueError(f"degree must have integer coordinates, got {d!r}")
    if x < 0 or y < 0:
        raise ValueError(f"degree coordinates must be nonnegative, got {d!r}")
    return (int(x), int(y))


def _degree_coord(v):
    if v == INF:
        return INF
    if isinstance(v, (int, np.integer)) and v >= 0:
        return int(v)
    raise ValueError(f"coordinate must be a nonnegative integer or ∞, got {v!r}")


@dataclass(frozen=True)
class Bar:
    """Half-open interval [birth, death) of a monoparameter module."""

    birth: int
    death: object  # int or INF

    def __post_init__(self):
        object.__setattr__(self, "birth", int(self.birth))
        object.__setattr__(self, "death", _degree_coord(self.death))
        if self.birth < 0:
            raise ValueError("bar birth must be nonnegative")
        if not self.birth < self.death:
            raise ValueError(f"bar needs birth < death, got [{self.birth}, {self.death})")


@dataclass(frozen=True)
class Hook:
    """Interval module supported on a quadrant at p minus the quadrant at q.

    The support is {α finite : p ≤ α and α ≱ q}.  A death corner with one
    infinite coordinate yields the same full-quadrant support as (∞, ∞), so
    such corners are normalized to (∞, ∞); each isomorphism class then has a
    unique representative.  Deaths bounded along a single axis are encoded
    with a finite q sharing the other coordinate of p (a strip).
    """

    p: tuple
    q: tuple

    def __post_init__(self):
        p = _check_finite_degree(self.p)
        qx, qy = (_degree_coord(v) for v in self.q)
        if qx == INF or qy == INF:
            q = (INF, INF)
        else:
            q = (qx, qy)
            if not leq(p, q):
                raise ValueError(f"hook needs p ≤ q, got p={p}, q={q}")
            if p == q:
                raise ValueError("hook needs p ≠ q (empty support otherwise)")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def is_free(self) -> bool:
        return self.q == (INF, INF)

    def supports(self, alpha) -> bool:
        return leq(self.p, alpha) and not leq(self.q, alpha)

    def support_mask(self, box) -> np.ndarray:
        """Boolean support array of shape (box[0]+1, box[1]+1)."""
        xs = np.arange(box[0] + 1).reshape(-1, 1)
        ys = np.arange(box[1] + 1).reshape(1, -1)
        alive = (xs >= self.p[0]) & (ys >= self.p[1])
        if not self.is_free:
            alive &= ~((xs >= self.q[0]) & (ys >= self.q[1]))
        return alive

    def sort_key(self):
        return (self.p, self.q)


class Presentation:
    """Finitely presented bigraded module: gens, rels, scalar coefficients.

    ``coeffs`` has one row per generator and one column per relation; entry
    (i, j) is the scalar part of the homogeneous coefficient with the
    monomial factor implicit from the degree difference.
    """

    __slots__ = ("p", "gens", "rels", "coeffs")

    def __init__(self, p, gens, rels, coeffs=None):
        self.p = check_modulus(p)
        self.gens = tuple(_check_finite_degree(g) for g in gens)
        self.rels = tuple(_check_finite_degree(r) for r in rels)
        if coeffs is None:
            coeffs = Matrix.zeros(self.p, len(self.gens), len(self.rels))
        elif not isinstance(coeffs, Matrix):
            coeffs = Matrix(self.p, np.asarray(coeffs, dtype=np.int64).reshape(len(self.gens), len(self.rels)))
        if coeffs.p != self.p:
            raise ValueError("coefficient matrix modulus differs from presentation modulus")
        if coeffs.shape != (len(self.gens), len(self.rels)):
            raise ValueError(
                f"coefficient matrix shape {coeffs.shape} does not match "
                f"{len(self.gens)} gens × {len(self.rels)} rels"
            )
        self.coeffs = coeffs

    @property
    def n_gens(self) -> int:
        return len(self.gens)

    @property
    def n_rels(self) -> int:
        return len(self.rels)

    def bounding_box(self):
        """Componentwise max of all generator and relation degrees."""
        nx = max([d[0] for d in self.gens + self.rels], default=0)
        ny = max([d[1] for d in self.gens + self.rels], default=0)
        return (nx, ny)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Presentation):
            return NotImplemented
        return (
            self.p == other.p
            and self.gens == other.gens
            and self.rels == other.rels
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.p, self.gens, self.rels, self.coeffs))

    def __repr__(self):
        return (
            f"Presentation(p={self.p}, gens={list(self.gens)!r}, "
            f"rels={list(self.rels)!r}, coeffs={self.coeffs.a.tolist()!r})"
        )


def validate(pres: Presentation) -> Presentation:
    """Check all presentation invariants; returns the input unchanged.

    Raises IllegalEntry when a nonzero coefficient sits at a position whose
    relation degree is not above the generator degree (no legal monomial).
    """
    if pres.n_gens and pres.n_rels:
        gd = np.asarray(pres.gens, dtype=np.int64)
        rd = np.asarray(pres.rels, dtype=np.int64)
        legal = (gd[:, 0:1] <= rd[None, :, 0]) & (gd[:, 1:2] <= rd[None, :, 1])
        bad = (pres.coeffs.a != 0) & ~legal
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise IllegalEntry(
                f"coefficient at generator {i} (degree {pres.gens[i]}), relation {j} "
                f"(degree {pres.rels[j]}) is nonzero but {pres.rels[j]} ≱ {pres.gens[i]}"
            )
    return pres


def direct_sum(*presentations: Presentation) -> Presentation:
    """Block-diagonal direct sum of presentations over the same field."""
    if not presentations:
        return Presentation(DEFAULT_FIELD, [], [])
    p = presentations[0].p
    if any(q.p != p for q in presentations):
        raise ValueError("direct sum requires a common field modulus")
    gens = [g for pr in presentations for g in pr.gens]
    rels = [r for pr in presentations for r in pr.rels]
    coeffs = np.zeros((len(gens), len(rels)), dtype=np.int64)
    gi = ri = 0
    for pr in presentations:
        coeffs[gi : gi + pr.n_gens, ri : ri + pr.n_rels] = pr.coeffs.a
        gi += pr.n_gens
        ri += pr.n_rels
    return Presentation(p, gens, rels, Matrix(p, coeffs))


def _alive_gens(pres, degree):
    return [i for i, g in enumerate(pres.gens) if leq(g, degree)]


def _alive_rels(pres, degree):
    return [j for j, r in enumerate(pres.rels) if leq(r, degree)]


def hilbert_function(pres: Presentation, degree) -> int:
    """Dimension of the module at one finite bidegree.

    Computed directly as (#generators born) − rank(relations evaluated),
    independently of the grid machinery.
    """
    validate(pres)
    gi = _alive_gens(pres, degree)
    rj = _alive_rels(pres, degree)
    if not gi:
        return 0
    if not rj:
        return len(gi)
    return len(gi) - rank(pres.coeffs.take(gi, rj))


def minimize(pres: Presentation) -> Presentation:
    """Minimal presentation of the same module.

    First cancels unit entries (relation degree equal to generator degree)
    by legal column operations, then drops relation columns that already lie
    in the submodule generated by the remaining ones.  The surviving degree
    multisets are the graded Betti numbers in homological degrees 0 and 1.
    """
    validate(pres)
    p = pres.p
    gens = list(pres.gens)
    rels = list(pres.rels)
    c = pres.coeffs.a.copy()

    # Unit cancellation: pivot on an entry with q_j == p_i, clear its row by
    # column operations (always degree-legal), then delete gen i and rel j.
    while True:
        hit = None
        for j in range(len(rels)):
            for i in range(len(gens)):
                if c[i, j] and rels[j] == gens[i]:
                    hit = (i, j)
                    break
            if hit:
                break
        if hit is None:
            break
        i, j = hit
        factors = (c[i] * inverse_mod(int(c[i, j]), p)) % p
        factors[j] = 0
        c = (c - np.outer(c[:, j], factors)) % p
        c = np.delete(np.delete(c, i, axis=0), j, axis=1)
        gens.pop(i)
        rels.pop(j)

    # Redundant-column removal: scan relation degrees along a linear
    # extension of the componentwise order and keep a column only if its
    # evaluation is not already reachable from kept columns of degree ≤ it.
    order = sorted(range(len(rels)), key=lambda j: (rels[j][0] + rels[j][1], rels[j][0], j))
    kept: list[int] = []
    for j in order:
        d = rels[j]
        gi = [i for i, g in enumerate(gens) if leq(g, d)]
        usable = [k for k in kept if leq(rels[k], d)]
        v = c[gi, j] if gi else np.zeros(0, dtype=np.int64)
        if not v.any():
            continue
        span = Matrix(p, c[np.ix_(gi, usable)]) if usable else Matrix.zeros(p, len(gi), 0)
        base = rank(span)
        if rank(Matrix(p, np.hstack([span.a, v.reshape(-1, 1)]))) > base:
            kept.append(j)
    kept.sort()
    return Presentation(p, gens, [rels[j] for j in kept], Matrix(p, c[:, kept] if kept else np.zeros((len(gens), 0), dtype=np.int64)))


def classification_box(pres: Presentation):
    """Bounding box of all presentation degrees, enlarged by (1, 1).

    Beyond the bounding box no generator or relation is born, so every
    multiplication map out of the frontier is an isomorphism and the
    restriction to this box determines the module up to isomorphism.  The
    isomorphism claim is re-checked at runtime by `stable_grid`.
    """
    nx, ny = pres.bounding_box()
    return (nx + 1, ny + 1)


def box_degrees(box):
    """All grid points of [0, box[0]] × [0, box[1]] in a linear extension
    of the componentwise order (sorted by coordinate sum, then x)."""
    pts = [(a, b) for a in range(box[0] + 1) for b in range(box[1] + 1)]
    pts.sort(key=lambda d: (d[0] + d[1], d[0]))
    return pts


class GridModule:
    """Functorial evaluation of a module on a finite grid.

    ``dims[a][b]`` is the vector space dimension at (a, b); ``hmap(a, b)``
    is the matrix of x-multiplication (a, b) → (a+1, b) and ``vmap(a, b)``
    of y-multiplication (a, b) → (a, b+1).  Every unit square commutes.
    """

    __slots__ = ("p", "box", "dims", "_h", "_v")

    def __init__(self, p, box, dims, hmaps, vmaps, check=True):
        self.p = check_modulus(p)
        self.box = (int(box[0]), int(box[1]))
        d = np.asarray(dims, dtype=np.int64)
        if d.shape != (self.box[0] + 1, self.box[1] + 1):
            raise ValueError(f"dims shape {d.shape} does not match box {self.box}")
        d = d.copy()
        d.setflags(write=False)
        self.dims = d
        self._h = tuple(tuple(row) for row in hmaps)
        self._v = tuple(tuple(row) for row in vmaps)
        if check:
            self._check()

    def _check(self):
        bx, by = self.box
        if len(self._h) != bx or any(len(row) != by + 1 for row in self._h):
            raise ValueError("hmap grid has wrong shape")
        if len(self._v) != bx + 1 or any(len(row) != by for row in self._v):
            raise ValueError("vmap grid has wrong shape")
        for a in range(bx + 1):
            for b in range(by + 1):
                if a < bx:
                    h = self.hmap(a, b)
                    if h.shape != (int(self.dims[a + 1, b]), int(self.dims[a, b])):
                        raise ValueError(f"hmap({a},{b}) shape {h.shape} mismatches dims")
                if b < by:
                    v = self.vmap(a, b)
                    if v.shape != (int(self.dims[a, b + 1]), int(self.dims[a, b])):
                        raise ValueError(f"vmap({a},{b}) shape {v.shape} mismatches dims")
        for a in range(bx):
            for b in range(by):
                if self.vmap(a + 1, b) @ self.hmap(a, b) != self.hmap(a, b + 1) @ self.vmap(a, b):
                    raise ValueError(f"square at ({a},{b}) does not commute")

    def dim(self, a, b) -> int:
        return int(self.dims[a, b])

    def hmap(self, a, b) -> Matrix:
        return self._h[a][b]

    def vmap(self, a, b) -> Matrix:
        return self._v[a][b]

    @property
    def is_zero(self) -> bool:
        return not self.dims.any()

    def total_dim(self) -> int:
        return int(self.dims.sum())


def zero_grid(p, box) -> GridModule:
    bx, by = box
    z = lambda: Matrix.zeros(p, 0, 0)
    h = [[z() for _ in range(by + 1)] for _ in range(bx)]
    v = [[z() for _ in range(by)] for _ in range(bx + 1)]
    return GridModule(p, box, np.zeros((bx + 1, by + 1), dtype=np.int64), h, v, check=False)


class _DegreeData:
    """Per-degree quotient bookkeeping for grid evaluation."""

    __slots__ = ("gens", "ech", "piv", "free")

    def __init__(self, gens, ech, piv, free):
        self.gens = gens  # indices of generators alive at this degree (sorted)
        self.ech = ech  # echelon rows spanning the evaluated relation space
        self.piv = piv  # pivot positions of ech inside the alive-gen coords
        self.free = free  # non-pivot positions: the quotient basis


def to_grid(pres: Presentation, box) -> GridModule:
    """Evaluate a presentation on [0, box[0]] × [0, box[1]].

    At each degree the module is the span of born generators modulo the
    evaluated relation columns; bases are picked deterministically from
    echelon pivots so repeated runs agree.  Maps are induced by inclusion
    of the monomial bases.  Raises BoxTooSmall if the box does not contain
    every generator and relation degree.
    """
    validate(pres)
    p = pres.p
    bx, by = int(box[0]), int(box[1])
    nx, ny = pres.bounding_box()
    if (pres.gens or pres.rels) and not (nx <= bx and ny <= by):
        raise BoxTooSmall(f"box {(bx, by)} does not cover presentation degrees {(nx, ny)}")

    c = pres.coeffs.a
    data: dict[tuple, _DegreeData] = {}
    dims = np.zeros((bx + 1, by + 1), dtype=np.int64)
    for a in range(bx + 1):
        for b in range(by + 1):
            gi = np.asarray(_alive_gens(pres, (a, b)), dtype=np.intp)
            rj = np.asarray(_alive_rels(pres, (a, b)), dtype=np.intp)
            sub = c[np.ix_(gi, rj)] if gi.size and rj.size else np.zeros((gi.size, rj.size), dtype=np.int64)
            ech, piv = row_space_echelon(Matrix(p, sub.T))
            free = np.asarray([k for k in range(gi.size) if k not in set(piv.tolist())], dtype=np.intp)
            data[(a, b)] = _DegreeData(gi, ech, piv, free)
            dims[a, b] = free.size

    def induced(src, dst) -> Matrix:
        ds, dt = data[src], data[dst]
        if ds.free.size == 0 or dt.gens.size == 0:
            return Matrix.zeros(p, dt.free.size, ds.free.size)
        w = np.zeros((dt.gens.size, ds.free.size), dtype=np.int64)
        pos = np.searchsorted(dt.gens, ds.gens[ds.free])
        w[pos, np.arange(ds.free.size)] = 1
        w = reduce_mod_rows(w, dt.ech, dt.piv, p)
        return Matrix(p, w[dt.free, :])

    hmaps = [[induced((a, b), (a + 1, b)) for b in range(by + 1)] for a in range(bx)]
    vmaps = [[induced((a, b), (a, b + 1)) for b in range(by)] for a in range(bx + 1)]
    return GridModule(p, (bx, by), dims, hmaps, vmaps, check=False)


def frontier_is_stable(grid: GridModule) -> bool:
    """True when every map leaving the last column/row is an isomorphism."""
    bx, by = grid.box
    for b in range(by + 1):
        h = grid.hmap(bx - 1, b)
        if h.rows != h.cols or rank(h) != h.rows:
            return False
    for a in range(bx + 1):
        v = grid.vmap(a, by - 1)
        if v.rows != v.cols or rank(v) != v.rows:
            return False
    return True


def stable_grid(pres: Presentation, max_growth: int = 3):
    """Grid on the classification box, re-checked for frontier stability.

    The stability property is a theorem for presentations contained in the
    bounding box; the runtime check is a safety net, and the box is grown
    and the grid recomputed in the (never observed) case of a failure.
    """
    box = classification_box(pres)
    for _ in range(max_growth + 1):
        grid = to_grid(pres, box)
        if frontier_is_stable(grid):
            return grid, box
        box = (box[0] + 1, box[1] + 1)
    raise InvariantViolation(f"no stable frontier up to box {box}")
