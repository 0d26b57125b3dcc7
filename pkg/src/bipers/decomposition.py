"""Direct-sum structure of grid modules.

Contains the morphism machinery (hom spaces as natural-transformation
kernels), hook recognition from support shape, the sound-and-complete hook
decomposition search with verified certificates, and a deliberately
brute-force cross-validation oracle that splits along idempotent
endomorphisms found by exhaustive enumeration.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .bigraded import (
    INF,
    GridModule,
    Hook,
    Presentation,
    minimize,
    stable_grid,
    to_grid,
    validate,
    zero_grid,
)
from .errors import InvariantViolation, ThresholdExceeded
from .generators import hook_module
from .linalg import (
    Matrix,
    inverse_mod,
    kernel_basis,
    rank,
    reduce_mod_rows,
    row_space_echelon,
    rref,
    solve_matrix,
)
from .resolution import syzygy_presentation

DEFAULT_ENDO_THRESHOLD = 16


class GridMorphism:
    """Natural transformation between grid modules on a shared box.

    Stores one component matrix per grid point, mapping source fibers to
    target fibers; naturality (commutation with every horizontal and
    vertical structure map) is checkable but not enforced on construction
    so that candidate morphisms can be represented too.
    """

    __slots__ = ("source", "target", "comps")

    def __init__(self, source: GridModule, target: GridModule, comps):
        if source.p != target.p or source.box != target.box:
            raise ValueError("source and target must share field and box")
        self.source = source
        self.target = target
        self.comps = {pt: m for pt, m in comps.items()}
        bx, by = source.box
        for a in range(bx + 1):
            for b in range(by + 1):
                m = self.comps.get((a, b))
                if m is None:
                    m = Matrix.zeros(source.p, target.dim(a, b), source.dim(a, b))
                    self.comps[(a, b)] = m
                if m.shape != (target.dim(a, b), source.dim(a, b)):
                    raise ValueError(f"component at {(a, b)} has shape {m.shape}")

    def at(self, a, b) -> Matrix:
        return self.comps[(a, b)]

    def is_natural(self) -> bool:
        bx, by = self.source.box
        for a in range(bx + 1):
            for b in range(by + 1):
                if a < bx:
                    if self.at(a + 1, b) @ self.source.hmap(a, b) != self.target.hmap(a, b) @ self.at(a, b):
                        return False
                if b < by:
                    if self.at(a, b + 1) @ self.source.vmap(a, b) != self.target.vmap(a, b) @ self.at(a, b):
                        return False
        return True

    def is_isomorphism(self) -> bool:
        bx, by = self.source.box
        for a in range(bx + 1):
            for b in range(by + 1):
                m = self.at(a, b)
                if m.rows != m.cols or rank(m) != m.rows:
                    return False
        return True

    def scale(self, c: int) -> "GridMorphism":
        p = self.source.p
        return GridMorphism(
            self.source, self.target, {pt: Matrix(p, (m.a * (c % p))) for pt, m in self.comps.items()}
        )

    def __matmul__(self, other: "GridMorphism") -> "GridMorphism":
        if other.target.box != self.source.box or other.target.p != self.source.p:
            raise ValueError("morphisms do not compose")
        return GridMorphism(
            other.source, self.target, {pt: self.comps[pt] @ other.comps[pt] for pt in self.comps}
        )

    @classmethod
    def identity(cls, grid: GridModule) -> "GridMorphism":
        return cls(grid, grid, {
            (a, b): Matrix.identity(grid.p, grid.dim(a, b))
            for a in range(grid.box[0] + 1)
            for b in range(grid.box[1] + 1)
        })


@dataclass(frozen=True)
class HookCertificate:
    """A hook multiset with an explicit embedding isomorphism into M."""

    hooks: tuple
    embedding: GridMorphism

    def diagonal_presentation(self) -> Presentation:
        """One generator and at most one monomial relation per summand."""
        p = self.embedding.target.p
        gens = [h.p for h in self.hooks]
        bounded = [(i, h.q) for i, h in enumerate(self.hooks) if not h.is_free]
        coeffs = np.zeros((len(gens), len(bounded)), dtype=np.int64)
        for col, (i, _) in enumerate(bounded):
            coeffs[i, col] = 1
        return Presentation(p, gens, [q for _, q in bounded], Matrix(p, coeffs))


def _edges(box):
    bx, by = box
    for a in range(bx + 1):
        for b in range(by + 1):
            if a < bx:
                yield (a, b), (a + 1, b), "h"
            if b < by:
                yield (a, b), (a, b + 1), "v"


def hom_basis(M: GridModule, N: GridModule) -> list:
    """Basis of the space of natural transformations M → N.

    Solves the linear system expressing commutation with every structure
    map; the basis order is fixed by the kernel computation, so results are
    deterministic.
    """
    if M.p != N.p or M.box != N.box:
        raise ValueError("hom requires a common field and box")
    p = M.p
    points = [(a, b) for a in range(M.box[0] + 1) for b in range(M.box[1] + 1)]
    offset = {}
    total = 0
    for pt in points:
        offset[pt] = total
        total += M.dim(*pt) * N.dim(*pt)

    blocks = []
    for src, dst, kind in _edges(M.box):
        a_map = M.hmap(*src) if kind == "h" else M.vmap(*src)
        b_map = N.hmap(*src) if kind == "h" else N.vmap(*src)
        n_dst, m_src = N.dim(*dst), M.dim(*src)
        n_rows = n_dst * m_src
        if n_rows == 0:
            continue
        block = np.zeros((n_rows, total), dtype=np.int64)
        w_dst = N.dim(*dst) * M.dim(*dst)
        if w_dst:
            block[:, offset[dst] : offset[dst] + w_dst] = np.kron(
                np.eye(n_dst, dtype=np.int64), a_map.a.T
            )
        w_src = N.dim(*src) * M.dim(*src)
        if w_src:
            block[:, offset[src] : offset[src] + w_src] = (
                -np.kron(b_map.a, np.eye(m_src, dtype=np.int64))
            ) % p
        blocks.append(block)

    system = np.vstack(blocks) if blocks else np.zeros((0, total), dtype=np.int64)
    basis = []
    for vec in kernel_basis(Matrix(p, system)):
        comps = {}
        for pt in points:
            n, m = N.dim(*pt), M.dim(*pt)
            comps[pt] = Matrix(p, vec[offset[pt] : offset[pt] + n * m].reshape(n, m))
        basis.append(GridMorphism(M, N, comps))
    return basis


def hook_profile(M: GridModule):
    """The Hook whose support and maps M realizes, or None.

    Requires pointwise dimension at most 1, support of exact hook shape,
    and all structure maps between support points invertible.  An empty
    support is not a hook.  Deaths on the outer frontier of the box cannot
    be told apart from unstable truncation, so they are rejected; grids
    built on a classification box never die there.
    """
    dims = M.dims
    if (dims > 1).any() or not dims.any():
        return None
    mask = dims == 1
    xs, ys = np.nonzero(mask)
    p_corner = (int(xs.min()), int(ys.min()))
    if not mask[p_corner]:
        return None
    quad = np.zeros_like(mask)
    quad[p_corner[0] :, p_corner[1] :] = True
    if (mask & ~quad).any():
        return None
    dead = quad & ~mask
    if not dead.any():
        q_corner = (INF, INF)
    else:
        dx, dy = np.nonzero(dead)
        q_corner = (int(dx.min()), int(dy.min()))
        if q_corner[0] == M.box[0] or q_corner[1] == M.box[1]:
            return None
        expected_dead = np.zeros_like(mask)
        expected_dead[q_corner[0] :, q_corner[1] :] = True
        if not np.array_equal(dead, expected_dead):
            return None
    hook = Hook(p_corner, q_corner)
    for src, dst, kind in _edges(M.box):
        if mask[src] and mask[dst]:
            m = M.hmap(*src) if kind == "h" else M.vmap(*src)
            if not m.a[0, 0]:
                return None
    return hook


def grid_direct_sum(grids, p, box) -> GridModule:
    """Block-diagonal direct sum of grid modules on a shared box."""
    if not grids:
        return zero_grid(p, box)
    bx, by = box
    dims = np.zeros((bx + 1, by + 1), dtype=np.int64)
    for g in grids:
        if g.p != p or g.box != box:
            raise ValueError("summands must share field and box")
        dims += g.dims

    def block(kind, a, b):
        mats = [g.hmap(a, b) if kind == "h" else g.vmap(a, b) for g in grids]
        out = np.zeros((sum(m.rows for m in mats), sum(m.cols for m in mats)), dtype=np.int64)
        r = c = 0
        for m in mats:
            out[r : r + m.rows, c : c + m.cols] = m.a
            r += m.rows
            c += m.cols
        return Matrix(p, out)

    hmaps = [[block("h", a, b) for b in range(by + 1)] for a in range(bx)]
    vmaps = [[block("v", a, b) for b in range(by)] for a in range(bx + 1)]
    return GridModule(p, box, dims, hmaps, vmaps, check=False)


def hook_grid(hook: Hook, p, box) -> GridModule:
    return to_grid(hook_module(hook, p), box)


def _hook_pairings(gens, rels):
    """All distinct hook multisets matching relation degrees to generator
    degrees (p ≤ q, p ≠ q); unmatched generators become free hooks."""
    gcount = Counter(gens)
    degree_choices = sorted(gcount)
    order = sorted(range(len(rels)), key=lambda j: (rels[j], j))
    results = []
    seen = set()
    chosen = [None] * len(rels)

    def emit():
        hooks = []
        for j, g in enumerate(chosen):
            hooks.append(Hook(g, rels[order[j]]))
        for g, c in gcount.items():
            hooks.extend([Hook(g, (INF, INF))] * c)
        hooks.sort(key=Hook.sort_key)
        key = tuple((h.p, h.q) for h in hooks)
        if key not in seen:
            seen.add(key)
            results.append(tuple(hooks))

    def backtrack(idx):
        if idx == len(order):
            emit()
            return
        q = rels[order[idx]]
        for g in degree_choices:
            if gcount[g] > 0 and g != q and g[0] <= q[0] and g[1] <= q[1]:
                gcount[g] -= 1
                chosen[idx] = g
                backtrack(idx + 1)
                gcount[g] += 1

    backtrack(0)
    return results


def _image_of_smaller(K: GridModule, pt):
    """Echelon data spanning the image of strictly smaller degrees at pt."""
    cols = []
    a, b = pt
    if a > 0:
        cols.append(K.hmap(a - 1, b).a)
    if b > 0:
        cols.append(K.vmap(a, b - 1).a)
    if cols:
        u = np.hstack(cols)
    else:
        u = np.zeros((K.dim(a, b), 0), dtype=np.int64)
    return row_space_echelon(Matrix(K.p, u.T))


def _propagate(K: GridModule, start, v):
    """Images of a vector at `start` under all monomial multiplications."""
    bx, by = K.box
    w = {start: np.asarray(v, dtype=np.int64) % K.p}
    for a in range(start[0], bx + 1):
        for b in range(start[1], by + 1):
            if (a, b) == start:
                continue
            if a > start[0]:
                w[(a, b)] = K.hmap(a - 1, b).apply(w[(a - 1, b)])
            else:
                w[(a, b)] = K.vmap(a, b - 1).apply(w[(a, b - 1)])
    return w


def _cyclic_grid(K: GridModule, start, w) -> GridModule:
    """The submodule generated by one vector, as an abstract grid module."""
    bx, by = K.box
    p = K.p
    dims = np.zeros((bx + 1, by + 1), dtype=np.int64)
    for pt, vec in w.items():
        dims[pt] = 1 if vec.any() else 0

    def mat(src, dst):
        alive_s = dims[src] == 1
        alive_d = dims[dst] == 1
        if alive_s and alive_d:
            return Matrix(p, [[1]])
        return Matrix.zeros(p, int(dims[dst]), int(dims[src]))

    hmaps = [[mat((a, b), (a + 1, b)) for b in range(by + 1)] for a in range(bx)]
    vmaps = [[mat((a, b), (a, b + 1)) for b in range(by)] for a in range(bx + 1)]
    return GridModule(p, K.box, dims, hmaps, vmaps, check=False)


def _find_retraction(K: GridModule, start, v, hook: Hook, hgrid: GridModule):
    """Natural r: K → hook grid with r(v) the hook generator, or None.

    A hook grid has one-dimensional endomorphisms, so r restricted to the
    cyclic submodule of v is the identity exactly when its value on v at
    the birth degree is 1; any hom-space element with a nonzero value there
    can be rescaled into a retraction.
    """
    for t in hom_basis(K, hgrid):
        alpha = int(t.at(*start).apply(v)[0])
        if alpha:
            return t.scale(inverse_mod(alpha, K.p))
    return None


def _kernel_complement(K: GridModule, r: GridMorphism):
    """Kernel of a retraction as a grid module plus its inclusion columns."""
    p = K.p
    bx, by = K.box
    basis = {}
    dims = np.zeros((bx + 1, by + 1), dtype=np.int64)
    for a in range(bx + 1):
        for b in range(by + 1):
            cols = kernel_basis(r.at(a, b))
            basis[(a, b)] = Matrix.from_columns(p, cols, K.dim(a, b))
            dims[a, b] = len(cols)

    def induced(src, dst, m):
        x = solve_matrix(basis[dst], m @ basis[src])
        if x is None:
            raise InvariantViolation("retraction kernel is not a submodule")
        return x

    hmaps = [[induced((a, b), (a + 1, b), K.hmap(a, b)) for b in range(by + 1)] for a in range(bx)]
    vmaps = [[induced((a, b), (a, b + 1), K.vmap(a, b)) for b in range(by)] for a in range(bx + 1)]
    return GridModule(p, K.box, dims, hmaps, vmaps, check=False), basis


def _peel(K: GridModule, incl, remaining, box):
    """Backtracking peel: split one hook with lexicographically least birth.

    `incl` maps K into the ambient module; returns a list of
    (hook, column dict into the ambient module) or None.
    """
    if not remaining:
        return [] if K.is_zero else None
    p = K.p
    birth = min(h.p for h in remaining)
    cands = []
    for h in remaining:
        if h.p == birth and h not in cands:
            cands.append(h)
    cands.sort(key=Hook.sort_key)
    dim_here = K.dim(*birth)
    if dim_here == 0:
        return None
    ech, piv = _image_of_smaller(K, birth)
    masks = {h: h.support_mask(K.box) for h in cands}
    for tup in itertools.product(range(p), repeat=dim_here):
        v = np.asarray(tup, dtype=np.int64)
        if not reduce_mod_rows(v.copy(), ech, piv, p).any():
            continue  # inside the image of strictly smaller degrees
        w = _propagate(K, birth, v)
        supp = np.zeros((K.box[0] + 1, K.box[1] + 1), dtype=bool)
        for pt, vec in w.items():
            supp[pt] = bool(vec.any())
        for h in cands:
            if not np.array_equal(supp, masks[h]):
                continue
            if hook_profile(_cyclic_grid(K, birth, w)) != h:
                continue
            hgrid = hook_grid(h, p, K.box)
            r = _find_retraction(K, birth, v, h, hgrid)
            if r is None:
                continue
            K2, basis = _kernel_complement(K, r)
            incl2 = {pt: incl[pt] @ basis[pt] for pt in incl}
            rest = remaining.copy()
            rest.remove(h)
            tail = _peel(K2, incl2, rest, box)
            if tail is not None:
                columns = {
                    pt: (incl[pt].a @ vec.reshape(-1, 1)) % p
                    for pt, vec in w.items()
                    if vec.any()
                }
                return [(h, columns)] + tail
    return None


def _assemble_certificate(mgrid: GridModule, peeled, box) -> HookCertificate:
    p = mgrid.p
    pairs = sorted(peeled, key=lambda hc: hc[0].sort_key())
    hooks = tuple(h for h, _ in pairs)
    source = grid_direct_sum([hook_grid(h, p, box) for h in hooks], p, box)
    comps = {}
    for a in range(box[0] + 1):
        for b in range(box[1] + 1):
            cols = [cols_by_pt[(a, b)] for h, cols_by_pt in pairs if (a, b) in cols_by_pt]
            if cols:
                comps[(a, b)] = Matrix(p, np.hstack(cols))
            else:
                comps[(a, b)] = Matrix.zeros(p, mgrid.dim(a, b), 0)
    embedding = GridMorphism(source, mgrid, comps)
    if not (embedding.is_natural() and embedding.is_isomorphism()):
        raise InvariantViolation("assembled hook embedding failed verification")
    return HookCertificate(hooks, embedding)


def hook_decompose(pres: Presentation):
    """Decide hook-decomposability; return a verified certificate or None.

    The search is a decision procedure: sound because every returned
    embedding is machine-checked to be a natural degreewise isomorphism,
    and complete because it backtracks over all pairings of relation
    degrees with generator degrees and over all candidate generating
    vectors at each peel.  A nonzero second syzygy module rules the answer
    out before any search (a hook sum has projective dimension ≤ 1), and a
    pairing is explored only if its summed hook Hilbert function matches
    the module pointwise.
    """
    pres = validate(pres)
    mpres = minimize(pres)
    grid, box = stable_grid(mpres)
    p = mpres.p
    if grid.is_zero:
        empty = GridMorphism(zero_grid(p, box), grid, {})
        return HookCertificate((), empty)
    if syzygy_presentation(mpres).n_rels:
        return None
    dims = grid.dims
    identity = {
        (a, b): Matrix.identity(p, grid.dim(a, b))
        for a in range(box[0] + 1)
        for b in range(box[1] + 1)
    }
    for hooks in _hook_pairings(mpres.gens, mpres.rels):
        expected = np.zeros_like(dims)
        for h in hooks:
            expected += h.support_mask(box)
        if not np.array_equal(expected, dims):
            continue
        peeled = _peel(grid, identity, list(hooks), box)
        if peeled is not None:
            return _assemble_certificate(grid, peeled, box)
    return None


def _image_subgrid(M: GridModule, e: GridMorphism):
    """Image of an idempotent endomorphism with its induced maps."""
    p = M.p
    bx, by = M.box
    basis = {}
    dims = np.zeros((bx + 1, by + 1), dtype=np.int64)
    for a in range(bx + 1):
        for b in range(by + 1):
            m = e.at(a, b)
            piv = rref(m).pivots  # pivot columns of m are a column-space basis
            sel = m.a[:, list(piv)] if piv else np.zeros((m.rows, 0), dtype=np.int64)
            basis[(a, b)] = Matrix(p, sel)
            dims[a, b] = sel.shape[1]

    def induced(src, dst, m):
        x = solve_matrix(basis[dst], m @ basis[src])
        if x is None:
            raise InvariantViolation("idempotent image is not a submodule")
        return x

    hmaps = [[induced((a, b), (a + 1, b), M.hmap(a, b)) for b in range(by + 1)] for a in range(bx)]
    vmaps = [[induced((a, b), (a, b + 1), M.vmap(a, b)) for b in range(by)] for a in range(bx + 1)]
    return GridModule(p, M.box, dims, hmaps, vmaps, check=False)


def _find_nontrivial_idempotent(M: GridModule, basis, chunk=2048):
    """First nonzero, non-identity idempotent endomorphism in coefficient
    lexicographic order, or None if only trivial idempotents exist."""
    p = M.p
    dim = len(basis)
    points = [
        (a, b)
        for a in range(M.box[0] + 1)
        for b in range(M.box[1] + 1)
        if M.dim(a, b) > 0
    ]
    stacks = {
        pt: np.stack([t.at(*pt).a for t in basis]).reshape(dim, -1) for pt in points
    }
    eyes = {pt: np.eye(M.dim(*pt), dtype=np.int64) for pt in points}

    coeff_iter = itertools.product(range(p), repeat=dim)
    first = True
    while True:
        rows = list(itertools.islice(coeff_iter, chunk))
        if not rows:
            return None
        c = np.asarray(rows, dtype=np.int64)
        if first:
            c = c[1:]  # drop the zero endomorphism
            rows = rows[1:]
            first = False
            if not len(rows):
                continue
        ok = np.ones(len(rows), dtype=bool)
        is_id = np.ones(len(rows), dtype=bool)
        for pt in points:
            n = M.dim(*pt)
            e = (c @ stacks[pt]).reshape(-1, n, n) % p
            sq = np.einsum("kij,kjl->kil", e, e) % p
            ok &= (sq == e).all(axis=(1, 2))
            is_id &= (e == eyes[pt]).all(axis=(1, 2))
            if not ok.any():
                break
        hits = np.nonzero(ok & ~is_id)[0]
        if hits.size:
            coeffs = rows[int(hits[0])]
            comps = {}
            for pt in points:
                n = M.dim(*pt)
                acc = np.zeros((n, n), dtype=np.int64)
                for coeff, t in zip(coeffs, basis):
                    if coeff:
                        acc += coeff * t.at(*pt).a
                comps[pt] = Matrix(p, acc)
            return GridMorphism(M, M, comps)


def decompose_oracle(M: GridModule, threshold: int = DEFAULT_ENDO_THRESHOLD):
    """Indecomposable summands by exhaustive idempotent splitting.

    Enumerates all p^dim elements of the endomorphism algebra, splits along
    the first nontrivial idempotent found, and recurses; a module admitting
    only trivial idempotents is indecomposable.  The summand multiset is
    unique up to isomorphism and order (Krull-Schmidt holds for these
    finite-dimensional grid representations; relied on when comparing
    multisets).  Refuses instances whose endomorphism dimension exceeds the
    threshold; shrink the instance instead of raising it.
    """
    if M.is_zero:
        return []
    basis = hom_basis(M, M)
    if len(basis) > threshold:
        raise ThresholdExceeded(
            f"endomorphism dimension {len(basis)} exceeds threshold {threshold}"
        )
    if len(basis) == 1:
        return [M]
    e = _find_nontrivial_idempotent(M, basis)
    if e is None:
        return [M]
    complement_comps = {}
    for a in range(M.box[0] + 1):
        for b in range(M.box[1] + 1):
            eye = np.eye(M.dim(a, b), dtype=np.int64)
            complement_comps[(a, b)] = Matrix(M.p, eye - e.at(a, b).a)
    one_minus = GridMorphism(M, M, complement_comps)
    out = []
    for part in (_image_subgrid(M, e), _image_subgrid(M, one_minus)):
        out.extend(decompose_oracle(part, threshold))
    return out
