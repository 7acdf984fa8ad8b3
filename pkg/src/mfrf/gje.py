"""Multipartite Gauss-Jordan elimination.

The reducer walks a coefficient tensor towards a sparse canonical
representative of its ELO orbit (its MFRF candidate) and records every
elementary operation it applies, so the result carries its own certificate.

Each pass tries a handful of macro moves and keeps whichever leaves the
fewest nonzero amplitudes:

* greedy sparsification: single ``AddMul`` ops that strictly shrink the
  support, repeated to a local minimum;
* per-site row reduction (RREF of the site unfolding);
* pivot-driven clearing: after RREF at site 1 each pivot row is cleaned
  with ops on the other sites, refusing ops that move existing pivots;
* block similarity: normalise one slice of a site pair to ``I_r (+) 0``
  and bring another slice to Jordan form, which leaves the identity alone.

A pass that improves nothing ends the loop.  The survivor is then put in a
canonical level order and scaling, so equal orbits give literally equal
tensors on the cases we test.  Nothing here proves that two different
results are inequivalent; see :mod:`mfrf.classify` for that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Callable, Sequence

from mfrf import linalg
from mfrf.elo import (
    AddMul,
    Scale,
    SitedOp,
    Swap,
    apply,
    apply_sequence,
    decompose_invertible,
    from_row_op,
    site_stride,
    _slice_offsets,
)
from mfrf.exactnum import ONE, FloatScalar
from mfrf.linalg import IrrationalSpectrum, SingularMatrix
from mfrf.state import MultiState, StateError

DEFAULT_MAX_PASSES = 32
PERMUTATION_SEARCH_CAP = 60000


class MaxPassesExceeded(RuntimeError):
    def __init__(self, result: "ReductionResult"):
        super().__init__(f"no fixed point within {result.passes} passes")
        self.result = result


@dataclass
class PivotProfile:
    site_pivots: dict[int, list[tuple[int, int]]]
    block_ranks: list[int]
    site_ranks: tuple[int, ...]
    free_parameters: list[tuple[tuple[int, ...], object]] = field(default_factory=list)


@dataclass
class ReductionResult:
    original: MultiState
    reduced: MultiState
    certificate: list[SitedOp]
    profile: PivotProfile
    converged: bool
    passes: int = 0
    trace: list[SitedOp] | None = None

    def replay(self) -> MultiState:
        return apply_sequence(self.original, self.certificate).canonical_scaled()


# ---------------------------------------------------------------------------
# single-site reductions


def rref_site(state: MultiState, site: int) -> tuple[MultiState, list[SitedOp]]:
    """Row-reduce the site unfolding; returns the new state and the ops used."""
    state.check_site(site)
    r, ops, _ = linalg.rref(state.unfold(site))
    seq = [SitedOp(site, from_row_op(t)) for t in ops]
    return MultiState.from_unfolding(state.dims, site, r), seq


def fully_reduce_bipartite(state: MultiState) -> ReductionResult:
    """Bring a bipartite state to [[I_m, 0], [0, 0]]; m is the Schmidt number."""
    if state.n_sites != 2:
        raise StateError("fully_reduce_bipartite needs exactly two sites")
    s1, seq1 = rref_site(state, 1)
    s2, seq2 = rref_site(s1, 2)
    cert = seq1 + seq2
    return ReductionResult(state, s2, cert, _profile(s2), True, 1)


def similarity_on_sites(state: MultiState, s, a: int, b: int) -> tuple[MultiState, list[SitedOp]]:
    """Conjugate every (site a, site b) slice: M -> s M s^-1.

    Realised as s at site a and (s^-1)^T at site b, because an operator G at
    the column site acts on slices as M G^T.
    """
    if state.dims[a - 1] != state.dims[b - 1]:
        raise StateError("similarity needs equal dimensions on both sites")
    sinv = linalg.inverse(s)
    seq = decompose_invertible(s, a) + decompose_invertible(linalg.transpose(sinv), b)
    return apply_sequence(state, seq), seq


def similarity_on_blocks(state: MultiState, s) -> tuple[MultiState, list[SitedOp]]:
    """Collective similarity A_m -> s A_m s^-1 on the blocks of the coefficient matrix."""
    return similarity_on_sites(state, s, 1, state.n_sites)


def jordan_2x2(block) -> tuple[list, list]:
    return linalg.jordan_2x2(block)


# ---------------------------------------------------------------------------
# helpers on flat tensors


def _key(x, n: int):
    if isinstance(x, FloatScalar):
        return x.sort_key()
    if n == 1:
        return x.coeffs[0]
    return x.lift(n)


def _support(state: MultiState) -> int:
    return state.support_size()


def _inv(x):
    return x.inverse()


def _sweep_order(n: int) -> list[int]:
    if n == 1:
        return [1]
    return [1, n] + list(range(2, n))


# ---------------------------------------------------------------------------
# greedy sparsification


def _best_addmul(state: MultiState) -> SitedOp | None:
    coeffs = state.coeffs
    n = state.order()
    best = None
    best_delta = 0
    for site in _sweep_order(state.n_sites):
        k = site - 1
        d = state.dims[k]
        s = site_stride(state.dims, site)
        offsets = _slice_offsets(state.dims, k)
        slices = [[coeffs[o + lv * s] for o in offsets] for lv in range(d)]
        nz = [[bool(x) for x in sl] for sl in slices]
        for i in range(d):
            src = slices[i]
            if not any(nz[i]):
                continue
            inv_cache: dict[int, object] = {}
            for j in range(d):
                if j == i:
                    continue
                dst = slices[j]
                created = 0
                counts: dict = {}
                lams: dict = {}
                for p, (a, b) in enumerate(zip(nz[i], nz[j])):
                    if not a:
                        continue
                    if not b:
                        created += 1
                        continue
                    inv = inv_cache.get(p)
                    if inv is None:
                        inv = inv_cache[p] = _inv(src[p])
                    lam = -dst[p] * inv
                    key = _key(lam, n)
                    if key in counts:
                        counts[key] += 1
                    else:
                        counts[key] = 1
                        lams[key] = lam
                for key, zeroed in counts.items():
                    delta = created - zeroed
                    if delta < best_delta:
                        best_delta = delta
                        best = SitedOp(site, AddMul(i, lams[key], j))
    return best


def greedy(state: MultiState, seq: list[SitedOp]) -> MultiState:
    """Apply support-reducing AddMul ops until none helps."""
    while True:
        op = _best_addmul(state)
        if op is None:
            return state
        state = apply(state, op)
        seq.append(op)


# ---------------------------------------------------------------------------
# pivot-driven clearing


def _pivots_of_rref(matrix) -> list[tuple[int, int]]:
    out = []
    for r, row in enumerate(matrix):
        c = next((j for j, x in enumerate(row) if x), None)
        if c is not None:
            out.append((r, c))
    return out


def pivot_clear(state: MultiState, seq: list[SitedOp], max_rounds: int | None = None) -> MultiState:
    """Clean the site-1 pivot rows with ops on the other sites.

    An op is only kept when every pivot entry keeps its value; the pivot
    columns themselves are restored by the RREF that follows each round.
    """
    nsite = state.n_sites
    if nsite < 2:
        return state
    state, ops = rref_site(state, 1)
    seq.extend(ops)
    rest_dims = state.dims[1:]
    max_rounds = max_rounds or 4 * math.prod(state.dims)
    for _ in range(max_rounds):
        changed = False
        mat = state.unfold(1)
        pivots = _pivots_of_rref(mat)
        cols = list(product(*(range(d) for d in rest_dims)))
        for r, c in pivots:
            row = mat[r]
            pcol = cols[c]
            for q, val in enumerate(row):
                if q == c or not val:
                    continue
                qcol = cols[q]
                diff = [k for k in range(nsite - 1) if pcol[k] != qcol[k]]
                if len(diff) != 1:
                    continue
                k = diff[0]
                op = SitedOp(k + 2, AddMul(pcol[k], -val / row[c], qcol[k]))
                cand = apply(state, op)
                cmat = cand.unfold(1)
                if all(cmat[pr][pc] == mat[pr][pc] for pr, pc in pivots):
                    state = cand
                    seq.append(op)
                    mat = cmat
                    row = mat[r]
                    changed = True
        state, ops = rref_site(state, 1)
        seq.extend(ops)
        if not changed:
            break
    return state


# ---------------------------------------------------------------------------
# block similarity moves


def _pair_slices(state: MultiState, a: int, b: int) -> list[tuple[tuple[int, ...], list]]:
    """Slices M_p[x][y] = c[..., a=x, ..., b=y, ...] over the other multi-indices p."""
    dims = state.dims
    others = [k for k in range(len(dims)) if k not in (a - 1, b - 1)]
    out = []
    for p in product(*(range(dims[k]) for k in others)):
        idx = [0] * len(dims)
        for k, v in zip(others, p):
            idx[k] = v
        m = []
        for x in range(dims[a - 1]):
            idx[a - 1] = x
            row = []
            for y in range(dims[b - 1]):
                idx[b - 1] = y
                row.append(state[idx])
            m.append(row)
        out.append((tuple(p), m))
    return out


def _normalise_slice(state: MultiState, m, a: int, b: int) -> tuple[MultiState, list[SitedOp], int]:
    """Ops at sites a, b turning slice m into I_r (+) 0."""
    r, ops_a, pivots = linalg.rref(m)
    seq = [SitedOp(a, from_row_op(t)) for t in ops_a]
    _, ops_b, _ = linalg.rref(linalg.transpose(r))
    seq += [SitedOp(b, from_row_op(t)) for t in ops_b]
    return apply_sequence(state, seq), seq, len(pivots)


def _is_diagonal(x) -> bool:
    return all(not x[i][j] for i in range(len(x)) for j in range(len(x)) if i != j)


def _jordan_similarity(x):
    """Similarity bringing x to Jordan (2x2) or diagonal (larger) form."""
    if len(x) == 2:
        return linalg.jordan_2x2(x)[0]
    return linalg.diagonalize(x)[0]


def similarity_moves(state: MultiState) -> list[tuple[MultiState, list[SitedOp]]]:
    """Candidate states from normalise-then-Jordan moves on every equal-dimension site pair."""
    out = []
    nsite = state.n_sites
    for a in range(1, nsite + 1):
        for b in range(a + 1, nsite + 1):
            d = state.dims[a - 1]
            if d != state.dims[b - 1]:
                continue
            slices = [m for _, m in _pair_slices(state, a, b) if any(x for row in m for x in row)]
            bases = []
            for m in slices:
                rk = linalg.rank(m)
                if rk >= 2 and not any(linalg.equal(m, o) for o in bases):
                    bases.append(m)
            for base in bases:
                norm_state, norm_seq, rk = _normalise_slice(state, base, a, b)
                out.append((norm_state, norm_seq))
                tried = []
                for _, m in _pair_slices(norm_state, a, b):
                    x = [row[:rk] for row in m[:rk]]
                    if _is_diagonal(x) or any(linalg.equal(x, t) for t in tried):
                        continue
                    tried.append(x)
                    try:
                        s = _jordan_similarity(x)
                    except (IrrationalSpectrum, ValueError, SingularMatrix):
                        continue
                    full = linalg.identity(d)
                    for i in range(rk):
                        for j in range(rk):
                            full[i][j] = s[i][j]
                    new_state, seq = similarity_on_sites(norm_state, full, a, b)
                    out.append((new_state, norm_seq + seq))
    return out


# ---------------------------------------------------------------------------
# canonical form


def _level_permutations(state: MultiState):
    """Per-site candidate relabelings: used levels permuted, unused ones last."""
    terms = state.terms()
    per_site = []
    for k, d in enumerate(state.dims):
        used = sorted({idx[k] for idx, _ in terms})
        unused = [l for l in range(d) if l not in used]
        options = []
        for perm in permutations(range(len(used))):
            mapping = [0] * d
            for old, new in zip(used, perm):
                mapping[old] = new
            for pos, old in enumerate(unused):
                mapping[old] = len(used) + pos
            options.append(tuple(mapping))
        per_site.append(options)
    return per_site


def _fallback_permutation(state: MultiState):
    """Levels ordered by first appearance in the lexicographic support."""
    terms = state.terms()
    maps = []
    for k, d in enumerate(state.dims):
        order: list[int] = []
        for idx, _ in terms:
            if idx[k] not in order:
                order.append(idx[k])
        order += [l for l in range(d) if l not in order]
        mapping = [0] * d
        for new, old in enumerate(order):
            mapping[old] = new
        maps.append(tuple(mapping))
    return [maps]


def _scaling_plan(terms, nsite: int):
    """Scale factors per (site, level) turning as many amplitudes as possible into 1.

    Each term asks for prod_k x[k, i_k] = 1 / amp.  Terms are taken in order
    and kept when their exponent row stays independent after integer
    elimination with a +-1 pivot (so no roots are ever needed).
    """
    rows: list[tuple[dict, object, tuple]] = []  # (exponents, target, pivot var)
    for idx, amp in terms:
        expo: dict = {}
        for k in range(nsite):
            expo[(k, idx[k])] = expo.get((k, idx[k]), 0) + 1
        target = amp.inverse()
        for r_expo, r_target, piv in rows:
            c = expo.get(piv, 0)
            if c:
                # subtract c * row (row has coefficient sgn at piv)
                f = c * r_expo[piv]
                for v, e in r_expo.items():
                    expo[v] = expo.get(v, 0) - f * e
                target = target * r_target ** (-f)
                expo = {v: e for v, e in expo.items() if e}
        if not expo:
            continue
        piv = next((v for v in sorted(expo, reverse=True) if abs(expo[v]) == 1), None)
        if piv is None:
            continue
        rows.append((expo, target, piv))
    values: dict = {}
    for expo, target, piv in reversed(rows):
        acc = target
        for v, e in expo.items():
            if v != piv and v in values:
                acc = acc * values[v] ** (-e)
        values[piv] = acc if expo[piv] == 1 else acc.inverse()
    return values


def _scaled_terms(terms, plan, nsite: int):
    out = []
    for idx, amp in terms:
        acc = amp
        for k in range(nsite):
            f = plan.get((k, idx[k]))
            if f is not None and not f == ONE:
                acc = acc * f
        out.append((idx, acc))
    return out


def canonicalize(state: MultiState) -> tuple[MultiState, list[SitedOp]]:
    """Canonical level order and scaling, as ELOs.

    Among all relabelings of used levels, pick the one whose sorted support is
    lexicographically smallest; ties are broken by the amplitudes left after
    scaling a spanning set of entries to 1.
    """
    nsite = state.n_sites
    terms = state.terms()
    per_site = _level_permutations(state)
    total = math.prod(len(o) for o in per_site)
    if total > PERMUTATION_SEARCH_CAP:
        per_site = [[m] for m in _fallback_permutation(state)[0]]
    best_support = None
    tied = []
    for maps in product(*per_site):
        relabeled = sorted(tuple(m[i] for m, i in zip(maps, idx)) for idx, _ in terms)
        if best_support is None or relabeled < best_support:
            best_support = relabeled
            tied = [maps]
        elif relabeled == best_support:
            tied.append(maps)
    n = state.order()
    best_key = None
    best_maps = None
    for maps in tied:
        rel = sorted(((tuple(m[i] for m, i in zip(maps, idx)), amp) for idx, amp in terms), key=lambda t: t[0])
        plan = _scaling_plan(rel, nsite)
        key = tuple(_key(a, n) for _, a in _scaled_terms(rel, plan, nsite))
        if best_key is None or key < best_key:
            best_key = key
            best_maps = maps
    seq: list[SitedOp] = []
    for k, mapping in enumerate(best_maps):
        seq += _permutation_swaps(k + 1, mapping)
    permuted = apply_sequence(state, seq)
    plan = _scaling_plan(permuted.terms(), nsite)
    for (k, level), f in sorted(plan.items(), key=lambda kv: kv[0]):
        if not f == ONE:
            seq.append(SitedOp(k + 1, Scale(level, f)))
    out = apply_sequence(state, seq)
    return out, seq


def _permutation_swaps(site: int, mapping: Sequence[int]) -> list[SitedOp]:
    """Swaps moving level ``old`` to ``mapping[old]``."""
    current = list(range(len(mapping)))  # current[pos] = original level sitting at pos
    target = [0] * len(mapping)
    for old, new in enumerate(mapping):
        target[new] = old
    seq = []
    for pos in range(len(mapping)):
        if current[pos] != target[pos]:
            other = current.index(target[pos])
            seq.append(SitedOp(site, Swap(pos, other)))
            current[pos], current[other] = current[other], current[pos]
    return seq


# ---------------------------------------------------------------------------
# the reducer


def _profile(state: MultiState) -> PivotProfile:
    site_pivots = {}
    for k in range(1, state.n_sites + 1):
        site_pivots[k] = linalg.rref(state.unfold(k))[2]
    block_ranks = [linalg.rank(b) for b in state.blocks()] if state.n_sites >= 2 else []
    free = [(idx, c) for idx, c in state.terms() if not c == ONE]
    return PivotProfile(site_pivots, block_ranks, tuple(len(p) for p in site_pivots.values()), free)


def _lower_bound(state: MultiState) -> int:
    return max(linalg.rank(state.unfold(k)) for k in range(1, state.n_sites + 1))


class _Reducer:
    def __init__(self, state: MultiState):
        self.state = state
        self.seq: list[SitedOp] = []
        self.floor = _lower_bound(state)

    def candidates(self, expensive: bool):
        cur = self.state
        out = []

        def run(start: MultiState, prefix: list[SitedOp], fn: Callable | None = None):
            seq = list(prefix)
            st = start
            if fn is not None:
                st = fn(st, seq)
            st = greedy(st, seq)
            out.append((st, seq))

        if expensive:
            # the cheap moves already failed on this state
            for st, ops in similarity_moves(cur):
                run(st, ops)
            return out
        run(cur, [])
        if cur.n_sites >= 2:
            run(cur, [], pivot_clear)
        for site in _sweep_order(cur.n_sites):
            st, ops = rref_site(cur, site)
            if ops:
                run(st, ops)
        return out

    def step(self) -> bool:
        current = _support(self.state)
        if current <= self.floor:
            return False
        for expensive in (False, True):
            best = None
            for st, seq in self.candidates(expensive):
                size = _support(st)
                if size < current and (best is None or size < _support(best[0])):
                    best = (st, seq)
            if best is not None:
                self.state = best[0]
                self.seq.extend(best[1])
                return True
        return False


def mfrf_reduce(state: MultiState, max_passes: int = DEFAULT_MAX_PASSES, *, raise_on_limit: bool = False) -> ReductionResult:
    """Reduce a state to its canonical multipartite reduced form with a certificate."""
    if max_passes < 1:
        raise ValueError("max_passes must be >= 1")
    red = _Reducer(state)
    converged = False
    passes = 0
    for passes in range(1, max_passes + 1):
        if not red.step():
            converged = True
            break
    canon, seq = canonicalize(red.state)
    red.seq.extend(seq)
    reduced = canon.canonical_scaled()
    result = ReductionResult(state, reduced, red.seq, _profile(reduced), converged, passes)
    if not converged and raise_on_limit:
        raise MaxPassesExceeded(result)
    return result
