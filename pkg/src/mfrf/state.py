"""Coefficient tensors of multipartite pure states.

A :class:`MultiState` stores the amplitudes ``c[i1, ..., iN]`` densely in
row-major order (last index fastest).  Sites are numbered from 1 as in the
usual ``E_k`` notation; levels from 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from mfrf import linalg
from mfrf.exactnum import ONE, ZERO, ExactScalar, FloatScalar, as_exact


class StateError(ValueError):
    pass


class IndexOutOfRange(StateError):
    pass


class ZeroState(StateError):
    pass


class DimMismatch(StateError):
    pass


class MultiState:
    """Immutable dense coefficient tensor over subsystem dimensions ``dims``."""

    __slots__ = ("dims", "coeffs", "_strides")

    def __init__(self, dims: Sequence[int], coeffs: Sequence, *, allow_zero: bool = False):
        dims = tuple(int(d) for d in dims)
        if not dims:
            raise StateError("a state needs at least one subsystem")
        if any(d < 2 for d in dims):
            raise StateError(f"subsystem dimensions must be >= 2, got {dims}")
        coeffs = tuple(coeffs)
        if len(coeffs) != math.prod(dims):
            raise StateError(f"expected {math.prod(dims)} amplitudes, got {len(coeffs)}")
        if not allow_zero and not any(coeffs):
            raise ZeroState("all amplitudes vanish")
        self.dims = dims
        self.coeffs = coeffs
        strides = [1] * len(dims)
        for k in range(len(dims) - 2, -1, -1):
            strides[k] = strides[k + 1] * dims[k + 1]
        self._strides = tuple(strides)

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_terms(cls, dims: Sequence[int], terms: Iterable[tuple[Sequence[int], object]]) -> MultiState:
        """Dense tensor from ``(multi_index, amplitude)`` pairs; duplicates are summed."""
        dims = tuple(dims)
        size = math.prod(dims)
        coeffs = [ZERO] * size
        strides = _strides(dims)
        for idx, amp in terms:
            idx = tuple(idx)
            if len(idx) != len(dims) or any(not 0 <= i < d for i, d in zip(idx, dims)):
                raise IndexOutOfRange(f"index {idx} out of range for dims {dims}")
            flat = sum(i * s for i, s in zip(idx, strides))
            amp = amp if isinstance(amp, (ExactScalar, FloatScalar)) else as_exact(amp)
            coeffs[flat] = coeffs[flat] + amp
        return cls(dims, coeffs)

    @classmethod
    def from_function(cls, dims: Sequence[int], fn) -> MultiState:
        dims = tuple(dims)
        return cls(dims, [_coerce(fn(idx)) for idx in product(*(range(d) for d in dims))])

    @classmethod
    def from_unfolding(cls, dims: Sequence[int], site: int, matrix) -> MultiState:
        """Inverse of :meth:`unfold`."""
        dims = tuple(dims)
        k = site - 1
        rest = [d for j, d in enumerate(dims) if j != k]
        coeffs = [ZERO] * math.prod(dims)
        strides = _strides(dims)
        rest_strides = [s for j, s in enumerate(strides) if j != k]
        for level in range(dims[k]):
            row = matrix[level]
            base = level * strides[k]
            for col, idx in enumerate(product(*(range(d) for d in rest))):
                coeffs[base + sum(i * s for i, s in zip(idx, rest_strides))] = row[col]
        return cls(dims, coeffs)

    # -- indexing -------------------------------------------------------------

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    @property
    def strides(self) -> tuple[int, ...]:
        return self._strides

    def flat_index(self, idx: Sequence[int]) -> int:
        return sum(i * s for i, s in zip(idx, self._strides))

    def multi_index(self, flat: int) -> tuple[int, ...]:
        out = []
        for s, d in zip(self._strides, self.dims):
            out.append((flat // s) % d)
        return tuple(out)

    def __getitem__(self, idx: Sequence[int]):
        return self.coeffs[self.flat_index(idx)]

    def terms(self) -> list[tuple[tuple[int, ...], object]]:
        """Nonzero amplitudes in lexicographic index order."""
        return [(self.multi_index(f), c) for f, c in enumerate(self.coeffs) if c]

    def support_size(self) -> int:
        return sum(1 for c in self.coeffs if c)

    def order(self) -> int:
        n = 1
        for c in self.coeffs:
            if isinstance(c, ExactScalar) and c.order > 1:
                n = math.lcm(n, c.order)
        return n

    # -- matrix views -----------------------------------------------------------

    def check_site(self, site: int) -> None:
        if not 1 <= site <= len(self.dims):
            raise IndexOutOfRange(f"site {site} out of range 1..{len(self.dims)}")

    def unfold(self, site: int) -> list[list]:
        """d_site x (prod of the other dims) matrix; remaining indices in order, last fastest."""
        self.check_site(site)
        k = site - 1
        d = self.dims[k]
        sk = self._strides[k]
        rest_positions = self._rest_offsets(k)
        return [[self.coeffs[level * sk + off] for off in rest_positions] for level in range(d)]

    def _rest_offsets(self, k: int) -> list[int]:
        ranges = [range(d) for j, d in enumerate(self.dims) if j != k]
        strides = [s for j, s in enumerate(self._strides) if j != k]
        return [sum(i * s for i, s in zip(idx, strides)) for idx in product(*ranges)]

    def coefficient_matrix(self) -> list[list]:
        return self.unfold(1)

    def blocks(self) -> list[list[list]]:
        """The d1 x dN blocks A_m, m running over the middle multi-index in order."""
        if len(self.dims) < 2:
            raise StateError("blocks need at least two sites")
        d1, dn = self.dims[0], self.dims[-1]
        middle = math.prod(self.dims[1:-1])
        s1 = self._strides[0]
        out = []
        for m in range(middle):
            out.append([[self.coeffs[r * s1 + m * dn + c] for c in range(dn)] for r in range(d1)])
        return out

    def cut_matrix(self, rows: Sequence[int]) -> list[list]:
        """Matrix of the bipartition ``rows | rest`` (1-based sites)."""
        rows = sorted(rows)
        cols = [k for k in range(1, len(self.dims) + 1) if k not in rows]
        if not rows or not cols:
            raise StateError("bipartition must be nontrivial")
        rdims = [self.dims[k - 1] for k in rows]
        cdims = [self.dims[k - 1] for k in cols]
        out = []
        for ridx in product(*(range(d) for d in rdims)):
            row = []
            for cidx in product(*(range(d) for d in cdims)):
                full = [0] * len(self.dims)
                for k, i in zip(rows, ridx):
                    full[k - 1] = i
                for k, i in zip(cols, cidx):
                    full[k - 1] = i
                row.append(self[full])
            out.append(row)
        return out

    def site_ranks(self) -> tuple[int, ...]:
        return tuple(linalg.rank(self.unfold(k)) for k in range(1, len(self.dims) + 1))

    # -- comparison ---------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiState):
            return NotImplemented
        return self.dims == other.dims and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.dims, self.coeffs))

    def scaled(self, factor) -> MultiState:
        return MultiState(self.dims, [c * factor if c else c for c in self.coeffs])

    def canonical_scaled(self) -> MultiState:
        """Divide by the first nonzero amplitude in lexicographic order."""
        first = next(c for c in self.coeffs if c)
        if first == ONE:
            return self
        inv = first.inverse()
        return MultiState(self.dims, [c * inv if c else ZERO for c in self.coeffs])

    def equal_up_to_global_scale(self, other: MultiState) -> bool:
        if self.dims != other.dims:
            raise DimMismatch(f"dims {self.dims} vs {other.dims}")
        ia = next(i for i, c in enumerate(self.coeffs) if c)
        ib = next((i for i, c in enumerate(other.coeffs) if c), None)
        if ia != ib:
            return False
        a0, b0 = self.coeffs[ia], other.coeffs[ib]
        # a = mu b with mu = a0 / b0  <=>  a * b0 == b * a0 entrywise
        return all((x * b0 if x else x) == (y * a0 if y else y) for x, y in zip(self.coeffs, other.coeffs))

    def to_float(self, tol: float) -> MultiState:
        return MultiState(self.dims, [FloatScalar(c, tol) if not isinstance(c, FloatScalar) else c for c in self.coeffs])

    def __repr__(self) -> str:
        return f"MultiState(dims={self.dims}, terms={self.ket()})"

    def ket(self) -> str:
        parts = []
        for idx, c in self.terms():
            label = "".join(str(i) if i < 10 else f"({i})" for i in idx)
            coef = "" if c == ONE else f"({c})"
            parts.append(f"{coef}|{label}>")
        return " + ".join(parts)


def _strides(dims: Sequence[int]) -> list[int]:
    strides = [1] * len(dims)
    for k in range(len(dims) - 2, -1, -1):
        strides[k] = strides[k + 1] * dims[k + 1]
    return strides


def _coerce(x):
    return x if isinstance(x, (ExactScalar, FloatScalar)) else as_exact(x)


def unfold(state: MultiState, site: int) -> list[list]:
    return state.unfold(site)


def blocks(state: MultiState) -> list[list[list]]:
    return state.blocks()


def equal_up_to_global_scale(a: MultiState, b: MultiState) -> bool:
    return a.equal_up_to_global_scale(b)


def from_terms(dims, terms) -> MultiState:
    return MultiState.from_terms(dims, terms)


@dataclass(frozen=True)
class BlockView:
    index: int
    matrix: tuple


def block_views(state: MultiState) -> list[BlockView]:
    return [BlockView(m, tuple(tuple(r) for r in b)) for m, b in enumerate(state.blocks())]
