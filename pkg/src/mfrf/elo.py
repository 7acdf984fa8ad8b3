"""Elementary local operations (ELOs) and their sequences.

Three generators act on the levels of one subsystem:

* ``Swap(i, j)``       exchanges levels i and j,
* ``Scale(k, lam)``    multiplies level k by a nonzero lam,
* ``AddMul(i, lam, j)`` adds lam times level i onto level j.

As matrices these are the usual elementary matrices F(i,j), S(k,lam) and
L(i,lam,j) = I + lam |j><i|.  Acting at site k they multiply the site-k
unfolding from the left.

Sequences are stored in *application order*: the first op in the list is
applied first.  An operator product written ``A B C |psi>`` is therefore the
sequence ``[C, B, A]``.  :func:`compose_to_matrix` returns the operator a
single-site sequence realises, i.e. the product ``E_n ... E_2 E_1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

from mfrf import linalg
from mfrf.exactnum import ZERO, ExactScalar, FloatScalar, as_exact
from mfrf.state import MultiState


class LevelOutOfRange(ValueError):
    pass


class MixedSites(ValueError):
    pass


SingularMatrix = linalg.SingularMatrix


def _scalar(x):
    return x if isinstance(x, (ExactScalar, FloatScalar)) else as_exact(x)


@dataclass(frozen=True)
class Swap:
    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("Swap needs two distinct levels")
        if self.i > self.j:
            a, b = self.j, self.i
            object.__setattr__(self, "i", a)
            object.__setattr__(self, "j", b)

    def levels(self) -> tuple[int, ...]:
        return (self.i, self.j)

    def inverse(self) -> Swap:
        return self

    def __str__(self) -> str:
        return f"F({self.i},{self.j})"


@dataclass(frozen=True)
class Scale:
    k: int
    lam: object

    def __post_init__(self):
        lam = _scalar(self.lam)
        if not lam:
            raise ValueError("Scale factor must be nonzero")
        object.__setattr__(self, "lam", lam)

    def levels(self) -> tuple[int, ...]:
        return (self.k,)

    def inverse(self) -> Scale:
        return Scale(self.k, self.lam.inverse())

    def __str__(self) -> str:
        return f"S({self.k},{self.lam})"


@dataclass(frozen=True)
class AddMul:
    i: int
    lam: object
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("AddMul needs two distinct levels")
        object.__setattr__(self, "lam", _scalar(self.lam))

    def levels(self) -> tuple[int, ...]:
        return (self.i, self.j)

    def inverse(self) -> AddMul:
        return AddMul(self.i, -self.lam, self.j)

    def __str__(self) -> str:
        return f"L({self.i},{self.lam},{self.j})"


ElementaryOp = Union[Swap, Scale, AddMul]


@dataclass(frozen=True)
class SitedOp:
    """An elementary op tagged with the (1-based) site it acts on."""

    site: int
    op: ElementaryOp

    def inverse(self) -> SitedOp:
        return SitedOp(self.site, self.op.inverse())

    def __str__(self) -> str:
        s = str(self.op)
        return f"{s[0]}{self.site}{s[1:]}"


EloSequence = list  # list[SitedOp], application order


def from_row_op(t: tuple) -> ElementaryOp:
    kind = t[0]
    if kind == "F":
        return Swap(t[1], t[2])
    if kind == "S":
        return Scale(t[1], t[2])
    return AddMul(t[1], t[2], t[3])


def _check_levels(op: ElementaryOp, d: int) -> None:
    if any(not 0 <= l < d for l in op.levels()):
        raise LevelOutOfRange(f"{op} needs levels below {d}")


def elementary_matrix(op: ElementaryOp, d: int) -> list[list]:
    _check_levels(op, d)
    m = linalg.identity(d)
    if isinstance(op, Swap):
        m[op.i], m[op.j] = m[op.j], m[op.i]
    elif isinstance(op, Scale):
        m[op.k][op.k] = op.lam
    else:
        m[op.j][op.i] = op.lam
    return m


@lru_cache(maxsize=4096)
def _slice_offsets(dims: tuple[int, ...], k: int) -> tuple[int, ...]:
    """Flat offsets of the entries with level 0 at site k."""
    stride = 1
    for d in dims[k + 1:]:
        stride *= d
    outer = 1
    for d in dims[:k]:
        outer *= d
    block = dims[k] * stride
    return tuple(o * block + r for o in range(outer) for r in range(stride))


def site_stride(dims: Sequence[int], site: int) -> int:
    stride = 1
    for d in dims[site:]:
        stride *= d
    return stride


def apply(state: MultiState, sop: SitedOp) -> MultiState:
    """New state with ``sop`` applied."""
    state.check_site(sop.site)
    k = sop.site - 1
    d = state.dims[k]
    op = sop.op
    _check_levels(op, d)
    s = site_stride(state.dims, sop.site)
    offsets = _slice_offsets(state.dims, k)
    c = list(state.coeffs)
    if isinstance(op, Swap):
        a, b = op.i * s, op.j * s
        for o in offsets:
            c[o + a], c[o + b] = c[o + b], c[o + a]
    elif isinstance(op, Scale):
        a = op.k * s
        lam = op.lam
        for o in offsets:
            x = c[o + a]
            if x:
                c[o + a] = x * lam
    else:
        a, b = op.i * s, op.j * s
        lam = op.lam
        for o in offsets:
            x = c[o + a]
            if x:
                c[o + b] = c[o + b] + lam * x
        if isinstance(lam, FloatScalar):
            c = [v if v else ZERO for v in c]
    return MultiState(state.dims, c, allow_zero=True)


def apply_sequence(state: MultiState, seq: Iterable[SitedOp]) -> MultiState:
    for sop in seq:
        state = apply(state, sop)
    return state


def inverse(sop: SitedOp) -> SitedOp:
    return sop.inverse()


def inverse_sequence(seq: Sequence[SitedOp]) -> list[SitedOp]:
    return [sop.inverse() for sop in reversed(seq)]


def decompose_invertible(m: Sequence[Sequence], site: int | None = None) -> list:
    """Elementary factorisation of an invertible matrix.

    Gauss-Jordan reduces ``m`` to the identity with row ops E_1..E_r, so
    ``m = E_1^-1 ... E_r^-1`` and the application-order sequence is the
    inverse sequence of the reduction.  Returns bare ops, or SitedOps when
    ``site`` is given.
    """
    d = len(m)
    r, ops, pivots = linalg.rref([list(row) for row in m])
    if len(pivots) < d:
        raise SingularMatrix(f"matrix has rank {len(pivots)} < {d}")
    seq = [from_row_op(t).inverse() for t in reversed(ops)]
    if site is None:
        return seq
    return [SitedOp(site, op) for op in seq]


def compose_to_matrix(seq: Sequence, d: int) -> list[list]:
    """The operator realised by applying a single-site sequence in order."""
    sites = {sop.site for sop in seq if isinstance(sop, SitedOp)}
    if len(sites) > 1:
        raise MixedSites(f"sequence touches sites {sorted(sites)}")
    m = linalg.identity(d)
    for item in seq:
        op = item.op if isinstance(item, SitedOp) else item
        _check_levels(op, d)
        linalg.apply_row_op(m, _row_tuple(op))
    return m


def _row_tuple(op: ElementaryOp) -> tuple:
    if isinstance(op, Swap):
        return ("F", op.i, op.j)
    if isinstance(op, Scale):
        return ("S", op.k, op.lam)
    return ("L", op.i, op.lam, op.j)


def apply_matrix(state: MultiState, site: int, m) -> tuple[MultiState, list[SitedOp]]:
    """Apply an invertible local matrix through its elementary factorisation."""
    seq = decompose_invertible(m, site)
    return apply_sequence(state, seq), seq


def sites_used(seq: Iterable[SitedOp]) -> set[int]:
    return {sop.site for sop in seq}


def format_sequence(seq: Sequence[SitedOp]) -> str:
    """Operator-product notation (rightmost acts first)."""
    return " ".join(str(s) for s in reversed(seq))
