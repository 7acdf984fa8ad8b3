"""Exact generators for the named state families.

Normalisation is dropped everywhere except in :func:`fourier_matrix`, where
exact unitarity is the point.
"""

from __future__ import annotations

from itertools import product
from typing import Sequence

from mfrf.exactnum import ONE, ExactScalar, OrderCapExceeded, as_exact, root_of_unity, sqrt_rational
from mfrf.state import MultiState, StateError


class LengthMismatch(StateError):
    pass


class UnrepresentableScale(ArithmeticError):
    pass


class UnknownFamily(KeyError):
    pass


def _check(n: int, lo: int, what: str) -> None:
    if int(n) != n or n < lo:
        raise StateError(f"{what} must be an integer >= {lo}, got {n}")


def ghz(n: int, d: int = 2) -> MultiState:
    _check(n, 2, "N")
    _check(d, 2, "d")
    return MultiState.from_terms((d,) * n, [((k,) * n, ONE) for k in range(d)])


def w(n: int) -> MultiState:
    _check(n, 3, "N")
    return MultiState.from_terms((2,) * n, [(tuple(int(j == k) for j in range(n)), ONE) for k in range(n)])


def dicke(n: int, d: int, excitations: int) -> MultiState:
    """Sum of all basis vectors with index sum ``excitations``."""
    terms = [(idx, ONE) for idx in product(range(d), repeat=n) if sum(idx) == excitations]
    return MultiState.from_terms((d,) * n, terms)


def lme_elementary(n: int, phase) -> MultiState:
    """All-ones qubit tensor with the |1...1> amplitude replaced by ``phase``."""
    _check(n, 2, "N")
    phase = phase if hasattr(phase, "approx") else as_exact(phase)
    if not phase:
        raise ValueError("phase must be nonzero")
    size = 2 ** n
    return MultiState((2,) * n, [ONE] * (size - 1) + [phase])


def _ket(*pairs) -> list:
    return [(tuple(int(ch) for ch in s), ONE if c is None else as_exact(c)) for s, c in pairs]


def _mu() -> MultiState:
    return MultiState.from_terms((2,) * 4, _ket(("0000", None), ("1100", None), ("1111", None)))


def _v1() -> MultiState:
    return MultiState.from_terms((2,) * 4, _ket(("0000", None), ("0001", None), ("1100", None), ("1111", None)))


def _v4() -> MultiState:
    return MultiState.from_terms((2,) * 4, _ket(("0000", None), ("0001", None), ("0010", None), ("1111", None)))


def _v18() -> MultiState:
    def amp(idx):
        if idx[0] == 1 and idx[1] == 1 and idx[2:] != (1, 1):
            return -1
        return 1
    return MultiState.from_function((2,) * 4, amp)


def hypergraph_qudit(d: int) -> MultiState:
    """Three-qudit elementary hypergraph state: c_{abc} = zeta_d^(a b c)."""
    _check(d, 2, "d")
    return MultiState.from_function((d,) * 3, lambda idx: root_of_unity(d, idx[0] * idx[1] * idx[2]))


def h4_reduced_form() -> MultiState:
    """|000> + |111> + |2>(|12> + |21>) + |333>."""
    return MultiState.from_terms((4,) * 3, _ket(("000", None), ("111", None), ("212", None), ("221", None), ("333", None)))


NAMED = {
    "MU": _mu,
    "V1": _v1,
    "V4": _v4,
    "V18": _v18,
    "H3_QUTRIT": lambda: hypergraph_qudit(3),
    "H4_QUQUART": lambda: hypergraph_qudit(4),
}


def hypergraph_named(name: str) -> MultiState:
    try:
        return NAMED[name.upper()]()
    except KeyError:
        raise UnknownFamily(f"unknown named state {name!r}; choose from {sorted(NAMED)}") from None


def hankel_state(n: int, d: int, coeffs: Sequence) -> MultiState:
    """Amplitude at (i_1..i_N) is c_{i_1 + ... + i_N}."""
    _check(n, 1, "N")
    _check(d, 2, "d")
    need = n * (d - 1) + 1
    if len(coeffs) != need:
        raise LengthMismatch(f"need {need} coefficients for N={n}, d={d}, got {len(coeffs)}")
    cs = [c if hasattr(c, "approx") else as_exact(c) for c in coeffs]
    return MultiState.from_function((d,) * n, lambda idx: cs[sum(idx)])


def fourier_matrix(d: int) -> list[list[ExactScalar]]:
    """Unitary DFT: F[m][n] = zeta_d^(m n) / sqrt(d)."""
    _check(d, 2, "d")
    try:
        scale = sqrt_rational(as_exact(f"1/{d}").as_rational())
        return [[root_of_unity(d, m * k) * scale for k in range(d)] for m in range(d)]
    except OrderCapExceeded as exc:
        raise UnrepresentableScale(f"1/sqrt({d}) needs a cyclotomic order above the cap") from exc


FAMILIES = {
    "ghz": "ghz N [d]",
    "w": "w N",
    "lme": "lme N phase   (phase as p/q, or zeta:n:k)",
    "hankel": "hankel N d c0 c1 ...",
    "named": "named " + "|".join(sorted(NAMED)),
    "h4-form": "h4-form",
}
