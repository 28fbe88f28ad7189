"""Joint m-copy observables for polynomial functionals of a qubit state.

A degree-m functional ``sum_t c_t * prod_k rho[i_k, j_k]`` is turned into an
operator ``A`` on m copies with ``Tr(A rho^{(x)m})`` equal to the functional.
Each factor ``rho[i, j]`` becomes the single-copy operator ``|j><i|`` because
``Tr(|j><i| rho) = rho[i, j]``.  For functionals whose term set is closed
under swapping every (i, j) pair, such as the purity, this is the same
operator as substituting ``|i><j|``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .quantum import DensityMatrix, _entries

MAX_DEGREE = 6

IndexPair = tuple[int, int]
Term = tuple[complex, tuple[IndexPair, ...]]


@dataclass(frozen=True)
class PolynomialFunctional:
    degree: int
    terms: tuple[Term, ...]

    def __post_init__(self):
        if not isinstance(self.degree, (int, np.integer)) or self.degree < 1:
            raise ValueError(f"degree must be a positive integer, got {self.degree!r}")
        clean = []
        for coef, pairs in self.terms:
            pairs = tuple(tuple(int(x) for x in p) for p in pairs)
            if len(pairs) != self.degree:
                raise ValueError(
                    f"term {pairs} has {len(pairs)} index pairs, expected {self.degree}")
            for p in pairs:
                if len(p) != 2 or any(x not in (0, 1) for x in p):
                    raise ValueError(f"malformed index pair {p}")
            clean.append((complex(coef), pairs))
        clean.sort(key=lambda t: t[1])
        object.__setattr__(self, "terms", tuple(clean))

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[complex, Sequence[IndexPair]]]) -> "PolynomialFunctional":
        terms = [(c, tuple(p)) for c, p in terms]
        if not terms:
            raise ValueError("cannot infer degree from an empty term list")
        return cls(len(terms[0][1]), tuple(terms))


@dataclass(frozen=True, eq=False)
class JointObservable:
    matrix: np.ndarray

    @property
    def copies(self) -> int:
        return int(round(np.log2(self.matrix.shape[0])))

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0, atol=atol))

    def expectation(self, rho) -> complex:
        """Tr(A rho^{(x)m}) for a single-copy state rho."""
        joint = np.array([[1.0 + 0j]])
        single = _entries(rho)
        for _ in range(self.copies):
            joint = np.kron(joint, single)
        return complex(np.trace(self.matrix @ joint))


_UNIT = np.eye(2, dtype=np.complex128)


def _ketbra(i: int, j: int) -> np.ndarray:
    return np.outer(_UNIT[i], _UNIT[j])


def _monomials(terms) -> dict[tuple[IndexPair, ...], complex]:
    # factors commute, so a monomial is its sorted multiset of index pairs
    out: dict[tuple[IndexPair, ...], complex] = {}
    for coef, pairs in terms:
        key = tuple(sorted(pairs))
        out[key] = out.get(key, 0j) + coef
    return {k: c for k, c in out.items() if abs(c) > 1e-14}


def is_real_valued(poly: PolynomialFunctional, atol: float = 1e-12) -> bool:
    """True when the functional is real on every Hermitian matrix.

    On Hermitian input the conjugate of ``c prod rho[i, j]`` is
    ``conj(c) prod rho[j, i]``, so the functional is real exactly when its
    monomials are closed under that map.
    """
    mono = _monomials(poly.terms)
    conj = _monomials((np.conj(c), tuple((j, i) for i, j in pairs)) for c, pairs in poly.terms)
    keys = set(mono) | set(conj)
    return all(abs(mono.get(k, 0j) - conj.get(k, 0j)) <= atol for k in keys)


def build_observable(poly: PolynomialFunctional, hermitian: bool = True) -> JointObservable:
    """Sum of ``c |j1><i1| (x) ... (x) |jm><im|`` over the terms.

    For real-valued functionals the result is replaced by (A + A^dag)/2,
    which has the same expectation on every ``rho^{(x)m}`` and is Hermitian.
    Higher moments need this: the raw Tr(rho^3) sum is a cyclic shift of
    the copies.  Pass ``hermitian=False`` to get the raw sum.
    """
    dim = 2 ** poly.degree
    out = np.zeros((dim, dim), dtype=np.complex128)
    for coef, pairs in poly.terms:
        op = np.array([[1.0 + 0j]])
        for i, j in pairs:
            op = np.kron(op, _ketbra(j, i))
        out += coef * op
    if hermitian and is_real_valued(poly):
        out = (out + out.conj().T) / 2
    return JointObservable(out)


def moment_functional(m: int) -> PolynomialFunctional:
    """Tr(rho^m) = sum over index cycles rho[i1,i2] rho[i2,i3] ... rho[im,i1]."""
    if not 2 <= m <= MAX_DEGREE:
        raise ValueError(f"moment order must be in [2, {MAX_DEGREE}], got {m}")
    terms = []
    for idx in itertools.product((0, 1), repeat=m):
        pairs = tuple((idx[k], idx[(k + 1) % m]) for k in range(m))
        terms.append((1.0, pairs))
    return PolynomialFunctional(m, tuple(terms))


def purity_functional() -> PolynomialFunctional:
    """rho00^2 + rho01 rho10 + rho10 rho01 + rho11^2."""
    return PolynomialFunctional(2, (
        (1.0, ((0, 0), (0, 0))),
        (1.0, ((0, 1), (1, 0))),
        (1.0, ((1, 0), (0, 1))),
        (1.0, ((1, 1), (1, 1))),
    ))


def evaluate(poly: PolynomialFunctional, rho) -> complex:
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    if m.shape != (2, 2):
        raise ValueError(f"functionals act on 2x2 matrices, got {m.shape}")
    total = 0j
    for coef, pairs in poly.terms:
        prod = coef
        for i, j in pairs:
            prod *= m[i, j]
        total += prod
    return complex(total)
