"""Dirichlet characters modulo an odd prime.

Every character is indexed through one primitive root g:
chi_j(g^k) = e(j k / (q-1)).  j = 0 is the principal character, and for
prime q all other j give primitive characters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .arith import is_prime, primitive_root
from .errors import DomainError, ValidationError


@dataclass(frozen=True, eq=False)
class CharacterTable:
    modulus: int
    generator: int
    dlog: np.ndarray  # dlog[a] = ind(a) for 1 <= a < q; dlog[0] = -1
    roots: np.ndarray  # roots[j] = e(j / (q-1))

    @property
    def order(self) -> int:
        return self.modulus - 1

    def ind(self, a: int) -> int:
        return int(self.dlog[a % self.modulus])

    def index_of(self, n: np.ndarray) -> np.ndarray:
        """ind(n mod q) elementwise, -1 where q | n."""
        return self.dlog[np.asarray(n) % self.modulus]

    @cached_property
    def additive_phases(self) -> np.ndarray:
        """e(a/q) for a = 0..q-1."""
        a = np.arange(self.modulus)
        return np.exp(2j * np.pi * a / self.modulus)


def build_table(q: int) -> CharacterTable:
    if q < 3 or q % 2 == 0 or not is_prime(q):
        raise ValidationError(f"modulus must be an odd prime, got {q}")
    g = primitive_root(q)
    dlog = np.full(q, -1, dtype=np.int64)
    x = 1
    for k in range(q - 1):
        dlog[x] = k
        x = x * g % q
    roots = np.exp(2j * np.pi * np.arange(q - 1) / (q - 1))
    dlog.setflags(write=False)
    roots.setflags(write=False)
    return CharacterTable(modulus=q, generator=g, dlog=dlog, roots=roots)


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    table: CharacterTable
    index: int

    @property
    def modulus(self) -> int:
        return self.table.modulus

    @property
    def primitive(self) -> bool:
        return self.index % self.table.order != 0

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.table, (-self.index) % self.table.order)

    def __call__(self, a: int) -> complex:
        return char_value(self, a)

    def values(self, n) -> np.ndarray:
        """chi(n) for an integer array n (0 where q | n)."""
        idx = self.table.index_of(n)
        out = self.table.roots[(self.index * idx) % self.table.order]
        return np.where(idx < 0, 0.0, out)

    @cached_property
    def residue_values(self) -> np.ndarray:
        """chi(a) for a = 0..q-1."""
        return self.values(np.arange(self.modulus))

    def is_real(self) -> bool:
        return (2 * self.index) % self.table.order == 0

    def __repr__(self):
        return f"DirichletCharacter(q={self.modulus}, j={self.index})"


def char_value(chi: DirichletCharacter, a: int) -> complex:
    k = chi.table.dlog[a % chi.modulus]
    if k < 0:
        return 0j
    return complex(chi.table.roots[(chi.index * int(k)) % chi.table.order])


def gauss_sum(chi: DirichletCharacter) -> complex:
    """Normalised Gauss sum q^{-1/2} sum_a chi(a) e(a/q)."""
    if not chi.primitive:
        raise DomainError("Gauss sum requested for the principal character")
    q = chi.modulus
    total = np.sum(chi.residue_values * chi.table.additive_phases)
    return complex(total) / math.sqrt(q)


def gauss_sums_all(table: CharacterTable) -> np.ndarray:
    """Normalised Gauss sums for j = 0..q-2 in one FFT (index 0 is not primitive)."""
    q = table.modulus
    g = table.generator
    # h[k] = e(g^k / q)
    powers = np.empty(q - 1, dtype=np.int64)
    x = 1
    for k in range(q - 1):
        powers[k] = x
        x = x * g % q
    h = table.additive_phases[powers]
    return (q - 1) * np.fft.ifft(h) / math.sqrt(q)


def enumerate_primitive(table: CharacterTable) -> list[DirichletCharacter]:
    return [DirichletCharacter(table, j) for j in range(1, table.order)]


def principal(table: CharacterTable) -> DirichletCharacter:
    return DirichletCharacter(table, 0)


def parity(chi: DirichletCharacter) -> int:
    """chi(-1) as +1 or -1."""
    v = char_value(chi, chi.modulus - 1)
    return 1 if v.real > 0 else -1


def quadratic_character(table: CharacterTable) -> DirichletCharacter:
    return DirichletCharacter(table, table.order // 2)

