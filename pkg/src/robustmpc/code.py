"""Binary linear codes in systematic form with syndrome decoding.

Words are tuples of bits. Generator rows and parity rows are also kept as
integer masks (bit i = position i) for fast inner products.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Optional, Sequence

import numpy as np

from .errors import DecodeFailure


def _weight(x: int) -> int:
    return bin(x).count("1")


def _to_mask(bits: Sequence[int]) -> int:
    out = 0
    for i, b in enumerate(bits):
        if b & 1:
            out |= 1 << i
    return out


def _to_bits(x: int, m: int) -> tuple:
    return tuple((x >> i) & 1 for i in range(m))


@dataclass(frozen=True)
class LinearCode:
    m: int
    k: int
    d: int
    sigma: Fraction
    epsilon: float
    generator: np.ndarray = field(repr=False, compare=False)
    parity: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        sigma = Fraction(self.sigma)
        object.__setattr__(self, "sigma", sigma)
        m, k = self.m, self.k
        if not 0 < k < m:
            raise ValueError(f"need 0 < k < m, got k={k}, m={m}")
        if not k > (Fraction(1, 2) + 2 * sigma) * m:
            raise ValueError(f"k={k} must exceed (1/2 + 2*sigma)*m = {float((Fraction(1, 2) + 2 * sigma) * m)}")
        if not self.d > self.epsilon * m:
            raise ValueError(f"d={self.d} must exceed epsilon*m = {self.epsilon * m}")
        sm = sigma * m
        if sm.denominator != 1 or sm <= 0:
            raise ValueError(f"sigma*m = {sm} must be a positive integer")
        if 3 * sm > m:
            raise ValueError("three disjoint check sets of size sigma*m do not fit")
        g = np.asarray(self.generator, dtype=np.uint8) % 2
        h = np.asarray(self.parity, dtype=np.uint8) % 2
        if g.shape != (k, m) or h.shape != (m - k, m):
            raise ValueError("generator must be k x m and parity check (m-k) x m")
        if not np.array_equal(g[:, :k], np.eye(k, dtype=np.uint8)):
            raise ValueError("generator matrix must be systematic [I_k | P]")
        if np.any((g.astype(int) @ h.T.astype(int)) % 2):
            raise ValueError("generator and parity-check matrices are not orthogonal")
        object.__setattr__(self, "generator", g)
        object.__setattr__(self, "parity", h)
        true_d = self._min_distance()
        if true_d < self.d:
            raise ValueError(f"declared distance {self.d} exceeds the actual minimum distance {true_d}")
        self._build_tables()

    # -- construction -------------------------------------------------------

    @classmethod
    def from_generator(cls, m: int, k: int, d: int, sigma, epsilon: float, rows) -> "LinearCode":
        """Rows may be bit sequences or hex strings (bit i of the integer = position i)."""
        g = np.zeros((k, m), dtype=np.uint8)
        if len(rows) != k:
            raise ValueError(f"expected {k} generator rows, got {len(rows)}")
        for r, row in enumerate(rows):
            if isinstance(row, str):
                val = int(row, 16)
                if val >> m:
                    raise ValueError(f"generator row {r} is wider than m={m}")
                g[r] = _to_bits(val, m)
            else:
                g[r] = [int(b) & 1 for b in row]
        p = g[:, k:]
        h = np.concatenate([p.T, np.eye(m - k, dtype=np.uint8)], axis=1)
        return cls(m, k, d, Fraction(sigma), epsilon, g, h)

    @classmethod
    def hamming(cls, r: int = 4, sigma=None, epsilon: float = 0.1) -> "LinearCode":
        m = 2 ** r - 1
        k = m - r
        # parity columns: all r-bit vectors of weight >= 2, in increasing order
        cols = [v for v in range(1, 2 ** r) if _weight(v) >= 2]
        g = np.zeros((k, m), dtype=np.uint8)
        for i, v in enumerate(cols):
            g[i, i] = 1
            g[i, k:] = _to_bits(v, r)
        p = g[:, k:]
        h = np.concatenate([p.T, np.eye(r, dtype=np.uint8)], axis=1)
        return cls(m, k, 3, Fraction(1, m) if sigma is None else Fraction(sigma), epsilon, g, h)

    @classmethod
    def parse_spec(cls, text: str, rows: Optional[Sequence[str]] = None) -> "LinearCode":
        """``m,k,d,num/den,epsilon``; without rows only Hamming lengths are known."""
        parts = [t.strip() for t in text.split(",")]
        if len(parts) != 5:
            raise ValueError("code spec must be m,k,d,sigma,epsilon")
        m, k, d = (int(x) for x in parts[:3])
        sigma, eps = Fraction(parts[3]), float(parts[4])
        if rows:
            return cls.from_generator(m, k, d, sigma, eps, rows)
        r = m.bit_length()
        if 2 ** r - 1 != m or k != m - r:
            raise ValueError(f"no built-in [{m},{k}] code; give generator rows")
        code = cls.hamming(r, sigma, eps)
        if d > code.d:
            raise ValueError(f"declared distance {d} exceeds the actual minimum distance {code.d}")
        return code

    # -- tables ---------------------------------------------------------------

    def _min_distance(self) -> int:
        rows = [_to_mask(r) for r in self.generator]
        best = self.m
        for coeffs in range(1, 2 ** self.k):
            x = 0
            for i in range(self.k):
                if (coeffs >> i) & 1:
                    x ^= rows[i]
            best = min(best, _weight(x))
        return best

    def _build_tables(self):
        rows = tuple(_to_mask(r) for r in self.generator)
        prow = tuple(_to_mask(r) for r in self.parity)
        table = {0: 0}
        for w in range(1, self.t + 1):
            for pos in combinations(range(self.m), w):
                e = _to_mask([1 if i in pos else 0 for i in range(self.m)])
                syn = self._syndrome_mask(e, prow)
                table.setdefault(syn, e)
        object.__setattr__(self, "_rows", rows)
        object.__setattr__(self, "_prow", prow)
        object.__setattr__(self, "_table", table)

    @staticmethod
    def _syndrome_mask(x: int, prow) -> int:
        out = 0
        for j, r in enumerate(prow):
            if _weight(x & r) & 1:
                out |= 1 << j
        return out

    @property
    def t(self) -> int:
        return (self.d - 1) // 2

    @property
    def sigma_m(self) -> int:
        return int(self.sigma * self.m)

    def parity_supports(self) -> list:
        """Index sets of the parity-check rows: each XORs to 0 on a codeword."""
        return [[i for i in range(self.m) if (r >> i) & 1] for r in self._prow]

    # -- operations -----------------------------------------------------------

    def encode(self, message: Sequence[int]) -> tuple:
        if len(message) != self.k:
            raise ValueError(f"message length {len(message)} != k={self.k}")
        x = 0
        for i, b in enumerate(message):
            if b & 1:
                x ^= self._rows[i]
        return _to_bits(x, self.m)

    def syndrome(self, word: Sequence[int]) -> int:
        return self._syndrome_mask(_to_mask(word), self._prow)

    def is_codeword(self, word: Sequence[int]) -> bool:
        return len(word) == self.m and self.syndrome(word) == 0

    def decode(self, word: Sequence[int]) -> tuple:
        if len(word) != self.m:
            raise ValueError(f"word length {len(word)} != m={self.m}")
        syn = self.syndrome(word)
        if syn not in self._table:
            raise DecodeFailure(f"syndrome {syn:#x} beyond {self.t} correctable errors")
        return _to_bits(_to_mask(word) ^ self._table[syn], self.m)

    def random_codeword(self, rng) -> tuple:
        return self.encode([rng.getrandbits(1) for _ in range(self.k)])

    def codewords(self):
        for msg in product((0, 1), repeat=self.k):
            yield self.encode(msg)


def code_encode(code: LinearCode, message) -> tuple:
    return code.encode(message)


def code_decode(code: LinearCode, word) -> tuple:
    return code.decode(word)


DEFAULT_CODE = LinearCode.hamming(4)
