"""Symmetric moment tensors and Isserlis (Wick) Gaussian moments."""

from __future__ import annotations

from math import factorial
from typing import Dict, Iterable, Tuple

import numpy as np

from ..errors import DomainError

Index = Tuple[int, ...]

DEFAULT_ORDER_CAP = 8


class SymmetricTensor:
    """Order-t symmetric tensor over d coordinates, stored by sorted index tuple.

    Lookup accepts any permutation of an index tuple. Missing entries are 0.
    """

    __slots__ = ("order", "dim", "entries")

    def __init__(self, order: int, dim: int, entries: Dict[Index, float] = None):
        if order <= 0 or dim <= 0:
            raise DomainError("tensor order and dimension must be positive")
        self.order = order
        self.dim = dim
        self.entries: Dict[Index, float] = {}
        if entries:
            for idx, val in entries.items():
                self[idx] = val

    def __setitem__(self, idx: Index, val: float):
        key = self._key(idx)
        if val == 0.0:
            self.entries.pop(key, None)
        else:
            self.entries[key] = val

    def __getitem__(self, idx: Index) -> float:
        return self.entries.get(self._key(idx), 0.0)

    def _key(self, idx: Index) -> Index:
        if len(idx) != self.order:
            raise DomainError(f"index length {len(idx)} != order {self.order}")
        for i in idx:
            if not (0 <= i < self.dim):
                raise DomainError(f"index {i} out of range for dim {self.dim}")
        return tuple(sorted(idx))

    def add(self, idx: Index, val: float):
        key = self._key(idx)
        s = self.entries.get(key, 0.0) + val
        if s == 0.0:
            self.entries.pop(key, None)
        else:
            self.entries[key] = s

    def inf_norm(self) -> float:
        return max((abs(v) for v in self.entries.values()), default=0.0)

    def sorted_indices(self) -> Iterable[Index]:
        return sorted(self.entries)

    def __sub__(self, other: "SymmetricTensor") -> "SymmetricTensor":
        if (self.order, self.dim) != (other.order, other.dim):
            raise DomainError("tensor shape mismatch")
        out = SymmetricTensor(self.order, self.dim)
        for k, v in self.entries.items():
            out.add(k, v)
        for k, v in other.entries.items():
            out.add(k, -v)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, SymmetricTensor)
            and (self.order, self.dim) == (other.order, other.dim)
            and self.entries == other.entries
        )


def all_sorted_indices(dim: int, order: int):
    """All nondecreasing index tuples of the given length."""
    out = []

    def rec(prefix, start):
        if len(prefix) == order:
            out.append(tuple(prefix))
            return
        for i in range(start, dim):
            rec(prefix + [i], i)

    rec([], 0)
    return out


def index_multiplicity(sorted_idx: Index) -> int:
    """Number of ordered tuples equal to this sorted tuple up to permutation."""
    n = factorial(len(sorted_idx))
    run = 1
    for a, b in zip(sorted_idx, sorted_idx[1:]):
        if a == b:
            run += 1
        else:
            n //= factorial(run)
            run = 1
    n //= factorial(run)
    return n


def pairings(items: Tuple[int, ...]):
    """All perfect matchings of an even-length tuple."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for j in range(len(rest)):
        pair = (first, rest[j])
        remaining = rest[:j] + rest[j + 1 :]
        for sub in pairings(remaining):
            yield (pair,) + sub


def check_psd(matrix: np.ndarray, tol: float = 1e-10) -> bool:
    sym = 0.5 * (matrix + matrix.T)
    eigs = np.linalg.eigvalsh(sym)
    return bool(eigs.min() >= -tol)


def sigma_as_matrix(sigma) -> np.ndarray:
    if isinstance(sigma, SymmetricTensor):
        if sigma.order != 2:
            raise DomainError("sigma must have order 2")
        d = sigma.dim
        mat = np.zeros((d, d))
        for (i, j), v in sigma.entries.items():
            mat[i, j] = v
            mat[j, i] = v
        return mat
    mat = np.asarray(sigma, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DomainError("sigma must be square")
    return mat


def gaussian_moment_tensor(sigma, t: int, order_cap: int = DEFAULT_ORDER_CAP) -> SymmetricTensor:
    """E[X^{⊗t}] for X ~ N(0, Σ) via Isserlis: sum over pairings of Σ products.

    ``sigma`` may be a dense (d,d) array or an order-2 SymmetricTensor.
    """
    mat = sigma_as_matrix(sigma)
    d = mat.shape[0]
    if t % 2 == 1 or t <= 0:
        raise DomainError("unsupported tensor order: t must be a positive even integer")
    if t > order_cap:
        raise DomainError(f"tensor order {t} exceeds cap {order_cap}")
    if not check_psd(mat):
        raise DomainError("sigma must be positive semidefinite")

    out = SymmetricTensor(t, d)
    for idx in all_sorted_indices(d, t):
        total = 0.0
        for match in pairings(tuple(range(t))):
            prod = 1.0
            for a, b in match:
                prod *= mat[idx[a], idx[b]]
            total += prod
        if total != 0.0:
            out[idx] = total
    return out


def tensor_apply_power(tensor: SymmetricTensor, v: np.ndarray) -> float:
    """Full contraction over ordered tuples, sum_{T in [d]^t} T_T v_T."""
    v = np.asarray(v, dtype=float)
    total = 0.0
    for idx, val in tensor.entries.items():
        total += val * index_multiplicity(idx) * float(np.prod(v[list(idx)]))
    return total
