"""Orthonormal Hermitian operator bases.

The generalized Gell-Mann matrices are produced in a fixed canonical order:
all symmetric off-diagonal operators, then all antisymmetric ones (both in
lexicographic ``(j, k)`` order with ``j < k``), then the ``d - 1`` diagonal
operators. Every operator is normalized to unit Hilbert-Schmidt norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadCount, BadDim


@dataclass(frozen=True)
class OperatorBasis:
    """``d**2 - 1`` traceless Hermitian operators with ``Tr(F_k F_l) = delta_kl``."""

    dim: int
    ops: np.ndarray  # shape (d*d - 1, d, d)

    def __len__(self):
        return len(self.ops)

    def gram(self) -> np.ndarray:
        return np.einsum("kij,lji->kl", self.ops, self.ops)


@dataclass(frozen=True)
class PartitionedBasis:
    """A basis regrouped into ``d + 1`` groups of ``d - 1`` operators.

    ``groups[b, n]`` is the operator indexed ``(n + 1, b + 1)`` in 1-based
    notation and ``group_sums[b]`` is the sum over ``n`` within group ``b``.
    """

    dim: int
    groups: np.ndarray  # shape (d + 1, d - 1, d, d)
    group_sums: np.ndarray = field(init=False)  # shape (d + 1, d, d)

    def __post_init__(self):
        object.__setattr__(self, "group_sums", self.groups.sum(axis=1))

    def flatten(self) -> OperatorBasis:
        d = self.dim
        return OperatorBasis(d, self.groups.reshape(d * d - 1, d, d))


@dataclass(frozen=True)
class ObservableSet:
    """``d**2`` orthonormal Hermitian observables (the Gell-Mann basis plus ``I/sqrt(d)``)."""

    dim: int
    ops: np.ndarray  # shape (d*d, d, d)

    def __len__(self):
        return len(self.ops)


def _check_dim(d: int) -> None:
    if int(d) != d or d < 2:
        raise BadDim(f"dimension must be an integer >= 2, got {d}")


def gell_mann_basis(d: int) -> OperatorBasis:
    _check_dim(d)
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    ops = np.zeros((d * d - 1, d, d), dtype=np.complex128)
    r2 = np.sqrt(0.5)
    i = 0
    for j, k in pairs:
        ops[i, j, k] = ops[i, k, j] = r2
        i += 1
    for j, k in pairs:
        ops[i, j, k] = -1j * r2
        ops[i, k, j] = 1j * r2
        i += 1
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        ops[i] = np.diag(diag / np.sqrt(l * (l + 1)))
        i += 1
    ops.setflags(write=False)
    return OperatorBasis(d, ops)


def partition_basis(basis: OperatorBasis) -> PartitionedBasis:
    """Split a basis into contiguous blocks of ``d - 1`` operators (block ``b`` is group ``b``)."""
    d = basis.dim
    if len(basis.ops) != d * d - 1:
        raise BadCount(f"expected {d * d - 1} operators for d={d}, got {len(basis.ops)}")
    groups = np.array(basis.ops).reshape(d + 1, d - 1, d, d)
    groups.setflags(write=False)
    return PartitionedBasis(d, groups)


def observable_set(d: int) -> ObservableSet:
    basis = gell_mann_basis(d)
    ident = np.eye(d, dtype=np.complex128)[None] / np.sqrt(d)
    ops = np.concatenate([ident, basis.ops])
    ops.setflags(write=False)
    return ObservableSet(d, ops)
