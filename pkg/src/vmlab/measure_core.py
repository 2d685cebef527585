"""Finite atomized measure spaces, measurable sets, partitions, simple functions.

Everything lives on a fixed list of atoms with strictly positive weights; the
sigma-algebra is the full power set, realized as dense boolean masks.  All
types are immutable after construction and safe to share between workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _frozen(a, dtype) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    """Atoms 0..n-1 with strictly positive weights mu_i."""

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights, float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise ValueError("weights must be positive and finite")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int, total: float = 1.0) -> "MeasureSpace":
        if n < 1:
            raise ValueError("need at least one atom")
        return cls(np.full(n, total / n))

    @property
    def n(self) -> int:
        return self.weights.size

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))


def same_space(a: MeasureSpace, b: MeasureSpace) -> bool:
    return a is b or (a.n == b.n and np.array_equal(a.weights, b.weights))


@dataclass(frozen=True, eq=False)
class MeasurableSet:
    """Subset of atoms as a boolean membership mask."""

    space: MeasureSpace
    members: np.ndarray

    def __post_init__(self):
        mask = _frozen(self.members, bool)
        if mask.shape != (self.space.n,):
            raise ValueError("membership mask length must equal the number of atoms")
        object.__setattr__(self, "members", mask)

    @classmethod
    def empty(cls, space: MeasureSpace) -> "MeasurableSet":
        return cls(space, np.zeros(space.n, dtype=bool))

    @classmethod
    def full(cls, space: MeasureSpace) -> "MeasurableSet":
        return cls(space, np.ones(space.n, dtype=bool))

    @classmethod
    def from_indices(cls, space: MeasureSpace, indices) -> "MeasurableSet":
        mask = np.zeros(space.n, dtype=bool)
        mask[np.asarray(indices, dtype=int)] = True
        return cls(space, mask)

    def complement(self) -> "MeasurableSet":
        return MeasurableSet(self.space, ~self.members)

    def mass(self) -> float:
        return float(np.sum(self.space.weights[self.members]))


@dataclass(frozen=True, eq=False)
class SimpleFunction:
    """Real coefficient per atom; doubles as a function, a density, or a dual element."""

    space: MeasureSpace
    coeffs: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coeffs, float)
        if c.shape != (self.space.n,):
            raise ValueError("coefficient vector length must equal the number of atoms")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, space: MeasureSpace) -> "SimpleFunction":
        return cls(space, np.zeros(space.n))

    @classmethod
    def indicator(cls, A: MeasurableSet) -> "SimpleFunction":
        return cls(A.space, A.members.astype(float))


def mu_integral(f: SimpleFunction) -> float:
    """Integral of f against the atom weights."""
    return float(np.sum(f.coeffs * f.space.weights))


def l1_mu_norm(f: SimpleFunction) -> float:
    """Scalar L1(mu) norm, sum of mu_i |f_i|."""
    return float(np.sum(np.abs(f.coeffs) * f.space.weights))


def sign_function(A: MeasurableSet) -> SimpleFunction:
    """The +-1 valued function that is +1 on A and -1 on its complement."""
    return SimpleFunction(A.space, np.where(A.members, 1.0, -1.0))


@dataclass(frozen=True, eq=False)
class Partition:
    """Partition of the atoms into n_blocks nonempty blocks, stored atom -> block."""

    space: MeasureSpace
    block_of: np.ndarray
    n_blocks: int

    def __post_init__(self):
        b = _frozen(self.block_of, int)
        if b.shape != (self.space.n,):
            raise ValueError("block map length must equal the number of atoms")
        if self.n_blocks < 1 or b.min() < 0 or b.max() >= self.n_blocks:
            raise ValueError("block indices out of range")
        if np.any(np.bincount(b, minlength=self.n_blocks) == 0):
            raise ValueError("every block must be nonempty")
        object.__setattr__(self, "block_of", b)

    @classmethod
    def singletons(cls, space: MeasureSpace) -> "Partition":
        return cls(space, np.arange(space.n), space.n)

    @classmethod
    def one_block(cls, space: MeasureSpace) -> "Partition":
        return cls(space, np.zeros(space.n, dtype=int), 1)

    @classmethod
    def from_blocks(cls, space: MeasureSpace, blocks) -> "Partition":
        block_of = np.full(space.n, -1, dtype=int)
        for k, ids in enumerate(blocks):
            ids = np.asarray(ids, dtype=int)
            if np.any(block_of[ids] >= 0):
                raise ValueError("blocks must be disjoint")
            block_of[ids] = k
        if np.any(block_of < 0):
            raise ValueError("blocks must cover all atoms")
        return cls(space, block_of, len(blocks))

    def blocks(self) -> list[np.ndarray]:
        """Derived view: list of atom-index arrays, one per block."""
        return [np.flatnonzero(self.block_of == k) for k in range(self.n_blocks)]

    def block_masses(self) -> np.ndarray:
        return np.bincount(self.block_of, weights=self.space.weights, minlength=self.n_blocks)


def refine(p: Partition, q: Partition) -> bool:
    """True iff q refines p, i.e. every block of q sits inside one block of p."""
    if not same_space(p.space, q.space):
        raise ValueError("partitions live on different spaces")
    rep = np.empty(q.n_blocks, dtype=int)
    rep[q.block_of[::-1]] = np.arange(q.space.n)[::-1]  # first atom of each q-block
    return bool(np.all(p.block_of == p.block_of[rep[q.block_of]]))


def dyadic_chain(levels: int, space: MeasureSpace) -> list[Partition]:
    """Refinement chain P_0, ..., P_levels where P_k has 2^k contiguous equal-size blocks."""
    if levels < 0:
        raise ValueError("levels must be nonnegative")
    n = space.n
    if n % (1 << levels) != 0:
        raise ValueError(f"number of atoms {n} is not divisible by 2**{levels}")
    chain = []
    for k in range(levels + 1):
        nblocks = 1 << k
        chain.append(Partition(space, np.arange(n) // (n // nblocks), nblocks))
    return chain
