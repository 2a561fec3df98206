"""Shared test helpers."""

from __future__ import annotations

import itertools

import numpy as np

from polaraut.automorphisms import BlockStructure, Permutation
from polaraut.monomials import Monomial, MonomialCode, decreasing_closure


def random_monomial(rng: np.random.Generator, n: int) -> Monomial:
    degree = int(rng.integers(0, n + 1))
    indices = rng.choice(n, size=degree, replace=False)
    return Monomial.from_indices(int(i) for i in indices)


def random_decreasing_code(
    rng: np.random.Generator, n: int, max_generators: int = 3
) -> MonomialCode:
    count = int(rng.integers(1, max_generators + 1))
    gens = [random_monomial(rng, n) for _ in range(count)]
    return decreasing_closure(gens, n)


def kron_generator_matrix(n: int) -> np.ndarray:
    """[[1,0],[1,1]] Kronecker power, the reference encoder matrix."""
    g = np.array([[1]], dtype=np.uint8)
    base = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    for _ in range(n):
        g = np.kron(g, base)
    return g


def block_group(structure: BlockStructure) -> frozenset[Permutation]:
    """All permutations acting independently inside each interval block."""
    per_block = []
    for start, size in zip(structure.starts, structure.sizes):
        per_block.append(
            [list(p) for p in itertools.permutations(range(start, start + size))]
        )
    out = set()
    for combo in itertools.product(*per_block):
        images = [0] * structure.n
        for start, size, chunk in zip(structure.starts, structure.sizes, combo):
            for offset, img in enumerate(chunk):
                images[start + offset] = img
        out.add(Permutation(tuple(images)))
    return frozenset(out)
