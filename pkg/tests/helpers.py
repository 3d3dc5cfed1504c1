"""Shared test fixtures and small independent oracles.

The oracles here deliberately re-derive expected values with direct, naive
algorithms (repeated-scan closures, explicit index loops) so that the library
code under test is never used to produce its own expected output.
"""

import itertools

import numpy as np

from conexa.connective import ConnectiveStructure, GroundSet


def ground(n: int) -> GroundSet:
    return GroundSet(range(1, n + 1))


def structure(n: int, subsets) -> ConnectiveStructure:
    g = ground(n)
    return ConnectiveStructure(g, [g.mask_of(s) for s in subsets])


def borromean(n: int) -> ConnectiveStructure:
    """Only the full set connected, on labels 1..n."""
    return structure(n, [tuple(range(1, n + 1))])


def power_set(n: int) -> ConnectiveStructure:
    g = ground(n)
    return ConnectiveStructure(g, range(g.full_mask + 1))


def discrete(n: int) -> ConnectiveStructure:
    return structure(n, [])


def oracle_close(ground_size: int, masks) -> frozenset:
    """Reference closure: rescan all pairs until stable."""
    family = {0} | {1 << i for i in range(ground_size)} | set(masks)
    while True:
        additions = {
            a | b for a in family for b in family if a & b and (a | b) not in family
        }
        if not additions:
            return frozenset(family)
        family |= additions


def oracle_irreducibles(s: ConnectiveStructure) -> set:
    """Remove one member at a time and regenerate from the rest."""
    members = [m for m in s.connected if bin(m).count("1") >= 2]
    out = set()
    for k in members:
        rest = [m for m in members if m != k]
        if k not in oracle_close(s.ground.size, rest):
            out.add(k)
    return out


def all_integral_structures(n: int):
    """Every integral structure on labels 1..n, by exhaustive closure check."""
    g = ground(n)
    candidates = [m for m in range(1, g.full_mask + 1) if bin(m).count("1") >= 2]
    out = []
    for selector in itertools.product((0, 1), repeat=len(candidates)):
        family = {m for m, keep in zip(candidates, selector) if keep}
        base = family | {0} | {1 << i for i in range(n)}
        if oracle_close(n, family) == frozenset(base):
            out.append(ConnectiveStructure(g, family))
    return out


def oracle_partial_trace(matrix: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace by explicit index loops."""
    k = len(dims)
    keep = sorted(keep)
    traced = [i for i in range(k) if i not in keep]
    side = int(np.prod([dims[i] for i in keep])) if keep else 1
    out = np.zeros((side, side), dtype=complex)

    def flat(idx):
        v = 0
        for d, i in zip(dims, idx):
            v = v * d + i
        return v

    kept_ranges = [range(dims[i]) for i in keep]
    traced_ranges = [range(dims[i]) for i in traced]
    for row_kept in itertools.product(*kept_ranges):
        for col_kept in itertools.product(*kept_ranges):
            total = 0.0 + 0.0j
            for tr in itertools.product(*traced_ranges):
                row = [0] * k
                col = [0] * k
                for pos, i in zip(keep, row_kept):
                    row[pos] = i
                for pos, i in zip(keep, col_kept):
                    col[pos] = i
                for pos, i in zip(traced, tr):
                    row[pos] = i
                    col[pos] = i
                total += matrix[flat(row), flat(col)]
            r = 0
            for d, i in zip([dims[i] for i in keep], row_kept):
                r = r * d + i
            c = 0
            for d, i in zip([dims[i] for i in keep], col_kept):
                c = c * d + i
            out[r, c] = total
    return out


def oracle_partial_transpose(matrix: np.ndarray, dims, sites) -> np.ndarray:
    """Partial transpose by explicit index loops."""
    k = len(dims)
    n = matrix.shape[0]
    out = np.zeros_like(matrix)

    def unflat(v):
        idx = []
        for d in reversed(dims):
            idx.append(v % d)
            v //= d
        return list(reversed(idx))

    def flat(idx):
        v = 0
        for d, i in zip(dims, idx):
            v = v * d + i
        return v

    for r in range(n):
        for c in range(n):
            ri, ci = unflat(r), unflat(c)
            for s in sites:
                ri[s], ci[s] = ci[s], ri[s]
            out[flat(ri), flat(ci)] = matrix[r, c]
    return out


def random_state_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def oracle_completely_correlated(matrix: np.ndarray, dims, sites) -> bool:
    """Reduced-product comparison across every bipartition, all by index loops."""
    sites = sorted(sites)
    reduced = oracle_partial_trace(matrix, dims, sites)
    sub_dims = [dims[s] for s in sites]
    positions = range(len(sites))
    for r in range(1, len(sites)):
        for a in itertools.combinations(positions, r):
            if 0 not in a:
                continue
            b = tuple(p for p in positions if p not in a)
            rho_a = oracle_partial_trace(reduced, sub_dims, list(a))
            rho_b = oracle_partial_trace(reduced, sub_dims, list(b))
            k = len(sites)
            order = list(a) + list(b)
            raw = np.kron(rho_a, rho_b)
            tens = raw.reshape([sub_dims[p] for p in order] * 2)
            inverse = [order.index(i) for i in range(k)]
            perm = inverse + [k + p for p in inverse]
            side = int(np.prod(sub_dims))
            product = np.transpose(tens, perm).reshape(side, side)
            if np.max(np.abs(product - reduced)) <= 1e-9:
                return False
    return True
