"""Dense finite-dimensional quantum kernel.

Pure states are complex amplitude vectors over a row-major product of local
site dimensions; density operators are positive unit-trace matrices over the
same indexing.  Everything here is a pure function over immutable values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .errors import DomainError

DEFAULT_TOL = 1e-9
MAX_TOTAL_DIM = 2**14


@dataclass(frozen=True)
class SiteLayout:
    """Local Hilbert-space dimensions, one per site, in fixed row-major order."""

    dims: tuple

    def __init__(self, dims: Iterable[int], max_total_dim: int = MAX_TOTAL_DIM):
        dims = tuple(int(d) for d in dims)
        if any(d < 1 for d in dims):
            raise DomainError(f"site dimensions must be >= 1: {dims}")
        if math.prod(dims) > max_total_dim:
            raise DomainError(
                f"total dimension {math.prod(dims)} exceeds cap {max_total_dim}"
            )
        object.__setattr__(self, "dims", dims)

    @property
    def sites(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def site_indices(self) -> tuple:
        return tuple(range(self.sites))

    def restrict(self, sites: Iterable[int]) -> "SiteLayout":
        sites = _check_sites(self, sites)
        return SiteLayout(self.dims[s] for s in sites)


def _check_sites(layout: SiteLayout, sites: Iterable[int]) -> tuple:
    """Validate and sort a collection of site indices."""
    sites = tuple(sorted(int(s) for s in sites))
    if len(set(sites)) != len(sites):
        raise DomainError(f"duplicate site indices: {sites}")
    for s in sites:
        if not 0 <= s < layout.sites:
            raise DomainError(f"site index {s} out of range for {layout.sites} sites")
    return sites


def _check_partition(layout, j1, j2) -> tuple:
    a = _check_sites(layout, j1)
    b = _check_sites(layout, j2)
    if not a or not b:
        raise DomainError("both parts of a bipartition must be nonempty")
    if set(a) & set(b) or len(a) + len(b) != layout.sites:
        raise DomainError(f"{a} and {b} do not partition the {layout.sites} sites")
    return a, b


@dataclass(frozen=True)
class PureState:
    """Unit vector over the layout's product space, auto-normalized on construction."""

    layout: SiteLayout
    amplitudes: np.ndarray

    def __init__(self, layout: SiteLayout, amplitudes):
        amp = np.asarray(amplitudes, dtype=np.complex128).reshape(-1).copy()
        if amp.size != layout.total_dim:
            raise DomainError(
                f"amplitude length {amp.size} != total dimension {layout.total_dim}"
            )
        norm = float(np.linalg.norm(amp))
        if norm <= 1e-12:
            raise DomainError("state vector is (numerically) zero")
        amp /= norm
        amp.setflags(write=False)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.dims)

    def overlap(self, other: "PureState") -> complex:
        if self.layout != other.layout:
            raise DomainError("overlap requires identical layouts")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def equals_up_to_phase(self, other: "PureState", tol: float = DEFAULT_TOL) -> bool:
        """Phase-blind equality: |<a|b>| = 1 within tolerance."""
        return abs(self.overlap(other)) > 1.0 - tol

    def density(self) -> "DensityOperator":
        return DensityOperator(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))

    def __eq__(self, other):
        return (
            isinstance(other, PureState)
            and self.layout == other.layout
            and np.array_equal(self.amplitudes, other.amplitudes)
        )

    def __hash__(self):
        return hash((self.layout, self.amplitudes.tobytes()))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive, unit-trace matrix with site-dimension metadata."""

    layout: SiteLayout
    matrix: np.ndarray

    def __init__(self, layout: SiteLayout, matrix, tol: float = DEFAULT_TOL):
        mat = np.asarray(matrix, dtype=np.complex128).copy()
        n = layout.total_dim
        if mat.shape != (n, n):
            raise DomainError(f"density matrix shape {mat.shape} != ({n}, {n})")
        if np.max(np.abs(mat - mat.conj().T)) > tol:
            raise DomainError("density matrix is not Hermitian within tolerance")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > tol:
            raise DomainError(f"density matrix trace {tr} != 1 within tolerance")
        if float(np.linalg.eigvalsh(mat)[0]) < -tol:
            raise DomainError("density matrix has a significantly negative eigenvalue")
        mat.setflags(write=False)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "matrix", mat)

    def __eq__(self, other):
        return (
            isinstance(other, DensityOperator)
            and self.layout == other.layout
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.layout, self.matrix.tobytes()))


@dataclass(frozen=True)
class Observable:
    """Hermitian operator on one site, optionally required to be nondegenerate."""

    site: int
    matrix: np.ndarray
    nondegenerate: bool = False

    def __init__(self, site: int, matrix, nondegenerate: bool = False,
                 tol: float = DEFAULT_TOL):
        mat = np.asarray(matrix, dtype=np.complex128).copy()
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DomainError(f"observable must be a square matrix, got shape {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > tol:
            raise DomainError("observable is not Hermitian within tolerance")
        if nondegenerate and mat.shape[0] > 1:
            eigs = np.linalg.eigvalsh(mat)
            if np.min(np.diff(eigs)) <= tol:
                raise DomainError("observable has (numerically) repeated eigenvalues")
        mat.setflags(write=False)
        object.__setattr__(self, "site", int(site))
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "nondegenerate", bool(nondegenerate))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigensystem(self):
        """Eigenvalues ascending, eigenvectors as matching columns."""
        vals, vecs = np.linalg.eigh(self.matrix)
        return vals, vecs

    def __eq__(self, other):
        return (
            isinstance(other, Observable)
            and self.site == other.site
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.site, self.matrix.tobytes()))


@dataclass(frozen=True)
class MeasurementOutcome:
    """One joint result: eigenvalue tuple, its probability, the post-measurement state."""

    values: tuple
    probability: float
    post_state: PureState


class Contraction(NamedTuple):
    state: PureState
    probability: float


class Verdict(enum.Enum):
    SEPARABLE = "SEPARABLE"
    ENTANGLED = "ENTANGLED"
    PPT_INCONCLUSIVE = "PPT_INCONCLUSIVE"


# ---------------------------------------------------------------------------
# state operations


def tensor_state(a: PureState, b: PureState) -> PureState:
    """Kronecker product; the result's sites are a's sites followed by b's."""
    layout = SiteLayout(a.layout.dims + b.layout.dims)
    return PureState(layout, np.kron(a.amplitudes, b.amplitudes))


def _matricize(psi: PureState, part: tuple) -> np.ndarray:
    """Rows indexed by `part` (sorted), columns by the complementary sites."""
    rest = tuple(s for s in psi.layout.site_indices() if s not in part)
    perm = part + rest
    t = np.transpose(psi.tensor, perm)
    rows = math.prod(psi.layout.dims[s] for s in part)
    return t.reshape(rows, -1)


def schmidt_coefficients(psi: PureState, part) -> np.ndarray:
    """Singular values (descending) of the matricization along `part` vs the rest."""
    part = _check_sites(psi.layout, part)
    if not part or len(part) == psi.layout.sites:
        raise DomainError("Schmidt coefficients need a proper nonempty bipartition")
    return np.linalg.svd(_matricize(psi, part), compute_uv=False)


def is_separable_bipartition(psi: PureState, j1, j2, tol: float = DEFAULT_TOL) -> bool:
    """True when psi factorizes across (j1, j2), i.e. the matricization has rank 1."""
    a, _ = _check_partition(psi.layout, j1, j2)
    coeffs = schmidt_coefficients(psi, a)
    return len(coeffs) < 2 or float(coeffs[1]) <= tol


def _contract_tensor(tensor: np.ndarray, vectors: Mapping[int, np.ndarray]) -> np.ndarray:
    """Apply <v| on each given axis, leaving the remaining axes in order."""
    ndim = tensor.ndim
    operands = [tensor, list(range(ndim))]
    for axis, vec in sorted(vectors.items()):
        operands.extend([np.conj(vec), [axis]])
    out = [i for i in range(ndim) if i not in vectors]
    return np.einsum(*operands, out)


def partial_contract(
    psi: PureState,
    site_vectors: Mapping[int, np.ndarray],
    tol: float = DEFAULT_TOL,
) -> Optional[Contraction]:
    """Project the given sites onto local unit vectors and renormalize the rest.

    Returns the contracted state on the remaining sites together with the
    outcome probability (squared pre-normalization norm), or None when the
    outcome is impossible (residual norm <= tol).
    """
    sites = _check_sites(psi.layout, site_vectors.keys())
    if not sites:
        raise DomainError("partial_contract needs at least one site vector")
    if len(sites) == psi.layout.sites:
        raise DomainError("partial_contract must leave at least one site")
    vectors = {}
    for s in sites:
        v = np.asarray(site_vectors[s], dtype=np.complex128).reshape(-1)
        if v.size != psi.layout.dims[s]:
            raise DomainError(f"vector for site {s} has wrong dimension {v.size}")
        if abs(np.linalg.norm(v) - 1.0) > 1e-6:
            raise DomainError(f"vector for site {s} is not a unit vector")
        vectors[s] = v
    residual = _contract_tensor(psi.tensor, vectors)
    norm = float(np.linalg.norm(residual))
    if norm <= tol:
        return None
    remaining = [s for s in psi.layout.site_indices() if s not in vectors]
    state = PureState(SiteLayout(psi.layout.dims[s] for s in remaining), residual)
    return Contraction(state, norm * norm)


def _embed_tensor(rest: np.ndarray, vectors: Mapping[int, np.ndarray], dims: tuple) -> np.ndarray:
    """Outer-product the local vectors back into their axes around `rest`."""
    ndim = len(dims)
    remaining = [i for i in range(ndim) if i not in vectors]
    operands = [rest, remaining]
    for axis, vec in sorted(vectors.items()):
        operands.extend([vec, [axis]])
    return np.einsum(*operands, list(range(ndim)))


def measure_projective(
    psi: PureState,
    observables: Sequence[Observable],
    tol: float = DEFAULT_TOL,
) -> list:
    """Joint projective measurement of commuting single-site observables.

    Composing the per-site spectral projectors is equivalent to measuring the
    tensor observable with eigenvalue tuples kept distinct, so outcomes are
    indexed by tuples rather than by eigenvalue products.  Outcomes with
    probability <= tol are dropped.
    """
    if not observables:
        raise DomainError("measure_projective needs at least one observable")
    sites = [o.site for o in observables]
    if len(set(sites)) != len(sites):
        raise DomainError(f"observables must act on distinct sites: {sites}")
    _check_sites(psi.layout, sites)
    systems = []
    for obs in observables:
        if obs.dim != psi.layout.dims[obs.site]:
            raise DomainError(
                f"observable on site {obs.site} has dimension {obs.dim}, "
                f"site has {psi.layout.dims[obs.site]}"
            )
        vals, vecs = obs.eigensystem()
        systems.append((obs.site, vals, vecs))

    outcomes = []
    tensor = psi.tensor
    dims = psi.layout.dims

    def recurse(idx, chosen):
        if idx == len(systems):
            vectors = {site: vec for site, (vec, _) in chosen.items()}
            residual = _contract_tensor(tensor, vectors)
            prob = float(np.vdot(residual, residual).real)
            if prob <= tol:
                return
            full = _embed_tensor(residual, vectors, dims)
            values = tuple(val for _, (_, val) in sorted(chosen.items(), key=lambda kv: order[kv[0]]))
            outcomes.append(
                MeasurementOutcome(values, prob, PureState(psi.layout, full))
            )
            return
        site, vals, vecs = systems[idx]
        for j in range(len(vals)):
            chosen[site] = (vecs[:, j], float(vals[j]))
            recurse(idx + 1, chosen)
        del chosen[site]

    order = {obs.site: i for i, obs in enumerate(observables)}
    recurse(0, {})
    return outcomes


# ---------------------------------------------------------------------------
# density operations


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Reduce to the sites in `keep`, tracing everything else out."""
    keep = _check_sites(rho.layout, keep)
    if not keep:
        raise DomainError("partial_trace needs a nonempty set of sites to keep")
    k = rho.layout.sites
    dims = rho.layout.dims
    tens = rho.matrix.reshape(dims + dims)
    ket = list(range(k))
    bra = [k + i if i in keep else i for i in range(k)]
    out = [i for i in keep] + [k + i for i in keep]
    reduced = np.einsum(tens, ket + bra, out)
    side = math.prod(dims[s] for s in keep)
    return DensityOperator(rho.layout.restrict(keep), reduced.reshape(side, side))


def purity(rho: DensityOperator) -> float:
    """tr(rho^2); equals 1 within tolerance exactly for rank-1 operators."""
    return float(np.trace(rho.matrix @ rho.matrix).real)


def partial_transpose(rho: DensityOperator, sites) -> np.ndarray:
    """Matrix of the partial transpose over the given sites."""
    sites = _check_sites(rho.layout, sites)
    k = rho.layout.sites
    dims = rho.layout.dims
    tens = rho.matrix.reshape(dims + dims)
    perm = list(range(2 * k))
    for s in sites:
        perm[s], perm[k + s] = perm[k + s], perm[s]
    n = rho.layout.total_dim
    return np.transpose(tens, perm).reshape(n, n)


def ppt_is_separable(rho: DensityOperator, j1, j2, tol: float = DEFAULT_TOL) -> Verdict:
    """Peres-Horodecki decision across a bipartition.

    A negative partial-transpose eigenvalue certifies entanglement in any
    dimension; a positive partial transpose certifies separability only for
    2x2 and 2x3 local dimensions, so larger systems return PPT_INCONCLUSIVE.
    """
    a, b = _check_partition(rho.layout, j1, j2)
    min_eig = float(np.linalg.eigvalsh(partial_transpose(rho, b))[0])
    if min_eig < -tol:
        return Verdict.ENTANGLED
    da = math.prod(rho.layout.dims[s] for s in a)
    db = math.prod(rho.layout.dims[s] for s in b)
    if (da, db) in {(2, 2), (2, 3), (3, 2)}:
        return Verdict.SEPARABLE
    return Verdict.PPT_INCONCLUSIVE


# ---------------------------------------------------------------------------
# named states and standard observables


def pauli_z() -> np.ndarray:
    return np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


def pauli_x() -> np.ndarray:
    return np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)


def pauli_z_binary() -> np.ndarray:
    """Same eigenbasis as Z but with eigenvalues 0 (for |0>) and 1 (for |1>)."""
    return np.array([[0.0, 0.0], [0.0, 1.0]], dtype=np.complex128)


def pauli_x_binary() -> np.ndarray:
    """Same eigenbasis as X but with eigenvalues 0 (for |+>) and 1 (for |->)."""
    return 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]], dtype=np.complex128)


def basis_state(dims: Sequence[int], indices: Sequence[int]) -> PureState:
    """Computational basis state |indices...> on the given layout."""
    layout = SiteLayout(dims)
    amp = np.zeros(layout.total_dim, dtype=np.complex128)
    flat = 0
    for d, i in zip(layout.dims, indices):
        flat = flat * d + i
    amp[flat] = 1.0
    return PureState(layout, amp)


def _epr() -> PureState:
    return PureState(SiteLayout((2, 2)), [1, 0, 0, 1])


def _ghz() -> PureState:
    return PureState(SiteLayout((2, 2, 2)), [1, 0, 0, 0, 0, 0, 0, 1])


def _o2() -> PureState:
    return PureState(SiteLayout((2, 2, 2)), [2, 0, 0, 2, 2, 0, 0, -1])


def _k_state() -> PureState:
    return PureState(SiteLayout((2, 2, 2)), [0, -1, -1, 0, -1, 0, 0, 1])


BUILTIN_STATES = {
    "EPR": _epr,
    "GHZ": _ghz,
    "O2": _o2,
    "K": _k_state,
}


def builtin_state(name: str) -> PureState:
    """Named states used throughout the test corpus and the CLI."""
    try:
        return BUILTIN_STATES[name]()
    except KeyError:
        raise DomainError(
            f"unknown builtin state {name!r}; known: {sorted(BUILTIN_STATES)}"
        ) from None
