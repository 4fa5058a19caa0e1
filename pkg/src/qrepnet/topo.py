"""Topological cluster-state error correction on a periodic d^3 lattice.

Geometry lives in doubled coordinates modulo 2d: primal cells sit at
all-odd positions, face qubits at positions with exactly one even
coordinate (the face normal), edge qubits at positions with exactly one
odd coordinate. Each face qubit is entangled by CZ with its four
boundary edge qubits, giving a 4-regular bipartite interaction graph of
12 d^3 gates. The gates run in a fixed 4-step schedule: a CZ from face
center c to edge c + s*e_b is colored by whether b is the cyclic
successor or predecessor of the face normal and by the sign s, which
touches every qubit exactly once per step (each face and each edge has
one partner of each color).

Errors are tracked in the Heisenberg picture. A depolarizing Pauli
injected after a CZ is conjugated through the remaining schedule; since
CZ maps X on one qubit to X tensor Z on the pair and leaves Z alone, the
final X-measurement of a qubit flips iff the accumulated frame has a Z
on it (prep and readout flips fold in the same way). Cell parities over
the six face-qubit outcomes then mark defects; an abandoned CZ (heralded
loss) skips the gate and marks both endpoint qubits unreadable, which
merges the face's two cells into a supercell.

Decoding is exact minimum-weight perfect matching over defect
supercells, weighted by periodic taxicab distance between supercell
centroids (loss regions do not discount path weights; documented
simplification). Logical failure per axis is the parity of error plus
correction across a fixed transverse face sheet, deformed cell-by-cell
around lost faces so the verdict never reads an unmeasured qubit; a loss
cluster that makes the deformation inconsistent (it wraps the torus)
counts as failure outright.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import rng as rngmod
from .matching import min_weight_perfect_matching

_WEIGHT_SCALE = 1024  # fixed-point quantization of centroid distances

_AXES = (0, 1, 2)


def _next_axis(a: int) -> int:
    return (a + 1) % 3


def _prev_axis(a: int) -> int:
    return (a + 2) % 3


@dataclass(frozen=True)
class ClusterLattice:
    """Immutable index tables for one lattice size.

    Qubits 0..3d^3-1 are faces, 3d^3..6d^3-1 are edges. Cells are
    indexed 0..d^3-1. Coordinates are doubled and periodic mod 2d.
    """

    d: int
    face_coords: np.ndarray  # (3d^3, 3) doubled
    edge_coords: np.ndarray  # (3d^3, 3) doubled
    face_axis: np.ndarray  # (3d^3,) normal axis of each face
    face_cells: np.ndarray  # (3d^3, 2) incident cell ids
    cell_faces: np.ndarray  # (d^3, 6) face ids around each cell
    cell_coords: np.ndarray  # (d^3, 3) doubled, all odd
    cz_face: np.ndarray  # (12d^3,) face qubit of each CZ
    cz_edge: np.ndarray  # (12d^3,) edge qubit of each CZ
    cz_color: np.ndarray  # (12d^3,) schedule step 0..3
    color_slices: tuple[slice, ...]  # CZ ranges per color, in order
    membranes: tuple[np.ndarray, ...]  # per axis: face ids of the seam sheet

    @property
    def n_faces(self) -> int:
        return len(self.face_coords)

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_faces

    @property
    def n_cells(self) -> int:
        return len(self.cell_coords)

    @property
    def n_cz(self) -> int:
        return len(self.cz_face)


def build_lattice(d: int) -> ClusterLattice:
    """Construct index maps and the CZ schedule for a d x d x d lattice."""
    if d < 2:
        raise ValueError("d must be >= 2")
    span = 2 * d
    odd = [2 * k + 1 for k in range(d)]
    even = [2 * k for k in range(d)]

    def cell_id(coord: tuple[int, int, int]) -> int:
        cx, cy, cz = ((c - 1) // 2 for c in coord)
        return (cx * d + cy) * d + cz

    face_coords = []
    face_axis = []
    face_lookup: dict[tuple[int, int, int], int] = {}
    for a in _AXES:
        axes = [b for b in _AXES if b != a]
        for va in even:
            for v1 in odd:
                for v2 in odd:
                    coord = [0, 0, 0]
                    coord[a] = va
                    coord[axes[0]] = v1
                    coord[axes[1]] = v2
                    face_lookup[tuple(coord)] = len(face_coords)
                    face_coords.append(tuple(coord))
                    face_axis.append(a)

    edge_coords = []
    edge_lookup: dict[tuple[int, int, int], int] = {}
    for a in _AXES:  # a is the single odd axis
        axes = [b for b in _AXES if b != a]
        for va in odd:
            for v1 in even:
                for v2 in even:
                    coord = [0, 0, 0]
                    coord[a] = va
                    coord[axes[0]] = v1
                    coord[axes[1]] = v2
                    edge_lookup[tuple(coord)] = len(edge_coords)
                    edge_coords.append(tuple(coord))

    n_faces = len(face_coords)
    face_cells = np.empty((n_faces, 2), dtype=np.int32)
    for f, coord in enumerate(face_coords):
        a = face_axis[f]
        for side, sign in enumerate((1, -1)):
            nb = list(coord)
            nb[a] = (nb[a] + sign) % span
            face_cells[f, side] = cell_id(tuple(nb))

    # product order is x-major, z-fastest, matching cell_id directly
    cell_coords = np.array(
        list(itertools.product(odd, repeat=3)), dtype=np.int32
    )

    cell_faces = np.empty((d**3, 6), dtype=np.int32)
    for c, coord in enumerate(cell_coords):
        k = 0
        for a in _AXES:
            for sign in (-1, 1):
                nb = list(coord)
                nb[a] = (nb[a] + sign) % span
                cell_faces[c, k] = face_lookup[tuple(nb)]
                k += 1

    cz_face, cz_edge, cz_color = [], [], []
    for f, coord in enumerate(face_coords):
        a = face_axis[f]
        for b in _AXES:
            if b == a:
                continue
            for sign in (-1, 1):
                nb = list(coord)
                nb[b] = (nb[b] + sign) % span
                e = edge_lookup[tuple(nb)]
                color = 2 * int(b == _prev_axis(a)) + int(sign > 0)
                cz_face.append(f)
                cz_edge.append(e)
                cz_color.append(color)
    cz_face = np.array(cz_face, dtype=np.int32)
    cz_edge = np.array(cz_edge, dtype=np.int32) + n_faces
    cz_color = np.array(cz_color, dtype=np.int8)
    order = np.lexsort((cz_face, cz_color))
    cz_face, cz_edge, cz_color = cz_face[order], cz_edge[order], cz_color[order]
    bounds = np.searchsorted(cz_color, np.arange(5))
    color_slices = tuple(
        slice(int(bounds[c]), int(bounds[c + 1])) for c in range(4)
    )

    face_coords = np.array(face_coords, dtype=np.int32)
    face_axis = np.array(face_axis, dtype=np.int8)
    membranes = tuple(
        np.flatnonzero((face_axis == a) & (face_coords[:, a] == 0)).astype(
            np.int32
        )
        for a in _AXES
    )
    return ClusterLattice(
        d=d,
        face_coords=face_coords,
        edge_coords=np.array(edge_coords, dtype=np.int32),
        face_axis=face_axis,
        face_cells=face_cells,
        cell_faces=cell_faces,
        cell_coords=cell_coords,
        cz_face=cz_face,
        cz_edge=cz_edge,
        cz_color=cz_color,
        color_slices=color_slices,
        membranes=membranes,
    )


@dataclass(frozen=True)
class TopoErrorModel:
    """Noise rates for the cluster-state cycle."""

    p_cz: float
    p_prep: float = 0.001
    p_meas: float = 0.001
    l_prime: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p_cz", "p_prep", "p_meas", "l_prime"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def sample_errors(
    lattice: ClusterLattice,
    model: TopoErrorModel,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw one noise realization.

    Returns (flips, lost): per-qubit effective X-measurement flips and
    the heralded-loss mask. Each CZ is abandoned with probability
    l_prime (both endpoints lost, gate skipped); surviving CZs conjugate
    the accumulated frame and then suffer a uniformly random two-qubit
    Pauli with probability p_cz; prep and readout flips fold in at the
    end. Flip entries of lost qubits are meaningless (never read).
    """
    x = np.zeros(lattice.n_qubits, dtype=np.uint8)
    z = np.zeros(lattice.n_qubits, dtype=np.uint8)
    lost = np.zeros(lattice.n_qubits, dtype=bool)

    if model.l_prime > 0.0:
        abandoned = rng.random(lattice.n_cz) < model.l_prime
        lost[lattice.cz_face[abandoned]] = True
        lost[lattice.cz_edge[abandoned]] = True
    else:
        abandoned = None

    for color in range(4):
        sl = lattice.color_slices[color]
        f = lattice.cz_face[sl]
        e = lattice.cz_edge[sl]
        if abandoned is not None:
            keep = ~abandoned[sl]
            f, e = f[keep], e[keep]
        # CZ frame rule: Z picks up the partner's X; X passes through
        zf = x[e]
        ze = x[f]
        z[f] ^= zf
        z[e] ^= ze
        if model.p_cz > 0.0:
            hit = rng.random(len(f)) < model.p_cz
            r = rng.integers(1, 16, size=len(f), dtype=np.uint8)
            r = np.where(hit, r, np.uint8(0))
            x[f] ^= r & 1
            z[f] ^= (r >> 1) & 1
            x[e] ^= (r >> 2) & 1
            z[e] ^= (r >> 3) & 1

    flips = z
    if model.p_prep > 0.0:
        flips = flips ^ (rng.random(lattice.n_qubits) < model.p_prep)
    if model.p_meas > 0.0:
        flips = flips ^ (rng.random(lattice.n_qubits) < model.p_meas)
    return flips.astype(np.uint8), lost


def inject_cz_error(
    lattice: ClusterLattice, cz_index: int, pauli_bits: int
) -> np.ndarray:
    """Effective flips from one deterministic two-qubit Pauli injection.

    pauli_bits packs (x_face, z_face, x_edge, z_edge) in bits 0..3; the
    error lands right after the chosen CZ and propagates through the
    remaining schedule noiselessly. Exhaustive weight-1 sweeps use this.
    """
    if not 0 <= cz_index < lattice.n_cz:
        raise ValueError("cz_index out of range")
    if not 1 <= pauli_bits <= 15:
        raise ValueError("pauli_bits must encode a nontrivial Pauli")
    x = np.zeros(lattice.n_qubits, dtype=np.uint8)
    z = np.zeros(lattice.n_qubits, dtype=np.uint8)
    f0 = lattice.cz_face[cz_index]
    e0 = lattice.cz_edge[cz_index]
    x[f0] = pauli_bits & 1
    z[f0] = (pauli_bits >> 1) & 1
    x[e0] = (pauli_bits >> 2) & 1
    z[e0] = (pauli_bits >> 3) & 1
    start_color = int(lattice.cz_color[cz_index])
    for color in range(4):
        sl = lattice.color_slices[color]
        f = lattice.cz_face[sl]
        e = lattice.cz_edge[sl]
        if color == start_color:
            # only CZs after the injection point see the error, and
            # within one color all gates are disjoint, so the sole gate
            # whose conjugation matters is already behind the injection
            continue
        if color < start_color:
            continue
        z[f] ^= x[e]
        z[e] ^= x[f]
    return z


@dataclass(frozen=True)
class SyndromeSet:
    """Defect supercells after loss-driven cell merging."""

    defects: tuple[int, ...]  # supercell representatives with odd parity
    supercell_of: np.ndarray  # (d^3,) representative cell per cell
    merge_edges: tuple[tuple[int, int, int], ...]  # (cell, cell, face)

    def supercell_members(self, rep: int) -> np.ndarray:
        return np.flatnonzero(self.supercell_of == rep)


def extract_syndrome(
    lattice: ClusterLattice, flips: np.ndarray, lost: np.ndarray
) -> SyndromeSet:
    """Merge cells across lost faces and return odd-parity supercells."""
    n_cells = lattice.n_cells
    parent = np.arange(n_cells, dtype=np.int64)

    def find(c: int) -> int:
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = int(parent[c])
        return c

    merge_edges = []
    for f in np.flatnonzero(lost[: lattice.n_faces]):
        u, v = (int(c) for c in lattice.face_cells[f])
        merge_edges.append((u, v, int(f)))
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    roots = np.array([find(c) for c in range(n_cells)], dtype=np.int64)

    parity = np.zeros(n_cells, dtype=np.uint8)
    face_flips = np.flatnonzero(
        flips[: lattice.n_faces].astype(bool) & ~lost[: lattice.n_faces]
    )
    r1 = roots[lattice.face_cells[face_flips, 0]]
    r2 = roots[lattice.face_cells[face_flips, 1]]
    distinct = r1 != r2
    np.bitwise_xor.at(parity, r1[distinct], np.uint8(1))
    np.bitwise_xor.at(parity, r2[distinct], np.uint8(1))

    defects = tuple(int(c) for c in np.flatnonzero(parity))
    return SyndromeSet(defects, roots, tuple(merge_edges))


def _wrap_delta(a: np.ndarray | float, b: np.ndarray | float, span: int):
    """Shortest signed displacement a -> b on a ring of given span."""
    return (np.asarray(b, dtype=float) - a + span / 2.0) % span - span / 2.0


def _supercell_centroids(
    lattice: ClusterLattice, syndrome: SyndromeSet
) -> dict[int, np.ndarray]:
    span = 2 * lattice.d
    cent: dict[int, np.ndarray] = {}
    for rep in syndrome.defects:
        members = syndrome.supercell_members(rep)
        anchor = lattice.cell_coords[rep].astype(float)
        rel = _wrap_delta(anchor, lattice.cell_coords[members], span)
        cent[rep] = (anchor + rel.mean(axis=0)) % span
    return cent


def _route_faces(lattice: ClusterLattice, c_from: int, c_to: int) -> list[int]:
    """Faces of a taxicab chain between two cells (shorter wrap per axis)."""
    span = 2 * lattice.d
    face_lookup = _face_lookup_table(lattice)
    cur = lattice.cell_coords[c_from].astype(int).tolist()
    target = lattice.cell_coords[c_to]
    faces = []
    for a in _AXES:
        delta = _wrap_delta(float(cur[a]), float(target[a]), span)
        steps = int(round(abs(delta))) // 2
        sign = 1 if delta >= 0 else -1
        for _ in range(steps):
            mid = list(cur)
            mid[a] = (cur[a] + sign) % span
            faces.append(int(face_lookup[tuple(mid)]))
            cur[a] = (cur[a] + 2 * sign) % span
    return faces


_FACE_LOOKUP_CACHE: dict[int, dict[tuple[int, int, int], int]] = {}


def _face_lookup_table(
    lattice: ClusterLattice,
) -> dict[tuple[int, int, int], int]:
    table = _FACE_LOOKUP_CACHE.get(lattice.d)
    if table is None:
        table = {
            tuple(int(v) for v in coord): f
            for f, coord in enumerate(lattice.face_coords)
        }
        _FACE_LOOKUP_CACHE[lattice.d] = table
    return table


@dataclass(frozen=True)
class DecodeResult:
    """Matched defect pairs, their correction chain, and failure flags."""

    pairs: tuple[tuple[int, int], ...]
    correction: frozenset[int]  # face ids with odd correction multiplicity
    failures: tuple[bool, bool, bool] | None = None

    @property
    def failed(self) -> bool:
        return self.failures is not None and any(self.failures)


class DeformationError(RuntimeError):
    """A loss cluster wraps the lattice; the seam sheet cannot avoid it."""


def _deformed_membrane(
    lattice: ClusterLattice,
    axis: int,
    syndrome: SyndromeSet,
    lost: np.ndarray,
) -> set[int]:
    """Seam face sheet for one axis, pushed off every lost face.

    Adding a cell's stabilizer (its six faces, XOR) moves the sheet
    across that cell without changing its homology class. Which cells to
    add is a parity 2-coloring over each loss cluster's merge graph:
    colors must differ exactly across lost faces the sheet currently
    contains. An inconsistent cluster wraps the torus and no deformation
    exists.
    """
    membrane = set(int(f) for f in lattice.membranes[axis])
    lost_faces = np.flatnonzero(lost[: lattice.n_faces])
    if not any(int(f) in membrane for f in lost_faces):
        return membrane

    by_cluster: dict[int, list[tuple[int, int, int]]] = {}
    for u, v, f in syndrome.merge_edges:
        rep = int(syndrome.supercell_of[u])
        by_cluster.setdefault(rep, []).append((u, v, f))

    bubble: set[int] = set()
    for rep, cluster_edges in by_cluster.items():
        needs = any(f in membrane for _, _, f in cluster_edges)
        if not needs:
            continue
        adj: dict[int, list[tuple[int, int]]] = {}
        for u, v, f in cluster_edges:
            adj.setdefault(u, []).append((v, f))
            adj.setdefault(v, []).append((u, f))
        color: dict[int, int] = {rep: 0}
        stack = [rep]
        while stack:
            u = stack.pop()
            for v, f in adj.get(u, ()):
                want = color[u] ^ int(f in membrane)
                if v not in color:
                    color[v] = want
                    stack.append(v)
                elif color[v] != want:
                    raise DeformationError(
                        f"loss cluster at cell {rep} wraps axis {axis}"
                    )
        bubble.update(c for c, bit in color.items() if bit)

    for c in bubble:
        membrane.symmetric_difference_update(
            int(f) for f in lattice.cell_faces[c]
        )
    leftover = [int(f) for f in lost_faces if int(f) in membrane]
    if leftover:
        raise AssertionError(f"deformation left lost faces {leftover[:4]}")
    return membrane


def decode_mwpm(
    lattice: ClusterLattice,
    syndrome: SyndromeSet,
    flips: np.ndarray | None = None,
    lost: np.ndarray | None = None,
) -> DecodeResult:
    """Match defect supercells and, given the noise, judge the outcome.

    Matching is exact minimum-weight over the complete defect graph with
    periodic taxicab centroid distances. When flips (and, under loss,
    the lost mask) are provided, failure flags are computed per axis as
    the parity of error plus correction across a deformed transverse
    sheet; without them the flags are None.
    """
    defects = syndrome.defects
    if len(defects) % 2:
        raise ValueError("defect count must be even")
    span = 2 * lattice.d
    pairs: tuple[tuple[int, int], ...] = ()
    correction: set[int] = set()
    if defects:
        cent = _supercell_centroids(lattice, syndrome)
        n = len(defects)
        weight = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(i + 1, n):
                delta = _wrap_delta(cent[defects[i]], cent[defects[j]], span)
                dist = float(np.abs(delta).sum())
                weight[i, j] = weight[j, i] = int(round(_WEIGHT_SCALE * dist))
        matched = min_weight_perfect_matching(weight)
        pairs = tuple(
            (defects[i], defects[j]) for i, j in matched
        )
        for u, v in pairs:
            for f in _route_faces(lattice, u, v):
                correction.symmetric_difference_update((f,))

    failures = None
    if flips is not None:
        if lost is None:
            lost = np.zeros(lattice.n_qubits, dtype=bool)
        flags = []
        for axis in _AXES:
            try:
                membrane = _deformed_membrane(lattice, axis, syndrome, lost)
            except DeformationError:
                flags.append(True)
                continue
            parity = 0
            for f in membrane:
                parity ^= int(flips[f]) ^ int(f in correction)
            flags.append(bool(parity))
        failures = tuple(flags)
    return DecodeResult(pairs, frozenset(correction), failures)


def wilson_interval(
    successes: int, trials: int, z: float = 1.96
) -> tuple[float, float]:
    """Wilson score interval for a binomial rate."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z**2 / trials
    center = (p + z**2 / (2 * trials)) / denom
    half = (
        z
        * math.sqrt(p * (1.0 - p) / trials + z**2 / (4.0 * trials**2))
        / denom
    )
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class RateEstimate:
    """One Monte Carlo point of the logical failure curve."""

    d: int
    p_cz: float
    p_prep: float
    p_meas: float
    l_prime: float
    trials: int
    failures: int
    rate: float
    ci_low: float
    ci_high: float
    seed: int

    @property
    def stderr(self) -> float:
        return math.sqrt(max(self.rate * (1.0 - self.rate), 0.0) / self.trials)


def estimate_logical_rate(
    d: int,
    model: TopoErrorModel,
    trials: int,
    seed: int,
    stream_base: int = 0,
    lattice: ClusterLattice | None = None,
) -> RateEstimate:
    """Monte Carlo logical failure rate with a Wilson 95% interval."""
    if trials < 1_000:
        raise ValueError("need at least 1000 trials")
    if trials > rngmod.BATCH_SIZE * 0 + (1 << 20):
        raise ValueError("trial count exceeds the point's RNG stream block")
    if lattice is None:
        lattice = build_lattice(d)
    elif lattice.d != d:
        raise ValueError("lattice size does not match d")
    failures = 0
    for t in range(trials):
        rng = rngmod.stream_generator(seed, stream_base + t)
        flips, lost = sample_errors(lattice, model, rng)
        syndrome = extract_syndrome(lattice, flips, lost)
        result = decode_mwpm(lattice, syndrome, flips, lost)
        failures += int(result.failed)
    rate = failures / trials
    ci_low, ci_high = wilson_interval(failures, trials)
    return RateEstimate(
        d=d,
        p_cz=model.p_cz,
        p_prep=model.p_prep,
        p_meas=model.p_meas,
        l_prime=model.l_prime,
        trials=trials,
        failures=failures,
        rate=rate,
        ci_low=ci_low,
        ci_high=ci_high,
        seed=seed,
    )


class ThresholdRangeError(ValueError):
    """The fitted crossing lies outside the scanned grid."""


@dataclass(frozen=True)
class ThresholdFit:
    """Universal-scaling fit of rate curves near their crossing."""

    threshold: float
    ci_low: float
    ci_high: float
    nu: float
    coefficients: tuple[float, float, float]
    points: tuple[RateEstimate, ...] = field(default=())


def fit_threshold(
    d_values: np.ndarray,
    p_values: np.ndarray,
    rates: np.ndarray,
    sigmas: np.ndarray,
) -> ThresholdFit:
    """Fit rate(p, d) = a0 + a1 u + a2 u^2 with u = (p - p_th) d^(1/nu).

    The crossing p_th is the parameter of interest; its 95% interval
    comes from the fit covariance. Raises ThresholdRangeError when no
    crossing lies inside the scanned p range or the fit degenerates.
    """
    d_values = np.asarray(d_values, dtype=float)
    p_values = np.asarray(p_values, dtype=float)
    rates = np.asarray(rates, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    if not (len(d_values) == len(p_values) == len(rates) == len(sigmas)):
        raise ValueError("input arrays must have equal length")
    if len(np.unique(d_values)) < 2:
        raise ValueError("need at least two distinct d values")

    def model(xdata, a0, a1, a2, p_th, nu):
        p, d = xdata
        u = (p - p_th) * d ** (1.0 / nu)
        return a0 + a1 * u + a2 * u**2

    p_lo, p_hi = float(p_values.min()), float(p_values.max())
    guess = (float(rates.mean()), 1.0, 0.0, 0.5 * (p_lo + p_hi), 1.0)
    try:
        popt, pcov = scipy.optimize.curve_fit(
            model,
            (p_values, d_values),
            rates,
            p0=guess,
            sigma=np.maximum(sigmas, 1e-6),
            absolute_sigma=True,
            maxfev=20_000,
        )
    except RuntimeError as exc:
        raise ThresholdRangeError(f"scaling fit did not converge: {exc}")
    a0, a1, a2, p_th, nu = (float(v) for v in popt)
    var = float(pcov[3, 3])
    if not math.isfinite(var) or var < 0.0:
        raise ThresholdRangeError("crossing is unconstrained by the data")
    if not p_lo <= p_th <= p_hi:
        raise ThresholdRangeError(
            f"fitted crossing {p_th:.5f} outside grid [{p_lo}, {p_hi}]"
        )
    if not 0.05 <= abs(nu) <= 20.0:
        raise ThresholdRangeError(f"degenerate scaling exponent {nu:.3f}")
    half = 1.96 * math.sqrt(var)
    return ThresholdFit(
        threshold=p_th,
        ci_low=p_th - half,
        ci_high=p_th + half,
        nu=nu,
        coefficients=(a0, a1, a2),
    )


def estimate_threshold(
    model_family,
    d_list: list[int],
    p_grid: list[float],
    trials: int,
    seed: int,
) -> ThresholdFit:
    """Scan rate curves for each d and fit their crossing.

    model_family maps a CZ error rate to the full TopoErrorModel, fixing
    the other noise rates (and the loss fraction) across the scan. Each
    (d, p) point draws from its own RNG stream block, so the scan is
    reproducible point by point.
    """
    if len(d_list) < 2:
        raise ValueError("need at least two lattice sizes")
    points = []
    lattices = {d: build_lattice(d) for d in d_list}
    for k, (d, p) in enumerate(itertools.product(d_list, p_grid)):
        points.append(
            estimate_logical_rate(
                d,
                model_family(p),
                trials,
                seed,
                stream_base=k << 20,
                lattice=lattices[d],
            )
        )
    fit = fit_threshold(
        np.array([pt.d for pt in points], dtype=float),
        np.array([pt.p_cz for pt in points], dtype=float),
        np.array([pt.rate for pt in points], dtype=float),
        np.array([max(pt.stderr, 0.5 / pt.trials) for pt in points]),
    )
    return ThresholdFit(
        threshold=fit.threshold,
        ci_low=fit.ci_low,
        ci_high=fit.ci_high,
        nu=fit.nu,
        coefficients=fit.coefficients,
        points=tuple(points),
    )
