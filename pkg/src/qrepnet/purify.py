"""Stabilizer-code entanglement purification.

Two nodes share n noisy Bell pairs. Both run the same decoding circuit on
their halves, measure the syndrome qubits in Z, and exchange the results;
the XOR of the two outcome strings is the code syndrome of the effective
one-sided Pauli error on the block. In error-detection mode the pair
built on qubit 0 is kept only when every syndrome bit agrees; in
error-correction mode a minimum-weight coset correction is looked up per
syndrome and its logical action is folded into the output instead.

Everything is simulated in the Pauli frame: a pair's joint error class is
the XOR of the two sides' error masks, and conjugation through the real
(h/cnot/cz) decoding circuit is a linear map on those masks, so the whole
protocol reduces to exact bit arithmetic. Gate noise enters as a
two-qubit depolarizing channel after every two-qubit gate, independently
on each side; measurement flips enter per measured qubit per side. Signs
that the decoder may attach to individual syndrome bits cancel between
the two nodes and never appear.

Monte Carlo trials are processed in fixed-size batches, one RNG stream
per batch (see qrepnet.rng), and aggregated as integer counts, so results
are bit-for-bit reproducible regardless of how batches are scheduled.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .pauli import (
    CliffordCircuit,
    PauliOperator,
    StabilizerCode,
    coset_correction_table,
    synthesize_decoder,
)

# Bell class index convention: 0 = I (the reference pair), 1 = X, 2 = Y,
# 3 = Z in terms of the one-sided Pauli acting on a perfect pair.
_IDX_FROM_BITS = np.array([0, 3, 1, 2], dtype=np.uint8)  # key: 2*x_bit + z_bit

MAX_EXACT_QUBITS = 6
MIN_MC_TRIALS = 10_000
_STREAMS_PER_ROUND = 1 << 16
_STREAMS_PER_POINT = 1 << 20


@dataclass(frozen=True)
class BellDiagonalState:
    """A Bell-diagonal two-qubit state; p_i is the fidelity reference weight."""

    p_i: float
    p_x: float
    p_y: float
    p_z: float

    def __post_init__(self) -> None:
        probs = self.as_array()
        if (probs < -1e-12).any():
            raise ValueError("negative Bell component")
        if abs(float(probs.sum()) - 1.0) > 1e-9:
            raise ValueError("Bell components must sum to 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_i, self.p_x, self.p_y, self.p_z], dtype=float)

    @property
    def fidelity(self) -> float:
        return self.p_i

    @classmethod
    def from_array(cls, probs: np.ndarray) -> "BellDiagonalState":
        total = float(np.sum(probs))
        if total <= 0:
            raise ValueError("cannot normalize an empty distribution")
        p = np.asarray(probs, dtype=float) / total
        return cls(float(p[0]), float(p[1]), float(p[2]), float(p[3]))


def werner_from_fidelity(fidelity: float) -> BellDiagonalState:
    """Isotropic pair of the given fidelity: (F, (1-F)/3, (1-F)/3, (1-F)/3)."""
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError("fidelity must lie in [0, 1]")
    rest = (1.0 - fidelity) / 3.0
    return BellDiagonalState(fidelity, rest, rest, rest)


@dataclass(frozen=True)
class NoiseModel:
    """Local-operation noise: two-qubit gate depolarizing plus flip rates.

    p_prep and p_meas default to p_local when not given. Preparation
    flips are carried for interface parity with the lattice sampler; the
    purification circuits contain no preparation locations, so p_prep is
    inert here.
    """

    p_local: float = 0.0
    p_prep: float | None = None
    p_meas: float | None = None

    def __post_init__(self) -> None:
        if self.p_prep is None:
            object.__setattr__(self, "p_prep", self.p_local)
        if self.p_meas is None:
            object.__setattr__(self, "p_meas", self.p_local)
        for name in ("p_local", "p_prep", "p_meas"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    @property
    def is_noiseless(self) -> bool:
        return self.p_local == 0.0 and self.p_prep == 0.0 and self.p_meas == 0.0


NOISELESS = NoiseModel(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class PurificationProtocol:
    """Code, syndrome interpretation mode, and number of chained rounds."""

    code: StabilizerCode
    mode: str = "ed"
    rounds: int = 1

    def __post_init__(self) -> None:
        if self.mode not in ("ed", "ec"):
            raise ValueError("mode must be 'ed' or 'ec'")
        # 16 rounds exhausts the per-point RNG stream block in sweeps
        if not 1 <= self.rounds <= 16:
            raise ValueError("rounds must lie in 1..16")
        # correction tables exist for any code, but only d > 2 gives the
        # ec mode a weight-1 correction guarantee; both are permitted


@dataclass(frozen=True)
class PurificationResult:
    """Output state and acceptance of one purification (round)."""

    output: BellDiagonalState | None
    acceptance: float
    rejected_prob: float
    fidelity_stderr: float | None = None
    acceptance_stderr: float | None = None
    trials: int | None = None
    accepted_trials: int | None = None
    cumulative_acceptance: float | None = None

    @property
    def fidelity(self) -> float:
        """Output fidelity; NaN when no trial was accepted."""
        if self.output is None:
            return math.nan
        return self.output.fidelity

    @property
    def fidelity_defined(self) -> bool:
        return self.output is not None


@functools.lru_cache(maxsize=None)
def _decoder(code: StabilizerCode) -> CliffordCircuit:
    return synthesize_decoder(code)


def _pauli_from_classes(n: int, classes: tuple[int, ...]) -> PauliOperator:
    x = z = 0
    for q, c in enumerate(classes):
        if c in (1, 2):
            x |= 1 << q
        if c in (2, 3):
            z |= 1 << q
    return PauliOperator(n, x, z)


def _exact_round(
    code: StabilizerCode, mode: str, input_probs: list[np.ndarray]
) -> tuple[np.ndarray, float]:
    """Enumerate all 4^n joint error patterns; return (output probs, A)."""
    n = code.n
    table = coset_correction_table(code) if mode == "ec" else None
    out = np.zeros(4, dtype=float)
    accepted = 0.0
    for pattern in itertools.product(range(4), repeat=n):
        prob = 1.0
        for q, c in enumerate(pattern):
            prob *= float(input_probs[q][c])
        if prob == 0.0:
            continue
        p = _pauli_from_classes(n, pattern)
        s = code.syndrome(p)
        xb, zb = code.logical_class(p)
        if mode == "ed":
            if s != 0:
                continue
        else:
            cx, cz = table[s]
            xb ^= cx
            zb ^= cz
        accepted += prob
        out[int(_IDX_FROM_BITS[2 * xb + zb])] += prob
    total = float(out.sum())
    if total > 0:
        out = out / total
    # correction mode keeps every trial; its acceptance is 1 by
    # construction, not by float accumulation over 4^n terms
    return out, 1.0 if mode == "ec" else min(accepted, 1.0)


def purify_exact(
    protocol: PurificationProtocol,
    inputs: list[BellDiagonalState],
    noise: NoiseModel | None = None,
) -> PurificationResult:
    """Exact purification output by full error-pattern enumeration.

    Noiseless local operations only; the Monte Carlo path handles gate
    noise. For protocols with several rounds, later rounds consume n
    i.i.d. copies of the previous round's output; the reported acceptance
    is the final round's, with the product of all rounds in
    cumulative_acceptance.
    """
    code = protocol.code
    if noise is not None and not noise.is_noiseless:
        raise ValueError("purify_exact is noiseless; use purify_mc")
    if code.n > MAX_EXACT_QUBITS:
        raise ValueError(f"exact enumeration capped at n={MAX_EXACT_QUBITS}")
    if len(inputs) != code.n:
        raise ValueError(f"expected {code.n} input pairs, got {len(inputs)}")
    probs = [s.as_array() for s in inputs]
    cumulative = 1.0
    out = None
    acceptance = 1.0
    for _ in range(protocol.rounds):
        out, acceptance = _exact_round(code, protocol.mode, probs)
        cumulative *= acceptance
        if acceptance == 0.0:
            return PurificationResult(
                None, 0.0, 1.0, cumulative_acceptance=cumulative
            )
        probs = [out] * code.n
    return PurificationResult(
        BellDiagonalState.from_array(out),
        acceptance,
        1.0 - acceptance,
        cumulative_acceptance=cumulative,
    )


def _sample_classes(
    gen: np.random.Generator, probs: np.ndarray, size: int
) -> np.ndarray:
    cum = np.cumsum(probs)
    u = gen.random(size)
    return np.minimum(np.searchsorted(cum, u, side="right"), 3).astype(np.uint8)


def _apply_gates(
    gen: np.random.Generator,
    x: np.ndarray,
    z: np.ndarray,
    circuit: CliffordCircuit,
    p_local: float,
) -> tuple[np.ndarray, np.ndarray]:
    size = x.size
    for name, qubits in circuit.gates:
        if name == "h":
            (q,) = qubits
            bit = np.uint8(1 << q)
            flip = (x ^ z) & bit
            x ^= flip
            z ^= flip
        elif name == "s":
            (q,) = qubits
            bit = np.uint8(1 << q)
            z ^= x & bit
        elif name == "cnot":
            c, t = qubits
            x ^= ((x >> c) & 1) << t
            z ^= ((z >> t) & 1) << c
        else:  # cz
            a, b = qubits
            za = ((x >> b) & 1) << a
            zb = ((x >> a) & 1) << b
            z ^= za | zb
        if p_local > 0.0 and name in ("cnot", "cz"):
            a, b = qubits
            for _side in range(2):
                hit = gen.random(size) < p_local
                r = gen.integers(1, 16, size=size, dtype=np.uint8)
                r = np.where(hit, r, np.uint8(0))
                x ^= ((r & 1) << a) | (((r >> 2) & 1) << b)
                z ^= (((r >> 1) & 1) << a) | (((r >> 3) & 1) << b)
    return x, z


def _mc_round(
    code: StabilizerCode,
    mode: str,
    input_probs: list[np.ndarray],
    noise: NoiseModel,
    trials: int,
    seed: int,
    stream_offset: int,
) -> tuple[np.ndarray, int]:
    """One Monte Carlo purification round; returns (class counts, accepted)."""
    n = code.n
    if n > 8:
        raise ValueError("uint8 frame masks support at most 8 qubits")
    circuit = _decoder(code)
    if mode == "ec":
        table = coset_correction_table(code)
        corr_x = np.array([cx for cx, _ in table], dtype=np.uint8)
        corr_z = np.array([cz for _, cz in table], dtype=np.uint8)
    counts = np.zeros(4, dtype=np.int64)
    accepted = 0
    batches = rngmod.batch_sizes(trials)
    if len(batches) > _STREAMS_PER_ROUND:
        raise ValueError("trial count exceeds the round's RNG stream block")
    stream = stream_offset
    for size in batches:
        gen = rngmod.stream_generator(seed, stream)
        stream += 1
        x = np.zeros(size, dtype=np.uint8)
        z = np.zeros(size, dtype=np.uint8)
        for q in range(n):
            cls = _sample_classes(gen, input_probs[q], size)
            xb = ((cls == 1) | (cls == 2)).astype(np.uint8)
            zb = (cls >= 2).astype(np.uint8)
            x |= xb << q
            z |= zb << q
        x, z = _apply_gates(gen, x, z, circuit, noise.p_local)
        syndrome = np.zeros(size, dtype=np.uint16)
        for q in range(1, n):
            bit = ((x >> q) & 1).astype(np.uint16)
            if noise.p_meas > 0.0:
                bit ^= gen.random(size) < noise.p_meas
                bit ^= gen.random(size) < noise.p_meas
            syndrome |= bit << (q - 1)
        xb = (x & 1).astype(np.uint8)
        zb = (z & 1).astype(np.uint8)
        if mode == "ed":
            keep = syndrome == 0
        else:
            keep = np.ones(size, dtype=bool)
            xb ^= corr_x[syndrome]
            zb ^= corr_z[syndrome]
        idx = _IDX_FROM_BITS[2 * xb[keep] + zb[keep]]
        counts += np.bincount(idx, minlength=4)
        accepted += int(keep.sum())
    return counts, accepted


def _result_from_counts(
    counts: np.ndarray, accepted: int, trials: int, cumulative: float
) -> PurificationResult:
    acceptance = accepted / trials
    acc_err = math.sqrt(acceptance * (1.0 - acceptance) / trials)
    if accepted == 0:
        return PurificationResult(
            None,
            0.0,
            1.0,
            fidelity_stderr=None,
            acceptance_stderr=acc_err,
            trials=trials,
            accepted_trials=0,
            cumulative_acceptance=cumulative,
        )
    out = BellDiagonalState.from_array(counts.astype(float))
    f = out.fidelity
    f_err = math.sqrt(max(f * (1.0 - f), 0.0) / accepted)
    return PurificationResult(
        out,
        acceptance,
        1.0 - acceptance,
        fidelity_stderr=f_err,
        acceptance_stderr=acc_err,
        trials=trials,
        accepted_trials=accepted,
        cumulative_acceptance=cumulative,
    )


def iterate_rounds(
    protocol: PurificationProtocol,
    fidelity: float | BellDiagonalState,
    noise: NoiseModel,
    trials: int,
    seed: int,
    stream_base: int = 0,
) -> list[PurificationResult]:
    """Run the protocol's rounds, feeding each round's empirical output
    distribution into the next (i.i.d. pair approximation). Every round
    draws fresh trials; cumulative acceptance multiplies up the rounds.
    """
    if trials < MIN_MC_TRIALS:
        raise ValueError(f"need at least {MIN_MC_TRIALS} trials")
    if isinstance(fidelity, BellDiagonalState):
        state = fidelity
    else:
        state = werner_from_fidelity(fidelity)
    probs = [state.as_array()] * protocol.code.n
    results: list[PurificationResult] = []
    cumulative = 1.0
    for rnd in range(protocol.rounds):
        counts, accepted = _mc_round(
            protocol.code,
            protocol.mode,
            probs,
            noise,
            trials,
            seed,
            stream_base + rnd * _STREAMS_PER_ROUND,
        )
        cumulative *= accepted / trials
        results.append(_result_from_counts(counts, accepted, trials, cumulative))
        if accepted == 0:
            break
        probs = [results[-1].output.as_array()] * protocol.code.n
    return results


def purify_mc(
    protocol: PurificationProtocol,
    fidelity: float | BellDiagonalState,
    noise: NoiseModel,
    trials: int,
    seed: int,
) -> PurificationResult:
    """Monte Carlo purification; the final round's result for multi-round
    protocols (cumulative acceptance included in the result)."""
    return iterate_rounds(protocol, fidelity, noise, trials, seed)[-1]


def sweep_fidelity(
    protocol: PurificationProtocol,
    f_grid: list[float],
    noise: NoiseModel,
    trials: int,
    seed: int,
) -> list[tuple[float, PurificationResult]]:
    """Evaluate the protocol across input fidelities (curve data).

    Each grid point gets its own RNG stream block, so the curve is
    deterministic under reordering or parallel evaluation of points.
    """
    if any(f < 0.5 or f > 1.0 for f in f_grid):
        raise ValueError("fidelity grid must lie within [0.5, 1]")
    out = []
    for k, f in enumerate(f_grid):
        results = iterate_rounds(
            protocol, f, noise, trials, seed, stream_base=k * _STREAMS_PER_POINT
        )
        out.append((f, results[-1]))
    return out
