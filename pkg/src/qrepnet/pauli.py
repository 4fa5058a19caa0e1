"""Symplectic Pauli algebra, Clifford conjugation, and stabilizer codes.

Paulis are stored as a pair of bitmasks ``(x, z)`` over ``n`` qubits: bit
``i`` of ``x`` means an X factor on qubit ``i``, bit ``i`` of ``z`` a Z
factor, both together a Y. Global phases are never tracked; the only
observable consequence of them, the commutation sign between two Paulis,
is computed directly from the masks. Clifford circuits act on Paulis by
conjugation through per-gate bit rules, which is what every simulation in
the package is built on.

The module also carries the two built-in stabilizer codes used by the
purification layer, a text round-trip for code definitions, a synthesis
routine that produces an encoding/decoding circuit for any code whose
generators and logicals are real (even Y count), and the minimum-weight
coset table used for error-correcting decoding.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

_CHAR_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_CHAR = {v: k for k, v in _CHAR_TO_BITS.items()}

GATE_ARITY = {"h": 1, "s": 1, "cnot": 2, "cz": 2}
REAL_GATES = ("h", "cnot", "cz")


@dataclass(frozen=True)
class PauliOperator:
    """An n-qubit Pauli, phase-free, as (x, z) bitmasks."""

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one qubit")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("bitmask exceeds qubit count")

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        """Parse a string over IXYZ; leftmost character is qubit 0."""
        text = text.strip().upper()
        x = z = 0
        for i, ch in enumerate(text):
            try:
                xb, zb = _CHAR_TO_BITS[ch]
            except KeyError:
                raise ValueError(f"bad Pauli character {ch!r}") from None
            x |= xb << i
            z |= zb << i
        return cls(len(text), x, z)

    def to_string(self) -> str:
        return "".join(
            _BITS_TO_CHAR[(self.x >> i) & 1, (self.z >> i) & 1]
            for i in range(self.n)
        )

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.to_string()

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def y_count(self) -> int:
        return (self.x & self.z).bit_count()

    @property
    def is_real(self) -> bool:
        """True when the operator's matrix is real, i.e. even Y count."""
        return self.y_count % 2 == 0

    def commutes_with(self, other: "PauliOperator") -> bool:
        return self.symplectic_product(other) == 0

    def symplectic_product(self, other: "PauliOperator") -> int:
        """1 if the two Paulis anticommute, else 0."""
        if self.n != other.n:
            raise ValueError("qubit counts differ")
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        """Phase-free product: bitwise XOR of the masks."""
        if self.n != other.n:
            raise ValueError("qubit counts differ")
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z)

    def single(self, qubit: int) -> str:
        """The IXYZ letter on one qubit."""
        return _BITS_TO_CHAR[(self.x >> qubit) & 1, (self.z >> qubit) & 1]


def identity(n: int) -> PauliOperator:
    return PauliOperator(n)


def single_qubit(n: int, qubit: int, kind: str) -> PauliOperator:
    """The weight-1 Pauli ``kind`` in {X, Y, Z} on ``qubit``."""
    xb, zb = _CHAR_TO_BITS[kind.upper()]
    return PauliOperator(n, xb << qubit, zb << qubit)


def conjugate_masks(x: int, z: int, gate: str, qubits: tuple[int, ...]) -> tuple[int, int]:
    """Map the masks of P to those of U P U^dagger for one gate.

    Heisenberg rules, phases dropped:
      h q      : swap the x and z bits of q
      s q      : z_q ^= x_q            (X -> Y, Z -> Z)
      cnot c t : x_t ^= x_c, z_c ^= z_t
      cz a b   : z_b ^= x_a, z_a ^= x_b
    """
    if gate == "h":
        (q,) = qubits
        bit = 1 << q
        xb, zb = x & bit, z & bit
        x = (x & ~bit) | zb
        z = (z & ~bit) | xb
    elif gate == "s":
        (q,) = qubits
        bit = 1 << q
        if x & bit:
            z ^= bit
    elif gate == "cnot":
        c, t = qubits
        if x & (1 << c):
            x ^= 1 << t
        if z & (1 << t):
            z ^= 1 << c
    elif gate == "cz":
        a, b = qubits
        if x & (1 << a):
            z ^= 1 << b
        if x & (1 << b):
            z ^= 1 << a
    else:
        raise ValueError(f"unknown gate {gate!r}")
    return x, z


Gate = tuple[str, tuple[int, ...]]


@dataclass(frozen=True)
class CliffordCircuit:
    """A gate list over {h, s, cnot, cz}; qubits are 0-based indices.

    ``measurements`` is an optional per-qubit basis layer ("x", "z" or
    "none") applied once after all gates; it is bookkeeping for protocol
    code and does not affect conjugation.
    """

    n: int
    gates: tuple[Gate, ...] = ()
    measurements: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        for name, qubits in self.gates:
            if name not in GATE_ARITY:
                raise ValueError(f"unknown gate {name!r}")
            if len(qubits) != GATE_ARITY[name]:
                raise ValueError(f"{name} takes {GATE_ARITY[name]} qubits")
            if len(set(qubits)) != len(qubits):
                raise ValueError("gate qubits must be distinct")
            if any(q < 0 or q >= self.n for q in qubits):
                raise ValueError("gate qubit out of range")
        if self.measurements is not None:
            if len(self.measurements) != self.n:
                raise ValueError("measurement layer must cover every qubit")
            if any(m not in ("x", "z", "none") for m in self.measurements):
                raise ValueError("measurement basis must be x, z or none")

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def is_real(self) -> bool:
        return all(name in REAL_GATES for name, _ in self.gates)

    @property
    def two_qubit_count(self) -> int:
        return sum(1 for name, _ in self.gates if GATE_ARITY[name] == 2)

    def conjugate(self, p: PauliOperator) -> PauliOperator:
        """U P U^dagger with U the whole circuit (gates applied in order)."""
        if p.n != self.n:
            raise ValueError("qubit counts differ")
        x, z = p.x, p.z
        for name, qubits in self.gates:
            x, z = conjugate_masks(x, z, name, qubits)
        return PauliOperator(self.n, x, z)

    def inverse(self) -> "CliffordCircuit":
        """Reversed gate order; h/cnot/cz are self-inverse, s becomes s^3."""
        out: list[Gate] = []
        for name, qubits in reversed(self.gates):
            if name == "s":
                out.extend([("s", qubits)] * 3)
            else:
                out.append((name, qubits))
        return CliffordCircuit(self.n, tuple(out))

    def then(self, other: "CliffordCircuit") -> "CliffordCircuit":
        if other.n != self.n:
            raise ValueError("qubit counts differ")
        return CliffordCircuit(
            self.n, self.gates + other.gates, other.measurements
        )


def pauli_mul(a: PauliOperator, b: PauliOperator) -> tuple[PauliOperator, int]:
    """Product of two Paulis plus their commutation sign.

    The returned operator is the phase-free bitmask product; the sign is
    +1 when a and b commute and -1 when they anticommute (the only part
    of the phase that measurement statistics can see).
    """
    sign = -1 if a.symplectic_product(b) else 1
    return a * b, sign


def conjugate_through(circuit: CliffordCircuit, p: PauliOperator) -> PauliOperator:
    """U p U^dagger for the circuit unitary U. Alias of circuit.conjugate."""
    return circuit.conjugate(p)


def simplify_circuit(circuit: CliffordCircuit) -> CliffordCircuit:
    """Peephole cleanup: cancel equal self-inverse gates separated only by
    gates acting on disjoint qubits. Deterministic and conjugation-preserving.
    """
    gates = list(circuit.gates)
    changed = True
    while changed:
        changed = False
        out: list[Gate] = []
        for gate in gates:
            name, qubits = gate
            hit = None
            if name != "s":
                support = set(qubits)
                for j in range(len(out) - 1, -1, -1):
                    prev_name, prev_qubits = out[j]
                    if out[j] == gate:
                        hit = j
                        break
                    if support & set(prev_qubits):
                        break
            if hit is not None:
                del out[hit]
                changed = True
            else:
                out.append(gate)
        gates = out
    return CliffordCircuit(circuit.n, tuple(gates), circuit.measurements)


# --- dense matrices (small n; used by oracles and the hybrid layer) ---

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_SINGLE = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z}


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    """Dense matrix of the Pauli, Hermitian convention (Y for X.Z overlap).

    Qubit 0 is the most significant tensor factor, matching the string
    order of from_string/to_string.
    """
    m = np.array([[1]], dtype=complex)
    for q in range(p.n):
        m = np.kron(m, _SINGLE[p.single(q)])
    return m


def _embed(one: np.ndarray, n: int, q: int) -> np.ndarray:
    m = np.array([[1]], dtype=complex)
    for i in range(n):
        m = np.kron(m, one if i == q else _I2)
    return m


def gate_matrix(n: int, gate: str, qubits: tuple[int, ...]) -> np.ndarray:
    if gate == "h":
        return _embed(_H, n, qubits[0])
    if gate == "s":
        return _embed(_S, n, qubits[0])
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    if gate == "cnot":
        c, t = qubits
        for basis in range(dim):
            # bit order: qubit 0 is the most significant bit of the index
            cbit = (basis >> (n - 1 - c)) & 1
            out = basis ^ (cbit << (n - 1 - t))
            m[out, basis] = 1.0
        return m
    if gate == "cz":
        a, b = qubits
        for basis in range(dim):
            abit = (basis >> (n - 1 - a)) & 1
            bbit = (basis >> (n - 1 - b)) & 1
            m[basis, basis] = -1.0 if (abit and bbit) else 1.0
        return m
    raise ValueError(f"unknown gate {gate!r}")


def circuit_unitary(circuit: CliffordCircuit) -> np.ndarray:
    u = np.eye(1 << circuit.n, dtype=complex)
    for name, qubits in circuit.gates:
        u = gate_matrix(circuit.n, name, qubits) @ u
    return u


# --- stabilizer codes ---


@dataclass(frozen=True)
class StabilizerCode:
    """An [[n, 1, d]] stabilizer code with chosen logical representatives."""

    name: str
    generators: tuple[PauliOperator, ...]
    logical_x: PauliOperator
    logical_z: PauliOperator
    distance: int

    @property
    def n(self) -> int:
        return self.logical_x.n

    @property
    def k(self) -> int:
        return self.n - len(self.generators)

    def validate(self) -> None:
        """Raise ValueError unless the presentation is a consistent code."""
        n = self.n
        paulis = list(self.generators) + [self.logical_x, self.logical_z]
        if any(p.n != n for p in paulis):
            raise ValueError("mixed qubit counts")
        for a, b in itertools.combinations(self.generators, 2):
            if not a.commutes_with(b):
                raise ValueError(f"generators {a} and {b} anticommute")
        for g in self.generators:
            if not g.commutes_with(self.logical_x):
                raise ValueError(f"logical X anticommutes with {g}")
            if not g.commutes_with(self.logical_z):
                raise ValueError(f"logical Z anticommutes with {g}")
        if self.logical_x.commutes_with(self.logical_z):
            raise ValueError("logical X and Z must anticommute")
        if _gf2_rank([g.x | g.z << n for g in self.generators]) != len(
            self.generators
        ):
            raise ValueError("generators are dependent")

    @property
    def is_real(self) -> bool:
        return all(
            p.is_real
            for p in (*self.generators, self.logical_x, self.logical_z)
        )

    def syndrome(self, error: PauliOperator) -> int:
        """Bit i set when the error anticommutes with generator i."""
        s = 0
        for i, g in enumerate(self.generators):
            s |= g.symplectic_product(error) << i
        return s

    def logical_class(self, error: PauliOperator) -> tuple[int, int]:
        """(x_part, z_part) of the logical action of an error.

        x_part = 1 when the error flips a logical Z measurement (acts as
        logical X), z_part likewise against logical X.
        """
        return (
            self.logical_z.symplectic_product(error),
            self.logical_x.symplectic_product(error),
        )


def syndrome_of(code: StabilizerCode, error: PauliOperator) -> int:
    """Syndrome bits as an integer; bit i = anticommutes with generator i."""
    return code.syndrome(error)


_CLASS_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


def logical_action(
    code: StabilizerCode,
    error: PauliOperator,
    correction: PauliOperator | None = None,
) -> str:
    """Classify an error's action on the encoded qubit: I, X, Y or Z.

    Meaningful only for normalizer elements; with a nonzero syndrome and
    no correction supplied the error is simply flagged as "detected".
    Supplying a correction classifies the residual error * correction
    instead (whose syndrome must then vanish).
    """
    if correction is not None:
        error = error * correction
    if code.syndrome(error) != 0:
        return "detected"
    return _CLASS_LETTER[code.logical_class(error)]


def _gf2_rank(rows: list[int]) -> int:
    rank = 0
    basis: list[int] = []
    for row in rows:
        cur = row
        for b in basis:
            cur = min(cur, cur ^ b)
        if cur:
            basis.append(cur)
            basis.sort(reverse=True)
            rank += 1
    return rank


def make_code(
    name: str,
    generators: list[str],
    logical_x: str,
    logical_z: str,
    distance: int,
) -> StabilizerCode:
    code = StabilizerCode(
        name,
        tuple(PauliOperator.from_string(g) for g in generators),
        PauliOperator.from_string(logical_x),
        PauliOperator.from_string(logical_z),
        distance,
    )
    code.validate()
    return code


FIVE_QUBIT = make_code(
    "513",
    ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"],
    "XXXXX",
    "ZZZZZ",
    3,
)

# One valid distance-2 presentation; every weight-1 error trips a generator.
FOUR_QUBIT = make_code(
    "412",
    ["XXXX", "ZZZZ", "XIXI"],
    "IXXI",
    "IZIZ",
    2,
)

BUILTIN_CODES = {"513": FIVE_QUBIT, "412": FOUR_QUBIT}


# --- text round-trip ---


def format_code(code: StabilizerCode) -> str:
    """Render a code definition in the line-oriented text format.

    One key/value pair per line: name, distance, one ``stabilizer`` line
    per generator, then logical_x and logical_z. '#' starts a comment.
    """
    lines = [f"name {code.name}", f"distance {code.distance}"]
    lines += [f"stabilizer {g.to_string()}" for g in code.generators]
    lines += [
        f"logical_x {code.logical_x.to_string()}",
        f"logical_z {code.logical_z.to_string()}",
    ]
    return "\n".join(lines) + "\n"


def parse_code(text: str) -> StabilizerCode:
    """Inverse of format_code; validates the parsed presentation."""
    name = None
    distance = None
    gens: list[str] = []
    lx = lz = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        value = value.strip()
        if key == "name":
            name = value
        elif key == "distance":
            distance = int(value)
        elif key == "stabilizer":
            gens.append(value)
        elif key == "logical_x":
            lx = value
        elif key == "logical_z":
            lz = value
        else:
            raise ValueError(f"unknown key {key!r}")
    if not (name and distance and gens and lx and lz):
        raise ValueError("incomplete code definition")
    return make_code(name, gens, lx, lz, distance)


# --- encoder/decoder synthesis ---


class SynthesisError(ValueError):
    pass


def synthesize_decoder(code: StabilizerCode) -> CliffordCircuit:
    """Build a real decoding circuit W for a real [[n, 1, d]] code.

    W maps, by conjugation: logical Z -> Z on qubit 0, logical X -> X on
    qubit 0, generator i -> Z on qubit i+1. Measuring qubits 1..n-1 in the
    computational basis after W therefore reads the full syndrome, and
    qubit 0 carries the logical qubit. Only h/cnot/cz are emitted, so W is
    real; its inverse (same gates reversed) is an encoder.

    Works for any code whose generators and logicals all have even Y
    count; raises SynthesisError otherwise.
    """
    code.validate()
    if not code.is_real:
        raise SynthesisError("code presentation must be real (even Y count)")
    if code.k != 1:
        raise SynthesisError("only single-logical-qubit codes are supported")
    n = code.n
    rows: list[list[int]] = [
        [p.x, p.z]
        for p in (code.logical_z, code.logical_x, *code.generators)
    ]
    gates: list[Gate] = []

    def emit(name: str, *qubits: int) -> None:
        gates.append((name, qubits))
        for row in rows:
            row[0], row[1] = conjugate_masks(row[0], row[1], name, qubits)

    def y_positions(row: list[int], start: int) -> list[int]:
        m = row[0] & row[1] & ~((1 << start) - 1)
        return _bit_positions(m)

    def clear_y_pairs(row: list[int], start: int) -> None:
        ys = y_positions(row, start)
        if len(ys) % 2:
            raise SynthesisError("odd Y count in free zone")
        for p, q in zip(ys[::2], ys[1::2]):
            emit("cnot", p, q)  # Y_p Y_q -> X_p Z_q

    def h_x_positions(row: list[int], start: int) -> None:
        m = row[0] & ~row[1] & ~((1 << start) - 1)
        for q in _bit_positions(m):
            emit("h", q)

    def collapse_z(row: list[int], start: int, target: int) -> None:
        zs = _bit_positions(row[1] & ~((1 << start) - 1))
        if not zs:
            raise SynthesisError("row lost support in free zone")
        pivot = target if target in zs else zs[0]
        for a in zs:
            if a != pivot:
                emit("cnot", a, pivot)
        # Z factors on already-fixed qubits j < start merge the same way.
        for j in _bit_positions(row[1] & ((1 << start) - 1)):
            emit("cnot", j, pivot)
        if pivot != target:
            emit("cnot", pivot, target)
            emit("cnot", target, pivot)
            emit("cnot", pivot, target)

    # Stage 1: logical Z -> Z_0. No rows are fixed yet.
    clear_y_pairs(rows[0], 0)
    h_x_positions(rows[0], 0)
    collapse_z(rows[0], 0, 0)
    if rows[0] != [0, 1]:
        raise SynthesisError("stage 1 failed")

    # Stage 2: logical X -> X_0, preserving Z_0. The row anticommutes with
    # Z_0, so it carries X or Y on qubit 0.
    row = rows[1]
    if row[0] & row[1] & 1:
        partners = y_positions(row, 1)
        if not partners:
            raise SynthesisError("lone Y on qubit 0")
        emit("cnot", 0, partners[0])
    clear_y_pairs(row, 1)
    h_x_positions(row, 1)
    for j in _bit_positions(row[1] & ~1):
        emit("cz", 0, j)
    if row != [1, 0]:
        raise SynthesisError("stage 2 failed")

    # Stage 3: generator i -> Z_{i+1}; gates stay on qubits >= i+1 except
    # for cnot(fixed j -> pivot), which preserves every fixed row.
    for i in range(1, n):
        row = rows[i + 1]
        clear_y_pairs(row, i)
        h_x_positions(row, i)
        collapse_z(row, i, i)
        if row != [0, 1 << i]:
            raise SynthesisError(f"stage 3 failed at row {i}")

    # syndrome qubits 1..n-1 are read out in Z after decoding
    layer = ("none",) + ("z",) * (n - 1)
    circuit = simplify_circuit(CliffordCircuit(n, tuple(gates), layer))
    _check_decoder(code, circuit)
    return circuit


def _check_decoder(code: StabilizerCode, circuit: CliffordCircuit) -> None:
    n = code.n
    want = [(0, 1), (1, 0)] + [(0, 1 << i) for i in range(1, n)]
    got = [
        circuit.conjugate(p)
        for p in (code.logical_z, code.logical_x, *code.generators)
    ]
    for w, g in zip(want, got):
        if (g.x, g.z) != w:
            raise SynthesisError("decoder check failed")


def synthesize_encoder(code: StabilizerCode) -> CliffordCircuit:
    """Inverse of the synthesized decoder."""
    return synthesize_decoder(code).inverse()


def _bit_positions(mask: int) -> list[int]:
    out = []
    q = 0
    while mask:
        if mask & 1:
            out.append(q)
        mask >>= 1
        q += 1
    return out


# --- minimum-weight coset corrections ---


@functools.lru_cache(maxsize=None)
def coset_correction_table(code: StabilizerCode) -> tuple[tuple[int, int], ...]:
    """Logical class of a minimum-weight correction, per syndrome.

    Entry s is the (x_part, z_part) logical class of the lowest-weight
    Pauli with syndrome s (ties broken by enumeration order, which is
    deterministic). Applying that correction after measuring syndrome s
    leaves residual logical action class(error) XOR entry.
    """
    n = code.n
    found: dict[int, tuple[int, int]] = {}
    total = 1 << len(code.generators)
    for weight in range(n + 1):
        if len(found) == total:
            break
        for support in itertools.combinations(range(n), weight):
            for kinds in itertools.product("XYZ", repeat=weight):
                x = z = 0
                for q, kind in zip(support, kinds):
                    xb, zb = _CHAR_TO_BITS[kind]
                    x |= xb << q
                    z |= zb << q
                p = PauliOperator(n, x, z)
                s = code.syndrome(p)
                if s not in found:
                    found[s] = code.logical_class(p)
    if len(found) != total:
        raise ValueError("syndrome map is not surjective")
    return tuple(found[s] for s in range(total))
