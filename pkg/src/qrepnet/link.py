"""Photonic link budget and heralded entanglement generation.

A single photon carries a which-path qubit past two matter qubits. The
reference path (mode 1) flies through untouched; the interaction path
(mode 2) picks up a phase e^{i theta} conditioned on the first qubit
being excited and e^{-i theta} conditioned on the second, so the path
amplitude records the difference of the two qubit values. The paths then
interfere on a balanced beamsplitter and a click in detector 1 or 2
heralds a matter-matter entangled state.

Working points:

* theta = pi: both detectors herald a perfect Bell state (detector 1 the
  even-parity pair, detector 2 the odd-parity pair), each with
  probability 1/2. This is the dual-herald mode.
* theta != pi: only detector 2 heralds a usable pair. Its click
  probability is (1 - cos theta)/4, and the conditioned state is
  maximally entangled for every theta, equal to the odd-parity Bell
  state after a deterministic z rotation of angle (pi - theta) on the
  first qubit. This is the single-herald mode; the smaller click
  probability buys insensitivity to even-parity amplitude errors.

The closed-form acceptance factors used by the link budget are
reproduced exactly by the state-vector simulation in this module; tests
hold them to 1e-12.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

# matter-basis indices within the 4-dim two-qubit space, first qubit is
# the most significant bit (matching qrepnet.pauli dense conventions)
_PHI_PLUS_VEC = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0)
_PSI_PLUS_VEC = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2.0)

OUTCOMES = ("detector_p1", "detector_p2", "no_click")
POST_STATES = ("phi_plus", "psi_plus", "rejected")
MODES = ("dual", "single")


@dataclass(frozen=True)
class LinkParams:
    """Per-attempt link budget factors.

    p_single is the single-photon emission probability, p_coupling the
    fiber in/out coupling efficiency (applied twice), p_detector the
    click efficiency, and exp(-length_km/attenuation_km) the fiber
    transmission. theta_rad is the interaction phase of the herald
    scheme; dark_count_prob is the per-window dark-click probability
    used by the false-acceptance model.
    """

    p_single: float
    p_coupling: float
    p_detector: float
    length_km: float
    attenuation_km: float = 25.0
    theta_rad: float = math.pi
    dark_count_prob: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p_single", "p_coupling", "p_detector", "dark_count_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.length_km < 0.0:
            raise ValueError("length_km must be non-negative")
        if self.attenuation_km <= 0.0:
            raise ValueError("attenuation_km must be positive")

    @property
    def transmission(self) -> float:
        return math.exp(-self.length_km / self.attenuation_km)


@dataclass(frozen=True)
class MultiplexConfig:
    """Memory multiplexing: q_tx transmit slots, q_rx receive slots."""

    q_tx: int
    q_rx: int
    bidirectional: bool = False

    def __post_init__(self) -> None:
        if self.q_tx < 1 or self.q_rx < 1:
            raise ValueError("multiplex slot counts must be >= 1")

    @property
    def attempts_per_trip(self) -> int:
        return 2 * self.q_tx if self.bidirectional else self.q_tx


@dataclass(frozen=True)
class HeraldOutcome:
    """Detector result and what it means for the matter pair."""

    outcome: str
    post_state: str

    def __post_init__(self) -> None:
        if self.outcome not in OUTCOMES:
            raise ValueError(f"outcome must be one of {OUTCOMES}")
        if self.post_state not in POST_STATES:
            raise ValueError(f"post_state must be one of {POST_STATES}")

    @property
    def accepted(self) -> bool:
        return self.post_state != "rejected"


def classify_click(detector: str, theta_rad: float, mode: str) -> HeraldOutcome:
    """Map a detector result to the heralded pair state under a mode."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if detector not in OUTCOMES:
        raise ValueError(f"detector must be one of {OUTCOMES}")
    if detector == "no_click":
        return HeraldOutcome("no_click", "rejected")
    if detector == "detector_p2":
        return HeraldOutcome("detector_p2", "psi_plus")
    # detector 1 is only trusted at the theta = pi working point
    if mode == "dual" and math.isclose(theta_rad, math.pi):
        return HeraldOutcome("detector_p1", "phi_plus")
    return HeraldOutcome("detector_p1", "rejected")


def herald_acceptance_factor(theta_rad: float, mode: str) -> float:
    """Probability that one delivered photon heralds a usable pair."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode == "dual":
        if not math.isclose(theta_rad, math.pi):
            raise ValueError("dual-herald acceptance requires theta = pi")
        return 1.0
    return (1.0 - math.cos(theta_rad)) / 4.0


def success_probability(params: LinkParams, mode: str) -> float:
    """Per-attempt probability of heralding a usable pair.

    Photon emission, two coupling passes, fiber transmission, and
    detection must all succeed, and the click must be one the chosen
    herald mode accepts.
    """
    budget = (
        params.p_single
        * params.p_coupling**2
        * params.p_detector
        * params.transmission
    )
    return budget * herald_acceptance_factor(params.theta_rad, mode)


@dataclass(frozen=True)
class HeraldSimulation:
    """State-vector results for one interaction phase.

    Probabilities cover the three detector outcomes; the matter states
    are the normalized two-qubit vectors conditioned on each click after
    the deterministic z correction of angle correction_rad on the first
    qubit (exp(-i*correction_rad/2 * Z), applied only to detector 2; the
    detector-1 state needs none at the dual working point).
    """

    theta_rad: float
    survival: float
    p_detector_1: float
    p_detector_2: float
    p_no_click: float
    state_detector_1: np.ndarray
    state_detector_2: np.ndarray
    correction_rad: float
    fidelity_phi_plus: float
    fidelity_psi_plus: float


def simulate_herald_protocol(
    theta_rad: float, survival: float = 1.0
) -> HeraldSimulation:
    """Propagate the joint matter-photon state through the herald scheme.

    Both matter qubits start in (|0> + |1>)/sqrt(2) and the photon in an
    equal superposition of the reference and interaction paths. The
    interaction path acquires e^{i theta} from the first qubit's excited
    state and e^{-i theta} from the second's; a balanced beamsplitter
    then mixes the paths onto the two detectors. survival is the photon's
    end-to-end delivery probability; a lost photon clicks nothing.
    """
    if not 0.0 <= survival <= 1.0:
        raise ValueError("survival must lie in [0, 1]")
    # amp[q1, q2, path]; matter bits ordered (first, second)
    amp = np.full((2, 2, 2), 0.5 * (1.0 / math.sqrt(2.0)), dtype=complex)
    for q1 in range(2):
        for q2 in range(2):
            amp[q1, q2, 1] *= cmath.exp(1j * theta_rad * (q1 - q2))
    # beamsplitter: path0 -> (d1 + d2)/sqrt2, path1 -> (d1 - d2)/sqrt2
    det = np.empty_like(amp)
    det[:, :, 0] = (amp[:, :, 0] + amp[:, :, 1]) / math.sqrt(2.0)
    det[:, :, 1] = (amp[:, :, 0] - amp[:, :, 1]) / math.sqrt(2.0)

    correction = math.pi - theta_rad
    phase = np.array([1.0, cmath.exp(1j * correction)])  # on first qubit
    states = []
    probs = []
    for d in range(2):
        branch = det[:, :, d]
        p = float(np.sum(np.abs(branch) ** 2))
        probs.append(survival * p)
        if p > 1e-15:
            conditioned = branch / math.sqrt(p)
            if d == 1:
                conditioned = conditioned * phase[:, None]
            states.append(conditioned.reshape(4))
        else:
            states.append(np.zeros(4, dtype=complex))

    fid_phi = abs(np.vdot(_PHI_PLUS_VEC, states[0])) ** 2
    fid_psi = abs(np.vdot(_PSI_PLUS_VEC, states[1])) ** 2
    return HeraldSimulation(
        theta_rad=theta_rad,
        survival=survival,
        p_detector_1=probs[0],
        p_detector_2=probs[1],
        p_no_click=1.0 - survival,
        state_detector_1=states[0],
        state_detector_2=states[1],
        correction_rad=correction,
        fidelity_phi_plus=float(fid_phi),
        fidelity_psi_plus=float(fid_psi),
    )


def sample_round_trip(
    cfg: MultiplexConfig, p_link: float, rng: np.random.Generator
) -> int:
    """Number of pairs established in one multiplexed round trip."""
    if not 0.0 <= p_link <= 1.0:
        raise ValueError("p_link must lie in [0, 1]")
    return int(rng.binomial(cfg.attempts_per_trip, p_link))


def dark_count_acceptance_error(
    dark_count_prob: float, expected_attempts: float
) -> float:
    """Probability that the first accepted herald was a dark count.

    Attempts repeat until a real click or a dark count fires; a dark
    count in the accepting window is counted as a false acceptance even
    if the real click arrived in the same window, which makes the figure
    conservative. With per-attempt link probability 1/expected_attempts
    the result is x / (1 + x - p_dark) for x = p_dark * expected_attempts;
    it vanishes with the dark-count rate and approaches 1 for links so
    slow that dark counts dominate.
    """
    if not 0.0 <= dark_count_prob <= 1.0:
        raise ValueError("dark_count_prob must lie in [0, 1]")
    if expected_attempts < 0.0:
        raise ValueError("expected_attempts must be non-negative")
    if dark_count_prob == 0.0 or expected_attempts == 0.0:
        return 0.0
    if math.isinf(expected_attempts):
        return 1.0
    x = dark_count_prob * expected_attempts
    return x / (1.0 + x - dark_count_prob)
