"""System-bath coupling models and closed-form mode/rate predictions.

Covers the rank-1 (separable) coupling test, construction of the collective
mode basis, the weak/strong decoherence mode pair for two oscillators, and
the predicted damping constants for small deviations from separability and
degeneracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fock import ModeVector


@dataclass(frozen=True)
class RateModel:
    """Markovian damping rates: one per oscillator, plus the cross rate.

    ``rates`` are the individual amplitude-decay constants (populations decay
    at twice these values).  ``cross_rate`` couples the two dissipation
    channels through the shared environment; physical tables obey
    |cross_rate|^2 <= k1 k2.
    """

    rates: tuple[float, ...]
    cross_rate: complex = 0.0
    thermal_occupation: float = 0.0

    def __post_init__(self):
        rates = tuple(float(k) for k in self.rates)
        if len(rates) < 1:
            raise ValueError("need at least one oscillator rate")
        if any(k < 0 or not math.isfinite(k) for k in rates):
            raise ValueError("rates must be finite and non-negative")
        if self.thermal_occupation < 0:
            raise ValueError("thermal occupation must be non-negative")
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "cross_rate", complex(self.cross_rate))
        object.__setattr__(self, "thermal_occupation", float(self.thermal_occupation))

    @property
    def num_oscillators(self) -> int:
        return len(self.rates)

    @property
    def total_rate(self) -> float:
        return float(sum(self.rates))

    @property
    def k1(self) -> float:
        return self.rates[0]

    @property
    def k2(self) -> float:
        return self.rates[1]


@dataclass(frozen=True)
class DeviationParams:
    """Distance from the strict protected-subspace conditions."""

    rate_gap: float          # sqrt(k1 k2) - |cross_rate|
    frequency_split: float   # (w2 - w1) / 2

    def __post_init__(self):
        if self.rate_gap < -1e-12:
            raise ValueError("rate gap must be non-negative for physical rate tables")

    @classmethod
    def from_model(cls, model: RateModel, omega1: float, omega2: float) -> "DeviationParams":
        gap = math.sqrt(model.k1 * model.k2) - abs(model.cross_rate)
        return cls(rate_gap=gap, frequency_split=0.5 * (omega2 - omega1))


@dataclass(frozen=True)
class CouplingModel:
    """Oscillator-bath coupling: full matrix or factorized (system x bath) form.

    Exactly one of ``coupling_matrix`` or the pair (``system_weights``,
    ``bath_weights``) must be given.  ``inverse_temperature`` may be infinite
    (zero temperature).
    """

    frequencies: tuple[float, ...]
    bath_frequencies: tuple[float, ...] = ()
    coupling_matrix: Optional[np.ndarray] = None
    system_weights: Optional[np.ndarray] = None
    bath_weights: Optional[np.ndarray] = None
    inverse_temperature: float = math.inf

    def __post_init__(self):
        freqs = tuple(float(w) for w in self.frequencies)
        if len(freqs) < 1:
            raise ValueError("need at least one oscillator")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(
            self, "bath_frequencies", tuple(float(w) for w in self.bath_frequencies)
        )
        has_matrix = self.coupling_matrix is not None
        has_factors = self.system_weights is not None or self.bath_weights is not None
        if has_matrix and has_factors:
            raise ValueError("give either a coupling matrix or factors, not both")
        if not has_matrix and not has_factors:
            raise ValueError("coupling form missing")
        if has_matrix:
            mat = np.array(self.coupling_matrix, dtype=complex)
            if mat.shape[0] != len(freqs):
                raise ValueError("coupling matrix rows must match oscillator count")
            mat.setflags(write=False)
            object.__setattr__(self, "coupling_matrix", mat)
        else:
            if self.system_weights is None or self.bath_weights is None:
                raise ValueError("factorized form needs both system and bath weights")
            g_sys = np.array(self.system_weights, dtype=complex).ravel()
            g_bath = np.array(self.bath_weights, dtype=complex).ravel()
            if g_sys.size != len(freqs):
                raise ValueError("system weights must match oscillator count")
            g_sys.setflags(write=False)
            g_bath.setflags(write=False)
            object.__setattr__(self, "system_weights", g_sys)
            object.__setattr__(self, "bath_weights", g_bath)
        if self.inverse_temperature < 0:
            raise ValueError("inverse temperature must be >= 0")

    @property
    def is_factorized(self) -> bool:
        return self.coupling_matrix is None

    def collective_weights(self, tol: float = 1e-10) -> np.ndarray:
        """System-side weights selecting the bath-coupled collective mode."""
        if self.is_factorized:
            return np.array(self.system_weights)
        result = separability_check(self.coupling_matrix, tol)
        if not result.separable:
            raise ValueError(
                f"coupling matrix is not separable (defect {result.defect:.3e})"
            )
        return result.system_factor

    def bath_mode_couplings(self) -> np.ndarray:
        """Effective per-bath-mode couplings of the collective mode."""
        if not self.is_factorized:
            raise ValueError("bath couplings require the factorized form")
        strength = float(np.sum(np.abs(self.system_weights) ** 2))
        return strength * np.conj(self.bath_weights)

    def degenerate_frequency(self, tol: float = 1e-12) -> float:
        freqs = np.asarray(self.frequencies)
        if np.max(np.abs(freqs - freqs[0])) > tol:
            raise ValueError("oscillator frequencies are not degenerate")
        return float(freqs[0])

    def thermal_occupation(self, omega: float) -> float:
        if math.isinf(self.inverse_temperature):
            return 0.0
        x = self.inverse_temperature * omega
        if x <= 0:
            raise ValueError("thermal occupation needs beta * omega > 0")
        return 1.0 / math.expm1(x)

    @classmethod
    def from_dict(cls, data: dict) -> "CouplingModel":
        """Parse the scenario-JSON shape; complex entries are [re, im] pairs."""
        kwargs = {
            "frequencies": tuple(data["frequencies"]),
            "bath_frequencies": tuple(data.get("bath_frequencies", ())),
        }
        if "coupling_matrix" in data and ("system_weights" in data or "bath_weights" in data):
            raise ValueError("coupling JSON must use exactly one coupling form")
        if "coupling_matrix" in data:
            kwargs["coupling_matrix"] = np.array(
                [[_parse_complex(z) for z in row] for row in data["coupling_matrix"]]
            )
        elif "system_weights" in data and "bath_weights" in data:
            kwargs["system_weights"] = np.array(
                [_parse_complex(z) for z in data["system_weights"]]
            )
            kwargs["bath_weights"] = np.array(
                [_parse_complex(z) for z in data["bath_weights"]]
            )
        else:
            raise ValueError("coupling JSON must carry a matrix or both weight vectors")
        beta = data.get("inverse_temperature")
        kwargs["inverse_temperature"] = math.inf if beta is None else float(beta)
        return cls(**kwargs)


def _parse_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(float(re), float(im))
    return complex(float(value), 0.0)


# -- operations --------------------------------------------------------------


@dataclass(frozen=True)
class SeparabilityResult:
    separable: bool
    defect: float
    system_factor: Optional[np.ndarray] = None
    bath_factor: Optional[np.ndarray] = None


def separability_check(matrix, tol: float = 1e-10) -> SeparabilityResult:
    """Test whether a coupling matrix is rank-1 up to ``tol``.

    The defect is the ratio of the two largest singular values, so it is
    scale-invariant; when separable, the factors are recovered from the
    leading singular triplet with the largest system entry made real
    positive.
    """
    g = np.array(matrix, dtype=complex)
    if g.ndim != 2:
        raise ValueError("coupling matrix must be two-dimensional")
    svals = np.linalg.svd(g, compute_uv=False)
    if svals[0] < 1e-300:
        raise ValueError("coupling matrix is identically zero")
    defect = float(svals[1] / svals[0]) if svals.size > 1 else 0.0
    if defect > tol:
        return SeparabilityResult(separable=False, defect=defect)
    u, s, vh = np.linalg.svd(g)
    scale = np.sqrt(s[0])
    sys_factor = scale * u[:, 0]
    bath_factor = scale * vh[0, :]
    j = int(np.argmax(np.abs(sys_factor)))
    phase = sys_factor[j] / abs(sys_factor[j])
    sys_factor = sys_factor / phase
    bath_factor = bath_factor * phase
    return SeparabilityResult(True, defect, sys_factor, bath_factor)


def collective_rotation(weights) -> np.ndarray:
    """Unitary whose first row is the normalized collective-mode direction.

    Remaining rows complete an orthonormal basis (Gram-Schmidt over the
    standard basis) with phases fixed so each diagonal entry is real
    positive where possible; for two real positive weights this is the plane
    rotation by theta with tan(theta) = G2/G1.
    """
    g = np.array(weights, dtype=complex).ravel()
    n = g.size
    norm = np.linalg.norm(g)
    if norm < 1e-15:
        raise ValueError("collective weights must be nonzero")
    rows = [g / norm]
    for k in range(n):
        if len(rows) == n:
            break
        cand = np.zeros(n, dtype=complex)
        cand[k] = 1.0
        for row in rows:
            cand = cand - (row.conj() @ cand) * row
        cnorm = np.linalg.norm(cand)
        if cnorm > 1e-10:
            rows.append(cand / cnorm)
    unitary = np.array(rows)
    for i in range(1, n):
        d = unitary[i, i]
        if abs(d) > 1e-12:
            unitary[i] *= np.conj(d) / abs(d)
    return unitary


def theta_from_rates(k1: float, k2: float) -> float:
    """Collective mixing angle in the Markovian limit: arctan sqrt(k2/k1)."""
    if k1 <= 0:
        raise ValueError("k1 must be positive (the rotation degenerates at k1 = 0)")
    if k2 < 0:
        raise ValueError("k2 must be non-negative")
    return float(np.arctan(np.sqrt(k2 / k1)))


def wd_sd_modes(
    k1: float, k2: float, frequency_split: float, mean_rate: Optional[float] = None
) -> tuple[ModeVector, ModeVector]:
    """Weak- and strong-decoherence mode pair for near-degenerate oscillators.

    ``mean_rate`` is the effective dissipation constant entering the relative
    phase; it defaults to (k1 + k2) / 2.  As the frequency split vanishes the
    weak mode reduces to the strictly protected one and the pair becomes
    orthogonal.
    """
    if k1 <= 0 or k2 <= 0:
        raise ValueError("rates must be positive")
    k_mean = 0.5 * (k1 + k2) if mean_rate is None else float(mean_rate)
    if k_mean <= 0:
        raise ValueError("mean rate must be positive")
    phase = frequency_split / k_mean
    weak = ModeVector.from_amplitudes(
        [np.sqrt(k2), -np.sqrt(k1) * np.exp(-1j * phase)]
    )
    strong = ModeVector.from_amplitudes(
        [np.sqrt(k1), np.sqrt(k2) * np.exp(1j * phase)]
    )
    return weak, strong


@dataclass(frozen=True)
class PredictedRates:
    weak: float
    strong: float


def predicted_rates(k1: float, k2: float, rate_gap: float) -> PredictedRates:
    """Amplitude decay constants of the weak and strong decoherence modes."""
    if k1 < 0 or k2 < 0 or rate_gap < 0:
        raise ValueError("rates and rate gap must be non-negative")
    weak = 2.0 * rate_gap * math.sqrt(k1 * k2) / (k1 + k2)
    strong = k1 + k2
    return PredictedRates(weak=weak, strong=strong)


@dataclass(frozen=True)
class CauchySchwarzResult:
    physical: bool
    slack: float


def cauchy_schwarz_check(model: RateModel) -> CauchySchwarzResult:
    """Complete-positivity bound on the cross rate: |k3|^2 <= k1 k2."""
    if model.num_oscillators < 2:
        raise ValueError("cross-rate bound needs two oscillators")
    slack = model.k1 * model.k2 - abs(model.cross_rate) ** 2
    return CauchySchwarzResult(physical=slack >= -1e-12, slack=float(slack))
