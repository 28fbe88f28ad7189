"""Optical preparation chains for single photons.

A photon is a superposition of (polarization, arrival-time offset)
components.  Each arm of the experiment starts from |H> at t = 0 and passes
through a list of elements:

* ``HWP(theta)``  -- R(theta) diag(1, -1) R(theta)^T
  = [[cos 2t, sin 2t], [sin 2t, -cos 2t]]
* ``QWP(theta)``  -- R(theta) diag(1, -i) R(theta)^T
* ``LCPhase(phi)`` -- diag(1, e^{i phi}); the liquid-crystal axis is
  horizontal, so the phase lands on V.  ``LCPhase.slot()`` marks the element
  whose phase is drawn from the recipe's phase distribution on every trial.
* ``BirefringentDelay(axis, tau)`` -- adds ``tau`` ps to the arrival time of
  every component polarized along ``axis``.

Under the diag(1, e^{i phi}) convention a pi/2 phase turns |+> into
(|H> + i|V>)/sqrt(2), the mirror image of |R>.  Purities only depend on
|rho_01| so this choice never changes a purity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .quantum import DensityMatrix

TIME_DECIMALS = 9  # time offsets closer than 1e-9 ps are the same bin


class Pol(str, enum.Enum):
    H = "H"
    V = "V"


def _pol(p) -> Pol:
    return p if isinstance(p, Pol) else Pol(str(p).upper())


def _tkey(t: float) -> float:
    return round(float(t), TIME_DECIMALS) + 0.0


@dataclass(frozen=True)
class Component:
    amplitude: complex
    pol: Pol
    time: float = 0.0


@dataclass(frozen=True)
class PhotonState:
    components: tuple[Component, ...]

    def __post_init__(self):
        merged: dict[tuple[Pol, float], complex] = {}
        for c in self.components:
            key = (_pol(c.pol), _tkey(c.time))
            merged[key] = merged.get(key, 0j) + complex(c.amplitude)
        comps = tuple(Component(a, p, t) for (p, t), a in sorted(merged.items()) if a != 0)
        norm = np.sqrt(sum(abs(c.amplitude) ** 2 for c in comps))
        if norm == 0:
            raise ValueError("photon state has zero norm")
        comps = tuple(Component(c.amplitude / norm, c.pol, c.time) for c in comps)
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_amplitudes(cls, h: complex, v: complex, time: float = 0.0) -> "PhotonState":
        return cls((Component(h, Pol.H, time), Component(v, Pol.V, time)))

    @classmethod
    def horizontal(cls) -> "PhotonState":
        return cls((Component(1.0, Pol.H, 0.0),))

    def amplitude(self, pol, time: float = 0.0) -> complex:
        key = (_pol(pol), _tkey(time))
        for c in self.components:
            if (c.pol, c.time) == key:
                return c.amplitude
        return 0j

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(c.amplitude) ** 2 for c in self.components)))

    def shifted(self, delta: float) -> "PhotonState":
        return PhotonState(tuple(Component(c.amplitude, c.pol, c.time + delta)
                                 for c in self.components))

    def polarization_matrix(self, coherence_time: float | None = None) -> np.ndarray:
        """Reduced polarization density matrix, tracing out arrival time.

        With ``coherence_time=None`` distinct time bins are orthogonal;
        otherwise bins overlap by exp(-dt^2 / (2 tau_c^2)).
        """
        rho = np.zeros((2, 2), dtype=np.complex128)
        idx = {Pol.H: 0, Pol.V: 1}
        for ci in self.components:
            for cj in self.components:
                w = time_overlap(ci.time - cj.time, coherence_time)
                rho[idx[ci.pol], idx[cj.pol]] += ci.amplitude * np.conj(cj.amplitude) * w
        return rho


def time_overlap(dt, coherence_time: float | None):
    """Overlap of two wavepackets offset by ``dt`` ps (1 at dt = 0)."""
    dt = np.asarray(dt, dtype=float)
    if coherence_time is None:
        out = (np.round(dt, TIME_DECIMALS) == 0).astype(float)
    else:
        out = np.exp(-dt ** 2 / (2.0 * coherence_time ** 2))
    return out if out.ndim else float(out)


# --- elements ---------------------------------------------------------------

def _rot(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


@dataclass(frozen=True)
class HWP:
    theta: float

    def jones(self) -> np.ndarray:
        c, s = np.cos(2 * self.theta), np.sin(2 * self.theta)
        return np.array([[c, s], [s, -c]], dtype=np.complex128)


@dataclass(frozen=True)
class QWP:
    theta: float

    def jones(self) -> np.ndarray:
        r = _rot(self.theta)
        return r @ np.diag([1.0, -1j]) @ r.T


@dataclass(frozen=True)
class LCPhase:
    phi: float = 0.0
    random: bool = False

    @classmethod
    def slot(cls) -> "LCPhase":
        return cls(0.0, random=True)

    def jones(self, phi: float | None = None) -> np.ndarray:
        phi = self.phi if phi is None else phi
        return np.diag([1.0, np.exp(1j * phi)]).astype(np.complex128)


@dataclass(frozen=True)
class BirefringentDelay:
    axis: Pol
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "axis", _pol(self.axis))


Element = Union[HWP, QWP, LCPhase, BirefringentDelay]


def apply_element(photon: PhotonState, e: Element, phi: float | None = None) -> PhotonState:
    """Send one photon through one element.

    ``phi`` overrides the phase of an ``LCPhase``; it is how a sampled phase
    reaches a random slot.
    """
    if isinstance(e, BirefringentDelay):
        return PhotonState(tuple(
            Component(c.amplitude, c.pol, c.time + e.tau if c.pol == e.axis else c.time)
            for c in photon.components))
    jones = e.jones(phi) if isinstance(e, LCPhase) else e.jones()
    out = []
    for t in sorted({c.time for c in photon.components}):
        h, v = photon.amplitude(Pol.H, t), photon.amplitude(Pol.V, t)
        out.append(Component(jones[0, 0] * h + jones[0, 1] * v, Pol.H, t))
        out.append(Component(jones[1, 0] * h + jones[1, 1] * v, Pol.V, t))
    return PhotonState(tuple(out))


def random_slots(arm: Sequence[Element]) -> int:
    return sum(1 for e in arm if isinstance(e, LCPhase) and e.random)


def prepare(arm: Sequence[Element], phases: Sequence[float] = ()) -> PhotonState:
    """Run a fresh |H> photon through ``arm`` filling random slots from ``phases``."""
    if len(phases) != random_slots(arm):
        raise ValueError(f"arm has {random_slots(arm)} random slots, got {len(phases)} phases")
    photon = PhotonState.horizontal()
    it = iter(phases)
    for e in arm:
        phi = next(it) if isinstance(e, LCPhase) and e.random else None
        photon = apply_element(photon, e, phi)
    return photon


# --- batched propagation ------------------------------------------------------

def propagate(arm: Sequence[Element], phases: np.ndarray) -> tuple[list[tuple[Pol, float]], np.ndarray]:
    """Vectorized ``prepare`` over a batch of phase draws.

    ``phases`` has shape (n, slots).  Returns the sorted component keys and
    an (n, len(keys)) amplitude array.
    """
    phases = np.asarray(phases, dtype=float)
    if phases.ndim != 2 or phases.shape[1] != random_slots(arm):
        raise ValueError(f"phases must have shape (n, {random_slots(arm)}), got {phases.shape}")
    n = phases.shape[0]
    state: dict[tuple[Pol, float], np.ndarray] = {(Pol.H, 0.0): np.ones(n, dtype=np.complex128)}
    slot = 0
    for e in arm:
        if isinstance(e, BirefringentDelay):
            moved: dict[tuple[Pol, float], np.ndarray] = {}
            for (p, t), amp in state.items():
                key = (p, _tkey(t + e.tau)) if p == e.axis else (p, t)
                moved[key] = moved.get(key, 0) + amp
            state = moved
            continue
        if isinstance(e, LCPhase) and e.random:
            factor = np.exp(1j * phases[:, slot])
            slot += 1
            state = {(p, t): amp * factor if p == Pol.V else amp for (p, t), amp in state.items()}
            continue
        jones = e.jones()
        zero = np.zeros(n, dtype=np.complex128)
        new: dict[tuple[Pol, float], np.ndarray] = {}
        for t in {t for _, t in state}:
            h, v = state.get((Pol.H, t), zero), state.get((Pol.V, t), zero)
            new[(Pol.H, t)] = jones[0, 0] * h + jones[0, 1] * v
            new[(Pol.V, t)] = jones[1, 0] * h + jones[1, 1] * v
        state = new
    keys = sorted(state)
    return keys, np.stack([state[k] for k in keys], axis=1)


# --- phase distributions -----------------------------------------------------

@dataclass(frozen=True)
class Discrete:
    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        atoms = tuple((float(p), float(w)) for p, w in self.atoms)
        if not atoms:
            raise ValueError("discrete distribution needs at least one atom")
        if any(w <= 0 for _, w in atoms):
            raise ValueError("discrete weights must be positive")
        if abs(sum(w for _, w in atoms) - 1.0) > 1e-12:
            raise ValueError("discrete weights must sum to 1")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def uniform(cls, phases: Sequence[float]) -> "Discrete":
        # largest weight absorbs the rounding so the sum is exactly 1
        n = len(phases)
        w = [1.0 / n] * n
        w[-1] = 1.0 - sum(w[:-1])
        return cls(tuple(zip(phases, w)))

    def nodes(self, quad_points: int = 256) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([p for p, _ in self.atoms]), np.array([w for _, w in self.atoms]))

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        phis, w = self.nodes()
        return phis[rng.choice(len(phis), size=size, p=w)]

    def mean_phase_factor(self) -> complex:
        return complex(sum(w * np.exp(1j * p) for p, w in self.atoms))


@dataclass(frozen=True)
class UniformInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("uniform interval needs lo < hi")

    def nodes(self, quad_points: int = 256) -> tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes and weights (summing to 1) on [lo, hi]."""
        x, w = np.polynomial.legendre.leggauss(quad_points)
        half = (self.hi - self.lo) / 2
        return self.lo + half * (x + 1), w / 2

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=size)

    def mean_phase_factor(self) -> complex:
        """(1 / (hi - lo)) * integral of e^{i phi} over [lo, hi]."""
        return complex((np.exp(1j * self.hi) - np.exp(1j * self.lo)) / (1j * (self.hi - self.lo)))


PhaseDistribution = Union[Discrete, UniformInterval]

DETERMINISTIC = Discrete(((0.0, 1.0),))


class Correlation(str, enum.Enum):
    INDEPENDENT = "independent"
    CORRELATED = "correlated"


@dataclass(frozen=True)
class PairRecipe:
    arm_a: tuple[Element, ...]
    arm_b: tuple[Element, ...]
    phase_dist: PhaseDistribution = DETERMINISTIC
    correlation: Correlation = Correlation.INDEPENDENT

    def __post_init__(self):
        object.__setattr__(self, "arm_a", tuple(self.arm_a))
        object.__setattr__(self, "arm_b", tuple(self.arm_b))
        object.__setattr__(self, "correlation", Correlation(self.correlation))
        if random_slots(self.arm_a) != random_slots(self.arm_b):
            raise ValueError("both arms must have the same number of random phase slots")

    @property
    def slots(self) -> int:
        return random_slots(self.arm_a)

    @classmethod
    def symmetric(cls, arm: Sequence[Element], phase_dist: PhaseDistribution = DETERMINISTIC,
                  correlation: Correlation = Correlation.INDEPENDENT) -> "PairRecipe":
        return cls(tuple(arm), tuple(arm), phase_dist, correlation)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def draw_phases(recipe: PairRecipe, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Phase draws of shape (n, slots) for arm a and arm b."""
    pa = recipe.phase_dist.sample(rng, (n, recipe.slots))
    if recipe.correlation is Correlation.CORRELATED:
        return pa, pa
    return pa, recipe.phase_dist.sample(rng, (n, recipe.slots))


def sample_pair(recipe: PairRecipe, seed) -> tuple[PhotonState, PhotonState]:
    """Draw one trial's photon pair.  ``seed`` is an int or a ``Generator``."""
    pa, pb = draw_phases(recipe, _rng(seed), 1)
    return prepare(recipe.arm_a, pa[0]), prepare(recipe.arm_b, pb[0])


# --- ensemble ------------------------------------------------------------------

def ensemble_density_matrix(arm: Sequence[Element], phase_dist: PhaseDistribution = DETERMINISTIC,
                            coherence_time: float | None = None) -> DensityMatrix:
    """Polarization state of one arm averaged over its random phases.

    The arm is propagated as an operator over (polarization, time) bins.  A
    random slot multiplies the H-V coherences by the distribution's mean
    phase factor (its conjugate on the other side), which handles discrete
    mixtures and the uniform interval in closed form.  Time is traced out
    at the end with :func:`time_overlap`.
    """
    keys = [(Pol.H, 0.0)]
    op = np.ones((1, 1), dtype=np.complex128)
    for e in arm:
        if isinstance(e, BirefringentDelay):
            new_keys = [(p, _tkey(t + e.tau)) if p == e.axis else (p, t) for p, t in keys]
            keys, op = _regroup(new_keys, op)
        elif isinstance(e, LCPhase) and e.random:
            c = phase_dist.mean_phase_factor()
            is_v = np.array([p == Pol.V for p, _ in keys])
            factor = np.ones(op.shape, dtype=np.complex128)
            factor[np.ix_(is_v, ~is_v)] = c
            factor[np.ix_(~is_v, is_v)] = np.conj(c)
            op = op * factor
        else:
            times = sorted({t for _, t in keys})
            full = [(p, t) for t in times for p in (Pol.H, Pol.V)]
            keys, op = _embed(keys, op, full)
            u = np.kron(np.eye(len(times)), e.jones())
            op = u @ op @ u.conj().T
    rho = np.zeros((2, 2), dtype=np.complex128)
    idx = {Pol.H: 0, Pol.V: 1}
    for a, (pa, ta) in enumerate(keys):
        for b, (pb, tb) in enumerate(keys):
            rho[idx[pa], idx[pb]] += op[a, b] * time_overlap(ta - tb, coherence_time)
    return DensityMatrix((rho + rho.conj().T) / 2)


def _embed(keys, op, full):
    pos = {k: i for i, k in enumerate(full)}
    out = np.zeros((len(full), len(full)), dtype=np.complex128)
    sel = [pos[k] for k in keys]
    out[np.ix_(sel, sel)] = op
    return full, out


def _regroup(keys, op):
    """Merge keys that now coincide (after a delay) by summing amplitudes."""
    uniq = sorted(set(keys))
    pos = {k: i for i, k in enumerate(uniq)}
    m = np.zeros((len(uniq), len(keys)), dtype=np.complex128)
    for j, k in enumerate(keys):
        m[pos[k], j] = 1.0
    return uniq, m @ op @ m.T


# --- named preparations ----------------------------------------------------------

PREP_PLUS = (HWP(np.pi / 8),)


@dataclass(frozen=True)
class Preparation:
    """A single-arm preparation and its mixing distribution."""

    name: str
    arm: tuple[Element, ...]
    phase_dist: PhaseDistribution = DETERMINISTIC
    label: str = ""

    def recipe(self, correlation: Correlation = Correlation.INDEPENDENT) -> PairRecipe:
        return PairRecipe.symmetric(self.arm, self.phase_dist, correlation)

    def density_matrix(self, coherence_time: float | None = None) -> DensityMatrix:
        return ensemble_density_matrix(self.arm, self.phase_dist, coherence_time)


TABLE1_STATES: tuple[Preparation, ...] = (
    Preparation("H", (), label="|H>"),
    Preparation("plus", PREP_PLUS, label="|+>"),
    Preparation("mix_pm", PREP_PLUS + (LCPhase.slot(),), Discrete.uniform([0.0, np.pi]),
                label="equal mixture |+>, |->"),
    Preparation("mix_pmr", PREP_PLUS + (LCPhase.slot(),),
                Discrete.uniform([0.0, np.pi, np.pi / 2]),
                label="equal mixture |+>, |->, circular"),
    Preparation("continuum", PREP_PLUS + (LCPhase.slot(),), UniformInterval(0.0, np.pi),
                label="|H> + e^{i phi}|V>, phi uniform in [0, pi]"),
)

TABLE1_THEORY = {
    "H": 1.0,
    "plus": 1.0,
    "mix_pm": 0.5,
    "mix_pmr": 5.0 / 9.0,
    "continuum": 0.5 + 2.0 / np.pi ** 2,
}

MIXED_STATES = tuple(p for p in TABLE1_STATES if p.name in ("mix_pm", "mix_pmr", "continuum"))


def get_preparation(name: str) -> Preparation:
    for p in TABLE1_STATES:
        if p.name == name:
            return p
    raise KeyError(name)


def quartz_recipe(tau: float, aligned: bool) -> PairRecipe:
    """Diagonal photons through quartz delays in each arm.

    Anti-aligned crystals delay V in arm a and H in arm b; aligned crystals
    delay V in both.
    """
    arm_a = PREP_PLUS + (BirefringentDelay(Pol.V, tau),)
    arm_b = PREP_PLUS + (BirefringentDelay(Pol.V if aligned else Pol.H, tau),)
    return PairRecipe(arm_a, arm_b)
