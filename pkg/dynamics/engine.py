from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import math

import numpy as np
from tqdm import tqdm

from dynamics.drift import DriftSpec, drift_vector
from ensemble.configuration import PointConfiguration
from specfun.laguerre import check_order
from utils.errors import DomainError, IntegratorBlowupError, SingularDriftError
from utils.tools import stream


SCHEMES = ("euler-maruyama-adaptive", "tamed-euler")


@dataclass(frozen=True)
class IntegratorConfig:
	"""
	Step control of the adaptive integrators.

	A step of size dt from x is accepted only if dt <= safety * min(gap^2, x_1^2)
	at x and the proposal keeps every moving particle above `origin_floor` and
	every gap above `collision_floor`; otherwise dt is halved down to `dt_min`.
	Brownian increments are drawn once per `noise_step` (default dt_max) and
	refined by Brownian bridges, so the driving path does not depend on dt_max
	as long as noise_step / dt_max is a power of two.
	"""
	dt_max: float = 1e-3
	dt_min: float = 1e-16
	safety: float = 0.1
	origin_floor: float = 1e-8
	collision_floor: float = 1e-10
	scheme: str = "euler-maruyama-adaptive"
	noise_step: Optional[float] = None

	def __post_init__(self):
		if not 0 < self.dt_min <= self.dt_max:
			raise DomainError(f"need 0 < dt_min <= dt_max, got dt_min={self.dt_min}, dt_max={self.dt_max}")
		if not 0 < self.safety < 1:
			raise DomainError(f"safety must lie in (0, 1), got {self.safety}")
		if not (self.origin_floor > 0 and self.collision_floor > 0):
			raise DomainError("origin_floor and collision_floor must be positive")
		if self.scheme not in SCHEMES:
			raise DomainError(f"Unknown scheme: {self.scheme}")
		noise = self.dt_max if self.noise_step is None else float(self.noise_step)
		levels = math.log2(noise / self.dt_max)
		if levels < -1e-9 or abs(levels - round(levels)) > 1e-9:
			raise DomainError(f"noise_step / dt_max must be a power of two, got {noise / self.dt_max}")
		object.__setattr__(self, "noise_step", noise)


@dataclass
class Telemetry:
	steps: int = 0
	rejected: int = 0
	min_gap: float = np.inf
	min_origin: float = np.inf
	smallest_dt: float = np.inf

	def observe(self, x: np.ndarray, active: int):
		gaps = np.diff(x)[:active]
		if gaps.size:
			self.min_gap = min(self.min_gap, float(gaps.min()))
		self.min_origin = min(self.min_origin, float(x[0]))

	def merge(self, other: "Telemetry") -> "Telemetry":
		return Telemetry(self.steps + other.steps, self.rejected + other.rejected,
						 min(self.min_gap, other.min_gap), min(self.min_origin, other.min_origin),
						 min(self.smallest_dt, other.smallest_dt))

	def to_dict(self) -> Dict[str, float]:
		return {"steps": self.steps, "rejected": self.rejected, "min_gap": self.min_gap,
				"min_origin": self.min_origin, "smallest_dt": self.smallest_dt}


@dataclass
class TrajectoryBundle:
	"""Recorded frames of one trajectory; states[k] is the ordered configuration at times[k]."""
	times: np.ndarray
	states: np.ndarray
	telemetry: Telemetry
	alpha: float
	config: IntegratorConfig = field(default_factory=IntegratorConfig)

	def __post_init__(self):
		self.times = np.asarray(self.times, dtype=float)
		self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
		if self.times.size != self.states.shape[0]:
			raise ValueError(f"{self.times.size} times for {self.states.shape[0]} states")
		if np.any(np.diff(self.times) <= 0):
			raise ValueError("trajectory times must be strictly increasing")
		if np.any(np.diff(self.states, axis=1) <= 0):
			raise ValueError("trajectory states must be strictly ordered")

	@property
	def N(self) -> int:
		return self.states.shape[1]

	@property
	def final(self) -> PointConfiguration:
		return PointConfiguration(self.states[-1])

	def configurations(self) -> List[PointConfiguration]:
		return [PointConfiguration(s) for s in self.states]


class AdaptiveEulerMaruyama:
	def __init__(self, spec: DriftSpec, cfg: IntegratorConfig):
		self.spec = spec
		self.cfg = cfg

	def increment(self, b: np.ndarray, dt: float) -> np.ndarray:
		return b * dt

	def admissible(self, x: np.ndarray, active: int) -> float:
		scales = np.concatenate([x[:1], np.diff(x)[:active]])
		return self.cfg.safety * float(np.min(scales)) ** 2

	def acceptable(self, x: np.ndarray, active: int) -> bool:
		if not np.all(np.isfinite(x[:active])) or np.any(x[:active] <= self.cfg.origin_floor):
			return False
		gaps = np.diff(x)[:active]
		return not np.any(gaps <= self.cfg.collision_floor)

	def bridge(self, seed: int, key: Tuple[int, ...], macro: int, depth: int, pos: int,
			   dt: float, dw: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
		# split the increment over [0, dt] at dt/2, the normal keyed by tree position
		z = stream(seed, *key, 1, macro, depth, pos).standard_normal(dw.size)
		first = 0.5 * dw + 0.5 * math.sqrt(dt) * z
		return first, dw - first

	def advance(self, x: np.ndarray, h: float, dw: np.ndarray, seed: int, key: Tuple[int, ...],
				macro: int, telemetry: Telemetry, time: float) -> np.ndarray:
		"""Integrate over one noise interval of length h with increment dw."""
		active = dw.size
		stack = [(0, 0, h, dw)]
		while stack:
			depth, pos, dt, inc = stack.pop()
			if dt <= self.cfg.dt_max * (1.0 + 1e-9):
				if dt <= self.admissible(x, active):
					b = drift_vector(self.spec, x, self.cfg.origin_floor, self.cfg.collision_floor)
					proposal = x.copy()
					proposal[:active] += self.increment(b, dt) + inc
					if self.acceptable(proposal, active):
						x = proposal
						time += dt
						telemetry.steps += 1
						telemetry.smallest_dt = min(telemetry.smallest_dt, dt)
						telemetry.observe(x, active)
						continue
				telemetry.rejected += 1
				if 0.5 * dt < self.cfg.dt_min:
					raise IntegratorBlowupError(
						f"no acceptable step above dt_min={self.cfg.dt_min:.1e} at t={time:.6g}",
						telemetry=telemetry.to_dict(), time=time)
			first, second = self.bridge(seed, key, macro, depth, pos, dt, inc)
			stack.append((depth + 1, 2 * pos + 1, 0.5 * dt, second))
			stack.append((depth + 1, 2 * pos, 0.5 * dt, first))
		return x

	def run(self, initial, T: float, seed: int, key: Tuple[int, ...] = (), save_every: int = 1,
			progress: bool = False) -> TrajectoryBundle:
		x = np.array(getattr(initial, "points", initial), dtype=float)
		if self.spec.mode == "finite-n" and x.size != self.spec.N:
			raise DomainError(f"finite-n drift for N={self.spec.N} applied to {x.size} particles")
		if x[0] <= 0 or np.any(np.diff(x) <= 0):
			raise DomainError("initial configuration must be positive and strictly increasing")
		if T < 0:
			raise DomainError(f"horizon T must be nonnegative, got {T}")
		active = self.spec.active(x.size)
		try:
			drift_vector(self.spec, x, self.cfg.origin_floor, self.cfg.collision_floor)
		except SingularDriftError as err:
			raise DomainError(f"initial configuration violates the integrator floors: {err}") from err

		h = self.cfg.noise_step
		n_macro = int(math.ceil(T / h - 1e-9)) if T > 0 else 0
		lengths = np.full(n_macro, h)
		if n_macro:
			lengths[-1] = T - (n_macro - 1) * h
		noise = stream(seed, *key, 0).standard_normal((n_macro, active)) * np.sqrt(lengths)[:, None]

		telemetry = Telemetry()
		telemetry.observe(x, active)
		times, states = [0.0], [x.copy()]
		with tqdm(range(n_macro), dynamic_ncols=True, colour="#ff924a", disable=not progress) as data:
			for m in data:
				x = self.advance(x, lengths[m], noise[m], seed, key, m, telemetry, m * h)
				if (m + 1) % save_every == 0 or m == n_macro - 1:
					times.append(min((m + 1) * h, T))
					states.append(x.copy())
				data.set_description(f"evolve {self.spec.mode}")
				data.set_postfix(rejected=telemetry.rejected, min_gap=telemetry.min_gap)
		return TrajectoryBundle(np.array(times), np.array(states), telemetry, self.spec.alpha, self.cfg)


class TamedEuler(AdaptiveEulerMaruyama):
	"""Drift increment b dt / (1 + dt |b|), same step control."""

	def increment(self, b: np.ndarray, dt: float) -> np.ndarray:
		return b * dt / (1.0 + dt * np.abs(b))


def create_integrator(spec: DriftSpec, cfg: IntegratorConfig) -> AdaptiveEulerMaruyama:
	if cfg.scheme == "tamed-euler":
		return TamedEuler(spec, cfg)
	return AdaptiveEulerMaruyama(spec, cfg)


def evolve(initial, spec: DriftSpec, cfg: IntegratorConfig, T: float, seed: int, key: Tuple[int, ...] = (),
		   save_every: int = 1, progress: bool = False) -> TrajectoryBundle:
	"""
	Integrate the particle SDE dX^i = dB^i + drift_i(X) dt from `initial` up to time T.

	Non-hitting of the origin needs alpha >= 1; collisions and origin hits are
	integration failures, never reflections.

	Raises:
		IntegratorBlowupError: dt_min reached without an acceptable step.
	"""
	check_order(spec.alpha, non_hitting=True)
	return create_integrator(spec, cfg).run(initial, T, seed, key, save_every, progress)
