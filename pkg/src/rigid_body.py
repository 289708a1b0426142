"""Free rigid body in Cl(3,0,1): inertia on bivectors, Euler equations, RK4.

State is the pose motor g (body to space) and the body velocity bivector
Omega. The equations of motion are

    g'     = g Omega
    Omega' = A^-1 (A(Omega) Omega - Omega A(Omega))  = 2 A^-1 (A(Omega) x Omega)

with x the commutator (XY - YX)/2. A is stored as a symmetric 6x6 matrix M
on bivector coordinates [w01, w02, w03, w23, w31, w12]; the kinetic energy is
w.M.w / 2 and A(Omega) = -J M w / 2 where J swaps the euclidean and ideal
halves (the pairing of the join of two bivectors).

A classical angular velocity w about the origin corresponds to rotational
coordinates -w/2, a linear velocity v to ideal coordinates -v/2.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from src.algebra import PGA3D, Multivector, sandwich
from src.config import Config
from src.errors import IntegrationError, PreconditionError, SingularInertiaError
from src.pga3d import (
    BIVECTOR_INDEX,
    BIVECTOR_SIGN,
    EVEN_INDEX,
    EVEN_SIGN,
    Motor3,
    Point3,
    bivector_coords,
    bivector_from_coords,
    even_coords,
    even_from_coords,
    point3,
)

logger = logging.getLogger(__name__)

# J: w01 <-> w23, w02 <-> w31, w03 <-> w12
J_PAIRING = np.zeros((6, 6))
for _i in range(3):
    J_PAIRING[_i, _i + 3] = 1.0
    J_PAIRING[_i + 3, _i] = 1.0

BIVECTOR_COLUMNS = ["w01", "w02", "w03", "w23", "w31", "w12"]
MOMENTUM_COLUMNS = ["m01", "m02", "m03", "m23", "m31", "m12"]
MOTOR_COLUMNS = [f"g{i}" for i in range(8)]
TRAJECTORY_COLUMNS = ["t"] + MOTOR_COLUMNS + BIVECTOR_COLUMNS + ["energy"] + MOMENTUM_COLUMNS

_PSEUDOSCALAR = PGA3D.pseudoscalar_mask


def angular_velocity_to_bivector(omega: Sequence[float], velocity: Sequence[float] = (0.0, 0.0, 0.0)) -> Multivector:
    """Body velocity bivector for a classical angular velocity about the origin plus a linear velocity."""
    w = np.asarray(omega, dtype=float)
    v = np.asarray(velocity, dtype=float)
    return bivector_from_coords(np.concatenate([-0.5 * v, -0.5 * w]))


def bivector_to_angular_velocity(bivector: Multivector) -> np.ndarray:
    return -2.0 * bivector_coords(bivector)[3:]


def point_velocity(omega: Multivector, p: Point3) -> Multivector:
    """Velocity of a body point, Omega P - P Omega = 2 (Omega x P)."""
    return omega * p.mv - p.mv * omega


class InertiaMap:
    """Inertia on bivector space, with the pseudo-inverse cached for the velocity map."""

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (6, 6):
            raise PreconditionError(f"Inertia matrix must be 6x6, got {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise PreconditionError("Inertia matrix has non-finite entries")
        self.matrix = 0.5 * (matrix + matrix.T)
        self.matrix.setflags(write=False)
        self._pinv = np.linalg.pinv(self.matrix)
        self.rank = int(np.linalg.matrix_rank(self.matrix))

    def __repr__(self) -> str:
        return f"InertiaMap(rank={self.rank}, diag={np.round(np.diag(self.matrix), 6).tolist()})"

    @property
    def is_invertible(self) -> bool:
        return self.rank == 6

    def momentum_coords(self, omega: np.ndarray) -> np.ndarray:
        return -0.5 * J_PAIRING @ (self.matrix @ omega)

    def velocity_coords(self, momentum: np.ndarray) -> np.ndarray:
        return -2.0 * self._pinv @ (J_PAIRING @ momentum)

    def momentum(self, omega: Multivector) -> Multivector:
        """A(Omega) as a bivector."""
        return bivector_from_coords(self.momentum_coords(bivector_coords(omega)))

    def velocity(self, momentum: Multivector) -> Multivector:
        """A^-1 of a momentum bivector."""
        return bivector_from_coords(self.velocity_coords(bivector_coords(momentum)))

    def energy(self, omega: Multivector) -> float:
        w = bivector_coords(omega)
        return 0.5 * float(w @ self.matrix @ w)

    def scaled(self, factor: float) -> "InertiaMap":
        return InertiaMap(self.matrix * factor)


def inertia_from_point_masses(particles: Sequence[Tuple[float, Union[Point3, Sequence[float]]]]) -> InertiaMap:
    """Assemble the inertia map column by column from the momentum of point masses.

    Each particle at P moving under Omega has velocity Omega P - P Omega and
    contributes m (P v P') to the momentum.

    Args:
        particles: (mass, position) pairs, positions as Point3 or xyz triples

    Returns:
        InertiaMap; rank-deficient bodies get a warning and use the pseudo-inverse
    """
    if not particles:
        raise PreconditionError("At least one particle is required")
    masses = np.array([float(m) for m, _ in particles])
    if np.any(masses < 0.0):
        raise PreconditionError("Particle masses must be non-negative")
    if masses.sum() <= 0.0:
        raise PreconditionError("Total mass must be positive")

    points = [p if isinstance(p, Point3) else point3(*p) for _, p in particles]
    raw = np.zeros((6, 6))
    for column in range(6):
        unit = np.zeros(6)
        unit[column] = 1.0
        omega = bivector_from_coords(unit)
        total = PGA3D.zero()
        for mass, p in zip(masses, points):
            if mass == 0.0:
                continue
            total = total + mass * (p.mv & point_velocity(omega, p))
        raw[:, column] = bivector_coords(total)

    inertia = InertiaMap(-2.0 * J_PAIRING @ raw)
    if not inertia.is_invertible:
        logger.warning(f"Inertia map has rank {inertia.rank} < 6; using the pseudo-inverse")
    return inertia


def octahedral_body(mass: float = 1.0, radius: float = 1.0) -> List[Tuple[float, Tuple[float, float, float]]]:
    """Six equal masses at +-radius on each axis."""
    particles = []
    for axis in range(3):
        for sign in (1.0, -1.0):
            xyz = [0.0, 0.0, 0.0]
            xyz[axis] = sign * radius
            particles.append((mass, tuple(xyz)))
    return particles


def asymmetric_body() -> List[Tuple[float, Tuple[float, float, float]]]:
    """Masses 1, 2, 3 in pairs on the x, y, z axes; principal moments 10, 8, 6."""
    particles = []
    for axis, mass in enumerate((1.0, 2.0, 3.0)):
        for sign in (1.0, -1.0):
            xyz = [0.0, 0.0, 0.0]
            xyz[axis] = sign
            particles.append((mass, tuple(xyz)))
    return particles


BODIES = {
    "octahedral": octahedral_body,
    "asymmetric": asymmetric_body,
}


@dataclass(frozen=True)
class RigidBodyState:
    g: Motor3
    omega: Multivector

    @classmethod
    def at_rest(cls) -> "RigidBodyState":
        return cls(Motor3(PGA3D.scalar(1.0)), PGA3D.zero())

    def flat(self) -> np.ndarray:
        """14 coordinates: 8 of the even motor, then 6 of the velocity bivector."""
        return np.concatenate([even_coords(self.g.mv), bivector_coords(self.omega)])

    @classmethod
    def from_flat(cls, y: np.ndarray) -> "RigidBodyState":
        return cls(Motor3(even_from_coords(y[:8])), bivector_from_coords(y[8:]))


def euler_derivative(state: RigidBodyState, inertia: InertiaMap) -> Tuple[Multivector, Multivector]:
    """(g', Omega') from the Euler equations with the commutator (XY - YX)/2."""
    if inertia.rank < 3:
        raise SingularInertiaError(f"Inertia map of rank {inertia.rank} cannot drive rotations")
    momentum = inertia.momentum(state.omega)
    g_dot = state.g.mv * state.omega
    bracket = (momentum * state.omega - state.omega * momentum).grade_part(2)
    return g_dot, inertia.velocity(bracket)


def energy(state: RigidBodyState, inertia: InertiaMap) -> float:
    return inertia.energy(state.omega)


def momentum_space(state: RigidBodyState, inertia: InertiaMap) -> Multivector:
    """Body momentum carried to the space frame, g A(Omega) ~g."""
    return sandwich(state.g.mv, inertia.momentum(state.omega))


def space_point_velocity(state: RigidBodyState, body_point: Point3) -> Multivector:
    """Velocity of a body point seen in space, g (Omega P - P Omega) ~g."""
    return sandwich(state.g.mv, point_velocity(state.omega, body_point))


class _FlatSystem:
    """The coupled equations on raw 14-vectors, avoiding wrapper objects in the inner loop."""

    def __init__(self, inertia: InertiaMap):
        self.inertia = inertia
        self.n = PGA3D.blade_count

    def _even(self, y8: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n)
        out[EVEN_INDEX] = EVEN_SIGN * y8
        return out

    def _bivector(self, y6: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n)
        out[BIVECTOR_INDEX] = BIVECTOR_SIGN * y6
        return out

    def derivative(self, y: np.ndarray) -> np.ndarray:
        g = self._even(y[:8])
        w = self._bivector(y[8:])
        m = self._bivector(self.inertia.momentum_coords(y[8:]))
        g_dot = PGA3D.product_array(g, w)
        bracket = PGA3D.product_array(m, w) - PGA3D.product_array(w, m)
        w_dot = self.inertia.velocity_coords(BIVECTOR_SIGN * bracket[BIVECTOR_INDEX])
        return np.concatenate([EVEN_SIGN * g_dot[EVEN_INDEX], w_dot])

    def renormalize(self, y: np.ndarray) -> np.ndarray:
        g = self._even(y[:8])
        square = PGA3D.product_array(g, g * PGA3D._reverse_sign)
        a = square[0]
        if not a > 0.0:
            raise IntegrationError(f"Motor lost its norm (g ~g = {a!r})")
        b = square[_PSEUDOSCALAR]
        correction = np.zeros(self.n)
        correction[0] = 1.0 / math.sqrt(a)
        correction[_PSEUDOSCALAR] = -b / (2.0 * a * math.sqrt(a))
        g = PGA3D.product_array(g, correction)
        out = y.copy()
        out[:8] = EVEN_SIGN * g[EVEN_INDEX]
        return out

    def step(self, y: np.ndarray, dt: float) -> np.ndarray:
        k1 = self.derivative(y)
        k2 = self.derivative(y + 0.5 * dt * k1)
        k3 = self.derivative(y + 0.5 * dt * k2)
        k4 = self.derivative(y + dt * k3)
        y_next = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y_next)):
            raise IntegrationError(f"Non-finite state after RK4 step: {y_next.tolist()}")
        return self.renormalize(y_next)


def step_rk4(state: RigidBodyState, inertia: InertiaMap, dt: float) -> RigidBodyState:
    """One classical RK4 step followed by exact renormalization of g."""
    if not dt > 0.0:
        raise PreconditionError(f"dt must be positive, got {dt}")
    system = _FlatSystem(inertia)
    return RigidBodyState.from_flat(system.step(state.flat(), dt))


@dataclass
class Trajectory:
    """Sampled states with energy and space-frame momentum per sample."""

    rows: List[List[float]] = field(default_factory=list)
    metadata: Dict = field(default_factory=dict)

    columns = TRAJECTORY_COLUMNS

    def append(self, t: float, y: np.ndarray, inertia: InertiaMap):
        if self.rows and not t > self.rows[-1][0]:
            raise PreconditionError(f"Trajectory times must increase strictly, got {t} after {self.rows[-1][0]}")
        state = RigidBodyState.from_flat(y)
        row = [float(t)] + [float(v) for v in y]
        row.append(energy(state, inertia))
        row.extend(float(v) for v in bivector_coords(momentum_space(state, inertia)))
        self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def times(self) -> np.ndarray:
        return np.array([row[0] for row in self.rows])

    def states(self) -> List[RigidBodyState]:
        return [RigidBodyState.from_flat(np.array(row[1:15])) for row in self.rows]

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=self.columns)

    def summary(self) -> Dict[str, float]:
        """Conservation diagnostics over the recorded samples."""
        df = self.to_dataframe()
        e0 = df["energy"].iloc[0]
        energy_drift = (df["energy"] - e0).abs().max()
        momentum = df[MOMENTUM_COLUMNS].to_numpy()
        momentum_drift = np.max(np.abs(momentum - momentum[0]), axis=0) if len(df) else np.zeros(6)
        rotor_error = 0.0
        for state in self.states():
            square = state.g.mv * state.g.mv.reverse()
            rotor_error = max(rotor_error, square.max_abs_diff(1.0))
        return {
            "samples": int(len(df)),
            "initial_energy": float(e0),
            "max_energy_drift": float(energy_drift),
            "max_relative_energy_drift": float(energy_drift / abs(e0)) if e0 != 0 else float(energy_drift),
            "max_momentum_drift": float(np.max(momentum_drift)),
            "momentum_drift": {name: float(v) for name, v in zip(MOMENTUM_COLUMNS, momentum_drift)},
            "max_rotor_error": float(rotor_error),
        }

    def to_csv(self, path: str) -> str:
        self.to_dataframe().to_csv(path, index=False, float_format="%.17g")
        logger.info(f"Trajectory with {len(self)} samples written to {path}")
        return path

    def to_json(self, path: Optional[str] = None) -> str:
        text = json.dumps({"metadata": self.metadata, "columns": self.columns, "rows": self.rows}, indent=1)
        if path is not None:
            with open(path, "w") as f:
                f.write(text)
            logger.info(f"Trajectory with {len(self)} samples written to {path}")
        return text

    @classmethod
    def from_json(cls, text: str) -> "Trajectory":
        data = json.loads(text)
        if data.get("columns") != TRAJECTORY_COLUMNS:
            raise PreconditionError("Trajectory JSON has unexpected columns")
        return cls(rows=[list(map(float, row)) for row in data["rows"]], metadata=data.get("metadata", {}))


def simulate(
    state0: RigidBodyState,
    inertia: InertiaMap,
    dt: float,
    n_steps: int,
    record_every: int = 1,
    progress: bool = False,
) -> Trajectory:
    """Integrate the free top with fixed-step RK4.

    Args:
        state0: Initial pose and body velocity
        inertia: Inertia map of the body
        dt: Step size in seconds
        n_steps: Number of steps
        record_every: Keep every n-th step (the first and last are always kept)
        progress: Show a tqdm progress bar

    Returns:
        Trajectory of the recorded samples
    """
    if not dt > 0.0:
        raise PreconditionError(f"dt must be positive, got {dt}")
    if n_steps < 0 or record_every < 1:
        raise PreconditionError("n_steps must be >= 0 and record_every >= 1")
    if inertia.rank < 3:
        raise SingularInertiaError(f"Inertia map of rank {inertia.rank} cannot drive rotations")

    system = _FlatSystem(inertia)
    y = system.renormalize(state0.flat())
    trajectory = Trajectory(metadata={"dt": dt, "n_steps": n_steps, "record_every": record_every})
    trajectory.append(0.0, y, inertia)

    logger.info(f"Integrating {n_steps} RK4 steps at dt={dt}")
    for step in tqdm(range(1, n_steps + 1), desc="Integrating", disable=not progress):
        y = system.step(y, dt)
        if step % record_every == 0 or step == n_steps:
            trajectory.append(step * dt, y, inertia)
    return trajectory
