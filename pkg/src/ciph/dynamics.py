"""Drift dynamics driven by a bracket product, with balance audits.

The state equation is

    dx/dt = gamma(x) * (dS^T J dH) * (J dH)  +  W(x, dH)  +  g(x, dH) u(t)

for a Hamiltonian H (conserved by the drift), an entropy S (produced by the
drift at rate sigma_int = gamma * (dS^T J dH)^2 >= 0), a constant skew J,
and a strictly positive coefficient gamma. W, g and u are optional input
terms with no structural constraints.

Integration is fixed-step classical Runge-Kutta (RK4): deterministic
trajectories matter more here than adaptive efficiency. The audit compares
centered finite differences of H and S along a trajectory against the two
balance equations; the entropy balance is checked in the form
dS/dt = sigma_int + dH^T (W + g u) and, side by side, in the variant with
dS^T (W + g u), without deciding between them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .brackets import BracketMatrix, is_skew
from .errors import (
    DimensionMismatch,
    FormatError,
    NegativeCoefficient,
    NonpositiveGamma,
    TrajectoryTooShort,
)
from .fields import PolynomialField, exp_neg_sum_field, exp_sum_field

SKEW_TOL = 1e-12


@dataclass(frozen=True)
class IphsModel:
    """Bundle defining the dynamics.

    ``H`` and ``S`` are scalar fields (objects with n/value/grad); ``gamma``
    is a scalar field that must stay strictly positive along trajectories
    (checked at every right-hand-side evaluation, not proven symbolically).
    ``W`` maps (x, dH) to an n-vector, ``g`` maps (x, dH) to an n x m matrix,
    ``u`` maps t to an m-vector; each may be None.
    """

    n: int
    H: object
    S: object
    J: BracketMatrix
    gamma: object
    W: Callable | None = None
    g: Callable | None = None
    u: Callable | None = None
    name: str = "custom"

    def __post_init__(self):
        for label, f in (("H", self.H), ("S", self.S), ("gamma", self.gamma)):
            if f.n != self.n:
                raise DimensionMismatch(f"{label} has dimension {f.n}, expected {self.n}")
        if self.J.n != self.n:
            raise DimensionMismatch(f"J has dimension {self.J.n}, expected {self.n}")
        if not is_skew(self.J, SKEW_TOL):
            raise DimensionMismatch("J must be skew-symmetric to within 1e-12")

    def gamma_at(self, x) -> float:
        value = float(self.gamma.value(x))
        if not value > 0.0:
            raise NonpositiveGamma(x, value)
        return value

    def input_term(self, x, dH, t: float) -> np.ndarray:
        """W(x, dH) + g(x, dH) u(t), with missing pieces treated as zero."""
        total = np.zeros(self.n)
        if self.W is not None:
            w = np.asarray(self.W(x, dH), dtype=float)
            if w.shape != (self.n,):
                raise DimensionMismatch(f"W returned shape {w.shape}, expected ({self.n},)")
            total += w
        if self.g is not None and self.u is not None:
            gmat = np.asarray(self.g(x, dH), dtype=float)
            uvec = np.atleast_1d(np.asarray(self.u(t), dtype=float))
            if gmat.ndim != 2 or gmat.shape[0] != self.n or gmat.shape[1] != uvec.shape[0]:
                raise DimensionMismatch(
                    f"g has shape {gmat.shape}, incompatible with u of length {uvec.shape[0]}"
                )
            total += gmat @ uvec
        return total


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution; ``fault`` is None for a clean run, otherwise the
    name of the abort condition and the trajectory is the valid prefix."""

    times: np.ndarray
    states: np.ndarray
    H_values: np.ndarray
    S_values: np.ndarray
    sigma_int: np.ndarray
    fault: str | None = None

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class BalanceReport:
    max_energy_defect: float
    max_entropy_defect: float
    max_entropy_defect_alt: float
    min_sigma_int: float
    energy_scale: float
    entropy_scale: float
    samples: int

    def to_json(self) -> dict:
        return {
            "max_energy_defect": self.max_energy_defect,
            "max_entropy_defect": self.max_entropy_defect,
            "max_entropy_defect_alt": self.max_entropy_defect_alt,
            "min_sigma_int": self.min_sigma_int,
            "energy_scale": self.energy_scale,
            "entropy_scale": self.entropy_scale,
            "samples": self.samples,
        }


def drift_rhs(model: IphsModel, x) -> np.ndarray:
    """gamma(x) * (dS^T J dH) * (J dH); zero wherever dH vanishes."""
    x = np.asarray(x, dtype=float)
    gamma = model.gamma_at(x)
    dH = np.asarray(model.H.grad(x), dtype=float)
    dS = np.asarray(model.S.grad(x), dtype=float)
    JdH = model.J.array @ dH
    return gamma * float(dS @ JdH) * JdH


def full_rhs(model: IphsModel, x, t: float) -> np.ndarray:
    """Drift plus input terms W + g u."""
    x = np.asarray(x, dtype=float)
    rhs = drift_rhs(model, x)
    if model.W is None and (model.g is None or model.u is None):
        return rhs
    dH = np.asarray(model.H.grad(x), dtype=float)
    return rhs + model.input_term(x, dH, t)


def observable_rate(model: IphsModel, f, x) -> float:
    """Rate of change of f along the drift: gamma * (dS^T J dH) * (df^T J dH).

    Identical (up to rounding) to df(x)^T drift_rhs(model, x).
    """
    x = np.asarray(x, dtype=float)
    if f.n != model.n:
        raise DimensionMismatch(f"field has dimension {f.n}, expected {model.n}")
    gamma = model.gamma_at(x)
    dH = np.asarray(model.H.grad(x), dtype=float)
    dS = np.asarray(model.S.grad(x), dtype=float)
    df = np.asarray(f.grad(x), dtype=float)
    JdH = model.J.array @ dH
    return gamma * float(dS @ JdH) * float(df @ JdH)


def _sigma_int(model: IphsModel, x) -> float:
    gamma = model.gamma_at(x)
    dH = np.asarray(model.H.grad(x), dtype=float)
    dS = np.asarray(model.S.grad(x), dtype=float)
    bracket = float(dS @ (model.J.array @ dH))
    return gamma * bracket * bracket


def integrate(model: IphsModel, x0, t_end: float, dt: float = 1e-3) -> Trajectory:
    """Fixed-step RK4 solve of the full dynamics, sampling every step.

    Each sample records H, S, and sigma_int. If gamma fails to be positive
    or the state leaves the finite range mid-run, the trajectory returned is
    the valid prefix with ``fault`` set instead of raising.
    """
    if dt <= 0.0:
        raise DimensionMismatch(f"dt must be > 0, got {dt}")
    if t_end <= 0.0:
        raise DimensionMismatch(f"t_end must be > 0, got {t_end}")
    steps = max(1, int(round(t_end / dt)))
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (model.n,):
        raise DimensionMismatch(f"x0 has shape {x.shape}, expected ({model.n},)")

    times = [0.0]
    states = [x.copy()]
    fault = None
    try:
        H_vals = [float(model.H.value(x))]
        S_vals = [float(model.S.value(x))]
        sig = [_sigma_int(model, x)]
    except NonpositiveGamma:
        return Trajectory(
            np.array([0.0]),
            np.array([x]),
            np.array([float(model.H.value(x))]),
            np.array([float(model.S.value(x))]),
            np.array([0.0]),
            fault="NonpositiveGamma",
        )

    for k in range(steps):
        t = k * dt
        try:
            # Overflow to inf/nan is caught by the finiteness check below.
            with np.errstate(all="ignore"):
                k1 = full_rhs(model, x, t)
                k2 = full_rhs(model, x + 0.5 * dt * k1, t + 0.5 * dt)
                k3 = full_rhs(model, x + 0.5 * dt * k2, t + 0.5 * dt)
                k4 = full_rhs(model, x + dt * k3, t + dt)
                x_next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                sample = None
                if np.all(np.isfinite(x_next)):
                    sample = (
                        float(model.H.value(x_next)),
                        float(model.S.value(x_next)),
                        _sigma_int(model, x_next),
                    )
            if sample is None or not all(np.isfinite(sample)):
                fault = "NonFiniteState"
                break
            x = x_next
        except NonpositiveGamma:
            fault = "NonpositiveGamma"
            break
        times.append((k + 1) * dt)
        states.append(x.copy())
        H_vals.append(sample[0])
        S_vals.append(sample[1])
        sig.append(sample[2])

    return Trajectory(
        np.array(times),
        np.array(states),
        np.array(H_vals),
        np.array(S_vals),
        np.array(sig),
        fault=fault,
    )


def input_power(model: IphsModel, trajectory: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample dH^T (W + g u) and dS^T (W + g u) along a trajectory."""
    m = len(trajectory)
    p = np.zeros(m)
    q = np.zeros(m)
    if model.W is None and (model.g is None or model.u is None):
        return p, q
    for k in range(m):
        x = trajectory.states[k]
        dH = np.asarray(model.H.grad(x), dtype=float)
        dS = np.asarray(model.S.grad(x), dtype=float)
        inp = model.input_term(x, dH, float(trajectory.times[k]))
        p[k] = float(dH @ inp)
        q[k] = float(dS @ inp)
    return p, q


def audit_balances(model: IphsModel, trajectory: Trajectory) -> BalanceReport:
    """Check both balance equations against centered finite differences.

    Energy: dH/dt vs dH^T (W + g u). Entropy: dS/dt vs
    sigma_int + dH^T (W + g u), with the dS^T (W + g u) variant reported
    alongside. Defects are maxima over interior samples; each balance's
    scale is max(1, largest rate magnitude involved), so defect thresholds
    can be stated relative to it.
    """
    if len(trajectory) < 3:
        raise TrajectoryTooShort(f"need >= 3 samples, got {len(trajectory)}")
    t = trajectory.times
    H = trajectory.H_values
    S = trajectory.S_values
    sig = trajectory.sigma_int
    p, q = input_power(model, trajectory)

    span = t[2:] - t[:-2]
    fdH = (H[2:] - H[:-2]) / span
    fdS = (S[2:] - S[:-2]) / span
    rhs_E = p[1:-1]
    rhs_S = sig[1:-1] + p[1:-1]
    rhs_S_alt = sig[1:-1] + q[1:-1]

    energy_scale = max(1.0, float(np.max(np.abs(fdH))), float(np.max(np.abs(rhs_E))))
    entropy_scale = max(
        1.0,
        float(np.max(np.abs(fdS))),
        float(np.max(np.abs(rhs_S))),
        float(np.max(np.abs(rhs_S_alt))),
    )
    return BalanceReport(
        max_energy_defect=float(np.max(np.abs(fdH - rhs_E))),
        max_entropy_defect=float(np.max(np.abs(fdS - rhs_S))),
        max_entropy_defect_alt=float(np.max(np.abs(fdS - rhs_S_alt))),
        min_sigma_int=float(np.min(sig)),
        energy_scale=energy_scale,
        entropy_scale=entropy_scale,
        samples=len(trajectory),
    )


def quadratic_linear_model() -> IphsModel:
    """n = 2 benchmark: H = (x1^2 + x2^2)/2, S = x1 + x2, gamma = 1, J standard."""
    H = PolynomialField(2, [((2, 0), 0.5), ((0, 2), 0.5)])
    S = PolynomialField(2, [((1, 0), 1.0), ((0, 1), 1.0)])
    gamma = PolynomialField.constant(2, 1.0)
    return IphsModel(2, H, S, BracketMatrix.standard_skew(), gamma, name="quadratic-linear")


def heat_exchanger_model(conductance: float = 1.0) -> IphsModel:
    """Two compartments exchanging heat through a finite conductance.

    States are the compartment entropies, H = exp(x1) + exp(x2) so the
    temperatures are T_i = exp(x_i), S = x1 + x2, and
    gamma = conductance / (T1 T2). The drift moves entropy from the hot to
    the cold side; the temperature difference decays at rate 2 * conductance.
    """
    if conductance <= 0.0:
        raise NegativeCoefficient(f"conductance must be > 0, got {conductance}")
    H = exp_sum_field(2)
    S = PolynomialField(2, [((1, 0), 1.0), ((0, 1), 1.0)])
    gamma = exp_neg_sum_field(2, scale=conductance)
    return IphsModel(2, H, S, BracketMatrix.standard_skew(), gamma, name="heat-exchanger")


BUILTIN_MODELS: dict[str, Callable[..., IphsModel]] = {
    "quadratic-linear": quadratic_linear_model,
    "heat-exchanger": heat_exchanger_model,
}


def builtin_model(name: str, params: dict | None = None) -> IphsModel:
    try:
        factory = BUILTIN_MODELS[name]
    except KeyError:
        raise FormatError(f"unknown builtin model {name!r}") from None
    return factory(**(params or {}))
