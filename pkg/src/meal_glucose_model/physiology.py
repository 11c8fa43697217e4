# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Perday CatalogLAB™

"""
Six-compartment glucose-insulin meal model.

The right-hand side is compiled with numba and reads every constant from one
packed float64 vector (see ``pack_parameters``) so the integrator can run the
whole grid without returning to Python. The pydantic-facing helpers at the
bottom of the module wrap the kernels for single evaluations.

State layout: Gp, Gt, Il, Ip, I1, Id, Qsto1, Qsto2, Qgut, X, Ipo, Y.
"""

from __future__ import annotations

import logging
import math
from typing import Final

import numpy as np
from numba import njit
from scipy.stats import norm

from .exceptions import BasalStateError, NumericalError
from .models import (
    OBSERVABLE_NAMES,
    STATE_NAMES,
    BasalState,
    DoseProfile,
    EstimatedParameters,
    FixedParameters,
    ModelState,
    Observables,
)

__all__ = [
    "HE_CEIL",
    "HE_FLOOR",
    "derive_basal_state",
    "egp_series",
    "gastric_emptying_rate",
    "initial_state",
    "observables",
    "pack_parameters",
    "rhs",
]

logger = logging.getLogger(__name__)

HE_FLOOR: Final[float] = 1e-6
HE_CEIL: Final[float] = 1.0 - 1e-6
_SQRT_2PI: Final[float] = math.sqrt(2.0 * math.pi)

# Packed parameter layout shared by the compiled kernels
(
    P_VG,
    P_K1,
    P_K2,
    P_VI,
    P_M1,
    P_M2,
    P_M4,
    P_M5,
    P_M6,
    P_F,
    P_FCNS,
    P_VM0,
    P_VMX,
    P_KM0,
    P_P2U,
    P_K,
    P_ALPHA,
    P_BETA,
    P_GAMMA,
    P_KE1,
    P_KE2,
    P_BW,
    P_KMIN,
    P_KMAX,
    P_KABS,
    P_KGRI,
    P_B,
    P_D,
    P_KP1,
    P_KP2,
    P_KP3,
    P_KP4,
    P_KI,
    P_IB,
    P_SB,
    P_H,
    P_DOSE,
    P_GAUSSIAN,
    P_DOSE_CENTER,
    P_DOSE_WIDTH,
    P_DOSE_NORM,
    P_CLAMP_EGP,
) = range(42)
N_PACKED: Final[int] = 42

N_STATE: Final[int] = len(STATE_NAMES)
N_OBSERVABLES: Final[int] = len(OBSERVABLE_NAMES)

S_GP, S_GT, S_IL, S_IP, S_I1, S_ID, S_QSTO1, S_QSTO2, S_QGUT, S_X, S_IPO, S_Y = range(12)

(
    O_G,
    O_I,
    O_EGP,
    O_RA,
    O_S,
    O_SPO,
    O_U,
    O_UID,
    O_E,
    O_HE,
    O_M3,
    O_KEMPT,
    O_QSTO,
    O_DGDT,
) = range(14)


@njit(cache=True)
def _kempt(qsto: float, kmin: float, kmax: float, b: float, d: float, dose: float) -> float:
    if dose <= 0.0:
        return kmax
    a = 5.0 / (2.0 * dose * (1.0 - b))
    c = 5.0 / (2.0 * d * dose)
    return kmin + 0.5 * (kmax - kmin) * (
        math.tanh(a * (qsto - b * dose)) - math.tanh(c * (qsto - d * dose)) + 2.0
    )


@njit(cache=True)
def _ingestion_rate(t: float, p: np.ndarray) -> float:
    # instantaneous doses enter through the initial state instead
    if p[P_GAUSSIAN] == 0.0 or t < 0.0:
        return 0.0
    width = p[P_DOSE_WIDTH]
    z = (t - p[P_DOSE_CENTER]) / width
    return p[P_DOSE] * math.exp(-0.5 * z * z) / (width * _SQRT_2PI * p[P_DOSE_NORM])


@njit(cache=True)
def _evaluate(t: float, x: np.ndarray, p: np.ndarray, dx: np.ndarray, obs: np.ndarray) -> None:
    """Write the twelve derivatives into ``dx`` and the observables into ``obs``."""
    gp = x[S_GP]
    gt = x[S_GT]
    il = x[S_IL]
    ip = x[S_IP]
    i1 = x[S_I1]
    idel = x[S_ID]
    q1 = x[S_QSTO1]
    q2 = x[S_QSTO2]
    qgut = x[S_QGUT]
    xins = x[S_X]
    ipo = x[S_IPO]
    y = x[S_Y]

    glucose = gp / p[P_VG]
    insulin = ip / p[P_VI]

    # glucose subsystem
    egp = p[P_KP1] - p[P_KP2] * gp - p[P_KP3] * idel - p[P_KP4] * ipo
    if p[P_CLAMP_EGP] != 0.0 and egp < 0.0:
        egp = 0.0
    ra = p[P_F] * p[P_KABS] * qgut / p[P_BW]
    uid = (p[P_VM0] + p[P_VMX] * xins) * gt / (p[P_KM0] + gt)
    excretion = 0.0
    if gp > p[P_KE2]:
        excretion = p[P_KE1] * (gp - p[P_KE2])
    dgp = egp + ra - p[P_FCNS] - excretion - p[P_K1] * gp + p[P_K2] * gt
    dgt = -uid + p[P_K1] * gp - p[P_K2] * gt

    # insulin subsystem with hepatic extraction
    secretion = p[P_GAMMA] * ipo
    he = -p[P_M5] * secretion + p[P_M6]
    if he < HE_FLOOR:
        he = HE_FLOOR
    elif he > HE_CEIL:
        he = HE_CEIL
    m3 = p[P_M1] * he / (1.0 - he)
    dil = -(p[P_M1] + m3) * il + p[P_M2] * ip + secretion
    dip = -(p[P_M2] + p[P_M4]) * ip + p[P_M1] * il
    di1 = -p[P_KI] * (i1 - insulin)
    did = -p[P_KI] * (idel - i1)

    # gastrointestinal tract
    qsto = q1 + q2
    kempt = _kempt(qsto, p[P_KMIN], p[P_KMAX], p[P_B], p[P_D], p[P_DOSE])
    dq1 = -p[P_KGRI] * q1 + _ingestion_rate(t, p)
    dq2 = -kempt * q2 + p[P_KGRI] * q1
    dqgut = -p[P_KABS] * qgut + kempt * q2

    # interstitial insulin
    dxins = -p[P_P2U] * xins + p[P_P2U] * (insulin - p[P_IB])

    # pancreatic secretion
    dgdt = dgp / p[P_VG]
    spo = y + p[P_SB]
    if dgdt > 0.0:
        spo += p[P_K] * dgdt
    dipo = -p[P_GAMMA] * ipo + spo
    drive = p[P_BETA] * (glucose - p[P_H])
    if drive >= -p[P_SB]:
        dy = -p[P_ALPHA] * (y - drive)
    else:
        dy = -p[P_ALPHA] * y - p[P_ALPHA] * p[P_SB]

    dx[S_GP] = dgp
    dx[S_GT] = dgt
    dx[S_IL] = dil
    dx[S_IP] = dip
    dx[S_I1] = di1
    dx[S_ID] = did
    dx[S_QSTO1] = dq1
    dx[S_QSTO2] = dq2
    dx[S_QGUT] = dqgut
    dx[S_X] = dxins
    dx[S_IPO] = dipo
    dx[S_Y] = dy

    obs[O_G] = glucose
    obs[O_I] = insulin
    obs[O_EGP] = egp
    obs[O_RA] = ra
    obs[O_S] = secretion
    obs[O_SPO] = spo
    obs[O_U] = p[P_FCNS] + uid
    obs[O_UID] = uid
    obs[O_E] = excretion
    obs[O_HE] = he
    obs[O_M3] = m3
    obs[O_KEMPT] = kempt
    obs[O_QSTO] = qsto
    obs[O_DGDT] = dgdt


@njit(cache=True)
def rk4_kernel(x0: np.ndarray, p: np.ndarray, t0: float, dt: float, out: np.ndarray) -> int:
    """Classical RK4 over ``out.shape[0] - 1`` steps.

    Returns the index of the first non-finite node, or -1 when every node is finite.
    """
    n = x0.shape[0]
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    scratch = np.empty(N_OBSERVABLES)
    for j in range(n):
        out[0, j] = x0[j]
    for i in range(out.shape[0] - 1):
        t = t0 + i * dt
        x = out[i]
        _evaluate(t, x, p, k1, scratch)
        for j in range(n):
            tmp[j] = x[j] + 0.5 * dt * k1[j]
        _evaluate(t + 0.5 * dt, tmp, p, k2, scratch)
        for j in range(n):
            tmp[j] = x[j] + 0.5 * dt * k2[j]
        _evaluate(t + 0.5 * dt, tmp, p, k3, scratch)
        for j in range(n):
            tmp[j] = x[j] + dt * k3[j]
        _evaluate(t + dt, tmp, p, k4, scratch)
        finite = True
        for j in range(n):
            value = x[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            out[i + 1, j] = value
            if not math.isfinite(value):
                finite = False
        if not finite:
            return i + 1
    return -1


@njit(cache=True)
def observe_kernel(states: np.ndarray, times: np.ndarray, p: np.ndarray, out: np.ndarray) -> None:
    """Evaluate the observables at every node."""
    dx = np.empty(states.shape[1])
    for i in range(states.shape[0]):
        _evaluate(times[i], states[i], p, dx, out[i])


def derive_basal_state(
    fixed: FixedParameters,
    theta: EstimatedParameters,
    Gb: float,
    basal_consistency: bool = False,
) -> BasalState:
    """Compute the fasting steady state for a subject with basal glucose ``Gb``.

    Gtb follows from dGp/dt = 0 with Ra = E = 0. With ``basal_consistency`` the
    Michaelis-Menten Vm0 is recomputed so that dGt/dt = 0 as well; otherwise
    the fixed Vm0 is kept and the tissue compartment drifts slightly at t=0.
    """
    if not (math.isfinite(Gb) and Gb > 0):
        raise BasalStateError("Gb", Gb)

    HEb = fixed.HEb
    Gpb = Gb * fixed.VG
    m30 = fixed.m1 * HEb / (1.0 - HEb)
    Sb = (fixed.m6 - HEb) / fixed.m5
    Ipb = Sb * (1.0 - HEb) / (fixed.m2 * HEb + fixed.m4)
    Ib = Ipb / fixed.VI
    Ilb = (Sb - fixed.m4 * Ipb) / m30
    Ipob = Sb / fixed.gamma
    kp1 = theta.EGPb + theta.kp2 * Gpb + theta.kp3 * Ib + theta.kp4 * Ipob
    Gtb = (fixed.Fcns + fixed.k1 * Gpb - theta.EGPb) / fixed.k2
    Vm0 = fixed.Vm0
    if basal_consistency and Gtb > 0:
        Vm0 = (theta.EGPb - fixed.Fcns) * (fixed.Km0 + Gtb) / Gtb

    derived = {
        "Gpb": Gpb,
        "Gtb": Gtb,
        "Sb": Sb,
        "Ipb": Ipb,
        "Ib": Ib,
        "Ilb": Ilb,
        "Ipob": Ipob,
        "m30": m30,
        "kp1": kp1,
        "Vm0": Vm0,
    }
    for name, value in derived.items():
        if not (math.isfinite(value) and value > 0):
            raise BasalStateError(name, value)

    return BasalState(Gb=Gb, h=Gb, **derived)


def gastric_emptying_rate(qsto: float, theta: EstimatedParameters, D: float) -> float:
    """Gastric emptying rate Kempt [1/min] for ``qsto`` mg left in the stomach."""
    return float(_kempt(float(qsto), theta.Kmin, theta.Kmax, theta.b, theta.d, float(D)))


def pack_parameters(
    fixed: FixedParameters,
    theta: EstimatedParameters,
    basal: BasalState,
    dose: DoseProfile,
    clamp_egp: bool = False,
) -> np.ndarray:
    """Flatten everything the kernels read into one float64 vector."""
    p = np.empty(N_PACKED, dtype=np.float64)
    p[P_VG] = fixed.VG
    p[P_K1] = fixed.k1
    p[P_K2] = fixed.k2
    p[P_VI] = fixed.VI
    p[P_M1] = fixed.m1
    p[P_M2] = fixed.m2
    p[P_M4] = fixed.m4
    p[P_M5] = fixed.m5
    p[P_M6] = fixed.m6
    p[P_F] = fixed.f
    p[P_FCNS] = fixed.Fcns
    p[P_VM0] = basal.Vm0
    p[P_VMX] = fixed.Vmx
    p[P_KM0] = fixed.Km0
    p[P_P2U] = fixed.p2U
    p[P_K] = fixed.K
    p[P_ALPHA] = fixed.alpha
    p[P_BETA] = fixed.beta
    p[P_GAMMA] = fixed.gamma
    p[P_KE1] = fixed.ke1
    p[P_KE2] = fixed.ke2
    p[P_BW] = fixed.BW
    p[P_KMIN] = theta.Kmin
    p[P_KMAX] = theta.Kmax
    p[P_KABS] = theta.Kabs
    p[P_KGRI] = theta.Kgri
    p[P_B] = theta.b
    p[P_D] = theta.d
    p[P_KP1] = basal.kp1
    p[P_KP2] = theta.kp2
    p[P_KP3] = theta.kp3
    p[P_KP4] = theta.kp4
    p[P_KI] = theta.ki
    p[P_IB] = basal.Ib
    p[P_SB] = basal.Sb
    p[P_H] = basal.h
    p[P_DOSE] = dose.amount
    p[P_GAUSSIAN] = 1.0 if dose.mode == "gaussian" else 0.0
    p[P_DOSE_CENTER] = dose.center
    p[P_DOSE_WIDTH] = dose.width
    # mass of the Gaussian on t >= 0, so the truncated impulse integrates to 1
    p[P_DOSE_NORM] = float(norm.sf(-dose.center / dose.width))
    p[P_CLAMP_EGP] = 1.0 if clamp_egp else 0.0
    return p


def initial_state(basal: BasalState, dose: DoseProfile) -> np.ndarray:
    """Basal initial condition; an instantaneous dose starts in the solid stomach."""
    x0 = np.zeros(N_STATE, dtype=np.float64)
    x0[S_GP] = basal.Gpb
    x0[S_GT] = basal.Gtb
    x0[S_IL] = basal.Ilb
    x0[S_IP] = basal.Ipb
    x0[S_I1] = basal.Ib
    x0[S_ID] = basal.Ib
    x0[S_IPO] = basal.Ipob
    if dose.mode == "instantaneous":
        x0[S_QSTO1] = dose.amount
    return x0


def egp_series(states: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Unclamped EGP [mg/kg/min] for every row of a state matrix."""
    return (
        p[P_KP1]
        - p[P_KP2] * states[:, S_GP]
        - p[P_KP3] * states[:, S_ID]
        - p[P_KP4] * states[:, S_IPO]
    )


def _evaluate_once(
    t: float,
    state: ModelState,
    fixed: FixedParameters,
    theta: EstimatedParameters,
    basal: BasalState,
    dose: DoseProfile | None,
    clamp_egp: bool,
) -> tuple[np.ndarray, np.ndarray]:
    profile = dose if dose is not None else DoseProfile(amount=fixed.D)
    p = pack_parameters(fixed, theta, basal, profile, clamp_egp)
    dx = np.empty(N_STATE, dtype=np.float64)
    obs = np.empty(N_OBSERVABLES, dtype=np.float64)
    _evaluate(float(t), state.to_array(), p, dx, obs)
    return dx, obs


def rhs(
    t: float,
    state: ModelState,
    fixed: FixedParameters,
    theta: EstimatedParameters,
    basal: BasalState,
    dose: DoseProfile | None = None,
    clamp_egp: bool = False,
) -> ModelState:
    """Time derivative of ``state``; raises ``NumericalError`` when it is not finite."""
    dx, _ = _evaluate_once(t, state, fixed, theta, basal, dose, clamp_egp)
    if not np.all(np.isfinite(dx)):
        bad = [name for name, v in zip(STATE_NAMES, dx) if not math.isfinite(v)]
        raise NumericalError(f"non-finite derivative at t={t:g} min for {bad}")
    return ModelState.from_array(dx)


def observables(
    state: ModelState,
    fixed: FixedParameters,
    theta: EstimatedParameters,
    basal: BasalState,
    dose: DoseProfile | None = None,
    t: float = 0.0,
    clamp_egp: bool = False,
) -> Observables:
    """Algebraic outputs (G, I, EGP, Ra, ...) for one state."""
    _, obs = _evaluate_once(t, state, fixed, theta, basal, dose, clamp_egp)
    return Observables.from_array(obs)
