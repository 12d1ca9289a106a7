"""Process parameters, market/contract parameters and log-price characteristic functions.

Everything is expressed in normalized units: spot and prices are divided by
the strike, so the spot is the moneyness ``S0/K`` and the strike is 1.

The characteristic-function kernels (``*_log_cf``) broadcast over numpy
arrays so that pricers can evaluate many parameter rows against a frequency
grid in one call.  They return ``ln E[exp(i u ln(S_T/S_0))]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Union

import numpy as np

__all__ = [
    "MarketParams",
    "GbmParams",
    "VgParams",
    "GbmsaParams",
    "VgsaParams",
    "ModelParams",
    "ParamRanges",
    "EUROPEAN_CALL",
    "UP_AND_OUT_PUT",
    "AMERICAN_PUT",
    "CONTRACTS",
    "FAMILIES",
    "MODEL_CLASSES",
    "DAY",
    "default_ranges",
    "model_from_values",
    "validate",
    "char_fn",
    "log_char_fn",
    "gbm_log_cf",
    "vg_log_cf",
    "gbmsa_log_cf",
    "vgsa_log_cf",
    "vg_exponent",
    "cir_log_laplace",
]

DAY = 1.0 / 365.0

EUROPEAN_CALL = "european-call"
UP_AND_OUT_PUT = "up-and-out-put"
AMERICAN_PUT = "american-put"
CONTRACTS = (EUROPEAN_CALL, UP_AND_OUT_PUT, AMERICAN_PUT)

FAMILIES = ("gbm", "vg", "gbmsa", "vgsa")


@dataclass(frozen=True)
class MarketParams:
    """Product and market inputs shared by every model.

    ``barrier_ratio`` is ``H/K`` and is only set for up-and-out contracts.
    """

    moneyness: float
    maturity: float
    r: float
    q: float
    barrier_ratio: float | None = None

    def __post_init__(self):
        if not self.moneyness > 0:
            raise ValueError(f"moneyness must be positive, got {self.moneyness}")
        if not self.maturity > 0:
            raise ValueError(f"maturity must be positive, got {self.maturity}")
        if not self.r >= 0:
            raise ValueError(f"rate r must be non-negative, got {self.r}")
        if not self.q >= 0:
            raise ValueError(f"dividend q must be non-negative, got {self.q}")
        if self.barrier_ratio is not None and not self.barrier_ratio >= self.moneyness:
            raise ValueError(
                f"barrier_ratio {self.barrier_ratio} must be >= moneyness {self.moneyness}"
            )

    @property
    def forward(self) -> float:
        return self.moneyness * math.exp((self.r - self.q) * self.maturity)


def _check_positive(obj, *names):
    for name in names:
        value = getattr(obj, name)
        if not value > 0:
            raise ValueError(f"{type(obj).__name__}.{name} must be positive, got {value}")


def _vg_moment(sigma, theta, nu, power=1.0):
    # 1 - p*theta*nu - p^2*sigma^2*nu/2; must stay positive for E[S_T^p] to exist
    return 1.0 - power * theta * nu - 0.5 * power * power * sigma * sigma * nu


@dataclass(frozen=True)
class GbmParams:
    sigma: float

    family = "gbm"

    def __post_init__(self):
        _check_positive(self, "sigma")


@dataclass(frozen=True)
class VgParams:
    sigma: float
    theta: float
    nu: float

    family = "vg"

    def __post_init__(self):
        _check_positive(self, "sigma", "nu")
        if not _vg_moment(self.sigma, self.theta, self.nu) > 0:
            raise ValueError(
                "VG parameters violate 1 - theta*nu - sigma^2*nu/2 > 0: "
                f"sigma={self.sigma}, theta={self.theta}, nu={self.nu}"
            )


@dataclass(frozen=True)
class GbmsaParams:
    """Heston parameters, fields in the column order used for datasets."""

    sigma_v: float
    kappa: float
    rho: float
    theta_long: float
    v0: float

    family = "gbmsa"

    def __post_init__(self):
        _check_positive(self, "sigma_v", "kappa", "theta_long", "v0")
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (-1, 1), got {self.rho}")


@dataclass(frozen=True)
class VgsaParams:
    """VG run on an integrated CIR clock (initial arrival rate fixed at 1).

    ``lam`` is the volatility of the time change (``lambda`` is reserved).
    """

    sigma: float
    theta: float
    nu: float
    kappa: float
    eta: float
    lam: float

    family = "vgsa"

    def __post_init__(self):
        _check_positive(self, "sigma", "nu", "kappa", "eta", "lam")
        if not _vg_moment(self.sigma, self.theta, self.nu) > 0:
            raise ValueError(
                "VGSA parameters violate 1 - theta*nu - sigma^2*nu/2 > 0: "
                f"sigma={self.sigma}, theta={self.theta}, nu={self.nu}"
            )


ModelParams = Union[GbmParams, VgParams, GbmsaParams, VgsaParams]

MODEL_CLASSES = {
    "gbm": GbmParams,
    "vg": VgParams,
    "gbmsa": GbmsaParams,
    "vgsa": VgsaParams,
}


def model_fields(family: str) -> tuple[str, ...]:
    return tuple(f.name for f in fields(MODEL_CLASSES[family]))


def model_from_values(family: str, values) -> ModelParams:
    """Build a parameter object from values given in dataset column order."""
    cls = MODEL_CLASSES[family]
    names = model_fields(family)
    if len(values) != len(names):
        raise ValueError(f"{family} expects {len(names)} values, got {len(values)}")
    return cls(*(float(v) for v in values))


# --------------------------------------------------------------------------
# Parameter ranges

_MARKET_RANGES = {
    "moneyness": (0.8, 1.2),
    "maturity": (DAY, 3.0),
    "r": (0.01, 0.03),
    "q": (0.0, 0.03),
}

_MODEL_RANGES = {
    "gbm": {"sigma": (0.05, 0.50)},
    "vg": {"sigma": (0.05, 0.50), "theta": (-0.90, -0.05), "nu": (0.05, 1.00)},
    "gbmsa": {
        "sigma_v": (0.05, 0.50),
        "kappa": (0.20, 2.00),
        "rho": (-0.90, -0.10),
        "theta_long": (0.01, 0.20),
        "v0": (0.01, 0.20),
    },
    "vgsa": {
        "sigma": (0.05, 0.50),
        "theta": (-0.90, -0.05),
        "nu": (0.05, 1.00),
        "kappa": (0.20, 3.00),
        "eta": (0.01, 0.20),
        "lam": (0.01, 0.20),
    },
}


@dataclass(frozen=True)
class ParamRanges:
    """Ordered ``name -> (lower, upper)`` bounds for one family/contract."""

    family: str
    bounds: tuple[tuple[str, float, float], ...]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        for name, lo, hi in self.bounds:
            if not lo < hi:
                raise ValueError(f"range for {name} must satisfy lower < upper, got {lo}, {hi}")

    @property
    def names(self) -> list[str]:
        return [b[0] for b in self.bounds]

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[1] for b in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[2] for b in self.bounds])

    @property
    def has_barrier(self) -> bool:
        return "barrier_ratio" in self.names

    def __getitem__(self, name: str) -> tuple[float, float]:
        for n, lo, hi in self.bounds:
            if n == name:
                return lo, hi
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def replace(self, **updates: tuple[float, float]) -> "ParamRanges":
        """Return a copy with some bounds swapped out, e.g. ``maturity=(3, 5)``."""
        unknown = set(updates) - set(self.names)
        if unknown:
            raise KeyError(f"unknown range names: {sorted(unknown)}")
        bounds = tuple(
            (n, *updates[n]) if n in updates else (n, lo, hi) for n, lo, hi in self.bounds
        )
        return ParamRanges(self.family, bounds)


def default_ranges(family: str, contract: str = EUROPEAN_CALL) -> ParamRanges:
    """Default sampling ranges; column order matches dataset features."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if contract not in CONTRACTS:
        raise ValueError(f"unknown contract {contract!r}; expected one of {CONTRACTS}")
    bounds = [("moneyness", *_MARKET_RANGES["moneyness"])]
    if contract == UP_AND_OUT_PUT:
        # actual admissible interval is [moneyness, 1.2]; see sampling.constrain_barrier
        bounds.append(("barrier_ratio", *_MARKET_RANGES["moneyness"]))
    for name in ("maturity", "r", "q"):
        bounds.append((name, *_MARKET_RANGES[name]))
    bounds.extend((name, lo, hi) for name, (lo, hi) in _MODEL_RANGES[family].items())
    return ParamRanges(family, tuple(bounds))


def _within(value, lo, hi, rtol=1e-12):
    slack = rtol * max(abs(lo), abs(hi), 1.0)
    return lo - slack <= value <= hi + slack


def validate(params, ranges: ParamRanges) -> bool:
    """True iff every field of ``params`` present in ``ranges`` lies in its bounds.

    Accepts a ``MarketParams`` or any model parameter object.  Type
    invariants are enforced at construction, so an instance that exists
    already satisfies them; ``False`` is also returned for objects whose
    fields fail those invariants (e.g. a barrier below spot).
    """
    if isinstance(params, MarketParams):
        values = {
            "moneyness": params.moneyness,
            "maturity": params.maturity,
            "r": params.r,
            "q": params.q,
        }
        if params.barrier_ratio is not None:
            if params.barrier_ratio < params.moneyness:
                return False
            values["barrier_ratio"] = params.barrier_ratio
            hi = ranges["moneyness"][1] if "moneyness" in ranges else np.inf
            if params.barrier_ratio > hi * (1 + 1e-12):
                return False
        elif ranges.has_barrier:
            return False
    else:
        if getattr(params, "family", None) != ranges.family:
            return False
        values = {f.name: getattr(params, f.name) for f in fields(params)}
        if isinstance(params, (VgParams, VgsaParams)):
            if not _vg_moment(params.sigma, params.theta, params.nu) > 0:
                return False
    for name, value in values.items():
        if name == "barrier_ratio":
            continue
        if name not in ranges:
            return False
        lo, hi = ranges[name]
        if not (math.isfinite(value) and _within(value, lo, hi)):
            return False
    return True


# --------------------------------------------------------------------------
# Characteristic functions


def _log1p_over(w):
    """``log1p(w)/w`` for complex ``w``, accurate near zero.

    numpy's complex log1p loses relative accuracy for tiny arguments.
    """
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < 1e-4
    safe = np.where(small, 1.0, w)
    big = np.log(1.0 + safe) / safe
    series = 1.0 - w / 2.0 + w * w / 3.0 - w * w * w / 4.0
    return np.where(small, series, big)


def gbm_log_cf(u, T, r, q, sigma):
    u = np.asarray(u, dtype=complex)
    iu = 1j * u
    var = sigma * sigma * T
    return iu * ((r - q) * T - 0.5 * var) - 0.5 * var * u * u


def vg_exponent(u, sigma, theta, nu):
    """Unit-time VG Lévy exponent without drift: ``-(1/nu) ln(1 - i u theta nu + sigma^2 nu u^2/2)``."""
    u = np.asarray(u, dtype=complex)
    return -np.log(1.0 - 1j * u * theta * nu + 0.5 * sigma * sigma * nu * u * u) / nu


def vg_log_cf(u, T, r, q, sigma, theta, nu):
    u = np.asarray(u, dtype=complex)
    omega = np.log(_vg_moment(sigma, theta, nu)) / nu
    return 1j * u * (r - q + omega) * T + T * vg_exponent(u, sigma, theta, nu)


def gbmsa_log_cf(u, T, r, q, sigma_v, kappa, rho, theta_long, v0):
    """Heston log-CF in the branch-stable ("little trap") form.

    The differences ``kappa - rho*sigma_v*iu - d`` are computed as
    ``-sigma_v^2 (iu + u^2) / (a + d)`` so the function stays accurate as
    ``sigma_v -> 0``.
    """
    u = np.asarray(u, dtype=complex)
    iu = 1j * u
    s2 = sigma_v * sigma_v
    a = kappa - rho * sigma_v * iu
    iu_u2 = iu + u * u
    d = np.sqrt(a * a + s2 * iu_u2)
    apd = a + d
    # (a - d) / s2, and g = (a - d)/(a + d)
    amd_over_s2 = -iu_u2 / apd
    g = amd_over_s2 * s2 / apd
    one_m_edt = -np.expm1(-d * T)
    one_m_gedt = 1.0 - g * (1.0 - one_m_edt)
    D = amd_over_s2 * one_m_edt / one_m_gedt
    # log((1 - g e^{-dT}) / (1 - g)) / s2 via log1p(z)/z, z = g(1 - e^{-dT})/(1 - g)
    z_over_s2 = amd_over_s2 / apd * one_m_edt / (1.0 - g)
    z = z_over_s2 * s2
    log_term_over_s2 = _log1p_over(z) * z_over_s2
    C = iu * (r - q) * T + kappa * theta_long * (amd_over_s2 * T - 2.0 * log_term_over_s2)
    return C + D * v0


def cir_log_laplace(s, t, kappa, eta, lam, y0=1.0):
    """``ln E[exp(s * Y_t)]`` for ``Y_t`` the integral of a CIR rate.

    Rate dynamics ``dy = kappa (eta - y) dt + lam sqrt(y) dW``, ``y(0) = y0``.
    Written without the ``kappa^2 eta t / lam^2`` cancellation so it is stable
    for tiny ``lam`` and large ``kappa``.
    """
    s = np.asarray(s, dtype=complex)
    lam2 = lam * lam
    gam = np.sqrt(kappa * kappa - 2.0 * lam2 * s)
    kpg = kappa + gam
    e2x = np.exp(-gam * t)  # exp(-2x), x = gam*t/2
    one_m = 1.0 - e2x
    w = lam2 * s * one_m / (gam * kpg)
    log_a = 2.0 * kappa * eta * s * t / kpg - 2.0 * kappa * eta * s * one_m / (gam * kpg) * _log1p_over(w)
    b = 2.0 * s * one_m / (kappa * one_m + gam * (1.0 + e2x))
    return log_a + b * y0


def vgsa_log_cf(u, T, r, q, sigma, theta, nu, kappa, eta, lam):
    u = np.asarray(u, dtype=complex)
    psi = vg_exponent(u, sigma, theta, nu)
    psi_m = vg_exponent(-1j, sigma, theta, nu)
    norm = cir_log_laplace(psi_m, T, kappa, eta, lam)
    return 1j * u * (r - q) * T + cir_log_laplace(psi, T, kappa, eta, lam) - 1j * u * norm


_LOG_CF = {
    "gbm": gbm_log_cf,
    "vg": vg_log_cf,
    "gbmsa": gbmsa_log_cf,
    "vgsa": vgsa_log_cf,
}


def log_char_fn(family: str, u, T, r, q, *model_values):
    """Vectorized ``ln E[exp(i u ln(S_T/S_0))]``; model values in column order."""
    return _LOG_CF[family](u, T, r, q, *model_values)


def _model_values(model: ModelParams) -> tuple[float, ...]:
    return tuple(getattr(model, f.name) for f in fields(model))


def char_fn(model: ModelParams, market: MarketParams, u):
    """``E[exp(i u ln(S_T/K))]`` under the risk-neutral measure.

    ``u`` may be a scalar or an array of (possibly complex) frequencies.
    ``char_fn(model, market, -1j)`` equals the forward ``m e^{(r-q)T}``.
    """
    u_arr = np.asarray(u, dtype=complex)
    if not np.all(np.isfinite(u_arr)):
        raise ValueError("char_fn requires finite u")
    if isinstance(model, (VgParams, VgsaParams)) and not _vg_moment(model.sigma, model.theta, model.nu) > 0:
        raise ValueError("VG finite-moment condition violated")
    lcf = log_char_fn(
        model.family, u_arr, market.maturity, market.r, market.q, *_model_values(model)
    )
    out = np.exp(1j * u_arr * math.log(market.moneyness) + lcf)
    if np.ndim(u) == 0:
        return complex(out)
    return out
