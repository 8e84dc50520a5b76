"""Entropy densities and the bijection between physical and entropy variables.

The state of the system is Z = (c_1, ..., c_I, u): species concentrations plus
internal energy density.  The entropy density is

    S(c, u) = sigma0(u) + sum_i (c_i * log w_i(u) - lambda(c_i)) - delta * lambda(u)

with lambda the Boltzmann function, sigma0 a strictly concave increasing
thermal part, w_i(u) the energy-dependent equilibrium concentrations, and
delta >= 0 a regularization that makes -DS surjective onto R^(I+1) so the
entropy-variable transform W = -DS(Z) can be inverted globally.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import xlogy

from .grid import Grid

_BRACKET_LO = 1e-12
_PSI_TOL = 1e-12
_MAX_EXPAND = 500


class DomainError(ValueError):
    """Input outside the admissible domain of a thermodynamic function."""


class InversionError(RuntimeError):
    """The entropy-variable inversion could not bracket or resolve a root."""


def boltzmann_lambda(s):
    """Boltzmann function lambda(s) = s*log(s) - s + 1, with lambda(0) = 1."""
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0):
        raise DomainError("boltzmann_lambda requires s >= 0")
    out = xlogy(arr, arr) - arr + 1.0
    return float(out) if np.isscalar(s) or arr.ndim == 0 else out


def p_entropy(w, p: float):
    """Convex p-entropy U_p(w) = (w^p - p*w + p - 1) / (p*(p-1)).

    Characterized by U_p''(w) = w^(p-2) and U_p(1) = U_p'(1) = 0; used in the
    upper entropy bound together with the splitting of w*lambda(c/w).
    """
    if p <= 1.0:
        raise DomainError("p_entropy requires p > 1")
    arr = np.asarray(w, dtype=float)
    if np.any(arr < 0):
        raise DomainError("p_entropy requires w >= 0")
    out = (arr**p - p * arr + p - 1.0) / (p * (p - 1.0))
    return float(out) if np.isscalar(w) or arr.ndim == 0 else out


def relative_boltzmann(c, w):
    """Relative Boltzmann entropy B(c|w) = sum_i w_i * lambda(c_i / w_i) >= 0."""
    c = np.asarray(c, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise DomainError("relative_boltzmann requires w > 0 componentwise")
    if np.any(c < 0):
        raise DomainError("relative_boltzmann requires c >= 0 componentwise")
    return float(np.sum(w * (xlogy(c / w, c / w) - c / w + 1.0)))


@dataclass(frozen=True)
class SigmaFamily:
    """Thermal entropy part sigma0: either b*log(u) or b*u^alpha.

    Both choices are strictly concave and increasing on (0, inf) with
    sigma0'(0+) = +inf and sigma0'(inf) = 0.
    """

    kind: str
    b: float
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("log", "power"):
            raise DomainError(f"unknown sigma family kind: {self.kind!r}")
        if self.b <= 0:
            raise DomainError("sigma family requires b > 0")
        if self.kind == "power" and not 0.0 < self.alpha < 1.0:
            raise DomainError("power sigma family requires alpha in (0, 1)")

    @classmethod
    def log(cls, b: float) -> "SigmaFamily":
        return cls(kind="log", b=b)

    @classmethod
    def power(cls, b: float, alpha: float) -> "SigmaFamily":
        return cls(kind="power", b=b, alpha=alpha)

    def value(self, u):
        if self.kind == "log":
            return self.b * np.log(u)
        return self.b * u**self.alpha

    def d1(self, u):
        if self.kind == "log":
            return self.b / u
        return self.b * self.alpha * u ** (self.alpha - 1.0)

    def d2(self, u):
        if self.kind == "log":
            return -self.b / u**2
        return self.b * self.alpha * (self.alpha - 1.0) * u ** (self.alpha - 2.0)


@dataclass(frozen=True)
class EquilibriumFamily:
    """Equilibrium concentration w(u), concave and non-decreasing with w(0) > 0.

    power_law:      w(u) = b0 + b1 * u^beta
    shifted_power:  w(u) = b0 * (1 + b1*u)^beta
    """

    kind: str
    b0: float
    b1: float
    beta: float

    def __post_init__(self) -> None:
        if self.kind not in ("power_law", "shifted_power"):
            raise DomainError(f"unknown equilibrium family kind: {self.kind!r}")
        if self.b0 <= 0:
            raise DomainError("equilibrium family requires b0 > 0")
        if self.b1 < 0:
            raise DomainError("equilibrium family requires b1 >= 0")
        if not 0.0 < self.beta < 1.0:
            raise DomainError("equilibrium family requires beta in (0, 1)")

    @classmethod
    def power_law(cls, b0: float, b1: float, beta: float) -> "EquilibriumFamily":
        return cls(kind="power_law", b0=b0, b1=b1, beta=beta)

    @classmethod
    def shifted_power(cls, b0: float, b1: float, beta: float) -> "EquilibriumFamily":
        return cls(kind="shifted_power", b0=b0, b1=b1, beta=beta)

    @property
    def w0(self) -> float:
        """Value at u = 0 (positive by construction)."""
        return self.b0

    def growth_envelope(self) -> tuple[float, float]:
        """Return (beta, C) with w(u) <= C * (1 + u)^beta for all u >= 0."""
        if self.kind == "power_law":
            return self.beta, self.b0 + self.b1
        return self.beta, self.b0 * max(1.0, self.b1) ** self.beta

    def value(self, u):
        if self.kind == "power_law":
            return self.b0 + self.b1 * u**self.beta
        return self.b0 * (1.0 + self.b1 * u) ** self.beta

    def d1(self, u):
        if self.kind == "power_law":
            if self.b1 == 0.0:
                return np.zeros_like(np.asarray(u, dtype=float))
            return self.b1 * self.beta * u ** (self.beta - 1.0)
        return self.b0 * self.b1 * self.beta * (1.0 + self.b1 * u) ** (self.beta - 1.0)

    def d2(self, u):
        if self.kind == "power_law":
            if self.b1 == 0.0:
                return np.zeros_like(np.asarray(u, dtype=float))
            return self.b1 * self.beta * (self.beta - 1.0) * u ** (self.beta - 2.0)
        return (
            self.b0
            * self.b1**2
            * self.beta
            * (self.beta - 1.0)
            * (1.0 + self.b1 * u) ** (self.beta - 2.0)
        )


def _check_state(c: np.ndarray, u: np.ndarray, nspecies: int, strict_c: bool) -> None:
    if c.shape[0] != nspecies:
        raise DomainError(f"expected {nspecies} species, got {c.shape[0]}")
    if np.any(u <= 0):
        raise DomainError("internal energy u must be strictly positive")
    if strict_c:
        if np.any(c <= 0):
            raise DomainError("concentrations must be strictly positive here")
    elif np.any(c < 0):
        raise DomainError("concentrations must be non-negative")


@dataclass(frozen=True)
class EntropyModel:
    """Entropy density S_delta and all of its derivatives.

    Concentrations are passed with the species axis first, so scalars,
    per-cell vectors and whole fields share one code path.
    """

    sigma: SigmaFamily
    w: tuple[EquilibriumFamily, ...]
    delta: float = 0.0

    def __post_init__(self) -> None:
        if len(self.w) < 1:
            raise DomainError("at least one species is required")
        if self.delta < 0:
            raise DomainError("delta must be non-negative")
        object.__setattr__(self, "w", tuple(self.w))

    @property
    def nspecies(self) -> int:
        return len(self.w)

    def with_delta(self, delta: float) -> "EntropyModel":
        return replace(self, delta=delta)

    def entropy_density(self, c, u):
        """S_delta(c, u); accepts c >= 0 and u > 0."""
        c = np.asarray(c, dtype=float)
        u = np.asarray(u, dtype=float)
        _check_state(c, u, self.nspecies, strict_c=False)
        out = self.sigma.value(u) - self.delta * (xlogy(u, u) - u + 1.0)
        for i, wi in enumerate(self.w):
            ci = c[i]
            out = out + ci * np.log(wi.value(u)) - (xlogy(ci, ci) - ci + 1.0)
        return out if out.ndim else float(out)

    def entropy_gradient(self, c, u):
        """DS_delta(c, u) as a vector with components (d/dc_1, ..., d/du)."""
        c = np.asarray(c, dtype=float)
        u = np.asarray(u, dtype=float)
        _check_state(c, u, self.nspecies, strict_c=True)
        parts = [-np.log(c[i] / self.w[i].value(u)) for i in range(self.nspecies)]
        du = self.sigma.d1(u) - self.delta * np.log(u)
        for i, wi in enumerate(self.w):
            du = du + c[i] * wi.d1(u) / wi.value(u)
        parts.append(du + np.zeros_like(u))
        return np.stack([np.broadcast_to(p, np.broadcast_shapes(c.shape[1:], u.shape)).astype(float) for p in parts])

    def energy_slope(self, c, u):
        """dS_delta/du; defined for c >= 0 (no log c involved)."""
        c = np.asarray(c, dtype=float)
        u = np.asarray(u, dtype=float)
        _check_state(c, u, self.nspecies, strict_c=False)
        du = self.sigma.d1(u) - self.delta * np.log(u)
        for i, wi in enumerate(self.w):
            du = du + c[i] * wi.d1(u) / wi.value(u)
        return du

    def entropy_hessian(self, c, u):
        """D^2 S_delta with matrix axes last: shape (..., I+1, I+1).

        Species diagonal -1/c_i, mixed entries w_i'/w_i, and corner
        sigma0'' + sum_i c_i w_i''/w_i - sum_i c_i (w_i'/w_i)^2 - delta/u.
        """
        c = np.asarray(c, dtype=float)
        u = np.asarray(u, dtype=float)
        _check_state(c, u, self.nspecies, strict_c=True)
        ncomp = self.nspecies + 1
        base = np.broadcast_shapes(c.shape[1:], u.shape)
        H = np.zeros(base + (ncomp, ncomp))
        corner = self.sigma.d2(u) - self.delta / u
        for i, wi in enumerate(self.w):
            wv, w1, w2 = wi.value(u), wi.d1(u), wi.d2(u)
            H[..., i, i] = -1.0 / c[i]
            H[..., i, -1] = w1 / wv
            H[..., -1, i] = w1 / wv
            corner = corner + c[i] * w2 / wv - c[i] * (w1 / wv) ** 2
        H[..., -1, -1] = corner
        return H

    def gamma(self, c, u):
        """Heat-capacity-like coefficient -sigma0''(u) - sum_i c_i w_i''/w_i + delta/u."""
        c = np.asarray(c, dtype=float)
        u = np.asarray(u, dtype=float)
        _check_state(c, u, self.nspecies, strict_c=False)
        g = -self.sigma.d2(u) + self.delta / u
        for i, wi in enumerate(self.w):
            g = g - c[i] * wi.d2(u) / wi.value(u)
        return g if np.ndim(g) else float(g)

    def temperature(self, c, u):
        """Temperature 1 / (dS_delta/du).

        States with non-positive slope (possible for delta > 0 at large u) are
        outside the monotone branch and come back as NaN rather than an error.
        """
        slope = self.energy_slope(c, u)
        slope = np.asarray(slope, dtype=float)
        with np.errstate(divide="ignore"):
            theta = np.where(slope > 0, 1.0 / np.where(slope > 0, slope, 1.0), np.nan)
        return float(theta) if theta.ndim == 0 else theta

    # -- inversion of W = -DS_delta ------------------------------------------

    def psi(self, u, y):
        """Monotone map psi(u, y) = -sigma0'(u) - sum_i exp(y_i) w_i'(u) + delta*log(u).

        Strictly increasing in u; its inverse recovers u from the energy
        entropy variable v at fixed y.
        """
        u = np.asarray(u, dtype=float)
        out = -self.sigma.d1(u) + self.delta * np.log(u)
        for i, wi in enumerate(self.w):
            out = out - np.exp(y[i]) * wi.d1(u)
        return out

    def psi_du(self, u, y):
        u = np.asarray(u, dtype=float)
        out = -self.sigma.d2(u) + self.delta / u
        for i, wi in enumerate(self.w):
            out = out - np.exp(y[i]) * wi.d2(u)
        return out

    def invert_energy(self, v, y):
        """Solve psi(u, y) = v for u > 0, vectorized over cells.

        Brackets from [1e-12, 1] by geometric expansion (monotonicity makes
        this safe), bisects in log(u), then polishes with Newton to an
        absolute psi-residual of 1e-12.
        """
        if self.delta <= 0:
            raise DomainError("entropy-variable inversion requires delta > 0")
        v = np.asarray(v, dtype=float)
        y = np.asarray(y, dtype=float)
        lo = np.full_like(v, _BRACKET_LO)
        hi = np.ones_like(v)

        need = self.psi(hi, y) < v
        count = 0
        while np.any(need):
            hi = np.where(need, hi * 4.0, hi)
            count += 1
            if count > _MAX_EXPAND or np.any(hi > 1e290):
                bad = int(np.argmax(need))
                raise InversionError(
                    f"upper bracket expansion failed at cell {bad} (v={v.ravel()[bad]:.6g})"
                )
            need = need & (self.psi(hi, y) < v)
        need = self.psi(lo, y) > v
        count = 0
        while np.any(need):
            lo = np.where(need, lo * 0.25, lo)
            count += 1
            if count > _MAX_EXPAND:
                bad = int(np.argmax(need))
                raise InversionError(
                    f"lower bracket expansion failed at cell {bad} (v={v.ravel()[bad]:.6g})"
                )
            need = need & (self.psi(lo, y) > v)

        for _ in range(48):
            mid = np.sqrt(lo * hi)
            above = self.psi(mid, y) >= v
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
        u = np.sqrt(lo * hi)
        for _ in range(8):
            res = self.psi(u, y) - v
            step = res / self.psi_du(u, y)
            u = np.clip(u - step, lo, hi)

        res = np.abs(self.psi(u, y) - v)
        stuck = (res > _PSI_TOL) & ((hi - lo) > 4.0 * np.finfo(float).eps * u)
        if np.any(stuck):
            for _ in range(60):
                mid = np.sqrt(lo * hi)
                above = self.psi(mid, y) >= v
                hi = np.where(above, mid, hi)
                lo = np.where(above, lo, mid)
            u = np.sqrt(lo * hi)
            res = np.abs(self.psi(u, y) - v)
            if np.any((res > _PSI_TOL) & ((hi - lo) > 4.0 * np.finfo(float).eps * u)):
                bad = int(np.argmax(res))
                raise InversionError(
                    f"psi-residual {res.ravel()[bad]:.3e} above tolerance at cell {bad}"
                )
        return u


@dataclass
class StateField:
    """Grid-sampled physical state Z = (c_1, ..., c_I, u), all components >= 0."""

    grid: Grid
    Z: np.ndarray

    def __post_init__(self) -> None:
        self.Z = np.asarray(self.Z, dtype=float)
        if self.Z.ndim != 1 + self.grid.d or self.Z.shape[1:] != self.grid.shape:
            raise DomainError(
                f"state shape {self.Z.shape} does not match grid {self.grid.shape}"
            )
        if self.Z.shape[0] < 2:
            raise DomainError("state needs at least one species plus energy")
        if np.any(self.Z < 0):
            raise DomainError("state components must be non-negative")

    @property
    def nspecies(self) -> int:
        return self.Z.shape[0] - 1

    @property
    def c(self) -> np.ndarray:
        return self.Z[:-1]

    @property
    def u(self) -> np.ndarray:
        return self.Z[-1]

    def copy(self) -> "StateField":
        return StateField(self.grid, self.Z.copy())


@dataclass
class EntropyVars:
    """Grid-sampled entropy variables W = (y_1, ..., y_I, v) = -DS_delta(Z)."""

    grid: Grid
    W: np.ndarray

    def __post_init__(self) -> None:
        self.W = np.asarray(self.W, dtype=float)
        if self.W.ndim != 1 + self.grid.d or self.W.shape[1:] != self.grid.shape:
            raise DomainError(
                f"entropy-variable shape {self.W.shape} does not match grid {self.grid.shape}"
            )

    @property
    def y(self) -> np.ndarray:
        return self.W[:-1]

    @property
    def v(self) -> np.ndarray:
        return self.W[-1]

    def copy(self) -> "EntropyVars":
        return EntropyVars(self.grid, self.W.copy())


def to_entropy_vars(model: EntropyModel, field: StateField) -> EntropyVars:
    """Cellwise W = -DS_delta(Z); requires a strictly positive state."""
    bad = (field.Z <= 0).any(axis=0)
    if np.any(bad):
        cell = int(np.argmax(bad.ravel()))
        raise DomainError(f"non-positive state at cell {cell}; cannot form entropy variables")
    W = -model.entropy_gradient(field.c, field.u)
    return EntropyVars(field.grid, W)


def from_entropy_vars(model: EntropyModel, evars: EntropyVars) -> StateField:
    """Invert W = -DS_delta(Z) cellwise; the image is strictly positive."""
    y, v = evars.y, evars.v
    u = model.invert_energy(v, y)
    Z = np.empty((model.nspecies + 1,) + u.shape)
    for i, wi in enumerate(model.w):
        Z[i] = wi.value(u) * np.exp(y[i])
    Z[-1] = u
    if not np.all(np.isfinite(Z)) or np.any(Z <= 0):
        bad = int(np.argmax(~((Z > 0) & np.isfinite(Z)).all(axis=0).ravel()))
        raise InversionError(f"inverse image degenerate at cell {bad}")
    return StateField(evars.grid, Z)
