"""Reversible mass-action reaction networks and their entropy production.

Rates are expressed against the energy-dependent equilibria w_i(u): a single
reaction with stoichiometry (alpha, beta) and coefficient kappa contributes

    R_i = kappa(c, u) * (prod_j (c_j/w_j)^alpha_j - prod_j (c_j/w_j)^beta_j) * (beta_i - alpha_i)

which makes D_c S . R >= 0 automatic and vanishes exactly at c = w(u).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .thermo import DomainError, EntropyModel

_GROWTH_CAP_H = "weak-solution growth bound 2 + 2/d"
_GROWTH_CAP_HPRIME = "weak-solution growth bound 1 + 2/d"


@dataclass(frozen=True)
class Kappa:
    """Rate coefficient: a constant, optionally times c-monomial and bounded u-factor."""

    value: float
    c_powers: tuple[int, ...] | None = None
    u_mode: str = "const"

    def __post_init__(self) -> None:
        if self.value < 0:
            raise DomainError("rate coefficient must be non-negative")
        if self.u_mode not in ("const", "inv1pu"):
            raise DomainError(f"unknown kappa u_mode: {self.u_mode!r}")
        if self.c_powers is not None:
            object.__setattr__(self, "c_powers", tuple(int(p) for p in self.c_powers))
            if any(p < 0 for p in self.c_powers):
                raise DomainError("kappa c_powers must be non-negative integers")

    @property
    def c_degree(self) -> int:
        return 0 if self.c_powers is None else sum(self.c_powers)

    def evaluate(self, c: np.ndarray, u: np.ndarray):
        out = self.value * np.ones_like(np.asarray(u, dtype=float))
        if self.c_powers is not None:
            for j, p in enumerate(self.c_powers):
                if p:
                    out = out * c[j] ** p
        if self.u_mode == "inv1pu":
            out = out / (1.0 + u)
        return out


@dataclass(frozen=True)
class Reaction:
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    kappa: Kappa

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(int(b) for b in self.beta))
        if len(self.alpha) != len(self.beta):
            raise DomainError("stoichiometry vectors must have equal length")
        if any(a < 0 for a in self.alpha) or any(b < 0 for b in self.beta):
            raise DomainError("stoichiometric coefficients must be non-negative")
        if self.alpha == self.beta:
            raise DomainError("forward and backward stoichiometry must differ")

    @property
    def degree(self) -> int:
        """Total polynomial degree in c of the mass-action rate."""
        return self.kappa.c_degree + max(sum(self.alpha), sum(self.beta))


@dataclass(frozen=True)
class ReactionNetwork:
    nspecies: int
    reactions: tuple[Reaction, ...] = ()
    rho: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "reactions", tuple(self.reactions))
        if self.nspecies < 1:
            raise DomainError("network needs at least one species")
        if self.rho < 0:
            raise DomainError("regularization rho must be non-negative")
        for k, r in enumerate(self.reactions):
            if len(r.alpha) != self.nspecies:
                raise DomainError(f"reaction {k} has wrong stoichiometry length")


def _activities(reaction: Reaction, ratios: list[np.ndarray]):
    """Forward and backward mass-action activities (0^0 = 1 convention)."""
    a = 1.0
    b = 1.0
    for j in range(len(reaction.alpha)):
        if reaction.alpha[j]:
            a = a * ratios[j] ** reaction.alpha[j]
        if reaction.beta[j]:
            b = b * ratios[j] ** reaction.beta[j]
    shape = ratios[0].shape if ratios else ()
    return np.broadcast_to(a, shape).astype(float), np.broadcast_to(b, shape).astype(float)


def mass_action_rate(net: ReactionNetwork, model: EntropyModel, c, u) -> np.ndarray:
    """Net production rate per species, shape (I, ...)."""
    c = np.asarray(c, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(c < 0) or np.any(u <= 0):
        raise DomainError("mass_action_rate requires c >= 0 and u > 0")
    base = np.broadcast_shapes(c.shape[1:], u.shape)
    R = np.zeros((net.nspecies,) + base)
    ratios = [c[j] / model.w[j].value(u) + np.zeros(base) for j in range(net.nspecies)]
    for r in net.reactions:
        a, b = _activities(r, ratios)
        drive = r.kappa.evaluate(c, u) * (a - b)
        for i in range(net.nspecies):
            s = r.beta[i] - r.alpha[i]
            if s:
                R[i] += s * drive
    return R


def reaction_entropy_production(net: ReactionNetwork, model: EntropyModel, c, u):
    """Non-negative production sum_r kappa * (a - b) * (log a - log b).

    Terms with exactly one vanishing activity diverge and come back as +inf;
    a == b (including 0 == 0) contributes zero by the product limit.
    """
    c = np.asarray(c, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(c < 0) or np.any(u <= 0):
        raise DomainError("entropy production requires c >= 0 and u > 0")
    base = np.broadcast_shapes(c.shape[1:], u.shape)
    out = np.zeros(base)
    ratios = [c[j] / model.w[j].value(u) + np.zeros(base) for j in range(net.nspecies)]
    for r in net.reactions:
        a, b = _activities(r, ratios)
        kap = r.kappa.evaluate(c, u)
        both = (a > 0) & (b > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(both, (a - b) * (np.log(np.where(both, a, 1.0)) - np.log(np.where(both, b, 1.0))), 0.0)
        term = np.where(a == b, 0.0, np.where(both, term, np.inf))
        out = out + kap * term
    return float(out) if out.ndim == 0 else out


def regularize_rates(net: ReactionNetwork, R: np.ndarray) -> np.ndarray:
    """Saturating regularization R / (rho * |R| + 1); |R| is the Euclidean norm."""
    R = np.asarray(R, dtype=float)
    if net.rho == 0.0:
        return R.copy()
    norm = np.sqrt(np.sum(R * R, axis=0))
    return R / (net.rho * norm + 1.0)


def rate_jacobian(net: ReactionNetwork, model: EntropyModel, c, u) -> np.ndarray:
    """d(mass_action_rate)/d(c, u), shape (I, I+1, ...); needs c > 0."""
    c = np.asarray(c, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(c <= 0) or np.any(u <= 0):
        raise DomainError("rate_jacobian requires strictly positive states")
    I = net.nspecies
    base = np.broadcast_shapes(c.shape[1:], u.shape)
    J = np.zeros((I, I + 1) + base)
    ratios = [c[j] / model.w[j].value(u) + np.zeros(base) for j in range(I)]
    wlog = [model.w[j].d1(u) / model.w[j].value(u) for j in range(I)]
    for r in net.reactions:
        a, b = _activities(r, ratios)
        kap = r.kappa.evaluate(c, u)
        drive = a - b
        # d(drive)/dc_j and d(drive)/du via logarithmic derivatives
        dD = [(r.alpha[j] * a - r.beta[j] * b) / c[j] for j in range(I)]
        dDu = -a * sum(r.alpha[j] * wlog[j] for j in range(I)) + b * sum(
            r.beta[j] * wlog[j] for j in range(I)
        )
        dkap = [np.zeros(base) for _ in range(I)]
        dkapu = np.zeros(base)
        if r.kappa.c_powers is not None:
            for j, p in enumerate(r.kappa.c_powers):
                if p:
                    dkap[j] = p * kap / c[j]
        if r.kappa.u_mode == "inv1pu":
            dkapu = -kap / (1.0 + u)
        for i in range(I):
            s = r.beta[i] - r.alpha[i]
            if not s:
                continue
            for j in range(I):
                J[i, j] += s * (dkap[j] * drive + kap * dD[j])
            J[i, I] += s * (dkapu * drive + kap * dDu)
    return J


def regularized_rate_jacobian(net: ReactionNetwork, model: EntropyModel, c, u):
    """Return (R_rho, d R_rho / d(c,u)) with the saturation chain rule applied."""
    R = mass_action_rate(net, model, c, u)
    J = rate_jacobian(net, model, c, u)
    if net.rho == 0.0:
        return R, J
    norm = np.sqrt(np.sum(R * R, axis=0))
    scale = 1.0 / (net.rho * norm + 1.0)
    # d/dx [R * scale] = scale * dR - rho * scale^2 * R * (R . dR) / |R|
    RdotJ = np.einsum("i...,ik...->k...", R, J)
    safe = np.where(norm > 0, norm, 1.0)
    correction = (
        net.rho
        * scale**2
        / safe
        * np.where(norm > 0, 1.0, 0.0)
        * np.einsum("i...,k...->ik...", R, RdotJ)
    )
    return R * scale, J * scale - correction


@dataclass(frozen=True)
class GrowthRecord:
    index: int
    degree: int
    limit: float
    passed: bool


@dataclass(frozen=True)
class GrowthReport:
    regime: str
    dimension: int
    limit: float
    records: tuple[GrowthRecord, ...]
    renormalised: bool

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def violations(self) -> tuple[GrowthRecord, ...]:
        return tuple(r for r in self.records if not r.passed)


def validate_growth(net: ReactionNetwork, model: EntropyModel, regime: str, d: int) -> GrowthReport:
    """Compare each reaction's polynomial degree in c against the regime's cap.

    Regime "H" caps strictly below 2 + 2/d, "Hprime" strictly below 1 + 2/d,
    and "renorm" imposes no growth condition at all.
    """
    if regime not in ("H", "Hprime", "renorm"):
        raise DomainError(f"unknown regime: {regime!r}")
    renorm = regime == "renorm"
    if renorm:
        limit = float("inf")
    elif regime == "H":
        limit = 2.0 + 2.0 / d
    else:
        limit = 1.0 + 2.0 / d
    records = tuple(
        GrowthRecord(index=k, degree=r.degree, limit=limit, passed=renorm or r.degree < limit)
        for k, r in enumerate(net.reactions)
    )
    return GrowthReport(regime=regime, dimension=d, limit=limit, records=records, renormalised=renorm)
