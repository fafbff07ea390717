"""Solve each family's free parameter for a target mean photon number."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .fock import R_DB_MAX, R_MAX, db_to_r, mean_photon, r_to_db
from .statespec import DEFAULT_CUTOFF, StateSpec, build_escalating

SQUEEZED_FAMILIES = ("squeezed_vacuum", "squeezed_single", "two_subtracted")
CAT_FAMILIES = ("even_cat", "odd_cat")
FAMILIES = SQUEEZED_FAMILIES + CAT_FAMILIES
ALIASES = {"one_subtracted": "squeezed_single"}

ALPHA_BRACKET = (1e-6, 6.0)
MAX_ITER = 200
PARAM_TOL = 1e-12

__all__ = [
    "MatchSolution",
    "db_to_r",
    "r_to_db",
    "solve_squeezed_family",
    "solve_cat_alpha",
    "solve_fock",
    "matched_set",
    "FAMILIES",
    "MATCH_HEADER",
]


@dataclass(frozen=True)
class MatchSolution:
    family: str
    target_n: float
    solved_parameter: float | None
    achieved_n: float | None
    r_db: float | None
    feasible: bool
    reason: str = ""

    def state_spec(self, cutoff: int = DEFAULT_CUTOFF) -> StateSpec:
        if not self.feasible:
            raise ValueError(f"{self.family} at target {self.target_n}: {self.reason}")
        p = self.solved_parameter
        if self.family == "fock":
            return StateSpec.make("fock", cutoff, n=int(p))
        if self.family == "squeezed_vacuum":
            return StateSpec.make("squeezed_fock", cutoff, r=p, theta=0.0, n=0)
        if self.family == "squeezed_single":
            return StateSpec.make("squeezed_fock", cutoff, r=p, theta=0.0, n=1)
        if self.family == "two_subtracted":
            return StateSpec.make("subtracted_squeezed", cutoff, r=p, theta=0.0, k=2)
        return StateSpec.make(self.family, cutoff, alpha=p)

    def csv_row(self) -> dict:
        second = self.r_db if self.family in SQUEEZED_FAMILIES else self.solved_parameter
        return {
            "family": self.family,
            "target_n": self.target_n,
            "parameter": self.solved_parameter,
            "r_db_or_alpha": second,
            "achieved_n": self.achieved_n,
            "feasible": self.feasible,
            "reason": self.reason,
        }


MATCH_HEADER = ("family", "target_n", "parameter", "r_db_or_alpha", "achieved_n", "feasible", "reason")


def _infeasible(family, target, reason):
    return MatchSolution(family, float(target), None, None, None, False, reason)


def _root(func, target, lo, hi):
    """Root of the increasing ``func(x) = target`` on ``[lo, hi]``."""
    return brentq(lambda x: func(x) - target, lo, hi, xtol=PARAM_TOL, maxiter=MAX_ITER)


def two_subtracted_mean_photon(r: float, cutoff: int = DEFAULT_CUTOFF) -> float:
    """``<n>`` of normalised ``a^2 S(r)|0>`` through state construction."""
    if r <= 0.0:
        return 0.0
    spec = StateSpec.make("subtracted_squeezed", cutoff, r=r, theta=0.0, k=2)
    return mean_photon(build_escalating(spec))


def solve_squeezed_family(family: str, target_n: float, cutoff: int = DEFAULT_CUTOFF) -> MatchSolution:
    family = ALIASES.get(family, family)
    if family not in SQUEEZED_FAMILIES:
        raise ValueError(f"not a squeezed family: {family!r}")
    target = float(target_n)
    if family == "squeezed_vacuum":
        if target < 0:
            return _infeasible(family, target, "target below family minimum 0")
        r = math.asinh(math.sqrt(target))
        achieved = lambda r: math.sinh(r) ** 2  # noqa: E731
    elif family == "squeezed_single":
        if target < 1:
            return _infeasible(family, target, "target below family minimum 1")
        r = math.asinh(math.sqrt((target - 1.0) / 3.0))
        achieved = lambda r: 1.0 + 3.0 * math.sinh(r) ** 2  # noqa: E731
    else:
        if target <= 0:
            return _infeasible(family, target, "target below family minimum 0")
        top = two_subtracted_mean_photon(R_MAX, cutoff)
        if target > top:
            return _infeasible(family, target, f"requires squeezing above {R_DB_MAX} dB cap")
        r = _root(lambda r: two_subtracted_mean_photon(r, cutoff), target, 0.0, R_MAX)
        achieved = lambda r: two_subtracted_mean_photon(r, cutoff)  # noqa: E731
    if r > R_MAX:
        return _infeasible(family, target, f"requires {r_to_db(r):.4f} dB, above {R_DB_MAX} dB cap")
    return MatchSolution(family, target, r, achieved(r), r_to_db(r), True)


def cat_mean_photon(alpha: float, parity: str) -> float:
    u = alpha * alpha
    if parity == "even":
        return u * math.tanh(u)
    return u / math.tanh(u)


def solve_cat_alpha(parity: str, target_n: float) -> MatchSolution:
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    family = f"{parity}_cat"
    target = float(target_n)
    floor = 0.0 if parity == "even" else 1.0
    if target <= floor:
        return _infeasible(family, target, f"target must exceed {floor:g} for the {parity} cat")
    lo, hi = ALPHA_BRACKET
    if target > cat_mean_photon(hi, parity):
        return _infeasible(family, target, f"requires alpha above {hi:g}")
    alpha = _root(lambda a: cat_mean_photon(a, parity), target, lo, hi)
    return MatchSolution(family, target, alpha, cat_mean_photon(alpha, parity), None, True)


def solve_fock(target_n: float) -> MatchSolution:
    target = float(target_n)
    if target < 0 or not target.is_integer():
        return _infeasible("fock", target, "Fock references exist only at integer targets")
    return MatchSolution("fock", target, target, target, None, True)


def solve(family: str, target_n: float, cutoff: int = DEFAULT_CUTOFF) -> MatchSolution:
    family = ALIASES.get(family, family)
    if family == "fock":
        return solve_fock(target_n)
    if family in CAT_FAMILIES:
        return solve_cat_alpha(family.split("_")[0], target_n)
    if family in SQUEEZED_FAMILIES:
        return solve_squeezed_family(family, target_n, cutoff)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES + ('fock',)}")


def matched_set(target_n: float, families=FAMILIES, cutoff: int = DEFAULT_CUTOFF) -> list[MatchSolution]:
    families = list(families)
    if not families:
        raise ValueError("family list is empty")
    return [solve(f, target_n, cutoff) for f in families]
