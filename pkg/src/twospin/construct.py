"""Correlation-decay construction of a gadget realising a target field.

Given ferromagnetic (beta <= 1) parameters with a sufficiently large uniform
field, any target in (0, mu_star] can be approached by a tree gadget whose
log-field error shrinks geometrically in the recursion depth ell:

    |ln(achieved / target)| <= (ln gamma + ell) * alpha**ell.

Each level peels the target into k singleton children plus d-1 children that
realise either ~0 (a long star) or ~mu_star (a deep d-ary tree); the residual
target is pushed through the inverse edge ratio into the recursive child.
The per-level substitutions each perturb the parent's log-field by at most
alpha**ell / d, and the recursion contracts older errors by alpha, which is
what the depth-ell bound sums up.  A loop invariant (the residual equation
must stay solvable inside (0, mu_star]) is asserted at every level and the
construction aborts rather than continue past a violation.

At beta = 1 the published star/cutoff formulas divide by ln(beta) = 0; the
star length is then chosen directly from the exact decay rate edge_ratio(mu)
(which dominates beta**w in the proof), and the cutoff uses the same formula
with ln(edge_ratio(mu)) in place of ln(beta).  For beta < 1 both variants are
computed and the stricter one used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError, InvariantViolation
from .gadgets import Comb, DaryTree, GadgetTree, Star, gadget_field, tree_size
from .recursion import (DecayConstants, RecursionParams, construction_field_bound,
                        decay_constants, edge_ratio, invert_edge_ratio)

_REL_SLACK = 1e-9


@dataclass(frozen=True)
class LevelState:
    """Snapshot of the residual target before branch i is chosen."""
    rp: RecursionParams
    mu_star: float
    i: int
    mu_i: float


def check_invariant(state: LevelState) -> bool:
    """Whether mu * edge_ratio(x)**(d-i+1) = mu_i has a root in (0, mu_star].

    Equivalent sign-change form: mu*(1/gamma)**(d-i+1) < mu_i and
    mu_i <= mu*edge_ratio(mu_star)**(d-i+1) (open below, closed above).
    """
    p = state.rp.params
    k = state.rp.d - state.i + 1
    lo = p.mu * edge_ratio(0, p) ** k
    hi = p.mu * edge_ratio(state.mu_star, p) ** k
    return lo < state.mu_i <= hi


@dataclass(frozen=True)
class BranchChoice:
    """One of the d-1 intermediate children at a level: ideal value y and gadget."""
    i: int
    y: float
    gadget: GadgetTree


@dataclass(frozen=True)
class LevelRecord:
    """Per-level trace: bracket index k, residual targets, branches, cutoff data."""
    ell: int
    k: int
    mu_values: tuple
    branches: tuple
    delta: Optional[float]
    mu_hat_prime: Optional[float]
    terminal: str  # 'base-star' | 'cutoff-star' | 'recurse'
    terminal_w: Optional[int]


@dataclass(frozen=True)
class ConstructReport:
    """Certified result: the gadget, its exact field, and the depth-ell bound."""
    gadget: GadgetTree
    target: float
    achieved: float
    log_error: float
    bound: float
    size: int
    depth: int
    trace: tuple


def _power_bracket(base: float, ratio: float, target: float) -> int:
    """Largest integer k with target <= base * ratio**k, for 0 < ratio < 1."""
    k = math.floor(math.log(target / base) / math.log(ratio))
    while base * ratio ** k < target:
        k -= 1
    while base * ratio ** (k + 1) >= target:
        k += 1
    return k


def _branch_star_w(ell: int, rp: RecursionParams, C: DecayConstants) -> int:
    """Star length whose field is at most alpha**ell / d."""
    p = rp.params
    mu = float(p.mu)
    cap = C.alpha ** ell / rp.d
    hmu = edge_ratio(mu, p)
    w = max(0, math.ceil(math.log(cap / mu) / math.log(hmu)))
    while mu * hmu ** w > cap:
        w += 1
    while w > 0 and mu * hmu ** (w - 1) <= cap:
        w -= 1
    if p.beta < 1:
        w_pub = math.floor((ell * math.log(C.alpha) - math.log(rp.d * mu))
                           / math.log(p.beta)) + 1
        w = max(w, w_pub)
    return w


def _branch_tree_t(ell: int, rp: RecursionParams, C: DecayConstants) -> int:
    """Tree depth whose field exceeds mu_star by a factor <= exp(alpha**ell / d)."""
    t = math.floor((ell * math.log(C.alpha) - math.log(rp.d) - math.log(C.iota))
                   / math.log(C.c)) + 1
    return max(0, t)


def _cutoff_delta(ell: int, rp: RecursionParams, C: DecayConstants) -> float:
    """Residual size below which a single star replaces the recursive child."""
    p = rp.params
    mu, gamma = float(p.mu), float(p.gamma)
    ln_gamma = math.log(gamma)
    ln_alpha = math.log(C.alpha)
    ln_dmu = math.log(rp.d * mu)
    rates = [math.log(edge_ratio(mu, p))]
    if p.beta < 1:
        rates.append(math.log(p.beta))
    return min(
        math.exp(-(ln_gamma * ln_alpha / L) * ell + ln_gamma * ln_dmu / L
                 + math.log(mu / gamma))
        for L in rates)


def _cutoff_star_w(delta: float, rp: RecursionParams) -> int:
    """Largest w with mu * (1/gamma)**w > delta."""
    p = rp.params
    mu, gamma = float(p.mu), float(p.gamma)
    if not mu > delta:
        raise InvariantViolation(f"cutoff {delta} is not below mu={mu}")
    w = max(0, math.ceil(math.log(mu / delta) / math.log(gamma)) - 1)
    while mu * gamma ** -(w + 1) > delta:
        w += 1
    while w > 0 and not mu * gamma ** -w > delta:
        w -= 1
    return w


def _checked_residual(value: float, state: LevelState, where: str) -> float:
    """Assert the loop invariant, absorbing float drift at the closed end."""
    p = state.rp.params
    k = state.rp.d - state.i + 1
    hi = p.mu * edge_ratio(state.mu_star, p) ** k
    if value > hi:
        if value <= hi * (1 + _REL_SLACK):
            value = hi
        else:
            raise InvariantViolation(
                f"{where}: residual {value} exceeds mu*edge_ratio(mu_star)**{k} = {hi}")
    probe = LevelState(state.rp, state.mu_star, state.i, value)
    if not check_invariant(probe):
        lo = p.mu * edge_ratio(0, p) ** k
        raise InvariantViolation(
            f"{where}: residual {value} left the solvable window ({lo}, {hi}]")
    return value


def _construct(ell: int, target: float, rp: RecursionParams,
               C: DecayConstants) -> tuple[GadgetTree, list]:
    p = rp.params
    mu = float(p.mu)
    hmu = edge_ratio(mu, p)

    if ell == 0:
        k = _power_bracket(mu, hmu, target)
        if k < 1:
            raise InvariantViolation(
                f"base case expects a positive star exponent, got k={k} for target {target}")
        rec = LevelRecord(ell=0, k=k, mu_values=(), branches=(), delta=None,
                          mu_hat_prime=None, terminal="base-star", terminal_w=k)
        return Star(k), [rec]

    k = max(0, _power_bracket(C.mu_star, hmu, target))
    singletons = [Star(0)] * k
    mu_i = target / hmu ** k
    mu_i = _checked_residual(mu_i, LevelState(rp, C.mu_star, 1, mu_i), f"level ell={ell} init")

    mu_values = [mu_i]
    branches = []
    h_star = edge_ratio(C.mu_star, p)
    h_zero = edge_ratio(0, p)
    for i in range(1, rp.d):
        if mu * h_star * h_zero ** (rp.d - i) >= mu_i:
            y = 0.0
            child = Star(_branch_star_w(ell, rp, C))
        else:
            y = C.mu_star
            child = DaryTree(rp.d, _branch_tree_t(ell, rp, C))
        branches.append(BranchChoice(i=i, y=y, gadget=child))
        mu_i = mu_i / (h_zero if y == 0.0 else h_star)
        mu_i = _checked_residual(mu_i, LevelState(rp, C.mu_star, i + 1, mu_i),
                                 f"level ell={ell} step i={i}")
        mu_values.append(mu_i)

    ratio = mu_i / mu
    mu_hat_prime = invert_edge_ratio(ratio, p)
    if mu_hat_prime > C.mu_star:
        if mu_hat_prime <= C.mu_star * (1 + _REL_SLACK):
            mu_hat_prime = C.mu_star
        else:
            raise InvariantViolation(
                f"residual target {mu_hat_prime} exceeds mu_star {C.mu_star}")

    delta = _cutoff_delta(ell, rp, C)
    if mu_hat_prime <= delta:
        w = _cutoff_star_w(delta, rp)
        tail: GadgetTree = Star(w)
        rec = LevelRecord(ell=ell, k=k, mu_values=tuple(mu_values),
                          branches=tuple(branches), delta=delta,
                          mu_hat_prime=mu_hat_prime, terminal="cutoff-star",
                          terminal_w=w)
        return Comb(tuple(singletons + [b.gadget for b in branches] + [tail])), [rec]

    child_tree, child_recs = _construct(ell - 1, mu_hat_prime, rp, C)
    rec = LevelRecord(ell=ell, k=k, mu_values=tuple(mu_values),
                      branches=tuple(branches), delta=delta,
                      mu_hat_prime=mu_hat_prime, terminal="recurse", terminal_w=None)
    tree = Comb(tuple(singletons + [b.gadget for b in branches] + [child_tree]))
    return tree, [rec] + child_recs


def _prepare(ell: int, target: float, rp: RecursionParams,
             constants: Optional[DecayConstants]) -> tuple[float, DecayConstants]:
    if ell < 0:
        raise DomainError("depth ell must be a non-negative integer")
    bound = construction_field_bound(rp.params, rp.d)
    if not rp.params.mu > bound:
        raise DomainError(
            f"uniform field mu={rp.params.mu} must exceed {bound} for the "
            "construction's solvability invariant")
    C = constants if constants is not None else decay_constants(rp)
    if not target > 0:
        raise DomainError("target field must be positive")
    if target > C.mu_star:
        if target <= C.mu_star * (1 + 1e-12):
            target = C.mu_star
        else:
            raise DomainError(
                f"target {target} exceeds the largest realisable field {C.mu_star}")
    return target, C


def construct(ell: int, target: float, rp: RecursionParams,
              constants: Optional[DecayConstants] = None) -> GadgetTree:
    """Gadget whose field approximates target within (ln gamma + ell)*alpha**ell."""
    target, C = _prepare(ell, target, rp, constants)
    tree, _ = _construct(ell, target, rp, C)
    return tree


def error_bound(ell: int, p_gamma: float, alpha: float) -> float:
    """The certified log-field error budget (ln gamma + ell) * alpha**ell."""
    return (math.log(p_gamma) + ell) * alpha ** ell


def certify(ell: int, target: float, rp: RecursionParams,
            constants: Optional[DecayConstants] = None) -> ConstructReport:
    """Run the construction, evaluate the gadget exactly, report error vs bound."""
    target, C = _prepare(ell, target, rp, constants)
    tree, trace = _construct(ell, target, rp, C)
    achieved = gadget_field(tree, rp.params)
    return ConstructReport(
        gadget=tree,
        target=target,
        achieved=achieved,
        log_error=math.log(achieved / target),
        bound=error_bound(ell, float(rp.params.gamma), C.alpha),
        size=tree_size(tree),
        depth=ell,
        trace=tuple(trace),
    )
