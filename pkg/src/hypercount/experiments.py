"""Desk-scale experiments: switching bound, degree tails, variance, sigma^2
concentration, typical-set equivalence and estimate convergence.

Every function returns a plain report object with a ``to_json`` method and,
where the experiment produces per-point data, ``rows()`` for CSV output.
Monte Carlo experiments are deterministic for a fixed seed.
"""
from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .asymptotic import (
    dense_prob_estimate,
    error_eta_k,
    error_psi_k,
    error_xi_dense,
    error_xi_sparse,
    regular_count_estimate,
    sparse_prob_estimate,
)
from .core import LogValue, ParameterError, Params, as_tuple, fraction_str, sigma_sq
from .core import plus
from .exact import ExactCounter, count_exact, count_with_edges, default_counter
from .models import omega_partitions, prob_binomial_model, sample_many


@dataclass
class ExperimentConfig:
    params: Params
    trials: int = 1000
    seed: int = 0
    family: list[Params] | None = None
    output: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be at least 1")


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# ──────────────────────────────────────────────────────────────────────────────
# Switching bound
# ──────────────────────────────────────────────────────────────────────────────

def switching_precondition(d, k: int) -> bool:
    """``((q+1)^2 + Delta^{1/q}) Delta <= m/8``, decided exactly."""
    degs = as_tuple(d)
    q = k - 1
    top = max(degs)
    if sum(degs) % k:
        return False
    m = sum(degs) // k
    if top == 0:
        return True
    # Delta^{1/q} <= slack  <=>  Delta <= slack^q  (slack >= 0)
    slack = Fraction(m, 8 * top) - (q + 1) ** 2
    return slack >= 0 and top <= slack ** q


def switching_bound(d, k: int, K) -> Fraction:
    """``2 q! prod_K d / (m (q+1))^q``."""
    degs = as_tuple(d)
    q = k - 1
    m = sum(degs) // k
    if m == 0:
        raise ParameterError("bound needs m > 0")
    return Fraction(2 * math.factorial(q) * math.prod(degs[v] for v in K), (m * (q + 1)) ** q)


def edge_classes(d, k: int) -> list[tuple[tuple[int, ...], int]]:
    """One k-set per multiset of degrees, with the number of k-sets sharing it.

    Any two k-sets with the same degree multiset are swapped by a permutation
    fixing ``d``, so they have the same edge probability.
    """
    degs = as_tuple(d)
    by_degree = defaultdict(list)
    for v, x in enumerate(degs):
        by_degree[x].append(v)
    values = sorted(by_degree)
    out = []

    def rec(i: int, left: int, chosen: list[int], weight: int):
        if left == 0:
            out.append((tuple(sorted(chosen)), weight))
            return
        if i == len(values):
            return
        pool = by_degree[values[i]]
        for t in range(min(left, len(pool)), -1, -1):
            rec(i + 1, left - t, chosen + pool[:t], weight * math.comb(len(pool), t))

    rec(0, k, [], 1)
    return out


@dataclass
class SwitchingReport:
    instances: int = 0
    skipped: int = 0
    checked_ksets: int = 0
    violated: int = 0
    rows_: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"instances": self.instances, "skipped": self.skipped,
                "checked_ksets": self.checked_ksets, "violated": self.violated}

    def rows(self) -> list[dict]:
        return self.rows_


def switching_bound_check(corpus: Iterable[tuple[Sequence[int], int]],
                          counter: ExactCounter | None = None) -> SwitchingReport:
    """Compare exact ``P_K`` with the switching bound on every instance meeting the precondition."""
    counter = counter or default_counter()
    rep = SwitchingReport()
    for d, k in corpus:
        degs = as_tuple(d)
        rep.instances += 1
        if sum(degs) == 0 or not switching_precondition(degs, k):
            rep.skipped += 1
            continue
        total = count_exact(degs, k, counter=counter)
        if total == 0:
            rep.skipped += 1
            continue
        worst = Fraction(0)
        for K, weight in edge_classes(degs, k):
            prob = Fraction(count_with_edges(degs, k, [K], counter=counter), total)
            bound = switching_bound(degs, k, K)
            rep.checked_ksets += weight
            if prob > bound:
                rep.violated += weight
            if bound:
                worst = max(worst, prob / bound)
        rep.rows_.append({"n": len(degs), "k": k, "m": sum(degs) // k, "max_ratio": float(worst)})
    return rep


def switching_corpus(n_max: int = 6, m_max: int = 5):
    """Exhaustive small instances (which never meet the precondition) plus large sparse ones that do."""
    for k in (2, 3, 4):
        for n in range(k, n_max + 1):
            for m in range(1, m_max + 1):
                for d, _ in omega_partitions(n, k * m):
                    yield d, k
    yield (1,) * 80, 2
    yield (2,) * 92 + (1,) * 8, 2
    yield (1,) * 240, 3
    yield (1,) * 240 + (0,) * 10, 3


# ──────────────────────────────────────────────────────────────────────────────
# Degree tails and variance
# ──────────────────────────────────────────────────────────────────────────────

def tail_bound(d: float, alpha: float) -> float:
    return 2 * math.exp(-alpha ** 2 / (2 * (d + alpha / 3)))


@dataclass
class TailReport:
    params: Params
    trials: int
    points: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(p["pass"] for p in self.points)

    def to_json(self) -> dict:
        return {"params": self.params.to_json(), "trials": self.trials,
                "passed": self.passed, "points": self.points}

    def rows(self) -> list[dict]:
        return self.points


def degree_tail_experiment(p: Params, alpha_grid: Sequence[float], trials: int, seed: int) -> TailReport:
    """Empirical ``Pr(|d_0 - d| >= alpha)`` under both samplers against the analytic bound."""
    if trials < 1000:
        raise ParameterError("tail experiment needs at least 1000 trials")
    rep = TailReport(p, trials)
    d = float(p.d)
    for model in ("hypergraph", "binomial"):
        first = sample_many(model, p, trials, seed)[:, 0]
        dev = np.abs(first - d)
        for alpha in alpha_grid:
            frac = float(np.mean(dev >= alpha - 1e-12))
            se = math.sqrt(frac * (1 - frac) / trials)
            bound = tail_bound(d, alpha)
            rep.points.append({
                "model": model, "alpha": alpha, "empirical": frac, "se": se,
                "bound": bound, "pass": frac <= bound + 3 * se,
            })
    return rep


def hypergeom_variance(p: Params) -> Fraction:
    """Exact ``Var d_1`` in the uniform model: hypergeometric with (C(n,k), m, C(n-1,k-1))."""
    big_n, big_k, m = p.n_ksets, p.edge_slots, p.m
    if big_n == 1:
        return Fraction(0)
    r = Fraction(big_k, big_n)
    return m * r * (1 - r) * Fraction(big_n - m, big_n - 1)


@dataclass
class VarianceReport:
    params: Params
    trials: int
    exact: float
    empirical: float
    se: float
    approx: float
    ratio_gap: float
    passed_sampling: bool
    passed_approx: bool

    @property
    def passed(self) -> bool:
        return self.passed_sampling and self.passed_approx

    def to_json(self) -> dict:
        out = asdict(self)
        out["params"] = self.params.to_json()
        out["passed"] = self.passed
        return out


def variance_check(p: Params, trials: int, seed: int) -> VarianceReport:
    """Exact hypergeometric variance vs the sample variance of ``d_1`` vs ``d(1-mu)``."""
    if trials < 2:
        raise ParameterError("variance check needs at least 2 trials")
    x = sample_many("hypergraph", p, trials, seed)[:, 0].astype(float)
    exact = float(hypergeom_variance(p))
    emp = float(np.var(x, ddof=1))
    c = x - x.mean()
    m4 = float(np.mean(c ** 4))
    # SE of the sample variance: sqrt((mu4 - sigma^4)/T)
    se = math.sqrt(max(m4 - emp ** 2, 0.0) / trials)
    approx = float(p.d * (1 - p.mu))
    if approx == 0:
        gap = 0.0 if exact == 0 else math.inf
    else:
        gap = abs(exact / approx - 1)
    ok_sampling = abs(emp - exact) <= 4 * se if se > 0 else emp == exact
    return VarianceReport(p, trials, exact, emp, se, approx, gap,
                          ok_sampling, gap <= 2 * p.k / p.n)


# ──────────────────────────────────────────────────────────────────────────────
# sigma^2 concentration
# ──────────────────────────────────────────────────────────────────────────────

def binomial_model_variance(p: Params) -> Fraction:
    """``Var d_1`` under B: hypergeometric with (n C(n-1,k-1), km, C(n-1,k-1))."""
    total = p.n * p.edge_slots
    if total <= 1:
        return Fraction(0)
    r = Fraction(p.edge_slots, total)
    draws = p.k * p.m
    return draws * r * (1 - r) * Fraction(total - draws, total - 1)


def sigma_deviation(p: Params, beta: float) -> float:
    """``2d (beta k log n / sqrt n + sqrt((beta k log n)^3 / (n d)))``."""
    d = float(p.d)
    if d == 0:
        return 0.0
    t = beta * p.k * math.log(p.n)
    return 2 * d * (t / math.sqrt(p.n) + math.sqrt(t ** 3 / (p.n * d)))


@dataclass
class SigmaReport:
    params: Params
    beta: float
    trials: int
    deviation: float
    threshold: float
    assertive: bool
    models: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(m["fraction"] <= self.threshold for m in self.models.values()) if self.assertive else True

    def to_json(self) -> dict:
        return {"params": self.params.to_json(), "beta": self.beta, "trials": self.trials,
                "deviation": self.deviation, "threshold": self.threshold,
                "assertive": self.assertive, "passed": self.passed, "models": self.models}


def sigma_concentration_experiment(p: Params, beta: float, trials: int, seed: int,
                                   multiplier: float = 1.0) -> SigmaReport:
    """Fraction of samples whose ``sigma^2`` strays from ``Var d_1`` by more than the deviation.

    Assertions apply only when ``beta k >= 100``; otherwise the report is informational.
    """
    dev = sigma_deviation(p, beta)
    threshold = max(p.n ** (-beta / 10) * multiplier, 5 / trials)
    rep = SigmaReport(p, beta, trials, dev, threshold, beta * p.k >= 100)
    targets = {"hypergraph": float(hypergeom_variance(p)), "binomial": float(binomial_model_variance(p))}
    for model, var in targets.items():
        samples = sample_many(model, p, trials, seed).astype(float)
        s2 = np.mean((samples - float(p.d)) ** 2, axis=1)
        frac = float(np.mean(np.abs(s2 - var) > dev))
        rep.models[model] = {"variance": var, "mean_sigma_sq": float(s2.mean()), "fraction": frac}
    return rep


# ──────────────────────────────────────────────────────────────────────────────
# Typical set
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class TypicalSetSpec:
    regime: str
    multiplier: float = 1.0

    def __post_init__(self):
        if self.regime not in ("sparse", "dense"):
            raise ParameterError(f"unknown regime {self.regime!r}")
        if self.multiplier <= 0:
            raise ParameterError("band multiplier must be positive")

    def xi(self, p: Params) -> float:
        base = error_xi_sparse(p) if self.regime == "sparse" else error_xi_dense(p)
        return base * self.multiplier

    def centre(self, p: Params) -> Fraction:
        return p.d if self.regime == "sparse" else p.d * (1 - p.mu)

    def contains(self, d, p: Params) -> bool:
        """``|sigma^2(d) - centre| <= d xi``, with the float comparison made on exact sigma^2."""
        return abs(float(sigma_sq(d) - self.centre(p))) <= float(p.d) * self.xi(p)


@dataclass
class TypicalMember:
    params: Params
    xi: float
    band_size: int
    max_deviation: float
    mean_deviation: float
    mass_d: float
    mass_b: float
    regular_in_band: bool | None


@dataclass
class TypicalReport:
    spec: TypicalSetSpec
    members: list[TypicalMember] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        devs = [m.max_deviation for m in self.members]
        return all(b <= a for a, b in zip(devs, devs[1:]))

    @property
    def masses_ok(self) -> bool:
        return all(m.mass_d > 0.5 and m.mass_b > 0.5 for m in self.members)

    @property
    def passed(self) -> bool:
        return self.monotone and self.masses_ok

    def rows(self) -> list[dict]:
        return [{
            "n": m.params.n, "k": m.params.k, "m": m.params.m, "xi": m.xi,
            "band_size": m.band_size, "max_deviation": m.max_deviation,
            "mean_deviation": m.mean_deviation, "mass_d": m.mass_d, "mass_b": m.mass_b,
            "regular_in_band": m.regular_in_band,
        } for m in self.members]

    def to_json(self) -> dict:
        return {"regime": self.spec.regime, "multiplier": self.spec.multiplier,
                "monotone": self.monotone, "masses_ok": self.masses_ok,
                "passed": self.passed, "members": self.rows()}


def typical_set_ratio_study(family: Sequence[Params], regime: str = "sparse", multiplier: float = 1.0,
                            counter: ExactCounter | None = None) -> TypicalReport:
    """Exhaustive ``Pr_D / Pr_B`` over the band, one family member at a time.

    ``mean_deviation`` is the ``Pr_D``-weighted mean of ``|ratio - 1|`` over the band.
    """
    counter = counter or default_counter()
    spec = TypicalSetSpec(regime, multiplier)
    rep = TypicalReport(spec)
    for p in family:
        total = math.comb(p.n_ksets, p.m)
        size, worst, weighted = 0, 0.0, Fraction(0)
        mass_d = mass_b = Fraction(0)
        for part, mult in omega_partitions(p.n, p.k * p.m, p.edge_slots):
            if not spec.contains(part, p):
                continue
            pr_d = Fraction(count_exact(part, p.k, counter=counter), total)
            pr_b = prob_binomial_model(part, p)
            size += mult
            mass_d += mult * pr_d
            mass_b += mult * pr_b
            dev = abs(pr_d / pr_b - 1)
            worst = max(worst, float(dev))
            weighted += mult * pr_d * dev
        regular = None
        if (p.k * p.m) % p.n == 0:
            regular = spec.contains((p.k * p.m // p.n,) * p.n, p)
        rep.members.append(TypicalMember(
            p, spec.xi(p), size, worst,
            float(weighted / mass_d) if mass_d else 0.0,
            float(mass_d), float(mass_b), regular,
        ))
    return rep


# ──────────────────────────────────────────────────────────────────────────────
# Estimate convergence
# ──────────────────────────────────────────────────────────────────────────────

@dataclass
class ConvergenceReport:
    formula: str
    series: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        if not self.series:
            return True
        errs = [row["abs_log_ratio"] for row in self.series if row["role"] == "regular"]
        if not errs:
            errs = [row["abs_log_ratio"] for row in self.series]
        return errs[-1] == min(errs)

    @property
    def non_increasing(self) -> bool:
        errs = [row["abs_log_ratio"] for row in self.series if row["role"] == "regular"]
        return all(b <= a for a, b in zip(errs, errs[1:]))

    def rows(self) -> list[dict]:
        return self.series

    def to_json(self) -> dict:
        return {"formula": self.formula, "passed": self.passed,
                "non_increasing": self.non_increasing, "series": self.series}


def _extremes(p: Params) -> list[tuple[int, ...]]:
    """Lowest- and highest-variance sorted representatives of Omega."""
    parts = [part for part, _ in omega_partitions(p.n, p.k * p.m, p.edge_slots)]
    return [min(parts, key=sigma_sq), max(parts, key=sigma_sq)]


def estimate_convergence_study(family: Sequence[Params], formula: str, *, varphi: float = 0.45,
                               counter: ExactCounter | None = None,
                               include_extremes: bool = False) -> ConvergenceReport:
    """``log(exact / estimate)`` along the family, with the matching error term."""
    counter = counter or default_counter()
    rep = ConvergenceReport(formula)
    for p in family:
        seqs = []
        if (p.k * p.m) % p.n == 0:
            seqs.append(("regular", (p.k * p.m // p.n,) * p.n))
        if include_extremes:
            seqs.extend(("extreme", s) for s in _extremes(p))
        for role, d in seqs:
            exact = count_exact(d, p.k, counter=counter)
            if exact == 0:
                continue
            if formula == "regular":
                est = regular_count_estimate(p.n, p.k, d[0])
                ref = LogValue.from_value(exact)
                err = float("nan")
            elif formula == "dense":
                est = dense_prob_estimate(d, p)
                ref = LogValue.from_value(Fraction(exact, math.comb(p.n_ksets, p.m)))
                err = error_eta_k(p, varphi) if p.k >= 3 else float("nan")
            elif formula == "sparse":
                est = sparse_prob_estimate(d, p)
                ref = LogValue.from_value(Fraction(exact, math.comb(p.n_ksets, p.m)))
                err = error_psi_k(p, max(d))
            else:
                raise ParameterError(f"unknown formula {formula!r}")
            log_ratio = ref.ln - est.ln
            rep.series.append({
                "n": p.n, "k": p.k, "m": p.m, "role": role, "d": list(d),
                "log_ratio": log_ratio, "abs_log_ratio": abs(log_ratio), "error_term": err,
            })
    return rep


# ──────────────────────────────────────────────────────────────────────────────
# Star-formula accuracy
# ──────────────────────────────────────────────────────────────────────────────

@dataclass
class StarAccuracy:
    d: tuple
    k: int
    p_err: float
    y_err: float
    r_err: float
    crude_err: float
    points: int

    def to_json(self) -> dict:
        out = asdict(self)
        out["d"] = list(self.d)
        return out


def star_accuracy(d, k: int, counter: ExactCounter | None = None) -> StarAccuracy:
    """Max relative errors of P*, Y*, R* against the oracle at one sequence.

    P and Y are compared at ``d`` over every edge and every path with a
    positive exact value.  R is compared at ``x = d + e_c`` for every ``c``
    and every ordered pair ``a != b``, next to the crude ratio ``x_a / x_b``.
    """
    from .asymptotic import pstar, rstar, ystar
    from .operators import ExactState

    degs = as_tuple(d)
    n = len(degs)
    ex = ExactState(n, k, counter)
    p_err = y_err = r_err = crude = 0.0
    points = 0
    for K in combinations(range(n), k):
        P = ex.p(K[:-1], K[-1], degs)
        if P:
            p_err = max(p_err, abs(float(pstar(degs, k, K) / P) - 1))
            points += 1
    for K in combinations(range(n), k - 1):
        outside = [u for u in range(n) if u not in K]
        for a in outside:
            for b in outside:
                if a == b:
                    continue
                Y = ex.y(a, K, b, degs)
                if Y:
                    y_err = max(y_err, abs(float(ystar(degs, k, a, K, b) / Y) - 1))
                    points += 1
    for c in range(n):
        x = plus(degs, [c])
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                R = ex.r(a, b, x)
                if not R:
                    continue
                r_err = max(r_err, abs(float(rstar(x, k, a, b) / R) - 1))
                crude = max(crude, abs(float(Fraction(x[a], x[b]) / R) - 1))
                points += 1
    return StarAccuracy(degs, k, p_err, y_err, r_err, crude, points)
