"""One-step visibility-change oracles.

For a state at time t-1 and a candidate arrival with known fitness (and,
for the spatial kernel, location), three quantities are computable:

* the closed-form expected change of a node's visibility (exact for the
  degree and additive kernels; an asymptotic lower bound for the
  multiplicative kernel; an asymptotic approximation for the general
  kernel; an asymptotic (lower, upper) pair for the spatial kernel),
* the exact expectation by enumerating every possible attachment outcome,
* a Monte-Carlo estimate of the same expectation with a standard error.

``verify_lemma`` runs the applicable comparison and wraps the verdict in a
``LemmaReport``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .kernels import AF, BA, GF, MF, SPATIAL, KernelSpec


@dataclass(frozen=True)
class SpatialBounds:
    """Asymptotic lower/upper envelope for the spatial expected change."""

    lower: float
    upper: float


@dataclass(frozen=True)
class TolerancePolicy:
    """Explicit pass/fail rules so every verdict is attributable.

    ``exact_rel`` gates the closed-form kernels, ``slack_rel`` widens the
    asymptotic bounds/approximations, and ``mc_sigma`` converts Monte-Carlo
    standard errors into slack.
    """

    exact_rel: float = 1e-12
    slack_rel: float = 0.5
    mc_sigma: float = 3.0

    def describe(self, lemma_id: str) -> str:
        if lemma_id in ("ba_exact", "af_exact"):
            return f"|analytic - enumerated| <= {self.exact_rel} * max(1, |analytic|)"
        if lemma_id in ("mf_bound", "gf_approx"):
            return (f"sign/ordering vs analytic with slack {self.slack_rel}*scale"
                    f" + {self.mc_sigma}*stderr")
        return ("own-location change <= upper + slack and ball-restricted change"
                f" >= lower - slack, slack = {self.slack_rel}*scale"
                f" + {self.mc_sigma}*stderr")


@dataclass
class LemmaReport:
    """Analytic value or bounds vs ground truth for one state and one claim."""

    lemma_id: str
    t: int
    node: int
    xi_t: float
    chi_t: Optional[tuple[float, float]] = None
    epsilon: Optional[float] = None
    analytic: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    enumerated: Optional[float] = None
    mc_mean: Optional[float] = None
    mc_stderr: Optional[float] = None
    tolerance: str = ""
    passed: bool = False

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def ball_probability_mc(center, epsilon: float, m: int, rng: np.random.Generator) -> float:
    """Monte-Carlo mass of the epsilon-ball around ``center`` under uniform locations."""
    pts = rng.random((m, 2))
    d2 = (pts[:, 0] - center[0]) ** 2 + (pts[:, 1] - center[1]) ** 2
    return float(np.mean(d2 < epsilon * epsilon))


def analytic_expected_change(state, i: int, kernel: KernelSpec, xi_t: float,
                             chi_t=None, *, epsilon: float | None = None,
                             ball_prob: float | None = None):
    """Closed-form expected one-step change of node i's visibility.

    The state is the graph just before the arrival; the arriving node's
    fitness is ``xi_t``.  Returns a float for the location-free kernels and
    a ``SpatialBounds`` pair for the spatial kernel, which additionally
    needs ``epsilon`` and the epsilon-ball probability ``ball_prob`` for its
    lower envelope.
    """
    if not 0 <= i < state.node_count:
        raise ValueError(f"node {i} does not exist at time {state.time}")
    if state.time < 1:
        raise ValueError("need a state at time >= 1")
    t = state.time + 1
    deg = state.degrees
    fit = state.fitness

    if kernel.kind == BA:
        return -float(deg[i]) / (4.0 * t * (t - 1))

    if kernel.kind == AF:
        fit_sum = float(np.sum(fit))
        before_norm = fit_sum + 2.0 * (t - 1)
        after_norm = fit_sum + xi_t + 2.0 * t
        return -(float(fit[i]) + float(deg[i])) * (xi_t + 1.0) / (before_norm * after_norm)

    if kernel.kind == MF:
        psi = float(np.sum(fit * deg))
        terms = fit * deg * (fit[i] - xi_t - fit)
        others = float(np.sum(terms)) - float(terms[i])
        return float(fit[i] * deg[i]) * others / (psi ** 2 * (psi + float(fit[i]) + xi_t))

    if kernel.kind == GF:
        g = kernel.g
        ghat = np.asarray(g(fit, deg), dtype=np.float64)
        g_sum = float(np.sum(ghat))
        bump = np.asarray(g(fit, deg + 1), dtype=np.float64) - ghat
        g_new = float(g(xi_t, 1))
        shares = ghat / g_sum
        inner = float(shares[i]) * (float(bump[i]) - g_new)
        cross = shares * (bump[i] - bump - g_new)
        inner += float(np.sum(cross)) - float(cross[i])
        return float(ghat[i]) / g_sum ** 2 * inner

    if kernel.kind == SPATIAL:
        if epsilon is None or ball_prob is None:
            raise ValueError("spatial bounds need epsilon and ball_prob")
        gamma = kernel.gamma
        b = np.asarray(kernel.beta(fit, deg), dtype=np.float64)
        decay_i = np.exp(-gamma * kernels.distances_to(state.locations, state.locations[i]))
        local_norm = float(np.sum(decay_i * b))
        scale = float(b[i]) / local_norm ** 3
        base = b * decay_i
        upper = scale * float(np.sum(base * (fit[i] - decay_i * fit - xi_t)))
        lo_terms = base * (fit[i]
                           - np.exp(2.0 * epsilon * gamma) * decay_i * fit
                           - np.exp(3.0 * epsilon * gamma) * xi_t)
        lower = ball_prob * np.exp(-epsilon * gamma) * scale * float(np.sum(lo_terms))
        return SpatialBounds(lower=lower, upper=upper)

    raise ValueError(f"unknown kernel kind {kernel.kind!r}")


def _outcome_table(state, i: int, kernel: KernelSpec, xi_t: float, chi_t=None):
    """Attachment law P(target = l) and the visibility change of node i per outcome."""
    if not 0 <= i < state.node_count:
        raise ValueError(f"node {i} does not exist at time {state.time}")
    deg = state.degrees
    fit = state.fitness

    if kernel.kind == SPATIAL:
        if chi_t is None:
            raise ValueError("spatial enumeration needs the arrival's location chi_t")
        gamma = kernel.gamma
        beta = kernel.beta
        b = np.asarray(beta(fit, deg), dtype=np.float64)
        decay_i = np.exp(-gamma * kernels.distances_to(state.locations, state.locations[i]))
        local_norm = float(np.sum(decay_i * b))
        before = float(b[i]) / local_norm
        att = np.exp(-gamma * kernels.distances_to(state.locations, chi_t)) * b
        probs = att / att.sum()
        bump_at_i = decay_i * (np.asarray(beta(fit, deg + 1), dtype=np.float64) - b)
        d_new = float(np.hypot(chi_t[0] - state.locations[i, 0],
                               chi_t[1] - state.locations[i, 1]))
        newcomer = float(np.exp(-gamma * d_new) * beta(xi_t, 1))
        denoms = local_norm + bump_at_i + newcomer
        after = b[i] / denoms
        after[i] = float(beta(fit[i], deg[i] + 1)) / denoms[i]
        return probs, after - before

    w = kernels.node_weights(state, kernel)
    total = float(np.sum(w))
    probs = w / total
    before = float(w[i]) / total
    bump = np.asarray(kernels.attachment_weight(kernel, fit, deg + 1), dtype=np.float64) - w
    newcomer = kernels.new_node_weight(kernel, xi_t)
    denoms = total + bump + newcomer
    after = w[i] / denoms
    after[i] = (w[i] + bump[i]) / denoms[i]
    return probs, after - before


def enumerate_expected_change(state, i: int, kernel: KernelSpec, xi_t: float,
                              chi_t=None) -> float:
    """Exact expected one-step visibility change, summed over every outcome.

    For the spatial kernel the expectation is conditional on the supplied
    arrival location ``chi_t``.
    """
    probs, deltas = _outcome_table(state, i, kernel, xi_t, chi_t)
    return float(np.sum(probs * deltas))


def mc_expected_change(state, i: int, kernel: KernelSpec, xi_t: float, chi_t=None,
                       trials: int = 100_000, rng: np.random.Generator | None = None):
    """Monte-Carlo estimate (mean, stderr) of the one-step expected change."""
    if rng is None:
        raise ValueError("mc_expected_change needs an rng")
    if trials < 2:
        raise ValueError("need at least 2 trials")
    probs, deltas = _outcome_table(state, i, kernel, xi_t, chi_t)
    counts = rng.multinomial(trials, probs / probs.sum())
    mean = float(np.sum(counts * deltas)) / trials
    var = float(np.sum(counts * (deltas - mean) ** 2)) / (trials - 1)
    return mean, float(np.sqrt(var / trials))


def spatial_marginal_change_mc(state, i: int, kernel: KernelSpec, xi_t: float,
                               samples: int = 512,
                               rng: np.random.Generator | None = None):
    """Expected change with the arrival location averaged out.

    Each uniform location sample contributes its exact conditional
    expectation, so the only noise left is over the location draw.
    """
    if rng is None:
        raise ValueError("needs an rng")
    if samples < 2:
        raise ValueError("need at least 2 location samples")
    pts = rng.random((samples, 2))
    vals = np.array([enumerate_expected_change(state, i, kernel, xi_t, chi_t=p)
                     for p in pts])
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))


def ball_restricted_change_mc(state, i: int, kernel: KernelSpec, xi_t: float,
                              epsilon: float, samples: int = 4096,
                              rng: np.random.Generator | None = None):
    """Expected change restricted to arrivals within epsilon of node i.

    Estimates E[change * 1{arrival within the ball}] from one uniform
    location sample, returning (estimate, stderr, ball hit fraction).  The
    same sample yields the ball probability, so the two estimates share
    their noise.
    """
    if rng is None:
        raise ValueError("needs an rng")
    if samples < 2:
        raise ValueError("need at least 2 location samples")
    pts = rng.random((samples, 2))
    hits = np.hypot(pts[:, 0] - state.locations[i, 0],
                    pts[:, 1] - state.locations[i, 1]) < epsilon
    vals = np.zeros(samples)
    for j in np.flatnonzero(hits):
        vals[j] = enumerate_expected_change(state, i, kernel, xi_t, chi_t=pts[j])
    return (float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples)),
            float(hits.mean()))


_LEMMA_IDS = {BA: "ba_exact", AF: "af_exact", MF: "mf_bound",
              GF: "gf_approx", SPATIAL: "spatial_bounds"}


def verify_lemma(state, i: int, kernel: KernelSpec, xi_t: float, chi_t=None,
                 epsilon: float | None = None,
                 policy: TolerancePolicy | None = None,
                 rng: np.random.Generator | None = None,
                 mc_trials: int = 0,
                 location_samples: int = 512,
                 ball_samples: int = 4096) -> LemmaReport:
    """Check the applicable expected-change claim on one instance.

    The exact kernels are held to ``policy.exact_rel``; the multiplicative
    and general kernels get sign/ordering checks against their asymptotic
    expressions; the spatial kernel's (lower, upper) envelope is tested at
    the conditionings it controls (see the inline note).  ``mc_trials > 0``
    adds a Monte-Carlo estimate to the report (and to the slack of the
    ordering checks).
    """
    policy = policy or TolerancePolicy()
    lemma_id = _LEMMA_IDS[kernel.kind]
    t = state.time + 1
    report = LemmaReport(lemma_id=lemma_id, t=t, node=i, xi_t=xi_t,
                         chi_t=None if chi_t is None else (float(chi_t[0]), float(chi_t[1])),
                         epsilon=epsilon, tolerance=policy.describe(lemma_id))

    if kernel.kind in (BA, AF):
        report.analytic = analytic_expected_change(state, i, kernel, xi_t)
        report.enumerated = enumerate_expected_change(state, i, kernel, xi_t)
        tol = policy.exact_rel * max(1.0, abs(report.analytic))
        report.passed = abs(report.analytic - report.enumerated) <= tol
        return report

    if kernel.kind in (MF, GF):
        report.analytic = analytic_expected_change(state, i, kernel, xi_t)
        report.enumerated = enumerate_expected_change(state, i, kernel, xi_t)
        if mc_trials:
            report.mc_mean, report.mc_stderr = mc_expected_change(
                state, i, kernel, xi_t, trials=mc_trials, rng=rng)
        # verdict rests on the exact enumeration; MC fields are supplementary
        if report.analytic > 0.0:
            # a positive bound/approximation must be matched by a positive change
            report.passed = report.enumerated > 0.0
        else:
            slack = policy.slack_rel * abs(report.analytic)
            report.passed = report.enumerated >= report.analytic - slack
        return report

    if kernel.kind == SPATIAL:
        if epsilon is None:
            raise ValueError("spatial verification needs epsilon")
        if rng is None:
            raise ValueError("spatial verification needs an rng")
        # The two envelope expressions control different conditionings: the
        # upper one approximates the change for the most favorable arrival
        # (landing exactly on the node), the lower one bounds the
        # ball-restricted contribution.  Both are checked at that level; the
        # full marginal sits below the favorable-arrival value and is
        # reported through mc_mean for reference.
        ball_part, ball_err, ball = ball_restricted_change_mc(
            state, i, kernel, xi_t, epsilon, samples=ball_samples, rng=rng)
        bounds = analytic_expected_change(state, i, kernel, xi_t,
                                          epsilon=epsilon, ball_prob=ball)
        report.lower, report.upper = bounds.lower, bounds.upper
        report.enumerated = enumerate_expected_change(state, i, kernel, xi_t,
                                                      chi_t=state.locations[i])
        report.mc_mean, report.mc_stderr = spatial_marginal_change_mc(
            state, i, kernel, xi_t, samples=location_samples, rng=rng)
        up_slack = policy.slack_rel * max(abs(bounds.upper), abs(report.enumerated))
        upper_ok = report.enumerated <= bounds.upper + up_slack
        lo_slack = (policy.slack_rel * max(abs(bounds.lower), abs(ball_part))
                    + policy.mc_sigma * ball_err)
        lower_ok = ball_part >= bounds.lower - lo_slack
        report.passed = upper_ok and lower_ok
        return report

    raise ValueError(f"unknown kernel kind {kernel.kind!r}")
