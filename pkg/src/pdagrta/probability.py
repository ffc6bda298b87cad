"""Probability that each path of the longest-path set executes as the longest."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .paths import branch_ranks, choice_matrix


@dataclass(frozen=True)
class ProbabilityAssignment:
    probabilities: tuple
    cumulative: tuple
    clamps: tuple  # (index, rule) with rule in {"lower", "upper", "terminated"}

    @property
    def total(self):
        return math.fsum(self.probabilities)

    def clamped(self, i):
        return any(j == i for j, _ in self.clamps)


def _branch_probs(pdag):
    return pdag.index.cached(
        "branch_probs", lambda: {(s.id, b.index): b.prob for s in pdag.structures for b in s.branches}
    )


def exec_probability(branches, pdag) -> float:
    """Probability that every branch in ``branches`` executes (1 for the empty set)."""
    prob = _branch_probs(pdag)
    return math.prod(prob[h] for h in sorted(branches))


def co_longest_bound(longer, shorter, pdag, conditional=True) -> float:
    """Upper bound on P(longer executes as the longest while shorter does not).

    With ``conditional`` (the default) a branch of ``shorter`` whose structure
    already runs a different branch under ``longer`` counts as impossible
    rather than contributing its raw probability.
    """
    return exec_probability(longer.branches, pdag) * _miss_factor(longer, shorter, _branch_probs(pdag), conditional)


def _miss_factor(longer, shorter, prob, conditional):
    # 1 - P(branches of shorter absent from longer all execute)
    factor = 1.0
    for h in sorted(shorter.branches - longer.branches):
        if conditional and h[0] in longer.structures:
            return 1.0
        factor *= prob[h]
    return 1.0 - factor


def _miss_matrix(paths, pdag, conditional):
    order = sorted(pdag.structures, key=lambda st: st.id)
    rank = branch_ranks(pdag)
    prob = np.zeros((len(order), 1 + max((len(st.branches) for st in order), default=0)), dtype=np.float64)
    for c, st in enumerate(order):
        for b in st.branches:
            prob[c, rank[(st.id, b.index)]] = b.prob
    return kernels.miss_matrix(choice_matrix(paths, pdag), prob, conditional)


def assign_probabilities(lambda_star, pdag, conditional=True) -> ProbabilityAssignment:
    paths = list(lambda_star.paths)
    count = len(paths)
    probs = [0.0] * count
    clamps = []
    executes = [exec_probability(p.branches, pdag) for p in paths]
    # terms[h][l] = P(l executes) * miss factor of h against l, for l < h
    terms = (np.array(executes)[None, :] * _miss_matrix(paths, pdag, conditional).T).tolist() if count else []
    done = 0.0  # sum of P over already processed (longer) paths
    for h, path in enumerate(paths):
        if h == count - 1:
            p = 1.0 - done
        else:
            executed = executes[h]
            dominated = math.fsum(terms[h][:h])
            # mass left for strictly shorter paths, floored at zero
            tail = math.fsum([1.0, -executed, -dominated])
            p = 1.0 - done if tail <= 0.0 else math.fsum([executed, dominated, -done])
        if p < 0.0:
            p = 0.0
            clamps.append((h, "lower"))
        room = max(0.0, 1.0 - done)
        if p > room:
            p = room
            clamps.append((h, "upper"))
        probs[h] = p
        done += p
        if done >= 1.0 - 1e-12 and h < count - 1:
            clamps.extend((s, "terminated") for s in range(h + 1, count))
            break

    excess = math.fsum(probs) - 1.0
    if excess > 0.0:
        # rounding in the running total; take it off the last positive entry
        h = max(i for i, p in enumerate(probs) if p > 0.0)
        probs[h] = max(0.0, probs[h] - excess)

    cumulative = []
    acc = 0.0
    for p in probs:
        acc = min(1.0, acc + p)
        cumulative.append(acc)
    result = ProbabilityAssignment(tuple(probs), tuple(cumulative), tuple(clamps))
    check_bookkeeping(result)
    return result


class BookkeepingError(AssertionError):
    pass


def check_bookkeeping(assignment):
    """Every P in [0, 1], their sum in [0, 1], cumulative values non-decreasing. No tolerance."""
    probs = assignment.probabilities
    bad = [(i, p) for i, p in enumerate(probs) if not 0.0 <= p <= 1.0]
    if bad:
        raise BookkeepingError(f"probabilities outside [0, 1]: {bad}")
    total = math.fsum(probs)
    if not 0.0 <= total <= 1.0:
        raise BookkeepingError(f"probabilities sum to {total!r}")
    cum = assignment.cumulative
    if any(b < a for a, b in zip(cum, cum[1:])):
        raise BookkeepingError("cumulative probabilities decrease")
