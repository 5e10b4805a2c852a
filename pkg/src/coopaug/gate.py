"""Probabilistic gate: count-distribution matching via Plus/Keep/Minus decisions."""

import enum
from collections import Counter
from dataclasses import dataclass, replace

from .errors import EmptyInput, InvalidPair
from .model import Agent, CooperativeGroup, CountDistribution, RngStream, validate_group

# Agent-count probabilities per source dataset. Counts above the published
# support carry probability 0.
TABLE_DISTRIBUTIONS: dict[str, CountDistribution] = {
    "opv2v": CountDistribution({1: 0.0787, 2: 0.4846, 3: 0.2657, 4: 0.1620, 5: 0.0090}),
    "v2xset": CountDistribution({1: 0.1275, 2: 0.3900, 3: 0.3315, 4: 0.1341, 5: 0.0169}),
    "v2v4real": CountDistribution({1: 0.0980, 2: 0.9020}),
    "dairv2x": CountDistribution({1: 0.0920, 2: 0.9080}),
}


class GateChoice(enum.Enum):
    PLUS = "plus"
    KEEP = "keep"
    MINUS = "minus"


@dataclass(frozen=True)
class GateResponses:
    """Raw responses and their normalized likelihoods (plus, keep, minus)."""

    r_plus: float
    r_keep: float
    r_minus: float

    @property
    def likelihoods(self) -> tuple[float, float, float]:
        total = self.r_plus + self.r_keep + self.r_minus
        return (self.r_plus / total, self.r_keep / total, self.r_minus / total)


def estimate_source_distribution(counts) -> CountDistribution:
    """Empirical pmf of observed group sizes."""
    counts = list(counts)
    if not counts:
        raise EmptyInput("no counts to estimate from")
    n = len(counts)
    return CountDistribution({k: v / n for k, v in sorted(Counter(counts).items())})


def comprehensive_distribution(dists, weights=None) -> CountDistribution:
    """Cross-dataset mean pmf (unweighted by default), renormalized."""
    dists = list(dists)
    if not dists:
        raise EmptyInput("no distributions to combine")
    if weights is None:
        weights = [1.0] * len(dists)
    if len(weights) != len(dists):
        raise ValueError("weights length mismatch")
    total_w = sum(weights)
    keys = sorted(set().union(*(d.pmf for d in dists)))
    pmf = {k: sum(w * d.prob(k) for d, w in zip(dists, weights)) / total_w for k in keys}
    norm = sum(pmf.values())
    return CountDistribution({k: v / norm for k, v in pmf.items()})


def comprehensive_from_tables() -> CountDistribution:
    return comprehensive_distribution(TABLE_DISTRIBUTIONS.values())


def gate_responses(phi_s: CountDistribution, phi_c: CountDistribution,
                   n_s: int, epsilon: float) -> GateResponses:
    """Responses for moving the group size toward the comprehensive distribution.

    A neighbor count that the source under-represents relative to the
    comprehensive distribution draws a positive response; the keep response
    is fixed at 1. Probabilities at count 0 are 0 by definition.
    """
    if n_s < 1:
        raise ValueError("group size must be >= 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    def resp(count: int) -> float:
        if count < 1:
            return 0.0
        return max(0.0, (phi_c.prob(count) - phi_s.prob(count))
                   / max(phi_s.prob(count), epsilon))

    return GateResponses(r_plus=resp(n_s + 1), r_keep=1.0, r_minus=resp(n_s - 1))


def sample_gate(responses: GateResponses, rng: RngStream) -> GateChoice:
    """Categorical draw over (plus, keep, minus) with the normalized likelihoods."""
    lp, lk, _ = responses.likelihoods
    u = float(rng.uniform())
    if u < lp:
        return GateChoice.PLUS
    if u < lp + lk:
        return GateChoice.KEEP
    return GateChoice.MINUS


def apply_gate(group: CooperativeGroup, mixup: Agent, pair: tuple[int, int],
               decision: GateChoice, keep_mode: str = "replace") -> CooperativeGroup:
    """Apply a gate decision, inserting the mixup agent per the chosen gate.

    Plus appends the mixup agent; Minus removes both pair members and appends
    it (inheriting the ego role and pose if the pair contained the ego); Keep
    replaces the non-ego pair member ("discard" keep_mode leaves the group
    unchanged). The result always has exactly one ego.
    """
    i, j = pair
    if i == j or not (0 <= i < group.n and 0 <= j < group.n):
        raise InvalidPair(f"bad pair ({i}, {j}) for group of {group.n}")
    if mixup.is_ego:
        raise InvalidPair("mixup agent must not be pre-marked as ego")

    if decision is GateChoice.PLUS:
        out = CooperativeGroup(group.agents + (mixup,))
    elif decision is GateChoice.MINUS:
        pair_agents = (group.agents[i], group.agents[j])
        ego_member = next((a for a in pair_agents if a.is_ego), None)
        if ego_member is not None:
            mixup = replace(mixup, is_ego=True, pose=ego_member.pose)
        rest = tuple(a for k, a in enumerate(group.agents) if k not in (i, j))
        out = CooperativeGroup(rest + (mixup,))
    else:  # KEEP
        if keep_mode == "discard":
            out = group
        else:
            target = j if not group.agents[j].is_ego else i
            if group.agents[target].is_ego:
                raise InvalidPair("both pair members are ego")
            agents = list(group.agents)
            agents[target] = mixup
            out = CooperativeGroup(tuple(agents))

    violation = validate_group(out)
    if violation is not None:
        raise InvalidPair(f"gate output invalid: {violation}")
    return out
