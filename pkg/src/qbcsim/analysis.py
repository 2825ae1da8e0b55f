"""Binding and concealment, quantified.

Every scenario is computed two ways where feasible: an exact probability
from Born distributions over the agreed bases, and a seeded Monte Carlo
estimate of the same experiment. Discrimination bounds (two-hypothesis
optimum and the square-root measurement) bound what any pre-reveal
strategy could achieve, so the concealment claim is tested rather than
assumed. Functions report numbers side by side and do not editorialize.

Priors are uniform over choices and elements wherever a strategy needs
them; that matches the arbitrary-guess baseline the scheme is judged
against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quantum import (
    HermitianMatrix,
    StateVector,
    as_generator,
    born_distribution,
    computational_basis,
    hermitian_eig,
    tensor,
)
from .scheme import RevealAgreement, SchemeParams, build_set_s, build_sets

STRATEGY_DECLARE_PRIOR = "declare-prior-guess"
STRATEGY_UPDATE_ON_REJECT = "update-on-reject"
STRATEGIES = (STRATEGY_DECLARE_PRIOR, STRATEGY_UPDATE_ON_REJECT)

#: Eigenvalues below this are treated as zero on the support of an
#: average state (rank-deficient mixtures are generic here).
SUPPORT_CUTOFF = 1e-10


@dataclass(frozen=True)
class CheatReport:
    """One scenario: exact probability plus an optional sampled estimate."""

    scenario: str
    exact: float
    trials: int = 0
    estimate: float | None = None
    stderr: float | None = None
    parameters: dict = field(default_factory=dict)

    def consistent(self) -> bool:
        """Estimate within three standard errors of exact (True if exact-only)."""
        if self.trials == 0:
            return True
        return bool(abs(self.exact - self.estimate) <= 3.0 * self.stderr)

    def as_dict(self) -> dict:
        out = {
            "scenario": self.scenario,
            "exact": self.exact,
            "trials": self.trials,
            "parameters": dict(self.parameters),
        }
        if self.trials > 0:
            out["estimate"] = self.estimate
            out["stderr"] = self.stderr
            out["consistent"] = self.consistent()
        return out


def _finish_report(scenario, exact, hits, trials, parameters) -> CheatReport:
    exact = float(exact)
    if trials == 0:
        return CheatReport(scenario, exact, parameters=parameters)
    estimate = hits / trials
    stderr = math.sqrt(estimate * (1.0 - estimate) / trials)
    return CheatReport(scenario, exact, trials, estimate, stderr, parameters)


@dataclass(frozen=True, eq=False)
class EnsembleMixture:
    """Density operator labelled by the choice it averages over.

    Validated positive semidefinite (eigenvalues >= -1e-9) with unit
    trace. Arbitrary densities may be wrapped for bound computations.
    """

    choice: int
    density: HermitianMatrix

    def __post_init__(self):
        if not isinstance(self.density, HermitianMatrix):
            object.__setattr__(self, "density", HermitianMatrix(self.density))
        eigenvalues = np.linalg.eigvalsh(self.density.entries)
        if eigenvalues.min() < -1e-9:
            raise ValueError(f"not positive semidefinite: min eigenvalue {eigenvalues.min():.3e}")
        if abs(self.density.trace() - 1.0) > 1e-9:
            raise ValueError(f"trace is {self.density.trace()}, not 1")

    @property
    def dimension(self) -> int:
        return self.density.dimension


def ensemble_mixture(params: SchemeParams, choice: int) -> EnsembleMixture:
    """Uniform mixture of projectors onto the elements of one set."""
    elements = build_sets(params)[choice].elements
    dim = elements[0].dimension
    rho = np.zeros((dim, dim), dtype=complex)
    for elem in elements:
        rho += np.outer(elem.amplitudes, elem.amplitudes.conj())
    return EnsembleMixture(choice, HermitianMatrix(rho / len(elements)))


# --- binding: Alice's cheat acceptance ------------------------------------


def _acceptance_distribution(
    agreement: RevealAgreement, held: StateVector, claimed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Born distribution of held (x) G_claimed in basis claimed, plus valid indices."""
    basis = agreement.bases[claimed]
    product = tensor(held, agreement.reveal_states[claimed].state)
    dist = born_distribution(product, basis)
    valid = np.fromiter(sorted(basis.valid_outcomes), dtype=np.int64)
    return dist, valid


def alice_cheat_acceptance(
    agreement: RevealAgreement, c_true: int, element: int, c_claimed: int
) -> float:
    """Exact acceptance probability when Alice reveals ``c_claimed`` after
    committing the given element of the set bound to ``c_true``.

    Equal choices are allowed as the honest control and return 1.
    """
    params = agreement.params
    for label, value in (("c_true", c_true), ("c_claimed", c_claimed)):
        if not 0 <= value < params.num_choices:
            raise ValueError(f"{label} {value} out of range")
    if not 0 <= element < params.num_choices:
        raise ValueError(f"element index {element} out of range")
    held = agreement.sets[c_true].elements[element]
    dist, valid = _acceptance_distribution(agreement, held, c_claimed)
    return float(dist[valid].sum())


def alice_cheat_report(
    agreement: RevealAgreement,
    c_true: int,
    c_claimed: int,
    trials: int = 0,
    rng=None,
) -> CheatReport:
    """Cheat acceptance averaged over a uniform element, exact and sampled."""
    params = agreement.params
    m = params.num_choices
    per_element = [
        alice_cheat_acceptance(agreement, c_true, k, c_claimed) for k in range(m)
    ]
    exact = float(np.mean(per_element))
    hits = 0
    if trials > 0:
        gen = as_generator(rng)
        dists = []
        valid_sets = []
        for k in range(m):
            dist, valid = _acceptance_distribution(
                agreement, agreement.sets[c_true].elements[k], c_claimed
            )
            dists.append(dist)
            valid_sets.append(valid)
        ks = gen.integers(m, size=trials)
        outcomes = _grouped_outcomes(dists, ks, gen)
        for k in range(m):
            sel = ks == k
            hits += int(np.isin(outcomes[sel], valid_sets[k]).sum())
    return _finish_report(
        f"alice-cheat commit {c_true} reveal {c_claimed}",
        exact,
        hits,
        trials,
        {"n": params.num_bob_qubits, "c_true": c_true, "c_claimed": c_claimed},
    )


def _grouped_outcomes(dists, group_index: np.ndarray, rng) -> np.ndarray:
    """Per-row categorical sample where row i draws from dists[group_index[i]]."""
    out = np.empty(len(group_index), dtype=np.int64)
    for g, dist in enumerate(dists):
        sel = np.flatnonzero(group_index == g)
        if sel.size:
            out[sel] = rng.choice(len(dist), size=sel.size, p=dist)
    return out


def _cheat_acceptance_common(agreement: RevealAgreement) -> float:
    """The per-block cheat acceptance, verified identical across (c, c', k)."""
    params = agreement.params
    values = [
        alice_cheat_acceptance(agreement, c, k, claim)
        for c in range(params.num_choices)
        for claim in range(params.num_choices)
        if claim != c
        for k in range(params.num_choices)
    ]
    lo, hi = min(values), max(values)
    if hi - lo > 1e-12:
        raise ValueError(f"cheat acceptance varies across scenarios: [{lo}, {hi}]")
    return float(np.mean(values))


def block_cheat_fidelity(agreement: RevealAgreement, blocks: int) -> float:
    """Exact probability that a per-block cheat survives ``blocks`` independent
    verifications (product of per-block acceptances)."""
    if blocks < 1:
        raise ValueError("block count must be at least 1")
    return _cheat_acceptance_common(agreement) ** blocks


def block_cheat_report(
    agreement: RevealAgreement, blocks: int, trials: int = 0, rng=None
) -> CheatReport:
    """K-block cheat survival, exact and by independent-product simulation."""
    params = agreement.params
    exact = block_cheat_fidelity(agreement, blocks)
    hits = 0
    if trials > 0:
        gen = as_generator(rng)
        m = params.num_choices
        combos = [
            (c, k, claim)
            for c in range(m)
            for k in range(m)
            for claim in range(m)
            if claim != c
        ]
        dists = []
        valid_sets = []
        for c, k, claim in combos:
            dist, valid = _acceptance_distribution(
                agreement, agreement.sets[c].elements[k], claim
            )
            dists.append(dist)
            valid_sets.append(valid)
        draw = gen.integers(len(combos), size=trials * blocks)
        outcomes = _grouped_outcomes(dists, draw, gen)
        accepted = np.zeros(trials * blocks, dtype=bool)
        for g in range(len(combos)):
            sel = draw == g
            accepted[sel] = np.isin(outcomes[sel], valid_sets[g])
        hits = int(accepted.reshape(trials, blocks).all(axis=1).sum())
    return _finish_report(
        f"block-cheat K={blocks}",
        exact,
        hits,
        trials,
        {"n": params.num_bob_qubits, "K": blocks},
    )


# --- concealment: Bob's premature strategies ------------------------------


@dataclass(frozen=True, eq=False)
class WrongCouplingEntry:
    """One row of the wrong-coupling table: held element, coupled reveal
    state, the resulting product, and its mass on the valid outcomes."""

    held_choice: int
    element: int
    coupled_choice: int
    product: StateVector
    valid_mass: float


def bob_wrong_coupling_table(agreement: RevealAgreement) -> tuple[WrongCouplingEntry, ...]:
    """Every (held element, wrong reveal state) product and its valid mass."""
    params = agreement.params
    rows = []
    for c in range(params.num_choices):
        for k, elem in enumerate(agreement.sets[c].elements):
            for claim in range(params.num_choices):
                if claim == c:
                    continue
                basis = agreement.bases[claim]
                product = tensor(elem, agreement.reveal_states[claim].state)
                dist = born_distribution(product, basis)
                mass = float(sum(dist[i] for i in sorted(basis.valid_outcomes)))
                rows.append(WrongCouplingEntry(c, k, claim, product, mass))
    return tuple(rows)


def bob_premature_strategy(
    agreement: RevealAgreement, strategy: str, trials: int = 0, rng=None
) -> CheatReport:
    """Success probability of identifying the committed choice pre-reveal.

    declare-prior-guess: couple an arbitrary guess, ignore the outcome,
    declare the guess. update-on-reject: declare the guess when its
    verification accepts, otherwise declare uniformly among the remaining
    choices (a rejection rules the guess out).
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; known: {STRATEGIES}")
    params = agreement.params
    m = params.num_choices
    parameters = {"n": params.num_bob_qubits, "strategy": strategy}

    if strategy == STRATEGY_DECLARE_PRIOR:
        exact = float(np.mean([[g == c for g in range(m)] for c in range(m)]))
        hits = 0
        if trials > 0:
            gen = as_generator(rng)
            cs = gen.integers(m, size=trials)
            gs = gen.integers(m, size=trials)
            hits = int((cs == gs).sum())
        return _finish_report(strategy, exact, hits, trials, parameters)

    # update-on-reject: average over (c, k, guess) of the two branches
    accept_prob = {}
    for c in range(m):
        for k in range(m):
            for g in range(m):
                dist, valid = _acceptance_distribution(
                    agreement, agreement.sets[c].elements[k], g
                )
                accept_prob[(c, k, g)] = (float(dist[valid].sum()), dist, valid)
    exact = 0.0
    for (c, k, g), (p_acc, _, _) in accept_prob.items():
        correct_on_accept = 1.0 if g == c else 0.0
        correct_on_reject = 0.0 if g == c else 1.0 / (m - 1)
        exact += p_acc * correct_on_accept + (1.0 - p_acc) * correct_on_reject
    exact /= m**3
    hits = 0
    if trials > 0:
        gen = as_generator(rng)
        combos = list(accept_prob)
        draw = gen.integers(len(combos), size=trials)
        dists = [accept_prob[combo][1] for combo in combos]
        outcomes = _grouped_outcomes(dists, draw, gen)
        fallback = gen.integers(m - 1, size=trials)  # index among remaining choices
        for i in range(trials):
            c, k, g = combos[draw[i]]
            _, _, valid = accept_prob[(c, k, g)]
            if outcomes[i] in valid:
                hits += g == c
            else:
                remaining = [x for x in range(m) if x != g]
                hits += remaining[fallback[i]] == c
    return _finish_report(strategy, exact, hits, trials, parameters)


# --- discrimination bounds -------------------------------------------------


def helstrom_bound(rho1: EnsembleMixture, rho2: EnsembleMixture) -> float:
    """Optimal two-hypothesis success at uniform priors:
    1/2 + (trace norm of rho1 - rho2)/4."""
    if rho1.dimension != rho2.dimension:
        raise ValueError("mixture dimensions differ")
    diff = rho1.density.entries - rho2.density.entries
    eigenvalues, _ = hermitian_eig(diff)
    return float(0.5 + 0.25 * np.abs(eigenvalues).sum())


def pgm_success(ensembles, priors) -> float:
    """Success probability of the square-root measurement.

    The measurement operators are S^(-1/2) p_i rho_i S^(-1/2) with S the
    prior-weighted average state; the inverse square root acts on the
    support of S (eigenvalues below SUPPORT_CUTOFF treated as zero).
    """
    ensembles = list(ensembles)
    if len(ensembles) < 2:
        raise ValueError("need at least two ensembles")
    priors = np.asarray(priors, dtype=float)
    if priors.shape != (len(ensembles),) or priors.min() < 0:
        raise ValueError("priors must be nonnegative, one per ensemble")
    if abs(priors.sum() - 1.0) > 1e-9:
        raise ValueError(f"priors sum to {priors.sum()}, not 1")
    dim = ensembles[0].dimension
    if any(e.dimension != dim for e in ensembles):
        raise ValueError("mixture dimensions differ")
    average = sum(
        p * e.density.entries for p, e in zip(priors, ensembles)
    )
    eigenvalues, vectors = hermitian_eig(average)
    inv_sqrt_diag = np.where(eigenvalues > SUPPORT_CUTOFF, eigenvalues, np.inf) ** -0.5
    root = (vectors * inv_sqrt_diag) @ vectors.conj().T
    success = 0.0
    for p, e in zip(priors, ensembles):
        reshaped = root @ e.density.entries @ root
        success += p**2 * float(np.trace(e.density.entries @ reshaped).real)
    return success


# --- the reduced-qubit variant ---------------------------------------------


def _s_strategy_declare(outcome: int, num_choices: int) -> tuple:
    """Declarations for the assume-parent-S rule: (choice, weight) pairs."""
    if outcome < num_choices:
        return ((outcome, 1.0),)
    return tuple((c, 1.0 / num_choices) for c in range(num_choices))


def s_protocol_analysis(
    agreement: RevealAgreement, p_s: float, trials: int = 0, rng=None
) -> CheatReport:
    """Bob's identification probability under "assume parent S, measure
    computationally" when Alice commits from S with probability ``p_s``.

    Exact value is enumerated over every (parent, choice, element,
    outcome) branch; the sampled estimate replays the same experiment.
    """
    if not 0.0 <= p_s <= 1.0:
        raise ValueError(f"parent-S probability {p_s} out of [0, 1]")
    params = agreement.params
    m = params.num_choices
    set_s = build_set_s(params)
    comp = computational_basis(2 ** params.num_alice_qubits)

    success_s = 0.0
    for c in range(m):
        dist = born_distribution(set_s.elements[set_s.bound_index(c)], comp)
        for outcome, prob in enumerate(dist):
            if prob == 0.0:
                continue
            for declared, weight in _s_strategy_declare(outcome, m):
                if declared == c:
                    success_s += prob * weight / m
    success_b = 0.0
    for c in range(m):
        for elem in agreement.sets[c].elements:
            dist = born_distribution(elem, comp)
            for outcome, prob in enumerate(dist):
                if prob == 0.0:
                    continue
                for declared, weight in _s_strategy_declare(outcome, m):
                    if declared == c:
                        success_b += prob * weight / m**2
    exact = p_s * success_s + (1.0 - p_s) * success_b

    hits = 0
    if trials > 0:
        gen = as_generator(rng)
        from_s = gen.random(trials) < p_s
        cs = gen.integers(m, size=trials)
        ks = gen.integers(m, size=trials)
        guesses = gen.integers(m, size=trials)
        # combo 0..m-1: parent S per choice; combo m..m+m^2-1: (c, k) pairs
        dists = [
            born_distribution(set_s.elements[set_s.bound_index(c)], comp)
            for c in range(m)
        ]
        dists += [
            born_distribution(agreement.sets[c].elements[k], comp)
            for c in range(m)
            for k in range(m)
        ]
        combo = np.where(from_s, cs, m + cs * m + ks)
        outcomes = _grouped_outcomes(dists, combo, gen)
        declared = np.where(outcomes < m, outcomes, guesses)
        hits = int((declared == cs).sum())
    return _finish_report(
        f"assume-parent-S p_S={p_s:g}",
        exact,
        hits,
        trials,
        {"n": params.num_bob_qubits, "p_S": p_s},
    )


def s_protocol_sweep(
    agreement: RevealAgreement, points: int = 11, trials: int = 0, rng=None
) -> tuple[CheatReport, ...]:
    """s_protocol_analysis over an even grid of parent-S probabilities."""
    gen = as_generator(rng) if trials > 0 else None
    return tuple(
        s_protocol_analysis(agreement, float(p), trials, gen)
        for p in np.linspace(0.0, 1.0, points)
    )


# --- batch report -----------------------------------------------------------


def run_full_analysis(agreement: RevealAgreement, trials: int = 0, seed: int = 0) -> dict:
    """The full battery as a JSON-ready dict.

    Exact values cover every scenario; Monte Carlo columns appear only
    when ``trials`` > 0, drawn from one generator seeded by ``seed`` so
    identical configurations produce identical reports.
    """
    params = agreement.params
    m = params.num_choices
    gen = np.random.default_rng(seed)
    report: dict = {
        "scheme": {
            "n": params.num_bob_qubits,
            "choices": m,
            "masks": [format(d, "#x") for d in params.masks],
            "preset": params.preset,
        },
        "seed": seed,
        "trials": trials,
    }

    pair_reports = []
    for c in range(m):
        for claim in range(m):
            if claim == c:
                continue
            pair_trials = trials if (c, claim) == (0, 1) else 0
            pair_reports.append(
                alice_cheat_report(agreement, c, claim, pair_trials, gen).as_dict()
            )
    report["alice_cheat"] = pair_reports

    report["block_fidelity"] = [
        block_cheat_report(agreement, blocks, trials, gen).as_dict()
        for blocks in range(1, 9)
    ]

    report["wrong_coupling"] = [
        {
            "held_choice": row.held_choice,
            "element": row.element,
            "coupled_choice": row.coupled_choice,
            "valid_mass": row.valid_mass,
        }
        for row in bob_wrong_coupling_table(agreement)
    ]

    report["strategies"] = [
        bob_premature_strategy(agreement, strategy, trials, gen).as_dict()
        for strategy in STRATEGIES
    ]

    mixtures = [ensemble_mixture(params, c) for c in range(m)]
    report["discrimination"] = {
        "chance": 1.0 / m,
        "helstrom_pairs": [
            {"a": a, "b": b, "bound": helstrom_bound(mixtures[a], mixtures[b])}
            for a in range(m)
            for b in range(a + 1, m)
        ],
        "pgm_uniform": pgm_success(mixtures, np.full(m, 1.0 / m)),
    }

    report["s_protocol"] = [
        r.as_dict() for r in s_protocol_sweep(agreement, 11, trials, gen)
    ]
    return report
