"""Simulator and analysis lab for a product-state commitment scheme.

The package splits into four layers: ``quantum`` (statevector engine),
``scheme`` (the initial agreement: commitment sets, reveal states,
reveal bases, audits), ``session`` (the two-party protocol over wire
frames), and ``analysis`` (binding/concealment figures and
discrimination bounds). ``cli`` fronts all of it.
"""

from .analysis import (
    CheatReport,
    EnsembleMixture,
    STRATEGIES,
    STRATEGY_DECLARE_PRIOR,
    STRATEGY_UPDATE_ON_REJECT,
    alice_cheat_acceptance,
    alice_cheat_report,
    block_cheat_fidelity,
    block_cheat_report,
    bob_premature_strategy,
    bob_wrong_coupling_table,
    ensemble_mixture,
    helstrom_bound,
    pgm_success,
    run_full_analysis,
    s_protocol_analysis,
    s_protocol_sweep,
)
from .quantum import (
    ATOL,
    INV_SQRT2,
    HermitianMatrix,
    MeasurementBasis,
    StateVector,
    apply_gate,
    as_generator,
    born_distribution,
    complete_basis,
    computational_basis,
    equal_superposition_pair,
    hermitian_eig,
    inner,
    ket_string,
    make_basis_state,
    measure,
    random_state,
    state_from_text,
    state_to_text,
    tensor,
)
from .scheme import (
    MAX_N,
    PRESET_DEFAULT_MASKS,
    PRESET_PAPER_COINTOSS,
    AuditCheck,
    CommitmentSet,
    RevealAgreement,
    RevealState,
    SchemeAuditError,
    SchemeParams,
    SetS,
    audit_scheme,
    bob_reveal_state,
    build_reveal_agreement,
    build_set_s,
    build_sets,
    cross_set_overlap_audit,
    descriptor_text,
    params_from_descriptor,
    scheme_hash,
    stabilizer_audit,
    xor_pairs,
)
from .session import (
    AliceScript,
    BobScript,
    Commit,
    Guess,
    HandshakeError,
    Phase,
    Reveal,
    SessionResult,
    SessionState,
    VerificationResult,
    Verdict,
    alice_commit,
    alice_reveal,
    bob_guess,
    bob_verify,
    decode_message,
    encode_message,
    run_session,
    session_rngs,
    write_transcript,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
