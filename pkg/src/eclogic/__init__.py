"""Epistemic causal logic toolkit.

Finite structural causal models with epistemic teams and observables, the
three satisfaction relations, reduction translations, Hilbert derivation
checking and exhaustive small-scale soundness audits.
"""

from .epistemic import (
    EpistemicModel,
    PointedModel,
    SemanticsMode,
    announce,
    evaluate,
    intervene_observable,
    intervene_team,
    known_values,
)
from .errors import (
    BindingError,
    BudgetExceededError,
    DerivationError,
    EclogicError,
    FormulaSyntaxError,
    FragmentError,
    ModelValidationError,
)
from .explore import (
    EnumerationCaps,
    check_validity,
    enumerate_functions,
    enumerate_models,
    enumerate_pointed,
    oc_equivalence_audit,
    sample_formulas,
)
from .models import (
    CausalGraph,
    FunctionSet,
    Signature,
    causal_graph,
    direct_cause,
    direct_cause_formula,
    dump_model_document,
    graph_to_dot,
    intervene_causal,
    is_recursive,
    load_model_document,
    load_model_file,
    solve,
)
from .proofs import (
    Derivation,
    SYSTEM_AXIOMS,
    audit_soundness,
    check_derivation,
    match_axiom,
    parse_derivation,
)
from .reductions import TranslationKind, check_equivalence, translate
from .session import Session
from .syntax import (
    Assignment,
    Atom,
    Formula,
    FragmentTag,
    Measure,
    complexity,
    fragment,
    parse,
    print_formula,
    subformulas,
    to_text,
)

__version__ = "0.1.0"
