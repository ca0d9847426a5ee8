"""Hash-consed ground terms for a small tabled logic engine.

Ground terms can be interned into canonical records, so that two terms
are structurally equal exactly when they are the same object.  Variant
tries treat an interned subterm as one symbol, which keeps call and
answer tables linear in the size of shared lists.
"""
from .bench import BenchRow, bench, emit_csv
from .builtins import InstantiationError, compare, evaluate, identical
from .dynamic import DynamicPredicate, DynamicStore, heap_cells, index_key
from .intern import (
    HashTable,
    InternStats,
    InternStore,
    TraversalCounters,
    canonical_hash,
    copy_term,
    is_ground,
    is_interned,
)
from .reader import (
    Clause,
    PrologSyntaxError,
    Program,
    UnknownDirective,
    dcg_translate,
    parse_program,
    parse_query,
    parse_term,
)
from .solver import Engine, TablingError, UndefinedPredicate, solve
from .tables import (
    Answer,
    CallTable,
    ResourceBudgetExceeded,
    Status,
    TableEntry,
    TableError,
    Trie,
    UnsupportedRetrieval,
    VarSym,
    add_answer,
    answer_iterate,
    delinearize,
    guard_unification_retrieval,
    linearize,
    table_space_stats,
    trie_insert,
    trie_lookup_variant,
)
from .terms import (
    LIST,
    NIL,
    Atom,
    Cons,
    Functor,
    Struct,
    Tag,
    TermError,
    Var,
    deref,
    functor,
    intern_atom,
    list_items,
    make_compound,
    make_list,
    make_list_cell,
    region,
    render,
    tag_of,
)
from .unify import BindingStore, StaleMark, unify

__version__ = "0.1.0"
