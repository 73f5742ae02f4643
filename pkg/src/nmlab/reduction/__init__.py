"""
Reduction package.

Compiles counter machines into Nmatrices and refutes non-computations.
"""

from .reduction import (
    ERR,
    INIT,
    RM,
    R_EQ0,
    R_GE0,
    R_GE1,
    R_GE2,
    V0EQ,
    NamedValuation,
    Refutation,
    SearchVerdict,
    SequenceKind,
    SequenceReason,
    SUC_TABLE,
    TheoremSearchReport,
    build_nmatrix,
    build_sigma,
    classify_sequence,
    conf_name,
    decode_enc,
    decode_seq,
    enc,
    eval_named,
    falsify,
    max_enc_literal,
    mu_select,
    named_assignment,
    search_theorems,
    select_refuting_valuation,
    seq,
    step_cell,
    step_name,
    suc_image,
    v,
)

__all__ = [
    'ERR',
    'INIT',
    'RM',
    'R_EQ0',
    'R_GE0',
    'R_GE1',
    'R_GE2',
    'V0EQ',
    'NamedValuation',
    'Refutation',
    'SearchVerdict',
    'SequenceKind',
    'SequenceReason',
    'SUC_TABLE',
    'TheoremSearchReport',
    'build_nmatrix',
    'build_sigma',
    'classify_sequence',
    'conf_name',
    'decode_enc',
    'decode_seq',
    'enc',
    'eval_named',
    'falsify',
    'max_enc_literal',
    'mu_select',
    'named_assignment',
    'search_theorems',
    'select_refuting_valuation',
    'seq',
    'step_cell',
    'step_name',
    'suc_image',
    'v',
]
