//! Symbolic replay of the Horace induction for twisted tangent bundles.
//!
//! Statements are tracked by their numerical data only: bundle ranks and
//! section counts from [`crate::exactdims`], point counts and quotient
//! dimensions. Each trace node records the side conditions it was checked
//! against, and a node that no rule reduces becomes a `stuck` leaf.

mod bundle;
mod lemmas;
mod statement;
mod trace;

pub use bundle::{elementary_transform, BundleKind, SymbolicBundle};
pub use lemmas::{
    iv_case, iv_shape, lem_mb, lem_rb_params, reduce_mb, reduce_rb, tau_root, CaseIVParams,
    LemRBParams, MbReduction, MbStep, RbReduction, Rule,
};
pub use statement::{check_conditions, conditions, Condition, Relation, Statement};
pub use trace::{
    classify, remark_holds, schedule, verify_remark, Family, ReductionTrace, TraceNode,
    TraceVerdict,
};
