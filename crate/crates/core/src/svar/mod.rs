//! Recursive structural VAR with an exogenous intervention variable and
//! exogenous global controls.

mod data;
mod estimate;
mod model;
mod spec;

pub use data::DataPanel;
pub use estimate::{align, estimate_aligned, estimate_svar, reduced_form, AlignedSample, ControlFits, SvarEstimate};
pub use model::{Eigenvalue, ReducedForm, StructuralModel};
pub use spec::{
    ControlProcessKind, InterventionSpec, LagTerm, Regressor, SampleRange, SvarSpec, TermFlags, MAX_LAG,
};
