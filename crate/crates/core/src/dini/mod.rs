//! Dini transformations of second-order operators in three variables whose
//! principal symbol splits into two first-order factors.

mod frame;
mod planted;
mod transform;

pub use frame::{dini_frame, frame_with, solve_alpha, solve_beta, DiniFrame, Ordering};
pub use planted::{planted_instance, PlantedInstance};
pub use transform::{
    back_substitute, dini_chain, dini_transform, factor_operator, first_step, solve_factored,
    solve_through_chain, with_witnesses, DiniChainReport, DiniLink, DiniStep, LinkStatus,
};
