//! Model extensions beyond the single conservative equation: damped
//! evolution with exact loss sub-steps, rotating-frame propagation, and
//! two-component coupled systems.

pub mod coupled;
pub mod damping;
pub mod rotation;

pub use coupled::{coupled_tssp_step, CoupledField, CoupledState};
pub use damping::{damped_density, damped_phase_substep, damped_tssp_step};
pub use rotation::{
    lagrangian_rotating_step, lagrangian_to_eulerian, rotation_adi_step, rotation_matrix,
};
