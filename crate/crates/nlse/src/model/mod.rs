//! Domain types for the continuous model: grids, fields, potentials,
//! nonlinearities and analytic reference solutions.

mod analytic;
mod field;
mod grid;
mod nonlinearity;
mod params;
mod potential;

pub use analytic::{
    bright_soliton, dispersion_omega, plane_wave, soliton_energy, soliton_mass,
};
pub use field::WaveField;
pub use grid::{Axis, BoundaryKind, Grid};
pub use nonlinearity::Nonlinearity;
pub use params::{CouplingParams, DampingKind, ModelParams};
pub use potential::Potential;
