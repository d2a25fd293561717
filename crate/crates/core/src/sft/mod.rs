//! Subshifts of finite type with edge potentials: pressure, equilibrium
//! states, Livšic reduction and periodic orbits.

mod cycles;
mod graph;
mod livsic;
mod measure;
mod potential;
mod pressure;

pub use cycles::{enumerate_cycles, enumerate_cycles_capped, Cycle, DEFAULT_CYCLE_CAP};
pub use graph::SubshiftGraph;
pub use livsic::{livsic_reduce, livsic_reduce_with_tol, LivsicReduction, LIVSIC_TOL};
pub use measure::{cycle_measure, integrate, MarkovMeasure};
pub use potential::{EdgePotential, RoofFunction};
pub use pressure::{
    equilibrium_measure, perron_data, pressure, pressure_derivative, topological_entropy,
    PerronData, PERRON_MAX_ITER, PERRON_TOL,
};
