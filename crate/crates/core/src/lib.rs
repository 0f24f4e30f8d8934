//! Burnside-ring algebra, maximality checks for crystallographic groups and
//! an equivariant mountain-pass solver for periodic Lagrangian systems.

pub mod burnside;
pub mod cli;
pub mod config;
pub mod crystal;
pub mod functional;
pub mod group;
pub mod intlinalg;
pub mod minimax;
