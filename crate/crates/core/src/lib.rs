//! Finite-depth G-odometers over subgroup chains, nested transversal towers,
//! Toeplitz windows, the staged almost 1-1 extension maps and exact rational
//! measure bounds.

pub mod group;
pub mod odometer;
pub mod rational;
pub mod tower;
pub mod cells;
pub mod toeplitz;
pub mod window;
pub mod extension;
pub mod measure;
pub mod verify;
