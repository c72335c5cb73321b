//! Parametrized Whitney interpolation, canonical stratifications of
//! polynomial systems and the stratified deformations they induce.

pub mod config;
pub mod deformation;
pub mod geometry;
pub mod interpolation;
pub mod polyalg;
pub mod rng;
pub mod stratification;
pub mod suite;
pub mod symmetric;
