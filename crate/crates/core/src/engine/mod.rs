//! Strong monomialization of monomial extensions and the coset system of
//! the resulting value-group inclusion.

mod cosets;
mod transform;

pub(crate) use cosets::frac;
pub use cosets::CosetSystem;
pub use transform::{
    apply_r_side, apply_rescale, apply_s_transform, apply_step, replay_steps, strong_monomialize,
    EngineConfig, Factor, MonomializationTrace, TransformStep,
};
