pub mod coalescent;
pub mod diffusion;
pub mod dual;
pub mod error;
pub mod experiments;
pub mod forward;
pub mod params;
pub mod rng;
pub mod sampling;
pub mod stats;
