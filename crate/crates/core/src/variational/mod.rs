//! Lagrangian models, symplectic integration, pendulum boundary-value
//! problems and discrete action minimization.
//!
//! Positions are always lifted to the universal cover, so the homotopy class
//! of a path is encoded by its endpoint lifts.

mod destruction;
mod dynamics;
mod model;
mod path;
mod pendulum;

pub use destruction::*;
pub use dynamics::*;
pub use model::*;
pub use path::*;
pub use pendulum::*;
