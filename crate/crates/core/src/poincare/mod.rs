//! Norm-controlled Poincaré lemmas on the open box `Q = (0,1)ⁿ` and the
//! half-open box `Q′ = (0,1)ⁿ⁻¹ × [0,1)`.

mod primitive;

pub use primitive::{
  kn_constant, kn_constant_with, primitive_box, primitive_halfbox, PrimitiveResult, PrimitiveStep,
  ZERO_INTEGRAL_TOLERANCE,
};
