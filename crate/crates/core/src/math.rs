// libm shims so the numerics read the same with or without std.
pub(crate) use libm::{acos, ceil, cos, exp, sin, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;
