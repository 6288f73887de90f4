//! Benchmark fixtures shared by the criterion targets.

use avgapprox::designs::{hyperbolic_cross, map_design};
use avgapprox::{Design, ProblemSpec};

/// Mapped hyperbolic cross of `level` for `r = (0, 0)`.
pub fn mapped_cross_2d(level: u32) -> (ProblemSpec, Design) {
    let spec = ProblemSpec::with_smoothness(&[0, 0]).expect("valid spec");
    let design = map_design(&hyperbolic_cross(level, &spec).expect("level within cap")).expect("mappable");
    (spec, design)
}
