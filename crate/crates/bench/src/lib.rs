//! Fixed inputs shared by the criterion benches.

use qsat_core::families::{self, Family};
use qsat_core::solver_bounded::{gen_pseudo_line_instance, PseudoLineSpec};
use qsat_core::{sample_generic, QsatInstance};

/// A family member with its generic instance for `seed`.
pub struct Fixture {
    pub family: Family,
    pub instance: QsatInstance,
}

impl Fixture {
    pub fn new(family: Family, seed: u64) -> Self {
        let instance = sample_generic(&family.hypergraph, seed);
        Fixture { family, instance }
    }
}

pub fn crash(t: usize) -> Fixture {
    Fixture::new(families::crash(t, 3).expect("valid crash parameters"), 0)
}

pub fn guaranteed() -> Vec<Fixture> {
    [
        families::semicycle(6, 3),
        families::modified_torus(3, 3),
        families::fir_tree(2, 3),
        families::crash(3, 3),
    ]
    .into_iter()
    .map(|f| Fixture::new(f.expect("valid parameters"), 0))
    .collect()
}

pub fn pseudo_line(discs: usize, crosses: usize) -> QsatInstance {
    let spec = PseudoLineSpec::random(discs, crosses, 1).expect("even disc count");
    gen_pseudo_line_instance(&spec, 0).expect("valid spec")
}
