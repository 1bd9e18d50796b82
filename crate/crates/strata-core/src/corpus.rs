//! Reproducible random corpus shared by the property suites and the CLI:
//! blow-up traces paired with residue models, fully determined by one seed.

use alloc::vec::Vec;

use crate::blowup::{random_sequence, BlowupTrace};
use crate::residue::{random_model, ResidueModel};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Parameters of a corpus; instances are addressed by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSpec {
    /// Ambient dimensions, cycled over by instance index.
    pub dimensions: Vec<usize>,
    /// Blow-up counts are drawn from `1..=max_blowups`.
    pub max_blowups: usize,
    pub seed: u64,
}

impl CorpusSpec {
    pub fn new(dimensions: &[usize], max_blowups: usize, seed: u64) -> Self {
        assert!(!dimensions.is_empty() && dimensions.iter().all(|&d| d >= 2));
        assert!(max_blowups >= 1);
        CorpusSpec { dimensions: dimensions.to_vec(), max_blowups, seed }
    }
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec::new(&[2, 3, 4], 8, 7)
    }
}

/// One corpus entry: a blow-up trace and a residue model on its final
/// index set.
#[derive(Clone, Debug)]
pub struct CorpusInstance {
    pub trace: BlowupTrace,
    pub model: ResidueModel,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// Builds the instance at `index`; the same spec and index always produce
/// the same instance.
pub fn instance(spec: &CorpusSpec, index: usize) -> CorpusInstance {
    let base = splitmix(spec.seed ^ splitmix(index as u64));
    let dimension = spec.dimensions[index % spec.dimensions.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    let n_blowups = rng.gen_range(1..=spec.max_blowups);
    let trace = random_sequence(dimension, n_blowups, splitmix(base ^ 1))
        .expect("corpus parameters are valid");
    let model = random_model(trace.final_structure().indices(), splitmix(base ^ 2));
    CorpusInstance { trace, model }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_deterministic() {
        let spec = CorpusSpec::default();
        let a = instance(&spec, 3);
        let b = instance(&spec, 3);
        assert_eq!(a.trace.final_structure(), b.trace.final_structure());
        assert_eq!(a.model, b.model);
    }

    #[test]
    fn dimensions_cycle() {
        let spec = CorpusSpec::new(&[2, 3], 2, 0);
        assert_eq!(instance(&spec, 0).trace.dimension(), 2);
        assert_eq!(instance(&spec, 1).trace.dimension(), 3);
        assert_eq!(instance(&spec, 2).trace.dimension(), 2);
    }
}
