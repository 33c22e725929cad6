//! Fixtures shared by the solver benchmarks.

use sslsq_core::datagen::{generate, SyntheticSpec};
use sslsq_core::Dataset;

/// Default two-cluster problem: 4 labeled, 396 unlabeled, intercept plus one feature.
pub fn two_cluster(seed: u64) -> Dataset {
    generate(&SyntheticSpec::two_cluster_1d(seed))
        .expect("default spec is valid")
        .dataset
}

/// Two-cluster problem with `unlabeled` unlabeled objects.
pub fn two_cluster_with(seed: u64, unlabeled: usize) -> Dataset {
    generate(&SyntheticSpec {
        unlabeled_total: unlabeled,
        ..SyntheticSpec::two_cluster_1d(seed)
    })
    .expect("spec is valid")
    .dataset
}
