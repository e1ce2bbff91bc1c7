use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LabelSet, MultiViewDataset};
use crate::error::{Error, Result};

/// Replaces the class of `round(fraction * N_l)` labeled instances per task
/// with a uniformly drawn different class. Ground truth is left untouched.
pub fn inject_label_noise(
    ds: &MultiViewDataset,
    fraction: f64,
    seed: u64,
) -> Result<MultiViewDataset> {
    if !(0.0..=0.5).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "noise fraction must lie in [0, 0.5], got {fraction}"
        )));
    }
    let flips = (fraction * ds.n_labeled as f64 + 0.5).floor() as usize;
    if flips == 0 {
        return Ok(ds.clone());
    }
    let c = ds.n_classes;
    if c < 2 {
        return Err(Error::InvalidArgument(
            "label noise needs at least two classes".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ds.clone();
    for task in &mut out.tasks {
        let mut classes = task.labels.classes().to_vec();
        for pos in sample(&mut rng, classes.len(), flips).into_vec() {
            let orig = classes[pos];
            let r = rng.random_range(0..c - 1);
            classes[pos] = if r >= orig { r + 1 } else { r };
        }
        task.labels = LabelSet::new(classes, c)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synth, SynthSpec};

    fn small() -> MultiViewDataset {
        let mut spec = SynthSpec::synth1(11);
        spec.instances_per_class = 50;
        spec.labeled_fraction = 100.0 / 150.0;
        generate_synth(&spec).unwrap()
    }

    #[test]
    fn zero_fraction_is_identity() {
        let ds = small();
        assert_eq!(inject_label_noise(&ds, 0.0, 1).unwrap(), ds);
    }

    #[test]
    fn half_fraction_flips_exactly_half() {
        let ds = small();
        assert_eq!(ds.n_labeled, 100);
        let noisy = inject_label_noise(&ds, 0.5, 9).unwrap();
        for (a, b) in ds.tasks.iter().zip(&noisy.tasks) {
            let changed = a
                .labels
                .classes()
                .iter()
                .zip(b.labels.classes())
                .filter(|(x, y)| x != y)
                .count();
            assert_eq!(changed, 50);
            assert_eq!(a.truth, b.truth);
            assert_eq!(a.views, b.views);
        }
    }

    #[test]
    fn same_seed_same_flips() {
        let ds = small();
        let a = inject_label_noise(&ds, 0.3, 5).unwrap();
        let b = inject_label_noise(&ds, 0.3, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rounding_follows_half_up() {
        let ds = small();
        // 0.005 * 100 = 0.5 rounds to one flip
        let noisy = inject_label_noise(&ds, 0.005, 2).unwrap();
        let changed = ds.tasks[0]
            .labels
            .classes()
            .iter()
            .zip(noisy.tasks[0].labels.classes())
            .filter(|(x, y)| x != y)
            .count();
        assert_eq!(changed, 1);
    }

    #[test]
    fn out_of_range_fraction_rejected() {
        assert!(inject_label_noise(&small(), 0.6, 0).is_err());
        assert!(inject_label_noise(&small(), -0.1, 0).is_err());
    }
}
