//! Hold-out splits for unseen-label experiments.

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

/// Moves every instance labelled with one of `unseen_labels` into the test
/// set; everything else is training data. Order is preserved on both sides.
pub fn split_scenario(dataset: &Dataset, unseen_labels: &[Label]) -> Result<(Dataset, Dataset)> {
    if unseen_labels.is_empty() {
        return Err(Error::Config("no unseen labels given".into()));
    }
    let train = dataset.filter(|i| !unseen_labels.contains(&i.label));
    let test = dataset.filter(|i| unseen_labels.contains(&i.label));
    if train.is_empty() {
        return Err(Error::Config(
            "unseen labels cover every instance; nothing left to train on".into(),
        ));
    }
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset() -> Dataset {
        Dataset::from_rows((0..12).map(|i| (vec![i as f64], (i % 4) as Label + 1)).collect()).unwrap()
    }

    #[test]
    fn unseen_instances_move_to_test() {
        let ds = dataset();
        let (train, test) = split_scenario(&ds, &[2, 3]).unwrap();
        assert_eq!(train.len() + test.len(), ds.len());
        assert!(train.instances().iter().all(|i| i.label != 2 && i.label != 3));
        assert!(test.instances().iter().all(|i| i.label == 2 || i.label == 3));
        assert_eq!(test.len(), 6);
    }

    #[test]
    fn guards() {
        let ds = dataset();
        assert!(matches!(split_scenario(&ds, &[]), Err(Error::Config(_))));
        assert!(matches!(split_scenario(&ds, &[1, 2, 3, 4]), Err(Error::Config(_))));
        // a label absent from the data just yields an empty test side
        let (_, test) = split_scenario(&ds, &[99]).unwrap();
        assert!(test.is_empty());
    }
}
