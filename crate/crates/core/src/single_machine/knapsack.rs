use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnapsackItem {
    pub volume: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnapsackSelection {
    /// Indices into the item slice, ascending.
    pub selected: Vec<usize>,
    pub total_volume: f64,
    pub total_weight: f64,
    pub budget: f64,
}

/// Maximum-weight subset under a volume budget with `(1 + eps)` resource
/// augmentation.
///
/// Volumes are rounded down to multiples of `eps * budget / n` and the
/// rounded problem is solved exactly by dynamic programming, so the result
/// weighs at least as much as the best set of true volume `<= budget`, while
/// its true volume stays within `budget + n * eps * budget / n`. Ties favour
/// earlier items. Runs in `O(n^2 / eps)`.
pub fn knapsack_augmented(items: &[KnapsackItem], budget: f64, eps: f64) -> Result<KnapsackSelection> {
    if eps.is_nan() || eps <= 0.0 || budget.is_nan() || budget <= 0.0 {
        return Err(Error::Config(format!("knapsack needs eps > 0 and budget > 0, got {eps} and {budget}")));
    }
    let n = items.len();
    if n == 0 {
        return Ok(KnapsackSelection { selected: Vec::new(), total_volume: 0.0, total_weight: 0.0, budget });
    }

    let unit = eps * budget / n as f64;
    // budget / unit == n / eps; the nudge absorbs representation error.
    let capacity = (n as f64 / eps + 1e-6).floor() as usize;
    let sizes: Vec<Option<usize>> = items
        .iter()
        .map(|it| {
            let s = (it.volume / unit).floor();
            (s <= capacity as f64).then_some(s as usize)
        })
        .collect();

    let mut best = vec![0.0_f64; capacity + 1];
    let mut take = vec![vec![false; capacity + 1]; n];
    for (i, item) in items.iter().enumerate() {
        let Some(size) = sizes[i] else { continue };
        for c in (size..=capacity).rev() {
            let with = best[c - size] + item.weight;
            if with > best[c] {
                best[c] = with;
                take[i][c] = true;
            }
        }
    }

    let mut selected = Vec::new();
    let mut c = capacity;
    for i in (0..n).rev() {
        if take[i][c] {
            selected.push(i);
            c -= sizes[i].expect("taken items have a size");
        }
    }
    selected.reverse();
    let total_volume = selected.iter().map(|&i| items[i].volume).sum();
    let total_weight = selected.iter().map(|&i| items[i].weight).sum();
    Ok(KnapsackSelection { selected, total_volume, total_weight, budget })
}
