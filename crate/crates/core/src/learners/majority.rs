use fixedbitset::FixedBitSet;

/// Keep rule shared by every majority-style learner: a fact survives when
/// the weight of experts storing it is at least half the total weight.
#[inline]
pub fn weighted_keep(save_weight: f64, total_weight: f64) -> bool {
    2.0 * save_weight >= total_weight
}

/// Indices of the facts kept under 0/1 weights `weighted` when
/// `holders[f]` is the set of experts storing fact `f`.
pub fn majority_kept(weighted: &FixedBitSet, holders: &[FixedBitSet]) -> Vec<usize> {
    let total = weighted.count_ones(..);
    holders
        .iter()
        .enumerate()
        .filter(|(_, h)| 2 * h.intersection_count(weighted) >= total)
        .map(|(f, _)| f)
        .collect()
}
