use crate::election::{Profile3, FULL_ORDERS};

/// Splits `total` in proportion to `weights` by largest remainder. Equal
/// remainders favor the earlier weight. All-zero weights split evenly.
pub fn split_largest_remainder(total: u64, weights: &[u64]) -> Vec<u64> {
    if weights.is_empty() {
        return Vec::new();
    }
    let sum: u128 = weights.iter().map(|&w| u128::from(w)).sum();
    let (weights, sum): (Vec<u128>, u128) = if sum == 0 {
        (vec![1; weights.len()], weights.len() as u128)
    } else {
        (weights.iter().map(|&w| u128::from(w)).collect(), sum)
    };
    let t = u128::from(total);
    let mut parts: Vec<u64> = weights.iter().map(|w| (t * w / sum) as u64).collect();
    let rems: Vec<u128> = weights.iter().map(|w| t * w % sum).collect();
    let left = total - parts.iter().sum::<u64>();
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    idx.sort_by(|&i, &j| rems[j].cmp(&rems[i]).then(i.cmp(&j)));
    for &i in idx.iter().take(left as usize) {
        parts[i] += 1;
    }
    parts
}

/// Replaces each candidate's bullet votes with full rankings split in
/// proportion to the voters who ranked that candidate first in full.
pub fn complete_proportionally(profile: &Profile3) -> Profile3 {
    let mut full = profile.full;
    for (c, &b) in profile.bullets.iter().enumerate() {
        let idx: Vec<usize> = (0..6).filter(|&i| FULL_ORDERS[i][0].index() == c).collect();
        let split = split_largest_remainder(b, &[profile.full[idx[0]], profile.full[idx[1]]]);
        full[idx[0]] += split[0];
        full[idx[1]] += split[1];
    }
    Profile3::complete(full)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits() {
        assert_eq!(split_largest_remainder(100, &[30, 20]), vec![60, 40]);
        assert_eq!(split_largest_remainder(7, &[1, 2]), vec![2, 5]);
        assert_eq!(split_largest_remainder(5, &[0, 0]), vec![3, 2]);
        assert_eq!(split_largest_remainder(5, &[1, 1]), vec![3, 2]);
        assert_eq!(split_largest_remainder(4, &[0, 9]), vec![0, 4]);
        assert_eq!(split_largest_remainder(0, &[3, 4]), vec![0, 0]);
    }

    #[test]
    fn minneapolis_completion() {
        let p = Profile3::new([908, 756, 801, 1177, 1088, 1299], [1572, 822, 492]);
        let c = complete_proportionally(&p);
        assert_eq!(c.voters(), p.voters());
        assert!(c.is_complete());
        for k in 0..3 {
            assert_eq!(c.full[2 * k] + c.full[2 * k + 1], p.full[2 * k] + p.full[2 * k + 1] + p.bullets[k]);
        }
        // 1572 * 908 / 1664 = 857.8
        assert_eq!(c.full[0], 908 + 858);
    }
}
