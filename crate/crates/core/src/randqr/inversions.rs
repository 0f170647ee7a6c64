use crate::error::{QregError, Result};

/// Number of pairs whose relative order differs between two permutations of
/// `0..n`, and for each id the number of such pairs it belongs to.
///
/// Runs a merge sort over the start order keyed by end-order position; each
/// inversion found while merging is credited to both of its elements.
pub fn inversion_counts(start: &[usize], end: &[usize]) -> Result<(u64, Vec<u64>)> {
    let n = start.len();
    if end.len() != n {
        return Err(QregError::MismatchedIds);
    }
    let mut end_pos = vec![usize::MAX; n];
    for (p, &id) in end.iter().enumerate() {
        if id >= n || end_pos[id] != usize::MAX {
            return Err(QregError::MismatchedIds);
        }
        end_pos[id] = p;
    }
    let mut seen = vec![false; n];
    for &id in start {
        if id >= n || seen[id] {
            return Err(QregError::MismatchedIds);
        }
        seen[id] = true;
    }

    let mut keys: Vec<usize> = start.iter().map(|&id| end_pos[id]).collect();
    let mut buf = vec![0; n];
    let mut tally = vec![0u64; n];
    let total = sort_count(&mut keys, &mut buf, &mut tally);
    let per_id = (0..n).map(|id| tally[end_pos[id]]).collect();
    Ok((total, per_id))
}

/// Sorts `keys` (distinct positions) ascending, crediting `tally[key]` once
/// per inversion the key takes part in.
fn sort_count(keys: &mut [usize], buf: &mut [usize], tally: &mut [u64]) -> u64 {
    let n = keys.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut total = sort_count(&mut keys[..mid], &mut buf[..mid], tally)
        + sort_count(&mut keys[mid..], &mut buf[mid..], tally);
    let (mut i, mut j, mut out) = (0, mid, 0);
    while i < mid || j < n {
        if j == n || (i < mid && keys[i] < keys[j]) {
            // every right key already emitted is smaller but came later
            tally[keys[i]] += (j - mid) as u64;
            buf[out] = keys[i];
            i += 1;
        } else {
            let remaining = (mid - i) as u64;
            tally[keys[j]] += remaining;
            total += remaining;
            buf[out] = keys[j];
            j += 1;
        }
        out += 1;
    }
    keys.copy_from_slice(&buf[..n]);
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair_scan(start: &[usize], end: &[usize]) -> (u64, Vec<u64>) {
        let n = start.len();
        let mut pos = vec![0; n];
        for (p, &id) in end.iter().enumerate() {
            pos[id] = p;
        }
        let mut per = vec![0; n];
        let mut total = 0;
        for a in 0..n {
            for b in a + 1..n {
                if pos[start[a]] > pos[start[b]] {
                    total += 1;
                    per[start[a]] += 1;
                    per[start[b]] += 1;
                }
            }
        }
        (total, per)
    }

    #[test]
    fn identity_and_reverse() {
        let id = [0, 1, 2, 3];
        assert_eq!(inversion_counts(&id, &id).unwrap(), (0, vec![0; 4]));
        assert_eq!(inversion_counts(&id, &[3, 2, 1, 0]).unwrap(), (6, vec![3; 4]));
    }

    #[test]
    fn small_permutation() {
        // inverted pairs: (0,2), (1,2), (1,3)
        let (total, per) = inversion_counts(&[0, 1, 2, 3], &[2, 0, 3, 1]).unwrap();
        assert_eq!(total, 3);
        assert_eq!(per, vec![1, 2, 2, 1]);
        assert_eq!((total, per), pair_scan(&[0, 1, 2, 3], &[2, 0, 3, 1]));
    }

    #[test]
    fn mismatched_ids() {
        assert!(matches!(inversion_counts(&[0, 1], &[0, 2]), Err(QregError::MismatchedIds)));
        assert!(matches!(inversion_counts(&[0, 0], &[0, 1]), Err(QregError::MismatchedIds)));
        assert!(inversion_counts(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn random_permutations_match_pair_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [0, 1, 2, 3, 7, 64, 200] {
            for _ in 0..20 {
                let mut a: Vec<usize> = (0..n).collect();
                let mut b = a.clone();
                a.shuffle(&mut rng);
                b.shuffle(&mut rng);
                assert_eq!(inversion_counts(&a, &b).unwrap(), pair_scan(&a, &b));
            }
        }
    }
}
