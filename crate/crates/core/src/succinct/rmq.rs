use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Range-minimum structure: block decomposition (block size ~ log2 m) with a
/// sparse table over block minima and in-block scans. Ties resolve to the
/// leftmost position. Owns a copy of the values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Rmq {
    vals: Vec<u64>,
    block: usize,
    /// 0-based position of the leftmost minimum per block.
    block_min: Vec<u32>,
    /// sparse[k][b] = position of leftmost min over blocks b..b+2^k.
    sparse: Vec<Vec<u32>>,
}

impl Rmq {
    pub fn new(vals: Vec<u64>) -> Self {
        let m = vals.len();
        let block = if m <= 1 { 1 } else { (usize::BITS - (m - 1).leading_zeros()) as usize };
        let nb = m.div_ceil(block).max(1);
        let mut block_min = Vec::with_capacity(nb);
        for b in 0..nb {
            let lo = b * block;
            let hi = (lo + block).min(m);
            let mut best = lo;
            for i in lo + 1..hi {
                if vals[i] < vals[best] {
                    best = i;
                }
            }
            block_min.push(best as u32);
        }
        let levels = if nb <= 1 { 1 } else { nb.ilog2() as usize + 1 };
        let mut sparse = Vec::with_capacity(levels);
        sparse.push(block_min.clone());
        for k in 1..levels {
            let half = 1usize << (k - 1);
            let prev = &sparse[k - 1];
            let row: Vec<u32> = (0..nb - 2 * half + 1)
                .map(|b| {
                    let (l, r) = (prev[b], prev[b + half]);
                    if vals[r as usize] < vals[l as usize] {
                        r
                    } else {
                        l
                    }
                })
                .collect();
            sparse.push(row);
        }
        Rmq {
            vals,
            block,
            block_min,
            sparse,
        }
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Value at 1-based position.
    pub fn value(&self, pos: usize) -> u64 {
        self.vals[pos - 1]
    }

    /// 1-based position of the leftmost minimum of values[l..=r] (1-based).
    pub fn query(&self, l: usize, r: usize) -> Result<usize> {
        if l < 1 || r > self.vals.len() || l > r {
            return Err(Error::InvalidRange(l, r));
        }
        let (l0, r0) = (l - 1, r - 1); // 0-based inclusive
        let bl = l0 / self.block;
        let br = r0 / self.block;
        let mut best = l0;
        if bl == br {
            for i in l0 + 1..=r0 {
                if self.vals[i] < self.vals[best] {
                    best = i;
                }
            }
            return Ok(best + 1);
        }
        // head partial block
        for i in l0 + 1..(bl + 1) * self.block {
            if self.vals[i] < self.vals[best] {
                best = i;
            }
        }
        // full blocks bl+1 .. br-1 via sparse table
        if br - bl >= 2 {
            let (a, b) = (bl + 1, br - 1);
            let k = (b - a + 1).ilog2() as usize;
            let c1 = self.sparse[k][a] as usize;
            let c2 = self.sparse[k][b + 1 - (1 << k)] as usize;
            let mid = if self.vals[c2] < self.vals[c1] { c2 } else { c1 };
            if self.vals[mid] < self.vals[best] {
                best = mid;
            }
        }
        // tail partial block
        for i in br * self.block..=r0 {
            if self.vals[i] < self.vals[best] {
                best = i;
            }
        }
        Ok(best + 1)
    }

    pub fn size_bits(&self) -> usize {
        (self.vals.len() + self.block_min.len()) * 64
            + self.sparse.iter().map(|row| row.len() * 32).sum::<usize>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn leftmost_tie() {
        let r = Rmq::new(vec![5, 2, 7, 2]);
        assert_eq!(r.query(1, 4).unwrap(), 2);
        assert_eq!(r.query(3, 3).unwrap(), 3);
        assert_eq!(r.query(3, 4).unwrap(), 4);
    }

    #[test]
    fn bad_ranges() {
        let r = Rmq::new(vec![1, 2, 3]);
        assert!(r.query(2, 1).is_err());
        assert!(r.query(0, 2).is_err());
        assert!(r.query(1, 4).is_err());
    }

    #[test]
    fn agrees_with_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m = rng.gen_range(1..=400);
            let vals: Vec<u64> = (0..m).map(|_| rng.gen_range(0..50)).collect();
            let rmq = Rmq::new(vals.clone());
            for _ in 0..200 {
                let l = rng.gen_range(1..=m);
                let r = rng.gen_range(l..=m);
                let naive = (l..=r).min_by_key(|&i| (vals[i - 1], i)).unwrap();
                assert_eq!(rmq.query(l, r).unwrap(), naive);
            }
        }
    }
}
