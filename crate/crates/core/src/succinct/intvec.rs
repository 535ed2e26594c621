use serde::{Deserialize, Serialize};

/// Fixed-width packed integer vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntVec {
    words: Vec<u64>,
    width: u32,
    len: usize,
}

impl IntVec {
    /// Pack `values` at `ceil(log2(max+1))` bits each.
    pub fn from_slice(values: &[u64]) -> Self {
        let max = values.iter().copied().max().unwrap_or(0);
        let width = (64 - max.leading_zeros()).max(1);
        let mut iv = IntVec {
            words: vec![0u64; (values.len() * width as usize).div_ceil(64)],
            width,
            len: values.len(),
        };
        for (i, &v) in values.iter().enumerate() {
            iv.set(i, v);
        }
        iv
    }

    fn set(&mut self, i: usize, v: u64) {
        debug_assert!(self.width == 64 || v < 1u64 << self.width);
        let bit = i * self.width as usize;
        let (w, off) = (bit / 64, bit % 64);
        self.words[w] |= v << off;
        if off + self.width as usize > 64 {
            self.words[w + 1] |= v >> (64 - off);
        }
    }

    /// Value at 0-based position `i`.
    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        let bit = i * self.width as usize;
        let (w, off) = (bit / 64, bit % 64);
        let mut v = self.words[w] >> off;
        if off + self.width as usize > 64 {
            v |= self.words[w + 1] << (64 - off);
        }
        if self.width == 64 {
            v
        } else {
            v & ((1u64 << self.width) - 1)
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn size_bits(&self) -> usize {
        self.words.len() * 64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let vals: Vec<u64> = (0..1000).map(|i| (i * 37) % 53).collect();
        let iv = IntVec::from_slice(&vals);
        assert_eq!(iv.width(), 6);
        for (i, &v) in vals.iter().enumerate() {
            assert_eq!(iv.get(i), v);
        }
    }

    #[test]
    fn wide_values() {
        let vals = [0, u64::MAX, 12345];
        let iv = IntVec::from_slice(&vals);
        for (i, &v) in vals.iter().enumerate() {
            assert_eq!(iv.get(i), v);
        }
    }
}
