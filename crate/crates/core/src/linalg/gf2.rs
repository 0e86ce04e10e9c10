//! Bit-packed elimination over `F_2`.

/// A vector over `F_2` packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

/// Reduced row-echelon form over `F_2`; returns rows sorted by pivot.
pub fn rref(rows: &[BitVec]) -> Vec<BitVec> {
    let mut m: Vec<BitVec> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..m.len()).find(|&k| m[k].get(c)) else {
            continue;
        };
        m.swap(r, k);
        let pivot = m[r].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k != r && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

/// Incremental echelon basis over `F_2`.
#[derive(Debug, Clone, Default)]
pub struct BitEchelon {
    rows: Vec<(usize, BitVec)>,
}

impl BitEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, v: &BitVec) -> bool {
        let mut r = v.clone();
        for (pc, row) in &self.rows {
            if r.get(*pc) {
                r.xor_assign(row);
            }
        }
        match r.first_one() {
            Some(pc) => {
                self.rows.push((pc, r));
                true
            }
            None => false,
        }
    }
}
