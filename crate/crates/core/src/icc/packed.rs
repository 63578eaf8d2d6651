use crate::probability::Symbol;

/// Largest table a chunk may index.
const TABLE_LIMIT: usize = 4096;

/// Equal-length words packed into base-`k` chunk codes, so that any
/// position-wise additive score of every word costs one table lookup per
/// chunk once the per-chunk tables are built.
#[derive(Debug, Clone)]
pub(crate) struct PackedWords {
    k: usize,
    len: usize,
    /// Symbols per chunk.
    width: usize,
    chunks: usize,
    codes: Vec<u16>,
}

impl PackedWords {
    /// `data` holds consecutive words of `len` symbols over `k` letters.
    pub(crate) fn new(data: &[Symbol], len: usize, k: usize) -> Self {
        let k = k.max(2);
        let mut width = 1;
        while width < len && k.pow(width as u32 + 1) <= TABLE_LIMIT {
            width += 1;
        }
        let chunks = len.div_ceil(width);
        let count = if len == 0 { 0 } else { data.len() / len };
        let mut codes = Vec::with_capacity(count * chunks);
        for w in data.chunks_exact(len.max(1)).take(count) {
            for c in w.chunks(width) {
                codes.push(c.iter().fold(0usize, |acc, &s| acc * k + s as usize) as u16);
            }
        }
        PackedWords { k, len, width, chunks, codes }
    }

    /// `sum_i score(i, word[i])` for every word.
    pub(crate) fn scores(&self, count: usize, score: impl Fn(usize, Symbol) -> f64) -> Vec<f64> {
        if self.len == 0 {
            return vec![0.0; count];
        }
        let mut tables = Vec::with_capacity(self.chunks);
        for j in 0..self.chunks {
            let start = j * self.width;
            let w = self.width.min(self.len - start);
            let size = self.k.pow(w as u32);
            let mut t = vec![0.0; size];
            for (code, slot) in t.iter_mut().enumerate() {
                let mut c = code;
                let mut acc = 0.0;
                for i in (0..w).rev() {
                    acc += score(start + i, (c % self.k) as Symbol);
                    c /= self.k;
                }
                *slot = acc;
            }
            tables.push(t);
        }
        self.codes
            .chunks_exact(self.chunks)
            .map(|cs| cs.iter().zip(&tables).map(|(&c, t)| t[c as usize]).sum())
            .collect()
    }
}
