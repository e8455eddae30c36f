use num_complex::Complex64;

/// Snapshot-averaged cross-products for every receiver pair. Only `i ≤ j` is
/// stored; `(j, i)` is returned as the conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityEstimate {
    n: usize,
    snapshots: u64,
    upper: Vec<Complex64>,
}

impl VisibilityEstimate {
    pub(crate) fn from_upper(n: usize, snapshots: u64, upper: Vec<Complex64>) -> Self {
        debug_assert_eq!(upper.len(), n * (n + 1) / 2);
        Self {
            n,
            snapshots,
            upper,
        }
    }

    /// Number of receivers.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn snapshots(&self) -> u64 {
        self.snapshots
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        // row i of the packed upper triangle starts after i rows of
        // decreasing length
        i * self.n - i * (i + 1) / 2 + j
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        assert!(i < self.n && j < self.n, "pair ({i}, {j}) out of range");
        if i <= j {
            self.upper[self.offset(i, j)]
        } else {
            self.upper[self.offset(j, i)].conj()
        }
    }

    /// Applies `f(i, j, value)` to every stored `i ≤ j` entry.
    pub(crate) fn map_upper(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let mut upper = Vec::with_capacity(self.upper.len());
        for i in 0..self.n {
            for j in i..self.n {
                upper.push(f(i, j, self.upper[self.offset(i, j)]));
            }
        }
        Self::from_upper(self.n, self.snapshots, upper)
    }

    /// Mean of the autocorrelations (real part).
    pub fn mean_power(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum::<f64>() / self.n as f64
    }

    /// Every entry divided by [`mean_power`](Self::mean_power), which removes
    /// the overall source power and gain scale.
    pub fn normalized(&self) -> Self {
        let p = self.mean_power();
        if p > 0.0 {
            self.map_upper(|_, _, v| v / p)
        } else {
            self.clone()
        }
    }

    /// CSV with header `i,j,re,im` over all ordered pairs, 0-based indices.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,re,im\n");
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                s.push_str(&format!("{i},{j},{},{}\n", v.re, v.im));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_indexing() {
        let n = 3;
        let upper: Vec<Complex64> = (0..6).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let e = VisibilityEstimate::from_upper(n, 1, upper);
        assert_eq!(e.get(0, 0).re, 0.0);
        assert_eq!(e.get(0, 2).re, 2.0);
        assert_eq!(e.get(1, 1).re, 3.0);
        assert_eq!(e.get(1, 2).re, 4.0);
        assert_eq!(e.get(2, 2).re, 5.0);
        assert_eq!(e.get(2, 1), Complex64::new(4.0, -1.0));
        let csv = e.to_csv();
        assert!(csv.starts_with("i,j,re,im\n0,0,0,1\n"));
        assert_eq!(csv.lines().count(), 10);
    }
}
