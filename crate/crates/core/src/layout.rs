use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Ordered local dimensions `d_1..d_n` of an `n`-partite tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyLayout);
        }
        if dims.contains(&0) {
            return Err(Error::ZeroDimension);
        }
        Ok(SubsystemLayout { dims })
    }

    /// Layout with `n` parties of equal dimension `d`.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(alloc::vec![d; n])
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn dim(&self, party: usize) -> usize {
        self.dims[party]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn max_local_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(1)
    }

    /// Checks that `dim` equals the product of the local dimensions.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        let expected = self.total_dim();
        if expected != dim {
            return Err(Error::DimensionMismatch {
                expected,
                found: dim,
            });
        }
        Ok(())
    }

    /// Validates an index set and returns it sorted without duplicates.
    pub fn normalize_subset(&self, subset: &[usize]) -> Result<Vec<usize>> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut s: Vec<usize> = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        if let Some(&bad) = s.iter().find(|&&i| i >= self.parties()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.parties(),
            });
        }
        Ok(s)
    }

    /// Parties not in `subset` (which must already be normalized).
    pub fn complement(&self, subset: &[usize]) -> Vec<usize> {
        (0..self.parties())
            .filter(|i| !subset.contains(i))
            .collect()
    }

    /// Sub-layout on the given (normalized) parties.
    pub fn restrict(&self, subset: &[usize]) -> SubsystemLayout {
        SubsystemLayout {
            dims: subset.iter().map(|&i| self.dims[i]).collect(),
        }
    }

    /// Two-party layout grouping parties `0..cut` against `cut..n`.
    pub fn bipartition(&self, cut: usize) -> Result<SubsystemLayout> {
        if cut == 0 || cut >= self.parties() {
            return Err(Error::InvalidCut {
                cut,
                parties: self.parties(),
            });
        }
        let a = self.dims[..cut].iter().product();
        let b = self.dims[cut..].iter().product();
        Ok(SubsystemLayout {
            dims: alloc::vec![a, b],
        })
    }

    /// Multi-index digits (party order, most significant first) of a flat index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = alloc::vec![0; self.parties()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn flat_index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }
}
