use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform tensor-product grid on a box in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    counts: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let n = lo.len();
        if n == 0 || hi.len() != n || counts.len() != n {
            return Err(Error::Invalid("grid bounds and counts must share a positive dimension".into()));
        }
        for i in 0..n {
            if !(lo[i].is_finite() && hi[i].is_finite() && hi[i] > lo[i]) {
                return Err(Error::Invalid(format!("grid axis {i}: need lo < hi, got [{}, {}]", lo[i], hi[i])));
            }
            if counts[i] < 2 {
                return Err(Error::Invalid(format!("grid axis {i}: need at least 2 points")));
            }
        }
        let total = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
        if total.is_none_or(|t| t > 50_000_000) {
            return Err(Error::Invalid("grid has too many points".into()));
        }
        Ok(Self { lo, hi, counts })
    }

    /// `[-half, half]^n` with `count` points per axis.
    pub fn cube(n: usize, half: f64, count: usize) -> Result<Self> {
        Self::new(vec![-half; n], vec![half; n], vec![count; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.counts[axis] - 1) as f64
    }

    /// Same box with `2 (count - 1) + 1` points per axis.
    pub fn refined(&self) -> Self {
        Self { counts: self.counts.iter().map(|c| 2 * (c - 1) + 1).collect(), ..self.clone() }
    }

    /// Multi-index of a flat index; the last axis varies fastest.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.counts[axis];
            flat /= self.counts[axis];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.counts).fold(0, |acc, (i, c)| acc * c + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(axis, &i)| self.lo[axis] + i as f64 * self.spacing(axis))
            .collect()
    }

    /// Flat index of the neighbour `offset` cells along `axis`, if any.
    pub fn neighbour(&self, flat: usize, axis: usize, offset: isize) -> Option<usize> {
        let mut idx = self.multi_index(flat);
        let moved = idx[axis] as isize + offset;
        if moved < 0 || moved >= self.counts[axis] as isize {
            return None;
        }
        idx[axis] = moved as usize;
        Some(self.flat_index(&idx))
    }

    /// Whether the point is at least `margin` cells away from every face.
    pub fn is_interior(&self, flat: usize, margin: usize) -> bool {
        self.multi_index(flat).iter().zip(&self.counts).all(|(&i, &c)| i >= margin && i + margin < c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let g = Grid::new(vec![0.0, -1.0, 2.0], vec![1.0, 1.0, 3.0], vec![3, 4, 5]).unwrap();
        assert_eq!(g.len(), 60);
        for flat in 0..g.len() {
            assert_eq!(g.flat_index(&g.multi_index(flat)), flat);
        }
        assert_eq!(g.point(0), vec![0.0, -1.0, 2.0]);
        assert_eq!(g.point(59), vec![1.0, 1.0, 3.0]);
        assert_eq!(g.neighbour(0, 2, 1), Some(1));
        assert_eq!(g.neighbour(0, 0, -1), None);
        assert!(!g.is_interior(0, 1));
        assert_eq!(g.refined().counts(), &[5, 7, 9]);
        assert_eq!(g.refined().spacing(0), g.spacing(0) / 2.0);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid::new(vec![0.0], vec![0.0], vec![3]).is_err());
        assert!(Grid::new(vec![0.0], vec![1.0], vec![1]).is_err());
        assert!(Grid::new(vec![0.0, 0.0], vec![1.0], vec![3]).is_err());
    }
}
