use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regular lattice over `(t, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid4 {
    pub origin: [f64; 4],
    pub spacing: [f64; 4],
    pub extents: [usize; 4],
}

impl Grid4 {
    pub fn new(origin: [f64; 4], spacing: [f64; 4], extents: [usize; 4]) -> Result<Self> {
        if spacing.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid spacings must be positive, got {spacing:?}")));
        }
        if extents.contains(&0) {
            return Err(Error::InvalidArgument(format!("grid extents must be at least 1, got {extents:?}")));
        }
        if origin.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("grid origin must be finite".into()));
        }
        Ok(Self { origin, spacing, extents })
    }

    /// Spatial cube `[lo, hi]^3` with `n` points per axis at a fixed time.
    pub fn spatial_cube(t: f64, lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::spatial_box(t, [lo; 3], [hi; 3], [n; 3])
    }

    pub fn spatial_box(t: f64, lo: [f64; 3], hi: [f64; 3], n: [usize; 3]) -> Result<Self> {
        let mut spacing = [1.0; 4];
        for a in 0..3 {
            if n[a] == 0 || !(hi[a] >= lo[a]) {
                return Err(Error::InvalidArgument(format!("bad axis {a}: [{}, {}] with {} points", lo[a], hi[a], n[a])));
            }
            spacing[a + 1] = if n[a] > 1 { (hi[a] - lo[a]) / (n[a] - 1) as f64 } else { 1.0 };
        }
        Self::new([t, lo[0], lo[1], lo[2]], spacing, [1, n[0], n[1], n[2]])
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major flat index, `z` fastest.
    pub fn flat(&self, idx: [usize; 4]) -> usize {
        ((idx[0] * self.extents[1] + idx[1]) * self.extents[2] + idx[2]) * self.extents[3] + idx[3]
    }

    pub fn unflat(&self, mut k: usize) -> [usize; 4] {
        let mut idx = [0; 4];
        for a in (0..4).rev() {
            idx[a] = k % self.extents[a];
            k /= self.extents[a];
        }
        idx
    }

    pub fn point(&self, idx: [usize; 4]) -> [f64; 4] {
        std::array::from_fn(|a| self.origin[a] + self.spacing[a] * idx[a] as f64)
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 4]> + '_ {
        (0..self.len()).map(|k| self.point(self.unflat(k)))
    }

    /// Largest spatial spacing among axes with more than one point.
    pub fn max_spatial_spacing(&self) -> f64 {
        (1..4).filter(|&a| self.extents[a] > 1).map(|a| self.spacing[a]).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_roundtrip() {
        let g = Grid4::new([0.0; 4], [1.0; 4], [2, 3, 4, 5]).unwrap();
        for k in 0..g.len() {
            assert_eq!(g.flat(g.unflat(k)), k);
        }
    }

    #[test]
    fn cube_endpoints() {
        let g = Grid4::spatial_cube(0.5, -2.0, 2.0, 5).unwrap();
        assert_eq!(g.point([0, 4, 4, 4]), [0.5, 2.0, 2.0, 2.0]);
        assert_eq!(g.len(), 125);
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(Grid4::new([0.0; 4], [0.0, 1.0, 1.0, 1.0], [1; 4]).is_err());
        assert!(Grid4::new([0.0; 4], [1.0; 4], [1, 0, 1, 1]).is_err());
    }
}
