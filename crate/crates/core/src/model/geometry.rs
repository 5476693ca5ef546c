use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        (*other - *self).norm()
    }
}

impl<T: Scalar> Add for Point3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<T: Scalar> Sub for Point3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

/// Coordinate plane holding the surface. The outward normal is the positive
/// remaining axis (`+z` for `Xy`, `+y` for `Xz`, `+x` for `Yz`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Xy,
    Xz,
    Yz,
}

impl Orientation {
    fn embed<T: Scalar>(self, u: T, v: T) -> Point3<T> {
        match self {
            Orientation::Xy => Point3::new(u, v, T::zero()),
            Orientation::Xz => Point3::new(u, T::zero(), v),
            Orientation::Yz => Point3::new(T::zero(), u, v),
        }
    }
}

/// `rows × cols` grid of unit cells centred on `origin`.
///
/// Cells are indexed row-major starting from the lower-left cell: row `n`
/// grows along the second in-plane axis, column `m` along the first.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGeometry<T> {
    rows: usize,
    cols: usize,
    spacing: T,
    origin: Point3<T>,
    orientation: Orientation,
}

impl<T: Scalar> SurfaceGeometry<T> {
    pub fn new(rows: usize, cols: usize, spacing: T) -> Result<Self> {
        Self::with_placement(rows, cols, spacing, Point3::origin(), Orientation::Xy)
    }

    pub fn with_placement(
        rows: usize,
        cols: usize,
        spacing: T,
        origin: Point3<T>,
        orientation: Orientation,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Config(format!(
                "surface needs at least one row and one column, got {rows}x{cols}"
            )));
        }
        if !(spacing.is_finite() && spacing > T::zero()) {
            return Err(Error::Config(format!(
                "cell spacing must be > 0, got {spacing}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            spacing,
            origin,
            orientation,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn origin(&self) -> Point3<T> {
        self.origin
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn cell_index(&self, n: usize, m: usize) -> usize {
        n * self.cols + m
    }

    /// `(row, col)` of a flat cell index.
    pub fn cell_coords(&self, index: usize) -> (usize, usize) {
        (index / self.cols, index % self.cols)
    }

    /// In-plane offset of cell `(n, m)` from the grid centre.
    pub fn local_position(&self, n: usize, m: usize) -> Result<(T, T)> {
        if n >= self.rows || m >= self.cols {
            return Err(Error::Domain(format!(
                "cell ({n}, {m}) outside {}x{} grid",
                self.rows, self.cols
            )));
        }
        let half = T::lit(0.5);
        let u = (T::from_usize_lossy(m) - T::from_usize_lossy(self.cols - 1) * half) * self.spacing;
        let v = (T::from_usize_lossy(n) - T::from_usize_lossy(self.rows - 1) * half) * self.spacing;
        Ok((u, v))
    }

    pub fn cell_position(&self, n: usize, m: usize) -> Result<Point3<T>> {
        let (u, v) = self.local_position(n, m)?;
        Ok(self.origin + self.orientation.embed(u, v))
    }

    /// All cell positions in flat index order.
    pub fn cell_positions(&self) -> Vec<Point3<T>> {
        (0..self.rows)
            .flat_map(|n| (0..self.cols).map(move |m| (n, m)))
            .map(|(n, m)| self.cell_position(n, m).expect("index in range"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointRole {
    /// Antenna illuminating the surface.
    Feed,
    /// Receive antenna feeding the detector.
    Receive,
    /// Passive observation probe (spectra only).
    Probe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T> {
    points: Vec<(Point3<T>, PointRole)>,
}

impl<T: Scalar> PointSet<T> {
    pub fn new(points: Vec<(Point3<T>, PointRole)>) -> Self {
        Self { points }
    }

    pub fn empty() -> Self {
        Self { points: Vec::new() }
    }

    pub fn push(&mut self, position: Point3<T>, role: PointRole) {
        self.points.push((position, role));
    }

    pub fn all(&self) -> &[(Point3<T>, PointRole)] {
        &self.points
    }

    /// First point tagged [`PointRole::Feed`].
    pub fn feed(&self) -> Option<Point3<T>> {
        self.points
            .iter()
            .find(|(_, r)| *r == PointRole::Feed)
            .map(|(p, _)| *p)
    }

    /// Receive and probe points, in insertion order.
    pub fn observation_points(&self) -> Vec<(Point3<T>, PointRole)> {
        self.points
            .iter()
            .filter(|(_, r)| *r != PointRole::Feed)
            .copied()
            .collect()
    }

    pub fn receive_count(&self) -> usize {
        self.points
            .iter()
            .filter(|(_, r)| *r == PointRole::Receive)
            .count()
    }

    /// Checks that no point coincides with a cell.
    pub fn validate_against(&self, geometry: &SurfaceGeometry<T>) -> Result<()> {
        let floor = geometry.spacing() * T::epsilon();
        for (i, (p, _)) in self.points.iter().enumerate() {
            for (c, cell) in geometry.cell_positions().iter().enumerate() {
                if p.distance(cell) <= floor {
                    return Err(Error::Domain(format!("point {i} coincides with cell {c}")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_is_centred() {
        let g = SurfaceGeometry::new(1, 1, 0.035_f64).unwrap();
        assert_eq!(g.cell_position(0, 0).unwrap(), Point3::origin());
    }

    #[test]
    fn two_by_two_symmetric() {
        let g = SurfaceGeometry::new(2, 2, 1.0_f64).unwrap();
        assert_eq!(g.cell_position(0, 0).unwrap(), Point3::new(-0.5, -0.5, 0.0));
        assert_eq!(g.cell_position(1, 1).unwrap(), Point3::new(0.5, 0.5, 0.0));
    }

    #[test]
    fn sixteen_grid_corner() {
        let g = SurfaceGeometry::new(16, 16, 0.035_f64).unwrap();
        let p = g.cell_position(15, 15).unwrap();
        assert!((p.x - 0.2625).abs() < 1e-15);
        assert!((p.y - 0.2625).abs() < 1e-15);
        assert_eq!(p.z, 0.0);
    }

    #[test]
    fn orientation_and_origin() {
        let g = SurfaceGeometry::with_placement(
            2,
            2,
            1.0_f64,
            Point3::new(1.0, 2.0, 3.0),
            Orientation::Yz,
        )
        .unwrap();
        assert_eq!(g.cell_position(0, 1).unwrap(), Point3::new(1.0, 2.5, 2.5));
    }

    #[test]
    fn out_of_range_and_bad_config() {
        let g = SurfaceGeometry::new(2, 3, 1.0_f64).unwrap();
        assert!(matches!(g.cell_position(2, 0), Err(Error::Domain(_))));
        assert!(matches!(g.cell_position(0, 3), Err(Error::Domain(_))));
        assert!(SurfaceGeometry::new(0, 3, 1.0_f64).is_err());
        assert!(SurfaceGeometry::new(1, 3, 0.0_f64).is_err());
    }

    #[test]
    fn positions_injective() {
        let g = SurfaceGeometry::new(5, 7, 0.01_f64).unwrap();
        let pos = g.cell_positions();
        for i in 0..pos.len() {
            for j in (i + 1)..pos.len() {
                assert!(pos[i].distance(&pos[j]) > 0.0);
            }
        }
        assert_eq!(g.cell_coords(g.cell_index(3, 4)), (3, 4));
    }

    #[test]
    fn point_on_cell_rejected() {
        let g = SurfaceGeometry::new(2, 2, 1.0_f64).unwrap();
        let mut pts = PointSet::empty();
        pts.push(Point3::new(0.0, 0.0, 1.0), PointRole::Feed);
        assert!(pts.validate_against(&g).is_ok());
        pts.push(Point3::new(0.5, 0.5, 0.0), PointRole::Receive);
        assert!(pts.validate_against(&g).is_err());
    }
}
