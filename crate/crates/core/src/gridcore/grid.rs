use crate::error::{Error, Result};

/// Uniform cell-centered grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
}

impl Grid2 {
    pub fn new(nx: usize, ny: usize, x0: f64, y0: f64, hx: f64, hy: f64) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(Error::InvalidGrid(format!(
                "need nx, ny >= 4, got {nx} x {ny}"
            )));
        }
        if !(hx > 0.0 && hy > 0.0) || !hx.is_finite() || !hy.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "spacings must be positive, got {hx}, {hy}"
            )));
        }
        if !x0.is_finite() || !y0.is_finite() {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self {
            nx,
            ny,
            x0,
            y0,
            hx,
            hy,
        })
    }

    /// `n x n` cells covering the square `[lo, hi]^2`.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let h = (hi - lo) / n as f64;
        Self::new(n, n, lo, lo, h, h)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.x0 + (i as f64 + 0.5) * self.hx,
            self.y0 + (j as f64 + 0.5) * self.hy,
        ]
    }

    #[inline]
    pub fn center_of(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.ij(idx);
        self.center(i, j)
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn extent(&self) -> ([f64; 2], [f64; 2]) {
        (
            [self.x0, self.y0],
            [
                self.x0 + self.nx as f64 * self.hx,
                self.y0 + self.ny as f64 * self.hy,
            ],
        )
    }

    /// Index neighbor by a signed cell offset, if inside the grid.
    #[inline]
    pub fn offset(&self, i: usize, j: usize, di: i64, dj: i64) -> Option<usize> {
        let a = i as i64 + di;
        let b = j as i64 + dj;
        if a < 0 || b < 0 || a >= self.nx as i64 || b >= self.ny as i64 {
            None
        } else {
            Some(self.idx(a as usize, b as usize))
        }
    }

    /// Fractional cell coordinates of a point (cell centers at integers).
    #[inline]
    pub fn locate(&self, p: [f64; 2]) -> [f64; 2] {
        [
            (p[0] - self.x0) / self.hx - 0.5,
            (p[1] - self.y0) / self.hy - 0.5,
        ]
    }
}

/// Boolean cell mask on a grid; `true` means the cell belongs to the region.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<bool>,
}

impl Mask {
    pub fn full(grid: &Grid2) -> Self {
        Self {
            nx: grid.nx,
            ny: grid.ny,
            cells: vec![true; grid.len()],
        }
    }

    pub fn empty(grid: &Grid2) -> Self {
        Self {
            nx: grid.nx,
            ny: grid.ny,
            cells: vec![false; grid.len()],
        }
    }

    pub fn from_fn<F: Fn([f64; 2]) -> bool>(grid: &Grid2, f: F) -> Self {
        let cells = (0..grid.len()).map(|k| f(grid.center_of(k))).collect();
        Self {
            nx: grid.nx,
            ny: grid.ny,
            cells,
        }
    }

    pub fn disk(grid: &Grid2, center: [f64; 2], radius: f64) -> Self {
        Self::from_fn(grid, |p| {
            (p[0] - center[0]).hypot(p[1] - center[1]) < radius
        })
    }

    pub fn annulus(grid: &Grid2, center: [f64; 2], inner: f64, outer: f64) -> Self {
        Self::from_fn(grid, |p| {
            let r = (p[0] - center[0]).hypot(p[1] - center[1]);
            r >= inner && r <= outer
        })
    }

    pub fn rect(grid: &Grid2, lo: [f64; 2], hi: [f64; 2]) -> Self {
        Self::from_fn(grid, |p| {
            p[0] > lo[0] && p[0] < hi[0] && p[1] > lo[1] && p[1] < hi[1]
        })
    }

    #[inline]
    pub fn get(&self, idx: usize) -> bool {
        self.cells[idx]
    }

    #[inline]
    pub fn at(&self, i: i64, j: i64) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.nx
            && (j as usize) < self.ny
            && self.cells[j as usize * self.nx + i as usize]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn and(&self, other: &Mask) -> Mask {
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| *a && *b)
            .collect();
        Mask {
            nx: self.nx,
            ny: self.ny,
            cells,
        }
    }

    pub fn and_not(&self, other: &Mask) -> Mask {
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| *a && !*b)
            .collect();
        Mask {
            nx: self.nx,
            ny: self.ny,
            cells,
        }
    }

    pub fn or(&self, other: &Mask) -> Mask {
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| *a || *b)
            .collect();
        Mask {
            nx: self.nx,
            ny: self.ny,
            cells,
        }
    }

    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.cells.iter().zip(&other.cells).all(|(a, b)| !*a || *b)
    }

    /// Cells whose four-neighborhood out to `steps` cells lies in the mask.
    pub fn erode(&self, steps: usize) -> Mask {
        let mut cur = self.clone();
        for _ in 0..steps {
            let mut next = cur.clone();
            for j in 0..self.ny as i64 {
                for i in 0..self.nx as i64 {
                    let k = j as usize * self.nx + i as usize;
                    if cur.cells[k] {
                        next.cells[k] = cur.at(i + 1, j)
                            && cur.at(i - 1, j)
                            && cur.at(i, j + 1)
                            && cur.at(i, j - 1);
                    }
                }
            }
            cur = next;
        }
        cur
    }

    /// Cells `x` with both `x` and `x + (di, dj)` in the mask.
    pub fn shift_intersect(&self, di: i64, dj: i64) -> Mask {
        let mut cells = vec![false; self.cells.len()];
        for j in 0..self.ny as i64 {
            for i in 0..self.nx as i64 {
                let k = j as usize * self.nx + i as usize;
                cells[k] = self.cells[k] && self.at(i + di, j + dj);
            }
        }
        Mask {
            nx: self.nx,
            ny: self.ny,
            cells,
        }
    }

    /// Minimal number of cell steps (Chebyshev) from a cell of `self` to the
    /// complement of `outer`; cells outside the grid count as complement.
    pub fn separation_from_complement(&self, outer: &Mask) -> usize {
        if self.count() == 0 {
            return usize::MAX;
        }
        let mut cur = outer.clone();
        let mut steps = 0;
        while self.is_subset_of(&cur) {
            steps += 1;
            let mut next = cur.clone();
            for j in 0..self.ny as i64 {
                for i in 0..self.nx as i64 {
                    let k = j as usize * self.nx + i as usize;
                    if cur.cells[k] {
                        let mut keep = true;
                        'nb: for dj in -1..=1 {
                            for di in -1..=1 {
                                if !cur.at(i + di, j + dj) {
                                    keep = false;
                                    break 'nb;
                                }
                            }
                        }
                        next.cells[k] = keep;
                    }
                }
            }
            cur = next;
        }
        steps
    }
}

/// Nested regions `Ω' ⊂⊂ U ⊂⊂ Ω` plus an optional outer collar `Ω_δ`.
#[derive(Debug, Clone)]
pub struct RegionSpec {
    pub grid: Grid2,
    pub omega: Mask,
    pub inner: Mask,
    pub u: Mask,
    pub delta: f64,
    pub layer: Option<Mask>,
    pub tangent_boundary: bool,
}

impl RegionSpec {
    pub fn new(grid: Grid2, omega: Mask, u: Mask, inner: Mask) -> Result<Self> {
        let spec = Self {
            grid,
            omega,
            inner,
            u,
            delta: 0.0,
            layer: None,
            tangent_boundary: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Whole-grid region with trivially nested interior regions.
    pub fn whole(grid: &Grid2) -> Self {
        let omega = Mask::full(grid);
        Self {
            grid: *grid,
            inner: omega.clone(),
            u: omega.clone(),
            omega,
            delta: 0.0,
            layer: None,
            tangent_boundary: false,
        }
    }

    pub fn with_layer(mut self, delta: f64, layer: Mask, tangent: bool) -> Result<Self> {
        if delta < 0.0 {
            return Err(Error::InvalidArgument(
                "layer width must be nonnegative".into(),
            ));
        }
        if delta > 0.0 && !self.omega.is_subset_of(&layer) {
            return Err(Error::InvalidArgument("Ω_δ must contain Ω".into()));
        }
        self.delta = delta;
        self.layer = Some(layer);
        self.tangent_boundary = tangent;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega.count() == 0 {
            return Err(Error::EmptyRegion("Ω".into()));
        }
        if !self.inner.is_subset_of(&self.u) || !self.u.is_subset_of(&self.omega) {
            return Err(Error::InvalidArgument(
                "regions must be nested Ω' ⊆ U ⊆ Ω".into(),
            ));
        }
        // a separation of 1 means adjacent to the complement
        if self.inner.count() > 0 && self.inner.separation_from_complement(&self.u) < 2 {
            return Err(Error::InvalidArgument("Ω' touches ∂U".into()));
        }
        if self.u.count() > 0 && self.u.separation_from_complement(&self.omega) < 2 {
            return Err(Error::InvalidArgument("U touches ∂Ω".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_grids() {
        assert!(Grid2::new(2, 8, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(Grid2::new(8, 8, 0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn cell_centers() {
        let g = Grid2::new(4, 4, -1.0, 0.0, 0.5, 0.25).unwrap();
        assert_eq!(g.center(0, 0), [-0.75, 0.125]);
        assert_eq!(g.center(3, 3), [0.75, 0.875]);
    }

    #[test]
    fn erosion_and_nesting() {
        let g = Grid2::square(-1.0, 1.0, 32).unwrap();
        let omega = Mask::disk(&g, [0.0, 0.0], 0.9);
        let u = Mask::disk(&g, [0.0, 0.0], 0.6);
        let inner = Mask::disk(&g, [0.0, 0.0], 0.3);
        assert!(RegionSpec::new(g, omega.clone(), u.clone(), inner.clone()).is_ok());
        assert!(RegionSpec::new(g, u.clone(), omega.clone(), inner).is_err());
        let e = omega.erode(1);
        assert!(e.is_subset_of(&omega));
        assert!(e.count() < omega.count());
    }
}
