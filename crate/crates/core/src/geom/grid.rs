use alloc::vec::Vec;

/// Uniform bucket grid over a fixed set of points.
///
/// Points are sorted into cells by counting sort; a fixed-radius query visits
/// only the cells overlapping the query box. Item ids are the positions of the
/// points in the input slice.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    dim: usize,
    cell: f64,
    origin: Vec<f64>,
    shape: Vec<usize>,
    start: Vec<u32>,
    items: Vec<u32>,
}

/// Upper bound on cells per stored point before the cell width is widened.
const MAX_CELLS_PER_POINT: usize = 4;

impl SpatialGrid {
    /// Builds the grid from flat coordinates (`dim` values per point).
    /// `cell` is a lower bound on the cell width; it is widened when the
    /// bounding box would otherwise need far more cells than points.
    pub fn new(dim: usize, coords: &[f64], cell: f64) -> Self {
        assert!(dim > 0 && dim <= 8, "grid supports 1 to 8 dimensions");
        assert!(cell > 0.0 && cell.is_finite());
        let n = coords.len() / dim;
        let mut lo = alloc::vec![0.0; dim];
        let mut hi = alloc::vec![0.0; dim];
        if n > 0 {
            lo.copy_from_slice(&coords[..dim]);
            hi.copy_from_slice(&coords[..dim]);
            for p in coords.chunks_exact(dim) {
                for k in 0..dim {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
        }
        let budget = (MAX_CELLS_PER_POINT * n).max(1024);
        let mut cell = cell;
        let mut shape;
        loop {
            shape = lo
                .iter()
                .zip(&hi)
                .map(|(l, h)| (libm::floor((h - l) / cell) as usize) + 1)
                .collect::<Vec<_>>();
            let total = shape
                .iter()
                .try_fold(1usize, |acc, &s| acc.checked_mul(s))
                .unwrap_or(usize::MAX);
            if total <= budget {
                break;
            }
            cell *= 2.0;
        }
        let total: usize = shape.iter().product();
        let mut grid = Self {
            dim,
            cell,
            origin: lo,
            shape,
            start: alloc::vec![0; total + 1],
            items: alloc::vec![0; n],
        };
        let cells: Vec<usize> = coords.chunks_exact(dim).map(|p| grid.cell_of(p)).collect();
        for &c in &cells {
            grid.start[c + 1] += 1;
        }
        for c in 0..total {
            grid.start[c + 1] += grid.start[c];
        }
        let mut fill = grid.start.clone();
        for (i, &c) in cells.iter().enumerate() {
            grid.items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        grid
    }

    pub fn cell_width(&self) -> f64 {
        self.cell
    }

    fn coord_cell(&self, k: usize, v: f64) -> isize {
        libm::floor((v - self.origin[k]) / self.cell) as isize
    }

    fn cell_of(&self, p: &[f64]) -> usize {
        let mut idx = 0;
        for k in 0..self.dim {
            let c = self
                .coord_cell(k, p[k])
                .clamp(0, self.shape[k] as isize - 1) as usize;
            idx = idx * self.shape[k] + c;
        }
        idx
    }

    /// Calls `f` with every stored item whose cell overlaps the box
    /// `[x - reach, x + reach]`. Candidates must still be distance-checked.
    pub fn for_each_candidate<F: FnMut(usize)>(&self, x: &[f64], reach: f64, mut f: F) {
        if self.items.is_empty() {
            return;
        }
        let mut lo = [0usize; 8];
        let mut hi = [0usize; 8];
        let mut cur = [0usize; 8];
        // slack against rounding in x +- reach at cell boundaries
        let reach = reach * (1.0 + 1e-12) + 1e-12;
        for k in 0..self.dim {
            let a = self.coord_cell(k, x[k] - reach);
            let b = self.coord_cell(k, x[k] + reach);
            let top = self.shape[k] as isize - 1;
            if b < 0 || a > top {
                return;
            }
            lo[k] = a.max(0) as usize;
            hi[k] = b.min(top) as usize;
            cur[k] = lo[k];
        }
        loop {
            let mut idx = 0;
            for k in 0..self.dim {
                idx = idx * self.shape[k] + cur[k];
            }
            let (s, e) = (self.start[idx] as usize, self.start[idx + 1] as usize);
            for &it in &self.items[s..e] {
                f(it as usize);
            }
            // odometer over the cell box, last coordinate fastest
            let mut k = self.dim;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    break;
                }
                cur[k] = lo[k];
            }
        }
    }
}
