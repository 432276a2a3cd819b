use std::collections::VecDeque;

use super::{
    horizontal_segment_intersects_rect, point_in_rect, AxisRect, ConnectivityOutcome, GeometryError, Point, Strip,
};

/// Non-uniform cell grid over the strip whose lines include every obstacle
/// edge that falls inside the strip.
///
/// No obstacle edge crosses the interior of a cell, so each obstacle either
/// covers a cell completely or misses its interior entirely. Testing the
/// cell center against the closed obstacle therefore decides the whole cell.
#[derive(Debug, Clone)]
pub struct CompressedGrid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    blocked: Vec<bool>,
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn centers(coords: &[f64]) -> Vec<f64> {
    coords.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

impl CompressedGrid {
    /// Builds the grid for a strip with positive width. `anchors` are extra
    /// points whose coordinates must appear as grid lines.
    pub fn build(strip: &Strip, obstacles: &[AxisRect], anchors: &[Point]) -> Self {
        let half = strip.half_kappa();
        debug_assert!(half > 0.0);
        let relevant: Vec<&AxisRect> = obstacles.iter().filter(|r| strip.touches(r)).collect();

        let mut xs = vec![0.0, strip.d];
        let mut ys = vec![-half, half];
        for p in anchors {
            xs.push(p.x);
            ys.push(p.y);
        }
        for r in &relevant {
            xs.push(r.left().clamp(0.0, strip.d));
            xs.push(r.right().clamp(0.0, strip.d));
            ys.push(r.bottom().clamp(-half, half));
            ys.push(r.top().clamp(-half, half));
        }
        let xs = sorted_unique(xs);
        let ys = sorted_unique(ys);

        let cx = centers(&xs);
        let cy = centers(&ys);
        let nx = cx.len();
        let mut blocked = vec![false; nx * cy.len()];
        for r in relevant {
            // Exactly the cells whose center lies in the closed rectangle.
            let i0 = cx.partition_point(|&c| c < r.left());
            let i1 = cx.partition_point(|&c| c <= r.right());
            let j0 = cy.partition_point(|&c| c < r.bottom());
            let j1 = cy.partition_point(|&c| c <= r.top());
            for j in j0..j1 {
                blocked[j * nx + i0..j * nx + i1].fill(true);
            }
        }
        Self { xs, ys, blocked }
    }

    pub fn x_lines(&self) -> &[f64] {
        &self.xs
    }

    pub fn y_lines(&self) -> &[f64] {
        &self.ys
    }

    pub fn columns(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn rows(&self) -> usize {
        self.ys.len() - 1
    }

    pub fn is_blocked(&self, col: usize, row: usize) -> bool {
        self.blocked[row * self.columns() + col]
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point {
        Point::new(0.5 * (self.xs[col] + self.xs[col + 1]), 0.5 * (self.ys[row] + self.ys[row + 1]))
    }

    /// Cell bounds as `(x_lo, x_hi, y_lo, y_hi)`.
    pub fn cell_bounds(&self, col: usize, row: usize) -> (f64, f64, f64, f64) {
        (self.xs[col], self.xs[col + 1], self.ys[row], self.ys[row + 1])
    }

    /// Cells whose closure contains `p`. `p` must lie on grid lines in both axes
    /// or strictly inside a cell.
    fn cells_touching(&self, p: Point) -> Vec<usize> {
        let cols = touching_intervals(&self.xs, p.x);
        let rows = touching_intervals(&self.ys, p.y);
        let nx = self.columns();
        rows.iter().flat_map(|&j| cols.iter().map(move |&i| j * nx + i)).collect()
    }

    /// Breadth-first search over face-adjacent free cells. Returns the cell
    /// sequence from a cell touching `src` to one touching `dst`.
    fn search(&self, src: Point, dst: Point) -> Option<Vec<usize>> {
        let nx = self.columns();
        let ny = self.rows();
        let mut is_target = vec![false; self.blocked.len()];
        for c in self.cells_touching(dst) {
            is_target[c] = !self.blocked[c];
        }

        let mut parent = vec![usize::MAX; self.blocked.len()];
        let mut queue = VecDeque::new();
        for c in self.cells_touching(src) {
            if !self.blocked[c] && parent[c] == usize::MAX {
                parent[c] = c;
                queue.push_back(c);
            }
        }

        while let Some(c) = queue.pop_front() {
            if is_target[c] {
                let mut chain = vec![c];
                let mut at = c;
                while parent[at] != at {
                    at = parent[at];
                    chain.push(at);
                }
                chain.reverse();
                return Some(chain);
            }
            let (i, j) = (c % nx, c / nx);
            let mut visit = |n: usize| {
                if !self.blocked[n] && parent[n] == usize::MAX {
                    parent[n] = c;
                    queue.push_back(n);
                }
            };
            if i > 0 {
                visit(c - 1);
            }
            if i + 1 < nx {
                visit(c + 1);
            }
            if j > 0 {
                visit(c - nx);
            }
            if j + 1 < ny {
                visit(c + nx);
            }
        }
        None
    }
}

/// Indices of the intervals `[v[k], v[k+1]]` that contain `x`.
fn touching_intervals(lines: &[f64], x: f64) -> Vec<usize> {
    let n = lines.len() - 1;
    let k = lines.partition_point(|&v| v < x);
    if k < lines.len() && lines[k] == x {
        let mut out = Vec::with_capacity(2);
        if k > 0 {
            out.push(k - 1);
        }
        if k < n {
            out.push(k);
        }
        out
    } else {
        vec![k - 1]
    }
}

fn check_endpoint(strip: &Strip, role: &'static str, p: Point) -> Result<(), GeometryError> {
    if !p.x.is_finite() || !p.y.is_finite() {
        return Err(GeometryError::NotFinite { name: role });
    }
    if !strip.contains(p) {
        return Err(GeometryError::OutsideStrip { role, x: p.x, y: p.y });
    }
    Ok(())
}

/// Exact decision of whether `src` and `dst` are joined by a path inside the
/// closed strip that avoids every obstacle interior.
///
/// An endpoint lying in a closed obstacle is treated as indoor and the pair
/// is disconnected. A zero-width strip reduces to the closed segment test.
pub fn free_space_connected(
    strip: &Strip,
    obstacles: &[AxisRect],
    src: Point,
    dst: Point,
) -> Result<ConnectivityOutcome, GeometryError> {
    check_endpoint(strip, "source", src)?;
    check_endpoint(strip, "destination", dst)?;

    if strip.kappa == 0.0 {
        let (x0, x1) = if src.x <= dst.x { (src.x, dst.x) } else { (dst.x, src.x) };
        let blocked = obstacles.iter().any(|r| horizontal_segment_intersects_rect(x0, x1, r));
        return Ok(if blocked { ConnectivityOutcome::blocked() } else { ConnectivityOutcome::through(vec![src, dst]) });
    }

    if obstacles.iter().any(|r| point_in_rect(src, r) || point_in_rect(dst, r)) {
        return Ok(ConnectivityOutcome::blocked());
    }

    let grid = CompressedGrid::build(strip, obstacles, &[src, dst]);
    Ok(match grid.search(src, dst) {
        Some(cells) => {
            let nx = grid.columns();
            let mut path = Vec::with_capacity(cells.len() + 2);
            path.push(src);
            path.extend(cells.iter().map(|&c| grid.cell_center(c % nx, c / nx)));
            path.push(dst);
            ConnectivityOutcome::through(path)
        }
        None => ConnectivityOutcome::blocked(),
    })
}
