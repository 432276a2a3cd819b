//! Uniform-grid connectivity, used as an independent cross-check of the
//! exact compressed-grid search.

use super::{point_in_rect, positive, AxisRect, GeometryError, Point, Strip};

/// Largest grid the raster oracle will build unless told otherwise.
pub const DEFAULT_MAX_GRID_CELLS: u64 = 100_000_000;

struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Maximal horizontal run of free cells `[start, end)` in one row.
#[derive(Debug, Clone, Copy)]
struct Run {
    start: usize,
    end: usize,
    id: usize,
}

/// Raster reachability with the default cell cap.
pub fn grid_flood_fill_connected(
    strip: &Strip,
    obstacles: &[AxisRect],
    src: Point,
    dst: Point,
    resolution: f64,
) -> Result<bool, GeometryError> {
    grid_flood_fill_connected_capped(strip, obstacles, src, dst, resolution, DEFAULT_MAX_GRID_CELLS)
}

/// Covers the strip with square-ish cells of side at most `resolution`, marks a
/// cell blocked iff its center lies in a closed obstacle, and reports whether
/// some closed cell holding `src` and some holding `dst` share a 4-connected
/// free component. An endpoint inside a closed obstacle is disconnected, as
/// in the exact search.
///
/// The fill works on free runs per row: runs in neighbouring rows that share
/// a column are merged.
pub fn grid_flood_fill_connected_capped(
    strip: &Strip,
    obstacles: &[AxisRect],
    src: Point,
    dst: Point,
    resolution: f64,
    max_cells: u64,
) -> Result<bool, GeometryError> {
    let resolution = positive("resolution", resolution)?;
    let nx = (strip.d / resolution).ceil().max(1.0) as u64;
    let ny = if strip.kappa > 0.0 { (strip.kappa / resolution).ceil().max(1.0) as u64 } else { 1 };
    let cells = nx as u128 * ny as u128;
    if cells > max_cells as u128 {
        return Err(GeometryError::GridTooLarge { cells, cap: max_cells });
    }
    // an indoor endpoint is disconnected whatever the cells say
    if obstacles.iter().any(|r| point_in_rect(src, r) || point_in_rect(dst, r)) {
        return Ok(false);
    }
    let (nx, ny) = (nx as usize, ny as usize);
    let hx = strip.d / nx as f64;
    let hy = strip.kappa / ny as f64;
    let half = strip.half_kappa();
    let row_center = |j: usize| if strip.kappa > 0.0 { -half + (j as f64 + 0.5) * hy } else { 0.0 };

    // Free runs of every row.
    let mut rows: Vec<Vec<Run>> = Vec::with_capacity(ny);
    let mut next_id = 0;
    let mut spans: Vec<(usize, usize)> = Vec::new();
    for j in 0..ny {
        let yc = row_center(j);
        spans.clear();
        for r in obstacles {
            if (yc - r.cy).abs() > r.half_l {
                continue;
            }
            // columns whose center (i + 1/2) hx lies in [left, right]
            let lo = (r.left() / hx - 0.5).ceil().max(0.0);
            let hi = (r.right() / hx - 0.5).floor();
            if hi < 0.0 || lo > (nx - 1) as f64 || lo > hi {
                continue;
            }
            spans.push((lo as usize, (hi as usize).min(nx - 1) + 1));
        }
        spans.sort_unstable();
        let mut runs = Vec::new();
        let mut cursor = 0;
        for &(a, b) in &spans {
            if a > cursor {
                runs.push(Run { start: cursor, end: a, id: next_id });
                next_id += 1;
            }
            cursor = cursor.max(b);
        }
        if cursor < nx {
            runs.push(Run { start: cursor, end: nx, id: next_id });
            next_id += 1;
        }
        rows.push(runs);
    }

    let mut sets = DisjointSet::new(next_id);
    for pair in rows.windows(2) {
        let (below, above) = (&pair[0], &pair[1]);
        let (mut a, mut b) = (0, 0);
        while a < below.len() && b < above.len() {
            let (ra, rb) = (below[a], above[b]);
            if ra.start < rb.end && rb.start < ra.end {
                sets.union(ra.id, rb.id);
            }
            if ra.end <= rb.end {
                a += 1;
            } else {
                b += 1;
            }
        }
    }

    // Every closed cell holding the point; a point on a grid line lies in several.
    let near = |v: f64, step: f64, count: usize, origin: f64| {
        let k = ((v - origin) / step).floor() as i64;
        (k - 1..=k + 1)
            .filter(|&i| i >= 0 && (i as usize) < count)
            .map(|i| i as usize)
            .filter(|&i| origin + i as f64 * step <= v && v <= origin + (i + 1) as f64 * step)
            .collect::<Vec<_>>()
    };
    let roots_at = |p: Point, sets: &mut DisjointSet| {
        let cols = near(p.x, hx, nx, 0.0);
        let rows_hit = if strip.kappa > 0.0 { near(p.y, hy, ny, -half) } else { vec![0] };
        let mut roots = Vec::new();
        for &j in &rows_hit {
            for &i in &cols {
                if let Some(r) = rows[j].iter().find(|r| r.start <= i && i < r.end) {
                    roots.push(sets.find(r.id));
                }
            }
        }
        roots
    };
    let from = roots_at(src, &mut sets);
    let to = roots_at(dst, &mut sets);
    Ok(from.iter().any(|a| to.contains(a)))
}
