use std::collections::HashMap;

use super::Point;

/// Fixed-radius neighbor search over a dynamic point set.
///
/// Points are bucketed into square cells of side `cell_size`; a query of
/// radius `s` scans `ceil(s / cell_size)` rings of cells around the query
/// point and filters by exact distance. Choosing `cell_size` equal to the
/// typical query radius gives the classic one-ring scan.
///
/// Points are addressed by dense ids `0..len()`. Removal uses swap-remove
/// semantics: the last point takes the removed point's id.
#[derive(Clone, Debug)]
pub struct CellIndex {
    cell_size: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Point>,
}

impl CellIndex {
    pub fn new(cell_size: f64) -> Self {
        assert!(cell_size > 0.0 && cell_size.is_finite());
        CellIndex {
            cell_size,
            cells: HashMap::new(),
            points: Vec::new(),
        }
    }

    pub fn build(cell_size: f64, points: &[Point]) -> Self {
        let mut index = CellIndex::new(cell_size);
        for &p in points {
            index.insert(p);
        }
        index
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, id: usize) -> Point {
        self.points[id]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    fn cell_of(&self, p: Point) -> (i64, i64) {
        (
            (p.x / self.cell_size).floor() as i64,
            (p.y / self.cell_size).floor() as i64,
        )
    }

    /// Insert a point, returning its id.
    pub fn insert(&mut self, p: Point) -> usize {
        let id = self.points.len();
        self.points.push(p);
        self.cells.entry(self.cell_of(p)).or_default().push(id);
        id
    }

    /// Remove the point with the given id. The point previously holding the
    /// largest id is renumbered to `id`.
    pub fn remove(&mut self, id: usize) {
        let last = self.points.len() - 1;
        let removed = self.points[id];
        self.detach(id, removed);
        if id != last {
            let moved = self.points[last];
            self.detach(last, moved);
            self.points[id] = moved;
            self.cells.entry(self.cell_of(moved)).or_default().push(id);
        }
        self.points.pop();
    }

    /// Move the point with the given id to a new position.
    pub fn move_point(&mut self, id: usize, to: Point) {
        let from = self.points[id];
        let (old_cell, new_cell) = (self.cell_of(from), self.cell_of(to));
        self.points[id] = to;
        if old_cell != new_cell {
            let bucket = self.cells.get_mut(&old_cell).expect("cell of stored point");
            let pos = bucket
                .iter()
                .position(|&x| x == id)
                .expect("id in its cell");
            bucket.swap_remove(pos);
            self.cells.entry(new_cell).or_default().push(id);
        }
    }

    fn detach(&mut self, id: usize, p: Point) {
        let cell = self.cell_of(p);
        let bucket = self.cells.get_mut(&cell).expect("cell of stored point");
        let pos = bucket
            .iter()
            .position(|&x| x == id)
            .expect("id in its cell");
        bucket.swap_remove(pos);
        if bucket.is_empty() {
            self.cells.remove(&cell);
        }
    }

    /// Visit every stored point within distance `s` of `p` (closed ball).
    /// The callback receives the point id and the squared distance.
    pub fn for_each_within<F: FnMut(usize, f64)>(&self, p: Point, s: f64, mut f: F) {
        debug_assert!(s >= 0.0);
        let rings = (s / self.cell_size).ceil() as i64;
        let (ci, cj) = self.cell_of(p);
        let s2 = s * s;
        for di in -rings..=rings {
            for dj in -rings..=rings {
                if let Some(bucket) = self.cells.get(&(ci + di, cj + dj)) {
                    for &id in bucket {
                        let d2 = self.points[id].dist_sq(p);
                        if d2 <= s2 {
                            f(id, d2);
                        }
                    }
                }
            }
        }
    }

    /// All stored points within distance `s` of `p` (closed ball), in
    /// unspecified order.
    pub fn neighbors_within(&self, p: Point, s: f64) -> Vec<Point> {
        let mut out = Vec::new();
        self.for_each_within(p, s, |id, _| out.push(self.points[id]));
        out
    }

    /// True iff some stored point other than `exclude` lies strictly closer
    /// than `s` to `p`.
    pub fn has_point_closer_than(&self, p: Point, s: f64, exclude: Option<usize>) -> bool {
        let mut found = false;
        let s2 = s * s;
        self.for_each_within(p, s, |id, d2| {
            if Some(id) != exclude && d2 < s2 {
                found = true;
            }
        });
        found
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(points: &[Point], p: Point, s: f64) -> Vec<Point> {
        points.iter().copied().filter(|q| q.dist(p) <= s).collect()
    }

    fn sort_key(points: &mut [Point]) {
        points.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    }

    #[test]
    fn empty_index() {
        let index = CellIndex::new(1.0);
        assert!(index.neighbors_within(Point::new(0.0, 0.0), 5.0).is_empty());
    }

    #[test]
    fn boundary_point_included() {
        // Closed-ball contract: a point at distance exactly s is returned.
        let index = CellIndex::build(1.0, &[Point::new(1.0, 0.0)]);
        let got = index.neighbors_within(Point::new(0.0, 0.0), 1.0);
        assert_eq!(got.len(), 1);
    }

    #[test]
    fn matches_brute_force() {
        let mut state = 1u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for case in 0..1000 {
            let n = case % 40;
            let points: Vec<Point> = (0..n)
                .map(|_| Point::new(next() * 10.0 - 5.0, next() * 10.0 - 5.0))
                .collect();
            let cell = 0.2 + next() * 2.0;
            let index = CellIndex::build(cell, &points);
            let p = Point::new(next() * 12.0 - 6.0, next() * 12.0 - 6.0);
            let s = next() * 4.0;
            let mut got = index.neighbors_within(p, s);
            let mut want = brute_force(&points, p, s);
            sort_key(&mut got);
            sort_key(&mut want);
            assert_eq!(got, want, "case {case}");
        }
    }

    #[test]
    fn remove_renumbers_last() {
        let mut index = CellIndex::build(
            1.0,
            &[
                Point::new(0.0, 0.0),
                Point::new(3.0, 0.0),
                Point::new(0.0, 3.0),
            ],
        );
        index.remove(0);
        assert_eq!(index.len(), 2);
        // Former id 2 now answers as id 0.
        assert_eq!(index.point(0), Point::new(0.0, 3.0));
        let got = index.neighbors_within(Point::new(0.0, 3.0), 0.1);
        assert_eq!(got.len(), 1);
    }

    #[test]
    fn move_point_rebuckets() {
        let mut index = CellIndex::build(1.0, &[Point::new(0.1, 0.1)]);
        index.move_point(0, Point::new(7.3, -2.2));
        assert!(index.neighbors_within(Point::new(0.1, 0.1), 0.5).is_empty());
        assert_eq!(index.neighbors_within(Point::new(7.3, -2.2), 0.5).len(), 1);
    }
}
