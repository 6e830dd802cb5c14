/// Union-find with per-node integer lifts.
///
/// Each node carries a displacement (in whole box periods) relative to its
/// parent. When a union closes a cycle whose accumulated displacement
/// disagrees with the new edge's displacement, the cluster winds around
/// the torus in the disagreeing axis. With all edge shifts zero this is a
/// plain union-find.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    shift: Vec<[i32; 2]>,
    winds: Vec<[bool; 2]>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            rank: vec![0; len],
            shift: vec![[0, 0]; len],
            winds: vec![[false, false]; len],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Root of `x` and the displacement of `x` relative to that root.
    pub fn find(&mut self, x: usize) -> (usize, [i32; 2]) {
        if self.parent[x] == x {
            return (x, [0, 0]);
        }
        let (root, parent_shift) = self.find(self.parent[x]);
        self.shift[x][0] += parent_shift[0];
        self.shift[x][1] += parent_shift[1];
        self.parent[x] = root;
        (root, self.shift[x])
    }

    /// Join `x` and `y` given that `position(x) - position(y)` includes
    /// `edge_shift` whole box periods. Detects winding when the edge
    /// closes an inconsistent cycle.
    pub fn union(&mut self, x: usize, y: usize, edge_shift: [i32; 2]) {
        let (rx, sx) = self.find(x);
        let (ry, sy) = self.find(y);
        if rx == ry {
            for axis in 0..2 {
                if sx[axis] - sy[axis] != edge_shift[axis] {
                    self.winds[rx][axis] = true;
                }
            }
            return;
        }
        // Lifts satisfy lift(node) = lift(root) + accumulated shift. The
        // edge imposes lift(x) - lift(y) = edge_shift, so attaching ry
        // under rx requires shift(ry) = sx - sy - edge_shift (negated for
        // the opposite attachment).
        let base = [sx[0] - sy[0] - edge_shift[0], sx[1] - sy[1] - edge_shift[1]];
        let (big, small, delta) = if self.rank[rx] >= self.rank[ry] {
            (rx, ry, base)
        } else {
            (ry, rx, [-base[0], -base[1]])
        };
        self.parent[small] = big;
        self.shift[small] = delta;
        for axis in 0..2 {
            self.winds[big][axis] |= self.winds[small][axis];
        }
        if self.rank[big] == self.rank[small] {
            self.rank[big] += 1;
        }
    }

    pub fn winds(&mut self, x: usize) -> [bool; 2] {
        let (root, _) = self.find(x);
        self.winds[root]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_union() {
        let mut uf = UnionFind::new(5);
        uf.union(0, 1, [0, 0]);
        uf.union(3, 4, [0, 0]);
        assert_eq!(uf.find(0).0, uf.find(1).0);
        assert_ne!(uf.find(0).0, uf.find(3).0);
        uf.union(1, 3, [0, 0]);
        assert_eq!(uf.find(0).0, uf.find(4).0);
    }

    #[test]
    fn winding_detected_on_inconsistent_cycle() {
        // A ring of 4 nodes around the torus in x: the closing edge
        // carries a +1 period displacement.
        let mut uf = UnionFind::new(4);
        uf.union(0, 1, [0, 0]);
        uf.union(1, 2, [0, 0]);
        uf.union(2, 3, [0, 0]);
        assert_eq!(uf.winds(0), [false, false]);
        uf.union(3, 0, [1, 0]); // wraps once in x
        assert_eq!(uf.winds(1), [true, false]);
    }

    #[test]
    fn consistent_cycle_does_not_wind() {
        let mut uf = UnionFind::new(3);
        uf.union(0, 1, [0, 0]);
        uf.union(1, 2, [0, 0]);
        uf.union(2, 0, [0, 0]);
        assert_eq!(uf.winds(2), [false, false]);
    }

    #[test]
    fn winding_survives_merges() {
        let mut uf = UnionFind::new(6);
        uf.union(0, 1, [0, 0]);
        uf.union(1, 0, [0, 1]); // tiny cluster winding in y
        uf.union(2, 3, [0, 0]);
        uf.union(3, 4, [0, 0]);
        uf.union(0, 4, [0, 0]); // merge winding cluster into larger one
        assert_eq!(uf.winds(2), [false, true]);
        let _ = uf.len();
    }
}
