use crate::weight::OpCounter;

/// Disjoint sets with union by rank and path compression.
#[derive(Debug, Clone, Default)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Adds a singleton set and returns its element.
    pub fn make_set(&mut self) -> usize {
        let q = self.parent.len();
        self.parent.push(q);
        self.rank.push(0);
        q
    }

    pub fn find(&mut self, q: usize) -> usize {
        self.find_counted(q, &mut OpCounter::default())
    }

    /// `find`, charging one step per visited link to `ops`.
    pub fn find_counted(&mut self, q: usize, ops: &mut OpCounter) -> usize {
        let mut root = q;
        while self.parent[root] != root {
            ops.tick();
            root = self.parent[root];
        }
        let mut x = q;
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Links two canonical elements and returns the new canonical element.
    pub fn union(&mut self, cx: usize, cy: usize) -> usize {
        debug_assert!(self.parent[cx] == cx && self.parent[cy] == cy);
        if cx == cy {
            return cx;
        }
        match self.rank[cx].cmp(&self.rank[cy]) {
            std::cmp::Ordering::Less => {
                self.parent[cx] = cy;
                cy
            }
            std::cmp::Ordering::Greater => {
                self.parent[cy] = cx;
                cx
            }
            std::cmp::Ordering::Equal => {
                self.parent[cy] = cx;
                self.rank[cx] += 1;
                cx
            }
        }
    }
}
