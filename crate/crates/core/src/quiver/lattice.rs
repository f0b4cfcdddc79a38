use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Which pairs `[n, n′]` of neighbours of a site enter the `J` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NnnRule {
    /// Ordered pairs of distinct nearest neighbours at distance `√2` from
    /// each other (minimum image on periodic lattices).
    #[default]
    Diagonal,
    /// All ordered pairs of distinct nearest neighbours, including opposite
    /// ones at distance 2.
    AllDistinct,
}

/// `lx × ly` square lattice; site `(x, y)` has index `y·lx + x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    lx: usize,
    ly: usize,
    boundary: Boundary,
    neighbors: Vec<Vec<usize>>,
}

impl Lattice {
    /// Periodic directions need at least 3 sites so that the four
    /// neighbours of a site are distinct and differ from it.
    pub fn new(lx: usize, ly: usize, boundary: Boundary) -> Result<Self> {
        if lx == 0 || ly == 0 {
            return Err(Error::InvalidParameter(format!("lattice {lx}×{ly} is empty")));
        }
        if boundary == Boundary::Periodic && (lx < 3 || ly < 3) {
            return Err(Error::InvalidParameter(format!(
                "periodic lattice {lx}×{ly}: both sides must be at least 3"
            )));
        }
        let mut lattice = Self {
            lx,
            ly,
            boundary,
            neighbors: Vec::new(),
        };
        lattice.neighbors = (0..lx * ly).map(|s| lattice.compute_neighbors(s)).collect();
        Ok(lattice)
    }

    pub fn open(lx: usize, ly: usize) -> Result<Self> {
        Self::new(lx, ly, Boundary::Open)
    }

    pub fn lx(&self) -> usize {
        self.lx
    }

    pub fn ly(&self) -> usize {
        self.ly
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn n_sites(&self) -> usize {
        self.lx * self.ly
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.lx, site / self.lx)
    }

    pub fn site(&self, x: usize, y: usize) -> usize {
        y * self.lx + x
    }

    fn shifted(&self, x: usize, y: usize, dx: isize, dy: isize) -> Option<usize> {
        let step = |v: usize, d: isize, len: usize| -> Option<usize> {
            let moved = v as isize + d;
            match self.boundary {
                Boundary::Periodic => Some(moved.rem_euclid(len as isize) as usize),
                Boundary::Open => (0..len as isize).contains(&moved).then_some(moved as usize),
            }
        };
        Some(self.site(step(x, dx, self.lx)?, step(y, dy, self.ly)?))
    }

    fn compute_neighbors(&self, site: usize) -> Vec<usize> {
        let (x, y) = self.coords(site);
        let mut out: Vec<usize> = [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .iter()
            .filter_map(|&(dx, dy)| self.shifted(x, y, dx, dy))
            .filter(|&n| n != site)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.neighbors[site]
    }

    pub fn are_neighbors(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    /// Nearest-neighbour bonds in both directions.
    pub fn ordered_bonds(&self) -> Vec<(usize, usize)> {
        (0..self.n_sites())
            .flat_map(|a| self.neighbors[a].iter().map(move |&b| (a, b)))
            .collect()
    }

    /// Each nearest-neighbour bond once, as `(a, b)` with `a < b`.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        self.ordered_bonds().into_iter().filter(|(a, b)| a < b).collect()
    }

    /// Squared minimum-image distance.
    pub fn distance_sq(&self, a: usize, b: usize) -> usize {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        let wrap = |d: usize, len: usize| match self.boundary {
            Boundary::Open => d,
            Boundary::Periodic => d.min(len - d),
        };
        let dx = wrap(ax.abs_diff(bx), self.lx);
        let dy = wrap(ay.abs_diff(by), self.ly);
        dx * dx + dy * dy
    }

    /// Ordered pairs `[n, n′]` of neighbours of `site` selected by `rule`.
    pub fn nnn_pairs(&self, site: usize, rule: NnnRule) -> Vec<(usize, usize)> {
        let nb = &self.neighbors[site];
        let mut out = Vec::new();
        for &n in nb {
            for &m in nb {
                if n == m {
                    continue;
                }
                if rule == NnnRule::AllDistinct || self.distance_sq(n, m) == 2 {
                    out.push((n, m));
                }
            }
        }
        out
    }

    /// Image of `site` under a 90° rotation (square lattices only).
    pub fn rotate(&self, site: usize) -> Option<usize> {
        if self.lx != self.ly {
            return None;
        }
        let (x, y) = self.coords(site);
        Some(self.site(y, self.lx - 1 - x))
    }

    /// Image of `site` under translation by `(dx, dy)` (periodic only).
    pub fn translate(&self, site: usize, dx: usize, dy: usize) -> Option<usize> {
        if self.boundary != Boundary::Periodic {
            return None;
        }
        let (x, y) = self.coords(site);
        Some(self.site((x + dx) % self.lx, (y + dy) % self.ly))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighbour_counts() {
        let open = Lattice::open(3, 3).unwrap();
        assert_eq!(open.neighbors(4).len(), 4);
        assert_eq!(open.neighbors(0), &[1, 3]);
        assert_eq!(open.bonds().len(), 12);
        let periodic = Lattice::new(4, 3, Boundary::Periodic).unwrap();
        assert!((0..12).all(|s| periodic.neighbors(s).len() == 4));
        assert!(Lattice::new(2, 3, Boundary::Periodic).is_err());
    }

    #[test]
    fn diagonal_pairs() {
        let l = Lattice::open(3, 3).unwrap();
        // Centre: 4 neighbours, each with 2 diagonal partners.
        assert_eq!(l.nnn_pairs(4, NnnRule::Diagonal).len(), 8);
        assert_eq!(l.nnn_pairs(4, NnnRule::AllDistinct).len(), 12);
        assert_eq!(l.nnn_pairs(0, NnnRule::Diagonal), vec![(1, 3), (3, 1)]);
        let chain = Lattice::open(3, 1).unwrap();
        assert!(chain.nnn_pairs(1, NnnRule::Diagonal).is_empty());
        assert_eq!(chain.nnn_pairs(1, NnnRule::AllDistinct).len(), 2);
    }

    #[test]
    fn bond_lists_are_symmetric() {
        for l in [
            Lattice::open(4, 3).unwrap(),
            Lattice::new(3, 4, Boundary::Periodic).unwrap(),
        ] {
            let bonds = l.ordered_bonds();
            assert!(bonds.iter().all(|&(a, b)| bonds.contains(&(b, a))));
        }
    }
}
