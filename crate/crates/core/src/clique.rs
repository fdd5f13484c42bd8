//! Exact dispersion over an explicit point set by triangle search on tuple graphs.
//!
//! The s points are split into three groups of sizes ⌈s/3⌉, ⌈(s-1)/3⌉, ⌈(s-2)/3⌉. A vertex of
//! part i is a tuple of that many point indices; a triangle picks one tuple per part, i.e. all
//! s points, and every pairwise constraint between points is checked either inside a tuple
//! (vertex filter) or across two tuples (edge filter).

use itertools::Itertools;
use rayon::prelude::*;

use crate::cnf::{dispersion_measures, Assignment, Optimum, SolutionCollection};
use crate::error::{usage, Error, Result};

/// Largest part size accepted before refusing to build the quadratic adjacency blocks.
pub const MAX_PART_SIZE: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let stride = cols.div_ceil(64).max(1);
        let mut data = vec![0u64; rows * stride];
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    data[i * stride + j / 64] |= 1 << (j % 64);
                }
            }
        }
        BitMatrix {
            rows,
            cols,
            stride,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.row(i)[j / 64] >> (j % 64)) & 1 == 1
    }
}

fn ones(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(w, &word)| {
        let mut word = word;
        std::iter::from_fn(move || {
            if word == 0 {
                return None;
            }
            let b = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(w * 64 + b)
        })
    })
}

/// Tripartite graph: blocks between parts (1,2), (2,3) and (1,3).
#[derive(Clone, Debug)]
pub struct TupleGraph {
    pub parts: [Vec<Vec<usize>>; 3],
    pub ab: BitMatrix,
    pub bc: BitMatrix,
    pub ac: BitMatrix,
}

impl TupleGraph {
    pub fn new(parts: [Vec<Vec<usize>>; 3], ab: BitMatrix, bc: BitMatrix, ac: BitMatrix) -> Self {
        assert_eq!((ab.rows, ab.cols), (parts[0].len(), parts[1].len()));
        assert_eq!((bc.rows, bc.cols), (parts[1].len(), parts[2].len()));
        assert_eq!((ac.rows, ac.cols), (parts[0].len(), parts[2].len()));
        TupleGraph { parts, ab, bc, ac }
    }

    /// Ordinary graph viewed as three copies of its vertex set; triangles coincide.
    pub fn from_adjacency(adj: &[Vec<bool>]) -> Self {
        let n = adj.len();
        let part: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
        let m = BitMatrix::from_fn(n, n, |i, j| i != j && adj[i][j]);
        TupleGraph::new([part.clone(), part.clone(), part], m.clone(), m.clone(), m)
    }
}

/// First triangle (a, b, c) in order of a, then c, then b; found with a bitset boolean product.
pub fn triangle_detect(g: &TupleGraph) -> Option<(usize, usize, usize)> {
    (0..g.ab.rows).into_par_iter().find_map_first(|a| {
        let mut reach = vec![0u64; g.bc.stride];
        for b in ones(g.ab.row(a)) {
            for (r, x) in reach.iter_mut().zip(g.bc.row(b)) {
                *r |= x;
            }
        }
        let c = reach
            .iter()
            .zip(g.ac.row(a))
            .enumerate()
            .find(|(_, (r, x))| *r & *x != 0)
            .map(|(w, (r, x))| w * 64 + (r & x).trailing_zeros() as usize)?;
        let b = ones(g.ab.row(a)).find(|&b| g.bc.get(b, c))?;
        Some((a, b, c))
    })
}

fn group_sizes(s: usize) -> [usize; 3] {
    [s.div_ceil(3), (s - 1).div_ceil(3), (s - 2).div_ceil(3)]
}

struct Points {
    n: usize,
    pts: Vec<Assignment>,
    dist: Vec<u32>,
}

impl Points {
    fn new(x: &SolutionCollection) -> Result<Self> {
        let pts = x.members().to_vec();
        let n = x.dim().unwrap_or(0);
        let p = pts.len();
        let mut dist = vec![0u32; p * p];
        for i in 0..p {
            for j in 0..p {
                dist[i * p + j] = pts[i].distance(&pts[j]) as u32;
            }
        }
        Ok(Points { n, pts, dist })
    }

    fn d(&self, i: usize, j: usize) -> u32 {
        self.dist[i * self.pts.len() + j]
    }

    fn tuples(&self, size: usize, multiset: bool) -> Result<Vec<Vec<usize>>> {
        let p = self.pts.len();
        let t: Vec<Vec<usize>> = if multiset {
            (0..p).combinations_with_replacement(size).collect()
        } else {
            (0..p).combinations(size).collect()
        };
        if t.len() > MAX_PART_SIZE {
            return Err(Error::Capability(format!(
                "{} tuples per part exceed the limit {MAX_PART_SIZE}",
                t.len()
            )));
        }
        Ok(t)
    }

    fn intra_min(&self, t: &[usize]) -> u32 {
        t.iter()
            .tuple_combinations()
            .map(|(&a, &b)| self.d(a, b))
            .min()
            .unwrap_or(u32::MAX)
    }

    fn intra_sum(&self, t: &[usize]) -> u32 {
        t.iter().tuple_combinations().map(|(&a, &b)| self.d(a, b)).sum()
    }

    fn cross_min(&self, s: &[usize], t: &[usize]) -> u32 {
        s.iter()
            .flat_map(|&a| t.iter().map(move |&b| (a, b)))
            .map(|(a, b)| if a == b { 0 } else { self.d(a, b) })
            .min()
            .unwrap_or(u32::MAX)
    }

    fn cross_sum(&self, s: &[usize], t: &[usize]) -> u32 {
        s.iter()
            .flat_map(|&a| t.iter().map(move |&b| self.d(a, b)))
            .sum()
    }

    fn witness(&self, tuples: [&[usize]; 3], distinct: bool) -> Result<SolutionCollection> {
        let mut members: Vec<Assignment> = tuples
            .iter()
            .flat_map(|t| t.iter().map(|&i| self.pts[i].clone()))
            .collect();
        members.sort();
        SolutionCollection::from_members(members, distinct)
    }
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| !b.contains(x))
}

fn check_input(x: &SolutionCollection, s: usize) -> Result<()> {
    if s < 3 {
        return usage("tuple-graph dispersion needs s >= 3");
    }
    let mut sorted = x.members().to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return usage("point set contains duplicates");
    }
    Ok(())
}

/// Exact max-min dispersion of s distinct points of `x`.
pub fn opt_min_clique(x: &SolutionCollection, s: usize) -> Result<Optimum> {
    check_input(x, s)?;
    if x.len() < s {
        return Err(Error::Infeasible(format!("{} points, {s} requested", x.len())));
    }
    let pts = Points::new(x)?;
    let sizes = group_sizes(s);
    let parts: Vec<Vec<(Vec<usize>, u32)>> = sizes
        .iter()
        .map(|&g| {
            Ok(pts
                .tuples(g, false)?
                .into_iter()
                .map(|t| {
                    let m = pts.intra_min(&t);
                    (t, m)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let feasible = |d: u32| -> Option<[Vec<usize>; 3]> {
        let keep: Vec<Vec<&Vec<usize>>> = parts
            .iter()
            .map(|p| p.iter().filter(|(_, m)| *m >= d).map(|(t, _)| t).collect())
            .collect();
        let block = |i: usize, j: usize| {
            BitMatrix::from_fn(keep[i].len(), keep[j].len(), |a, b| {
                let (ta, tb) = (keep[i][a], keep[j][b]);
                disjoint(ta, tb) && pts.cross_min(ta, tb) >= d
            })
        };
        let g = TupleGraph::new(
            [
                keep[0].iter().map(|t| (*t).clone()).collect(),
                keep[1].iter().map(|t| (*t).clone()).collect(),
                keep[2].iter().map(|t| (*t).clone()).collect(),
            ],
            block(0, 1),
            block(1, 2),
            block(0, 2),
        );
        let (a, b, c) = triangle_detect(&g)?;
        let [p0, p1, p2] = g.parts;
        Some([p0[a].clone(), p1[b].clone(), p2[c].clone()])
    };

    let mut lo = 0u32;
    let mut hi = pts.n as u32 + 1;
    let mut best = feasible(0).expect("any s distinct points are feasible at d = 0");
    let (mut max_yes, mut min_no) = (0u32, u32::MAX);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match feasible(mid) {
            Some(w) => {
                lo = mid;
                best = w;
                max_yes = max_yes.max(mid);
            }
            None => {
                hi = mid;
                min_no = min_no.min(mid);
            }
        }
        assert!(max_yes < min_no, "feasibility must be monotone in d");
    }
    let witness = pts.witness([&best[0], &best[1], &best[2]], true)?;
    let value = dispersion_measures(&witness, None)?.min_pd;
    assert!(value >= lo as u64, "triangle witness violates its threshold");
    Ok(Optimum { value, witness })
}

/// Exact max-sum dispersion of s points of `x`; repeated points allowed unless `distinct`.
///
/// The six thresholds (three tuple weights, three cross sums) are folded into three edge
/// weights: E12 = w1 + w2 + c12, E13 = w3 + c13, E23 = c23. Each threshold ranges over the values
/// realized by admissible pairs, and for fixed E12 the largest feasible E23 is non-increasing in
/// E13, so a staircase walk visits every maximal threshold vector.
pub fn opt_sum_clique(x: &SolutionCollection, s: usize, distinct: bool) -> Result<Optimum> {
    check_input(x, s)?;
    if x.is_empty() || (distinct && x.len() < s) {
        return Err(Error::Infeasible(format!("{} points, {s} requested", x.len())));
    }
    let pts = Points::new(x)?;
    let sizes = group_sizes(s);
    let parts: Vec<Vec<Vec<usize>>> = sizes
        .iter()
        .map(|&g| pts.tuples(g, !distinct))
        .collect::<Result<_>>()?;
    let w: Vec<Vec<u32>> = parts
        .iter()
        .map(|p| p.iter().map(|t| pts.intra_sum(t)).collect())
        .collect();

    // Edge weights, None where the pair shares a point in distinct mode.
    let weights = |i: usize, j: usize, add: &dyn Fn(usize, usize) -> u32| -> Vec<Option<u32>> {
        let mut out = Vec::with_capacity(parts[i].len() * parts[j].len());
        for (a, ta) in parts[i].iter().enumerate() {
            for (b, tb) in parts[j].iter().enumerate() {
                out.push(
                    (!distinct || disjoint(ta, tb)).then(|| pts.cross_sum(ta, tb) + add(a, b)),
                );
            }
        }
        out
    };
    let e12 = weights(0, 1, &|a, b| w[0][a] + w[1][b]);
    let e13 = weights(0, 2, &|_, c| w[2][c]);
    let e23 = weights(1, 2, &|_, _| 0);
    let levels = |e: &[Option<u32>]| -> Vec<u32> {
        let mut v: Vec<u32> = e.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (v12, v13, v23) = (levels(&e12), levels(&e13), levels(&e23));
    let infeasible = || Error::Infeasible(format!("no admissible {s}-tuple among {} points", x.len()));
    if v12.is_empty() || v13.is_empty() || v23.is_empty() {
        return Err(infeasible());
    }
    let (l0, l1, l2) = (parts[0].len(), parts[1].len(), parts[2].len());
    let block = |e: &[Option<u32>], rows: usize, cols: usize, t: u32| {
        BitMatrix::from_fn(rows, cols, |a, b| e[a * cols + b].is_some_and(|v| v >= t))
    };
    let graph = |t12: u32, t13: u32, t23: u32| {
        TupleGraph::new(
            [parts[0].clone(), parts[1].clone(), parts[2].clone()],
            block(&e12, l0, l1, t12),
            block(&e23, l1, l2, t23),
            block(&e13, l0, l2, t13),
        )
    };
    // Light-weight feasibility check that avoids cloning the tuple lists.
    let feasible = |ab: &BitMatrix, t13: u32, t23: u32| -> bool {
        let bc = block(&e23, l1, l2, t23);
        let ac = block(&e13, l0, l2, t13);
        let g = TupleGraph {
            parts: [Vec::new(), Vec::new(), Vec::new()],
            ab: ab.clone(),
            bc,
            ac,
        };
        triangle_detect(&g).is_some()
    };

    let max13 = *v13.last().unwrap();
    let max23 = *v23.last().unwrap();
    let mut best: Option<(u32, [u32; 3])> = None;
    for &t12 in v12.iter().rev() {
        if best.is_some_and(|(b, _)| t12 + max13 + max23 <= b) {
            break;
        }
        let ab = block(&e12, l0, l1, t12);
        let mut j = v23.len();
        for &t13 in &v13 {
            if j == 0 {
                break;
            }
            if best.is_some_and(|(b, _)| t12 + t13 + v23[j - 1] <= b) {
                continue;
            }
            while j > 0 && !feasible(&ab, t13, v23[j - 1]) {
                j -= 1;
            }
            if j == 0 {
                break;
            }
            let total = t12 + t13 + v23[j - 1];
            if best.is_none_or(|(b, _)| total > b) {
                best = Some((total, [t12, t13, v23[j - 1]]));
            }
        }
    }
    let (total, [t12, t13, t23]) = best.ok_or_else(infeasible)?;
    let g = graph(t12, t13, t23);
    let (a, b, c) = triangle_detect(&g).expect("recorded thresholds are feasible");
    let witness = pts.witness([&g.parts[0][a], &g.parts[1][b], &g.parts[2][c]], distinct)?;
    let value = dispersion_measures(&witness, None)?.sum_pd;
    assert_eq!(value, total as u64, "witness must realize the optimal thresholds exactly");
    Ok(Optimum { value, witness })
}
