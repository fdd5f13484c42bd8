//! Exact diameter and dispersion through XOR convolution of the solution indicator.
//!
//! Tables are indexed by the integer whose binary numeral is the assignment string, so
//! index 0b01 is the assignment `01` (variable 1 is the most significant bit).

use rayon::prelude::*;

use crate::cnf::{
    Assignment, CnfFormula, DispersionObjective, IndexEvaluator, Optimum, SolutionCollection,
};
use crate::error::{usage, Error, Result};

pub const DEFAULT_FWHT_LIMIT: usize = 26;
/// Bound on (s-1)·n for `exact_dispersion`; the w-loop alone has 2^{(s-2)n} iterations.
pub const DEFAULT_DISPERSION_WORK_LIMIT: usize = 28;

const PAR_THRESHOLD: usize = 1 << 15;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseTable {
    n: usize,
    values: Vec<i64>,
}

impl DenseTable {
    pub fn new(values: Vec<i64>) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return usage(format!("table length {} is not a power of two", values.len()));
        }
        let n = values.len().trailing_zeros() as usize;
        check_dim(n)?;
        Ok(DenseTable { n, values })
    }

    /// Indicator of Ω_F.
    pub fn indicator(f: &CnfFormula) -> Result<Self> {
        check_dim(f.num_vars())?;
        let ev = IndexEvaluator::new(f);
        let values = (0..1u64 << f.num_vars())
            .map(|i| ev.satisfies(i) as i64)
            .collect();
        Ok(DenseTable {
            n: f.num_vars(),
            values,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<i64> {
        self.values
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n > DEFAULT_FWHT_LIMIT {
        return Err(Error::Capability(format!(
            "dimension {n} exceeds the transform limit {DEFAULT_FWHT_LIMIT}"
        )));
    }
    Ok(())
}

fn l1_log2(v: &[i64]) -> f64 {
    (v.iter().map(|x| x.unsigned_abs() as f64).sum::<f64>()).max(1.0).log2()
}

fn l2sq(v: &[i64]) -> f64 {
    v.iter().map(|&x| (x as f64) * (x as f64)).sum()
}

/// Unnormalized butterfly; partial sums never exceed the L1 norm of the input.
fn butterfly(v: &mut [i64]) {
    let len = v.len();
    let mut h = 1;
    while h < len {
        let step = |chunk: &mut [i64]| {
            let (a, b) = chunk.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (p, q) = (*x, *y);
                *x = p + q;
                *y = p - q;
            }
        };
        if len >= PAR_THRESHOLD {
            v.par_chunks_mut(2 * h).for_each(step);
        } else {
            v.chunks_mut(2 * h).for_each(step);
        }
        h *= 2;
    }
}

pub fn fwht(t: &DenseTable) -> Result<DenseTable> {
    if l1_log2(&t.values) >= 62.0 {
        return Err(Error::Capability("table entries too large for 64-bit transform".into()));
    }
    let mut values = t.values.clone();
    butterfly(&mut values);
    Ok(DenseTable { n: t.n, values })
}

/// Inverse step shared by `convolve` and the dispersion loop: 2^{-n}·H(fhat ⊙ ghat).
fn inverse_product(fhat: &[i64], ghat: &mut [i64], n: usize) {
    for (g, f) in ghat.iter_mut().zip(fhat) {
        *g *= f;
    }
    butterfly(ghat);
    for v in ghat.iter_mut() {
        assert!(*v & ((1i64 << n) - 1) == 0, "convolution not divisible by 2^n");
        *v >>= n;
    }
}

/// XOR convolution (f*g)(y) = Σ_x f(x)·g(x⊕y).
pub fn convolve(f: &DenseTable, g: &DenseTable) -> Result<DenseTable> {
    if f.n != g.n {
        return usage(format!("dimension mismatch {} vs {}", f.n, g.n));
    }
    // Cauchy-Schwarz: every partial sum of the second transform is at most 2^n·|f|_2·|g|_2.
    let bound = f.n as f64 + 0.5 * l2sq(&f.values).max(1.0).log2() + 0.5 * l2sq(&g.values).max(1.0).log2();
    if bound >= 62.0 || l1_log2(&f.values) + l1_log2(&g.values) >= 62.0 {
        return Err(Error::Capability("tables too large for exact 64-bit convolution".into()));
    }
    let fhat = fwht(f)?;
    let mut ghat = fwht(g)?.values;
    inverse_product(&fhat.values, &mut ghat, f.n);
    Ok(DenseTable {
        n: f.n,
        values: ghat,
    })
}

/// A pair of solutions at maximum Hamming distance.
///
/// The difference vector is the heaviest y with (f*f)(y) > 0, smallest index among ties; the
/// first point is the smallest x with f(x) = f(x⊕y) = 1.
pub fn exact_diameter(f: &CnfFormula) -> Result<(Assignment, Assignment)> {
    let n = f.num_vars();
    let ind = DenseTable::indicator(f)?;
    if ind.values.iter().all(|&v| v == 0) {
        return Err(Error::Unsat);
    }
    let conv = convolve(&ind, &ind)?;
    let y = (0..conv.values.len())
        .filter(|&y| conv.values[y] > 0)
        .max_by_key(|&y| (y.count_ones(), std::cmp::Reverse(y)))
        .expect("(f*f)(0) = |Ω| > 0");
    let x = (0..ind.values.len())
        .find(|&x| ind.values[x] == 1 && ind.values[x ^ y] == 1)
        .expect("positive convolution entry has a witness");
    Ok((
        Assignment::from_index(n, x as u64),
        Assignment::from_index(n, (x ^ y) as u64),
    ))
}

fn tuple_value(points: &[usize], obj: DispersionObjective) -> u64 {
    let mut min = u64::MAX;
    let mut sum = 0u64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (points[i] ^ points[j]).count_ones() as u64;
            min = min.min(d);
            sum += d;
        }
    }
    match obj {
        DispersionObjective::MinPd => min,
        _ => sum,
    }
}

fn all_distinct(points: &[usize]) -> bool {
    (0..points.len()).all(|i| (i + 1..points.len()).all(|j| points[i] != points[j]))
}

/// Exact dispersion optimum over Ω_F for s ≥ 2.
///
/// For every offset tuple (w₁..w_{s-2}) the convolution of f with g(x) = f(x)·Πf(x⊕wᵢ) is
/// positive at y exactly when {x, x⊕y, x⊕y⊕w₁, ...} ⊆ Ω_F for some x, so the optimum is the best
/// tuple (0, y, y⊕w₁, ...) over positive entries.
pub fn exact_dispersion(f: &CnfFormula, s: usize, obj: DispersionObjective) -> Result<Optimum> {
    let n = f.num_vars();
    if s < 2 {
        return usage("exact dispersion needs s >= 2");
    }
    if (s - 1) * n > DEFAULT_DISPERSION_WORK_LIMIT {
        return Err(Error::Capability(format!(
            "(s-1)·n = {} exceeds the work limit {DEFAULT_DISPERSION_WORK_LIMIT}",
            (s - 1) * n
        )));
    }
    let ind = DenseTable::indicator(f)?;
    let count: i64 = ind.values.iter().sum();
    if count == 0 {
        return Err(Error::Unsat);
    }
    let distinct = obj.needs_distinct();
    if distinct && (count as usize) < s {
        return Err(Error::Infeasible(format!("{count} solutions, {s} requested")));
    }
    let fv = &ind.values;
    let fhat = fwht(&ind)?.values;
    let size = fv.len();
    let mask = size - 1;
    let offsets = s - 2;
    let tuples: u64 = 1u64 << (offsets * n);

    // Each task returns its best (value, tuple index, y) under strict improvement.
    let best = (0..tuples)
        .into_par_iter()
        .map_init(
            || (vec![0i64; size], vec![0usize; s]),
            |(g, pts), widx| {
                let w: Vec<usize> = (0..offsets)
                    .map(|i| ((widx >> (i * n)) as usize) & mask)
                    .collect();
                if distinct && !all_distinct(&[&[0usize][..], &w].concat()) {
                    return None;
                }
                let mut any = false;
                for x in 0..size {
                    let v = fv[x] != 0 && w.iter().all(|&wi| fv[x ^ wi] != 0);
                    g[x] = v as i64;
                    any |= v;
                }
                if !any {
                    return None;
                }
                // g and f are swapped relative to the definition; XOR convolution is symmetric.
                butterfly(g);
                inverse_product(&fhat, g, n);
                let mut local: Option<(u64, u64, usize)> = None;
                for (y, &gy) in g.iter().enumerate().take(size) {
                    if gy <= 0 {
                        continue;
                    }
                    pts[0] = 0;
                    pts[1] = y;
                    for (i, &wi) in w.iter().enumerate() {
                        pts[2 + i] = y ^ wi;
                    }
                    if distinct && !all_distinct(pts) {
                        continue;
                    }
                    let v = tuple_value(pts, obj);
                    if local.is_none_or(|(bv, _, _)| v > bv) {
                        local = Some((v, widx, y));
                    }
                }
                local
            },
        )
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) | (x, None) => x,
                (Some(p), Some(q)) => Some(if q.0 > p.0 || (q.0 == p.0 && (q.1, q.2) < (p.1, p.2)) {
                    q
                } else {
                    p
                }),
            },
        );

    let (value, widx, y) = best.ok_or_else(|| {
        Error::Infeasible(format!("no admissible {s}-tuple of solutions"))
    })?;
    let mut pts = vec![0usize, y];
    for i in 0..offsets {
        pts.push(y ^ (((widx >> (i * n)) as usize) & mask));
    }
    let x = (0..size)
        .find(|&x| pts.iter().all(|&p| fv[x ^ p] != 0))
        .expect("positive convolution entry has a witness");
    let mut members: Vec<Assignment> = pts
        .iter()
        .map(|&p| Assignment::from_index(n, (x ^ p) as u64))
        .collect();
    members.sort();
    let witness = SolutionCollection::from_members(members, distinct)?;
    Ok(Optimum { value, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{bits, brute_opt, dispersion_measures, enumerate_solutions, WeightConstraint};
    use crate::gen::random_kcnf;
    use crate::rng::stream;
    use proptest::prelude::*;

    fn f(n: usize, cl: &[&[i64]]) -> CnfFormula {
        CnfFormula::new(n, cl.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    /// Direct double sum, independent of the transform.
    fn direct_conv(f: &[i64], g: &[i64]) -> Vec<i64> {
        (0..f.len())
            .map(|y| (0..f.len()).map(|x| f[x] * g[x ^ y]).sum())
            .collect()
    }

    #[test]
    fn transform_examples() {
        let t = DenseTable::new(vec![0, 1, 1, 1]).unwrap();
        assert_eq!(fwht(&t).unwrap().values(), &[3, -1, -1, -1]);
        let mut delta = vec![0; 8];
        delta[0] = 1;
        assert_eq!(fwht(&DenseTable::new(delta).unwrap()).unwrap().values(), &[1; 8]);
        assert_eq!(convolve(&t, &t).unwrap().values(), &[3, 2, 2, 2]);
        assert!(DenseTable::new(vec![0; 3]).is_err());
    }

    #[test]
    fn diameter_examples() {
        let (a, b) = exact_diameter(&f(2, &[&[1, 2]])).unwrap();
        assert_eq!((a, b), (bits("01"), bits("10")));
        let (a, b) = exact_diameter(&f(2, &[&[1], &[-2]])).unwrap();
        assert_eq!((a.clone(), b), (bits("10"), bits("10")));
        let (a, b) = exact_diameter(&CnfFormula::trivially_true(5)).unwrap();
        assert_eq!(a.distance(&b), 5);
        assert!(matches!(exact_diameter(&f(1, &[&[1], &[-1]])), Err(Error::Unsat)));
    }

    #[test]
    fn dispersion_examples() {
        use DispersionObjective::*;
        let g = f(2, &[&[1, 2]]);
        assert_eq!(exact_dispersion(&g, 3, SumPd).unwrap().value, 4);
        let o = exact_dispersion(&g, 3, MinPd).unwrap();
        assert_eq!(o.value, 1);
        assert_eq!(o.witness.members(), &[bits("01"), bits("10"), bits("11")]);
        let h = f(3, &[&[1, 2, 3]]);
        assert_eq!(
            exact_dispersion(&h, 3, SumPdDistinct).unwrap().value,
            brute_opt(&h, 3, SumPdDistinct, WeightConstraint::None).unwrap().value
        );
        assert!(matches!(exact_dispersion(&g, 4, MinPd), Err(Error::Infeasible(_))));
        assert!(exact_dispersion(&g, 1, SumPd).is_err());
    }

    #[test]
    fn random_formulas_match_brute_force() {
        let mut rng = stream(11, 0);
        for trial in 0..30 {
            let n = 3 + trial % 5;
            let g = random_kcnf(n, 2 + trial % 2, n * 2, &mut rng);
            for s in 2..=3 {
                for obj in [DispersionObjective::MinPd, DispersionObjective::SumPd, DispersionObjective::SumPdDistinct] {
                    let a = exact_dispersion(&g, s, obj).map(|o| o.value).ok();
                    let b = brute_opt(&g, s, obj, WeightConstraint::None).map(|o| o.value).ok();
                    assert_eq!(a, b, "n={n} s={s} {obj:?}");
                    if let Ok(o) = exact_dispersion(&g, s, obj) {
                        assert!(o.witness.members().iter().all(|z| g.satisfies(z)));
                        assert_eq!(obj.value(&dispersion_measures(&o.witness, None).unwrap()), o.value);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn involution(v in proptest::collection::vec(-1000i64..1000, 64)) {
            let t = DenseTable::new(v.clone()).unwrap();
            let tt = fwht(&fwht(&t).unwrap()).unwrap();
            prop_assert_eq!(tt.values().to_vec(), v.iter().map(|x| x * 64).collect::<Vec<_>>());
        }

        #[test]
        fn convolution_matches_direct_sum(f in proptest::collection::vec(0i64..2, 256), g in proptest::collection::vec(0i64..2, 256)) {
            let c = convolve(&DenseTable::new(f.clone()).unwrap(), &DenseTable::new(g.clone()).unwrap()).unwrap();
            let direct = direct_conv(&f, &g);
            prop_assert_eq!(c.values().iter().sum::<i64>(), f.iter().sum::<i64>() * g.iter().sum::<i64>());
            prop_assert!(c.values().iter().all(|&v| (0..=256).contains(&v)));
            prop_assert_eq!(c.into_values(), direct);
        }

        #[test]
        fn delta_convolution(a in 0usize..32, b in 0usize..32) {
            let mut da = vec![0; 32];
            let mut db = vec![0; 32];
            da[a] = 1;
            db[b] = 1;
            let c = convolve(&DenseTable::new(da).unwrap(), &DenseTable::new(db).unwrap()).unwrap();
            let mut expect = vec![0; 32];
            expect[a ^ b] = 1;
            prop_assert_eq!(c.into_values(), expect);
        }

        #[test]
        fn self_convolution_at_zero_counts_solutions(seed in any::<u64>()) {
            let mut rng = stream(seed, 0);
            let g = random_kcnf(8, 3, 20, &mut rng);
            let ind = DenseTable::indicator(&g).unwrap();
            let c = convolve(&ind, &ind).unwrap();
            prop_assert_eq!(c.values()[0] as usize, enumerate_solutions(&g).unwrap().len());
        }
    }
}
