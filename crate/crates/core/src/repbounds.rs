//! Exact representation-theoretic counting behind the state-independent
//! bounds: Schur–Weyl blocks of `(C^d)^{⊗N}`, Weyl dimensions, restriction
//! branching, and the denominators that turn a detection level `alpha` into
//! an estimation-error floor.
//!
//! All dimensions and multiplicities are computed in exact big-integer
//! arithmetic: `d^N` overflows machine words almost immediately, and the
//! completeness identity `sum_lambda d_lambda * m_lambda = d^N` is asserted
//! exactly, not approximately.  Only the final `alpha / denominator` step
//! leaves the exact world.

use std::collections::{BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Partition label of an irreducible `U(d)` representation: nonincreasing
/// nonnegative row lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct YoungDiagram {
    rows: Vec<u64>,
}

impl YoungDiagram {
    /// Validates that `rows` is nonincreasing.  Trailing zeros are kept as
    /// given; diagrams are labels for `U(d)`, not reduced `SU(d)` classes.
    pub fn new(rows: Vec<u64>) -> Result<Self> {
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "diagram rows must be nonincreasing, got {rows:?}"
            )));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Number of boxes.
    pub fn size(&self) -> u64 {
        self.rows.iter().sum()
    }

    /// Number of (possibly zero) rows in the label.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn padded(&self, d: usize) -> Vec<u64> {
        let mut v = self.rows.clone();
        v.resize(d, 0);
        v
    }
}

/// One Schur–Weyl block: its label, Weyl dimension, symmetric-group
/// multiplicity, and their minimum (the usable rank for invariant tests).
#[derive(Debug, Clone)]
pub struct IrrepBlock {
    pub lam: YoungDiagram,
    pub d_lam: BigUint,
    pub m_lam: BigUint,
    pub r_lam: BigUint,
}

/// One entry of the restriction `U(d) -> U(d-1)` of an irrep `lambda`.
#[derive(Debug, Clone)]
pub struct BranchEntry {
    pub mu: YoungDiagram,
    pub d_mu: BigUint,
    /// Restriction multiplicity; 0 or 1, and entries are only emitted for 1.
    pub m_lam_mu: BigUint,
    /// `min(m_lam_mu, m_lam)`; equals `m_lam_mu` since `m_lam >= 1`.
    pub r_lam_mu: BigUint,
}

/// Dimension of the `U(d)` irrep `lambda` by the Weyl product formula
/// `prod_{i<j} (lambda_i - lambda_j + j - i) / (j - i)`, exactly.
pub fn weyl_dim(lam: &YoungDiagram, d: usize) -> Result<BigUint> {
    if lam.len() > d {
        return Err(Error::InvalidArgument(format!(
            "diagram has {} rows but the group rank is {d}",
            lam.len()
        )));
    }
    let padded = lam.padded(d);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..d {
        for j in (i + 1)..d {
            let gap = (j - i) as u64;
            num *= BigUint::from(padded[i] - padded[j] + gap);
            den *= BigUint::from(gap);
        }
    }
    Ok(num / den)
}

/// Dimension of the symmetric-group irrep of shape `lambda` (the number of
/// standard Young tableaux), by the hook length formula.
pub fn sn_dim(lam: &YoungDiagram) -> Result<BigUint> {
    let n = lam.size();
    if n == 0 {
        return Err(Error::InvalidArgument("diagram must contain at least one box".into()));
    }
    // Column lengths of the transpose.
    let ncols = lam.rows.first().copied().unwrap_or(0) as usize;
    let mut col_len = vec![0u64; ncols];
    for &r in &lam.rows {
        for c in col_len.iter_mut().take(r as usize) {
            *c += 1;
        }
    }
    let mut hooks = BigUint::one();
    for (r, &row) in lam.rows.iter().enumerate() {
        for c in 0..row as usize {
            let hook = row - c as u64 + col_len[c] - r as u64 - 1;
            hooks *= BigUint::from(hook);
        }
    }
    let mut fact = BigUint::one();
    for k in 2..=n {
        fact *= BigUint::from(k);
    }
    Ok(fact / hooks)
}

/// All partitions of `n` into at most `parts` parts, in descending
/// lexicographic order, without trailing-zero padding.
fn partitions_at_most(n: u64, parts: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: u64, max_part: u64, parts_left: usize, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        if parts_left == 0 {
            return;
        }
        let hi = remaining.min(max_part);
        // Smallest admissible first part: the rest must fit in parts_left - 1
        // copies of it.
        for p in (1..=hi).rev() {
            if p * parts_left as u64 >= remaining {
                current.push(p);
                rec(remaining - p, p, parts_left - 1, current, out);
                current.pop();
            }
        }
    }
    rec(n, n, parts, &mut current, &mut out);
    out
}

/// The Schur–Weyl decomposition of `(C^d)^{⊗N}`: every `lambda` with `N`
/// boxes and at most `d` rows, with its Weyl dimension and symmetric-group
/// multiplicity.  The blocks satisfy `sum d_lam * m_lam = d^N` exactly.
pub fn schur_weyl(d: usize, n: usize) -> Result<Vec<IrrepBlock>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("local dimension must be at least 2, got {d}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("the number of subsystems must be at least 1".into()));
    }
    let mut blocks = Vec::new();
    for rows in partitions_at_most(n as u64, d) {
        let lam = YoungDiagram::new(rows)?;
        let d_lam = weyl_dim(&lam, d)?;
        let m_lam = sn_dim(&lam)?;
        let r_lam = d_lam.clone().min(m_lam.clone());
        blocks.push(IrrepBlock { lam, d_lam, m_lam, r_lam });
    }
    Ok(blocks)
}

/// Denominator `sum_lambda d_lam * min(d_lam, m_lam)` of the group-covariant
/// state-independent bound.
pub fn group_denominator(d: usize, n: usize) -> Result<BigUint> {
    let mut acc = BigUint::zero();
    for b in schur_weyl(d, n)? {
        acc += b.d_lam * b.r_lam;
    }
    Ok(acc)
}

/// State-independent floor for estimation under the full unitary group
/// action: `alpha / sum_lambda d_lam * min(d_lam, m_lam)`.
pub fn group_bound(d: usize, n: usize, alpha: f64) -> Result<f64> {
    let den = group_denominator(d, n)?
        .to_f64()
        .ok_or_else(|| Error::InvalidArgument("denominator exceeds float range".into()))?;
    Ok(alpha / den)
}

/// Restriction of the `U(d)` irrep `lambda` to `U(d-1)`: all `mu` of length
/// `d - 1` interlacing `lambda` (`lambda_j >= mu_j >= lambda_{j+1}`), each
/// with multiplicity one, in ascending lexicographic order.
pub fn branch(lam: &YoungDiagram) -> Result<Vec<BranchEntry>> {
    let d = lam.len();
    if d == 0 {
        return Err(Error::InvalidArgument("cannot restrict the empty-rank label".into()));
    }
    let padded = lam.padded(d);
    let mut out = Vec::new();
    let mut mu = vec![0u64; d - 1];
    fn rec(
        j: usize,
        padded: &[u64],
        mu: &mut Vec<u64>,
        out: &mut Vec<BranchEntry>,
    ) -> Result<()> {
        let d = padded.len();
        if j == d - 1 {
            let diagram = YoungDiagram::new(mu.clone())?;
            let d_mu = weyl_dim(&diagram, d - 1)?;
            out.push(BranchEntry {
                mu: diagram,
                d_mu,
                m_lam_mu: BigUint::one(),
                r_lam_mu: BigUint::one(),
            });
            return Ok(());
        }
        for v in padded[j + 1]..=padded[j] {
            // Keep mu nonincreasing: the interlacing ranges can overlap.
            if j > 0 && v > mu[j - 1] {
                break;
            }
            mu[j] = v;
            rec(j + 1, padded, mu, out)?;
        }
        Ok(())
    }
    rec(0, &padded, &mut mu, &mut out)?;
    Ok(out)
}

/// Denominator `max_mu sum_lambda d_lam * min(m_lam_mu, m_lam) / d_mu` of
/// the homogeneous-space bound, aggregated over all Schur–Weyl blocks.
pub fn homogeneous_denominator(d: usize, n: usize) -> Result<BigRational> {
    let blocks = schur_weyl(d, n)?;
    // mu rows -> (d_mu, accumulated numerator)
    let mut agg: HashMap<Vec<u64>, (BigUint, BigUint)> = HashMap::new();
    for b in &blocks {
        let lam_full = YoungDiagram::new(b.lam.padded(d))?;
        for e in branch(&lam_full)? {
            let r = e.m_lam_mu.clone().min(b.m_lam.clone());
            let entry = agg
                .entry(e.mu.rows().to_vec())
                .or_insert_with(|| (e.d_mu.clone(), BigUint::zero()));
            entry.1 += b.d_lam.clone() * r;
        }
    }
    let mut best: Option<BigRational> = None;
    for (_, (d_mu, num)) in agg {
        let ratio = BigRational::new(BigInt::from(num), BigInt::from(d_mu));
        if best.as_ref().map_or(true, |b| ratio > *b) {
            best = Some(ratio);
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no restriction entries were produced".into()))
}

/// State-independent floor for homogeneous-space estimation:
/// `alpha / max_mu sum_lambda d_lam * min(m_lam_mu, m_lam) / d_mu`.
pub fn homogeneous_bound(d: usize, n: usize, alpha: f64) -> Result<f64> {
    let den = homogeneous_denominator(d, n)?
        .to_f64()
        .ok_or_else(|| Error::InvalidArgument("denominator exceeds float range".into()))?;
    Ok(alpha / den)
}

/// Largest Weyl dimension over the Schur–Weyl blocks of `(C^d)^{⊗N}`.
pub fn max_weyl_dim(d: usize, n: usize) -> Result<BigUint> {
    schur_weyl(d, n)?
        .into_iter()
        .map(|b| b.d_lam)
        .max()
        .ok_or_else(|| Error::InvalidArgument("no blocks".into()))
}

/// Floor `alpha / max_lambda d_lam` valid for arbitrary (mixed) product
/// probes under the diagonal group action.
pub fn mixed_state_bound(d: usize, n: usize, alpha: f64) -> Result<f64> {
    let den = max_weyl_dim(d, n)?
        .to_f64()
        .ok_or_else(|| Error::InvalidArgument("denominator exceeds float range".into()))?;
    Ok(alpha / den)
}

/// Dimension of the symmetric subspace, `binom(N + d - 1, d - 1)`, exactly.
pub fn symmetric_dim(d: usize, n: usize) -> Result<BigUint> {
    if d < 2 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need local dimension >= 2 and at least one subsystem, got d={d}, N={n}"
        )));
    }
    let mut acc = BigUint::one();
    for k in 0..(d - 1) as u64 {
        acc *= BigUint::from(n as u64 + d as u64 - 1 - k);
        acc /= BigUint::from(k + 1);
    }
    Ok(acc)
}

/// Floor `alpha / binom(N + d - 1, d - 1)` for pure product probes, which
/// live in the symmetric subspace.
pub fn pure_state_bound(d: usize, n: usize, alpha: f64) -> Result<f64> {
    let den = symmetric_dim(d, n)?
        .to_f64()
        .ok_or_else(|| Error::InvalidArgument("denominator exceeds float range".into()))?;
    Ok(alpha / den)
}

/// Exact count of distinct eigenvalues of the `N`-fold sum of single-site
/// weights drawn from `h`, by iterated set convolution.  Always at most
/// `2 N max|h| + 1`.
pub fn u1_eigenvalue_count(h: &[i64], n: usize) -> Result<u64> {
    if h.is_empty() {
        return Err(Error::InvalidArgument("single-site weights must be nonempty".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("the number of subsystems must be at least 1".into()));
    }
    let mut sums: BTreeSet<i64> = h.iter().copied().collect();
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for s in &sums {
            for w in h {
                next.insert(s + w);
            }
        }
        sums = next;
    }
    Ok(sums.len() as u64)
}

/// Least-squares slope of `log(value)` against `log(N)` with the coefficient
/// of determination.  Requires at least four points with positive entries.
pub fn scaling_exponent(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 4 {
        return Err(Error::FitRejected(format!(
            "need at least 4 points for a scaling fit, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(n, v)| *n <= 0.0 || *v <= 0.0) {
        return Err(Error::FitRejected("scaling fits require positive sizes and values".into()));
    }
    let xs: Vec<f64> = points.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    let m = points.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / m;
    let mean_y = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::FitRejected("all sizes coincide; the slope is undefined".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((slope, r2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(rows: &[u64]) -> YoungDiagram {
        YoungDiagram::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn weyl_dim_reference_values() {
        assert_eq!(weyl_dim(&diagram(&[1, 0]), 2).unwrap(), BigUint::from(2u32));
        for n in [1u64, 4, 7, 40] {
            assert_eq!(weyl_dim(&diagram(&[n, 0]), 2).unwrap(), BigUint::from(n + 1));
        }
        assert_eq!(weyl_dim(&diagram(&[2, 1, 0]), 3).unwrap(), BigUint::from(8u32));
        assert_eq!(weyl_dim(&diagram(&[]), 0).unwrap(), BigUint::one());
        assert!(weyl_dim(&diagram(&[1, 1, 1]), 2).is_err());
        assert!(YoungDiagram::new(vec![1, 2]).is_err());
    }

    /// Counts standard Young tableaux directly by backtracking.
    fn syt_count(rows: &[u64]) -> u64 {
        fn rec(rows: &[u64], fill: &mut Vec<u64>, left: u64) -> u64 {
            if left == 0 {
                return 1;
            }
            let mut total = 0;
            for r in 0..rows.len() {
                let can_grow = fill[r] < rows[r] && (r == 0 || fill[r - 1] > fill[r]);
                if can_grow {
                    fill[r] += 1;
                    total += rec(rows, fill, left - 1);
                    fill[r] -= 1;
                }
            }
            total
        }
        let n: u64 = rows.iter().sum();
        rec(rows, &mut vec![0; rows.len()], n)
    }

    #[test]
    fn sn_dim_reference_values() {
        assert_eq!(sn_dim(&diagram(&[5])).unwrap(), BigUint::one());
        assert_eq!(sn_dim(&diagram(&[2, 1])).unwrap(), BigUint::from(2u32));
        assert_eq!(sn_dim(&diagram(&[1, 1, 1])).unwrap(), BigUint::one());
        assert!(sn_dim(&diagram(&[0, 0])).is_err());
    }

    #[test]
    fn sn_dim_matches_tableau_enumeration() {
        for n in 1..=8u64 {
            for rows in partitions_at_most(n, n as usize) {
                let hook = sn_dim(&diagram(&rows)).unwrap();
                let direct = BigUint::from(syt_count(&rows));
                assert_eq!(hook, direct, "shape {rows:?}");
            }
        }
    }

    #[test]
    fn schur_weyl_reference_blocks() {
        let b = schur_weyl(2, 2).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].lam.rows(), &[2]);
        assert_eq!(b[0].d_lam, BigUint::from(3u32));
        assert_eq!(b[0].m_lam, BigUint::one());
        assert_eq!(b[1].lam.rows(), &[1, 1]);
        assert_eq!(b[1].d_lam, BigUint::one());

        let b = schur_weyl(2, 3).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].d_lam, BigUint::from(4u32));
        assert_eq!(b[1].lam.rows(), &[2, 1]);
        assert_eq!(b[1].d_lam, BigUint::from(2u32));
        assert_eq!(b[1].m_lam, BigUint::from(2u32));
        assert_eq!(b[1].r_lam, BigUint::from(2u32));

        let b = schur_weyl(3, 1).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].d_lam, BigUint::from(3u32));
        assert_eq!(b[0].m_lam, BigUint::one());
    }

    #[test]
    fn schur_weyl_dimension_sum_is_exact() {
        for d in [2usize, 3] {
            for n in 1..=12usize {
                let total: BigUint = schur_weyl(d, n)
                    .unwrap()
                    .into_iter()
                    .map(|b| b.d_lam * b.m_lam)
                    .sum();
                assert_eq!(total, BigUint::from(d as u64).pow(n as u32), "d={d}, N={n}");
            }
        }
    }

    #[test]
    fn group_bound_reference_values() {
        assert!((group_bound(2, 2, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((group_bound(2, 1, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((group_bound(2, 3, 0.9).unwrap() - 0.1125).abs() < 1e-15);
    }

    #[test]
    fn branch_reference_and_conservation() {
        let entries = branch(&diagram(&[1, 0])).unwrap();
        let mus: Vec<Vec<u64>> = entries.iter().map(|e| e.mu.rows().to_vec()).collect();
        assert_eq!(mus, vec![vec![0], vec![1]]);

        let entries = branch(&diagram(&[2, 1])).unwrap();
        let mus: Vec<Vec<u64>> = entries.iter().map(|e| e.mu.rows().to_vec()).collect();
        assert_eq!(mus, vec![vec![1], vec![2]]);

        for rows in [vec![4, 2, 1], vec![3, 3, 0], vec![5, 2, 2, 1]] {
            let lam = diagram(&rows);
            let d = lam.len();
            let total: BigUint = branch(&lam)
                .unwrap()
                .into_iter()
                .map(|e| e.d_mu * e.m_lam_mu)
                .sum();
            assert_eq!(total, weyl_dim(&lam, d).unwrap(), "lambda {rows:?}");
        }
    }

    #[test]
    fn homogeneous_bound_reference_values() {
        assert!((homogeneous_bound(2, 4, 1.0).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!((homogeneous_bound(2, 1, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((homogeneous_bound(2, 2, 1.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn homogeneous_denominator_closed_form_for_qubits() {
        for n in 1..=20usize {
            let den = homogeneous_denominator(2, n).unwrap();
            let expect = ((n / 2 + 1) * (n.div_ceil(2) + 1)) as i64;
            assert_eq!(den, BigRational::from(BigInt::from(expect)), "N={n}");
        }
    }

    #[test]
    fn mixed_and_pure_bound_reference_values() {
        assert!((mixed_state_bound(2, 4, 1.0).unwrap() - 0.2).abs() < 1e-15);
        assert!((mixed_state_bound(2, 1, 0.6).unwrap() - 0.3).abs() < 1e-15);
        assert!((mixed_state_bound(3, 2, 1.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((pure_state_bound(2, 4, 1.0).unwrap() - 0.2).abs() < 1e-15);
        assert!((pure_state_bound(2, 1, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((pure_state_bound(3, 2, 1.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(symmetric_dim(4, 10).unwrap(), BigUint::from(286u32));
    }

    #[test]
    fn u1_count_reference_values() {
        for n in [1usize, 3, 9, 25] {
            assert_eq!(u1_eigenvalue_count(&[1, -1], n).unwrap(), n as u64 + 1);
            assert_eq!(u1_eigenvalue_count(&[0, 1, 2], n).unwrap(), 2 * n as u64 + 1);
            assert_eq!(u1_eigenvalue_count(&[5], n).unwrap(), 1);
        }
        assert!(u1_eigenvalue_count(&[], 3).is_err());
        // Linear growth cap.
        for n in [2usize, 7, 16] {
            let h = [3i64, -2, 0, 1];
            let count = u1_eigenvalue_count(&h, n).unwrap();
            assert!(count <= 2 * n as u64 * 3 + 1);
        }
    }

    #[test]
    fn scaling_exponent_reference_fits() {
        let inv: Vec<(f64, f64)> = (1..=8).map(|k| (k as f64 * 4.0, 2.5 / (k as f64 * 4.0))).collect();
        let (slope, r2) = scaling_exponent(&inv).unwrap();
        assert!((slope + 1.0).abs() < 1e-9);
        assert!((r2 - 1.0).abs() < 1e-9);

        let half: Vec<(f64, f64)> =
            (1..=8).map(|k| (k as f64 * 4.0, 0.3 / (k as f64 * 4.0).sqrt())).collect();
        let (slope, _) = scaling_exponent(&half).unwrap();
        assert!((slope + 0.5).abs() < 1e-9);

        let flat: Vec<(f64, f64)> = (1..=8).map(|k| (k as f64 * 4.0, 0.7)).collect();
        let (slope, r2) = scaling_exponent(&flat).unwrap();
        assert!(slope.abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);

        assert!(scaling_exponent(&inv[..3]).is_err());
        assert!(scaling_exponent(&[(4.0, 1.0), (8.0, -1.0), (12.0, 1.0), (16.0, 1.0)]).is_err());
    }

    #[test]
    fn denominator_growth_exponents() {
        let pts: Vec<(f64, f64)> = (1..=8)
            .map(|k| {
                let n = 8 * k;
                (n as f64, homogeneous_denominator(2, n).unwrap().to_f64().unwrap())
            })
            .collect();
        let (slope, _) = scaling_exponent(&pts).unwrap();
        assert!((slope - 2.0).abs() < 0.2, "homogeneous d=2 slope {slope}");

        let pts: Vec<(f64, f64)> = (1..=8)
            .map(|k| {
                let n = 8 * k;
                (n as f64, group_denominator(2, n).unwrap().to_f64().unwrap())
            })
            .collect();
        let (slope, _) = scaling_exponent(&pts).unwrap();
        assert!((slope - 3.0).abs() < 0.2, "group d=2 slope {slope}");
    }
}
