//! The dimensionless incentive model.
//!
//! A peer with contribution `d` has its requests served with probability
//! `p(d) = d^α / (1 + d^α)`. Its utility is the expected benefit it draws
//! from everyone else's contribution minus its own cost:
//!
//! ```text
//! u_i = -d_i + p(d_i) * Σ_j b_ij d_j
//! ```
//!
//! All quantities here are dimensionless; [`DimensionalParams`] converts
//! raw contributions, benefits and utilities into that form.

use crate::error::{check_nonnegative, check_positive, Error, Result};

/// Cap applied to the upload/download participation level.
pub const PARTICIPATION_CAP: f64 = 1000.0;

/// The service-differentiation curve `p(d) = d^α / (1 + d^α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityCurve {
    alpha: f64,
}

impl ProbabilityCurve {
    pub fn new(alpha: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        Ok(Self { alpha })
    }

    /// The `α = 1` curve used throughout the closed-form analysis.
    pub fn linear() -> Self {
        Self { alpha: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Evaluates `p(d)`. Negative or non-finite `d` is rejected.
    ///
    /// For `d > 1` the curve is evaluated as `1 / (1 + d^-α)` so that large
    /// contributions never overflow to `inf / inf`. Mathematically `p < 1`
    /// for every finite `d`, but the result rounds to `1.0` once `d^-α`
    /// drops below machine epsilon.
    pub fn evaluate(&self, d: f64) -> Result<f64> {
        check_nonnegative("d", d)?;
        Ok(self.eval_unchecked(d))
    }

    pub(crate) fn eval_unchecked(&self, d: f64) -> f64 {
        if d <= 1.0 {
            let x = d.powf(self.alpha);
            x / (1.0 + x)
        } else {
            1.0 / (1.0 + d.powf(-self.alpha))
        }
    }

    /// `dp/dd = α d^(α-1) / (1 + d^α)^2`.
    ///
    /// At `d = 0` the derivative is infinite for `α < 1`, which is reported as
    /// a domain error.
    pub fn derivative(&self, d: f64) -> Result<f64> {
        check_nonnegative("d", d)?;
        if d == 0.0 && self.alpha < 1.0 {
            return Err(Error::Domain {
                name: "d",
                value: d,
                reason: "p'(0) is unbounded for alpha < 1",
            });
        }
        Ok(self.derivative_unchecked(d))
    }

    pub(crate) fn derivative_unchecked(&self, d: f64) -> f64 {
        let a = self.alpha;
        if d == 0.0 {
            return match a.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => 1.0,
                _ => 0.0,
            };
        }
        if d <= 1.0 {
            let x = d.powf(a);
            a * d.powf(a - 1.0) / ((1.0 + x) * (1.0 + x))
        } else {
            let y = d.powf(-a);
            a * d.powf(-a - 1.0) / ((1.0 + y) * (1.0 + y))
        }
    }
}

/// Evaluates `p(d)` for the given curve.
pub fn probability(curve: &ProbabilityCurve, d: f64) -> Result<f64> {
    curve.evaluate(d)
}

/// Conversion between raw (dimensional) quantities and the model's
/// dimensionless ones for a single peer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionalParams {
    /// `D0`, the system-wide contribution unit (e.g. MB/week).
    pub contribution_unit: f64,
    /// `c_i`, the peer's cost per unit of contribution.
    pub cost_per_unit: f64,
}

impl DimensionalParams {
    pub fn new(contribution_unit: f64, cost_per_unit: f64) -> Result<Self> {
        check_positive("contribution_unit", contribution_unit)?;
        check_positive("cost_per_unit", cost_per_unit)?;
        Ok(Self {
            contribution_unit,
            cost_per_unit,
        })
    }

    /// `d_i = D_i / D0`.
    pub fn contribution(&self, raw_contribution: f64) -> Result<f64> {
        Ok(check_nonnegative("raw_contribution", raw_contribution)? / self.contribution_unit)
    }

    /// `b_ij = B_ij / c_i`.
    pub fn benefit(&self, raw_benefit: f64) -> Result<f64> {
        Ok(check_nonnegative("raw_benefit", raw_benefit)? / self.cost_per_unit)
    }

    /// `u_i = U_i / (c_i D0)`.
    pub fn utility(&self, raw_utility: f64) -> f64 {
        raw_utility / (self.cost_per_unit * self.contribution_unit)
    }
}

/// Sparse `N x N` matrix of dimensionless benefit weights `b_ij`.
///
/// Stored in compressed-row form; only strictly positive off-diagonal
/// entries are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct BenefitMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl BenefitMatrix {
    /// Builds a matrix from `(i, j, b_ij)` triplets in any order.
    ///
    /// Zero entries are dropped. Nonzero diagonal entries, negative or
    /// non-finite weights, out-of-range indices and duplicates are errors.
    pub fn from_triplets<I>(n: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, b) in triplets {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            check_nonnegative("b_ij", b)?;
            if b == 0.0 {
                continue;
            }
            if i == j {
                return Err(Error::Config(format!(
                    "diagonal benefit b_{i}{i} = {b} must be zero"
                )));
            }
            entries.push((i, j, b));
        }
        entries.sort_by_key(|e| (e.0, e.1));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::Config(format!(
                "duplicate benefit entry ({}, {})",
                w[0].0, w[0].1
            )));
        }

        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _, _) in &entries {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let cols = entries.iter().map(|e| e.1).collect();
        let vals = entries.iter().map(|e| e.2).collect();
        Ok(Self {
            n,
            row_ptr,
            cols,
            vals,
        })
    }

    /// Builds `b_ij = B_ij / c_i` from raw benefits and per-peer costs.
    pub fn from_raw<I>(n: usize, raw: I, costs: &[f64]) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if costs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: costs.len(),
            });
        }
        for &c in costs {
            check_positive("cost_per_unit", c)?;
        }
        let mut scaled = Vec::new();
        for (i, j, big_b) in raw {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            scaled.push((i, j, check_nonnegative("raw_benefit", big_b)? / costs[i]));
        }
        Self::from_triplets(n, scaled)
    }

    /// The homogeneous system: `b_ij = b` for every `i != j`.
    pub fn homogeneous(n: usize, b: f64) -> Result<Self> {
        check_nonnegative("b", b)?;
        let triplets = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j, b)));
        Self::from_triplets(n, triplets)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Nonzero entries of row `i` as `(j, b_ij)`, in increasing `j`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn row_len(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    /// All nonzero entries as `(i, j, b_ij)`, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, b)| (i, j, b)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// `b_i = Σ_j b_ij`.
    pub fn row_benefit(&self, i: usize) -> f64 {
        self.row(i).map(|(_, b)| b).sum()
    }

    /// `b_av = (1/N) Σ_i b_i`.
    pub fn average_benefit(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (0..self.n).map(|i| self.row_benefit(i)).sum::<f64>() / self.n as f64
    }

    /// `Σ_j b_ij d_j` over the stored entries of row `i`.
    pub fn weighted_sum(&self, i: usize, d: &[f64]) -> f64 {
        self.row(i).map(|(j, b)| b * d[j]).sum()
    }

    /// Nonzero values, row-major.
    pub fn values(&self) -> &[f64] {
        &self.vals
    }
}

/// Dimensionless contributions `d_i >= 0`, one per peer.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributionProfile {
    values: Vec<f64>,
}

impl ContributionProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            check_nonnegative("d_i", v)?;
        }
        Ok(Self { values })
    }

    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        check_nonnegative("d_i", value)?;
        Ok(Self {
            values: vec![value; n],
        })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

fn check_peer(b: &BenefitMatrix, d: &ContributionProfile, i: usize) -> Result<()> {
    if d.len() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: b.n(),
            actual: d.len(),
        });
    }
    if i >= b.n() {
        return Err(Error::IndexOutOfRange { index: i, n: b.n() });
    }
    Ok(())
}

/// Utility of a peer contributing `d` while the weighted contribution of
/// everyone else is `s = Σ_j b_ij d_j`.
pub fn utility_at(curve: &ProbabilityCurve, s: f64, d: f64) -> f64 {
    -d + curve.eval_unchecked(d) * s
}

/// `∂u/∂d` for a peer contributing `d` against weighted contribution `s`.
pub fn marginal_utility(curve: &ProbabilityCurve, s: f64, d: f64) -> f64 {
    -1.0 + s * curve.derivative_unchecked(d)
}

/// `u_i = -d_i + p(d_i) Σ_j b_ij d_j`.
pub fn utility(
    curve: &ProbabilityCurve,
    b: &BenefitMatrix,
    d: &ContributionProfile,
    i: usize,
) -> Result<f64> {
    check_peer(b, d, i)?;
    let di = d.get(i);
    if di == 0.0 {
        return Ok(0.0);
    }
    Ok(utility_at(curve, b.weighted_sum(i, d.as_slice()), di))
}

/// `∂u_i/∂d_i = -1 + S_i α d_i^(α-1) / (1 + d_i^α)^2`.
pub fn utility_gradient(
    curve: &ProbabilityCurve,
    b: &BenefitMatrix,
    d: &ContributionProfile,
    i: usize,
) -> Result<f64> {
    check_peer(b, d, i)?;
    let slope = curve.derivative(d.get(i))?;
    Ok(-1.0 + b.weighted_sum(i, d.as_slice()) * slope)
}

/// Upload/download participation level, `100 * up / down`, capped at 1000.
///
/// A peer that has downloaded nothing gets the cap.
pub fn participation_level(uploads_mb: f64, downloads_mb: f64) -> Result<f64> {
    check_nonnegative("uploads_mb", uploads_mb)?;
    check_nonnegative("downloads_mb", downloads_mb)?;
    if downloads_mb == 0.0 {
        return Ok(PARTICIPATION_CAP);
    }
    Ok((100.0 * uploads_mb / downloads_mb).min(PARTICIPATION_CAP))
}

/// Query TTL granted to a peer with contribution `d`: `ceil(p(d) * ttl)`.
///
/// A zero contribution yields a TTL of zero, so the query is not forwarded.
pub fn scaled_ttl(curve: &ProbabilityCurve, d: f64, initial_ttl: u32) -> Result<u32> {
    if initial_ttl == 0 {
        return Err(Error::Domain {
            name: "initial_ttl",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let p = curve.evaluate(d)?;
    Ok((p * f64::from(initial_ttl)).ceil() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single_row(s_weights: &[(usize, f64)], n: usize) -> BenefitMatrix {
        BenefitMatrix::from_triplets(n, s_weights.iter().map(|&(j, b)| (0, j, b))).unwrap()
    }

    #[test]
    fn probability_examples() {
        let c4 = ProbabilityCurve::new(4.0).unwrap();
        assert_eq!(probability(&c4, 0.0).unwrap(), 0.0);
        assert_eq!(probability(&c4, 1.0).unwrap(), 0.5);
        let c10 = ProbabilityCurve::new(10.0).unwrap();
        let p = probability(&c10, 2.0).unwrap();
        assert!((p - 1024.0 / 1025.0).abs() < 1e-15);
        for alpha in [0.1, 0.5, 1.0, 3.0, 25.0] {
            let c = ProbabilityCurve::new(alpha).unwrap();
            assert_eq!(c.evaluate(1.0).unwrap(), 0.5);
            assert_eq!(c.evaluate(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn probability_rejects_bad_input() {
        let c = ProbabilityCurve::linear();
        assert!(matches!(c.evaluate(-1e-9), Err(Error::Domain { .. })));
        assert!(c.evaluate(f64::NAN).is_err());
        assert!(c.evaluate(f64::INFINITY).is_err());
        assert!(ProbabilityCurve::new(0.0).is_err());
        assert!(ProbabilityCurve::new(-2.0).is_err());
    }

    #[test]
    fn probability_saturates() {
        let c = ProbabilityCurve::linear();
        assert!(c.evaluate(1e6).unwrap() > 1.0 - 10.0 * 1e-6);
        assert!(c.evaluate(1e300).unwrap() <= 1.0);
    }

    #[test]
    fn utility_examples() {
        let c = ProbabilityCurve::linear();
        // S = 9 through a single partner contributing 3 at weight 3.
        let b = single_row(&[(1, 3.0)], 2);
        let d = ContributionProfile::new(vec![2.0, 3.0]).unwrap();
        assert!((utility(&c, &b, &d, 0).unwrap() - 4.0).abs() < 1e-12);

        let d0 = ContributionProfile::new(vec![0.0, 3.0]).unwrap();
        assert_eq!(utility(&c, &b, &d0, 0).unwrap(), 0.0);

        let zeros = ContributionProfile::zeros(2);
        assert_eq!(utility(&c, &b, &zeros, 0).unwrap(), 0.0);
        assert_eq!(utility(&c, &b, &zeros, 1).unwrap(), 0.0);
    }

    #[test]
    fn utility_matches_grid_maximum() {
        // Brute-force: at S = 9 the best contribution is 2 with utility 4.
        let c = ProbabilityCurve::linear();
        let (best_d, best_u) = (0..=200_000)
            .map(|k| k as f64 * 1e-4)
            .map(|d| (d, utility_at(&c, 9.0, d)))
            .fold((0.0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert!((best_d - 2.0).abs() < 1e-4);
        assert!((best_u - 4.0).abs() < 1e-8);
    }

    #[test]
    fn utility_errors() {
        let c = ProbabilityCurve::linear();
        let b = BenefitMatrix::homogeneous(3, 1.0).unwrap();
        let d = ContributionProfile::zeros(2);
        assert!(matches!(
            utility(&c, &b, &d, 0),
            Err(Error::DimensionMismatch { .. })
        ));
        let d = ContributionProfile::zeros(3);
        assert!(matches!(
            utility(&c, &b, &d, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn utility_goes_negative_for_huge_contribution() {
        let c = ProbabilityCurve::linear();
        let b = BenefitMatrix::homogeneous(4, 5.0).unwrap();
        let mut v = vec![3.0; 4];
        v[0] = 1e9;
        let d = ContributionProfile::new(v).unwrap();
        assert!(utility(&c, &b, &d, 0).unwrap() < 0.0);
    }

    #[test]
    fn gradient_examples() {
        let c = ProbabilityCurve::linear();
        let b = single_row(&[(1, 3.0)], 2);
        let d = ContributionProfile::new(vec![2.0, 3.0]).unwrap();
        assert!(utility_gradient(&c, &b, &d, 0).unwrap().abs() < 1e-15);

        let none = BenefitMatrix::from_triplets(2, []).unwrap();
        for di in [0.0, 0.3, 7.0] {
            let d = ContributionProfile::new(vec![di, 3.0]).unwrap();
            assert_eq!(utility_gradient(&c, &none, &d, 0).unwrap(), -1.0);
        }

        let half = ProbabilityCurve::new(0.5).unwrap();
        let d = ContributionProfile::new(vec![0.0, 3.0]).unwrap();
        assert!(matches!(
            utility_gradient(&half, &b, &d, 0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn participation_level_examples() {
        assert_eq!(participation_level(500.0, 100.0).unwrap(), 500.0);
        assert_eq!(participation_level(2000.0, 100.0).unwrap(), 1000.0);
        assert_eq!(participation_level(0.0, 50.0).unwrap(), 0.0);
        assert_eq!(participation_level(10.0, 0.0).unwrap(), 1000.0);
        assert!(participation_level(-1.0, 5.0).is_err());
        assert!(participation_level(1.0, -5.0).is_err());
    }

    #[test]
    fn scaled_ttl_examples() {
        let c = ProbabilityCurve::linear();
        assert_eq!(scaled_ttl(&c, 1.0, 7).unwrap(), 4);
        assert_eq!(scaled_ttl(&c, 1000.0, 7).unwrap(), 7);
        for alpha in [0.5, 1.0, 10.0] {
            let c = ProbabilityCurve::new(alpha).unwrap();
            assert_eq!(scaled_ttl(&c, 0.0, 7).unwrap(), 0);
        }
        assert!(scaled_ttl(&c, 1.0, 0).is_err());
    }

    #[test]
    fn matrix_rejects_bad_entries() {
        assert!(BenefitMatrix::from_triplets(2, [(0, 0, 1.0)]).is_err());
        assert!(BenefitMatrix::from_triplets(2, [(0, 1, -1.0)]).is_err());
        assert!(BenefitMatrix::from_triplets(2, [(0, 2, 1.0)]).is_err());
        assert!(BenefitMatrix::from_triplets(2, [(0, 1, 1.0), (0, 1, 2.0)]).is_err());
        // Zero diagonal is tolerated and dropped.
        let m = BenefitMatrix::from_triplets(2, [(1, 1, 0.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn row_and_average_benefit() {
        let m = BenefitMatrix::from_triplets(3, [(0, 1, 1.0), (0, 2, 2.0), (2, 0, 3.0)]).unwrap();
        assert_eq!(m.row_benefit(0), 3.0);
        assert_eq!(m.row_benefit(1), 0.0);
        assert_eq!(m.row_benefit(2), 3.0);
        assert_eq!(m.average_benefit(), 2.0);
        let h = BenefitMatrix::homogeneous(5, 1.5).unwrap();
        assert_eq!(h.average_benefit(), 6.0);
        assert!((0..5).all(|i| h.get(i, i) == 0.0));
    }

    #[test]
    fn dimensional_conversion() {
        let p = DimensionalParams::new(20.0, 0.5).unwrap();
        assert_eq!(p.contribution(60.0).unwrap(), 3.0);
        assert_eq!(p.benefit(2.0).unwrap(), 4.0);
        assert_eq!(p.utility(10.0), 1.0);
        assert!(DimensionalParams::new(0.0, 1.0).is_err());
        assert!(DimensionalParams::new(1.0, -1.0).is_err());
        assert!(p.contribution(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn probability_is_strictly_increasing(alpha in 0.1f64..12.0, a in 0.0f64..20.0, gap in 1e-3f64..5.0) {
            let c = ProbabilityCurve::new(alpha).unwrap();
            let lo = c.evaluate(a).unwrap();
            let hi = c.evaluate(a + gap).unwrap();
            // Strict unless both values have rounded into the saturated tail.
            prop_assert!(hi > lo || 1.0 - lo < 1e-12);
            prop_assert!((0.0..=1.0).contains(&lo));
        }

        #[test]
        fn zero_contribution_has_zero_utility(alpha in 0.1f64..12.0, others in proptest::collection::vec(0.0f64..50.0, 1..8), w in 0.0f64..10.0) {
            let c = ProbabilityCurve::new(alpha).unwrap();
            let n = others.len() + 1;
            let b = BenefitMatrix::from_triplets(n, (1..n).map(|j| (0, j, w))).unwrap();
            let mut v = vec![0.0];
            v.extend(others);
            let d = ContributionProfile::new(v).unwrap();
            prop_assert_eq!(utility(&c, &b, &d, 0).unwrap(), 0.0);
        }

        #[test]
        fn gradient_matches_central_difference(alpha in 0.5f64..10.0, s in 0.0f64..100.0, d in 0.1f64..50.0) {
            let c = ProbabilityCurve::new(alpha).unwrap();
            let b = single_row(&[(1, 1.0)], 2);
            let profile = ContributionProfile::new(vec![d, s]).unwrap();
            let g = utility_gradient(&c, &b, &profile, 0).unwrap();
            let h = 1e-5 * d;
            let fd = (utility_at(&c, s, d + h) - utility_at(&c, s, d - h)) / (2.0 * h);
            let scale = 1.0 + (s * c.derivative(d).unwrap()).abs();
            prop_assert!((fd - g).abs() <= 1e-6 * scale, "fd={fd} g={g}");
        }

        #[test]
        fn power_of_two_rescaling_is_exact(raw in proptest::collection::vec(0.0f64..100.0, 6), costs in proptest::collection::vec(0.01f64..10.0, 3), k in -20i32..20) {
            let factor = 2f64.powi(k);
            let trip = |scale: f64| {
                let mut t = Vec::new();
                let mut it = raw.iter();
                for i in 0..3 {
                    for j in 0..3 {
                        if i != j {
                            t.push((i, j, it.next().unwrap() * scale));
                        }
                    }
                }
                t
            };
            let scaled_costs: Vec<f64> = costs.iter().map(|c| c * factor).collect();
            let a = BenefitMatrix::from_raw(3, trip(1.0), &costs).unwrap();
            let b = BenefitMatrix::from_raw(3, trip(factor), &scaled_costs).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
