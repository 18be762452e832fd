//! Scalar free-probability calculus: truncated cumulant sequences, the
//! moment-cumulant transforms over non-crossing partitions, joint moments of
//! free families, semicircle recognition, and free central-limit scaling.

use crate::coeff::{rat_int, Rat, Scalar};
use crate::nc::{enumerate_nc, kernel_partition, mobius_to_top, NcError};
use num::One;

/// Errors from cumulant-engine operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CumulantError {
    #[error("truncation order must be at least {min}, got {got}")]
    OrderTooSmall { got: usize, min: usize },
    #[error("order {requested} exceeds truncation order {order}")]
    TruncationExceeded { requested: usize, order: usize },
    #[error("variable index {index} out of range for a family of {count}")]
    VariableOutOfRange { index: usize, count: usize },
    #[error("family is flagged identically distributed but specs differ")]
    NotIdentical,
    #[error("spec is not centered (first cumulant is nonzero)")]
    NotCentered,
    #[error("count {0} is not a positive perfect square")]
    NotPerfectSquare(u64),
    #[error(transparent)]
    Nc(#[from] NcError),
}

/// A distribution given by its free cumulants `kappa_1 .. kappa_N`.
///
/// The truncation order `N` is explicit state: every operation that would
/// need a cumulant past it fails loudly instead of extending the sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionSpec {
    kappa: Vec<Scalar>,
}

impl DistributionSpec {
    /// Wraps `kappa_1 .. kappa_N`; requires `N >= 2`.
    pub fn new(kappa: Vec<Scalar>) -> Result<DistributionSpec, CumulantError> {
        if kappa.len() < 2 {
            return Err(CumulantError::OrderTooSmall {
                got: kappa.len(),
                min: 2,
            });
        }
        Ok(DistributionSpec { kappa })
    }

    /// The semicircular spec: `kappa_1 = mean`, `kappa_2 = variance`, all
    /// higher cumulants zero up to `order`.
    pub fn semicircular(
        mean: Scalar,
        variance: Scalar,
        order: usize,
    ) -> Result<DistributionSpec, CumulantError> {
        let mut kappa = vec![Scalar::zero(); order.max(2)];
        kappa[0] = mean;
        kappa[1] = variance;
        let mut spec = DistributionSpec::new(kappa)?;
        spec.kappa.truncate(order.max(2));
        if order < 2 {
            return Err(CumulantError::OrderTooSmall { got: order, min: 2 });
        }
        Ok(spec)
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.kappa.len()
    }

    /// The cumulant `kappa_n`, one-based.
    pub fn kappa(&self, n: usize) -> Result<&Scalar, CumulantError> {
        if n == 0 || n > self.order() {
            return Err(CumulantError::TruncationExceeded {
                requested: n,
                order: self.order(),
            });
        }
        Ok(&self.kappa[n - 1])
    }
}

/// A family of freely independent variables, given intensionally: marginal
/// cumulants per variable plus the convention that mixed free cumulants
/// vanish. `identical` additionally records that all marginals agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeFamilySpec {
    specs: Vec<DistributionSpec>,
    identical: bool,
}

impl FreeFamilySpec {
    pub fn new(specs: Vec<DistributionSpec>, identical: bool) -> Result<FreeFamilySpec, CumulantError> {
        if specs.is_empty() {
            return Err(CumulantError::OrderTooSmall { got: 0, min: 1 });
        }
        if identical && specs.windows(2).any(|w| w[0] != w[1]) {
            return Err(CumulantError::NotIdentical);
        }
        Ok(FreeFamilySpec { specs, identical })
    }

    /// `count` copies of one spec, flagged identically distributed.
    pub fn identical(spec: DistributionSpec, count: usize) -> Result<FreeFamilySpec, CumulantError> {
        FreeFamilySpec::new(vec![spec; count.max(1)], true)
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn is_identical(&self) -> bool {
        self.identical
    }

    pub fn spec(&self, i: usize) -> Result<&DistributionSpec, CumulantError> {
        self.specs.get(i).ok_or(CumulantError::VariableOutOfRange {
            index: i,
            count: self.specs.len(),
        })
    }
}

/// Moments `m_1 .. m_m` from cumulants: `m_k` is the sum over non-crossing
/// partitions of `{1, .., k}` of the product of block cumulants.
///
/// ```
/// use qbernstein::coeff::Scalar;
/// use qbernstein::cumulant::{moments_from_cumulants, DistributionSpec};
///
/// let std_semicircle = DistributionSpec::semicircular(Scalar::zero(), Scalar::one(), 6).unwrap();
/// let m: Vec<String> = moments_from_cumulants(&std_semicircle, 6)
///     .unwrap()
///     .iter()
///     .map(|s| s.to_string())
///     .collect();
/// assert_eq!(m, ["0", "1", "0", "2", "0", "5"]);
/// ```
pub fn moments_from_cumulants(
    spec: &DistributionSpec,
    m: usize,
) -> Result<Vec<Scalar>, CumulantError> {
    if m > spec.order() {
        return Err(CumulantError::TruncationExceeded {
            requested: m,
            order: spec.order(),
        });
    }
    let mut out = Vec::with_capacity(m);
    for k in 1..=m {
        let mut moment = Scalar::zero();
        for pi in enumerate_nc(k)? {
            let mut term = Scalar::one();
            for block in pi.blocks() {
                term = term.mul(spec.kappa(block.len())?);
            }
            moment = moment.add(&term);
        }
        out.push(moment);
    }
    Ok(out)
}

/// Cumulants from moments `m_1 .. m_N` by Möbius inversion over the
/// non-crossing lattice: `kappa_n` sums `m_pi * mu(pi, top)` over `pi` in
/// `NC(n)`, where `m_pi` is the product of block moments. Exact inverse of
/// [`moments_from_cumulants`].
pub fn cumulants_from_moments(moments: &[Scalar]) -> Result<DistributionSpec, CumulantError> {
    let mut kappa = Vec::with_capacity(moments.len());
    for n in 1..=moments.len() {
        let mut value = Scalar::zero();
        for pi in enumerate_nc(n)? {
            let mut term = Scalar::one();
            for block in pi.blocks() {
                term = term.mul(&moments[block.len() - 1]);
            }
            value = value.add(&term.mul_rat(&mobius_to_top(&pi)?));
        }
        kappa.push(value);
    }
    DistributionSpec::new(kappa)
}

/// The joint moment of a word in a free family.
///
/// Freeness enters as the vanishing of mixed cumulants: the sum runs over
/// non-crossing partitions refining the kernel of the word, and each block
/// contributes the marginal cumulant of its (single) variable.
///
/// ```
/// use qbernstein::coeff::Scalar;
/// use qbernstein::cumulant::{joint_free_moment, DistributionSpec, FreeFamilySpec};
///
/// let s = DistributionSpec::semicircular(Scalar::zero(), Scalar::one(), 4).unwrap();
/// let family = FreeFamilySpec::identical(s, 2).unwrap();
/// assert!(joint_free_moment(&family, &[0, 1, 0, 1]).unwrap().is_zero());
/// assert_eq!(joint_free_moment(&family, &[0, 1, 1, 0]).unwrap(), Scalar::one());
/// ```
pub fn joint_free_moment(
    family: &FreeFamilySpec,
    word: &[usize],
) -> Result<Scalar, CumulantError> {
    for &i in word {
        if i >= family.len() {
            return Err(CumulantError::VariableOutOfRange {
                index: i,
                count: family.len(),
            });
        }
    }
    for i in 0..family.len() {
        let multiplicity = word.iter().filter(|&&j| j == i).count();
        if multiplicity > family.spec(i)?.order() {
            return Err(CumulantError::TruncationExceeded {
                requested: multiplicity,
                order: family.spec(i)?.order(),
            });
        }
    }
    let ker = kernel_partition(word);
    let mut total = Scalar::zero();
    for pi in enumerate_nc(word.len())? {
        if !pi.refines(&ker)? {
            continue;
        }
        let mut term = Scalar::one();
        for block in pi.blocks() {
            let variable = word[block[0]];
            term = term.mul(family.spec(variable)?.kappa(block.len())?);
        }
        total = total.add(&term);
    }
    Ok(total)
}

/// Whether all cumulants of order 3 and above vanish, together with the mean
/// and variance. Requires truncation order at least 3 so the answer is not
/// vacuous.
pub fn is_semicircular(
    spec: &DistributionSpec,
) -> Result<(bool, Scalar, Scalar), CumulantError> {
    if spec.order() < 3 {
        return Err(CumulantError::OrderTooSmall {
            got: spec.order(),
            min: 3,
        });
    }
    let flat = (3..=spec.order()).all(|n| spec.kappa[n - 1].is_zero());
    Ok((flat, spec.kappa[0].clone(), spec.kappa[1].clone()))
}

fn integer_sqrt(count: u64) -> Option<u64> {
    let mut s = (count as f64).sqrt() as u64;
    while s * s > count {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= count {
        s += 1;
    }
    (s * s == count).then_some(s)
}

/// Cumulants of `(a_1 + .. + a_count) / sqrt(count)` for `count` free copies
/// of a centered spec: `kappa_n` picks up the factor `count^(1 - n/2)`.
/// `count` must be a positive perfect square so the factor stays rational.
///
/// ```
/// use qbernstein::coeff::{rat, Scalar};
/// use qbernstein::cumulant::{clt_scaled_spec, DistributionSpec};
///
/// let spec = DistributionSpec::new(vec![
///     Scalar::zero(),
///     Scalar::one(),
///     Scalar::one(),
///     Scalar::one(),
/// ])
/// .unwrap();
/// let scaled = clt_scaled_spec(&spec, 4).unwrap();
/// assert_eq!(scaled.kappa(3).unwrap(), &Scalar::from_rat(rat(1, 2)));
/// assert_eq!(scaled.kappa(4).unwrap(), &Scalar::from_rat(rat(1, 4)));
/// ```
pub fn clt_scaled_spec(
    spec: &DistributionSpec,
    count: u64,
) -> Result<DistributionSpec, CumulantError> {
    if !spec.kappa[0].is_zero() {
        return Err(CumulantError::NotCentered);
    }
    let s = match count {
        0 => return Err(CumulantError::NotPerfectSquare(0)),
        c => integer_sqrt(c).ok_or(CumulantError::NotPerfectSquare(c))?,
    };
    let root = rat_int(s as i64);
    let mut kappa = Vec::with_capacity(spec.order());
    for n in 1..=spec.order() {
        // count^(1 - n/2) = s^(2 - n)
        let factor = if n <= 2 {
            let mut f = Rat::one();
            for _ in 0..(2 - n) {
                f *= &root;
            }
            f
        } else {
            let mut f = Rat::one();
            for _ in 0..(n - 2) {
                f *= &root;
            }
            f.recip()
        };
        kappa.push(spec.kappa[n - 1].mul_rat(&factor));
    }
    DistributionSpec::new(kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;
    use num::Signed;

    fn rational_spec(values: &[(i64, i64)]) -> DistributionSpec {
        DistributionSpec::new(values.iter().map(|&(n, d)| Scalar::from_rat(rat(n, d))).collect())
            .unwrap()
    }

    #[test]
    fn first_moments_in_mean_and_variance() {
        let a = Scalar::param("a").unwrap();
        let b = Scalar::param("b").unwrap();
        let spec =
            DistributionSpec::new(vec![a.clone(), b.clone(), Scalar::zero(), Scalar::zero()])
                .unwrap();
        let m = moments_from_cumulants(&spec, 3).unwrap();
        assert_eq!(m[0], a);
        assert_eq!(m[1], a.mul(&a).add(&b));
        let expected_m3 = a.mul(&a).mul(&a).add(&a.mul(&b).mul_rat(&rat_int(3)));
        assert_eq!(m[2], expected_m3);
    }

    #[test]
    fn zero_cumulants_give_zero_moments() {
        let spec = DistributionSpec::new(vec![Scalar::zero(); 6]).unwrap();
        assert!(moments_from_cumulants(&spec, 6).unwrap().iter().all(Scalar::is_zero));
        assert!(matches!(
            moments_from_cumulants(&spec, 7),
            Err(CumulantError::TruncationExceeded { .. })
        ));
    }

    #[test]
    fn moment_cumulant_round_trip() {
        let fixtures = vec![
            rational_spec(&[(0, 1), (1, 1), (0, 1), (0, 1), (0, 1), (0, 1)]),
            rational_spec(&[(3, 1), (2, 1), (-1, 2), (5, 3), (0, 1), (7, 4), (1, 6), (-2, 9)]),
            rational_spec(&[(1, 7), (-3, 5)]),
            DistributionSpec::new(vec![
                Scalar::param("k{1}").unwrap(),
                Scalar::param("k{2}").unwrap(),
                Scalar::param("k{3}").unwrap(),
                Scalar::param("k{4}").unwrap(),
            ])
            .unwrap(),
        ];
        for spec in fixtures {
            let moments = moments_from_cumulants(&spec, spec.order()).unwrap();
            let back = cumulants_from_moments(&moments).unwrap();
            assert_eq!(back, spec);
        }
    }

    #[test]
    fn point_mass_cumulants_telescope() {
        let c = Scalar::param("c").unwrap();
        let mut moments = Vec::new();
        let mut power = Scalar::one();
        for _ in 0..6 {
            power = power.mul(&c);
            moments.push(power.clone());
        }
        let spec = cumulants_from_moments(&moments).unwrap();
        assert_eq!(spec.kappa(1).unwrap(), &c);
        for n in 2..=6 {
            assert!(spec.kappa(n).unwrap().is_zero(), "kappa_{n}");
        }
    }

    #[test]
    fn joint_moment_on_constant_words_matches_marginal() {
        let spec = rational_spec(&[(1, 2), (2, 1), (1, 3), (0, 1), (5, 1), (1, 1)]);
        let family = FreeFamilySpec::new(
            vec![spec.clone(), rational_spec(&[(0, 1), (1, 1), (0, 1), (0, 1), (0, 1), (0, 1)])],
            false,
        )
        .unwrap();
        let marginal = moments_from_cumulants(&spec, 6).unwrap();
        for k in 1..=6 {
            let word = vec![0usize; k];
            assert_eq!(joint_free_moment(&family, &word).unwrap(), marginal[k - 1]);
        }
    }

    #[test]
    fn alternating_words_see_only_mixed_vanishing() {
        let s = DistributionSpec::semicircular(Scalar::zero(), Scalar::one(), 4).unwrap();
        let family = FreeFamilySpec::identical(s, 2).unwrap();
        assert!(joint_free_moment(&family, &[0, 1, 0, 1]).unwrap().is_zero());
        let a = Scalar::param("a").unwrap();
        let b = Scalar::param("b").unwrap();
        let centered = |v: &Scalar| {
            DistributionSpec::new(vec![Scalar::zero(), v.clone(), Scalar::zero(), Scalar::zero()])
                .unwrap()
        };
        let family = FreeFamilySpec::new(vec![centered(&a), centered(&b)], false).unwrap();
        assert_eq!(joint_free_moment(&family, &[0, 1, 1, 0]).unwrap(), a.mul(&b));
        assert!(matches!(
            joint_free_moment(&family, &[0, 2]),
            Err(CumulantError::VariableOutOfRange { .. })
        ));
        assert!(matches!(
            joint_free_moment(&family, &[0, 0, 0, 0, 0]),
            Err(CumulantError::TruncationExceeded { .. })
        ));
    }

    #[test]
    fn semicircle_recognition() {
        let spec = DistributionSpec::semicircular(Scalar::zero(), Scalar::one(), 6).unwrap();
        assert_eq!(
            is_semicircular(&spec).unwrap(),
            (true, Scalar::zero(), Scalar::one())
        );
        let spec = rational_spec(&[(0, 1), (1, 1), (1, 1), (0, 1)]);
        assert!(!is_semicircular(&spec).unwrap().0);
        let spec = rational_spec(&[(3, 1), (2, 1), (0, 1), (0, 1)]);
        let (flat, mean, variance) = is_semicircular(&spec).unwrap();
        assert!(flat);
        assert_eq!(mean, Scalar::from_int(3));
        assert_eq!(variance, Scalar::from_int(2));
        assert!(matches!(
            is_semicircular(&rational_spec(&[(0, 1), (1, 1)])),
            Err(CumulantError::OrderTooSmall { .. })
        ));
    }

    #[test]
    fn clt_scaling_rules() {
        let spec = rational_spec(&[(0, 1), (1, 1), (1, 1), (1, 1)]);
        assert_eq!(clt_scaled_spec(&spec, 1).unwrap(), spec);
        let scaled = clt_scaled_spec(&spec, 4).unwrap();
        assert_eq!(scaled, rational_spec(&[(0, 1), (1, 1), (1, 2), (1, 4)]));
        let via_36 = clt_scaled_spec(&spec, 36).unwrap();
        let via_4_then_9 = clt_scaled_spec(&clt_scaled_spec(&spec, 4).unwrap(), 9).unwrap();
        assert_eq!(via_36, via_4_then_9);
        assert!(matches!(
            clt_scaled_spec(&spec, 2),
            Err(CumulantError::NotPerfectSquare(2))
        ));
        assert!(matches!(
            clt_scaled_spec(&spec, 0),
            Err(CumulantError::NotPerfectSquare(0))
        ));
        let shifted = rational_spec(&[(1, 1), (1, 1)]);
        assert!(matches!(
            clt_scaled_spec(&shifted, 4),
            Err(CumulantError::NotCentered)
        ));
    }

    #[test]
    fn clt_moments_approach_semicircle() {
        let spec = rational_spec(&[(0, 1), (1, 1), (1, 1), (2, 1), (1, 1), (3, 1)]);
        let semicircle = [rat_int(0), rat_int(1), rat_int(0), rat_int(2), rat_int(0), rat_int(5)];
        let mut previous_gap: Option<Rat> = None;
        for count in [100u64, 10_000, 1_000_000] {
            let scaled = clt_scaled_spec(&spec, count).unwrap();
            let moments = moments_from_cumulants(&scaled, 6).unwrap();
            let gap = moments
                .iter()
                .zip(&semicircle)
                .map(|(m, s)| (m.as_rational().unwrap() - s).abs())
                .max()
                .unwrap();
            if let Some(prev) = previous_gap {
                assert!(gap < prev);
            }
            previous_gap = Some(gap.clone());
            if count == 1_000_000 {
                assert!(gap <= rat(1, 100), "gap {gap}");
            }
        }
    }

    #[test]
    fn fourth_clt_moment_is_exact_in_count() {
        let kappa4 = rat(7, 3);
        let spec = DistributionSpec::new(vec![
            Scalar::zero(),
            Scalar::one(),
            Scalar::zero(),
            Scalar::from_rat(kappa4.clone()),
        ])
        .unwrap();
        for count in [4u64, 100, 10_000] {
            let scaled = clt_scaled_spec(&spec, count).unwrap();
            let m4 = moments_from_cumulants(&scaled, 4).unwrap()[3]
                .as_rational()
                .unwrap();
            assert_eq!(m4, rat_int(2) + &kappa4 / rat_int(count as i64));
        }
    }

    #[test]
    fn family_validation() {
        let s = rational_spec(&[(0, 1), (1, 1)]);
        let t = rational_spec(&[(0, 1), (2, 1)]);
        assert!(FreeFamilySpec::new(vec![s.clone(), t.clone()], true).is_err());
        assert!(FreeFamilySpec::new(vec![s.clone(), t], false).is_ok());
        assert!(FreeFamilySpec::new(vec![], false).is_err());
        assert!(DistributionSpec::new(vec![Scalar::one()]).is_err());
        let fam = FreeFamilySpec::identical(s, 3).unwrap();
        assert!(fam.is_identical());
        assert_eq!(fam.len(), 3);
    }
}
