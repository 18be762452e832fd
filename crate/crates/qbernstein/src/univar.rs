//! Univariate polynomials over exact rationals: division, gcd, square-free
//! parts, rational roots, and Sturm real-root counting.
//!
//! The point of this module is to decide, exactly, whether every real root of
//! a rational polynomial is rational, and if so to list them. When that
//! cannot be guaranteed the caller gets a refusal, never an approximation.

use crate::coeff::Rat;
use num::bigint::{BigInt, BigUint};
use num::{Integer, One, Signed, Zero};
use std::fmt;

/// Errors from univariate polynomial analysis.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UnivarError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("the zero polynomial has no root set")]
    ZeroPolynomial,
    #[error("{count} real roots are not rational; exact root listing refused")]
    PossiblyIrrational { count: usize },
}

/// A univariate polynomial with rational coefficients, stored dense in
/// ascending degree with no trailing zero.
///
/// ```
/// use qbernstein::univar::UniPoly;
///
/// let p = UniPoly::from_int_coeffs(&[0, 0, 0, 0, 1, 0, -1]); // t^4 - t^6
/// let roots = p.real_roots_exact().unwrap();
/// let as_text: Vec<String> = roots.iter().map(|r| r.to_string()).collect();
/// assert_eq!(as_text, ["-1", "0", "1"]);
/// ```
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> UniPoly {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> UniPoly {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn from_int_coeffs(coeffs: &[i64]) -> UniPoly {
        UniPoly::new(coeffs.iter().map(|&c| Rat::from_integer(c.into())).collect())
    }

    /// The monomial `c * t^k`.
    pub fn monomial(c: Rat, k: usize) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        UniPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new((0..len).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                coeffs[a + b] += ca * cb;
            }
        }
        UniPoly::new(coeffs)
    }

    pub fn scale(&self, factor: &Rat) -> UniPoly {
        if factor.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rat::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly), UnivarError> {
        let d_deg = divisor.degree().ok_or(UnivarError::DivisionByZero)?;
        let lead = divisor.leading().expect("nonzero divisor").clone();
        let mut remainder = self.coeffs.clone();
        let mut quotient = vec![Rat::zero(); self.coeffs.len().saturating_sub(d_deg)];
        while remainder.len() > d_deg {
            let r_deg = remainder.len() - 1;
            let factor = remainder.last().expect("nonempty") / &lead;
            quotient[r_deg - d_deg] = factor.clone();
            for k in 0..=d_deg {
                let delta = &factor * &divisor.coeffs[k];
                remainder[r_deg - d_deg + k] -= delta;
            }
            while remainder.last().is_some_and(Rat::is_zero) {
                remainder.pop();
            }
            if remainder.len() > r_deg {
                unreachable!("remainder degree must drop");
            }
        }
        Ok((UniPoly::new(quotient), UniPoly::new(remainder)))
    }

    fn monic(&self) -> UniPoly {
        match self.leading() {
            None => UniPoly::zero(),
            Some(lead) => self.scale(&lead.recip()),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// The product of the distinct irreducible factors: `self / gcd(self, self')`.
    pub fn squarefree_part(&self) -> Result<UniPoly, UnivarError> {
        if self.is_zero() {
            return Err(UnivarError::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative());
        let (q, r) = self.divmod(&g)?;
        debug_assert!(r.is_zero());
        Ok(q.monic())
    }

    /// All distinct rational roots, ascending, by the rational-root theorem
    /// on the primitive integer form.
    pub fn rational_roots(&self) -> Result<Vec<Rat>, UnivarError> {
        if self.is_zero() {
            return Err(UnivarError::ZeroPolynomial);
        }
        let mut p = self.clone();
        let mut roots = Vec::new();
        if p.coeff(0).is_zero() {
            roots.push(Rat::zero());
            while p.coeff(0).is_zero() && p.degree() > Some(0) {
                p = UniPoly::new(p.coeffs[1..].to_vec());
            }
        }
        if p.degree() == Some(0) || p.is_zero() {
            roots.sort();
            return Ok(roots);
        }
        let ints = p.primitive_integer_coeffs();
        let head = ints.first().expect("nonzero constant term").magnitude().clone();
        let tail = ints.last().expect("nonzero leading term").magnitude().clone();
        for num in divisors(&head) {
            for den in divisors(&tail) {
                for sign in [1i64, -1] {
                    let candidate = Rat::new(
                        BigInt::from(sign) * BigInt::from(num.clone()),
                        BigInt::from(den.clone()),
                    );
                    if p.eval(&candidate).is_zero() && !roots.contains(&candidate) {
                        roots.push(candidate);
                    }
                }
            }
        }
        roots.sort();
        Ok(roots)
    }

    fn primitive_integer_coeffs(&self) -> Vec<BigInt> {
        let mut denominator_lcm = BigInt::one();
        for c in &self.coeffs {
            denominator_lcm = denominator_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * &denominator_lcm / c.denom())
            .collect();
        let mut content = BigInt::zero();
        for v in &ints {
            content = content.gcd(v);
        }
        ints.into_iter().map(|v| v / &content).collect()
    }

    /// Number of distinct real roots, by Sturm sign-variation counting on the
    /// square-free part over the whole real line.
    pub fn count_real_roots(&self) -> Result<usize, UnivarError> {
        let s = self.squarefree_part()?;
        if s.degree() == Some(0) {
            return Ok(0);
        }
        let mut chain = vec![s.clone(), s.derivative()];
        loop {
            let last = &chain[chain.len() - 1];
            if last.is_zero() {
                chain.pop();
                break;
            }
            let prev = &chain[chain.len() - 2];
            let (_, r) = prev.divmod(last)?;
            chain.push(r.neg());
        }
        let variations = |at_positive_infinity: bool| {
            let mut count = 0;
            let mut previous: Option<bool> = None;
            for poly in &chain {
                let lead = poly.leading().expect("chain entries are nonzero");
                let mut positive = lead.is_positive();
                if !at_positive_infinity && poly.degree().unwrap_or(0) % 2 == 1 {
                    positive = !positive;
                }
                if let Some(prev) = previous {
                    if prev != positive {
                        count += 1;
                    }
                }
                previous = Some(positive);
            }
            count
        };
        Ok(variations(false) - variations(true))
    }

    /// The complete set of real roots, exactly, when that set is provably all
    /// rational: rational roots are found and deflated, and the remaining
    /// factor must have Sturm count zero; otherwise the listing is refused.
    pub fn real_roots_exact(&self) -> Result<Vec<Rat>, UnivarError> {
        let s = self.squarefree_part()?;
        let roots = s.rational_roots()?;
        let mut remainder = s;
        for r in &roots {
            let linear = UniPoly::new(vec![-r.clone(), Rat::one()]);
            let (q, rem) = remainder.divmod(&linear)?;
            debug_assert!(rem.is_zero());
            remainder = q;
        }
        if remainder.degree().unwrap_or(0) > 0 {
            let count = remainder.count_real_roots()?;
            if count > 0 {
                return Err(UnivarError::PossiblyIrrational { count });
            }
        }
        Ok(roots)
    }
}

fn divisors(n: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut k = BigUint::one();
    while &k * &k <= *n {
        if (n % &k).is_zero() {
            out.push(k.clone());
            out.push(n / &k);
        }
        k += BigUint::one();
    }
    out
}

impl fmt::Display for UniPoly {
    /// Descending powers of `t`, e.g. `t^4 - t^6` prints as `-t^6 + t^4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
                first = false;
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mag = c.abs();
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("t")?,
                (1, false) => write!(f, "{mag} t")?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{mag} t^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, rat_int};

    fn linear(root: &Rat) -> UniPoly {
        UniPoly::new(vec![-root.clone(), Rat::one()])
    }

    #[test]
    fn division_invariant() {
        let p = UniPoly::from_int_coeffs(&[3, -2, 0, 1, 5]);
        let d = UniPoly::from_int_coeffs(&[1, 4, 2]);
        let (q, r) = p.divmod(&d).unwrap();
        assert_eq!(q.mul(&d).add(&r), p);
        assert!(r.degree() < d.degree());
        assert!(p.divmod(&UniPoly::zero()).is_err());
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = linear(&rat_int(2));
        let b = linear(&rat(-1, 3));
        let p = a.mul(&a).mul(&b);
        let g = p.gcd(&p.derivative());
        assert_eq!(g, a.monic());
        assert_eq!(p.squarefree_part().unwrap(), a.mul(&b).monic());
        assert!(UniPoly::zero().squarefree_part().is_err());
    }

    #[test]
    fn rational_roots_of_shrink_targets() {
        for n in [1usize, 2, 3, 4, 6] {
            // t^n - t^(n+2) = t^n (1 - t^2)
            let p = UniPoly::monomial(rat_int(1), n).sub(&UniPoly::monomial(rat_int(1), n + 2));
            let roots = p.real_roots_exact().unwrap();
            assert_eq!(roots, vec![rat_int(-1), rat_int(0), rat_int(1)], "n = {n}");
        }
    }

    #[test]
    fn rational_roots_with_denominators() {
        let p = linear(&rat(2, 3)).mul(&linear(&rat(-5, 7))).mul(&linear(&rat(2, 3)));
        let mut expected = vec![rat(-5, 7), rat(2, 3)];
        expected.sort();
        assert_eq!(p.rational_roots().unwrap(), expected);
    }

    #[test]
    fn sturm_counts_on_known_factorizations() {
        let no_real = UniPoly::from_int_coeffs(&[1, 0, 1]); // t^2 + 1
        assert_eq!(no_real.count_real_roots().unwrap(), 0);
        assert_eq!(no_real.real_roots_exact().unwrap(), Vec::<Rat>::new());
        let two_real = UniPoly::from_int_coeffs(&[-2, 0, 1]); // t^2 - 2
        assert_eq!(two_real.count_real_roots().unwrap(), 2);
        assert!(matches!(
            two_real.real_roots_exact(),
            Err(UnivarError::PossiblyIrrational { count: 2 })
        ));
        // A rational root does not excuse the irrational pair.
        let mixed = two_real.mul(&linear(&rat_int(1)));
        assert!(matches!(
            mixed.real_roots_exact(),
            Err(UnivarError::PossiblyIrrational { count: 2 })
        ));
    }

    #[test]
    fn sturm_matches_constructed_root_counts() {
        // Deterministic pseudo-random products of rational linear factors and
        // copies of t^2 + 1, so the real-root count is known by construction.
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move |bound: u64| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state % bound
        };
        let quadratic = UniPoly::from_int_coeffs(&[1, 0, 1]);
        for _ in 0..50 {
            let linear_count = next(5) as usize;
            let quad_count = (next(3) as usize).min((8 - 2 * linear_count.min(4)) / 2);
            let mut roots = Vec::new();
            let mut p = UniPoly::from_int_coeffs(&[1]);
            for _ in 0..linear_count {
                let numerator = next(9) as i64 - 4;
                let denominator = next(3) as i64 + 1;
                let root = rat(numerator, denominator);
                if !roots.contains(&root) {
                    roots.push(root.clone());
                }
                p = p.mul(&linear(&root));
            }
            for _ in 0..quad_count {
                p = p.mul(&quadratic);
            }
            if p.degree() == Some(0) {
                continue;
            }
            assert_eq!(p.count_real_roots().unwrap(), roots.len(), "p = {p}");
            // Sign changes on a sampling grid can only find roots, never
            // invent them.
            let mut sign_changes = 0;
            let mut prev_sign: Option<bool> = None;
            for step in -60..=60 {
                let x = rat(step, 10);
                let v = p.eval(&x);
                if v.is_zero() {
                    prev_sign = None;
                    continue;
                }
                let s = v.is_positive();
                if prev_sign == Some(!s) {
                    sign_changes += 1;
                }
                prev_sign = Some(s);
            }
            assert!(sign_changes <= roots.len(), "p = {p}");
        }
    }

    #[test]
    fn display_round_trip_examples() {
        let p = UniPoly::monomial(rat_int(1), 4).sub(&UniPoly::monomial(rat_int(1), 6));
        assert_eq!(p.to_string(), "-t^6 + t^4");
        assert_eq!(UniPoly::from_int_coeffs(&[-2, 1]).to_string(), "t - 2");
        assert_eq!(UniPoly::from_int_coeffs(&[0, 0, 3]).to_string(), "3 t^2");
        assert_eq!(UniPoly::zero().to_string(), "0");
        let half = UniPoly::new(vec![rat(1, 2)]);
        assert_eq!(half.to_string(), "1/2");
    }

    #[test]
    fn evaluation_uses_horner_exactly() {
        let p = UniPoly::from_int_coeffs(&[1, -3, 0, 2]);
        let x = rat(5, 4);
        let expected = rat_int(2) * &x * &x * &x - rat_int(3) * &x + rat_int(1);
        assert_eq!(p.eval(&x), expected);
    }
}
