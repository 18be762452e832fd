//! Exact coefficient ring: rationals times Laurent monomials in named parameters.
//!
//! A [`Scalar`] is a finite sum of terms `rational * parameter-monomial`, e.g.
//! `3/2 k{4,1}^2 + 1`. Parameter names are shared strings; monomials compare by
//! parameter name so that canonical printing is identical across processes.
//! Negative exponents are representable everywhere, but evaluation rejects a
//! zero value raised to a negative power, and the proof layer only ever divides
//! by parameters that were explicitly declared nonzero.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Exact rational number used everywhere in the crate.
pub type Rat = BigRational;

/// Builds a rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Builds a rational from numerator and denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Errors from coefficient construction and evaluation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffError {
    #[error("invalid parameter name {0:?}")]
    InvalidParamName(String),
    #[error("no value assigned to parameter {0}")]
    MissingParam(String),
    #[error("parameter {0} evaluates to zero but appears with a negative exponent")]
    ZeroToNegativePower(String),
}

/// A named commuting parameter, e.g. `k{4,1}`.
///
/// Names start with an ASCII letter and continue with letters, digits, `_`,
/// `,` or balanced `{`/`}` (commas only inside braces). Equality, ordering and
/// hashing all follow the name, so values behave identically in any process.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Param(Arc<str>);

impl Param {
    pub fn new(name: &str) -> Result<Param, CoeffError> {
        if !valid_param_name(name) {
            return Err(CoeffError::InvalidParamName(name.to_string()));
        }
        Ok(Param(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Param({})", self.0)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn valid_param_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    let mut depth: i32 = 0;
    for c in name.chars().skip(1) {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            ',' => {
                if depth == 0 {
                    return false;
                }
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {}
            _ => return false,
        }
    }
    depth == 0
}

/// A monomial in the parameters with integer (possibly negative) exponents.
///
/// The empty monomial is the unit. Exponents are never stored as zero.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ParamMono(BTreeMap<Param, i64>);

impl ParamMono {
    pub fn unit() -> ParamMono {
        ParamMono::default()
    }

    pub fn var(p: Param) -> ParamMono {
        ParamMono::from_powers(vec![(p, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Param, i64)>) -> ParamMono {
        let mut map = BTreeMap::new();
        for (p, e) in powers {
            let entry = map.entry(p).or_insert(0i64);
            *entry += e;
        }
        map.retain(|_, e| *e != 0);
        ParamMono(map)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn powers(&self) -> impl Iterator<Item = (&Param, i64)> {
        self.0.iter().map(|(p, e)| (p, *e))
    }

    pub fn mul(&self, other: &ParamMono) -> ParamMono {
        ParamMono::from_powers(
            self.powers()
                .chain(other.powers())
                .map(|(p, e)| (p.clone(), e)),
        )
    }

    pub fn inverse(&self) -> ParamMono {
        ParamMono(self.0.iter().map(|(p, e)| (p.clone(), -e)).collect())
    }

    pub fn params(&self) -> impl Iterator<Item = &Param> {
        self.0.keys()
    }

    fn eval(&self, assign: &BTreeMap<Param, Rat>) -> Result<Rat, CoeffError> {
        let mut acc = Rat::one();
        for (p, e) in self.powers() {
            let v = assign
                .get(p)
                .ok_or_else(|| CoeffError::MissingParam(p.name().to_string()))?;
            if v.is_zero() && e < 0 {
                return Err(CoeffError::ZeroToNegativePower(p.name().to_string()));
            }
            acc *= rat_pow(v, e);
        }
        Ok(acc)
    }
}

fn rat_pow(base: &Rat, exp: i64) -> Rat {
    let mut acc = Rat::one();
    let positive = base.clone();
    let b = if exp >= 0 { positive } else { base.recip() };
    for _ in 0..exp.unsigned_abs() {
        acc *= &b;
    }
    acc
}

impl fmt::Display for ParamMono {
    /// Prints `name^e` factors joined by single spaces, unit as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("1");
        }
        let mut first = true;
        for (p, e) in self.powers() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", p)?;
            } else {
                write!(f, "{}^{}", p, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ParamMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamMono({})", self)
    }
}

/// A finite rational combination of parameter monomials.
///
/// Zero coefficients are never stored; the zero scalar is the empty sum.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BTreeMap<ParamMono, Rat>);

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::default()
    }

    pub fn one() -> Scalar {
        Scalar::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Scalar {
        let mut s = Scalar::default();
        if !r.is_zero() {
            s.0.insert(ParamMono::unit(), r);
        }
        s
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_rat(rat_int(n))
    }

    pub fn param(name: &str) -> Result<Scalar, CoeffError> {
        Ok(Scalar::term(ParamMono::var(Param::new(name)?), Rat::one()))
    }

    pub fn term(mono: ParamMono, coeff: Rat) -> Scalar {
        let mut s = Scalar::default();
        if !coeff.is_zero() {
            s.0.insert(mono, coeff);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Returns the rational value if the scalar is parameter-free.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.0.is_empty() {
            return Some(Rat::zero());
        }
        if self.0.len() == 1 {
            if let Some(r) = self.0.get(&ParamMono::unit()) {
                return Some(r.clone());
            }
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamMono, &Rat)> {
        self.0.iter()
    }

    pub fn params(&self) -> impl Iterator<Item = &Param> {
        self.0.keys().flat_map(|m| m.params())
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        let mut out = self.0.clone();
        for (m, r) in other.terms() {
            let entry = out.entry(m.clone()).or_insert_with(Rat::zero);
            *entry += r;
        }
        out.retain(|_, r| !r.is_zero());
        Scalar(out)
    }

    pub fn neg(&self) -> Scalar {
        Scalar(self.0.iter().map(|(m, r)| (m.clone(), -r)).collect())
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        let mut out: BTreeMap<ParamMono, Rat> = BTreeMap::new();
        for (m1, r1) in self.terms() {
            for (m2, r2) in other.terms() {
                let m = m1.mul(m2);
                let entry = out.entry(m).or_insert_with(Rat::zero);
                *entry += r1 * r2;
            }
        }
        out.retain(|_, r| !r.is_zero());
        Scalar(out)
    }

    pub fn mul_rat(&self, r: &Rat) -> Scalar {
        if r.is_zero() {
            return Scalar::zero();
        }
        Scalar(self.0.iter().map(|(m, c)| (m.clone(), c * r)).collect())
    }

    /// Multiplicative inverse of a one-term scalar; `None` for other shapes.
    pub fn invert_term(&self) -> Option<Scalar> {
        if self.0.len() != 1 {
            return None;
        }
        let (m, r) = self.0.iter().next().unwrap();
        Some(Scalar::term(m.inverse(), r.recip()))
    }

    pub fn eval(&self, assign: &BTreeMap<Param, Rat>) -> Result<Rat, CoeffError> {
        let mut acc = Rat::zero();
        for (m, r) in self.terms() {
            acc += m.eval(assign)? * r;
        }
        Ok(acc)
    }
}

impl fmt::Display for Scalar {
    /// Canonical form: terms in monomial order joined by ` + `/` - `, each
    /// term `rational mono` with the rational omitted when it is a bare 1 next
    /// to a non-unit monomial. The zero scalar prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, r)) in self.terms().enumerate() {
            let mag = r.abs();
            if k == 0 {
                if r.is_negative() {
                    f.write_str("-")?;
                }
            } else if r.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            f.write_str(&scalar_term_text(&mag, m))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self)
    }
}

/// Renders `magnitude * mono` without sign: `3/2 k{4}^2`, `k{4}`, or `3/2`.
pub(crate) fn scalar_term_text(mag: &Rat, mono: &ParamMono) -> String {
    if mono.is_unit() {
        format!("{}", mag)
    } else if mag.is_one() {
        format!("{}", mono)
    } else {
        format!("{} {}", mag, mono)
    }
}
