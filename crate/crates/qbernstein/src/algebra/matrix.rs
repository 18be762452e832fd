//! Square matrices over exact rationals and evaluation of free polynomials
//! in explicit matrix representations.

use super::{AlgebraError, FreePolynomial, Generator};
use crate::coeff::{Param, Rat};
use num::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A dense square matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(n: usize) -> RatMatrix {
        RatMatrix {
            n,
            entries: vec![Rat::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> RatMatrix {
        let mut m = RatMatrix::zeros(n);
        for k in 0..n {
            m.set(k, k, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<RatMatrix, AlgebraError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(AlgebraError::Matrix("rows of unequal length".into()));
        }
        Ok(RatMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<RatMatrix, AlgebraError> {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rat::from_integer(v.into())).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rat) {
        self.entries[r * self.n + c] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rat::is_zero)
    }

    fn check_same_n(&self, other: &RatMatrix) -> Result<(), AlgebraError> {
        if self.n != other.n {
            return Err(AlgebraError::Matrix(format!(
                "dimension mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &RatMatrix) -> Result<RatMatrix, AlgebraError> {
        self.check_same_n(other)?;
        Ok(RatMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &RatMatrix) -> Result<RatMatrix, AlgebraError> {
        self.check_same_n(other)?;
        Ok(RatMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: &Rat) -> RatMatrix {
        RatMatrix {
            n: self.n,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, AlgebraError> {
        self.check_same_n(other)?;
        let n = self.n;
        let mut out = RatMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let entry = &mut out.entries[r * n + c];
                    *entry += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Kronecker product; the result has dimension `self.n * other.n`.
    pub fn kron(&self, other: &RatMatrix) -> RatMatrix {
        let n = self.n * other.n;
        let mut out = RatMatrix::zeros(n);
        for r1 in 0..self.n {
            for c1 in 0..self.n {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..other.n {
                    for c2 in 0..other.n {
                        out.set(
                            r1 * other.n + r2,
                            c1 * other.n + c2,
                            a * other.get(r2, c2),
                        );
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.n, self.n)?;
        for r in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        f.write_str("]")
    }
}

/// Evaluates `p` by sending each generator to its assigned matrix and each
/// parameter to its assigned rational; the unit word maps to the identity.
///
/// All assigned matrices must share one dimension, every generator in the
/// support of `p` must be assigned, and parameters in `declared_nonzero`
/// must not be assigned zero.
pub fn eval_matrix(
    p: &FreePolynomial,
    assignment: &BTreeMap<Generator, RatMatrix>,
    params: &BTreeMap<Param, Rat>,
    declared_nonzero: &BTreeSet<Param>,
) -> Result<RatMatrix, AlgebraError> {
    let n = match assignment.values().next() {
        Some(m) => m.n(),
        None => {
            return Err(AlgebraError::Matrix(
                "empty generator assignment".into(),
            ))
        }
    };
    if assignment.values().any(|m| m.n() != n) {
        return Err(AlgebraError::Matrix(
            "assigned matrices have mixed dimensions".into(),
        ));
    }
    for param in declared_nonzero {
        if params.get(param).is_some_and(Rat::is_zero) {
            return Err(AlgebraError::ZeroDeclaredNonzero(param.name().to_string()));
        }
    }
    let mut acc = RatMatrix::zeros(n);
    for (word, scalar) in p.terms() {
        let value = scalar.eval(params)?;
        if value.is_zero() {
            continue;
        }
        let mut m = RatMatrix::identity(n);
        for g in word.letters() {
            let assigned = assignment
                .get(g)
                .ok_or(AlgebraError::MissingGenerator(g.i, g.j))?;
            m = m.mul(assigned)?;
        }
        acc = acc.add(&m.scale(&value))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, rat_int, Scalar};

    fn pauli_x() -> RatMatrix {
        RatMatrix::from_int_rows(&[vec![0, 1], vec![1, 0]]).unwrap()
    }

    fn pauli_z() -> RatMatrix {
        RatMatrix::from_int_rows(&[vec![1, 0], vec![0, -1]]).unwrap()
    }

    fn one_by_one(v: i64) -> RatMatrix {
        RatMatrix::from_int_rows(&[vec![v]]).unwrap()
    }

    #[test]
    fn pauli_matrices_anticommute() {
        let xz = pauli_x().mul(&pauli_z()).unwrap();
        let zx = pauli_z().mul(&pauli_x()).unwrap();
        assert!(xz.add(&zx).unwrap().is_zero());
        assert_eq!(pauli_x().mul(&pauli_x()).unwrap(), RatMatrix::identity(2));
    }

    #[test]
    fn kron_is_multiplicative() {
        let a = pauli_x();
        let b = pauli_z();
        let c = RatMatrix::from_int_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        let d = RatMatrix::from_int_rows(&[vec![0, 1], vec![-1, 1]]).unwrap();
        let left = a.kron(&b).mul(&c.kron(&d)).unwrap();
        let right = a.mul(&c).unwrap().kron(&b.mul(&d).unwrap());
        assert_eq!(left, right);
        assert_eq!(
            RatMatrix::identity(2).kron(&RatMatrix::identity(3)),
            RatMatrix::identity(6)
        );
    }

    #[test]
    fn unit_polynomial_evaluates_to_identity() {
        let mut assignment = BTreeMap::new();
        assignment.insert(Generator::new(1, 1), pauli_x());
        let value = eval_matrix(
            &FreePolynomial::one(2),
            &assignment,
            &BTreeMap::new(),
            &BTreeSet::new(),
        )
        .unwrap();
        assert_eq!(value, RatMatrix::identity(2));
    }

    #[test]
    fn norm_relation_vanishes_at_a_signed_permutation() {
        // d = 2 signed permutation: u_11 -> 0, u_12 -> 1, u_21 -> -1, u_22 -> 0.
        let mut assignment = BTreeMap::new();
        assignment.insert(Generator::new(1, 1), one_by_one(0));
        assignment.insert(Generator::new(1, 2), one_by_one(1));
        assignment.insert(Generator::new(2, 1), one_by_one(-1));
        assignment.insert(Generator::new(2, 2), one_by_one(0));
        let row_norm = FreePolynomial::sum_over(2, |j| {
            FreePolynomial::word(2, &[(1, j), (1, j)])
        })
        .unwrap()
        .sub(&FreePolynomial::one(2))
        .unwrap();
        let value = eval_matrix(&row_norm, &assignment, &BTreeMap::new(), &BTreeSet::new()).unwrap();
        assert!(value.is_zero());
        // Same row, different columns: the product has a zero factor.
        let annihilation = FreePolynomial::word(2, &[(1, 1), (1, 2)]).unwrap();
        let value =
            eval_matrix(&annihilation, &assignment, &BTreeMap::new(), &BTreeSet::new()).unwrap();
        assert!(value.is_zero());
    }

    #[test]
    fn parameters_and_declared_nonzero() {
        let k = crate::coeff::Param::new("k{4}").unwrap();
        let p = FreePolynomial::generator(2, 1, 1)
            .unwrap()
            .scale(&Scalar::param("k{4}").unwrap());
        let mut assignment = BTreeMap::new();
        assignment.insert(Generator::new(1, 1), pauli_z());
        let mut params = BTreeMap::new();
        params.insert(k.clone(), rat(3, 2));
        let nonzero = BTreeSet::from([k.clone()]);
        let value = eval_matrix(&p, &assignment, &params, &nonzero).unwrap();
        assert_eq!(value, pauli_z().scale(&rat(3, 2)));
        params.insert(k.clone(), rat_int(0));
        assert!(matches!(
            eval_matrix(&p, &assignment, &params, &nonzero),
            Err(AlgebraError::ZeroDeclaredNonzero(_))
        ));
        assert!(matches!(
            eval_matrix(&p, &assignment, &BTreeMap::new(), &BTreeSet::new()),
            Err(AlgebraError::Coeff(_))
        ));
    }

    #[test]
    fn shape_and_coverage_errors() {
        let p = FreePolynomial::word(2, &[(1, 1), (1, 2)]).unwrap();
        let mut assignment = BTreeMap::new();
        assignment.insert(Generator::new(1, 1), pauli_x());
        assert!(matches!(
            eval_matrix(&p, &assignment, &BTreeMap::new(), &BTreeSet::new()),
            Err(AlgebraError::MissingGenerator(1, 2))
        ));
        assignment.insert(Generator::new(1, 2), one_by_one(1));
        assert!(matches!(
            eval_matrix(&p, &assignment, &BTreeMap::new(), &BTreeSet::new()),
            Err(AlgebraError::Matrix(_))
        ));
        assert!(matches!(
            eval_matrix(&p, &BTreeMap::new(), &BTreeMap::new(), &BTreeSet::new()),
            Err(AlgebraError::Matrix(_))
        ));
        assert!(RatMatrix::from_int_rows(&[vec![1, 2], vec![3]]).is_err());
    }
}
