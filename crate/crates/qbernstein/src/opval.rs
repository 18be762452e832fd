//! Operator-valued probability for rotated families.
//!
//! Given a free family `X_1, ..., X_d` and a presented algebra `B` with
//! generator grid `u[i,j]`, the rotated variables are `Y_j = sum_i X_i (x)
//! u[i,j]`. The conditional expectation onto `B` applies the scalar joint
//! moment to the `X` tensor factors and leaves the `B` words in place, so
//! every moment of the `Y`'s is a [`FreePolynomial`] whose coefficients are
//! polynomials in the scalar cumulant parameters.
//!
//! Operator-valued cumulants are computed two independent ways: Mobius
//! inversion of nested moments over the non-crossing lattice, and the closed
//! form `sum_i kappa_n(X_i) u[i,j_1] b_1 ... u[i,j_n] b_n` that survives
//! because mixed scalar cumulants of free variables vanish. The two agree as
//! free-algebra elements, before any relations are imposed, and the test
//! suite pins that equality.

use crate::algebra::{AlgebraError, FreePolynomial};
use crate::cumulant::{joint_free_moment, CumulantError, FreeFamilySpec};
use crate::kernel::Presentation;
use crate::nc::{enumerate_nc, mobius_to_top, NcError, SetPartition};

/// Errors from operator-valued computations.
#[derive(Debug, Clone, thiserror::Error)]
pub enum OpvalError {
    #[error("family has {family} variables but the algebra grid is {d} x {d}")]
    FamilySize { family: usize, d: u8 },
    #[error("operator-valued words must contain at least one variable")]
    EmptyWord,
    #[error("column index {j} is outside the 1..={d} grid")]
    ColumnOutOfRange { j: u8, d: u8 },
    #[error("coefficient polynomial lives on a {got} x {got} grid, expected {want} x {want}")]
    CoefficientDimension { got: u8, want: u8 },
    #[error("partition has {partition} elements but the word has {word}")]
    PartitionSize { partition: usize, word: usize },
    #[error("freeness constraints need at least two variables, got {n}")]
    TooShort { n: usize },
    #[error("freeness constraints require a non-constant column word")]
    ConstantColumns,
    #[error(transparent)]
    Cumulant(#[from] CumulantError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Nc(#[from] NcError),
}

/// A free family rotated by the generator matrix of a presented algebra:
/// `Y_j = sum_i X_i (x) u[i,j]`, one `X` per grid row.
#[derive(Debug, Clone)]
pub struct RotatedFamily {
    family: FreeFamilySpec,
    presentation: Presentation,
}

impl RotatedFamily {
    pub fn new(
        family: FreeFamilySpec,
        presentation: Presentation,
    ) -> Result<RotatedFamily, OpvalError> {
        if family.len() != presentation.d() as usize {
            return Err(OpvalError::FamilySize {
                family: family.len(),
                d: presentation.d(),
            });
        }
        Ok(RotatedFamily {
            family,
            presentation,
        })
    }

    pub fn d(&self) -> u8 {
        self.presentation.d()
    }

    pub fn family(&self) -> &FreeFamilySpec {
        &self.family
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    /// Every moment and cumulant of order `n` needs all marginal cumulants
    /// up to `n`.
    fn check_order(&self, n: usize) -> Result<(), OpvalError> {
        for i in 0..self.family.len() {
            let order = self.family.spec(i)?.order();
            if n > order {
                return Err(OpvalError::Cumulant(CumulantError::TruncationExceeded {
                    requested: n,
                    order,
                }));
            }
        }
        Ok(())
    }
}

/// The word `Y_{j_1} b_1 Y_{j_2} b_2 ... Y_{j_n} b_n`: each entry pairs a
/// column index with the algebra element following that variable (default
/// the unit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpWord {
    d: u8,
    items: Vec<(u8, FreePolynomial)>,
}

impl OpWord {
    pub fn new(d: u8, items: Vec<(u8, FreePolynomial)>) -> Result<OpWord, OpvalError> {
        if items.is_empty() {
            return Err(OpvalError::EmptyWord);
        }
        for (j, b) in &items {
            if *j < 1 || *j > d {
                return Err(OpvalError::ColumnOutOfRange { j: *j, d });
            }
            if b.d() != d {
                return Err(OpvalError::CoefficientDimension { got: b.d(), want: d });
            }
        }
        Ok(OpWord { d, items })
    }

    /// A plain word `Y_{j_1} ... Y_{j_n}` with unit coefficients.
    pub fn from_columns(d: u8, columns: &[u8]) -> Result<OpWord, OpvalError> {
        OpWord::new(
            d,
            columns
                .iter()
                .map(|&j| (j, FreePolynomial::one(d)))
                .collect(),
        )
    }

    pub fn d(&self) -> u8 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[(u8, FreePolynomial)] {
        &self.items
    }

    pub fn columns(&self) -> Vec<u8> {
        self.items.iter().map(|(j, _)| *j).collect()
    }

    fn check_grid(&self, d: u8) -> Result<(), OpvalError> {
        if self.d != d {
            return Err(OpvalError::CoefficientDimension { got: self.d, want: d });
        }
        Ok(())
    }
}

/// `u[i,j_1] b_1 u[i,j_2] b_2 ... b_n` for a fixed row `i`.
fn row_word(d: u8, i: u8, w: &OpWord) -> Result<FreePolynomial, OpvalError> {
    let mut acc = FreePolynomial::one(d);
    for (j, b) in w.items() {
        acc = acc.mul(&FreePolynomial::generator(d, i, *j)?)?.mul(b)?;
    }
    Ok(acc)
}

/// `E(Y_{j_1} b_1 ... Y_{j_n} b_n)`: the scalar joint moment of each row
/// tuple of the `X`'s multiplies the corresponding interleaved `u`-word.
pub fn opval_moment(fam: &RotatedFamily, w: &OpWord) -> Result<FreePolynomial, OpvalError> {
    let d = fam.d();
    w.check_grid(d)?;
    let n = w.len();
    fam.check_order(n)?;
    let mut acc = FreePolynomial::zero(d);
    let mut tuple = vec![0usize; n];
    'tuples: loop {
        let coeff = joint_free_moment(fam.family(), &tuple)?;
        if !coeff.is_zero() {
            let mut word = FreePolynomial::one(d);
            for (k, (j, b)) in w.items().iter().enumerate() {
                word = word
                    .mul(&FreePolynomial::generator(d, tuple[k] as u8 + 1, *j)?)?
                    .mul(b)?;
            }
            acc = acc.add(&word.scale(&coeff))?;
        }
        for k in 0..=n {
            if k == n {
                break 'tuples;
            }
            tuple[k] += 1;
            if tuple[k] < d as usize {
                continue 'tuples;
            }
            tuple[k] = 0;
        }
    }
    Ok(acc)
}

/// `E_pi`: moments nested according to the blocks of a non-crossing
/// partition. Complete interval blocks collapse innermost-first; the
/// collapsed value multiplies onto the coefficient to its left, or onto a
/// running prefix when the block starts the word, preserving position order.
pub fn opval_moment_nested(
    fam: &RotatedFamily,
    w: &OpWord,
    pi: &SetPartition,
) -> Result<FreePolynomial, OpvalError> {
    if pi.n() != w.len() {
        return Err(OpvalError::PartitionSize {
            partition: pi.n(),
            word: w.len(),
        });
    }
    if !pi.is_noncrossing() {
        return Err(OpvalError::Nc(NcError::Crossing(pi.to_string())));
    }
    let d = fam.d();
    w.check_grid(d)?;

    let mut items: Vec<(u8, u8, FreePolynomial)> = pi
        .labels()
        .iter()
        .zip(w.items())
        .map(|(&label, (j, b))| (label, *j, b.clone()))
        .collect();
    let mut prefix = FreePolynomial::one(d);
    while !items.is_empty() {
        let mut found = None;
        let mut start = 0;
        while start < items.len() {
            let label = items[start].0;
            let mut end = start;
            while end < items.len() && items[end].0 == label {
                end += 1;
            }
            let block_size = items.iter().filter(|item| item.0 == label).count();
            if end - start == block_size {
                found = Some((start, end));
                break;
            }
            start = end;
        }
        let (start, end) = found.expect("a non-crossing partition always has an interval block");
        let sub = OpWord::new(
            d,
            items[start..end]
                .iter()
                .map(|(_, j, b)| (*j, b.clone()))
                .collect(),
        )?;
        let collapsed = opval_moment(fam, &sub)?;
        items.drain(start..end);
        if start == 0 {
            prefix = prefix.mul(&collapsed)?;
        } else {
            let b = &mut items[start - 1].2;
            *b = b.mul(&collapsed)?;
        }
    }
    Ok(prefix)
}

/// Operator-valued cumulant by Mobius inversion over the non-crossing
/// lattice: `sum_pi E_pi(w) mu(pi, top)`.
pub fn opval_cumulant_mobius(
    fam: &RotatedFamily,
    w: &OpWord,
) -> Result<FreePolynomial, OpvalError> {
    let n = w.len();
    fam.check_order(n)?;
    let mut acc = FreePolynomial::zero(fam.d());
    for pi in enumerate_nc(n)? {
        let mu = mobius_to_top(&pi)?;
        acc = acc.add(&opval_moment_nested(fam, w, &pi)?.scale_rat(&mu))?;
    }
    Ok(acc)
}

/// The closed form: mixed scalar cumulants of free variables vanish, so only
/// constant row tuples survive and
/// `kappa_n^B(Y_{j_1} b_1, ..., Y_{j_n} b_n) = sum_i kappa_n(X_i) u[i,j_1]
/// b_1 ... u[i,j_n] b_n`.
pub fn opval_cumulant_closed(
    fam: &RotatedFamily,
    w: &OpWord,
) -> Result<FreePolynomial, OpvalError> {
    let d = fam.d();
    w.check_grid(d)?;
    let n = w.len();
    fam.check_order(n)?;
    let mut acc = FreePolynomial::zero(d);
    for i in 1..=d {
        let kappa = fam.family().spec(i as usize - 1)?.kappa(n)?;
        if kappa.is_zero() {
            continue;
        }
        acc = acc.add(&row_word(d, i, w)?.scale(kappa))?;
    }
    Ok(acc)
}

/// The polynomials whose vanishing makes the order-`n` cumulant of the
/// rotated family vanish on a non-constant column word: with independent
/// cumulant parameters, `sum_i kappa_n(X_i) w_i = 0` forces each parameter's
/// coefficient `w_i = u[i,j_1] b_1 ... b_n` to vanish, so one polynomial per
/// row is returned. Identically distributed families share one parameter, so
/// the single summed polynomial is returned instead.
pub fn freeness_constraints(
    fam: &RotatedFamily,
    w: &OpWord,
) -> Result<Vec<FreePolynomial>, OpvalError> {
    let n = w.len();
    if n < 2 {
        return Err(OpvalError::TooShort { n });
    }
    let columns = w.columns();
    if columns.iter().all(|&j| j == columns[0]) {
        return Err(OpvalError::ConstantColumns);
    }
    let d = fam.d();
    w.check_grid(d)?;
    fam.check_order(n)?;
    let mut rows = Vec::with_capacity(d as usize);
    for i in 1..=d {
        rows.push(row_word(d, i, w)?);
    }
    if fam.family().is_identical() {
        let mut sum = FreePolynomial::zero(d);
        for row in &rows {
            sum = sum.add(row)?;
        }
        Ok(vec![sum])
    } else {
        Ok(rows)
    }
}
