//! Randomized soundness spot-checks on kernel sessions.
//!
//! Signed permutation matrices satisfy every presentation the scenarios use:
//! map `u[i,j]` to the 1x1 matrix `(s_j)` when `sigma(j) = i` and to `(0)`
//! otherwise, for a permutation `sigma` of the columns and signs
//! `s_j in {+1, -1}`. Row and column norms evaluate to one, orthogonality
//! and annihilation products to zero, and one-dimensional entries commute,
//! so the anticommuting presets are satisfied as well. Every assumed fact
//! the scenarios add also vanishes in such a model, hence every fact a sound
//! session can ever derive must evaluate to zero there. A nonzero
//! evaluation means an inference step is broken, and the run must abort
//! rather than report anything.

use super::ScenarioError;
use crate::algebra::{Generator, RatMatrix};
use crate::coeff::{rat, Param, Rat};
use crate::kernel::Session;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Evaluates every fact of `session` in `rounds` random signed permutation
/// models with random nonzero rational parameter values. Returns an error
/// describing the first nonzero evaluation, if any.
pub fn signed_permutation_check(
    session: &Session,
    seed: u64,
    rounds: usize,
) -> Result<(), ScenarioError> {
    let d = session.d() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut params: BTreeSet<Param> = session.nonzero_params().clone();
    for fact in session.facts() {
        for (_, scalar) in fact.poly().terms() {
            params.extend(scalar.params().cloned());
        }
    }

    for round in 0..rounds {
        let mut sigma: Vec<usize> = (0..d).collect();
        for hi in (1..d).rev() {
            sigma.swap(hi, rng.gen_range(0..=hi));
        }
        let signs: Vec<i64> = (0..d)
            .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
            .collect();

        let mut assignment: BTreeMap<Generator, RatMatrix> = BTreeMap::new();
        for i in 1..=d {
            for j in 1..=d {
                let entry = if sigma[j - 1] == i - 1 { signs[j - 1] } else { 0 };
                assignment.insert(
                    Generator::new(i as u8, j as u8),
                    RatMatrix::from_int_rows(&[vec![entry]]).expect("1x1 is square"),
                );
            }
        }

        let values: BTreeMap<Param, Rat> = params
            .iter()
            .map(|p| {
                let num = rng.gen_range(1..=5i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
                let den = rng.gen_range(1..=4i64);
                (p.clone(), rat(num, den))
            })
            .collect();

        if let Some((index, _)) = session.eval_all_facts(&assignment, &values)? {
            return Err(ScenarioError::Soundness(format!(
                "fact {index} ({}) evaluates nonzero in a signed permutation model \
                 (round {round}, sigma {sigma:?}, signs {signs:?})",
                session.fact(index)?.poly()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FreePolynomial;
    use crate::kernel::{preset_presentation, PresetKind};

    #[test]
    fn preset_sessions_pass_the_signed_permutation_check() {
        for kind in [PresetKind::OPlus, PresetKind::HPlus, PresetKind::OMinusOne] {
            for d in 2..=3u8 {
                let session = Session::new(preset_presentation(kind, d).unwrap());
                signed_permutation_check(&session, 7, 8).unwrap();
            }
        }
    }

    #[test]
    fn a_false_assumption_is_caught() {
        let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
        // u[1,1] + u[1,2] - 1 is not zero under most signed permutations.
        let bogus = FreePolynomial::parse(2, "u[1,1] + u[1,2] - 1").unwrap();
        session.add_assumed_fact(bogus).unwrap();
        let err = signed_permutation_check(&session, 7, 20).unwrap_err();
        assert!(matches!(err, ScenarioError::Soundness(_)));
        assert!(err.to_string().contains("signed permutation"));
    }

    #[test]
    fn parameter_weighted_facts_evaluate_with_random_values() {
        let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
        // A parameter multiple of a row norm still vanishes in every model.
        let weighted = FreePolynomial::parse(
            2,
            "k{4,1} * u[1,1] u[1,1] + k{4,1} * u[1,2] u[1,2] - k{4,1}",
        )
        .unwrap();
        session.add_assumed_fact(weighted).unwrap();
        signed_permutation_check(&session, 11, 12).unwrap();
    }

    #[test]
    fn checks_are_deterministic_in_the_seed() {
        let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
        let bogus = FreePolynomial::parse(2, "u[1,1] + u[1,2] - 1").unwrap();
        session.add_assumed_fact(bogus).unwrap();
        let a = signed_permutation_check(&session, 3, 20).unwrap_err().to_string();
        let b = signed_permutation_check(&session, 3, 20).unwrap_err().to_string();
        assert_eq!(a, b);
    }
}
