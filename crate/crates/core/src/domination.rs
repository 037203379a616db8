//! Domination relations between payoff vectors and between sets of payoff
//! vectors, anti-optimal front extraction and the ideal-point reduction.
//!
//! All comparisons are exact floating-point comparisons. A payoff vector
//! `f` dominates `h` under [`Sense::Maximize`] when it is no worse in every
//! objective and strictly better in at least one.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{check_dim, Error, Result};

/// Optimization direction of a player (or of a comparison).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    pub fn opposite(self) -> Sense {
        match self {
            Sense::Minimize => Sense::Maximize,
            Sense::Maximize => Sense::Minimize,
        }
    }

    /// `true` when `a` is strictly better than `b` in this sense.
    #[inline]
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }
}

/// The K objective values produced by one interaction between two strategies.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffVector(SmallVec<[f64; 2]>);

impl PayoffVector {
    /// Builds a payoff vector, rejecting empty or non-finite input.
    pub fn new(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let values: SmallVec<[f64; 2]> = values.into_iter().collect();
        if values.is_empty() {
            return Err(Error::domain("payoff vector needs at least one objective"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite payoff component {v}")));
        }
        Ok(PayoffVector(values))
    }

    pub(crate) fn from_finite(values: SmallVec<[f64; 2]>) -> Self {
        debug_assert!(!values.is_empty() && values.iter().all(|v| v.is_finite()));
        PayoffVector(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.0.iter()
    }

    /// Component-wise negation.
    pub fn negated(&self) -> PayoffVector {
        PayoffVector(self.0.iter().map(|v| -v).collect())
    }

    /// Multiplies every component by `factor`.
    pub fn scaled(&self, factor: f64) -> PayoffVector {
        PayoffVector(self.0.iter().map(|v| v * factor).collect())
    }
}

impl fmt::Debug for PayoffVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("PayoffVector").field(&self.as_slice()).finish()
    }
}

impl Index<usize> for PayoffVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

/// Panics if any component is non-finite; use [`PayoffVector::new`] for
/// untrusted input.
impl<const N: usize> From<[f64; N]> for PayoffVector {
    fn from(values: [f64; N]) -> Self {
        PayoffVector::new(values).expect("payoff literal must be finite and non-empty")
    }
}

impl TryFrom<Vec<f64>> for PayoffVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        PayoffVector::new(values)
    }
}

/// Vector domination: `f` is no worse than `h` everywhere and strictly
/// better somewhere, in the given sense.
pub fn dominates(f: &PayoffVector, h: &PayoffVector, sense: Sense) -> Result<bool> {
    check_dim(f.len(), h.len())?;
    Ok(dominates_unchecked(f.as_slice(), h.as_slice(), sense))
}

#[inline]
pub(crate) fn dominates_unchecked(f: &[f64], h: &[f64], sense: Sense) -> bool {
    let mut strict = false;
    for (&a, &b) in f.iter().zip(h) {
        if sense.better(b, a) {
            return false;
        }
        if sense.better(a, b) {
            strict = true;
        }
    }
    strict
}

fn check_set(set: &[PayoffVector], what: &str) -> Result<usize> {
    let first = set
        .first()
        .ok_or_else(|| Error::domain(format!("{what} must be non-empty")))?;
    let k = first.len();
    for p in set {
        check_dim(k, p.len())?;
    }
    Ok(k)
}

/// Set domination: every member of `h` is dominated by some member of `f`.
pub fn set_dominates(f: &[PayoffVector], h: &[PayoffVector], sense: Sense) -> Result<bool> {
    let k = check_set(f, "dominating set")?;
    check_dim(k, check_set(h, "dominated set")?)?;
    Ok(h.iter().all(|hv| {
        f.iter()
            .any(|fv| dominates_unchecked(fv.as_slice(), hv.as_slice(), sense))
    }))
}

/// Worst-case domination of `f` over `h` for a player optimizing in
/// `player_sense`: holds when `h` dominates `f` in the opponent's sense.
pub fn worst_case_dominates(
    f: &[PayoffVector],
    h: &[PayoffVector],
    player_sense: Sense,
) -> Result<bool> {
    set_dominates(h, f, player_sense.opposite())
}

/// Indices of the points not dominated by any other point. Duplicates of a
/// front member are all kept. Indices are returned in ascending order.
pub fn non_dominated_front(points: &[PayoffVector], sense: Sense) -> Result<Vec<usize>> {
    check_set(points, "point set")?;
    Ok((0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .any(|q| dominates_unchecked(q.as_slice(), points[i].as_slice(), sense))
        })
        .collect())
}

/// Component-wise extreme of a front, taken in the opponent's sense:
/// per-coordinate maximum for a maximizing opponent, minimum otherwise.
pub fn ideal_point(front: &[PayoffVector], opponent_sense: Sense) -> Result<PayoffVector> {
    let k = check_set(front, "front")?;
    let mut extreme: SmallVec<[f64; 2]> = front[0].0.clone();
    for p in &front[1..] {
        for (e, &v) in extreme.iter_mut().zip(p.iter()) {
            if opponent_sense.better(v, *e) {
                *e = v;
            }
        }
    }
    debug_assert_eq!(extreme.len(), k);
    Ok(PayoffVector(extreme))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> PayoffVector {
        PayoffVector::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn vector_domination_examples() {
        assert!(dominates(&pv(&[3., 2.]), &pv(&[1., 2.]), Sense::Maximize).unwrap());
        assert!(!dominates(&pv(&[1., 2.]), &pv(&[1., 2.]), Sense::Maximize).unwrap());
        assert!(dominates(&pv(&[1., 2.]), &pv(&[1., 3.]), Sense::Minimize).unwrap());
    }

    #[test]
    fn length_mismatch_is_dimension_error() {
        let err = dominates(&pv(&[1., 2.]), &pv(&[1.]), Sense::Maximize).unwrap_err();
        assert!(matches!(err, Error::Dimension { expected: 2, actual: 1 }));
    }

    #[test]
    fn rejects_non_finite_payoff() {
        assert!(PayoffVector::new([1.0, f64::NAN]).is_err());
        assert!(PayoffVector::new(Vec::<f64>::new()).is_err());
    }

    #[test]
    fn set_domination_examples() {
        let f = [pv(&[2., 2.])];
        let h = [pv(&[1., 1.]), pv(&[0., 2.])];
        assert!(set_dominates(&f, &h, Sense::Maximize).unwrap());
        assert!(!set_dominates(&[pv(&[1., 1.])], &[pv(&[2., 0.])], Sense::Maximize).unwrap());
        assert!(!set_dominates(&[pv(&[1., 1.])], &[pv(&[1., 1.])], Sense::Maximize).unwrap());
        assert!(matches!(
            set_dominates(&[], &h, Sense::Maximize),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn worst_case_examples() {
        let wc = |f: &[f64], h: &[f64]| {
            worst_case_dominates(&[pv(f)], &[pv(h)], Sense::Minimize).unwrap()
        };
        assert!(wc(&[1., 1.], &[2., 2.]));
        assert!(!wc(&[2., 2.], &[1., 1.]));
        assert!(!wc(&[1., 4.], &[4., 1.]));
    }

    #[test]
    fn front_examples() {
        let pts = [pv(&[1., 3.]), pv(&[2., 1.]), pv(&[0., 0.])];
        assert_eq!(non_dominated_front(&pts, Sense::Maximize).unwrap(), vec![0, 1]);
        assert_eq!(non_dominated_front(&[pv(&[5., 5.])], Sense::Maximize).unwrap(), vec![0]);
        let chain = [pv(&[1., 1.]), pv(&[2., 2.]), pv(&[3., 3.])];
        assert_eq!(non_dominated_front(&chain, Sense::Minimize).unwrap(), vec![0]);
        assert!(non_dominated_front(&[], Sense::Minimize).is_err());
    }

    #[test]
    fn front_keeps_duplicates() {
        let pts = [pv(&[1., 1.]), pv(&[0., 0.]), pv(&[1., 1.])];
        assert_eq!(non_dominated_front(&pts, Sense::Maximize).unwrap(), vec![0, 2]);
    }

    #[test]
    fn ideal_point_examples() {
        let front = [pv(&[1., 3.]), pv(&[2., 1.])];
        assert_eq!(ideal_point(&front, Sense::Maximize).unwrap(), pv(&[2., 3.]));
        assert_eq!(ideal_point(&[pv(&[5., 7.])], Sense::Maximize).unwrap(), pv(&[5., 7.]));
        assert_eq!(ideal_point(&front, Sense::Minimize).unwrap(), pv(&[1., 1.]));
        assert!(ideal_point(&[], Sense::Minimize).is_err());
    }
}
