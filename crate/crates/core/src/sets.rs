//! Canonical user-index sets and the truth/decoded activity decomposition.
//!
//! Users are numbered 1..=total; sets are kept sorted ascending so equal
//! sets compare equal and CSV output is canonical.

use crate::error::{Error, Result};

/// Sorted, deduplicated set of user indices (1-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct UserSet(Vec<usize>);

impl UserSet {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        UserSet(ids)
    }

    pub fn empty() -> Self {
        UserSet(Vec::new())
    }

    /// {1, 2, ..., n}.
    pub fn first_n(n: usize) -> Self {
        UserSet((1..=n).collect())
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn intersect(&self, other: &UserSet) -> UserSet {
        UserSet(self.0.iter().copied().filter(|id| other.contains(*id)).collect())
    }

    pub fn minus(&self, other: &UserSet) -> UserSet {
        UserSet(self.0.iter().copied().filter(|id| !other.contains(*id)).collect())
    }

    pub fn union(&self, other: &UserSet) -> UserSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        UserSet::new(v)
    }

    /// All ids lie in 1..=total.
    pub fn validate_within(&self, total: usize) -> Result<()> {
        match self.0.iter().find(|&&id| id == 0 || id > total) {
            Some(id) => Err(Error::invalid(format!("user index {id} outside 1..={total}"))),
            None => Ok(()),
        }
    }
}

impl FromIterator<usize> for UserSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        UserSet::new(iter.into_iter().collect())
    }
}

/// Ground-truth active set, decoded set, and the derived decomposition into
/// correctly decoded, misdetected, and false-alarm users.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActivityScenario {
    truth: UserSet,
    decoded: UserSet,
    eq: UserSet,
    md: UserSet,
    fa: UserSet,
}

impl ActivityScenario {
    pub fn new(truth: UserSet, decoded: UserSet) -> Self {
        let eq = truth.intersect(&decoded);
        let md = truth.minus(&decoded);
        let fa = decoded.minus(&truth);
        ActivityScenario { truth, decoded, eq, md, fa }
    }

    /// Build from explicit parts; the parts must be disjoint.
    pub fn from_parts(eq: UserSet, md: UserSet, fa: UserSet) -> Result<Self> {
        if !eq.intersect(&md).is_empty()
            || !eq.intersect(&fa).is_empty()
            || !md.intersect(&fa).is_empty()
        {
            return Err(Error::invalid("scenario parts must be disjoint"));
        }
        let truth = eq.union(&md);
        let decoded = eq.union(&fa);
        Ok(ActivityScenario { truth, decoded, eq, md, fa })
    }

    pub fn truth(&self) -> &UserSet {
        &self.truth
    }
    pub fn decoded(&self) -> &UserSet {
        &self.decoded
    }
    pub fn correctly_decoded(&self) -> &UserSet {
        &self.eq
    }
    pub fn misdetected(&self) -> &UserSet {
        &self.md
    }
    pub fn false_alarms(&self) -> &UserSet {
        &self.fa
    }
}
