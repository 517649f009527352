use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::ConstraintError;
use crate::graph::Graph;

/// Forced pairs `<v, v'>` (v maps exactly to v') and forbidden pairs
/// `(v, v')` (v never maps to v') between two graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    forced: Vec<(usize, usize)>,
    forbidden: BTreeSet<(usize, usize)>,
}

impl Constraint {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(forced: Vec<(usize, usize)>, forbidden: Vec<(usize, usize)>) -> Result<Self, ConstraintError> {
        let mut fwd: HashMap<usize, usize> = HashMap::new();
        let mut back: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in &forced {
            if fwd.insert(a, b).is_some_and(|old| old != b) || back.insert(b, a).is_some_and(|old| old != a) {
                return Err(ConstraintError::NotPartialBijection(a, b));
            }
        }
        let forbidden: BTreeSet<(usize, usize)> = forbidden.into_iter().collect();
        if let Some(&(a, b)) = forced.iter().find(|p| forbidden.contains(p)) {
            return Err(ConstraintError::ForcedAndForbidden(a, b));
        }
        let mut forced: Vec<(usize, usize)> = fwd.into_iter().collect();
        forced.sort_unstable();
        Ok(Constraint { forced, forbidden })
    }

    pub fn forced_pair(a: usize, b: usize) -> Self {
        Constraint {
            forced: vec![(a, b)],
            forbidden: BTreeSet::new(),
        }
    }

    pub fn forced(&self) -> &[(usize, usize)] {
        &self.forced
    }

    pub fn forbidden(&self) -> impl Iterator<Item = &(usize, usize)> + '_ {
        self.forbidden.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.forced.is_empty() && self.forbidden.is_empty()
    }

    pub fn allows(&self, v: usize, w: usize) -> bool {
        !self.forbidden.contains(&(v, w))
    }

    /// Image forced for `v`, if any.
    pub fn image_of(&self, v: usize) -> Option<usize> {
        self.forced
            .binary_search_by_key(&v, |&(a, _)| a)
            .ok()
            .map(|i| self.forced[i].1)
    }

    pub fn check_against(&self, g: &Graph, h: &Graph) -> Result<(), ConstraintError> {
        for &(a, b) in self.forced.iter().chain(self.forbidden.iter()) {
            g.check_vertex(a).map_err(ConstraintError::Graph)?;
            h.check_vertex(b).map_err(ConstraintError::Graph)?;
        }
        Ok(())
    }

    /// Whether a full mapping honors every pair.
    pub fn satisfied_by(&self, mapping: &[usize]) -> bool {
        self.forced.iter().all(|&(a, b)| mapping.get(a) == Some(&b))
            && self.forbidden.iter().all(|&(a, b)| mapping.get(a) != Some(&b))
    }

    /// The same constraint with both sides renumbered; pairs touching a
    /// vertex missing from either table are dropped.
    pub(crate) fn restrict(&self, g_index: &[usize], h_index: &[usize]) -> Constraint {
        let map = |&(a, b): &(usize, usize)| {
            let (x, y) = (*g_index.get(a)?, *h_index.get(b)?);
            (x != usize::MAX && y != usize::MAX).then_some((x, y))
        };
        Constraint {
            forced: {
                let mut f: Vec<_> = self.forced.iter().filter_map(map).collect();
                f.sort_unstable();
                f
            },
            forbidden: self.forbidden.iter().filter_map(map).collect(),
        }
    }
}

/// Inverse lookup table for a `table[new] = old` renumbering.
pub(crate) fn index_of(table: &[usize], n: usize) -> Vec<usize> {
    let mut idx = vec![usize::MAX; n];
    for (new, &old) in table.iter().enumerate() {
        idx[old] = new;
    }
    idx
}
