use std::fmt;

use serde::{Deserialize, Serialize};

/// Dense step identifier. The initial step is 0, the goal step 1, ordinary
/// steps are numbered from 2 in instantiation order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StepId(pub u32);

impl StepId {
    pub const INIT: StepId = StepId(0);
    pub const GOAL: StepId = StepId(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_ordinary(self) -> bool {
        self.0 >= 2
    }
}

impl fmt::Debug for StepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// User-facing number: init is 0, ordinary steps count from 1 in creation
/// order, and the goal step prints as `goal`.
impl fmt::Display for StepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => f.write_str("0"),
            1 => f.write_str("goal"),
            n => write!(f, "{}", n - 1),
        }
    }
}

/// Temporal constraints with an incrementally maintained transitive closure.
///
/// Row `i` of `closure` holds every step that must come strictly after step
/// `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ordering {
    steps: usize,
    words: usize,
    closure: Vec<u64>,
    explicit: Vec<(StepId, StepId)>,
}

impl Default for Ordering {
    fn default() -> Self {
        Ordering { steps: 0, words: 1, closure: Vec::new(), explicit: Vec::new() }
    }
}

impl fmt::Debug for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.explicit.iter().map(|(a, b)| format!("{a}<{b}"))).finish()
    }
}

impl Ordering {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an ordering over `steps` steps from explicit pairs without
    /// rejecting cycles. Used when loading external plans.
    pub fn from_pairs(steps: usize, pairs: &[(StepId, StepId)]) -> Self {
        let mut o = Ordering::new();
        o.ensure(steps);
        for &(a, b) in pairs {
            o.ensure(a.index().max(b.index()) + 1);
            o.explicit.push((a, b));
            o.set(a.index(), b.index());
        }
        // Warshall
        for k in 0..o.steps {
            for i in 0..o.steps {
                if o.get(i, k) {
                    for w in 0..o.words {
                        let v = o.closure[k * o.words + w];
                        o.closure[i * o.words + w] |= v;
                    }
                }
            }
        }
        o
    }

    pub fn len(&self) -> usize {
        self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps == 0
    }

    pub fn explicit(&self) -> &[(StepId, StepId)] {
        &self.explicit
    }

    /// Every pair `a < b` in the transitive closure, sorted.
    pub fn closed_pairs(&self) -> Vec<(StepId, StepId)> {
        let mut out = Vec::new();
        for i in 0..self.steps {
            for j in 0..self.steps {
                if self.get(i, j) {
                    out.push((StepId(i as u32), StepId(j as u32)));
                }
            }
        }
        out
    }

    /// Closure pairs with no step in between: the transitive reduction of an
    /// acyclic ordering.
    pub fn reduced_pairs(&self) -> Vec<(StepId, StepId)> {
        self.closed_pairs()
            .into_iter()
            .filter(|&(a, c)| !(0..self.steps).any(|k| self.get(a.index(), k) && self.get(k, c.index())))
            .collect()
    }

    /// Grows the closure to cover step indices `0..n`.
    pub fn ensure(&mut self, n: usize) {
        if n <= self.steps {
            return;
        }
        let words = n.div_ceil(64).max(1);
        if words != self.words {
            let mut closure = vec![0u64; n * words];
            for i in 0..self.steps {
                closure[i * words..i * words + self.words]
                    .copy_from_slice(&self.closure[i * self.words..(i + 1) * self.words]);
            }
            self.closure = closure;
            self.words = words;
        } else {
            self.closure.resize(n * words, 0);
        }
        self.steps = n;
    }

    fn get(&self, i: usize, j: usize) -> bool {
        if i >= self.steps || j >= self.steps {
            return false;
        }
        self.closure[i * self.words + j / 64] & (1u64 << (j % 64)) != 0
    }

    fn set(&mut self, i: usize, j: usize) {
        self.closure[i * self.words + j / 64] |= 1u64 << (j % 64);
    }

    /// `a` is necessarily before `b`.
    pub fn precedes(&self, a: StepId, b: StepId) -> bool {
        self.get(a.index(), b.index())
    }

    /// Adding `a < b` would keep the closure acyclic.
    pub fn possibly_precedes(&self, a: StepId, b: StepId) -> bool {
        a != b && !self.precedes(b, a)
    }

    pub fn is_acyclic(&self) -> bool {
        (0..self.steps).all(|i| !self.get(i, i))
    }

    /// Adds `a < b`. Returns false, leaving `self` untouched, when the
    /// constraint would create a cycle.
    pub fn add(&mut self, a: StepId, b: StepId) -> bool {
        if !self.possibly_precedes(a, b) {
            return false;
        }
        self.ensure(a.index().max(b.index()) + 1);
        if self.precedes(a, b) {
            return true;
        }
        self.explicit.push((a, b));
        let (ai, bi, w) = (a.index(), b.index(), self.words);
        let mut add_row = self.closure[bi * w..(bi + 1) * w].to_vec();
        add_row[bi / 64] |= 1u64 << (bi % 64);
        for x in 0..self.steps {
            if x == ai || self.get(x, ai) {
                for (cell, bits) in self.closure[x * w..(x + 1) * w].iter_mut().zip(&add_row) {
                    *cell |= bits;
                }
            }
        }
        true
    }

    /// Cycle-free witness for a violated acyclicity check: a step that
    /// precedes itself together with one path back to it.
    pub fn find_cycle(&self) -> Option<Vec<StepId>> {
        let start = (0..self.steps).find(|&i| self.get(i, i))?;
        // walk explicit edges inside the strongly connected component
        let mut path = vec![StepId(start as u32)];
        let mut current = start;
        for _ in 0..=self.steps {
            let next = self.explicit.iter().find(|(a, b)| {
                a.index() == current && (b.index() == start || self.get(b.index(), start))
            })?;
            if next.1.index() == start {
                path.push(StepId(start as u32));
                return Some(path);
            }
            current = next.1.index();
            path.push(next.1);
        }
        Some(path)
    }

    /// Topological order of `ids` with the lowest id first among ready steps.
    pub fn topological(&self, ids: &[StepId]) -> Vec<StepId> {
        let mut remaining: Vec<StepId> = ids.to_vec();
        remaining.sort();
        let mut out = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let pos = remaining
                .iter()
                .position(|&s| !remaining.iter().any(|&o| o != s && self.precedes(o, s)))
                .unwrap_or(0);
            out.push(remaining.remove(pos));
        }
        out
    }

    /// Calls `visit` on every linearization of `ids` consistent with the
    /// ordering, stopping after `limit` linearizations. Returns the number
    /// visited and whether enumeration was exhaustive.
    pub fn for_each_linearization(
        &self,
        ids: &[StepId],
        limit: usize,
        visit: &mut dyn FnMut(&[StepId]),
    ) -> (usize, bool) {
        let mut ids = ids.to_vec();
        ids.sort();
        let mut used = vec![false; ids.len()];
        let mut prefix = Vec::with_capacity(ids.len());
        let mut count = 0;
        let complete = self.linearize(&ids, &mut used, &mut prefix, limit, &mut count, visit);
        (count, complete)
    }

    fn linearize(
        &self,
        ids: &[StepId],
        used: &mut [bool],
        prefix: &mut Vec<StepId>,
        limit: usize,
        count: &mut usize,
        visit: &mut dyn FnMut(&[StepId]),
    ) -> bool {
        if prefix.len() == ids.len() {
            *count += 1;
            visit(prefix);
            return true;
        }
        for i in 0..ids.len() {
            if used[i] {
                continue;
            }
            let ready = (0..ids.len()).all(|j| used[j] || j == i || !self.precedes(ids[j], ids[i]));
            if !ready {
                continue;
            }
            if *count >= limit {
                return false;
            }
            used[i] = true;
            prefix.push(ids[i]);
            let ok = self.linearize(ids, used, prefix, limit, count, visit);
            prefix.pop();
            used[i] = false;
            if !ok {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(i: u32) -> StepId {
        StepId(i)
    }

    #[test]
    fn transitive_chain_blocks_reverse() {
        let mut o = Ordering::new();
        o.ensure(3);
        assert!(o.add(s(0), s(1)));
        assert!(o.add(s(1), s(2)));
        assert!(o.precedes(s(0), s(2)));
        assert!(!o.possibly_precedes(s(2), s(0)));
        assert!(!o.add(s(2), s(0)));
        assert_eq!(o.explicit().len(), 2);
    }

    #[test]
    fn irreflexive() {
        let o = Ordering::new();
        assert!(!o.possibly_precedes(s(4), s(4)));
    }

    #[test]
    fn from_pairs_detects_two_cycle() {
        let o = Ordering::from_pairs(2, &[(s(0), s(1)), (s(1), s(0))]);
        assert!(!o.is_acyclic());
        let cycle = o.find_cycle().unwrap();
        assert_eq!(cycle.first(), cycle.last());
    }

    #[test]
    fn grows_past_one_word() {
        let mut o = Ordering::new();
        for i in 0..100 {
            assert!(o.add(s(i), s(i + 1)));
        }
        assert!(o.precedes(s(0), s(100)));
        assert!(!o.possibly_precedes(s(100), s(3)));
    }

    #[test]
    fn linearizations_of_diamond() {
        let o = Ordering::from_pairs(4, &[(s(0), s(1)), (s(0), s(2)), (s(1), s(3)), (s(2), s(3))]);
        let mut seen = Vec::new();
        let (n, complete) = o.for_each_linearization(&[s(0), s(1), s(2), s(3)], 100, &mut |l| seen.push(l.to_vec()));
        assert_eq!((n, complete), (2, true));
        assert_eq!(seen[0], vec![s(0), s(1), s(2), s(3)]);
        assert_eq!(o.topological(&[s(3), s(2), s(1), s(0)]), vec![s(0), s(1), s(2), s(3)]);
    }

    #[test]
    fn diamond_closure_and_reduction() {
        let o = Ordering::from_pairs(4, &[(s(0), s(1)), (s(0), s(2)), (s(1), s(3)), (s(2), s(3)), (s(0), s(3))]);
        assert_eq!(o.closed_pairs().len(), 5);
        assert_eq!(o.reduced_pairs(), vec![(s(0), s(1)), (s(0), s(2)), (s(1), s(3)), (s(2), s(3))]);
    }

    proptest! {
        #[test]
        fn reduction_regenerates_closure(pairs in proptest::collection::vec((0u32..10, 0u32..10), 0..30)) {
            let mut o = Ordering::new();
            o.ensure(10);
            for (a, b) in &pairs {
                o.add(s(*a), s(*b));
            }
            let back = Ordering::from_pairs(10, &o.reduced_pairs());
            prop_assert_eq!(back.closed_pairs(), o.closed_pairs());
        }

        #[test]
        fn incremental_closure_matches_recomputed(pairs in proptest::collection::vec((0u32..12, 0u32..12), 0..40)) {
            let mut inc = Ordering::new();
            inc.ensure(12);
            for (a, b) in &pairs {
                inc.add(s(*a), s(*b));
            }
            let fresh = Ordering::from_pairs(12, inc.explicit());
            prop_assert!(inc.is_acyclic());
            for a in 0..12 {
                for b in 0..12 {
                    prop_assert_eq!(inc.precedes(s(a), s(b)), fresh.precedes(s(a), s(b)));
                }
            }
        }
    }
}
