//! Screen similarity and greedy screen grouping.
//!
//! Two abstract screens are similar when one can be obtained from the other
//! by inserting at most `d_max` nodes: the LCS of their preorder
//! `(props, depth)` token sequences must cover the smaller tree entirely and
//! leave at most `d_max` tokens of the larger one unmatched.
//!
//! [`merge`] groups a set of distinct screens greedily: screens are visited
//! smallest first, each unassigned screen becomes a group root and absorbs
//! every still-unassigned screen similar to it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::abstraction::{AbstractHierarchy, AbstractNode};
use crate::fingerprint::Fingerprint;

/// `(Props(node), Depth(node))` of one preorder-visited node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeToken {
    pub element_type: String,
    pub element_id: Option<String>,
    pub depth: u32,
}

/// Preorder depth-first token sequence; the root has depth 0.
pub fn token_sequence(h: &AbstractHierarchy) -> Vec<NodeToken> {
    let mut out = Vec::with_capacity(h.size);
    let mut stack: Vec<(&AbstractNode, u32)> = vec![(&h.root, 0)];
    while let Some((node, depth)) = stack.pop() {
        out.push(NodeToken {
            element_type: node.element_type.clone(),
            element_id: node.element_id.clone(),
            depth,
        });
        stack.extend(node.children.iter().rev().map(|c| (c, depth + 1)));
    }
    out
}

/// Bit-parallel match table of one sequence: for every symbol, the bitset
/// of positions holding it.
#[derive(Debug, Clone)]
struct PatternMasks {
    len: usize,
    words: usize,
    symbols: Vec<u32>,
    masks: Vec<u64>,
}

impl PatternMasks {
    fn new(seq: &[u32]) -> Self {
        let words = seq.len().div_ceil(64).max(1);
        let mut symbols: Vec<u32> = seq.to_vec();
        symbols.sort_unstable();
        symbols.dedup();
        let mut masks = vec![0u64; symbols.len() * words];
        for (pos, sym) in seq.iter().enumerate() {
            let k = symbols.binary_search(sym).unwrap_or_else(|_| unreachable!());
            masks[k * words + pos / 64] |= 1 << (pos % 64);
        }
        Self { len: seq.len(), words, symbols, masks }
    }

    fn mask(&self, sym: u32) -> Option<&[u64]> {
        let k = self.symbols.binary_search(&sym).ok()?;
        Some(&self.masks[k * self.words..(k + 1) * self.words])
    }

    /// LCS length against `text` in `O(|text| * ceil(len / 64))`.
    fn lcs_len(&self, text: &[u32], scratch: &mut Vec<u64>) -> usize {
        scratch.clear();
        scratch.resize(self.words, !0);
        let v = scratch.as_mut_slice();
        for &c in text {
            let Some(pm) = self.mask(c) else { continue };
            let mut carry = 0u64;
            for (vk, &mk) in v.iter_mut().zip(pm) {
                let u = *vk & mk;
                let (s1, c1) = vk.overflowing_add(u);
                let (s2, c2) = s1.overflowing_add(carry);
                carry = u64::from(c1 | c2);
                *vk = s2 | (*vk & !mk);
            }
        }
        let full = self.len / 64;
        let mut ones: usize = v[..full].iter().map(|w| w.count_ones() as usize).sum();
        let rem = self.len % 64;
        if rem > 0 {
            ones += (v[full] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        self.len - ones
    }
}

/// Length of the longest common subsequence of two symbol sequences, using
/// the bit-vector formulation over the first sequence.
pub fn lcs_len(a: &[u32], b: &[u32]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    PatternMasks::new(a).lcs_len(b, &mut Vec::new())
}

fn decide(len1: usize, len2: usize, lcs: usize, d_max: u32) -> bool {
    if lcs < len1.min(len2) {
        return false;
    }
    len1.max(len2) - lcs <= d_max as usize
}

/// Similarity check of two abstract hierarchies.
pub fn sim_check(h1: &AbstractHierarchy, h2: &AbstractHierarchy, d_max: u32) -> bool {
    if h1.size.abs_diff(h2.size) > d_max as usize {
        return false;
    }
    if h1 == h2 {
        return true;
    }
    let mut interner = TokenInterner::default();
    let s1 = interner.intern_all(h1);
    let s2 = interner.intern_all(h2);
    decide(s1.len(), s2.len(), lcs_len(&s1, &s2), d_max)
}

#[derive(Default)]
struct TokenInterner {
    ids: BTreeMap<NodeToken, u32>,
}

impl TokenInterner {
    fn intern_all(&mut self, h: &AbstractHierarchy) -> Vec<u32> {
        token_sequence(h)
            .into_iter()
            .map(|t| {
                let next = self.ids.len() as u32;
                *self.ids.entry(t).or_insert(next)
            })
            .collect()
    }
}

/// Similarity oracle over a fixed list of screens, with prepared token
/// tables and a memo of every evaluated pair.
pub struct SimChecker<'a> {
    screens: &'a [AbstractHierarchy],
    tokens: Vec<Vec<u32>>,
    patterns: Vec<PatternMasks>,
    d_max: u32,
    memo: HashMap<(u32, u32), bool>,
    scratch: Vec<u64>,
    lcs_runs: u64,
}

impl<'a> SimChecker<'a> {
    pub fn new(screens: &'a [AbstractHierarchy], d_max: u32) -> Self {
        let mut interner = TokenInterner::default();
        let tokens: Vec<Vec<u32>> = screens.iter().map(|h| interner.intern_all(h)).collect();
        let patterns = tokens.iter().map(|t| PatternMasks::new(t)).collect();
        Self {
            screens,
            tokens,
            patterns,
            d_max,
            memo: HashMap::new(),
            scratch: Vec::new(),
            lcs_runs: 0,
        }
    }

    pub fn screens(&self) -> &'a [AbstractHierarchy] {
        self.screens
    }

    pub fn d_max(&self) -> u32 {
        self.d_max
    }

    /// Number of LCS evaluations performed so far (memo misses past the
    /// early exits).
    pub fn lcs_runs(&self) -> u64 {
        self.lcs_runs
    }

    /// Whether screens `i` and `j` are similar.
    pub fn check(&mut self, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        let (h1, h2) = (&self.screens[i], &self.screens[j]);
        if h1.size.abs_diff(h2.size) > self.d_max as usize {
            return false;
        }
        if h1.fingerprint == h2.fingerprint && h1 == h2 {
            return true;
        }
        let key = (i.min(j) as u32, i.max(j) as u32);
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let lcs = self.patterns[i].lcs_len(&self.tokens[j], &mut self.scratch);
        self.lcs_runs += 1;
        let similar = decide(self.tokens[i].len(), self.tokens[j].len(), lcs, self.d_max);
        self.memo.insert(key, similar);
        similar
    }

    /// Indices of `members` in processing order: size ascending, ties by
    /// fingerprint.
    pub fn processing_order(&self, members: &[usize]) -> Vec<usize> {
        let mut order = members.to_vec();
        order.sort_by_key(|&i| (self.screens[i].size, self.screens[i].fingerprint, i));
        order.dedup();
        order
    }

    /// Greedy grouping of `members`; returns `(member, root)` pairs keyed by
    /// member index.
    pub fn merge_subset(&mut self, members: &[usize]) -> BTreeMap<usize, usize> {
        let order = self.processing_order(members);
        let mut root: Vec<Option<usize>> = vec![None; order.len()];
        for a in 0..order.len() {
            if root[a].is_some() {
                continue;
            }
            let h = order[a];
            root[a] = Some(h);
            // everything before `a` is already assigned
            for b in a + 1..order.len() {
                if root[b].is_none() && self.check(h, order[b]) {
                    root[b] = Some(h);
                }
            }
        }
        order
            .into_iter()
            .zip(root)
            .map(|(m, r)| (m, r.unwrap_or(m)))
            .collect()
    }

    /// Greedy grouping of all screens; `result[i]` is the root of screen `i`.
    pub fn merge_all(&mut self) -> Vec<usize> {
        let members: Vec<usize> = (0..self.screens.len()).collect();
        let map = self.merge_subset(&members);
        (0..self.screens.len()).map(|i| map[&i]).collect()
    }
}

/// Group assignment produced by [`merge`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MergeMap {
    pub assignment: BTreeMap<Fingerprint, Fingerprint>,
    pub roots: BTreeSet<Fingerprint>,
}

impl MergeMap {
    pub fn root_of(&self, fp: &Fingerprint) -> Option<Fingerprint> {
        self.assignment.get(fp).copied()
    }

    pub fn group_count(&self) -> usize {
        self.roots.len()
    }
}

/// Groups pairwise-distinct screens with the greedy schedule.
pub fn merge(hs: &[AbstractHierarchy], d_max: u32) -> MergeMap {
    let mut checker = SimChecker::new(hs, d_max);
    let roots = checker.merge_all();
    let mut map = MergeMap::default();
    for (i, r) in roots.into_iter().enumerate() {
        map.assignment.insert(hs[i].fingerprint, hs[r].fingerprint);
        map.roots.insert(hs[r].fingerprint);
    }
    map
}
