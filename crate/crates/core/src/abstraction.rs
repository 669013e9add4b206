//! Concrete-to-abstract hierarchy conversion and exact screen identity.
//!
//! An abstract hierarchy keeps the activity name, the tree structure, and the
//! type and id of every retained element. An element is retained when it is
//! visible and its bounds intersect the on-screen region of its (retained)
//! parent; a pruned element takes its whole subtree with it. The root is the
//! window and defines the screen region, so it is always retained.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::fingerprint::Fingerprint;
use crate::trace::{Bounds, Trace, UiHierarchy, UiNode};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbstractNode {
    pub element_type: String,
    pub element_id: Option<String>,
    pub children: Vec<AbstractNode>,
}

impl AbstractNode {
    pub fn new(element_type: impl Into<String>, element_id: Option<&str>, children: Vec<AbstractNode>) -> Self {
        Self { element_type: element_type.into(), element_id: element_id.map(String::from), children }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(AbstractNode::node_count).sum::<usize>()
    }
}

#[derive(Debug, Clone)]
pub struct AbstractHierarchy {
    pub activity: String,
    pub root: AbstractNode,
    /// Number of nodes, `|h|`.
    pub size: usize,
    pub fingerprint: Fingerprint,
}

impl PartialEq for AbstractHierarchy {
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint
            && self.size == other.size
            && self.activity == other.activity
            && self.root == other.root
    }
}

impl Eq for AbstractHierarchy {}

impl AbstractHierarchy {
    pub fn new(activity: impl Into<String>, root: AbstractNode) -> Self {
        let activity = activity.into();
        let size = root.node_count();
        let fingerprint = fingerprint_of(&activity, &root);
        Self { activity, root, size, fingerprint }
    }
}

/// Canonical preorder encoding: activity, then per node its type, id (or a
/// sentinel) and child count. Strings are length-prefixed.
fn fingerprint_of(activity: &str, root: &AbstractNode) -> Fingerprint {
    fn put_str(buf: &mut Vec<u8>, s: &str) {
        buf.extend_from_slice(&(s.len() as u32).to_le_bytes());
        buf.extend_from_slice(s.as_bytes());
    }
    fn put_node(buf: &mut Vec<u8>, node: &AbstractNode) {
        put_str(buf, &node.element_type);
        match &node.element_id {
            Some(id) => {
                buf.push(1);
                put_str(buf, id);
            }
            None => buf.push(0),
        }
        buf.extend_from_slice(&(node.children.len() as u32).to_le_bytes());
        for child in &node.children {
            put_node(buf, child);
        }
    }
    let mut buf = Vec::with_capacity(64);
    put_str(&mut buf, activity);
    put_node(&mut buf, root);
    Fingerprint::of_bytes(&buf)
}

/// Whether an element with `bounds` counts as on-screen inside `region`.
///
/// Closed intersection with positive area, or a shared edge of positive
/// length. A zero-area element is kept whenever it touches the region.
pub fn intersects_region(bounds: &Bounds, region: &Bounds) -> bool {
    let Some(overlap) = bounds.intersection(region) else {
        return false;
    };
    overlap.width() > 0 || overlap.height() > 0 || bounds.is_degenerate()
}

fn abstract_children(node: &UiNode, region: &Bounds) -> Vec<AbstractNode> {
    node.children
        .iter()
        .filter(|c| c.visible && intersects_region(&c.bounds, region))
        .map(|c| {
            // non-empty: intersects_region succeeded
            let child_region = c.bounds.intersection(region).unwrap_or(c.bounds);
            AbstractNode {
                element_type: c.element_type.clone(),
                element_id: c.element_id.clone(),
                children: abstract_children(c, &child_region),
            }
        })
        .collect()
}

/// Abstracts one concrete hierarchy.
pub fn abstract_hierarchy(h: &UiHierarchy) -> AbstractHierarchy {
    let root = &h.root;
    let abstract_root = AbstractNode {
        element_type: root.element_type.clone(),
        element_id: root.element_id.clone(),
        children: abstract_children(root, &root.bounds),
    };
    AbstractHierarchy::new(h.activity.clone(), abstract_root)
}

/// Dense id of a distinct abstract screen within one [`ScreenIndex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScreenId(pub u32);

impl ScreenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Every entry of a trace abstracted once and interned by structural
/// identity. Fingerprint matches are confirmed by full comparison, so hash
/// collisions cannot merge different screens.
#[derive(Debug, Clone)]
pub struct ScreenIndex {
    ids: Vec<ScreenId>,
    screens: Vec<AbstractHierarchy>,
}

impl ScreenIndex {
    pub fn build(trace: &Trace) -> Self {
        Self::from_hierarchies(trace.entries.iter().map(|e| abstract_hierarchy(&e.hierarchy)))
    }

    pub fn from_hierarchies(hierarchies: impl IntoIterator<Item = AbstractHierarchy>) -> Self {
        let mut by_fp: BTreeMap<Fingerprint, Vec<ScreenId>> = BTreeMap::new();
        let mut screens: Vec<AbstractHierarchy> = Vec::new();
        let mut ids = Vec::new();
        for h in hierarchies {
            let bucket = by_fp.entry(h.fingerprint).or_default();
            let id = match bucket.iter().find(|id| screens[id.index()] == h) {
                Some(id) => *id,
                None => {
                    let id = ScreenId(screens.len() as u32);
                    bucket.push(id);
                    screens.push(h);
                    id
                }
            };
            ids.push(id);
        }
        Self { ids, screens }
    }

    /// Screen ids in entry order (0-based storage).
    pub fn ids(&self) -> &[ScreenId] {
        &self.ids
    }

    /// Screen id of entry `i` (1-based).
    pub fn id_at(&self, i: usize) -> ScreenId {
        self.ids[i - 1]
    }

    pub fn screen(&self, id: ScreenId) -> &AbstractHierarchy {
        &self.screens[id.index()]
    }

    pub fn screens(&self) -> &[AbstractHierarchy] {
        &self.screens
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn distinct_count(&self) -> usize {
        self.screens.len()
    }

    /// `{S[l, r]}` as screen ids (1-based closed range).
    pub fn distinct_screens(&self, l: usize, r: usize) -> Result<BTreeSet<ScreenId>> {
        if l == 0 || l > r || r > self.ids.len() {
            return Err(crate::Error::Index { start: l, end: r, len: self.ids.len() });
        }
        Ok(self.ids[l - 1..r].iter().copied().collect())
    }
}

/// `{S[l, r]}` as fingerprints of the abstract screens.
pub fn distinct_screens(trace: &Trace, l: usize, r: usize) -> Result<BTreeSet<Fingerprint>> {
    trace.check_range(l, r)?;
    Ok(trace.entries[l - 1..r]
        .iter()
        .map(|e| abstract_hierarchy(&e.hierarchy).fingerprint)
        .collect())
}
