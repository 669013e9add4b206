//! Trace data model: concrete UI hierarchies, actions and timestamped entries.
//!
//! Entry indices in every public API are 1-based (`1..=N`); storage is a
//! plain `Vec`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Pixel rectangle, serialized as `[left, top, right, bottom]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "[i32; 4]", into = "[i32; 4]")]
pub struct Bounds {
    pub left: i32,
    pub top: i32,
    pub right: i32,
    pub bottom: i32,
}

impl Bounds {
    pub const fn new(left: i32, top: i32, right: i32, bottom: i32) -> Self {
        Self { left, top, right, bottom }
    }

    pub fn is_well_formed(&self) -> bool {
        self.left <= self.right && self.top <= self.bottom
    }

    pub fn width(&self) -> i64 {
        i64::from(self.right) - i64::from(self.left)
    }

    pub fn height(&self) -> i64 {
        i64::from(self.bottom) - i64::from(self.top)
    }

    pub fn is_degenerate(&self) -> bool {
        self.width() == 0 || self.height() == 0
    }

    /// Closed-rectangle intersection, `None` when the rectangles are apart.
    pub fn intersection(&self, other: &Bounds) -> Option<Bounds> {
        let b = Bounds {
            left: self.left.max(other.left),
            top: self.top.max(other.top),
            right: self.right.min(other.right),
            bottom: self.bottom.min(other.bottom),
        };
        b.is_well_formed().then_some(b)
    }

    /// Inclusive on all four edges.
    pub fn contains(&self, x: i32, y: i32) -> bool {
        self.left <= x && x <= self.right && self.top <= y && y <= self.bottom
    }

    pub fn center(&self) -> (i32, i32) {
        (
            ((i64::from(self.left) + i64::from(self.right)) / 2) as i32,
            ((i64::from(self.top) + i64::from(self.bottom)) / 2) as i32,
        )
    }
}

impl From<[i32; 4]> for Bounds {
    fn from([left, top, right, bottom]: [i32; 4]) -> Self {
        Self { left, top, right, bottom }
    }
}

impl From<Bounds> for [i32; 4] {
    fn from(b: Bounds) -> Self {
        [b.left, b.top, b.right, b.bottom]
    }
}

/// One concrete UI element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UiNode {
    #[serde(rename = "type")]
    pub element_type: String,
    #[serde(rename = "id")]
    pub element_id: Option<String>,
    pub visible: bool,
    pub bounds: Bounds,
    pub text: Option<String>,
    #[serde(default)]
    pub children: Vec<UiNode>,
}

impl UiNode {
    pub fn new(element_type: impl Into<String>, element_id: Option<&str>, bounds: Bounds) -> Self {
        Self {
            element_type: element_type.into(),
            element_id: element_id.map(String::from),
            visible: true,
            bounds,
            text: None,
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<UiNode>) -> Self {
        self.children = children;
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn hidden(mut self) -> Self {
        self.visible = false;
        self
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(UiNode::node_count).sum::<usize>()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn matches(&self, step: &PathStep) -> bool {
        self.element_type == step.element_type && self.element_id == step.element_id
    }

    /// Follows `path` from this node; see [`resolve_path`].
    pub fn resolve(&self, path: &ElementPath) -> Option<&UiNode> {
        let mut node = self;
        for step in &path.steps {
            node = node.children.get(step.child_ordinal as usize)?;
            if !node.matches(step) {
                return None;
            }
        }
        Some(node)
    }

    pub fn resolve_mut(&mut self, path: &ElementPath) -> Option<&mut UiNode> {
        let mut node = self;
        for step in &path.steps {
            node = node.children.get_mut(step.child_ordinal as usize)?;
            if !node.matches(step) {
                return None;
            }
        }
        Some(node)
    }

    /// Paths of every leaf whose bounds contain `(x, y)` and whose ancestors
    /// are all visible.
    pub fn visible_leaves_at(&self, x: i32, y: i32) -> Vec<ElementPath> {
        fn walk(node: &UiNode, x: i32, y: i32, path: &mut Vec<PathStep>, out: &mut Vec<ElementPath>) {
            if !node.visible {
                return;
            }
            if node.is_leaf() {
                if node.bounds.contains(x, y) {
                    out.push(ElementPath { steps: path.clone() });
                }
                return;
            }
            for (ordinal, child) in node.children.iter().enumerate() {
                path.push(PathStep::for_node(child, ordinal as u32));
                walk(child, x, y, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, x, y, &mut Vec::new(), &mut out);
        out
    }

    /// Path to the first node (preorder) whose id is `id`.
    pub fn path_to_id(&self, id: &str) -> Option<ElementPath> {
        fn walk(node: &UiNode, id: &str, path: &mut Vec<PathStep>) -> bool {
            for (ordinal, child) in node.children.iter().enumerate() {
                path.push(PathStep::for_node(child, ordinal as u32));
                if child.element_id.as_deref() == Some(id) || walk(child, id, path) {
                    return true;
                }
                path.pop();
            }
            false
        }
        if self.element_id.as_deref() == Some(id) {
            return Some(ElementPath::root());
        }
        let mut path = Vec::new();
        walk(self, id, &mut path).then(|| ElementPath::new(path))
    }

    fn check_bounds(&self) -> core::result::Result<(), String> {
        if !self.bounds.is_well_formed() {
            return Err(format!(
                "element `{}` has malformed bounds {:?}",
                self.element_type, self.bounds
            ));
        }
        self.children.iter().try_for_each(UiNode::check_bounds)
    }
}

/// The UI content of one screen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UiHierarchy {
    pub activity: String,
    pub root: UiNode,
}

impl UiHierarchy {
    pub fn new(activity: impl Into<String>, root: UiNode) -> Self {
        Self { activity: activity.into(), root }
    }
}

/// Returns the node reached by following `path` from the root, or `None`
/// when any step's ordinal, type or id does not match.
pub fn resolve_path<'a>(h: &'a UiHierarchy, path: &ElementPath) -> Option<&'a UiNode> {
    h.root.resolve(path)
}

/// One step of an [`ElementPath`], serialized as `[type, id|null, ordinal]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(String, Option<String>, u32)", into = "(String, Option<String>, u32)")]
pub struct PathStep {
    pub element_type: String,
    pub element_id: Option<String>,
    pub child_ordinal: u32,
}

impl PathStep {
    pub fn new(element_type: impl Into<String>, element_id: Option<&str>, child_ordinal: u32) -> Self {
        Self {
            element_type: element_type.into(),
            element_id: element_id.map(String::from),
            child_ordinal,
        }
    }

    pub fn for_node(node: &UiNode, child_ordinal: u32) -> Self {
        Self {
            element_type: node.element_type.clone(),
            element_id: node.element_id.clone(),
            child_ordinal,
        }
    }
}

impl From<(String, Option<String>, u32)> for PathStep {
    fn from((element_type, element_id, child_ordinal): (String, Option<String>, u32)) -> Self {
        Self { element_type, element_id, child_ordinal }
    }
}

impl From<PathStep> for (String, Option<String>, u32) {
    fn from(s: PathStep) -> Self {
        (s.element_type, s.element_id, s.child_ordinal)
    }
}

/// Path from the root element to a descendant. The empty path is the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementPath {
    pub steps: Vec<PathStep>,
}

impl ElementPath {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn new(steps: Vec<PathStep>) -> Self {
        Self { steps }
    }

    pub fn child(&self, step: PathStep) -> Self {
        let mut steps = self.steps.clone();
        steps.push(step);
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// `Type#id:ordinal` steps joined by `/`; the root path prints as `/`.
impl core::fmt::Display for ElementPath {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.steps.is_empty() {
            return f.write_str("/");
        }
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            f.write_str(&step.element_type)?;
            if let Some(id) = &step.element_id {
                write!(f, "#{id}")?;
            }
            write!(f, ":{}", step.child_ordinal)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Click,
    LongClick,
    TextInput,
    Back,
    Restart,
    None,
}

impl ActionKind {
    /// Kinds that never carry a target element.
    pub fn is_untargeted(self) -> bool {
        matches!(self, ActionKind::Back | ActionKind::Restart | ActionKind::None)
    }
}

/// The action executed on a screen, producing the next entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub kind: ActionKind,
    pub target_path: Option<ElementPath>,
    pub point: Option<(i32, i32)>,
    /// Typed string for `text_input`; never part of screen identity.
    pub text: Option<String>,
}

impl Action {
    pub fn untargeted(kind: ActionKind) -> Self {
        Self { kind, target_path: None, point: None, text: None }
    }

    pub fn none() -> Self {
        Self::untargeted(ActionKind::None)
    }

    pub fn back() -> Self {
        Self::untargeted(ActionKind::Back)
    }

    pub fn restart() -> Self {
        Self::untargeted(ActionKind::Restart)
    }

    pub fn click(path: ElementPath) -> Self {
        Self { kind: ActionKind::Click, target_path: Some(path), point: None, text: None }
    }

    pub fn tap(x: i32, y: i32) -> Self {
        Self { kind: ActionKind::Click, target_path: None, point: Some((x, y)), text: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub timestamp_ms: u64,
    pub hierarchy: UiHierarchy,
    pub action: Action,
}

#[derive(Deserialize)]
struct EntryWire {
    timestamp_ms: u64,
    activity: String,
    hierarchy: UiNode,
    action: Action,
}

impl From<EntryWire> for TraceEntry {
    fn from(w: EntryWire) -> Self {
        TraceEntry {
            timestamp_ms: w.timestamp_ms,
            hierarchy: UiHierarchy { activity: w.activity, root: w.hierarchy },
            action: w.action,
        }
    }
}

impl Serialize for TraceEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("TraceEntry", 4)?;
        s.serialize_field("timestamp_ms", &self.timestamp_ms)?;
        s.serialize_field("activity", &self.hierarchy.activity)?;
        s.serialize_field("hierarchy", &self.hierarchy.root)?;
        s.serialize_field("action", &self.action)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for TraceEntry {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        EntryWire::deserialize(deserializer).map(TraceEntry::from)
    }
}

/// A recorded test run. Construct through [`Trace::new`] or deserialize and
/// call [`Trace::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub tool: String,
    pub app: String,
    pub trace_id: String,
    pub entries: Vec<TraceEntry>,
}

impl Trace {
    /// Builds a trace and checks all invariants.
    pub fn new(
        tool: impl Into<String>,
        app: impl Into<String>,
        trace_id: impl Into<String>,
        entries: Vec<TraceEntry>,
    ) -> Result<Self> {
        let trace = Self { tool: tool.into(), app: app.into(), trace_id: trace_id.into(), entries };
        trace.validate()?;
        Ok(trace)
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::Invariant { index: 0, reason: "trace has no entries".into() });
        }
        let last = self.entries.len();
        let mut prev_ts = 0;
        for (i, entry) in self.entries.iter().enumerate() {
            let index = i + 1;
            let invariant = |reason: String| Error::Invariant { index, reason };
            if index > 1 && entry.timestamp_ms < prev_ts {
                return Err(invariant(format!(
                    "timestamp {} precedes previous timestamp {}",
                    entry.timestamp_ms, prev_ts
                )));
            }
            prev_ts = entry.timestamp_ms;
            entry.hierarchy.root.check_bounds().map_err(invariant)?;
            let action = &entry.action;
            if action.kind == ActionKind::None && index != last {
                return Err(invariant("action `none` before the final entry".into()));
            }
            if let Some(path) = &action.target_path {
                if action.kind.is_untargeted() {
                    return Err(invariant(format!("{:?} action carries a target path", action.kind)));
                }
                if entry.hierarchy.root.resolve(path).is_none() {
                    return Err(invariant("target path does not resolve in the screen's hierarchy".into()));
                }
            }
        }
        Ok(())
    }

    /// Number of entries `N`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry `i` (1-based). Panics when out of range.
    pub fn entry(&self, i: usize) -> &TraceEntry {
        &self.entries[i - 1]
    }

    pub fn get(&self, i: usize) -> Option<&TraceEntry> {
        i.checked_sub(1).and_then(|j| self.entries.get(j))
    }

    /// `t_i` (1-based).
    pub fn timestamp(&self, i: usize) -> u64 {
        self.entries[i - 1].timestamp_ms
    }

    /// `t_r - t_l` for a 1-based closed range.
    pub fn span_ms(&self, l: usize, r: usize) -> u64 {
        self.timestamp(r) - self.timestamp(l)
    }

    pub fn check_range(&self, l: usize, r: usize) -> Result<()> {
        if l == 0 || l > r || r > self.len() {
            return Err(Error::Index { start: l, end: r, len: self.len() });
        }
        Ok(())
    }
}
