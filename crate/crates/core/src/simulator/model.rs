use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::abstraction::abstract_hierarchy;
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::trace::{ActionKind, ElementPath, UiHierarchy, UiNode};
use crate::DEFAULT_D_MAX;

/// Text placeholder replaced by the simulated clock (`mm:ss`) when a screen
/// is rendered.
pub const CLOCK_PLACEHOLDER: &str = "${clock}";

/// Synthetic app: screen templates connected by element-triggered edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppModel {
    pub app: String,
    pub start_screen: String,
    pub screens: BTreeMap<String, ScreenTemplate>,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub variant_rules: BTreeMap<String, VariantRule>,
    #[serde(default)]
    pub explorer: ExplorerConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenTemplate {
    pub activity: String,
    pub root: UiNode,
}

/// Firing the element at `path` on screen `from` leads to `to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub path: ElementPath,
    #[serde(default = "default_action")]
    pub action: ActionKind,
    pub to: String,
    #[serde(default)]
    pub effect: Option<EdgeEffect>,
}

fn default_action() -> ActionKind {
    ActionKind::Click
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeEffect {
    /// Ends the session: the navigation history is dropped and restarts land
    /// on the edge's target from now on.
    Logout,
    /// Enters a hard-to-escape subspace.
    Trap(TrapSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapKind {
    Tarpit,
    AdFreeze,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    pub kind: TrapKind,
    /// No escape is possible before this much time has passed in the trap.
    pub min_dwell_ms: u64,
    /// Per-action escape probability once the dwell has elapsed.
    pub p_escape: f64,
    pub escape: Escape,
    /// The edge stops responding after this many entries.
    #[serde(default)]
    pub max_entries: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Escape {
    /// A back press that finally works, landing on the given screen.
    Back { to: String },
    /// The tool restarts the app.
    Restart,
}

/// Cosmetic variants of one screen: level `k` appends the first `k` leaves
/// under `anchor`. Levels are nested, so any two variants differ by leaf
/// insertions only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantRule {
    pub anchor: ElementPath,
    pub leaves: Vec<UiNode>,
    /// Relative weight of each level `0..=leaves.len()`; uniform when empty.
    #[serde(default)]
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorerConfig {
    /// Weight of a back press relative to weight 1 per enabled element.
    pub back_weight: f64,
    /// Record element paths; when false only tap coordinates are kept, as a
    /// widget-oblivious tool would.
    pub record_targets: bool,
}

impl Default for ExplorerConfig {
    fn default() -> Self {
        Self { back_weight: 0.1, record_targets: true }
    }
}

impl AppModel {
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Model(m));
        if !self.screens.contains_key(&self.start_screen) {
            return err(format!("start screen `{}` is not defined", self.start_screen));
        }
        for (i, e) in self.edges.iter().enumerate() {
            let Some(src) = self.screens.get(&e.from) else {
                return err(format!("edge {i} leaves unknown screen `{}`", e.from));
            };
            if !self.screens.contains_key(&e.to) {
                return err(format!("edge {i} targets unknown screen `{}`", e.to));
            }
            if e.action.is_untargeted() {
                return err(format!("edge {i} uses untargeted action {:?}", e.action));
            }
            if src.root.resolve(&e.path).is_none() {
                return err(format!("edge {i}: element path does not resolve on `{}`", e.from));
            }
            if let Some(EdgeEffect::Trap(trap)) = &e.effect {
                if let Escape::Back { to } = &trap.escape {
                    if !self.screens.contains_key(to) {
                        return err(format!("edge {i}: trap escape targets unknown screen `{to}`"));
                    }
                }
                if !(0.0..=1.0).contains(&trap.p_escape) {
                    return err(format!("edge {i}: p_escape {} outside [0, 1]", trap.p_escape));
                }
            }
        }
        for (screen, rule) in &self.variant_rules {
            let Some(template) = self.screens.get(screen) else {
                return err(format!("variant rule for unknown screen `{screen}`"));
            };
            if template.root.resolve(&rule.anchor).is_none() {
                return err(format!("variant anchor does not resolve on `{screen}`"));
            }
            if rule.leaves.len() > DEFAULT_D_MAX as usize {
                return err(format!("variant rule of `{screen}` adds more than {DEFAULT_D_MAX} nodes"));
            }
            if rule.leaves.iter().any(|l| !l.children.is_empty()) {
                return err(format!("variant rule of `{screen}` adds non-leaf nodes"));
            }
            if !rule.weights.is_empty() && rule.weights.len() != rule.leaves.len() + 1 {
                return err(format!("variant rule of `{screen}` needs {} weights", rule.leaves.len() + 1));
            }
        }
        let reachable = self.reachable_from(&self.start_screen);
        if let Some(lost) = self.screens.keys().find(|s| !reachable.contains(s.as_str())) {
            return err(format!("screen `{lost}` is unreachable from `{}`", self.start_screen));
        }
        Ok(())
    }

    /// Screens reachable from `start` through edges (and trap escapes).
    pub fn reachable_from(&self, start: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([String::from(start)]);
        while let Some(s) = queue.pop_front() {
            if !seen.insert(s.clone()) {
                continue;
            }
            for e in self.edges.iter().filter(|e| e.from == s) {
                queue.push_back(e.to.clone());
                if let Some(EdgeEffect::Trap(TrapSpec { escape: Escape::Back { to }, .. })) = &e.effect {
                    queue.push_back(to.clone());
                }
            }
        }
        seen
    }

    /// Screens reachable from `start` through plain edges only.
    pub(crate) fn closure(&self, start: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([String::from(start)]);
        while let Some(s) = queue.pop_front() {
            if seen.insert(s.clone()) {
                queue.extend(self.edges.iter().filter(|e| e.from == s).map(|e| e.to.clone()));
            }
        }
        seen
    }

    /// Concrete hierarchy of `screen` at variant `level`, without clock or
    /// typed text substitutions.
    pub fn render_variant(&self, screen: &str, level: usize) -> Option<UiHierarchy> {
        let template = self.screens.get(screen)?;
        let mut root = template.root.clone();
        if let Some(rule) = self.variant_rules.get(screen) {
            if let Some(anchor) = root.resolve_mut(&rule.anchor) {
                anchor.children.extend(rule.leaves.iter().take(level).cloned());
            }
        }
        Some(UiHierarchy::new(template.activity.clone(), root))
    }

    pub fn variant_levels(&self, screen: &str) -> usize {
        self.variant_rules.get(screen).map_or(0, |r| r.leaves.len())
    }

    /// Fingerprints of every abstract screen the model can render.
    pub fn all_fingerprints(&self) -> BTreeSet<Fingerprint> {
        let mut out = BTreeSet::new();
        for name in self.screens.keys() {
            for level in 0..=self.variant_levels(name) {
                if let Some(h) = self.render_variant(name, level) {
                    out.insert(abstract_hierarchy(&h).fingerprint);
                }
            }
        }
        out
    }
}
