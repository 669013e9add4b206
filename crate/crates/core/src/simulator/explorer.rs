use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{AppModel, EdgeEffect, Escape, TrapKind, TrapSpec, CLOCK_PLACEHOLDER};
use super::{trace_label, DestructiveAction, GroundTruthLog, ScenarioSpec, SimulationRun, TruthKind, TruthRegion};
use crate::abstraction::abstract_hierarchy;
use crate::error::Result;
use crate::fingerprint::Fingerprint;
use crate::fixes::{FixDirective, FixKind};
use crate::trace::{Action, ActionKind, ElementPath, Trace, TraceEntry, UiHierarchy, UiNode};

const MAX_STACK: usize = 32;

struct Trapped<'m> {
    spec: &'m TrapSpec,
    entered_ms: u64,
    first: usize,
    screens: BTreeSet<String>,
}

struct Fixes {
    disabled: BTreeMap<Fingerprint, BTreeSet<ElementPath>>,
    restart: BTreeSet<Fingerprint>,
}

impl Fixes {
    fn new(directives: &[FixDirective]) -> Self {
        let mut disabled: BTreeMap<Fingerprint, BTreeSet<ElementPath>> = BTreeMap::new();
        let mut restart = BTreeSet::new();
        for d in directives {
            match (d.kind, &d.element_path) {
                (FixKind::DisableElement, Some(path)) => {
                    disabled.entry(d.screen_fingerprint).or_default().insert(path.clone());
                }
                (FixKind::DisableElement, None) => {}
                (FixKind::RestartApp, _) => {
                    restart.insert(d.screen_fingerprint);
                }
            }
        }
        Self { disabled, restart }
    }
}

fn clock(t_ms: u64) -> String {
    let s = t_ms / 1000;
    format!("{:02}:{:02}", s / 60 % 100, s % 60)
}

fn fill_clock(node: &mut UiNode, text: &str) {
    if node.text.as_deref() == Some(CLOCK_PLACEHOLDER) {
        node.text = Some(text.into());
    }
    node.children.iter_mut().for_each(|c| fill_clock(c, text));
}

fn pick_level(rng: &mut ChaCha8Rng, levels: usize, weights: &[f64]) -> usize {
    if levels == 0 {
        return 0;
    }
    if weights.is_empty() {
        return rng.gen_range(0..=levels);
    }
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    levels
}

pub(super) fn run(model: &AppModel, spec: &ScenarioSpec, directives: &[FixDirective]) -> Result<SimulationRun> {
    let steps = spec.steps();
    let period = spec.action_period_ms;
    let fixes = Fixes::new(directives);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut out_edges: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, e) in model.edges.iter().enumerate() {
        out_edges.entry(e.from.as_str()).or_default().push(i);
    }

    let mut current = model.start_screen.clone();
    let mut restart_to = model.start_screen.clone();
    let mut stack: Vec<String> = Vec::new();
    let mut trapped: Option<Trapped> = None;
    let mut trap_entries: BTreeMap<usize, u32> = BTreeMap::new();
    let mut typed: BTreeMap<(String, ElementPath), String> = BTreeMap::new();
    let mut typed_count = 0u32;
    let mut coverage = BTreeSet::new();
    let mut truth = GroundTruthLog::default();
    let mut logout_at: Option<usize> = None;
    let mut entries = Vec::with_capacity(steps);

    let close = |truth: &mut GroundTruthLog, t: Trapped, end: usize| {
        let kind = match t.spec.kind {
            TrapKind::Tarpit => TruthKind::Tarpit,
            TrapKind::AdFreeze => TruthKind::AdFreeze,
        };
        let region = TruthRegion { kind, start: t.first, end };
        let span = (end - t.first) as u64 * period;
        if span >= spec.t_min_ms {
            truth.regions.push(region);
        } else {
            truth.short_regions.push(region);
        }
    };

    for i in 0..steps {
        let index = i + 1;
        let now = i as u64 * period;

        let (levels, weights) = match model.variant_rules.get(&current) {
            Some(rule) => (rule.leaves.len(), rule.weights.as_slice()),
            None => (0, &[][..]),
        };
        let level = pick_level(&mut rng, levels, weights);
        let mut hierarchy: UiHierarchy = model.render_variant(&current, level).expect("validated screen");
        fill_clock(&mut hierarchy.root, &clock(now));
        for ((screen, path), text) in &typed {
            if *screen == current {
                if let Some(node) = hierarchy.root.resolve_mut(path) {
                    node.text = Some(text.clone());
                }
            }
        }
        let fingerprint = abstract_hierarchy(&hierarchy).fingerprint;
        coverage.insert(fingerprint);

        if index == steps {
            entries.push(TraceEntry { timestamp_ms: now, hierarchy, action: Action::none() });
            break;
        }

        let (action, next) = if fixes.restart.contains(&fingerprint) {
            stack.clear();
            if let Some(t) = trapped.take() {
                close(&mut truth, t, index);
            }
            (Action::restart(), restart_to.clone())
        } else if trapped
            .as_ref()
            .is_some_and(|t| now - t.entered_ms >= t.spec.min_dwell_ms && rng.gen_bool(t.spec.p_escape))
        {
            let t = trapped.take().expect("checked above");
            let escape = t.spec.escape.clone();
            close(&mut truth, t, index);
            stack.clear();
            match escape {
                Escape::Back { to } => (Action::back(), to),
                Escape::Restart => (Action::restart(), restart_to.clone()),
            }
        } else {
            let disabled = fixes.disabled.get(&fingerprint);
            let candidates: Vec<usize> = out_edges
                .get(current.as_str())
                .map(|v| {
                    v.iter()
                        .copied()
                        .filter(|&e| disabled.is_none_or(|d| !d.contains(&model.edges[e].path)))
                        .collect()
                })
                .unwrap_or_default();
            let total = candidates.len() as f64 + model.explorer.back_weight;
            let x = rng.gen::<f64>() * total;
            if (x as usize) < candidates.len() {
                let edge_index = candidates[x as usize];
                let edge = &model.edges[edge_index];
                let mut action = Action {
                    kind: edge.action,
                    target_path: Some(edge.path.clone()),
                    point: None,
                    text: None,
                };
                if edge.action == ActionKind::TextInput {
                    typed_count += 1;
                    let text = format!("input{typed_count}");
                    typed.insert((current.clone(), edge.path.clone()), text.clone());
                    action.text = Some(text);
                }
                if !model.explorer.record_targets {
                    let node = hierarchy.root.resolve(&edge.path).expect("validated path");
                    action.target_path = None;
                    action.point = Some(node.bounds.center());
                }
                let mut next = edge.to.clone();
                match &edge.effect {
                    Some(EdgeEffect::Logout) => {
                        stack.clear();
                        restart_to = edge.to.clone();
                        if logout_at.is_none() {
                            logout_at = Some(index + 1);
                            truth.destructive_actions.push(DestructiveAction {
                                index,
                                element_path: edge.path.clone(),
                                kind: TruthKind::Logout,
                            });
                        }
                    }
                    Some(EdgeEffect::Trap(trap)) if trapped.is_none() => {
                        let count = trap_entries.entry(edge_index).or_insert(0);
                        if trap.max_entries.is_some_and(|m| *count >= m) {
                            next = current.clone();
                        } else {
                            *count += 1;
                            trapped = Some(Trapped {
                                spec: trap,
                                entered_ms: now + period,
                                first: index + 1,
                                screens: model.closure(&edge.to),
                            });
                            truth.destructive_actions.push(DestructiveAction {
                                index,
                                element_path: edge.path.clone(),
                                kind: match trap.kind {
                                    TrapKind::Tarpit => TruthKind::Tarpit,
                                    TrapKind::AdFreeze => TruthKind::AdFreeze,
                                },
                            });
                        }
                    }
                    _ => {}
                }
                if trapped.as_ref().is_some_and(|t| !t.screens.contains(&next)) {
                    let t = trapped.take().expect("checked above");
                    close(&mut truth, t, index);
                }
                let logout = matches!(edge.effect, Some(EdgeEffect::Logout));
                if !logout && next != current && stack.last() != Some(&current) {
                    stack.push(current.clone());
                    if stack.len() > MAX_STACK {
                        stack.remove(0);
                    }
                }
                (action, next)
            } else if trapped.is_some() {
                (Action::back(), current.clone())
            } else {
                let next = stack.pop().unwrap_or_else(|| current.clone());
                (Action::back(), next)
            }
        };
        entries.push(TraceEntry { timestamp_ms: now, hierarchy, action });
        current = next;
    }

    if let Some(t) = trapped.take() {
        close(&mut truth, t, steps);
    }
    if let Some(start) = logout_at {
        if start <= steps {
            let region = TruthRegion { kind: TruthKind::Logout, start, end: steps };
            if (steps - start) as u64 * period >= spec.t_min_ms {
                truth.regions.push(region);
            } else {
                truth.short_regions.push(region);
            }
        }
    }
    truth.regions.sort_by_key(|r| r.start);
    truth.short_regions.sort_by_key(|r| r.start);

    let tool = if model.explorer.record_targets { "sim-explorer" } else { "sim-monkey" };
    let trace = Trace::new(tool, model.app.clone(), trace_label(model, spec, !directives.is_empty()), entries)?;
    Ok(SimulationRun { trace, truth, coverage })
}
