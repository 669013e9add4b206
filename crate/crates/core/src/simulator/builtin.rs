use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::model::{AppModel, Edge, EdgeEffect, Escape, ExplorerConfig, ScreenTemplate, TrapKind, TrapSpec, VariantRule};
use super::ScenarioName;
use crate::issues::AppProfile;
use crate::trace::{ActionKind, Bounds, UiNode};

pub const AD_ACTIVITY: &str = "com.google.android.gms.ads.AdActivity";
const LOGIN_ACTIVITY: &str = "com.example.shop.LoginActivity";
const W: i32 = 1080;
const H: i32 = 1920;
const BAR: i32 = 160;
const ROW: i32 = 150;

/// Clickable element on a screen: id, widget type, label.
struct Item {
    id: String,
    widget: &'static str,
    label: String,
}

fn button(id: impl Into<String>, label: impl Into<String>) -> Item {
    Item { id: id.into(), widget: "android.widget.Button", label: label.into() }
}

fn field(id: impl Into<String>) -> Item {
    Item { id: id.into(), widget: "android.widget.EditText", label: String::new() }
}

fn text(id: impl Into<String>, label: impl Into<String>) -> Item {
    Item { id: id.into(), widget: "android.widget.TextView", label: label.into() }
}

fn screen_root(screen: &str, title: &str, bar: &[&str], items: &[Item]) -> UiNode {
    let mut toolbar = Vec::new();
    for (k, id) in bar.iter().enumerate() {
        let x = k as i32 * 130;
        toolbar.push(UiNode::new("android.widget.ImageButton", Some(id), Bounds::new(x, 20, x + 120, 140)));
    }
    let title_left = bar.len() as i32 * 130;
    toolbar.push(
        UiNode::new("android.widget.TextView", Some("toolbar_title"), Bounds::new(title_left, 20, 860, 140))
            .with_text(title),
    );
    toolbar.push(
        UiNode::new("android.widget.TextView", Some("clock"), Bounds::new(880, 20, 1060, 140))
            .with_text(super::CLOCK_PLACEHOLDER),
    );

    let rows = items
        .iter()
        .enumerate()
        .map(|(j, it)| {
            let top = BAR + j as i32 * ROW;
            let node = UiNode::new(it.widget, Some(&it.id), Bounds::new(0, top, W, top + ROW));
            if it.label.is_empty() {
                node
            } else {
                node.with_text(it.label.clone())
            }
        })
        .collect();

    let content_id = format!("{screen}_content");
    UiNode::new("android.widget.FrameLayout", None, Bounds::new(0, 0, W, H)).with_children(vec![
        UiNode::new("android.widget.LinearLayout", Some("content_root"), Bounds::new(0, 0, W, H)).with_children(vec![
            UiNode::new("androidx.appcompat.widget.Toolbar", Some("toolbar"), Bounds::new(0, 0, W, BAR))
                .with_children(toolbar),
            UiNode::new("androidx.recyclerview.widget.RecyclerView", Some(&content_id), Bounds::new(0, BAR, W, H))
                .with_children(rows),
        ]),
        UiNode::new("android.widget.ProgressBar", Some("loading"), Bounds::new(440, 860, 640, 1060)).hidden(),
        UiNode::new("android.widget.ListView", Some("nav_drawer"), Bounds::new(-800, 0, -20, H))
            .with_children(vec![UiNode::new("android.widget.TextView", Some("drawer_item"), Bounds::new(-800, 0, -20, 150))]),
    ])
}

struct Builder {
    model: AppModel,
}

impl Builder {
    fn new(app: &str, start: &str) -> Self {
        Self {
            model: AppModel {
                app: app.into(),
                start_screen: start.into(),
                screens: BTreeMap::new(),
                edges: Vec::new(),
                variant_rules: BTreeMap::new(),
                explorer: ExplorerConfig::default(),
            },
        }
    }

    fn screen(&mut self, name: &str, activity: &str, title: &str, bar: &[&str], items: &[Item]) {
        let root = screen_root(name, title, bar, items);
        self.model.screens.insert(name.into(), ScreenTemplate { activity: activity.into(), root });
    }

    fn edge_with(&mut self, from: &str, id: &str, action: ActionKind, to: &str, effect: Option<EdgeEffect>) {
        let path = self.model.screens[from]
            .root
            .path_to_id(id)
            .unwrap_or_else(|| panic!("no element `{id}` on `{from}`"));
        self.model.edges.push(Edge { from: from.into(), path, action, to: to.into(), effect });
    }

    fn edge(&mut self, from: &str, id: &str, to: &str) {
        self.edge_with(from, id, ActionKind::Click, to, None);
    }

    /// Appends a button to the content list of `screen` leading to `to`.
    fn link_button(&mut self, screen: &str, id: &str, to: &str) {
        let template = self.model.screens.get_mut(screen).expect("known screen");
        let list_path = template.root.path_to_id(&format!("{screen}_content")).expect("content list");
        let list = template.root.resolve_mut(&list_path).expect("content list");
        let top = BAR + list.children.len() as i32 * ROW;
        list.children.push(
            UiNode::new("android.widget.Button", Some(id), Bounds::new(0, top, W, top + ROW)).with_text("Related"),
        );
        self.edge(screen, id, to);
    }

    fn variants(&mut self, screen: &str, weights: &[f64]) {
        let anchor = self.model.screens[screen]
            .root
            .path_to_id(&format!("{screen}_content"))
            .expect("content list");
        let leaves = [
            ("android.widget.TextView", "tip_banner"),
            ("android.widget.ImageView", "promo_badge"),
            ("android.widget.TextView", "snackbar_text"),
        ];
        let levels = weights.len() - 1;
        let leaves = leaves[..levels]
            .iter()
            .enumerate()
            .map(|(k, (ty, id))| {
                let top = H - 100 - k as i32 * 100;
                UiNode::new(*ty, Some(id), Bounds::new(0, top, W, top + 90))
            })
            .collect();
        self.model
            .variant_rules
            .insert(screen.into(), VariantRule { anchor, leaves, weights: weights.to_vec() });
    }
}

/// Shape of a generated app.
struct Shape {
    app: &'static str,
    sections: usize,
    branching: usize,
    depth: usize,
    variants: bool,
    /// Every section screen links to the next one, so a random walk mixes
    /// quickly.
    cross_links: bool,
    logout: bool,
    /// Minimum dwell and entry cap of the game trap.
    tarpit: Option<(u64, u32)>,
    /// Minimum dwell and entry cap of the frozen ad.
    ad: Option<(u64, u32)>,
}

const MIN: u64 = 60_000;

fn shape(name: ScenarioName) -> Shape {
    let base = Shape {
        app: "com.example.shop",
        sections: 4,
        branching: 3,
        depth: 2,
        variants: true,
        cross_links: false,
        logout: false,
        tarpit: None,
        ad: None,
    };
    match name {
        ScenarioName::Benign => Shape { sections: 2, variants: false, cross_links: true, ..base },
        ScenarioName::Logout => Shape { logout: true, ..base },
        ScenarioName::Tarpit => Shape { depth: 3, tarpit: Some((22 * MIN, 1)), ..base },
        ScenarioName::TarpitX2 => Shape { tarpit: Some((12 * MIN, 2)), ..base },
        ScenarioName::AdFreeze => Shape { ad: Some((15 * MIN, 1)), ..base },
        ScenarioName::Mixed => Shape {
            logout: true,
            tarpit: Some((12 * MIN, 1)),
            ad: Some((12 * MIN, 1)),
            ..base
        },
    }
}

fn section_tree(b: &mut Builder, shape: &Shape, name: &str, parent: &str, section: usize, level: usize) {
    let children: Vec<String> = if level < shape.depth {
        (0..shape.branching).map(|j| format!("{name}_{j}")).collect()
    } else {
        Vec::new()
    };
    let mut items: Vec<Item> = children.iter().map(|c| button(format!("open_{c}"), format!("Item {c}"))).collect();
    items.push(text(format!("{name}_image"), ""));
    items.push(text(format!("{name}_price"), "9.99"));
    items.push(button(format!("{name}_share"), "Share"));
    items.push(text(format!("{name}_summary"), "Summary"));
    if level == 0 {
        items.insert(0, field(format!("{name}_search")));
    }
    let activity = if level == 0 {
        format!("com.example.shop.Section{section}Activity")
    } else {
        format!("com.example.shop.DetailActivity{level}")
    };
    b.screen(name, &activity, name, &["nav_up", "nav_home"], &items);
    b.edge(name, "nav_up", parent);
    b.edge(name, "nav_home", "home");
    b.edge_with(name, &format!("{name}_share"), ActionKind::LongClick, name, None);
    if level == 0 {
        b.edge_with(name, &format!("{name}_search"), ActionKind::TextInput, name, None);
        if shape.variants {
            b.variants(name, &[0.55, 0.25, 0.13, 0.07]);
        }
    }
    for c in &children {
        b.edge(name, &format!("open_{c}"), c);
        section_tree(b, shape, c, name, section, level + 1);
    }
}

fn build(shape: &Shape) -> AppModel {
    let mut b = Builder::new(shape.app, "home");
    let main = "com.example.shop.MainActivity";

    let bar = ["menu_settings"];
    let mut items: Vec<Item> = (0..shape.sections).map(|k| button(format!("open_s{k}"), format!("Section {k}"))).collect();
    if shape.tarpit.is_some() {
        items.push(button("promo_banner", "Play and win"));
    }
    if shape.ad.is_some() {
        items.push(button("ad_banner", "Sponsored"));
    }
    items.push(text("home_footer", "Welcome"));
    b.screen("home", main, "Shop", &bar, &items);
    b.edge("home", "menu_settings", "settings");
    for k in 0..shape.sections {
        let s = format!("s{k}");
        b.edge("home", &format!("open_{s}"), &s);
        section_tree(&mut b, shape, &s, "home", k, 0);
    }
    if !shape.variants {
        b.variants("home", &[1.0, 1.0]);
    }

    let settings = "com.example.shop.SettingsActivity";
    let mut prefs = vec![button("pref_general", "General"), button("pref_privacy", "Privacy")];
    if shape.logout {
        prefs.push(button("pref_account", "Account"));
    }
    prefs.push(text("version", "v2.3"));
    b.screen("settings", settings, "Settings", &["nav_up"], &prefs);
    b.edge("settings", "nav_up", "home");
    b.edge("settings", "pref_general", "settings_general");
    b.edge("settings", "pref_privacy", "settings_privacy");
    for s in ["settings_general", "settings_privacy"] {
        let toggles = [button(format!("{s}_toggle_a"), "Option A"), button(format!("{s}_toggle_b"), "Option B")];
        b.screen(s, settings, s, &["nav_up"], &toggles);
        b.edge(s, "nav_up", "settings");
        b.edge(s, &format!("{s}_toggle_a"), s);
        b.edge(s, &format!("{s}_toggle_b"), s);
    }

    if shape.logout {
        b.screen(
            "logout_dialog",
            main,
            "Log out?",
            &[],
            &[text("dialog_message", "You will be signed out"), button("dialog_ok", "OK"), button("dialog_cancel", "Cancel")],
        );
        b.screen(
            "settings_account",
            settings,
            "Account",
            &["nav_up"],
            &[
                text("account_name", "Signed in"),
                button("change_avatar", "Change avatar"),
                button("notifications", "Notifications"),
                button("sign_out", "Sign out"),
            ],
        );
        b.edge("settings", "pref_account", "settings_account");
        b.edge("settings_account", "nav_up", "settings");
        b.edge("settings_account", "change_avatar", "settings_account");
        b.edge("settings_account", "notifications", "settings_account");
        b.edge("settings_account", "sign_out", "logout_dialog");
        b.edge("logout_dialog", "dialog_cancel", "settings_account");
        b.edge_with("logout_dialog", "dialog_ok", ActionKind::Click, "login", Some(EdgeEffect::Logout));

        b.screen(
            "login",
            LOGIN_ACTIVITY,
            "Sign in",
            &[],
            &[
                field("username"),
                field("password"),
                button("sign_in", "Sign in"),
                button("forgot_password", "Forgot password"),
                button("terms_link", "Terms"),
            ],
        );
        b.edge_with("login", "username", ActionKind::TextInput, "login", None);
        b.edge_with("login", "password", ActionKind::TextInput, "login", None);
        b.edge("login", "sign_in", "login");
        b.edge("login", "forgot_password", "login_help");
        b.edge("login", "terms_link", "terms");
        b.screen(
            "login_help",
            LOGIN_ACTIVITY,
            "Reset password",
            &["nav_up"],
            &[field("email"), button("send_link", "Send link"), button("help_terms", "Terms")],
        );
        b.edge("login_help", "nav_up", "login");
        b.edge_with("login_help", "email", ActionKind::TextInput, "login_help", None);
        b.edge("login_help", "send_link", "login");
        b.edge("login_help", "help_terms", "terms");
        b.screen(
            "terms",
            "com.example.shop.TermsActivity",
            "Terms",
            &["nav_up"],
            &[text("terms_body", "Terms of service"), button("accept", "Accept"), button("decline", "Decline")],
        );
        b.edge("terms", "nav_up", "login");
        b.edge("terms", "accept", "login");
        b.edge("terms", "decline", "login");
    }

    if let Some((dwell, cap)) = shape.tarpit {
        let promo = "com.example.shop.PromoActivity";
        b.screen(
            "promo",
            promo,
            "Promotion",
            &["nav_up", "nav_home"],
            &[text("promo_rules", "Rules"), button("promo_start", "START"), button("promo_info", "Details")],
        );
        b.edge("home", "promo_banner", "promo");
        b.edge("promo", "nav_up", "home");
        b.edge("promo", "nav_home", "home");
        b.edge("promo", "promo_info", "promo");
        let trap = TrapSpec {
            kind: TrapKind::Tarpit,
            min_dwell_ms: dwell,
            p_escape: 0.01,
            escape: Escape::Back { to: "promo".into() },
            max_entries: Some(cap),
        };
        b.edge_with("promo", "promo_start", ActionKind::Click, "game", Some(EdgeEffect::Trap(trap)));
        let game = "com.example.shop.GameActivity";
        b.screen("game", game, "Game", &[], &[button("game_board", ""), button("game_pause", "Pause")]);
        b.screen("game_over", game, "Game over", &[], &[text("score", "Score"), button("game_retry", "Retry")]);
        b.edge("game", "game_board", "game_over");
        b.edge("game", "game_pause", "game");
        b.edge("game_over", "game_retry", "game");
    }

    if let Some((dwell, cap)) = shape.ad {
        let trap = TrapSpec {
            kind: TrapKind::AdFreeze,
            min_dwell_ms: dwell,
            p_escape: 0.01,
            escape: Escape::Restart,
            max_entries: Some(cap),
        };
        b.screen("ad", AD_ACTIVITY, "Ad", &[], &[button("ad_media", ""), button("ad_cta", "Install")]);
        b.edge_with("home", "ad_banner", ActionKind::Click, "ad", Some(EdgeEffect::Trap(trap)));
        b.edge("ad", "ad_media", "ad");
        b.edge("ad", "ad_cta", "ad");
    }

    if shape.cross_links {
        let ring: Vec<String> = b.model.screens.keys().filter(|s| *s != "home").cloned().collect();
        for (k, from) in ring.iter().enumerate() {
            for (j, step) in [1, 7].into_iter().enumerate() {
                let to = &ring[(k + step) % ring.len()];
                b.link_button(from, &format!("{from}_related{j}"), to);
            }
        }
    }

    b.model
}

/// The synthetic app used for a scenario.
pub fn builtin_model(name: ScenarioName) -> AppModel {
    build(&shape(name))
}

/// Activity lists matching [`builtin_model`].
pub fn builtin_profile(name: ScenarioName) -> AppProfile {
    let shape = shape(name);
    let mut login_activities = BTreeSet::new();
    if shape.logout {
        login_activities.insert(String::from(LOGIN_ACTIVITY));
    }
    AppProfile { app: shape.app.into(), login_activities, ad_activity_id: AD_ACTIVITY.into() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_model_validates() {
        for name in ScenarioName::ALL {
            builtin_model(name).validate().unwrap();
        }
    }

    #[test]
    fn benign_app_has_about_thirty_screens() {
        let m = builtin_model(ScenarioName::Benign);
        assert!((28..=34).contains(&m.screens.len()), "{}", m.screens.len());
    }
}
