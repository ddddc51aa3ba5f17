//! Game trees: raw descriptions, validation, and the interned arena.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfoSetId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub usize);

/// Unvalidated game description: an explicit list of histories. This is the
/// form parsers produce; [`GameTree::from_raw`] validates and interns it.
#[derive(Debug, Clone, Default)]
pub struct RawGame {
    pub num_players: usize,
    /// (history as action labels, node payload), in any order.
    pub entries: Vec<(Vec<String>, RawNode)>,
}

#[derive(Debug, Clone)]
pub enum RawNode {
    Decision { player: usize, infoset: String },
    Terminal { utilities: Vec<Rational> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameViolation {
    MissingRoot,
    DuplicateHistory(String),
    PrefixNotClosed { history: String, missing: String },
    TerminalWithChildren(String),
    TooFewActions { history: String, count: usize },
    BadPlayerIndex { history: String, player: usize },
    WrongUtilityCount { history: String, got: usize },
    InfosetPlayerMismatch { infoset: String },
    InfosetActionMismatch { infoset: String },
    InfosetsShareAction { action: String, first: String, second: String },
}

impl fmt::Display for GameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GameViolation::*;
        match self {
            MissingRoot => write!(f, "prefix closure: the empty history is missing"),
            DuplicateHistory(h) => write!(f, "history declared twice: {h}"),
            PrefixNotClosed { history, missing } => {
                write!(f, "prefix closure: {history} lacks ancestor {missing}")
            }
            TerminalWithChildren(h) => write!(f, "terminal history {h} has extensions"),
            TooFewActions { history, count } => {
                write!(f, "nonterminal {history} offers {count} action(s), need at least 2")
            }
            BadPlayerIndex { history, player } => {
                write!(f, "{history} assigned to player {} (out of range)", player + 1)
            }
            WrongUtilityCount { history, got } => {
                write!(f, "terminal {history} lists {got} utilities")
            }
            InfosetPlayerMismatch { infoset } => {
                write!(f, "information set {infoset} mixes players")
            }
            InfosetActionMismatch { infoset } => {
                write!(f, "information set {infoset} members offer different action sets")
            }
            InfosetsShareAction { action, first, second } => {
                write!(f, "action {action} appears in information sets {first} and {second}")
            }
        }
    }
}

/// All invariant violations found in a raw game; empty iff the game is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<GameViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "- {v}")?;
        }
        Ok(())
    }
}

fn show(history: &[String]) -> String {
    if history.is_empty() {
        "<root>".to_string()
    } else {
        history.join("/")
    }
}

/// Check every structural invariant of a raw description. The report lists
/// all violations, not just the first.
pub fn validate_raw(raw: &RawGame) -> ValidationReport {
    let mut out = Vec::new();
    let mut index: HashMap<&[String], usize> = HashMap::new();
    for (i, (h, _)) in raw.entries.iter().enumerate() {
        if index.insert(h.as_slice(), i).is_some() {
            out.push(GameViolation::DuplicateHistory(show(h)));
        }
    }
    if !index.contains_key(&[][..]) {
        out.push(GameViolation::MissingRoot);
    }

    // Children per declared history, in entry order.
    let mut children: HashMap<&[String], Vec<usize>> = HashMap::new();
    let mut missing_reported: HashSet<&[String]> = HashSet::new();
    for (i, (h, _)) in raw.entries.iter().enumerate() {
        if h.is_empty() {
            continue;
        }
        let parent = &h[..h.len() - 1];
        if index.contains_key(parent) {
            children.entry(parent).or_default().push(i);
        } else if missing_reported.insert(parent) {
            out.push(GameViolation::PrefixNotClosed {
                history: show(h),
                missing: show(parent),
            });
        }
    }

    let mut infoset_players: HashMap<&str, usize> = HashMap::new();
    let mut infoset_actions: HashMap<&str, Vec<String>> = HashMap::new();
    let mut action_owner: HashMap<&str, &str> = HashMap::new();
    let mut shared_reported: HashSet<(&str, &str)> = HashSet::new();

    for (h, node) in &raw.entries {
        let kids = children.get(h.as_slice()).map(Vec::as_slice).unwrap_or(&[]);
        match node {
            RawNode::Terminal { utilities } => {
                if !kids.is_empty() {
                    out.push(GameViolation::TerminalWithChildren(show(h)));
                }
                if utilities.len() != raw.num_players {
                    out.push(GameViolation::WrongUtilityCount { history: show(h), got: utilities.len() });
                }
            }
            RawNode::Decision { player, infoset } => {
                if kids.len() < 2 {
                    out.push(GameViolation::TooFewActions { history: show(h), count: kids.len() });
                }
                if *player >= raw.num_players {
                    out.push(GameViolation::BadPlayerIndex { history: show(h), player: *player });
                }
                let labels: Vec<String> = kids
                    .iter()
                    .map(|&i| raw.entries[i].0.last().unwrap().clone())
                    .collect();
                match infoset_players.get(infoset.as_str()) {
                    None => {
                        infoset_players.insert(infoset, *player);
                        for child in kids {
                            let l: &str = raw.entries[*child].0.last().unwrap();
                            match action_owner.get(l) {
                                Some(&other) if other != infoset.as_str() => {
                                    if shared_reported.insert((other, infoset.as_str())) {
                                        out.push(GameViolation::InfosetsShareAction {
                                            action: l.to_string(),
                                            first: other.to_string(),
                                            second: infoset.clone(),
                                        });
                                    }
                                }
                                Some(_) => {}
                                None => {
                                    action_owner.insert(l, infoset);
                                }
                            }
                        }
                        infoset_actions.insert(infoset, labels);
                    }
                    Some(&p) => {
                        if p != *player {
                            out.push(GameViolation::InfosetPlayerMismatch { infoset: infoset.clone() });
                        }
                        let mut a = infoset_actions[infoset.as_str()].clone();
                        let mut b = labels.clone();
                        a.sort();
                        b.sort();
                        if a != b {
                            out.push(GameViolation::InfosetActionMismatch { infoset: infoset.clone() });
                        }
                    }
                }
            }
        }
    }

    // Dedupe identical violations (an infoset mismatch shows up once per extra member).
    let mut seen = Vec::new();
    out.retain(|v| {
        if seen.contains(v) {
            false
        } else {
            seen.push(v.clone());
            true
        }
    });
    ValidationReport { violations: out }
}

#[derive(Debug, Clone)]
pub struct Node {
    pub history: Vec<ActionId>,
    pub parent: Option<NodeId>,
    pub kind: NodeKind,
}

#[derive(Debug, Clone)]
pub enum NodeKind {
    Decision { player: usize, infoset: InfoSetId, children: Vec<(ActionId, NodeId)> },
    Terminal { utilities: Vec<Rational> },
}

#[derive(Debug, Clone)]
pub struct InfoSet {
    pub label: String,
    pub player: usize,
    /// Available actions, in the order declared at the first member.
    pub actions: Vec<ActionId>,
    /// Members in breadth-first order.
    pub members: Vec<NodeId>,
}

/// A validated, interned extensive-form game.
#[derive(Debug, Clone)]
pub struct GameTree {
    num_players: usize,
    nodes: Vec<Node>,
    infosets: Vec<InfoSet>,
    action_labels: Vec<String>,
    /// Which information set each action belongs to (well-defined because
    /// distinct information sets have disjoint action sets).
    action_infoset: Vec<InfoSetId>,
}

impl GameTree {
    /// Validate and intern. On failure the report carries every violation.
    pub fn from_raw(raw: &RawGame) -> Result<GameTree, ValidationReport> {
        let report = validate_raw(raw);
        if !report.is_valid() {
            return Err(report);
        }

        let mut index: HashMap<&[String], usize> = HashMap::new();
        for (i, (h, _)) in raw.entries.iter().enumerate() {
            index.insert(h.as_slice(), i);
        }
        let mut children: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, (h, _)) in raw.entries.iter().enumerate() {
            if let Some(&p) = h.len().checked_sub(1).and_then(|l| index.get(&h[..l])) {
                children.entry(p).or_default().push(i);
            }
        }

        let mut tree = GameTree {
            num_players: raw.num_players,
            nodes: Vec::with_capacity(raw.entries.len()),
            infosets: Vec::new(),
            action_labels: Vec::new(),
            action_infoset: Vec::new(),
        };
        let mut action_ids: HashMap<String, ActionId> = HashMap::new();
        let mut infoset_ids: HashMap<String, InfoSetId> = HashMap::new();

        // Breadth-first construction keeps node ids topologically sorted.
        let root_entry = index[&[][..]];
        let mut queue = std::collections::VecDeque::new();
        queue.push_back((root_entry, None::<NodeId>, Vec::new()));
        while let Some((entry, parent, history)) = queue.pop_front() {
            let id = NodeId(tree.nodes.len());
            let (_, node) = &raw.entries[entry];
            let kind = match node {
                RawNode::Terminal { utilities } => NodeKind::Terminal { utilities: utilities.clone() },
                RawNode::Decision { player, infoset } => {
                    let iid = *infoset_ids.entry(infoset.clone()).or_insert_with(|| {
                        let iid = InfoSetId(tree.infosets.len());
                        tree.infosets.push(InfoSet {
                            label: infoset.clone(),
                            player: *player,
                            actions: Vec::new(),
                            members: Vec::new(),
                        });
                        iid
                    });
                    tree.infosets[iid.0].members.push(id);
                    let mut kids = Vec::new();
                    for &child_entry in &children[&entry] {
                        let label = raw.entries[child_entry].0.last().unwrap();
                        let aid = *action_ids.entry(label.clone()).or_insert_with(|| {
                            let aid = ActionId(tree.action_labels.len());
                            tree.action_labels.push(label.clone());
                            tree.action_infoset.push(iid);
                            aid
                        });
                        kids.push((aid, child_entry));
                    }
                    if tree.infosets[iid.0].actions.is_empty() {
                        tree.infosets[iid.0].actions = kids.iter().map(|&(a, _)| a).collect();
                    }
                    // Child node ids are assigned when dequeued; patched in below.
                    NodeKind::Decision {
                        player: *player,
                        infoset: iid,
                        children: kids.iter().map(|&(a, _)| (a, NodeId(usize::MAX))).collect(),
                    }
                }
            };
            tree.nodes.push(Node { history: history.clone(), parent, kind });
            if let RawNode::Decision { .. } = node {
                for &child_entry in &children[&entry] {
                    let label = raw.entries[child_entry].0.last().unwrap();
                    let aid = action_ids[label];
                    let mut child_history = history.clone();
                    child_history.push(aid);
                    queue.push_back((child_entry, Some(id), child_history));
                }
            }
        }

        // Second pass: children were queued breadth-first in declaration
        // order, so match them up by (parent, action).
        let mut by_parent: HashMap<(usize, ActionId), NodeId> = HashMap::new();
        for (i, node) in tree.nodes.iter().enumerate() {
            if let (Some(p), Some(&last)) = (node.parent, node.history.last()) {
                by_parent.insert((p.0, last), NodeId(i));
            }
        }
        for i in 0..tree.nodes.len() {
            if let NodeKind::Decision { children, .. } = &mut tree.nodes[i].kind {
                for (aid, target) in children.iter_mut() {
                    *target = by_parent[&(i, *aid)];
                }
            }
        }
        Ok(tree)
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn is_terminal(&self, id: NodeId) -> bool {
        matches!(self.nodes[id.0].kind, NodeKind::Terminal { .. })
    }

    pub fn terminals(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&id| self.is_terminal(id))
    }

    /// Mover at a decision node.
    pub fn player_at(&self, id: NodeId) -> Option<usize> {
        match &self.nodes[id.0].kind {
            NodeKind::Decision { player, .. } => Some(*player),
            NodeKind::Terminal { .. } => None,
        }
    }

    pub fn infoset_at(&self, id: NodeId) -> Option<InfoSetId> {
        match &self.nodes[id.0].kind {
            NodeKind::Decision { infoset, .. } => Some(*infoset),
            NodeKind::Terminal { .. } => None,
        }
    }

    pub fn children(&self, id: NodeId) -> &[(ActionId, NodeId)] {
        match &self.nodes[id.0].kind {
            NodeKind::Decision { children, .. } => children,
            NodeKind::Terminal { .. } => &[],
        }
    }

    pub fn child(&self, id: NodeId, action: ActionId) -> Option<NodeId> {
        self.children(id).iter().find(|&&(a, _)| a == action).map(|&(_, c)| c)
    }

    pub fn utilities(&self, id: NodeId) -> &[Rational] {
        match &self.nodes[id.0].kind {
            NodeKind::Terminal { utilities } => utilities,
            NodeKind::Decision { .. } => panic!("utilities of a decision node"),
        }
    }

    pub fn utility(&self, id: NodeId, player: usize) -> &Rational {
        &self.utilities(id)[player]
    }

    pub fn num_infosets(&self) -> usize {
        self.infosets.len()
    }

    pub fn infoset_ids(&self) -> impl Iterator<Item = InfoSetId> {
        (0..self.infosets.len()).map(InfoSetId)
    }

    pub fn infoset(&self, id: InfoSetId) -> &InfoSet {
        &self.infosets[id.0]
    }

    pub fn infosets_of(&self, player: usize) -> impl Iterator<Item = InfoSetId> + '_ {
        self.infoset_ids().filter(move |&i| self.infosets[i.0].player == player)
    }

    pub fn infoset_by_label(&self, label: &str) -> Option<InfoSetId> {
        self.infoset_ids().find(|&i| self.infosets[i.0].label == label)
    }

    pub fn action_label(&self, id: ActionId) -> &str {
        &self.action_labels[id.0]
    }

    pub fn action_by_label(&self, label: &str) -> Option<ActionId> {
        self.action_labels.iter().position(|l| l == label).map(ActionId)
    }

    /// The information set an action belongs to.
    pub fn action_infoset(&self, id: ActionId) -> InfoSetId {
        self.action_infoset[id.0]
    }

    pub fn last_action(&self, id: NodeId) -> Option<ActionId> {
        self.nodes[id.0].history.last().copied()
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.nodes[id.0].history.len()
    }

    /// True iff `anc` is `node` or an ancestor of it.
    pub fn is_prefix(&self, anc: NodeId, node: NodeId) -> bool {
        let mut cur = Some(node);
        while let Some(c) = cur {
            if c == anc {
                return true;
            }
            cur = self.nodes[c.0].parent;
        }
        false
    }

    /// Walk action labels from the root; `None` if no such history.
    pub fn node_by_labels(&self, labels: &[&str]) -> Option<NodeId> {
        let mut cur = self.root();
        for l in labels {
            let aid = self.action_by_label(l)?;
            cur = self.child(cur, aid)?;
        }
        Some(cur)
    }

    pub fn display_history(&self, id: NodeId) -> String {
        let h = &self.nodes[id.0].history;
        if h.is_empty() {
            "<root>".to_string()
        } else {
            h.iter().map(|&a| self.action_label(a)).collect::<Vec<_>>().join("/")
        }
    }

    /// Largest and smallest terminal utility over all players (utility range
    /// for concentration bounds).
    pub fn utility_bounds(&self) -> (Rational, Rational) {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for t in self.terminals() {
            for u in self.utilities(t) {
                if lo.as_ref().is_none_or(|l| u < l) {
                    lo = Some(u.clone());
                }
                if hi.as_ref().is_none_or(|h| u > h) {
                    hi = Some(u.clone());
                }
            }
        }
        (lo.unwrap(), hi.unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n).unwrap()
    }

    /// One-shot matching game: both players pick a bit, player 2 blind.
    pub fn tiny_matching() -> RawGame {
        let mut entries = vec![(
            vec![],
            RawNode::Decision { player: 0, infoset: "one".into() },
        )];
        for a in ["x", "y"] {
            entries.push((vec![a.into()], RawNode::Decision { player: 1, infoset: "two".into() }));
            for b in ["l", "r"] {
                let matched = (a == "x") == (b == "l");
                entries.push((
                    vec![a.into(), b.into()],
                    RawNode::Terminal { utilities: vec![q(matched as i64), q(!matched as i64)] },
                ));
            }
        }
        RawGame { num_players: 2, entries }
    }

    #[test]
    fn valid_game_builds() {
        let raw = tiny_matching();
        assert!(validate_raw(&raw).is_valid());
        let g = GameTree::from_raw(&raw).unwrap();
        assert_eq!(g.num_nodes(), 7);
        assert_eq!(g.num_infosets(), 2);
        let two = g.infoset_by_label("two").unwrap();
        assert_eq!(g.infoset(two).members.len(), 2);
        let t = g.node_by_labels(&["x", "l"]).unwrap();
        assert_eq!(g.utility(t, 0), &q(1));
    }

    #[test]
    fn missing_root_reported() {
        let raw = RawGame {
            num_players: 1,
            entries: vec![(vec!["a".into()], RawNode::Terminal { utilities: vec![q(0)] })],
        };
        let rep = validate_raw(&raw);
        assert!(rep.violations.contains(&GameViolation::MissingRoot));
    }

    #[test]
    fn prefix_gap_reported() {
        let mut raw = tiny_matching();
        raw.entries.retain(|(h, _)| h != &vec!["x".to_string()]);
        let rep = validate_raw(&raw);
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, GameViolation::PrefixNotClosed { .. })));
    }

    #[test]
    fn one_action_node_reported() {
        let mut raw = tiny_matching();
        raw.entries.retain(|(h, _)| !(h.len() == 2 && h[1] == "r"));
        let rep = validate_raw(&raw);
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, GameViolation::TooFewActions { .. })));
    }

    #[test]
    fn shared_action_across_infosets_reported() {
        let mut raw = tiny_matching();
        // Rename player 2's actions to collide with player 1's.
        for (h, _) in &mut raw.entries {
            for part in h.iter_mut() {
                if part == "l" {
                    *part = "x".into();
                }
            }
        }
        let rep = validate_raw(&raw);
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, GameViolation::InfosetsShareAction { .. })));
    }

    #[test]
    fn infoset_action_mismatch_reported() {
        let mut raw = tiny_matching();
        // Player 2's two nodes claim the same infoset but offer different labels.
        for (h, _) in &mut raw.entries {
            if h.len() == 2 && h[0] == "y" && h[1] == "l" {
                h[1] = "m".into();
            }
        }
        let rep = validate_raw(&raw);
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, GameViolation::InfosetActionMismatch { .. })));
    }

    #[test]
    fn utility_count_checked() {
        let mut raw = tiny_matching();
        if let RawNode::Terminal { utilities } = &mut raw.entries[2].1 {
            utilities.pop();
        }
        let rep = validate_raw(&raw);
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, GameViolation::WrongUtilityCount { .. })));
    }
}
