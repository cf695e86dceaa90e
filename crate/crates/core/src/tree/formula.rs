use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{CpNet, Orientation, Outcome, RuleSlot, SlotId, Structure, VarId};

/// Propositional variable "slot reads `orientation`". Its negation is the
/// same slot with the opposite orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleLiteral {
    pub slot: SlotId,
    pub orientation: Orientation,
}

impl RuleLiteral {
    pub fn negated(self) -> Self {
        RuleLiteral {
            slot: self.slot,
            orientation: self.orientation.reversed(),
        }
    }

    pub fn holds_in(self, net: &CpNet) -> bool {
        net.orientation(self.slot) == self.orientation
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaId(usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    False,
    Lit(RuleLiteral),
    And(Vec<FormulaId>),
    Or(Vec<FormulaId>),
    /// Named occurrence of `change_k(var)`, defined by `body`.
    Change {
        var: VarId,
        k: usize,
        body: FormulaId,
    },
}

/// Hash-consed arena of formulas over rule literals.
#[derive(Debug, Clone)]
pub struct Formulas {
    nodes: Vec<Node>,
    interned: HashMap<Node, FormulaId>,
}

impl Default for Formulas {
    fn default() -> Self {
        Self::new()
    }
}

impl Formulas {
    pub const TRUE: FormulaId = FormulaId(0);
    pub const FALSE: FormulaId = FormulaId(1);

    pub fn new() -> Self {
        let mut f = Formulas {
            nodes: Vec::new(),
            interned: HashMap::new(),
        };
        f.intern(Node::True);
        f.intern(Node::False);
        f
    }

    fn intern(&mut self, node: Node) -> FormulaId {
        if let Some(&id) = self.interned.get(&node) {
            return id;
        }
        let id = FormulaId(self.nodes.len());
        self.nodes.push(node.clone());
        self.interned.insert(node, id);
        id
    }

    pub fn node(&self, id: FormulaId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Follows `Change` wrappers down to the defining node.
    pub fn resolve(&self, mut id: FormulaId) -> FormulaId {
        while let Node::Change { body, .. } = self.nodes[id.0] {
            id = body;
        }
        id
    }

    pub fn constant(&self, id: FormulaId) -> Option<bool> {
        match self.resolve(id) {
            Self::TRUE => Some(true),
            Self::FALSE => Some(false),
            _ => None,
        }
    }

    pub fn lit(&mut self, l: RuleLiteral) -> FormulaId {
        self.intern(Node::Lit(l))
    }

    pub fn and(&mut self, children: impl IntoIterator<Item = FormulaId>) -> FormulaId {
        let mut kept = Vec::new();
        for c in children {
            match self.constant(c) {
                Some(true) => {}
                Some(false) => return Self::FALSE,
                None => match &self.nodes[c.0] {
                    Node::And(inner) => kept.extend(inner.iter().copied()),
                    _ => kept.push(c),
                },
            }
        }
        match kept.len() {
            0 => Self::TRUE,
            1 => kept[0],
            _ => self.intern(Node::And(kept)),
        }
    }

    pub fn or(&mut self, children: impl IntoIterator<Item = FormulaId>) -> FormulaId {
        let mut kept = Vec::new();
        for c in children {
            match self.constant(c) {
                Some(false) => {}
                Some(true) => return Self::TRUE,
                None => match &self.nodes[c.0] {
                    Node::Or(inner) => kept.extend(inner.iter().copied()),
                    _ => kept.push(c),
                },
            }
        }
        match kept.len() {
            0 => Self::FALSE,
            1 => kept[0],
            _ => self.intern(Node::Or(kept)),
        }
    }

    pub fn change(&mut self, var: VarId, k: usize, body: FormulaId) -> FormulaId {
        self.intern(Node::Change { var, k, body })
    }

    /// Truth value of `id` in the deterministic net `net`.
    pub fn eval(&self, id: FormulaId, net: &CpNet) -> bool {
        let mut memo = vec![None; self.nodes.len()];
        self.eval_memo(id, net, &mut memo)
    }

    fn eval_memo(&self, id: FormulaId, net: &CpNet, memo: &mut [Option<bool>]) -> bool {
        if let Some(v) = memo[id.0] {
            return v;
        }
        let v = match &self.nodes[id.0] {
            Node::True => true,
            Node::False => false,
            Node::Lit(l) => l.holds_in(net),
            Node::And(cs) => cs.iter().all(|&c| self.eval_memo(c, net, memo)),
            Node::Or(cs) => cs.iter().any(|&c| self.eval_memo(c, net, memo)),
            Node::Change { body, .. } => self.eval_memo(*body, net, memo),
        };
        memo[id.0] = Some(v);
        v
    }

    /// Slots mentioned anywhere under `id`.
    pub fn slots(&self, id: FormulaId) -> Vec<SlotId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n.0], true) {
                continue;
            }
            match &self.nodes[n.0] {
                Node::Lit(l) => out.push(l.slot),
                Node::And(cs) | Node::Or(cs) => stack.extend(cs),
                Node::Change { body, .. } => stack.push(*body),
                Node::True | Node::False => {}
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Renders the definition of `id` one level deep: nested `change`
    /// occurrences are printed by name. Literals read `Y=1: X 1>0`.
    pub fn definition(&self, id: FormulaId, s: &Structure) -> String {
        let root = match self.nodes[id.0] {
            Node::Change { body, .. } => body,
            _ => id,
        };
        let mut out = String::new();
        self.render(root, s, true, &mut out);
        out
    }

    fn render(&self, id: FormulaId, s: &Structure, top: bool, out: &mut String) {
        match &self.nodes[id.0] {
            Node::True => out.push('⊤'),
            Node::False => out.push('⊥'),
            Node::Lit(l) => out.push_str(&literal_label(s, *l)),
            Node::Change { var, k, .. } => {
                let _ = write!(out, "change_{k}({})", s.name(*var));
            }
            Node::And(cs) | Node::Or(cs) => {
                let sep = if matches!(self.nodes[id.0], Node::And(_)) {
                    " ∧ "
                } else {
                    " ∨ "
                };
                if !top {
                    out.push('(');
                }
                for (i, &c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    self.render(c, s, false, out);
                }
                if !top {
                    out.push(')');
                }
            }
        }
    }
}

pub fn literal_label(s: &Structure, l: RuleLiteral) -> String {
    let slot = s.slot(l.slot);
    let order = if l.orientation.preferred() { "1>0" } else { "0>1" };
    let ps = s.parents(slot.var);
    if ps.is_empty() {
        format!("{} {order}", s.name(slot.var))
    } else {
        let ctx: Vec<String> = ps
            .iter()
            .enumerate()
            .map(|(i, &p)| format!("{}={}", s.name(p), s.context_value(slot.var, slot.context, i) as u8))
            .collect();
        format!("{}: {} {order}", ctx.join(","), s.name(slot.var))
    }
}

/// Builds `change_k(X)` and `worsen(X)` for one pair of outcomes over a
/// forest, memoised on `(X, k)`.
///
/// The case table is written once for `o[X] = x`, `o[Y] = y`; the other
/// value combinations are obtained by reading `x` as "the value of `X` in
/// `o`" and `y` as "the value of the parent in `o`", which is what
/// [`ChangeBuilder::lit`] does.
pub struct ChangeBuilder<'a> {
    structure: &'a Structure,
    from: &'a Outcome,
    to: &'a Outcome,
    formulas: Formulas,
    memo: HashMap<(VarId, usize), FormulaId>,
}

impl<'a> ChangeBuilder<'a> {
    pub fn new(structure: &'a Structure, from: &'a Outcome, to: &'a Outcome) -> Result<Self> {
        structure.require_forest()?;
        for o in [from, to] {
            if o.len() != structure.len() {
                return Err(Error::OutcomeMismatch {
                    expected: structure.len(),
                    got: o.len(),
                });
            }
        }
        Ok(ChangeBuilder {
            structure,
            from,
            to,
            formulas: Formulas::new(),
            memo: HashMap::new(),
        })
    }

    pub fn formulas(&self) -> &Formulas {
        &self.formulas
    }

    pub fn into_formulas(self) -> Formulas {
        self.formulas
    }

    pub fn structure(&self) -> &Structure {
        self.structure
    }

    /// `worsen(X)`: `change_0(X)` if `X` keeps its value, `change_1(X)` otherwise.
    pub fn worsen(&mut self, x: VarId) -> FormulaId {
        let k = (self.from.get(x) != self.to.get(x)) as usize;
        self.change(x, k)
    }

    /// `change_k(X)`: some worsening sequence from `o[≥X]` to `o'[≥X]`
    /// changes `X` at least `k` times.
    pub fn change(&mut self, x: VarId, k: usize) -> FormulaId {
        if let Some(&id) = self.memo.get(&(x, k)) {
            return id;
        }
        let body = self.expand(x, k);
        let id = self.formulas.change(x, k, body);
        self.memo.insert((x, k), id);
        id
    }

    /// Literal on `X`'s rule under the parent context `y` (when
    /// `parent_as_in_o`) or `ȳ`, preferring `x` (when `prefer_as_in_o`) or `x̄`.
    fn lit(&mut self, x: VarId, parent_as_in_o: bool, prefer_as_in_o: bool) -> FormulaId {
        let s = self.structure;
        let a = self.from.get(x);
        let context = match s.parent(x) {
            Some(y) => (self.from.get(y) == parent_as_in_o) as u32,
            None => 0,
        };
        let slot = s.slot_id(RuleSlot { var: x, context });
        self.formulas.lit(RuleLiteral {
            slot,
            orientation: Orientation::toward(a == prefer_as_in_o),
        })
    }

    /// `(y: x>x̄ ∧ ȳ: x̄>x)` when `down_under_y`, else `(y: x̄>x ∧ ȳ: x>x̄)`.
    fn alternation(&mut self, x: VarId, down_under_y: bool) -> FormulaId {
        let first = self.lit(x, true, down_under_y);
        let second = self.lit(x, false, !down_under_y);
        self.formulas.and([first, second])
    }

    fn expand(&mut self, x: VarId, k: usize) -> FormulaId {
        let s = self.structure;
        let same_x = self.from.get(x) == self.to.get(x);
        let Some(y) = s.parent(x) else {
            return match (same_x, k) {
                (true, 0) => Formulas::TRUE,
                (true, _) => Formulas::FALSE,
                (false, 0) => self.change(x, 1),
                (false, 1) => self.lit(x, true, true),
                (false, _) => Formulas::FALSE,
            };
        };
        let same_y = self.from.get(y) == self.to.get(y);
        match (k, same_x) {
            (0, true) => self.change(y, 0),
            (0, false) => self.change(x, 1),
            (1, true) => self.change(x, 2),
            (1, false) if same_y => {
                // (y: x>x̄ ∧ change_0(Y)) ∨ (ȳ: x>x̄ ∧ change_2(Y))
                let l1 = self.lit(x, true, true);
                let c0 = self.change(y, 0);
                let l2 = self.lit(x, false, true);
                let c2 = self.change(y, 2);
                let d1 = self.formulas.and([l1, c0]);
                let d2 = self.formulas.and([l2, c2]);
                self.formulas.or([d1, d2])
            }
            (1, false) => {
                // (y: x>x̄ ∨ ȳ: x>x̄) ∧ change_1(Y)
                let l1 = self.lit(x, true, true);
                let l2 = self.lit(x, false, true);
                let either = self.formulas.or([l1, l2]);
                let c1 = self.change(y, 1);
                self.formulas.and([either, c1])
            }
            // Rules 0 and 3: wrong parity for the endpoints, round up.
            (k, true) if k % 2 == 1 => self.change(x, k + 1),
            (k, false) if k % 2 == 0 => self.change(x, k + 1),
            // Rules 1 and 5: both alternations, parent changes k times.
            (k, _) if same_x == same_y => {
                let t1 = self.alternation(x, true);
                let t2 = self.alternation(x, false);
                let either = self.formulas.or([t1, t2]);
                let ck = self.change(y, k);
                self.formulas.and([either, ck])
            }
            // Rules 2 and 4: the alternation decides between k-1 and k+1.
            (k, _) => {
                let t1 = self.alternation(x, true);
                let below = self.change(y, k - 1);
                let t2 = self.alternation(x, false);
                let above = self.change(y, k + 1);
                let d1 = self.formulas.and([t1, below]);
                let d2 = self.formulas.and([t2, above]);
                self.formulas.or([d1, d2])
            }
        }
    }
}
