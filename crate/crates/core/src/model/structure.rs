use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Upper bound on the number of parents of a single variable; each
/// variable owns `2^|parents|` rule slots.
pub const MAX_PARENTS: usize = 16;

/// Dense index of a variable inside its [`Structure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Global index of a rule slot inside its [`Structure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotId(pub usize);

impl SlotId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeClass {
    /// Every variable has at most one parent.
    Forest,
    AcyclicDag,
}

impl fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapeClass::Forest => "forest",
            ShapeClass::AcyclicDag => "acyclic-dag",
        })
    }
}

/// A rule slot: one variable together with one assignment of its parents.
///
/// `context` packs the parent values with the first declared parent in the
/// most significant bit, so counting upwards enumerates contexts in
/// lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleSlot {
    pub var: VarId,
    pub context: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub acyclic: bool,
    pub forest: bool,
    pub dense: bool,
    pub shape: ShapeClass,
    pub variables: usize,
    pub slots: usize,
}

/// Dependency graph over named binary variables.
///
/// Construction validates the graph; a `Structure` value is always acyclic,
/// densely indexed and has unique, nonempty names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    names: Vec<String>,
    parents: Vec<Vec<VarId>>,
    children: Vec<Vec<VarId>>,
    topo: Vec<VarId>,
    /// Position of each variable in `topo`.
    topo_rank: Vec<usize>,
    slot_offset: Vec<usize>,
    slot_owner: Vec<VarId>,
    shape: ShapeClass,
}

impl Structure {
    /// Builds a structure from variable names and, per variable, the indices
    /// of its parents in declaration order.
    pub fn new(names: Vec<String>, parents: Vec<Vec<usize>>) -> Result<Self> {
        if names.len() != parents.len() {
            return Err(Error::InvalidStructure(format!(
                "{} names but {} parent lists",
                names.len(),
                parents.len()
            )));
        }
        let n = names.len();
        let mut seen = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidStructure(format!("variable {i} has an empty name")));
            }
            if seen.insert(name.as_str(), i).is_some() {
                return Err(Error::InvalidStructure(format!("duplicate variable `{name}`")));
            }
        }

        let mut children = vec![Vec::new(); n];
        for (child, ps) in parents.iter().enumerate() {
            if ps.len() > MAX_PARENTS {
                return Err(Error::InvalidStructure(format!(
                    "`{}` has {} parents (limit {MAX_PARENTS})",
                    names[child],
                    ps.len()
                )));
            }
            for (j, &p) in ps.iter().enumerate() {
                if p >= n {
                    return Err(Error::InvalidStructure(format!(
                        "`{}` has out-of-range parent index {p}",
                        names[child]
                    )));
                }
                if p == child {
                    return Err(Error::CycleDetected(names[child].clone()));
                }
                if ps[..j].contains(&p) {
                    return Err(Error::InvalidStructure(format!(
                        "`{}` lists parent `{}` twice",
                        names[child], names[p]
                    )));
                }
                children[p].push(VarId(child));
            }
        }

        // Kahn's algorithm, smallest index first, so the order is canonical.
        let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| indegree[v] == 0).map(Reverse).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(Reverse(v)) = ready.pop() {
            topo.push(VarId(v));
            for &VarId(c) in &children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&v| indegree[v] > 0).unwrap_or(0);
            return Err(Error::CycleDetected(names[stuck].clone()));
        }

        let mut topo_rank = vec![0; n];
        for (rank, &VarId(v)) in topo.iter().enumerate() {
            topo_rank[v] = rank;
        }
        let mut slot_offset = vec![0; n];
        let mut slot_owner = Vec::new();
        for &v in &topo {
            slot_offset[v.0] = slot_owner.len();
            let count = 1usize << parents[v.0].len();
            slot_owner.extend(std::iter::repeat_n(v, count));
        }
        let shape = if parents.iter().all(|ps| ps.len() <= 1) {
            ShapeClass::Forest
        } else {
            ShapeClass::AcyclicDag
        };
        let parents = parents
            .into_iter()
            .map(|ps| ps.into_iter().map(VarId).collect())
            .collect();
        Ok(Structure {
            names,
            parents,
            children,
            topo,
            topo_rank,
            slot_offset,
            slot_owner,
            shape,
        })
    }

    /// Convenience constructor from `(name, parent names)` pairs.
    pub fn from_edges(edges: &[(&str, &[&str])]) -> Result<Self> {
        let names: Vec<String> = edges.iter().map(|(n, _)| n.to_string()).collect();
        let parents = edges
            .iter()
            .map(|(child, ps)| {
                ps.iter()
                    .map(|p| {
                        names
                            .iter()
                            .position(|n| n == p)
                            .ok_or_else(|| Error::InvalidStructure(format!("`{child}` has unknown parent `{p}`")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Structure::new(names, parents)
    }

    /// A chain `V0 -> V1 -> ... -> V{n-1}`.
    pub fn chain(n: usize) -> Self {
        let names = (0..n).map(|i| format!("V{i}")).collect();
        let parents = (0..n).map(|i| if i == 0 { vec![] } else { vec![i - 1] }).collect();
        Structure::new(names, parents).expect("a chain is a valid forest")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.len()).map(VarId)
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name).map(VarId)
    }

    pub fn parents(&self, v: VarId) -> &[VarId] {
        &self.parents[v.0]
    }

    /// The unique parent of `v` in a forest, `None` for roots.
    pub fn parent(&self, v: VarId) -> Option<VarId> {
        self.parents[v.0].first().copied()
    }

    pub fn children(&self, v: VarId) -> &[VarId] {
        &self.children[v.0]
    }

    pub fn is_leaf(&self, v: VarId) -> bool {
        self.children[v.0].is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = VarId> + '_ {
        self.vars().filter(move |&v| self.is_leaf(v))
    }

    /// Variables in canonical topological order (parents first, ties by index).
    pub fn topological_order(&self) -> &[VarId] {
        &self.topo
    }

    pub fn topo_rank(&self, v: VarId) -> usize {
        self.topo_rank[v.0]
    }

    pub fn shape(&self) -> ShapeClass {
        self.shape
    }

    pub fn is_forest(&self) -> bool {
        self.shape == ShapeClass::Forest
    }

    pub fn require_forest(&self) -> Result<()> {
        match self.vars().find(|&v| self.parents(v).len() > 1) {
            Some(v) => Err(Error::NotAForest(self.name(v).to_string())),
            None => Ok(()),
        }
    }

    pub fn num_slots(&self) -> usize {
        self.slot_owner.len()
    }

    pub fn num_contexts(&self, v: VarId) -> usize {
        1 << self.parents[v.0].len()
    }

    pub fn slot_id(&self, slot: RuleSlot) -> SlotId {
        debug_assert!((slot.context as usize) < self.num_contexts(slot.var));
        SlotId(self.slot_offset[slot.var.0] + slot.context as usize)
    }

    pub fn slot(&self, id: SlotId) -> RuleSlot {
        let var = self.slot_owner[id.0];
        RuleSlot {
            var,
            context: (id.0 - self.slot_offset[var.0]) as u32,
        }
    }

    /// All rule slots in canonical order: topological by variable, then
    /// lexicographic by context.
    pub fn rule_slots(&self) -> Vec<RuleSlot> {
        (0..self.num_slots()).map(|i| self.slot(SlotId(i))).collect()
    }

    /// Value of the `i`-th declared parent inside a packed context.
    pub fn context_value(&self, var: VarId, context: u32, i: usize) -> bool {
        let m = self.parents[var.0].len();
        context >> (m - 1 - i) & 1 == 1
    }

    /// Packs parent values (in declaration order) into a context.
    pub fn pack_context(values: impl IntoIterator<Item = bool>) -> u32 {
        values.into_iter().fold(0, |acc, b| acc << 1 | b as u32)
    }

    /// `B | A=1, C=0` style label for a slot; roots get the bare name.
    pub fn slot_label(&self, slot: RuleSlot) -> String {
        let ps = self.parents(slot.var);
        let mut label = self.name(slot.var).to_string();
        if !ps.is_empty() {
            label.push_str(" |");
            for (i, &p) in ps.iter().enumerate() {
                let sep = if i == 0 { " " } else { ", " };
                let val = self.context_value(slot.var, slot.context, i) as u8;
                label.push_str(&format!("{sep}{}={val}", self.name(p)));
            }
        }
        label
    }

    /// Depth of each variable (roots at 0) along its longest parent path.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.len()];
        for &v in &self.topo {
            depth[v.0] = self.parents(v).iter().map(|p| depth[p.0] + 1).max().unwrap_or(0);
        }
        depth
    }

    /// `v` and all its ancestors, in topological order.
    pub fn ancestors_inclusive(&self, v: VarId) -> Vec<VarId> {
        let mut mark = vec![false; self.len()];
        let mut stack = vec![v];
        mark[v.0] = true;
        while let Some(x) = stack.pop() {
            for &p in self.parents(x) {
                if !mark[p.0] {
                    mark[p.0] = true;
                    stack.push(p);
                }
            }
        }
        self.topo.iter().copied().filter(|x| mark[x.0]).collect()
    }

    pub fn report(&self) -> ValidationReport {
        ValidationReport {
            acyclic: true,
            forest: self.is_forest(),
            dense: true,
            shape: self.shape,
            variables: self.len(),
            slots: self.num_slots(),
        }
    }
}

/// Validates a candidate structure and classifies its shape.
pub fn validate_structure(names: Vec<String>, parents: Vec<Vec<usize>>) -> Result<ValidationReport> {
    Structure::new(names, parents).map(|s| s.report())
}
