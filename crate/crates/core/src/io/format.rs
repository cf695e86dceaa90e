//! Line-oriented text format for nets.
//!
//! ```text
//! # comments run to end of line
//! pcpnet                      # or `cpnet`, or `cpnet incomplete`
//! var A
//! var B <- A
//! A : 1>0 (0.8)
//! B | A=1 : 1>0 (0.2)
//! B | A=0 : 0>1 (0.7)
//! ```
//!
//! `1>0` reads "value 1 is preferred to value 0". The probability in
//! parentheses is the chance that the rule reads `1>0`; it is required
//! for `pcpnet` files and forbidden otherwise. Only `cpnet incomplete`
//! files may leave slots without a line.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, ParseError, Result, SemanticError};
use crate::model::{CpNet, IncompleteCpNet, Orientation, Outcome, PcpNet, RuleSlot, Structure, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DocumentKind {
    Det,
    Pcp,
    Incomplete,
}

impl DocumentKind {
    pub fn header(self) -> &'static str {
        match self {
            DocumentKind::Det => "cpnet",
            DocumentKind::Pcp => "pcpnet",
            DocumentKind::Incomplete => "cpnet incomplete",
        }
    }
}

/// A parsed net file.
#[derive(Debug, Clone, PartialEq)]
pub enum NetDocument {
    Det(CpNet),
    Pcp(PcpNet),
    Incomplete(IncompleteCpNet),
}

impl NetDocument {
    pub fn kind(&self) -> DocumentKind {
        match self {
            NetDocument::Det(_) => DocumentKind::Det,
            NetDocument::Pcp(_) => DocumentKind::Pcp,
            NetDocument::Incomplete(_) => DocumentKind::Incomplete,
        }
    }

    pub fn structure(&self) -> &Arc<Structure> {
        match self {
            NetDocument::Det(n) => n.structure(),
            NetDocument::Pcp(n) => n.structure(),
            NetDocument::Incomplete(n) => n.structure(),
        }
    }
}

impl From<CpNet> for NetDocument {
    fn from(n: CpNet) -> Self {
        NetDocument::Det(n)
    }
}

impl From<PcpNet> for NetDocument {
    fn from(n: PcpNet) -> Self {
        NetDocument::Pcp(n)
    }
}

impl From<IncompleteCpNet> for NetDocument {
    fn from(n: IncompleteCpNet) -> Self {
        NetDocument::Incomplete(n)
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse(ParseError {
        line,
        column,
        message: message.into(),
    })
}

fn semantic(line: Option<usize>, slot: Option<String>, message: impl Into<String>) -> Error {
    Error::Semantic(SemanticError {
        slot,
        line,
        message: message.into(),
    })
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Cursor over one line; columns are 1-based character positions.
struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor { text, pos: 0, line }
    }

    fn column(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn error(&self, message: impl Into<String>) -> Error {
        parse_err(self.line, self.column(), message)
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    /// Returns the name and its starting column.
    fn name(&mut self) -> Result<(&'a str, usize)> {
        self.skip_ws();
        let col = self.column();
        let rest = self.rest();
        let len = rest.find(|c: char| !is_name_char(c)).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected a variable name"));
        }
        self.pos += len;
        Ok((&rest[..len], col))
    }

    fn bit(&mut self) -> Result<bool> {
        if self.eat("0") {
            Ok(false)
        } else if self.eat("1") {
            Ok(true)
        } else {
            Err(self.error("expected `0` or `1`"))
        }
    }

    fn end(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected `{}`", self.rest().trim_end())))
        }
    }
}

struct VarLine<'a> {
    line: usize,
    name: &'a str,
    parents: Vec<(&'a str, usize)>,
}

struct TableLine<'a> {
    line: usize,
    var: (&'a str, usize),
    condition: Vec<((&'a str, usize), bool)>,
    orientation: Orientation,
    prob: Option<(f64, usize)>,
}

fn parse_header(text: &str, line: usize) -> Result<DocumentKind> {
    let words: Vec<&str> = text.split_whitespace().collect();
    match words[..] {
        ["pcpnet"] => Ok(DocumentKind::Pcp),
        ["cpnet"] => Ok(DocumentKind::Det),
        ["cpnet", "incomplete"] => Ok(DocumentKind::Incomplete),
        _ => Err(parse_err(
            line,
            1,
            "expected header `pcpnet`, `cpnet` or `cpnet incomplete`",
        )),
    }
}

fn parse_var_line(mut c: Cursor<'_>) -> Result<VarLine<'_>> {
    c.expect("var")?;
    let (name, _) = c.name()?;
    let mut parents = Vec::new();
    if !c.at_end() {
        c.expect("<-")?;
        loop {
            parents.push(c.name()?);
            if !c.eat(",") {
                break;
            }
        }
    }
    c.end()?;
    Ok(VarLine {
        line: c.line,
        name,
        parents,
    })
}

fn parse_probability(c: &mut Cursor<'_>) -> Result<(f64, usize)> {
    c.skip_ws();
    let col = c.column();
    let rest = c.rest();
    let len = rest
        .find(|ch: char| !(ch.is_ascii_digit() || matches!(ch, '.' | 'e' | 'E' | '+' | '-')))
        .unwrap_or(rest.len());
    let text = &rest[..len];
    let value: f64 = text
        .parse()
        .map_err(|_| parse_err(c.line, col, format!("`{text}` is not a decimal number")))?;
    c.pos += len;
    Ok((value, col))
}

fn parse_table_line(mut c: Cursor<'_>) -> Result<TableLine<'_>> {
    let var = c.name()?;
    let mut condition = Vec::new();
    if c.eat("|") {
        loop {
            let parent = c.name()?;
            c.expect("=")?;
            condition.push((parent, c.bit()?));
            if !c.eat(",") {
                break;
            }
        }
    }
    c.expect(":")?;
    let first = c.bit()?;
    c.expect(">")?;
    let second = c.bit()?;
    if first == second {
        return Err(c.error("a preference must compare `1` and `0`"));
    }
    let orientation = Orientation::toward(first);
    let prob = if c.eat("(") {
        let p = parse_probability(&mut c)?;
        c.expect(")")?;
        Some(p)
    } else {
        None
    };
    c.end()?;
    Ok(TableLine {
        line: c.line,
        var,
        condition,
        orientation,
        prob,
    })
}

/// Parses a net file.
pub fn parse_net(text: &str) -> Result<NetDocument> {
    let mut kind = None;
    let mut vars = Vec::new();
    let mut tables = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if kind.is_none() {
            kind = Some(parse_header(content, line)?);
            continue;
        }
        let c = Cursor::new(content, line);
        let starts_var = content
            .trim_start()
            .strip_prefix("var")
            .is_some_and(|r| r.starts_with(char::is_whitespace) || r.is_empty());
        if starts_var {
            vars.push(parse_var_line(c)?);
        } else {
            tables.push(parse_table_line(c)?);
        }
    }
    let kind = kind.ok_or_else(|| parse_err(1, 1, "empty document: missing header"))?;
    let structure = Arc::new(build_structure(&vars)?);
    build_document(kind, structure, &tables)
}

fn build_structure(vars: &[VarLine<'_>]) -> Result<Structure> {
    let mut index = HashMap::new();
    for (i, v) in vars.iter().enumerate() {
        if index.insert(v.name, i).is_some() {
            return Err(semantic(
                Some(v.line),
                None,
                format!("variable `{}` declared twice", v.name),
            ));
        }
    }
    let mut parents = Vec::with_capacity(vars.len());
    for v in vars {
        let mut ps = Vec::with_capacity(v.parents.len());
        for &(p, col) in &v.parents {
            let &j = index
                .get(p)
                .ok_or_else(|| parse_err(v.line, col, format!("unknown variable `{p}`")))?;
            if ps.contains(&j) {
                return Err(parse_err(v.line, col, format!("parent `{p}` listed twice")));
            }
            ps.push(j);
        }
        parents.push(ps);
    }
    let names = vars.iter().map(|v| v.name.to_string()).collect();
    Structure::new(names, parents).map_err(|e| {
        let line = match &e {
            Error::CycleDetected(name) => vars.iter().find(|v| v.name == name).map(|v| v.line),
            _ => None,
        };
        semantic(line, None, e.to_string())
    })
}

fn build_document(kind: DocumentKind, s: Arc<Structure>, tables: &[TableLine<'_>]) -> Result<NetDocument> {
    let mut orientations: Vec<Option<Orientation>> = vec![None; s.num_slots()];
    let mut probs = vec![0.0; s.num_slots()];
    let mut seen_at: Vec<Option<usize>> = vec![None; s.num_slots()];
    for t in tables {
        let (name, col) = t.var;
        let v = s
            .var_by_name(name)
            .ok_or_else(|| parse_err(t.line, col, format!("unknown variable `{name}`")))?;
        let slot = slot_of(&s, v, t)?;
        let id = s.slot_id(slot);
        let label = Some(s.slot_label(slot));
        if let Some(prev) = seen_at[id.0] {
            return Err(semantic(
                Some(t.line),
                label,
                format!("rule already given on line {prev}"),
            ));
        }
        seen_at[id.0] = Some(t.line);
        match (kind, t.prob) {
            (DocumentKind::Pcp, None) => {
                return Err(semantic(Some(t.line), label, "missing probability `(p)`"));
            }
            (DocumentKind::Pcp, Some((p, col))) => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(parse_err(t.line, col, format!("probability {p} is outside [0, 1]")));
                }
                // The probability is that of `1>0`; a `0>1` line gives its complement.
                probs[id.0] = if t.orientation.preferred() { p } else { 1.0 - p };
            }
            (_, Some((_, col))) => {
                return Err(parse_err(
                    t.line,
                    col,
                    "probabilities are only allowed in `pcpnet` files",
                ));
            }
            (_, None) => {}
        }
        orientations[id.0] = Some(t.orientation);
    }
    if kind != DocumentKind::Incomplete {
        if let Some(missing) = orientations.iter().position(Option::is_none) {
            let label = s.slot_label(s.slot(crate::SlotId(missing)));
            return Err(semantic(None, Some(label), "no rule given for this slot"));
        }
    }
    Ok(match kind {
        DocumentKind::Det => NetDocument::Det(CpNet::new(s, orientations.into_iter().flatten().collect())?),
        DocumentKind::Pcp => NetDocument::Pcp(PcpNet::new(s, probs)?),
        DocumentKind::Incomplete => NetDocument::Incomplete(IncompleteCpNet::new(s, orientations)?),
    })
}

fn slot_of(s: &Structure, v: VarId, t: &TableLine<'_>) -> Result<RuleSlot> {
    let ps = s.parents(v);
    let mut values: Vec<Option<bool>> = vec![None; ps.len()];
    for &((name, col), value) in &t.condition {
        let i = s
            .var_by_name(name)
            .and_then(|p| ps.iter().position(|&q| q == p))
            .ok_or_else(|| parse_err(t.line, col, format!("`{name}` is not a parent of `{}`", s.name(v))))?;
        if values[i].replace(value).is_some() {
            return Err(parse_err(
                t.line,
                col,
                format!("`{name}` appears twice in the condition"),
            ));
        }
    }
    if let Some(i) = values.iter().position(Option::is_none) {
        return Err(semantic(
            Some(t.line),
            None,
            format!(
                "rule for `{}` does not give a value for parent `{}`",
                s.name(v),
                s.name(ps[i])
            ),
        ));
    }
    Ok(RuleSlot {
        var: v,
        context: Structure::pack_context(values.into_iter().flatten()),
    })
}

/// Writes a document in canonical form: declarations in declaration
/// order, then one line per slot in slot order.
pub fn serialize(doc: &NetDocument) -> String {
    let s = doc.structure();
    let mut out = String::new();
    out.push_str(doc.kind().header());
    out.push('\n');
    for v in s.vars() {
        let _ = write!(out, "var {}", s.name(v));
        for (i, &p) in s.parents(v).iter().enumerate() {
            out.push_str(if i == 0 { " <- " } else { ", " });
            out.push_str(s.name(p));
        }
        out.push('\n');
    }
    for (i, slot) in s.rule_slots().into_iter().enumerate() {
        let label = s.slot_label(slot);
        let id = crate::SlotId(i);
        match doc {
            NetDocument::Det(n) => {
                let _ = writeln!(out, "{label} : {}", pref(n.orientation(id)));
            }
            NetDocument::Incomplete(n) => {
                if let Some(r) = n.orientation(id) {
                    let _ = writeln!(out, "{label} : {}", pref(r));
                }
            }
            NetDocument::Pcp(n) => {
                let _ = writeln!(out, "{label} : 1>0 ({})", n.prob_true(id));
            }
        }
    }
    out
}

fn pref(o: Orientation) -> &'static str {
    if o.preferred() {
        "1>0"
    } else {
        "0>1"
    }
}

/// Parses a total outcome written `A=1,B=0` (any variable order).
pub fn parse_outcome(s: &Structure, text: &str) -> Result<Outcome> {
    let mut values: Vec<Option<bool>> = vec![None; s.len()];
    let mut c = Cursor::new(text, 1);
    if !c.at_end() {
        loop {
            let (name, col) = c.name()?;
            let v = s
                .var_by_name(name)
                .ok_or_else(|| parse_err(1, col, format!("unknown variable `{name}`")))?;
            c.expect("=")?;
            let b = c.bit()?;
            if values[v.0].replace(b).is_some() {
                return Err(parse_err(1, col, format!("`{name}` given twice")));
            }
            if c.peek().is_none() {
                break;
            }
            c.expect(",")?;
        }
    }
    if let Some(i) = values.iter().position(Option::is_none) {
        return Err(parse_err(
            1,
            c.column(),
            format!("outcome gives no value for `{}`", s.name(VarId(i))),
        ));
    }
    Ok(Outcome::new(values.into_iter().flatten().collect()))
}
