//! Finitely presented enumeration families with constant-tail semantics.
//!
//! A trace lists enumeration events in stage order. Member `n` of the family
//! is whatever the events addressed to `n` produce; every `n ≥ nmax` is equal
//! to member `nmax - 1`. Truncating the event list at stage `t` gives the
//! stage-`t` approximation, and the complete trace stands in for the limit.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fatou::StepFunction;
use crate::kernel::{format_rational, parse_rational, CylinderSet, Rational, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Sets,
    Open,
    Measure,
    Tree,
    Func,
}

impl FamilyKind {
    pub fn has_depth(self) -> bool {
        matches!(self, FamilyKind::Open | FamilyKind::Tree | FamilyKind::Func)
    }

    fn verb(self) -> &'static str {
        match self {
            FamilyKind::Sets | FamilyKind::Open => "add",
            _ => "raise",
        }
    }

    fn keyed_by_word(self) -> bool {
        matches!(self, FamilyKind::Open | FamilyKind::Tree | FamilyKind::Func)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Sets => "sets",
            FamilyKind::Open => "open",
            FamilyKind::Measure => "measure",
            FamilyKind::Tree => "tree",
            FamilyKind::Func => "func",
        })
    }
}

impl FromStr for FamilyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "sets" => FamilyKind::Sets,
            "open" => FamilyKind::Open,
            "measure" => FamilyKind::Measure,
            "tree" => FamilyKind::Tree,
            "func" => FamilyKind::Func,
            other => return Err(format!("unknown family kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Token(String),
    Word(Word),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Token(t) => f.write_str(t),
            Target::Word(w) => write!(f, "{w}"),
        }
    }
}

/// One enumeration event: `add` (no value) or `raise` (positive value).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub n: usize,
    pub target: Target,
    pub value: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    kind: FamilyKind,
    nmax: usize,
    depth: Option<usize>,
    events: Vec<Event>,
}

pub fn is_token(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl Trace {
    /// An empty trace; events are appended with [`Trace::push`].
    pub fn new(kind: FamilyKind, nmax: usize, depth: Option<usize>) -> Result<Trace> {
        if nmax == 0 {
            return Err(Error::input("nmax must be positive"));
        }
        match (kind.has_depth(), depth) {
            (true, Some(d)) if d == 0 || d > Word::MAX_LEN => {
                Err(Error::input(format!("depth must be in 1..={}", Word::MAX_LEN)))
            }
            (true, None) => Err(Error::input(format!("{kind} family needs a depth"))),
            (false, Some(_)) => Err(Error::input(format!("{kind} family takes no depth"))),
            _ => Ok(Trace {
                kind,
                nmax,
                depth,
                events: Vec::new(),
            }),
        }
    }

    pub fn push(&mut self, event: Event) -> Result<()> {
        self.check_event(&event).map_err(Error::input)?;
        self.events.push(event);
        Ok(())
    }

    fn check_event(&self, event: &Event) -> Result<(), String> {
        if event.n >= self.nmax {
            return Err(format!("index {} >= nmax {}", event.n, self.nmax));
        }
        match (&event.target, self.kind.keyed_by_word()) {
            (Target::Word(w), true) => {
                let depth = self.depth.unwrap_or(0);
                if w.len() > depth {
                    return Err(format!("word {w} longer than depth {depth}"));
                }
            }
            (Target::Token(t), false) => {
                if !is_token(t) {
                    return Err(format!("invalid token `{t}`"));
                }
            }
            _ => return Err(format!("target kind does not match {} family", self.kind)),
        }
        match (&event.value, self.kind.verb()) {
            (None, "add") => Ok(()),
            (Some(v), "raise") if *v > Rational::zero() => Ok(()),
            (Some(v), "raise") => Err(format!("non-positive value {}", format_rational(v))),
            _ => Err(format!("{} family expects `{}` events", self.kind, self.kind.verb())),
        }
    }

    pub fn parse(text: &str) -> Result<Trace> {
        let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let (hline, header) = lines
            .by_ref()
            .find(|(_, l)| !l.is_empty())
            .ok_or_else(|| Error::parse(1, "missing `family` header"))?;
        let mut trace = parse_header(header).map_err(|m| Error::parse(hline, m))?;
        for (lineno, line) in lines {
            if line.is_empty() {
                continue;
            }
            let event = trace.parse_event(line).map_err(|m| Error::parse(lineno, m))?;
            trace.check_event(&event).map_err(|m| Error::parse(lineno, m))?;
            trace.events.push(event);
        }
        Ok(trace)
    }

    fn parse_event(&self, line: &str) -> Result<Event, String> {
        let parts: Vec<&str> = line.split(' ').collect();
        let verb = self.kind.verb();
        let arity = if verb == "add" { 3 } else { 4 };
        if parts.len() != arity || parts[0] != verb {
            return Err(format!("expected `{verb} <n> <target>{}`", if arity == 4 { " <p/q>" } else { "" }));
        }
        let n: usize = parts[1]
            .parse()
            .ok()
            .filter(|_| parts[1].bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| format!("bad index `{}`", parts[1]))?;
        let target = if self.kind.keyed_by_word() {
            Target::Word(parts[2].parse().map_err(|e| format!("bad word `{}`: {e}", parts[2]))?)
        } else {
            Target::Token(parts[2].to_string())
        };
        let value = if arity == 4 {
            Some(parse_rational(parts[3]).ok_or_else(|| format!("bad rational `{}`", parts[3]))?)
        } else {
            None
        };
        Ok(Event { n, target, value })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn depth(&self) -> Option<usize> {
        self.depth
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// The stage-`t` approximation: only events at line index `< t` have happened.
    pub fn stage(&self, t: usize) -> Trace {
        Trace {
            events: self.events[..t.min(self.events.len())].to_vec(),
            ..self.clone()
        }
    }

    /// Targets in order of first appearance.
    pub fn universe(&self) -> Vec<Target> {
        let mut seen = HashSet::new();
        self.events
            .iter()
            .filter(|e| seen.insert(e.target.clone()))
            .map(|e| e.target.clone())
            .collect()
    }

    fn expect_kind(&self, kind: FamilyKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::input(format!("expected a {kind} family, found {}", self.kind)))
        }
    }

    fn tokens(&self) -> Vec<String> {
        self.universe()
            .into_iter()
            .filter_map(|t| match t {
                Target::Token(s) => Some(s),
                Target::Word(_) => None,
            })
            .collect()
    }

    fn words(&self) -> Vec<Word> {
        self.universe()
            .into_iter()
            .filter_map(|t| match t {
                Target::Word(w) => Some(w),
                Target::Token(_) => None,
            })
            .collect()
    }

    pub fn sets(&self) -> Result<SetFamily> {
        self.expect_kind(FamilyKind::Sets)?;
        let mut members = vec![BTreeSet::new(); self.nmax];
        for e in &self.events {
            if let Target::Token(t) = &e.target {
                members[e.n].insert(t.clone());
            }
        }
        Ok(StabilizedFamily::new(None, self.tokens(), members))
    }

    pub fn open(&self) -> Result<OpenFamily> {
        self.expect_kind(FamilyKind::Open)?;
        let mut words = vec![Vec::new(); self.nmax];
        for e in &self.events {
            if let Target::Word(w) = e.target {
                words[e.n].push(w);
            }
        }
        let members = words.into_iter().map(CylinderSet::from_words).collect();
        Ok(StabilizedFamily::new(self.depth, self.words(), members))
    }

    pub fn measure(&self) -> Result<MeasureFamily> {
        self.expect_kind(FamilyKind::Measure)?;
        let mut members = vec![BTreeMap::new(); self.nmax];
        for e in &self.events {
            if let (Target::Token(t), Some(v)) = (&e.target, &e.value) {
                raise_entry(&mut members[e.n], t.clone(), v);
            }
        }
        Ok(StabilizedFamily::new(None, self.tokens(), members))
    }

    pub fn tree(&self) -> Result<TreeFamily> {
        self.expect_kind(FamilyKind::Tree)?;
        let mut members = vec![BTreeMap::new(); self.nmax];
        for e in &self.events {
            if let (Target::Word(w), Some(v)) = (&e.target, &e.value) {
                raise_entry(&mut members[e.n], *w, v);
            }
        }
        Ok(StabilizedFamily::new(self.depth, self.words(), members))
    }

    pub fn func(&self) -> Result<FuncFamily> {
        self.expect_kind(FamilyKind::Func)?;
        let depth = self.depth.expect("func traces carry a depth");
        if depth > StepFunction::MAX_DEPTH {
            return Err(Error::input(format!(
                "func depth {depth} exceeds {}",
                StepFunction::MAX_DEPTH
            )));
        }
        let mut members = vec![StepFunction::zero(depth); self.nmax];
        for e in &self.events {
            if let (Target::Word(w), Some(v)) = (&e.target, &e.value) {
                members[e.n].raise(*w, v);
            }
        }
        Ok(StabilizedFamily::new(self.depth, self.words(), members))
    }

    /// Serializes in the trace grammar; `Trace::parse(t.render()) == t`.
    pub fn render(&self) -> String {
        let mut out = format!("family {} nmax={}", self.kind, self.nmax);
        if let Some(d) = self.depth {
            out.push_str(&format!(" depth={d}"));
        }
        out.push('\n');
        for e in &self.events {
            out.push_str(&format!("{} {} {}", self.kind.verb(), e.n, e.target));
            if let Some(v) = &e.value {
                out.push(' ');
                out.push_str(&format_rational(v));
            }
            out.push('\n');
        }
        out
    }
}

fn raise_entry<K: Ord>(table: &mut BTreeMap<K, Rational>, key: K, value: &Rational) {
    let entry = table.entry(key).or_insert_with(Rational::zero);
    if *entry < *value {
        *entry = value.clone();
    }
}

fn parse_header(line: &str) -> Result<Trace, String> {
    let parts: Vec<&str> = line.split(' ').collect();
    if parts.len() < 3 || parts[0] != "family" {
        return Err("expected `family <kind> nmax=<INT>`".into());
    }
    let kind: FamilyKind = parts[1].parse()?;
    let number = |field: &str, key: &str| -> Result<usize, String> {
        let digits = field
            .strip_prefix(key)
            .ok_or_else(|| format!("expected `{key}<INT>`, found `{field}`"))?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad integer in `{field}`"));
        }
        digits.parse().map_err(|_| format!("integer out of range in `{field}`"))
    };
    let nmax = number(parts[2], "nmax=")?;
    let depth = match (kind.has_depth(), parts.len()) {
        (true, 4) => Some(number(parts[3], "depth=")?),
        (true, _) => return Err(format!("{kind} family needs ` depth=<INT>`")),
        (false, 3) => None,
        (false, _) => return Err(format!("unexpected trailing fields for {kind} family")),
    };
    Trace::new(kind, nmax, depth).map_err(|e| e.to_string())
}

/// Members `0..nmax`; every index `≥ nmax` reads member `nmax - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizedFamily<T, K> {
    depth: Option<usize>,
    universe: Vec<K>,
    members: Vec<T>,
}

pub type SetFamily = StabilizedFamily<BTreeSet<String>, String>;
pub type OpenFamily = StabilizedFamily<CylinderSet, Word>;
pub type MeasureFamily = StabilizedFamily<BTreeMap<String, Rational>, String>;
pub type TreeFamily = StabilizedFamily<BTreeMap<Word, Rational>, Word>;
pub type FuncFamily = StabilizedFamily<StepFunction, Word>;

impl<T, K> StabilizedFamily<T, K> {
    pub fn new(depth: Option<usize>, universe: Vec<K>, members: Vec<T>) -> Self {
        assert!(!members.is_empty(), "a family has at least one member");
        StabilizedFamily {
            depth,
            universe,
            members,
        }
    }

    pub fn nmax(&self) -> usize {
        self.members.len()
    }

    pub fn depth(&self) -> Option<usize> {
        self.depth
    }

    /// Keys in order of first appearance in the trace.
    pub fn universe(&self) -> &[K] {
        &self.universe
    }

    pub fn member(&self, n: usize) -> &T {
        &self.members[n.min(self.members.len() - 1)]
    }

    pub fn tail(&self) -> &T {
        self.members.last().expect("non-empty family")
    }

    pub fn members(&self) -> &[T] {
        &self.members
    }
}

/// `∪_N ∩_{n≥N} U_n`. Under the tail rule only `N < nmax` matter.
pub fn liminf_sets(f: &SetFamily) -> BTreeSet<String> {
    liminf_sets_with_witness(f).0
}

/// The liminf together with an index `N` such that it is contained in every `U_n`, `n ≥ N`.
pub fn liminf_sets_with_witness(f: &SetFamily) -> (BTreeSet<String>, usize) {
    let mut result = BTreeSet::new();
    let mut witness = 0;
    for start in 0..f.nmax() {
        let mut suffix: BTreeSet<String> = f.member(start).clone();
        for n in start + 1..f.nmax() {
            suffix = suffix.intersection(f.member(n)).cloned().collect();
        }
        if suffix.iter().any(|u| !result.contains(u)) {
            witness = start;
        }
        result.extend(suffix);
    }
    (result, witness)
}

/// `∪_N ∩_{n≥N} U_n` as an exact cylinder set.
pub fn liminf_open(f: &OpenFamily) -> CylinderSet {
    let mut suffix = f.tail().clone();
    let mut result = suffix.clone();
    for n in (0..f.nmax() - 1).rev() {
        suffix = suffix.intersect(f.member(n));
        result = result.union(&suffix);
    }
    result
}

/// `max_N min_{N ≤ n < nmax} value(n)`, the liminf of a stabilized sequence.
pub fn liminf_sequence(nmax: usize, value: impl Fn(usize) -> Rational) -> Rational {
    (0..nmax)
        .map(|start| {
            (start..nmax)
                .map(&value)
                .min()
                .expect("non-empty suffix")
        })
        .max()
        .expect("nmax is positive")
}

pub fn liminf_measure_value(f: &MeasureFamily, token: &str) -> Rational {
    liminf_sequence(f.nmax(), |n| f.member(n).get(token).cloned().unwrap_or_else(Rational::zero))
}

pub fn liminf_tree_value(f: &TreeFamily, word: Word) -> Rational {
    liminf_sequence(f.nmax(), |n| f.member(n).get(&word).cloned().unwrap_or_else(Rational::zero))
}

pub fn liminf_func_value(f: &FuncFamily, cell: u64) -> Rational {
    liminf_sequence(f.nmax(), |n| f.member(n).value(cell).clone())
}
