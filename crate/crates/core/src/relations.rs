//! Behavioural relations computed directly as greatest fixed points of
//! relation transformers. Nothing here touches the logic; this module is
//! the reference the characteristic-declaration route is checked against.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bitset::ProcessSet;
use crate::error::{Error, Result};
use crate::lts::Lts;

/// A binary relation over `0..n`, stored row-wise: row `p` holds every `q`
/// with `(p, q)` in the relation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: Vec<ProcessSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            rows: vec![ProcessSet::empty(n); n],
        }
    }

    pub fn full(n: usize) -> Self {
        Relation {
            rows: vec![ProcessSet::full(n); n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Relation {
            rows: (0..n).map(|p| ProcessSet::singleton(n, p)).collect(),
        }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(n);
        for (p, q) in pairs {
            r.insert(p, q);
        }
        r
    }

    /// Rows must all be over the universe `rows.len()`.
    pub fn from_rows(rows: Vec<ProcessSet>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.universe() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.universe(),
            });
        }
        Ok(Relation { rows })
    }

    /// Each pair included independently with probability 1/2.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut r = Self::empty(n);
        for p in 0..n {
            for q in 0..n {
                if rng.gen_bool(0.5) {
                    r.insert(p, q);
                }
            }
        }
        r
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, p: usize, q: usize) -> bool {
        self.rows.get(p).is_some_and(|r| r.contains(q))
    }

    pub fn insert(&mut self, p: usize, q: usize) {
        self.rows[p].insert(q);
    }

    pub fn remove(&mut self, p: usize, q: usize) {
        self.rows[p].remove(q);
    }

    pub fn row(&self, p: usize) -> &ProcessSet {
        &self.rows[p]
    }

    pub fn rows(&self) -> &[ProcessSet] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(ProcessSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(ProcessSet::is_empty)
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(p, r)| r.iter().map(move |q| (p, q)))
    }

    pub fn inverse(&self) -> Self {
        let n = self.size();
        let mut t = Self::empty(n);
        for (p, q) in self.pairs() {
            t.insert(q, p);
        }
        t
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Relation {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.intersection(b))
                .collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        Relation {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.union(b))
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.size() == other.size() && self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size()).all(|p| self.contains(p, p))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.inverse()
    }

    pub fn is_transitive(&self) -> bool {
        self.pairs().all(|(p, q)| self.rows[q].is_subset(&self.rows[p]))
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.size() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.size(),
            });
        }
        Ok(())
    }

    /// `p q` per line, sorted.
    pub fn render_pairs(&self, name: impl Fn(usize) -> String) -> String {
        self.pairs()
            .map(|(p, q)| format!("{} {}\n", name(p), name(q)))
            .collect()
    }

    /// `p: q1 q2 ...` per source process.
    pub fn render_summary(&self, name: impl Fn(usize) -> String) -> String {
        let mut out = String::new();
        for (p, row) in self.rows.iter().enumerate() {
            out.push_str(&name(p));
            out.push(':');
            for q in row.iter() {
                out.push(' ');
                out.push_str(&name(q));
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// One application of the simulation functional: `(p, q)` survives iff every
/// `p --a--> p'` is answered by some `q --a--> q'` with `(p', q')` in `s`.
pub fn step_f(lts: &Lts, s: &Relation) -> Result<Relation> {
    let n = lts.num_states();
    s.check_dim(n)?;
    let mut out = Relation::empty(n);
    for p in 0..n {
        for q in 0..n {
            let matched = lts.action_ids().all(|a| {
                let answers = lts.successors_of(q, a);
                lts.successors_of(p, a)
                    .iter()
                    .all(|p2| answers.intersects(s.row(p2)))
            });
            if matched {
                out.insert(p, q);
            }
        }
    }
    Ok(out)
}

/// Monotone relation transformers built from the simulation functional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transformer {
    /// The simulation functional itself.
    BaseF,
    /// `S |-> (t(S^-1))^-1`
    Tilde(Box<Transformer>),
    /// `S |-> t(S) & A`
    CapConst(Box<Transformer>, Relation),
    /// `S |-> t1(S) & t2(S)`
    CapFun(Box<Transformer>, Box<Transformer>),
}

impl Transformer {
    pub fn tilde(t: Transformer) -> Self {
        Transformer::Tilde(Box::new(t))
    }

    pub fn cap_const(t: Transformer, a: Relation) -> Self {
        Transformer::CapConst(Box::new(t), a)
    }

    pub fn cap_fun(t1: Transformer, t2: Transformer) -> Self {
        Transformer::CapFun(Box::new(t1), Box::new(t2))
    }

    pub fn sim() -> Self {
        Transformer::BaseF
    }

    pub fn opsim() -> Self {
        Self::tilde(Transformer::BaseF)
    }

    pub fn bisim() -> Self {
        Self::cap_fun(Self::sim(), Self::opsim())
    }
}

pub fn apply(t: &Transformer, lts: &Lts, s: &Relation) -> Result<Relation> {
    match t {
        Transformer::BaseF => step_f(lts, s),
        Transformer::Tilde(inner) => Ok(apply(inner, lts, &s.inverse())?.inverse()),
        Transformer::CapConst(inner, a) => {
            a.check_dim(lts.num_states())?;
            Ok(apply(inner, lts, s)?.intersection(a))
        }
        Transformer::CapFun(t1, t2) => Ok(apply(t1, lts, s)?.intersection(&apply(t2, lts, s)?)),
    }
}

/// Greatest fixed point together with the number of applications performed
/// (the last one confirms stability).
pub fn gfp_rel_counted(t: &Transformer, lts: &Lts) -> Result<(Relation, usize)> {
    let mut current = Relation::full(lts.num_states());
    let mut iterations = 0;
    loop {
        let next = apply(t, lts, &current)?;
        iterations += 1;
        if next == current {
            return Ok((current, iterations));
        }
        current = next;
    }
}

pub fn gfp_rel(t: &Transformer, lts: &Lts) -> Result<Relation> {
    gfp_rel_counted(t, lts).map(|(r, _)| r)
}

/// The behavioural relations covered by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Sim,
    Opsim,
    Bisim,
    Simeq,
    /// n-nested simulation, n >= 1
    NSim(usize),
    /// inverse n-nested simulation, n >= 1
    NOpsim(usize),
}

impl Kind {
    pub fn validate(self) -> Result<Self> {
        match self {
            Kind::NSim(0) | Kind::NOpsim(0) => Err(Error::NestingDepth(0)),
            k => Ok(k),
        }
    }

    /// `nsim:1` is `sim`, `nopsim:1` is `opsim`.
    pub fn normalize(self) -> Self {
        match self {
            Kind::NSim(1) => Kind::Sim,
            Kind::NOpsim(1) => Kind::Opsim,
            k => k,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Sim => f.write_str("sim"),
            Kind::Opsim => f.write_str("opsim"),
            Kind::Bisim => f.write_str("bisim"),
            Kind::Simeq => f.write_str("simeq"),
            Kind::NSim(n) => write!(f, "nsim:{n}"),
            Kind::NOpsim(n) => write!(f, "nopsim:{n}"),
        }
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidKind(s.to_string());
        let kind = match s.trim() {
            "sim" => Kind::Sim,
            "opsim" => Kind::Opsim,
            "bisim" => Kind::Bisim,
            "simeq" => Kind::Simeq,
            other => {
                let (name, depth) = other.split_once(':').ok_or_else(bad)?;
                let n: usize = depth.trim().parse().map_err(|_| bad())?;
                match name.trim() {
                    "nsim" => Kind::NSim(n),
                    "nopsim" => Kind::NOpsim(n),
                    _ => return Err(bad()),
                }
            }
        };
        kind.validate()
    }
}

/// Computes relations for one LTS, remembering each nested level so deeper
/// kinds reuse shallower ones.
pub struct PreorderCache<'a> {
    lts: &'a Lts,
    memo: HashMap<Kind, (Relation, usize)>,
}

impl<'a> PreorderCache<'a> {
    pub fn new(lts: &'a Lts) -> Self {
        PreorderCache {
            lts,
            memo: HashMap::new(),
        }
    }

    pub fn get(&mut self, kind: Kind) -> Result<Relation> {
        self.get_counted(kind).map(|(r, _)| r)
    }

    /// The relation and the gfp iteration count that produced it (0 for
    /// `simeq`, which is an intersection rather than a fixed point).
    pub fn get_counted(&mut self, kind: Kind) -> Result<(Relation, usize)> {
        let kind = kind.validate()?.normalize();
        if let Some(hit) = self.memo.get(&kind) {
            return Ok(hit.clone());
        }
        let computed = match kind {
            Kind::Sim => gfp_rel_counted(&Transformer::sim(), self.lts)?,
            Kind::Opsim => gfp_rel_counted(&Transformer::opsim(), self.lts)?,
            Kind::Bisim => gfp_rel_counted(&Transformer::bisim(), self.lts)?,
            Kind::Simeq => {
                let sim = self.get(Kind::Sim)?;
                let opsim = self.get(Kind::Opsim)?;
                (sim.intersection(&opsim), 0)
            }
            Kind::NSim(n) => {
                let below = self.get(Kind::NOpsim(n - 1))?;
                gfp_rel_counted(&Transformer::cap_const(Transformer::sim(), below), self.lts)?
            }
            Kind::NOpsim(n) => {
                let below = self.get(Kind::NSim(n - 1))?;
                gfp_rel_counted(&Transformer::cap_const(Transformer::opsim(), below), self.lts)?
            }
        };
        self.memo.insert(kind, computed.clone());
        Ok(computed)
    }
}

pub fn preorder(kind: Kind, lts: &Lts) -> Result<Relation> {
    PreorderCache::new(lts).get(kind)
}
