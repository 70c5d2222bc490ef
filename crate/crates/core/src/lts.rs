//! Finite labelled transition systems, the Aldebaran text format and random
//! instance generation.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::ProcessSet;
use crate::error::{Error, Result};

/// An action label. Never empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action(String);

impl Action {
    pub fn new(label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::InvalidParameter("empty action label".into()));
        }
        Ok(Action(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Position of an action in the (sorted) alphabet of one LTS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(usize);

impl ActionId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: usize,
    pub action: ActionId,
    pub target: usize,
}

/// An immutable finite LTS. Processes are the dense range `0..num_states()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    num_states: usize,
    initial: usize,
    alphabet: Vec<Action>,
    transitions: Vec<Transition>,
    names: Option<Vec<String>>,
    // successors[action][state]
    successors: Vec<Vec<ProcessSet>>,
}

impl Lts {
    /// Builds an LTS from labelled triples. The alphabet is the union of
    /// `alphabet` and every label used by a transition, sorted.
    /// Duplicate triples collapse into one transition.
    pub fn new<S: AsRef<str>>(
        num_states: usize,
        alphabet: &[S],
        transitions: &[(usize, S, usize)],
    ) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::InvalidParameter("an LTS needs at least one state".into()));
        }
        let mut labels = BTreeSet::new();
        for a in alphabet {
            labels.insert(Action::new(a.as_ref())?);
        }
        for (_, a, _) in transitions {
            labels.insert(Action::new(a.as_ref())?);
        }
        let alphabet: Vec<Action> = labels.into_iter().collect();

        let mut ts = Vec::with_capacity(transitions.len());
        for (src, a, dst) in transitions {
            for &p in [src, dst] {
                if p >= num_states {
                    return Err(Error::UnknownProcess(p.to_string()));
                }
            }
            let action = lookup(&alphabet, a.as_ref())?;
            ts.push(Transition {
                source: *src,
                action,
                target: *dst,
            });
        }
        Ok(Self::assemble(0, num_states, alphabet, ts))
    }

    fn assemble(
        initial: usize,
        num_states: usize,
        alphabet: Vec<Action>,
        mut transitions: Vec<Transition>,
    ) -> Self {
        transitions.sort();
        transitions.dedup();
        let mut successors = vec![vec![ProcessSet::empty(num_states); num_states]; alphabet.len()];
        for t in &transitions {
            successors[t.action.0][t.source].insert(t.target);
        }
        Lts {
            num_states,
            initial,
            alphabet,
            transitions,
            names: None,
            successors,
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn alphabet(&self) -> &[Action] {
        &self.alphabet
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn action(&self, id: ActionId) -> &Action {
        &self.alphabet[id.0]
    }

    pub fn action_id(&self, label: &str) -> Result<ActionId> {
        lookup(&self.alphabet, label)
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.alphabet.len()).map(ActionId)
    }

    pub fn all(&self) -> ProcessSet {
        ProcessSet::full(self.num_states())
    }

    pub fn none(&self) -> ProcessSet {
        ProcessSet::empty(self.num_states())
    }

    /// Returns a copy whose alphabet additionally contains `extra`.
    pub fn with_alphabet<S: AsRef<str>>(&self, extra: &[S]) -> Result<Self> {
        let mut labels: BTreeSet<Action> = self.alphabet.iter().cloned().collect();
        for a in extra {
            labels.insert(Action::new(a.as_ref())?);
        }
        let alphabet: Vec<Action> = labels.into_iter().collect();
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition {
                action: lookup(&alphabet, self.alphabet[t.action.0].as_str()).unwrap(),
                ..*t
            })
            .collect();
        let mut l = Self::assemble(self.initial, self.num_states(), alphabet, transitions);
        l.names = self.names.clone();
        Ok(l)
    }

    /// Attaches display names, one per process. Names must be unique.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.num_states() {
            return Err(Error::InvalidParameter(format!(
                "{} names for {} processes",
                names.len(),
                self.num_states()
            )));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != names.len() {
            return Err(Error::InvalidParameter("duplicate process name".into()));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn display_name(&self, p: usize) -> String {
        match &self.names {
            Some(n) => n[p].clone(),
            None => p.to_string(),
        }
    }

    /// Resolves a display name or a numeric id.
    pub fn resolve_process(&self, text: &str) -> Result<usize> {
        let text = text.trim();
        if let Some(names) = &self.names {
            if let Some(p) = names.iter().position(|n| n == text) {
                return Ok(p);
            }
        }
        match text.parse::<usize>() {
            Ok(p) if p < self.num_states() => Ok(p),
            _ => Err(Error::UnknownProcess(text.to_string())),
        }
    }

    pub(crate) fn successors_of(&self, p: usize, a: ActionId) -> &ProcessSet {
        &self.successors[a.0][p]
    }

    /// `{ p' | p --a--> p' }`.
    pub fn successors(&self, p: usize, action: &str) -> Result<&ProcessSet> {
        let a = self.action_id(action)?;
        if p >= self.num_states() {
            return Err(Error::UnknownProcess(p.to_string()));
        }
        Ok(self.successors_of(p, a))
    }

    pub(crate) fn may_id(&self, a: ActionId, m: &ProcessSet) -> ProcessSet {
        let n = self.num_states();
        let mut out = ProcessSet::empty(n);
        for (p, succ) in self.successors[a.0].iter().enumerate() {
            if succ.intersects(m) {
                out.insert(p);
            }
        }
        out
    }

    pub(crate) fn must_id(&self, a: ActionId, m: &ProcessSet) -> ProcessSet {
        self.may_id(a, &m.complement()).complement()
    }

    /// `<a>M`: processes with at least one `a`-successor in `m`.
    pub fn may(&self, action: &str, m: &ProcessSet) -> Result<ProcessSet> {
        let a = self.action_id(action)?;
        self.check_set(m)?;
        Ok(self.may_id(a, m))
    }

    /// `[a]M`, the complement of `<a>` applied to the complement of `m`.
    pub fn must(&self, action: &str, m: &ProcessSet) -> Result<ProcessSet> {
        let a = self.action_id(action)?;
        self.check_set(m)?;
        Ok(self.must_id(a, m))
    }

    fn check_set(&self, m: &ProcessSet) -> Result<()> {
        if m.universe() != self.num_states() {
            return Err(Error::DimensionMismatch {
                expected: self.num_states(),
                found: m.universe(),
            });
        }
        Ok(())
    }
}

fn lookup(alphabet: &[Action], label: &str) -> Result<ActionId> {
    alphabet
        .binary_search_by(|a| a.as_str().cmp(label))
        .map(ActionId)
        .map_err(|_| Error::UnknownAction(label.to_string()))
}

/// Parses an Aldebaran (`.aut`) document.
///
/// Blank lines are ignored. Labels are normally double-quoted; an unquoted
/// label without commas or quotes is accepted as well.
pub fn parse_aut(text: &str) -> Result<Lts> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Aut {
        line: 1,
        message: "missing `des` header".into(),
    })?;
    let (initial, count, states) = parse_header(header).map_err(|message| Error::Aut {
        line: hline,
        message,
    })?;
    if states == 0 {
        return Err(Error::Aut {
            line: hline,
            message: "state count must be positive".into(),
        });
    }
    if initial >= states {
        return Err(Error::Aut {
            line: hline,
            message: format!("initial state {initial} out of range 0..{states}"),
        });
    }

    let mut triples: Vec<(usize, String, usize)> = Vec::with_capacity(count);
    for (line, body) in lines {
        if triples.len() == count {
            return Err(Error::Aut {
                line,
                message: format!("more than the declared {count} transitions"),
            });
        }
        let (src, label, dst) =
            parse_transition(body).map_err(|message| Error::Aut { line, message })?;
        for p in [src, dst] {
            if p >= states {
                return Err(Error::Aut {
                    line,
                    message: format!("state {p} out of range 0..{states}"),
                });
            }
        }
        triples.push((src, label, dst));
    }
    if triples.len() != count {
        return Err(Error::Aut {
            line: text.lines().count().max(1),
            message: format!(
                "header declares {count} transitions, found {}",
                triples.len()
            ),
        });
    }

    let mut lts = Lts::new::<String>(states, &[], &triples)?;
    lts.initial = initial;
    Ok(lts)
}

fn parse_header(line: &str) -> std::result::Result<(usize, usize, usize), String> {
    let rest = line
        .strip_prefix("des")
        .ok_or_else(|| "expected `des (I,T,S)`".to_string())?
        .trim();
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| "expected parenthesised `(I,T,S)`".to_string())?;
    let fields: Vec<&str> = inner.split(',').map(str::trim).collect();
    if fields.len() != 3 {
        return Err(format!("expected 3 header fields, found {}", fields.len()));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| format!("invalid number `{s}` in header"))
    };
    Ok((num(fields[0])?, num(fields[1])?, num(fields[2])?))
}

fn parse_transition(line: &str) -> std::result::Result<(usize, String, usize), String> {
    let inner = line
        .strip_prefix('(')
        .ok_or_else(|| "expected `(`".to_string())?;
    let (src, rest) = inner
        .split_once(',')
        .ok_or_else(|| "expected `,` after source state".to_string())?;
    let src = src
        .trim()
        .parse::<usize>()
        .map_err(|_| format!("invalid source state `{}`", src.trim()))?;
    let rest = rest.trim_start();

    let (label, rest) = if let Some(quoted) = rest.strip_prefix('"') {
        let end = quoted
            .find('"')
            .ok_or_else(|| "unterminated quoted label".to_string())?;
        (&quoted[..end], quoted[end + 1..].trim_start())
    } else {
        let end = rest
            .find(',')
            .ok_or_else(|| "expected `,` after label".to_string())?;
        let label = rest[..end].trim();
        if label.contains('"') {
            return Err("stray `\"` in label".into());
        }
        (label, &rest[end..])
    };
    if label.is_empty() {
        return Err("empty action label".into());
    }
    let rest = rest
        .strip_prefix(',')
        .ok_or_else(|| "expected `,` after label".to_string())?;
    let dst = rest
        .trim()
        .strip_suffix(')')
        .ok_or_else(|| "expected `)`".to_string())?
        .trim();
    let dst = dst
        .parse::<usize>()
        .map_err(|_| format!("invalid target state `{dst}`"))?;
    Ok((src, label.to_string(), dst))
}

/// Serializes to `.aut` with transitions sorted by (source, label, target).
pub fn render_aut(lts: &Lts) -> String {
    let mut out = format!(
        "des ({},{},{})\n",
        lts.initial(),
        lts.transitions().len(),
        lts.num_states()
    );
    // The alphabet is sorted, so action-id order is label order.
    for t in lts.transitions() {
        out.push_str(&format!(
            "({},\"{}\",{})\n",
            t.source,
            lts.action(t.action),
            t.target
        ));
    }
    out
}

/// Reads a sidecar names file: one display name per line, in state order.
pub fn parse_names(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

/// Seeded random LTS: every candidate `(p, a, q)` is kept independently with
/// probability `density`. The result depends only on the arguments.
pub fn generate_random<S: AsRef<str>>(
    num_states: usize,
    actions: &[S],
    density: f64,
    seed: u64,
) -> Result<Lts> {
    if num_states == 0 {
        return Err(Error::InvalidParameter("need at least one state".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameter(format!(
            "density {density} not in [0, 1]"
        )));
    }
    let labels: BTreeSet<&str> = actions.iter().map(AsRef::as_ref).collect();
    if labels.len() != actions.len() {
        return Err(Error::InvalidParameter("duplicate action label".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples = Vec::new();
    for p in 0..num_states {
        for a in actions {
            for q in 0..num_states {
                if rng.gen_bool(density) {
                    triples.push((p, a.as_ref(), q));
                }
            }
        }
    }
    let declared: Vec<&str> = actions.iter().map(AsRef::as_ref).collect();
    Lts::new(num_states, &declared, &triples)
}
