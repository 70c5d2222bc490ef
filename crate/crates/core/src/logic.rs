//! Formulae of the nested greatest-fixed-point modal logics and their two
//! semantic functions.
//!
//! A single AST covers every level of the hierarchy. A formula belongs to
//! the closed logic of level `n` when it has no variables and every
//! constant it names was declared at a level below `n`; the open logic of
//! level `n` additionally admits variables `X_i`. See [`check_level`].
//!
//! Concrete syntax, loosest binding first:
//!
//! ```text
//! F ::= F '|' F | F '&' F | <label>F | [label]F | tt | ff | X<i> | nu<level>:<i> | (F)
//! ```
//!
//! Both binary connectives associate to the right, matching the n-ary
//! builders [`Formula::and_all`] and [`Formula::or_all`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::bitset::ProcessSet;
use crate::error::{Error, Result};
use crate::lts::{Action, Lts};

/// Names the constant `nu D_level(index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstName {
    pub level: usize,
    pub index: usize,
}

impl ConstName {
    pub fn new(level: usize, index: usize) -> Self {
        ConstName { level, index }
    }
}

impl fmt::Display for ConstName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nu{}:{}", self.level, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Var(usize),
    Nu(ConstName),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `<a>F`
    May(Action, Box<Formula>),
    /// `[a]F`
    Must(Action, Box<Formula>),
}

impl Formula {
    pub fn var(i: usize) -> Self {
        Formula::Var(i)
    }

    pub fn nu(level: usize, index: usize) -> Self {
        Formula::Nu(ConstName::new(level, index))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Self {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Self {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn may(a: Action, body: Formula) -> Self {
        Formula::May(a, Box::new(body))
    }

    pub fn must(a: Action, body: Formula) -> Self {
        Formula::Must(a, Box::new(body))
    }

    /// Right-folded conjunction; `tt` when empty.
    pub fn and_all<I>(items: I) -> Self
    where
        I: IntoIterator<Item = Formula>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Formula::True,
            Some(last) => it.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// Right-folded disjunction; `ff` when empty.
    pub fn or_all<I>(items: I) -> Self
    where
        I: IntoIterator<Item = Formula>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Formula::False,
            Some(last) => it.fold(last, |acc, f| Formula::or(f, acc)),
        }
    }

    fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        match self {
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
            Formula::May(_, b) | Formula::Must(_, b) => b.walk(visit),
            Formula::True | Formula::False | Formula::Var(_) | Formula::Nu(_) => {}
        }
    }

    pub fn variables(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Var(i) = f {
                out.push(*i);
            }
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn constants(&self) -> Vec<ConstName> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Nu(c) = f {
                out.push(*c);
            }
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn actions(&self) -> Vec<&Action> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::May(a, _) | Formula::Must(a, _) = f {
                out.push(a);
            }
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_closed(&self) -> bool {
        self.variables().is_empty()
    }

    /// Replaces every variable `X_i` by `subst(i)`.
    pub fn substitute(&self, subst: &mut impl FnMut(usize) -> Formula) -> Formula {
        match self {
            Formula::Var(i) => subst(*i),
            Formula::True | Formula::False | Formula::Nu(_) => self.clone(),
            Formula::And(l, r) => Formula::and(l.substitute(subst), r.substitute(subst)),
            Formula::Or(l, r) => Formula::or(l.substitute(subst), r.substitute(subst)),
            Formula::May(a, b) => Formula::may(a.clone(), b.substitute(subst)),
            Formula::Must(a, b) => Formula::must(a.clone(), b.substitute(subst)),
        }
    }

    /// Replaces every constant `c` by `subst(c)`.
    pub fn substitute_constants(&self, subst: &mut impl FnMut(ConstName) -> Formula) -> Formula {
        match self {
            Formula::Nu(c) => subst(*c),
            Formula::True | Formula::False | Formula::Var(_) => self.clone(),
            Formula::And(l, r) => Formula::and(
                l.substitute_constants(subst),
                r.substitute_constants(subst),
            ),
            Formula::Or(l, r) => Formula::or(
                l.substitute_constants(subst),
                r.substitute_constants(subst),
            ),
            Formula::May(a, b) => Formula::may(a.clone(), b.substitute_constants(subst)),
            Formula::Must(a, b) => Formula::must(a.clone(), b.substitute_constants(subst)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, g: &Formula, min: u8) -> fmt::Result {
            if g.precedence() < min {
                write!(f, "({g})")
            } else {
                write!(f, "{g}")
            }
        }
        match self {
            Formula::True => f.write_str("tt"),
            Formula::False => f.write_str("ff"),
            Formula::Var(i) => write!(f, "X{i}"),
            Formula::Nu(c) => write!(f, "{c}"),
            Formula::And(l, r) => {
                child(f, l, 3)?;
                f.write_str(" & ")?;
                child(f, r, 2)
            }
            Formula::Or(l, r) => {
                child(f, l, 2)?;
                f.write_str(" | ")?;
                child(f, r, 1)
            }
            Formula::May(a, b) => {
                write!(f, "<{a}>")?;
                child(f, b, 3)
            }
            Formula::Must(a, b) => {
                write!(f, "[{a}]")?;
                child(f, b, 3)
            }
        }
    }
}

/// Which logic of a level a formula is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Logic {
    /// Variable-free (the `M_n` family).
    Closed,
    /// Variables allowed (the `V_n` family).
    Open,
}

/// True iff `f` lies in the chosen logic at `level`: every constant was
/// declared strictly below `level`, and no variable occurs for [`Logic::Closed`].
pub fn check_level(f: &Formula, level: usize, logic: Logic) -> bool {
    let mut ok = true;
    f.walk(&mut |g| match g {
        Formula::Nu(c) if c.level >= level => ok = false,
        Formula::Var(_) if logic == Logic::Closed => ok = false,
        _ => {}
    });
    ok
}

/// A variable interpretation: index -> set of processes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    sets: BTreeMap<usize, ProcessSet>,
}

impl Interpretation {
    pub fn new(sets: BTreeMap<usize, ProcessSet>) -> Self {
        Interpretation { sets }
    }

    /// The top element: every index mapped to all processes.
    pub fn top(indices: impl IntoIterator<Item = usize>, num_states: usize) -> Self {
        Self::constant(indices, ProcessSet::full(num_states))
    }

    pub fn bottom(indices: impl IntoIterator<Item = usize>, num_states: usize) -> Self {
        Self::constant(indices, ProcessSet::empty(num_states))
    }

    fn constant(indices: impl IntoIterator<Item = usize>, value: ProcessSet) -> Self {
        Interpretation {
            sets: indices.into_iter().map(|i| (i, value.clone())).collect(),
        }
    }

    pub fn get(&self, i: usize) -> Option<&ProcessSet> {
        self.sets.get(&i)
    }

    pub fn set(&mut self, i: usize, value: ProcessSet) {
        self.sets.insert(i, value);
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.sets.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &ProcessSet)> {
        self.sets.iter().map(|(i, s)| (*i, s))
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Pointwise inclusion over the same index set.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.sets.len() == other.sets.len()
            && self
                .sets
                .iter()
                .all(|(i, s)| other.sets.get(i).is_some_and(|t| s.is_subset(t)))
    }

    /// Pointwise intersection; indices missing from `other` are dropped.
    pub fn intersection(&self, other: &Self) -> Self {
        Interpretation {
            sets: self
                .sets
                .iter()
                .filter_map(|(i, s)| other.sets.get(i).map(|t| (*i, s.intersection(t))))
                .collect(),
        }
    }
}

/// Values of the constants declared so far.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstantEnv {
    bindings: BTreeMap<ConstName, ProcessSet>,
}

impl ConstantEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, c: ConstName, value: ProcessSet) {
        self.bindings.insert(c, value);
    }

    pub fn get(&self, c: ConstName) -> Option<&ProcessSet> {
        self.bindings.get(&c)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ConstName, &ProcessSet)> {
        self.bindings.iter().map(|(c, s)| (*c, s))
    }
}

/// Structural evaluator. Results for compound subterms are memoized for the
/// lifetime of the evaluator, so one evaluator must only ever see one
/// interpretation.
pub(crate) struct Evaluator<'a> {
    lts: &'a Lts,
    env: &'a ConstantEnv,
    sigma: Option<&'a Interpretation>,
    memo: HashMap<&'a Formula, ProcessSet>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(lts: &'a Lts, env: &'a ConstantEnv, sigma: Option<&'a Interpretation>) -> Self {
        Evaluator {
            lts,
            env,
            sigma,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn eval(&mut self, f: &'a Formula) -> Result<ProcessSet> {
        match f {
            Formula::True => return Ok(self.lts.all()),
            Formula::False => return Ok(self.lts.none()),
            Formula::Var(i) => {
                let sigma = self.sigma.ok_or(Error::OpenFormula(*i))?;
                return sigma.get(*i).cloned().ok_or(Error::UnknownIndex(*i));
            }
            Formula::Nu(c) => {
                return self.env.get(*c).cloned().ok_or(Error::UnboundConstant(*c));
            }
            _ => {}
        }
        if let Some(hit) = self.memo.get(f) {
            return Ok(hit.clone());
        }
        let value = match f {
            Formula::And(l, r) => {
                let mut v = self.eval(l)?;
                v.intersect_with(&self.eval(r)?);
                v
            }
            Formula::Or(l, r) => {
                let mut v = self.eval(l)?;
                v.union_with(&self.eval(r)?);
                v
            }
            Formula::May(a, b) => {
                let a = self.lts.action_id(a.as_str())?;
                let inner = self.eval(b)?;
                self.lts.may_id(a, &inner)
            }
            Formula::Must(a, b) => {
                let a = self.lts.action_id(a.as_str())?;
                let inner = self.eval(b)?;
                self.lts.must_id(a, &inner)
            }
            Formula::True | Formula::False | Formula::Var(_) | Formula::Nu(_) => unreachable!(),
        };
        self.memo.insert(f, value.clone());
        Ok(value)
    }
}

/// Closed semantics: the processes satisfying a variable-free formula.
pub fn eval_closed(f: &Formula, lts: &Lts, env: &ConstantEnv) -> Result<ProcessSet> {
    Evaluator::new(lts, env, None).eval(f)
}

/// Open semantics under the interpretation `sigma`.
pub fn eval_open(
    f: &Formula,
    lts: &Lts,
    env: &ConstantEnv,
    sigma: &Interpretation,
) -> Result<ProcessSet> {
    Evaluator::new(lts, env, Some(sigma)).eval(f)
}

/// Parses the concrete formula syntax described in the module docs.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser { src: text, pos: 0 };
    let f = p.disjunction()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'s> {
    src: &'s str,
    pos: usize,
}

impl<'s> Parser<'s> {
    fn error(&self, message: &str) -> Error {
        Error::Formula {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let first = self.conjunction()?;
        if self.eat('|') {
            Ok(Formula::or(first, self.disjunction()?))
        } else {
            Ok(first)
        }
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let first = self.unary()?;
        if self.eat('&') {
            Ok(Formula::and(first, self.conjunction()?))
        } else {
            Ok(first)
        }
    }

    fn label(&mut self, close: char) -> Result<Action> {
        let start = self.pos;
        let end = self.rest().find(close).ok_or_else(|| {
            self.error(&format!("unterminated modality, expected `{close}`"))
        })?;
        let label = &self.src[start..start + end];
        if label.trim().is_empty() {
            return Err(self.error("empty action label"));
        }
        self.pos = start + end + close.len_utf8();
        Action::new(label)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat('<') {
            let a = self.label('>')?;
            return Ok(Formula::may(a, self.unary()?));
        }
        if self.eat('[') {
            let a = self.label(']')?;
            return Ok(Formula::must(a, self.unary()?));
        }
        self.atom()
    }

    fn number(&mut self) -> Result<usize> {
        let digits = self.rest().len()
            - self
                .rest()
                .trim_start_matches(|c: char| c.is_ascii_digit())
                .len();
        if digits == 0 {
            return Err(self.error("expected a number"));
        }
        let n = self.src[self.pos..self.pos + digits]
            .parse()
            .map_err(|_| self.error("number out of range"))?;
        self.pos += digits;
        Ok(n)
    }

    fn keyword(&mut self, word: &str) -> bool {
        let rest = self.rest();
        if !rest.starts_with(word) {
            return false;
        }
        let next = rest[word.len()..].chars().next();
        if next.is_some_and(|c| c.is_alphanumeric() || c == '_') {
            return false;
        }
        self.pos += word.len();
        true
    }

    fn atom(&mut self) -> Result<Formula> {
        self.skip_ws();
        if self.eat('(') {
            let f = self.disjunction()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(f);
        }
        if self.keyword("tt") {
            return Ok(Formula::True);
        }
        if self.keyword("ff") {
            return Ok(Formula::False);
        }
        if self.rest().starts_with('X') {
            self.pos += 1;
            return Ok(Formula::Var(self.number()?));
        }
        if self.rest().starts_with("nu") {
            self.pos += 2;
            let level = self.number()?;
            if !self.rest().starts_with(':') {
                return Err(self.error("expected `:` in constant name"));
            }
            self.pos += 1;
            let index = self.number()?;
            return Ok(Formula::nu(level, index));
        }
        if self.rest().is_empty() {
            Err(self.error("unexpected end of formula"))
        } else {
            Err(self.error("expected a formula"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::{generate_random, parse_aut};
    use proptest::prelude::*;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn chain() -> Lts {
        parse_aut("des (0,1,2)\n(0,\"a\",1)").unwrap()
    }

    fn ab_loop() -> Lts {
        parse_aut("des (0,2,1)\n(0,\"a\",0)\n(0,\"b\",0)").unwrap()
    }

    fn set(n: usize, xs: &[usize]) -> ProcessSet {
        ProcessSet::from_iter_in(n, xs.iter().copied())
    }

    fn sigma(n: usize, entries: &[(usize, &[usize])]) -> Interpretation {
        Interpretation::new(entries.iter().map(|(i, xs)| (*i, set(n, xs))).collect())
    }

    #[test]
    fn closed_examples() {
        let l = chain();
        let env = ConstantEnv::new();
        assert_eq!(eval_closed(&Formula::True, &l, &env).unwrap(), l.all());
        assert_eq!(eval_closed(&f("<a>tt"), &l, &env).unwrap(), set(2, &[0]));
        assert!(eval_closed(&f("<a>tt & [a]ff"), &l, &env).unwrap().is_empty());
    }

    #[test]
    fn closed_rejects_variables_and_unbound_constants() {
        let l = chain();
        let env = ConstantEnv::new();
        assert_eq!(eval_closed(&f("<a>X1"), &l, &env), Err(Error::OpenFormula(1)));
        assert_eq!(
            eval_closed(&f("nu0:1"), &l, &env),
            Err(Error::UnboundConstant(ConstName::new(0, 1)))
        );
        assert!(matches!(
            eval_closed(&f("<zz>tt"), &l, &env),
            Err(Error::UnknownAction(_))
        ));
    }

    #[test]
    fn open_examples() {
        let env = ConstantEnv::new();
        let l = chain();
        let s = sigma(2, &[(1, &[0])]);
        assert_eq!(eval_open(&Formula::Var(1), &l, &env, &s).unwrap(), set(2, &[0]));
        assert!(eval_open(&f("X1 & ff"), &l, &env, &s).unwrap().is_empty());

        let lp = ab_loop();
        let s = sigma(1, &[(1, &[0])]);
        assert_eq!(eval_open(&f("[b]X1"), &lp, &env, &s).unwrap(), set(1, &[0]));
        assert_eq!(
            eval_open(&Formula::Var(3), &lp, &env, &s),
            Err(Error::UnknownIndex(3))
        );
    }

    #[test]
    fn constants_read_from_env() {
        let l = chain();
        let mut env = ConstantEnv::new();
        env.bind(ConstName::new(0, 4), set(2, &[1]));
        assert_eq!(eval_closed(&f("nu0:4 | <a>nu0:4"), &l, &env).unwrap(), l.all());
    }

    #[test]
    fn level_checks() {
        assert!(check_level(&f("nu0:1"), 1, Logic::Closed));
        assert!(!check_level(&f("nu1:1"), 1, Logic::Closed));
        for lvl in 0..4 {
            assert!(!check_level(&f("X1"), lvl, Logic::Closed));
            assert!(check_level(&f("X1"), lvl, Logic::Open));
        }
        assert!(check_level(&f("<a>(nu0:0 & X2) | [b]nu2:7"), 3, Logic::Open));
        assert!(!check_level(&f("<a>(nu0:0 & X2) | [b]nu2:7"), 2, Logic::Open));
    }

    #[test]
    fn nary_builders_fold_right() {
        assert_eq!(Formula::and_all(Vec::new()), Formula::True);
        assert_eq!(Formula::or_all(Vec::new()), Formula::False);
        assert_eq!(Formula::and_all(vec![f("X1")]), f("X1"));
        assert_eq!(
            Formula::and_all(vec![f("X1"), f("X2"), f("X3")]),
            Formula::and(f("X1"), Formula::and(f("X2"), f("X3")))
        );
        assert_eq!(f("X1 & X2 & X3"), Formula::and_all(vec![f("X1"), f("X2"), f("X3")]));
    }

    #[test]
    fn parser_precedence() {
        assert_eq!(f("X1 | X2 & X3"), Formula::or(f("X1"), Formula::and(f("X2"), f("X3"))));
        assert_eq!(
            f("<a>X1 & X2"),
            Formula::and(Formula::may(Action::new("a").unwrap(), f("X1")), f("X2"))
        );
        assert_eq!(
            f("[a](X1 | X2)"),
            Formula::must(Action::new("a").unwrap(), Formula::or(f("X1"), f("X2")))
        );
        assert_eq!(f(" < a b > tt").to_string(), "< a b >tt");
    }

    #[test]
    fn parser_errors_carry_offsets() {
        for (text, offset) in [("", 0), ("X", 1), ("tt &", 4), ("(tt", 3), ("<a tt", 1), ("nu1 2", 3), ("tt tt", 3), ("ttx", 0)] {
            match parse_formula(text) {
                Err(Error::Formula { offset: o, .. }) => assert_eq!(o, offset, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn display_roundtrips_tricky_shapes() {
        for s in [
            "(X1 & X2) & X3",
            "(X1 | X2) | X3",
            "<a>(X1 | X2) & [b]ff",
            "(X0 | nu1:2) & tt",
            "[a]<b>[c]X9",
        ] {
            let g = f(s);
            assert_eq!(g.to_string(), s);
            assert_eq!(f(&g.to_string()), g);
        }
    }

    fn arb_formula(vars: usize) -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::True),
            Just(Formula::False),
            (0..vars).prop_map(Formula::Var),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            let act = prop_oneof![Just("a"), Just("b")].prop_map(|a| Action::new(a).unwrap());
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
                (act.clone(), inner.clone()).prop_map(|(a, b)| Formula::may(a, b)),
                (act, inner).prop_map(|(a, b)| Formula::must(a, b)),
            ]
        })
    }

    fn arb_env() -> impl Strategy<Value = (Lts, Interpretation, Interpretation)> {
        (1usize..6, 0.0f64..0.7, any::<u64>()).prop_flat_map(|(n, d, seed)| {
            let l = generate_random(n, &["a", "b"], d, seed).unwrap();
            let sets = proptest::collection::vec(
                (proptest::collection::vec(any::<bool>(), n), proptest::collection::vec(any::<bool>(), n)),
                3,
            );
            (Just(l), sets).prop_map(move |(l, sets)| {
                let mut small = BTreeMap::new();
                let mut big = BTreeMap::new();
                for (i, (x, y)) in sets.into_iter().enumerate() {
                    let xs = ProcessSet::from_iter_in(n, (0..n).filter(|&p| x[p]));
                    let ys = ProcessSet::from_iter_in(n, (0..n).filter(|&p| x[p] || y[p]));
                    small.insert(i, xs);
                    big.insert(i, ys);
                }
                (l, Interpretation::new(small), Interpretation::new(big))
            })
        })
    }

    proptest! {
        #[test]
        fn open_eval_is_monotone_in_sigma(g in arb_formula(3), (l, s1, s2) in arb_env()) {
            let env = ConstantEnv::new();
            prop_assert!(s1.is_subset(&s2));
            let lo = eval_open(&g, &l, &env, &s1).unwrap();
            let hi = eval_open(&g, &l, &env, &s2).unwrap();
            prop_assert!(lo.is_subset(&hi));
        }

        #[test]
        fn closed_formulae_ignore_sigma(g in arb_formula(1), (l, s1, _) in arb_env()) {
            let env = ConstantEnv::new();
            let g = g.substitute(&mut |_| Formula::True);
            prop_assert_eq!(eval_open(&g, &l, &env, &s1).unwrap(), eval_closed(&g, &l, &env).unwrap());
        }

        #[test]
        fn box_is_dual_of_diamond(g in arb_formula(3), (l, s, _) in arb_env()) {
            let env = ConstantEnv::new();
            let inner = eval_open(&g, &l, &env, &s).unwrap();
            for label in ["a", "b"] {
                let a = Action::new(label).unwrap();
                let boxed = eval_open(&Formula::must(a.clone(), g.clone()), &l, &env, &s).unwrap();
                let dual = l.may(label, &inner.complement()).unwrap().complement();
                prop_assert_eq!(boxed, dual);
            }
        }

        #[test]
        fn display_parse_roundtrip(g in arb_formula(4)) {
            prop_assert_eq!(parse_formula(&g.to_string()).unwrap(), g);
        }
    }
}
