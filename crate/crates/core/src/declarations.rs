//! Declarations `D : I -> formula`, their greatest fixed points, and
//! elaboration of nested declaration sequences into constants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::logic::{
    check_level, parse_formula, ConstName, ConstantEnv, Evaluator, Formula, Interpretation, Logic,
};
use crate::lts::Lts;

/// One equation block of a nested system.
///
/// Invariants: every body lies in the open logic of `level`, and every
/// variable names an index of this declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    level: usize,
    body: BTreeMap<usize, Formula>,
}

impl Declaration {
    pub fn new(level: usize, body: BTreeMap<usize, Formula>) -> Result<Self> {
        for f in body.values() {
            if !check_level(f, level, Logic::Open) {
                let constant = f
                    .constants()
                    .into_iter()
                    .find(|c| c.level >= level)
                    .expect("level check failed without an offending constant");
                return Err(Error::LevelViolation { constant, level });
            }
            if let Some(&i) = f.variables().iter().find(|i| !body.contains_key(i)) {
                return Err(Error::UnknownIndex(i));
            }
        }
        Ok(Declaration { level, body })
    }

    /// Declaration over the dense index set `0..bodies.len()`.
    pub fn dense(level: usize, bodies: Vec<Formula>) -> Result<Self> {
        Self::new(level, bodies.into_iter().enumerate().collect())
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Same bodies, different level.
    pub fn at_level(self, level: usize) -> Result<Self> {
        Self::new(level, self.body)
    }

    pub fn body(&self, i: usize) -> Option<&Formula> {
        self.body.get(&i)
    }

    pub fn bodies(&self) -> impl Iterator<Item = (usize, &Formula)> {
        self.body.iter().map(|(i, f)| (*i, f))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.body.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    /// True when no body mentions a variable.
    pub fn is_constant(&self) -> bool {
        self.body.values().all(Formula::is_closed)
    }
}

/// Declarations at levels `0..N`, all over the same index set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NestedSystem {
    levels: Vec<Declaration>,
}

impl NestedSystem {
    pub fn new(levels: Vec<Declaration>) -> Result<Self> {
        let index_set: Option<BTreeSet<usize>> = levels.first().map(|d| d.indices().collect());
        for (j, d) in levels.iter().enumerate() {
            if d.level != j {
                return Err(Error::Nesting(format!(
                    "declaration at position {j} has level {}",
                    d.level
                )));
            }
            let here: BTreeSet<usize> = d.indices().collect();
            if Some(&here) != index_set.as_ref() {
                return Err(Error::Nesting(format!(
                    "level {j} is declared over a different index set"
                )));
            }
            for f in d.body.values() {
                if let Some(c) = f.constants().into_iter().find(|c| !here.contains(&c.index)) {
                    return Err(Error::Nesting(format!("constant {c} names an undeclared index")));
                }
            }
        }
        Ok(NestedSystem { levels })
    }

    pub fn levels(&self) -> &[Declaration] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> Option<&Declaration> {
        self.levels.get(j)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointResult {
    pub solution: Interpretation,
    /// Applications of the derived function, including the final one that
    /// confirmed stability.
    pub iterations: usize,
}

/// The monotone map `sigma |-> (i |-> [[D(i)]] sigma)` induced by a declaration.
pub struct DerivedFunction<'a> {
    decl: &'a Declaration,
    lts: &'a Lts,
    env: &'a ConstantEnv,
}

impl<'a> DerivedFunction<'a> {
    pub fn apply(&self, sigma: &Interpretation) -> Result<Interpretation> {
        let mut eval = Evaluator::new(self.lts, self.env, Some(sigma));
        let mut out = BTreeMap::new();
        for (i, f) in &self.decl.body {
            out.insert(*i, eval.eval(f)?);
        }
        Ok(Interpretation::new(out))
    }

    pub fn declaration(&self) -> &Declaration {
        self.decl
    }
}

pub fn derived_function<'a>(
    decl: &'a Declaration,
    lts: &'a Lts,
    env: &'a ConstantEnv,
) -> Result<DerivedFunction<'a>> {
    for f in decl.body.values() {
        if let Some(c) = f.constants().into_iter().find(|c| env.get(*c).is_none()) {
            return Err(Error::UnboundConstant(c));
        }
        for a in f.actions() {
            lts.action_id(a.as_str())?;
        }
    }
    Ok(DerivedFunction { decl, lts, env })
}

/// Greatest fixed point by descending iteration from the top interpretation.
pub fn gfp(decl: &Declaration, lts: &Lts, env: &ConstantEnv) -> Result<FixpointResult> {
    let f = derived_function(decl, lts, env)?;
    let mut current = Interpretation::top(decl.indices(), lts.num_states());
    let mut iterations = 0;
    loop {
        let next = f.apply(&current)?;
        iterations += 1;
        if next == current {
            return Ok(FixpointResult {
                solution: current,
                iterations,
            });
        }
        current = next;
    }
}

/// Solves every level in order, binding `nu D_j(i)` before level `j+1` is
/// interpreted. Returns the environment and the per-level results.
pub fn elaborate_levels(
    sys: &NestedSystem,
    lts: &Lts,
) -> Result<(ConstantEnv, Vec<FixpointResult>)> {
    let mut env = ConstantEnv::new();
    let mut results = Vec::with_capacity(sys.len());
    for d in &sys.levels {
        let r = gfp(d, lts, &env)?;
        for (i, s) in r.solution.iter() {
            env.bind(ConstName::new(d.level, i), s.clone());
        }
        results.push(r);
    }
    Ok((env, results))
}

pub fn elaborate(sys: &NestedSystem, lts: &Lts) -> Result<ConstantEnv> {
    elaborate_levels(sys, lts).map(|(env, _)| env)
}

/// Parsed contents of a declaration file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclFile {
    pub system: NestedSystem,
    pub target_level: Option<usize>,
    pub targets: Vec<ConstName>,
}

/// Renders the `level <n>:` / `X<i> = <formula> ;` block format.
pub fn render_system(sys: &NestedSystem) -> String {
    let mut out = String::new();
    for d in sys.levels() {
        let _ = writeln!(out, "level {}:", d.level());
        for (i, f) in d.bodies() {
            let _ = writeln!(out, "  X{i} = {f} ;");
        }
    }
    out
}

/// Parses a declaration file.
///
/// ```text
/// # comment
/// target-level: 2          (optional)
/// level 0:
///   X0 = <a>X1 ;
///   X1 = tt ;
/// level 1:
///   X0 = [a]X1 & nu0:0 ;
///   X1 = [a]ff & nu0:1 ;
/// target: nu1:0           (optional, repeatable)
/// ```
///
/// Equations may span lines; each ends at `;`.
pub fn parse_decl_file(text: &str) -> Result<DeclFile> {
    let err = |line: usize, message: String| Error::DeclFile { line, message };

    let mut blocks: Vec<BTreeMap<usize, Formula>> = Vec::new();
    let mut target_level = None;
    let mut targets = Vec::new();
    let mut pending = String::new();
    let mut pending_line = 0;

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if pending.trim().is_empty() {
            if let Some(rest) = line.strip_prefix("target-level:") {
                let v = rest
                    .trim()
                    .parse()
                    .map_err(|_| err(line_no, format!("invalid target level `{}`", rest.trim())))?;
                target_level = Some(v);
                continue;
            }
            if let Some(rest) = line.strip_prefix("target:") {
                match parse_formula(rest.trim()) {
                    Ok(Formula::Nu(c)) => targets.push(c),
                    _ => return Err(err(line_no, "expected `nu<level>:<i>` after `target:`".to_string())),
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("level") {
                let num = rest
                    .trim()
                    .strip_suffix(':')
                    .ok_or_else(|| err(line_no, "expected `level <n>:`".into()))?
                    .trim();
                let lvl: usize = num
                    .parse()
                    .map_err(|_| err(line_no, format!("invalid level `{num}`")))?;
                if lvl != blocks.len() {
                    return Err(err(
                        line_no,
                        format!("expected level {}, found level {lvl}", blocks.len()),
                    ));
                }
                blocks.push(BTreeMap::new());
                continue;
            }
            pending_line = line_no;
        }
        pending.push_str(line);
        pending.push('\n');

        while let Some(end) = pending.find(';') {
            let stmt: String = pending[..end].to_string();
            pending = pending[end + 1..].to_string();
            let block = blocks
                .last_mut()
                .ok_or_else(|| err(pending_line, "equation before any `level <n>:` header".into()))?;
            let (lhs, rhs) = stmt
                .split_once('=')
                .ok_or_else(|| err(pending_line, "expected `X<i> = <formula> ;`".into()))?;
            let index = match parse_formula(lhs.trim()) {
                Ok(Formula::Var(i)) => i,
                _ => return Err(err(pending_line, format!("expected a variable, found `{}`", lhs.trim()))),
            };
            let body = parse_formula(rhs.trim()).map_err(|e| err(pending_line, e.to_string()))?;
            if block.insert(index, body).is_some() {
                return Err(err(pending_line, format!("X{index} declared twice")));
            }
            pending_line = line_no;
        }
    }
    if !pending.trim().is_empty() {
        return Err(err(pending_line, "equation not terminated by `;`".into()));
    }

    let levels = blocks
        .into_iter()
        .enumerate()
        .map(|(lvl, body)| Declaration::new(lvl, body))
        .collect::<Result<Vec<_>>>()?;
    Ok(DeclFile {
        system: NestedSystem::new(levels)?,
        target_level,
        targets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::ProcessSet;
    use crate::lts::parse_aut;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn chain() -> Lts {
        parse_aut("des (0,1,2)\n(0,\"a\",1)").unwrap()
    }

    fn chain_ab() -> Lts {
        chain().with_alphabet(&["b"]).unwrap()
    }

    fn ab_loop() -> Lts {
        parse_aut("des (0,2,1)\n(0,\"a\",0)\n(0,\"b\",0)").unwrap()
    }

    fn set(n: usize, xs: &[usize]) -> ProcessSet {
        ProcessSet::from_iter_in(n, xs.iter().copied())
    }

    fn single(level: usize, i: usize, body: &str) -> Declaration {
        Declaration::new(level, [(i, f(body))].into_iter().collect()).unwrap()
    }

    #[test]
    fn declaration_validation() {
        assert!(matches!(
            Declaration::new(0, [(0, f("nu0:0"))].into_iter().collect()),
            Err(Error::LevelViolation { .. })
        ));
        assert_eq!(
            Declaration::new(0, [(0, f("X3"))].into_iter().collect()),
            Err(Error::UnknownIndex(3))
        );
        assert!(NestedSystem::new(vec![single(1, 0, "tt")]).is_err());
        assert!(NestedSystem::new(vec![single(0, 0, "tt"), single(1, 1, "tt")]).is_err());
        assert!(NestedSystem::new(vec![single(0, 0, "tt"), single(1, 0, "nu0:4")]).is_err());
    }

    #[test]
    fn derived_function_examples() {
        let l = chain();
        let env = ConstantEnv::new();
        let d = Declaration::dense(0, vec![Formula::True, Formula::True]).unwrap();
        let g = derived_function(&d, &l, &env).unwrap();
        let bottom = Interpretation::bottom(0..2, 2);
        assert_eq!(g.apply(&bottom).unwrap(), Interpretation::top(0..2, 2));

        let d = Declaration::dense(0, vec![f("X0"), f("X1")]).unwrap();
        let g = derived_function(&d, &l, &env).unwrap();
        let mut s = Interpretation::bottom(0..2, 2);
        s.set(1, set(2, &[1]));
        assert_eq!(g.apply(&s).unwrap(), s);

        let d = single(0, 1, "<a>X1");
        let g = derived_function(&d, &l, &env).unwrap();
        let s = Interpretation::top([1], 2);
        assert_eq!(g.apply(&s).unwrap().get(1), Some(&set(2, &[0])));
    }

    #[test]
    fn derived_function_requires_bound_constants() {
        let d = single(1, 0, "nu0:0");
        let env = ConstantEnv::new();
        assert_eq!(
            derived_function(&d, &chain(), &env).err(),
            Some(Error::UnboundConstant(ConstName::new(0, 0)))
        );
    }

    #[test]
    fn gfp_of_identity_is_top() {
        let l = chain();
        let d = Declaration::dense(0, vec![f("X0"), f("X1")]).unwrap();
        let r = gfp(&d, &l, &ConstantEnv::new()).unwrap();
        assert_eq!(r.solution, Interpretation::top(0..2, 2));
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn invariantly_may_a() {
        let d = single(0, 1, "<a>tt & [a]X1 & [b]X1");
        let r = gfp(&d, &ab_loop(), &ConstantEnv::new()).unwrap();
        assert_eq!(r.solution.get(1), Some(&set(1, &[0])));

        let r = gfp(&d, &chain_ab(), &ConstantEnv::new()).unwrap();
        assert_eq!(r.solution.get(1), Some(&set(2, &[])));
        // top -> {0} -> {} -> {}
        assert_eq!(r.iterations, 3);
    }

    #[test]
    fn elaborate_examples() {
        let l = chain();
        assert!(elaborate(&NestedSystem::default(), &l).unwrap().is_empty());

        let d = Declaration::dense(0, vec![f("<a>X1"), f("tt")]).unwrap();
        let sys = NestedSystem::new(vec![d.clone()]).unwrap();
        let env = elaborate(&sys, &l).unwrap();
        assert_eq!(env.len(), 2);
        let r = gfp(&d, &l, &ConstantEnv::new()).unwrap();
        for (i, s) in r.solution.iter() {
            assert_eq!(env.get(ConstName::new(0, i)), Some(s));
        }

        // simulation declaration, then inverse simulation at level 1
        let opsim = Declaration::dense(1, vec![f("[a]X1"), f("[a]ff")]).unwrap();
        let sys = NestedSystem::new(vec![d, opsim]).unwrap();
        let env = elaborate(&sys, &l).unwrap();
        assert_eq!(env.get(ConstName::new(0, 0)), Some(&set(2, &[0])));
        assert_eq!(env.get(ConstName::new(0, 1)), Some(&set(2, &[0, 1])));
        assert_eq!(env.get(ConstName::new(1, 0)), Some(&set(2, &[0, 1])));
        assert_eq!(env.get(ConstName::new(1, 1)), Some(&set(2, &[1])));
    }

    #[test]
    fn paper_style_two_level_example() {
        let text = "\
# invariantly <a>tt, then a b-step into it
level 0:
  X1 = <a>tt & [a]X1
       & [b]X1 ;
level 1:
  X1 = <b>nu0:1 & [b]X1 ;
";
        let file = parse_decl_file(text).unwrap();
        assert_eq!(file.system.len(), 2);
        let env = elaborate(&file.system, &ab_loop()).unwrap();
        assert_eq!(env.get(ConstName::new(1, 1)), Some(&set(1, &[0])));
        let env = elaborate(&file.system, &chain_ab()).unwrap();
        assert_eq!(env.get(ConstName::new(1, 1)), Some(&set(2, &[])));
    }

    #[test]
    fn decl_file_roundtrip_and_directives() {
        let d0 = Declaration::dense(0, vec![f("<a>X1"), f("tt")]).unwrap();
        let d1 = Declaration::dense(1, vec![f("[a]X1 & nu0:0"), f("[a]ff")]).unwrap();
        let sys = NestedSystem::new(vec![d0, d1]).unwrap();
        let text = format!("target-level: 1\n{}target: nu1:0\n", render_system(&sys));
        let file = parse_decl_file(&text).unwrap();
        assert_eq!(file.system, sys);
        assert_eq!(file.target_level, Some(1));
        assert_eq!(file.targets, vec![ConstName::new(1, 0)]);
    }

    #[test]
    fn decl_file_errors() {
        let cases = [
            ("X0 = tt ;", 1),
            ("level 1:\n X0 = tt ;", 1),
            ("level 0:\n X0 = tt", 2),
            ("level 0:\n X0 = tt ;\n X0 = ff ;", 3),
            ("level 0:\n\n X0 = <a ;", 3),
            ("level 0:\n tt = tt ;", 2),
            ("target: X1", 1),
        ];
        for (text, line) in cases {
            match parse_decl_file(text) {
                Err(Error::DeclFile { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
