//! Characteristic declarations for the simulation family and the checkers
//! that connect them to the relational definitions.
//!
//! Throughout, the index set is the process set: `X_p` stands for "the
//! processes related to `p`". A relation `S` corresponds to the
//! interpretation `p |-> { q | (p, q) in S }` ([`phi`]), and a declaration
//! characterizes a relation when its greatest fixed point is that
//! interpretation.
//!
//! Nested kinds are built as one interleaved system: level `2i-2` holds the
//! declaration for `i`-nested simulation and level `2i-1` the one for its
//! inverse, so `nsim:n` is read off level `2n-2` and `nopsim:n` off `2n-1`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::declarations::{
    derived_function, elaborate_levels, gfp, render_system, Declaration, FixpointResult,
    NestedSystem,
};
use crate::error::{Error, Result};
use crate::logic::{ConstName, ConstantEnv, Formula, Interpretation};
use crate::lts::Lts;
use crate::relations::{apply, Kind, Relation, Transformer};

/// Relation to interpretation, row by row.
pub fn phi(s: &Relation) -> Interpretation {
    Interpretation::new(s.rows().iter().cloned().enumerate().collect())
}

/// Inverse of [`phi`]. Fails unless the index set is exactly `0..n` and every
/// value is a set over `n` processes.
pub fn phi_inverse(sigma: &Interpretation, n: usize) -> Result<Relation> {
    if sigma.len() != n || !sigma.indices().eq(0..n) {
        return Err(Error::IndexMismatch);
    }
    Relation::from_rows(sigma.iter().map(|(_, s)| s.clone()).collect()).and_then(|r| {
        if r.size() == n {
            Ok(r)
        } else {
            Err(Error::IndexMismatch)
        }
    })
}

/// `p |-> AND_a AND_{p -a-> p'} <a>X_p'`
pub fn decl_sim(lts: &Lts) -> Declaration {
    let bodies = (0..lts.num_states())
        .map(|p| {
            Formula::and_all(
                lts.action_ids()
                    .flat_map(|a| {
                        lts.successors_of(p, a)
                            .iter()
                            .map(move |p2| Formula::may(lts.action(a).clone(), Formula::Var(p2)))
                    })
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    Declaration::dense(0, bodies).expect("simulation declaration is well-formed")
}

/// `p |-> AND_a [a] OR_{p -a-> p'} X_p'`
pub fn decl_opsim(lts: &Lts) -> Declaration {
    let bodies = (0..lts.num_states())
        .map(|p| {
            Formula::and_all(
                lts.action_ids()
                    .map(|a| {
                        let targets: Vec<Formula> =
                            lts.successors_of(p, a).iter().map(Formula::Var).collect();
                        Formula::must(lts.action(a).clone(), Formula::or_all(targets))
                    })
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    Declaration::dense(0, bodies).expect("inverse simulation declaration is well-formed")
}

/// Pointwise conjunction of [`decl_sim`] and [`decl_opsim`].
pub fn decl_bisim(lts: &Lts) -> Declaration {
    let sim = decl_sim(lts);
    let opsim = decl_opsim(lts);
    let bodies = sim
        .bodies()
        .zip(opsim.bodies())
        .map(|((_, s), (_, o))| Formula::and(s.clone(), o.clone()))
        .collect();
    Declaration::dense(0, bodies).expect("bisimulation declaration is well-formed")
}

/// A nested system whose `target_level` gfp characterizes a relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharSystem {
    pub system: NestedSystem,
    pub target_level: usize,
}

impl CharSystem {
    pub fn new(system: NestedSystem, target_level: usize) -> Result<Self> {
        if target_level >= system.len() {
            return Err(Error::Nesting(format!(
                "target level {target_level} but only {} levels",
                system.len()
            )));
        }
        Ok(CharSystem {
            system,
            target_level,
        })
    }

    pub fn target(&self, p: usize) -> ConstName {
        ConstName::new(self.target_level, p)
    }

    /// Declaration-file text with a `target-level:` header and one
    /// `target:` line per requested process.
    pub fn render(&self, processes: impl IntoIterator<Item = usize>) -> String {
        let mut out = format!("target-level: {}\n", self.target_level);
        out.push_str(&render_system(&self.system));
        for p in processes {
            let _ = writeln!(out, "target: {}", self.target(p));
        }
        out
    }

    /// Unfolds `nu D_target(p)` `depth` times: each step replaces a constant
    /// by its body with variables `X_i` read as the same-level constant
    /// `nu D_level(i)`. Constants left at depth 0 stay symbolic.
    pub fn unfold(&self, p: usize, depth: usize) -> Formula {
        self.unfold_const(self.target(p), depth)
    }

    fn unfold_const(&self, c: ConstName, depth: usize) -> Formula {
        if depth == 0 {
            return Formula::Nu(c);
        }
        let body = self
            .system
            .level(c.level)
            .and_then(|d| d.body(c.index))
            .expect("constant of a well-formed system");
        body.substitute(&mut |i| Formula::Nu(ConstName::new(c.level, i)))
            .substitute_constants(&mut |k| self.unfold_const(k, depth - 1))
    }
}

/// Simulation equivalence: `nu D_sim(p) & nu D_opsim(p)` at level 2, on top
/// of the two characteristic declarations at levels 0 and 1.
pub fn decl_simeq(lts: &Lts) -> CharSystem {
    let n = lts.num_states();
    let top = (0..n)
        .map(|p| Formula::and(Formula::nu(0, p), Formula::nu(1, p)))
        .collect();
    let levels = vec![
        decl_sim(lts),
        decl_opsim(lts).at_level(1).expect("no constants"),
        Declaration::dense(2, top).expect("constants below level 2"),
    ];
    CharSystem::new(NestedSystem::new(levels).expect("well-formed"), 2)
        .expect("target within system")
}

/// Interleaved nested system up to and including `top` (see module docs).
fn nested_system(lts: &Lts, top: usize) -> NestedSystem {
    let n = lts.num_states();
    let sim = decl_sim(lts);
    let opsim = decl_opsim(lts);
    let levels = (0..=top)
        .map(|level| {
            let base = if level % 2 == 0 { &sim } else { &opsim };
            if level < 2 {
                return base.clone().at_level(level).expect("no constants");
            }
            // D_(i)sim at 2i-2 refers to D_(i-1)opsim at 2i-3;
            // D_(i)opsim at 2i-1 refers to D_(i-1)sim at 2i-4.
            let below = if level % 2 == 0 { level - 1 } else { level - 3 };
            let bodies = (0..n)
                .map(|p| Formula::and(base.body(p).unwrap().clone(), Formula::nu(below, p)))
                .collect();
            Declaration::dense(level, bodies).expect("constants refer to lower levels")
        })
        .collect();
    NestedSystem::new(levels).expect("interleaved system is well-formed")
}

pub fn char_system(kind: Kind, lts: &Lts) -> Result<CharSystem> {
    match kind.validate()? {
        Kind::Sim | Kind::NSim(1) => CharSystem::new(nested_system(lts, 0), 0),
        Kind::Opsim | Kind::NOpsim(1) => CharSystem::new(nested_system(lts, 1), 1),
        Kind::Bisim => CharSystem::new(NestedSystem::new(vec![decl_bisim(lts)])?, 0),
        Kind::Simeq => Ok(decl_simeq(lts)),
        Kind::NSim(n) => CharSystem::new(nested_system(lts, 2 * n - 2), 2 * n - 2),
        Kind::NOpsim(n) => CharSystem::new(nested_system(lts, 2 * n - 1), 2 * n - 1),
    }
}

/// Elaborates `cs` and reads the relation off the target level.
pub fn characterized_relation(cs: &CharSystem, lts: &Lts) -> Result<Relation> {
    characterized_relation_detailed(cs, lts).map(|(r, _)| r)
}

/// As [`characterized_relation`], also returning every level's fixpoint.
pub fn characterized_relation_detailed(
    cs: &CharSystem,
    lts: &Lts,
) -> Result<(Relation, Vec<FixpointResult>)> {
    let (_, levels) = elaborate_levels(&cs.system, lts)?;
    let target = &levels[cs.target_level];
    let r = phi_inverse(&target.solution, lts.num_states())?;
    Ok((r, levels))
}

/// Looks for a relation `S` on which `t(S)` and `phi^-1([[d]] phi(S))`
/// differ. Always tries the empty and full relations, then `samples` seeded
/// random ones. `env` must bind the constants `d` uses.
pub fn find_expresses_counterexample(
    d: &Declaration,
    env: &ConstantEnv,
    t: &Transformer,
    lts: &Lts,
    samples: usize,
    seed: u64,
) -> Result<Option<Relation>> {
    let n = lts.num_states();
    if !d.indices().eq(0..n) {
        return Err(Error::IndexMismatch);
    }
    let f = derived_function(d, lts, env)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fixed = [Relation::empty(n), Relation::full(n)];
    let random = (0..samples).map(|_| Relation::random(n, &mut rng));
    for s in fixed.into_iter().chain(random) {
        let relational = apply(t, lts, &s)?;
        let logical = phi_inverse(&f.apply(&phi(&s))?, n)?;
        if relational != logical {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// True iff no sampled relation separates `d` from `t`.
pub fn expresses_check(
    d: &Declaration,
    t: &Transformer,
    lts: &Lts,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    find_expresses_counterexample(d, &ConstantEnv::new(), t, lts, samples, seed)
        .map(|w| w.is_none())
}

/// Greatest fixed point of a single declaration, as a relation.
pub fn declaration_gfp_relation(d: &Declaration, env: &ConstantEnv, lts: &Lts) -> Result<Relation> {
    phi_inverse(&gfp(d, lts, env)?.solution, lts.num_states())
}

/// The relational transformer each characteristic level expresses, given
/// the relations already computed for the levels below it.
pub fn transformer_for_level(level: usize, below: &BTreeMap<usize, Relation>) -> Transformer {
    let base = if level.is_multiple_of(2) {
        Transformer::sim()
    } else {
        Transformer::opsim()
    };
    if level < 2 {
        return base;
    }
    let lower = if level.is_multiple_of(2) { level - 1 } else { level - 3 };
    Transformer::cap_const(base, below[&lower].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{eval_closed, parse_formula};
    use crate::lts::parse_aut;
    use crate::relations::{gfp_rel, preorder};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn chain() -> Lts {
        parse_aut("des (0,1,2)\n(0,\"a\",1)").unwrap()
    }

    fn a_loop() -> Lts {
        parse_aut("des (0,1,1)\n(0,\"a\",0)").unwrap()
    }

    fn ab_vs_ab_plus_a() -> Lts {
        parse_aut(
            "des (0,5,7)\n(0,\"a\",1)\n(1,\"b\",2)\n(3,\"a\",4)\n(4,\"b\",5)\n(3,\"a\",6)",
        )
        .unwrap()
    }

    fn rel(n: usize, pairs: &[(usize, usize)]) -> Relation {
        Relation::from_pairs(n, pairs.iter().copied())
    }

    #[test]
    fn phi_examples() {
        let s = phi(&Relation::empty(3));
        assert!(s.iter().all(|(_, v)| v.is_empty()));
        assert_eq!(s.len(), 3);
        assert_eq!(phi(&Relation::full(3)), Interpretation::top(0..3, 3));
        let s = phi(&rel(2, &[(0, 1)]));
        assert_eq!(s.get(0).unwrap().iter().collect::<Vec<_>>(), vec![1]);
        assert!(s.get(1).unwrap().is_empty());
        assert_eq!(phi_inverse(&s, 2).unwrap(), rel(2, &[(0, 1)]));
        assert_eq!(phi_inverse(&Interpretation::top(0..2, 2), 2).unwrap(), Relation::full(2));
    }

    #[test]
    fn phi_inverse_rejects_wrong_index_sets() {
        assert_eq!(phi_inverse(&Interpretation::top([1], 2), 2), Err(Error::IndexMismatch));
        assert_eq!(phi_inverse(&Interpretation::top(0..2, 2), 3), Err(Error::IndexMismatch));
        assert!(phi_inverse(&Interpretation::top(0..2, 5), 2).is_err());
    }

    #[test]
    fn phi_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s = Relation::random(5, &mut rng);
            assert_eq!(phi_inverse(&phi(&s), 5).unwrap(), s);
        }
    }

    #[test]
    fn decl_sim_shapes() {
        let d = decl_sim(&chain());
        assert_eq!(d.body(0), Some(&f("<a>X1")));
        assert_eq!(d.body(1), Some(&Formula::True));
        assert_eq!(decl_sim(&a_loop()).body(0), Some(&f("<a>X0")));
    }

    #[test]
    fn decl_opsim_shapes() {
        let d = decl_opsim(&chain());
        assert_eq!(d.body(0), Some(&f("[a]X1")));
        assert_eq!(d.body(1), Some(&f("[a]ff")));
        let l = parse_aut("des (0,2,3)\n(0,\"a\",1)\n(0,\"a\",2)").unwrap();
        assert_eq!(decl_opsim(&l).body(0), Some(&f("[a](X1 | X2)")));
        let deadlocked = parse_aut("des (0,0,1)").unwrap().with_alphabet(&["a"]).unwrap();
        assert_eq!(decl_opsim(&deadlocked).body(0), Some(&f("[a]ff")));
    }

    #[test]
    fn decl_bisim_shapes() {
        let deadlocked = parse_aut("des (0,0,1)").unwrap().with_alphabet(&["a"]).unwrap();
        assert_eq!(decl_bisim(&deadlocked).body(0), Some(&f("tt & [a]ff")));
        let d = decl_bisim(&chain());
        assert_eq!(d.body(0), Some(&f("<a>X1 & [a]X1")));
        assert_eq!(
            declaration_gfp_relation(&d, &ConstantEnv::new(), &chain()).unwrap(),
            Relation::identity(2)
        );
    }

    #[test]
    fn simeq_system() {
        let l = chain();
        let cs = decl_simeq(&l);
        assert_eq!(cs.target_level, 2);
        assert_eq!(cs.system.level(2).unwrap().body(0), Some(&f("nu0:0 & nu1:0")));
        let (r, levels) = characterized_relation_detailed(&cs, &l).unwrap();
        assert_eq!(r, Relation::identity(2));
        // constant declaration: the first application already yields the answer
        assert!(levels[2].iterations <= 2);
        assert!(cs.system.level(2).unwrap().is_constant());

        let l = ab_vs_ab_plus_a();
        let r = characterized_relation(&decl_simeq(&l), &l).unwrap();
        assert!(r.contains(0, 3) && r.contains(3, 0));
    }

    #[test]
    fn char_system_levels() {
        let l = ab_vs_ab_plus_a();
        let cs = char_system(Kind::NSim(1), &l).unwrap();
        assert_eq!(cs.system.len(), 1);
        assert_eq!(cs.system.level(0), Some(&decl_sim(&l)));

        let cs = char_system(Kind::NSim(3), &l).unwrap();
        assert_eq!(cs.target_level, 4);
        assert_eq!(cs.system.len(), 5);
        let body = cs.system.level(4).unwrap().body(3).unwrap();
        assert_eq!(body, &Formula::and(decl_sim(&l).body(3).unwrap().clone(), Formula::nu(3, 3)));
        let body = cs.system.level(3).unwrap().body(0).unwrap();
        assert_eq!(body, &Formula::and(decl_opsim(&l).body(0).unwrap().clone(), Formula::nu(0, 0)));

        assert_eq!(char_system(Kind::NOpsim(2), &l).unwrap().target_level, 3);
        assert_eq!(char_system(Kind::NSim(0), &l), Err(Error::NestingDepth(0)));
    }

    #[test]
    fn characterized_examples() {
        let l = chain();
        let r = characterized_relation(&char_system(Kind::Sim, &l).unwrap(), &l).unwrap();
        assert_eq!(r, rel(2, &[(0, 0), (1, 1), (1, 0)]));
        let r = characterized_relation(&char_system(Kind::Bisim, &a_loop()).unwrap(), &a_loop()).unwrap();
        assert_eq!(r, Relation::full(1));

        let l = ab_vs_ab_plus_a();
        let n2 = characterized_relation(&char_system(Kind::NSim(2), &l).unwrap(), &l).unwrap();
        assert!(!n2.contains(3, 0));
        let o2 = characterized_relation(&char_system(Kind::NOpsim(2), &l).unwrap(), &l).unwrap();
        assert_eq!(o2, n2.inverse());

        let l = crate::lts::generate_random(6, &["a", "b"], 0.3, 5).unwrap();
        let r = characterized_relation(&char_system(Kind::NSim(3), &l).unwrap(), &l).unwrap();
        assert_eq!(r, preorder(Kind::NSim(3), &l).unwrap());
    }

    #[test]
    fn expresses_examples() {
        for seed in 0..10 {
            let l = crate::lts::generate_random(5, &["a", "b"], 0.3, seed).unwrap();
            assert!(expresses_check(&decl_sim(&l), &Transformer::sim(), &l, 20, seed).unwrap());
            assert!(expresses_check(&decl_opsim(&l), &Transformer::opsim(), &l, 20, seed).unwrap());
            assert!(expresses_check(&decl_bisim(&l), &Transformer::bisim(), &l, 20, seed).unwrap());
        }
        let l = chain();
        assert!(!expresses_check(&decl_sim(&l), &Transformer::opsim(), &l, 0, 0).unwrap());
        let w = find_expresses_counterexample(
            &decl_sim(&l),
            &ConstantEnv::new(),
            &Transformer::opsim(),
            &l,
            0,
            0,
        )
        .unwrap();
        // the empty relation is tried first and already separates them
        assert_eq!(w, Some(Relation::empty(2)));
        let full = Relation::full(2);
        let logical = derived_function(&decl_sim(&l), &l, &ConstantEnv::new())
            .unwrap()
            .apply(&phi(&full))
            .unwrap();
        assert_ne!(apply(&Transformer::opsim(), &l, &full).unwrap(), phi_inverse(&logical, 2).unwrap());
    }

    #[test]
    fn isomorphism_transfer_on_base_pairs() {
        let l = ab_vs_ab_plus_a();
        let env = ConstantEnv::new();
        for (d, t) in [
            (decl_sim(&l), Transformer::sim()),
            (decl_opsim(&l), Transformer::opsim()),
            (decl_bisim(&l), Transformer::bisim()),
        ] {
            let via_logic = gfp(&d, &l, &env).unwrap().solution;
            assert_eq!(phi(&gfp_rel(&t, &l).unwrap()), via_logic);
        }
    }

    #[test]
    fn unfolding_is_sound() {
        let l = ab_vs_ab_plus_a();
        for kind in [Kind::Sim, Kind::Opsim, Kind::Bisim, Kind::Simeq, Kind::NSim(2)] {
            let cs = char_system(kind, &l).unwrap();
            let (env, _) = elaborate_levels(&cs.system, &l).unwrap();
            for depth in 0..3 {
                let g = cs.unfold(0, depth);
                assert_eq!(
                    eval_closed(&g, &l, &env).unwrap(),
                    env.get(cs.target(0)).unwrap().clone(),
                    "{kind} depth {depth}"
                );
            }
        }
        let cs = char_system(Kind::Sim, &chain()).unwrap();
        assert_eq!(cs.unfold(0, 1), f("<a>nu0:1"));
        assert_eq!(cs.unfold(0, 2), f("<a>tt"));
    }

    #[test]
    fn render_contains_targets() {
        let l = chain();
        let text = decl_simeq(&l).render([0]);
        assert!(text.starts_with("target-level: 2\n"));
        assert!(text.contains("X0 = nu0:0 & nu1:0 ;"));
        assert!(text.trim_end().ends_with("target: nu2:0"));
        let parsed = crate::declarations::parse_decl_file(&text).unwrap();
        assert_eq!(parsed.system, decl_simeq(&l).system);
    }
}
