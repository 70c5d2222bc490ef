//! Cross-checks the characteristic-declaration route against the relational
//! oracle over a corpus of LTSs and tallies the outcome per property.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::charform::{
    char_system, characterized_relation_detailed, decl_bisim, decl_opsim, decl_sim,
    find_expresses_counterexample, phi, phi_inverse, transformer_for_level,
};
use crate::declarations::{elaborate_levels, gfp};
use crate::error::Result;
use crate::logic::ConstantEnv;
use crate::lts::{generate_random, parse_aut, render_aut, Lts};
use crate::relations::{apply, gfp_rel_counted, Kind, PreorderCache, Relation, Transformer};

pub const CHARACTERIZATION: &str = "characterization";
pub const EXPRESSES: &str = "expresses";
pub const INVERSE_GFP: &str = "inverse-gfp";
pub const INVERSE_CAP: &str = "inverse-cap";
pub const PHI_TRANSFER: &str = "phi-transfer";
pub const PHI_ROUNDTRIP: &str = "phi-roundtrip";
pub const PHI_INTERSECTION: &str = "phi-intersection";
pub const SOLVER_BOUNDS: &str = "solver-bounds";
pub const HIERARCHY: &str = "hierarchy";

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub lts: Lts,
}

impl CorpusEntry {
    pub fn new(name: impl Into<String>, lts: Lts) -> Self {
        CorpusEntry {
            name: name.into(),
            lts,
        }
    }
}

/// The four hand-built systems.
pub fn classics() -> Vec<CorpusEntry> {
    let aut = |s: &str| parse_aut(s).expect("built-in system parses");
    vec![
        CorpusEntry::new("two-state chain", aut("des (0,1,2)\n(0,\"a\",1)")),
        CorpusEntry::new(
            "one-state a,b-loop",
            aut("des (0,2,1)\n(0,\"a\",0)\n(0,\"b\",0)"),
        ),
        CorpusEntry::new(
            "a.(b+c) vs a.b+a.c",
            aut("des (0,7,9)\n(0,\"a\",1)\n(1,\"b\",2)\n(1,\"c\",3)\n\
                 (4,\"a\",5)\n(4,\"a\",6)\n(5,\"b\",7)\n(6,\"c\",8)"),
        ),
        CorpusEntry::new(
            "a.b vs a.b+a",
            aut("des (0,5,7)\n(0,\"a\",1)\n(1,\"b\",2)\n(3,\"a\",4)\n(4,\"b\",5)\n(3,\"a\",6)"),
        ),
    ]
}

/// `count` random systems; state counts cycle through `1..=max_states` and
/// densities through `densities`, seeds are `seed, seed+1, ...`.
pub fn random_corpus(
    count: usize,
    max_states: usize,
    actions: &[String],
    densities: &[f64],
    seed: u64,
) -> Result<Vec<CorpusEntry>> {
    (0..count)
        .map(|k| {
            let n = 1 + k % max_states.max(1);
            let d = densities[k % densities.len()];
            let s = seed.wrapping_add(k as u64);
            let lts = generate_random(n, actions, d, s)?;
            Ok(CorpusEntry::new(
                format!("random #{k} (states={n}, density={d}, seed={s})"),
                lts,
            ))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub kinds: Vec<Kind>,
    /// Random relations per sampled property.
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            kinds: default_kinds(),
            samples: 50,
            seed: 0,
        }
    }
}

/// `sim, opsim, bisim, simeq, nsim:2..4, nopsim:2..4`
pub fn default_kinds() -> Vec<Kind> {
    let mut kinds = vec![Kind::Sim, Kind::Opsim, Kind::Bisim, Kind::Simeq];
    kinds.extend((2..=4).map(Kind::NSim));
    kinds.extend((2..=4).map(Kind::NOpsim));
    kinds
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub property: &'static str,
    pub entry: String,
    pub lts: String,
    pub kind: Option<Kind>,
    pub pair: Option<(usize, usize)>,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FAIL {} on {}", self.property, self.entry)?;
        if let Some(k) = self.kind {
            write!(f, " kind={k}")?;
        }
        if let Some((p, q)) = self.pair {
            write!(f, " pair=({p},{q})")?;
        }
        writeln!(f, ": {}", self.detail)?;
        for line in self.lts.lines() {
            writeln!(f, "    {line}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub tallies: BTreeMap<&'static str, Tally>,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.tallies.values().all(|t| t.failed == 0)
    }

    pub fn tally(&self, property: &str) -> Tally {
        self.tallies.get(property).copied().unwrap_or_default()
    }

    pub fn merge(&mut self, other: Report) {
        for (k, t) in other.tallies {
            let e = self.tallies.entry(k).or_default();
            e.passed += t.passed;
            e.failed += t.failed;
        }
        self.failures.extend(other.failures);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, t) in &self.tallies {
            let verdict = if t.failed == 0 { "PASS" } else { "FAIL" };
            writeln!(f, "{verdict} {name}: {} passed, {} failed", t.passed, t.failed)?;
        }
        for failure in &self.failures {
            write!(f, "{failure}")?;
        }
        Ok(())
    }
}

struct Checker<'a> {
    entry: &'a CorpusEntry,
    report: Report,
}

impl<'a> Checker<'a> {
    fn record(
        &mut self,
        property: &'static str,
        ok: bool,
        kind: Option<Kind>,
        pair: Option<(usize, usize)>,
        detail: impl FnOnce() -> String,
    ) {
        let t = self.report.tallies.entry(property).or_default();
        if ok {
            t.passed += 1;
        } else {
            t.failed += 1;
            self.report.failures.push(Failure {
                property,
                entry: self.entry.name.clone(),
                lts: render_aut(&self.entry.lts),
                kind,
                pair,
                detail: detail(),
            });
        }
    }
}

fn first_difference(a: &Relation, b: &Relation) -> Option<(usize, usize)> {
    let n = a.size();
    (0..n)
        .flat_map(|p| (0..n).map(move |q| (p, q)))
        .find(|&(p, q)| a.contains(p, q) != b.contains(p, q))
}

/// Runs every property on one LTS.
pub fn verify_entry(entry: &CorpusEntry, config: &VerifyConfig) -> Result<Report> {
    let lts = &entry.lts;
    let n = lts.num_states();
    let mut c = Checker {
        entry,
        report: Report::default(),
    };
    let mut cache = PreorderCache::new(lts);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Characterization, solver bounds and the per-level isomorphism transfer.
    for &kind in &config.kinds {
        let cs = char_system(kind, lts)?;
        let (via_logic, levels) = characterized_relation_detailed(&cs, lts)?;
        let (oracle, rel_iters) = cache.get_counted(kind)?;
        c.record(CHARACTERIZATION, via_logic == oracle, Some(kind), first_difference(&via_logic, &oracle), || {
            "characteristic system and relational fixed point differ".into()
        });
        c.record(SOLVER_BOUNDS, rel_iters <= n * n + 1, Some(kind), None, || {
            format!("relational gfp took {rel_iters} rounds for {n} processes")
        });
        for (lvl, r) in levels.iter().enumerate() {
            let bound = n * n + 1;
            c.record(SOLVER_BOUNDS, r.iterations <= bound, Some(kind), None, || {
                format!("level {lvl} took {} rounds, bound {bound}", r.iterations)
            });
        }
    }

    // Interleaved nested levels: every level expresses its transformer, and
    // gfps correspond through phi.
    let depth = config
        .kinds
        .iter()
        .map(|k| match k.normalize() {
            Kind::NSim(n) => 2 * n - 2,
            Kind::NOpsim(n) => 2 * n - 1,
            _ => 1,
        })
        .max()
        .unwrap_or(1);
    let top_kind = if depth % 2 == 0 {
        Kind::NSim(depth / 2 + 1)
    } else {
        Kind::NOpsim(depth.div_ceil(2))
    };
    let system = char_system(top_kind, lts)?.system;
    let (env, _) = elaborate_levels(&system, lts)?;
    let mut level_relations = BTreeMap::new();
    for (lvl, d) in system.levels().iter().enumerate() {
        let t = transformer_for_level(lvl, &level_relations);
        let (oracle, _) = gfp_rel_counted(&t, lts)?;
        let logical = gfp(d, lts, &env)?.solution;
        c.record(PHI_TRANSFER, phi(&oracle) == logical, None, None, || {
            format!("phi of the relational gfp differs from the level-{lvl} gfp")
        });
        let witness =
            find_expresses_counterexample(d, &env, &t, lts, config.samples, config.seed + lvl as u64)?;
        c.record(EXPRESSES, witness.is_none(), None, None, || {
            format!("level {lvl} disagrees with its transformer on {witness:?}")
        });
        level_relations.insert(lvl, oracle);
    }
    let empty = ConstantEnv::new();
    let witness = find_expresses_counterexample(
        &decl_bisim(lts),
        &empty,
        &Transformer::bisim(),
        lts,
        config.samples,
        config.seed,
    )?;
    c.record(EXPRESSES, witness.is_none(), Some(Kind::Bisim), None, || {
        format!("bisimulation declaration disagrees on {witness:?}")
    });
    for (d, t) in [
        (decl_sim(lts), Transformer::sim()),
        (decl_opsim(lts), Transformer::opsim()),
        (decl_bisim(lts), Transformer::bisim()),
    ] {
        let ok = phi(&gfp_rel_counted(&t, lts)?.0) == gfp(&d, lts, &empty)?.solution;
        c.record(PHI_TRANSFER, ok, None, None, || format!("{t:?}"));
    }

    // Inverse lemma.
    let base: Vec<Transformer> = {
        let mut ts = vec![Transformer::sim(), Transformer::opsim(), Transformer::bisim()];
        ts.extend(level_relations.values().map(|r| Transformer::cap_const(Transformer::sim(), r.clone())));
        ts
    };
    for t in &base {
        let (direct, _) = gfp_rel_counted(&Transformer::tilde(t.clone()), lts)?;
        let (plain, _) = gfp_rel_counted(t, lts)?;
        c.record(INVERSE_GFP, direct == plain.inverse(), None, first_difference(&direct, &plain.inverse()), || {
            format!("gfp of tilde differs from inverse gfp for {t:?}")
        });
    }
    for _ in 0..config.samples {
        let s = Relation::random(n, &mut rng);
        let a = Relation::random(n, &mut rng);
        let lhs = Transformer::tilde(Transformer::cap_const(Transformer::sim(), a.clone()));
        let rhs = Transformer::cap_const(Transformer::opsim(), a.inverse());
        let (l, r) = (apply(&lhs, lts, &s)?, apply(&rhs, lts, &s)?);
        c.record(INVERSE_CAP, l == r, None, first_difference(&l, &r), || {
            format!("tilde of a capped functional differs on S={s:?}, A={a:?}")
        });
    }

    // phi structure.
    for _ in 0..config.samples {
        let a1 = Relation::random(n, &mut rng);
        let a2 = Relation::random(n, &mut rng);
        c.record(PHI_ROUNDTRIP, phi_inverse(&phi(&a1), n)? == a1, None, None, || {
            format!("roundtrip changed {a1:?}")
        });
        let ok = phi(&a1.intersection(&a2)) == phi(&a1).intersection(&phi(&a2));
        c.record(PHI_INTERSECTION, ok, None, None, || {
            format!("phi does not commute with intersection on {a1:?}, {a2:?}")
        });
    }

    // Hierarchy.
    let bisim = cache.get(Kind::Bisim)?;
    let simeq = cache.get(Kind::Simeq)?;
    let sim = cache.get(Kind::Sim)?;
    c.record(HIERARCHY, bisim.is_subset(&simeq) && simeq.is_subset(&sim), None, None, || {
        "bisim <= simeq <= sim violated".into()
    });
    c.record(HIERARCHY, bisim.is_symmetric() && simeq.is_symmetric(), None, None, || {
        "bisim or simeq not symmetric".into()
    });
    let max_n = config
        .kinds
        .iter()
        .filter_map(|k| match k {
            Kind::NSim(n) | Kind::NOpsim(n) => Some(*n),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    for k in 1..=max_n {
        for kind in [Kind::NSim(k), Kind::NOpsim(k)] {
            let r = cache.get(kind)?;
            c.record(HIERARCHY, r.is_reflexive() && r.is_transitive(), Some(kind), None, || {
                "not a preorder".into()
            });
            c.record(HIERARCHY, bisim.is_subset(&r), Some(kind), None, || {
                "bisimilarity not included".into()
            });
        }
        if k < max_n {
            let finer = cache.get(Kind::NSim(k + 1))?;
            let coarser = cache.get(Kind::NSim(k))?;
            c.record(HIERARCHY, finer.is_subset(&coarser), Some(Kind::NSim(k + 1)), None, || {
                format!("nsim:{} not included in nsim:{k}", k + 1)
            });
        }
    }

    Ok(c.report)
}

/// Verifies every entry; entries run on separate threads and the report is
/// merged in corpus order.
pub fn verify_corpus(entries: &[CorpusEntry], config: &VerifyConfig) -> Result<Report> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(entries.len().max(1));
    let chunk = entries.len().div_ceil(workers).max(1);
    let parts: Vec<Result<Report>> = std::thread::scope(|scope| {
        let handles: Vec<_> = entries
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    let mut r = Report::default();
                    for e in part {
                        r.merge(verify_entry(e, config)?);
                    }
                    Ok(r)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("verify worker panicked")).collect()
    });
    let mut report = Report::default();
    for p in parts {
        report.merge(p?);
    }
    Ok(report)
}

/// Verdicts for one pair under each kind, by both routes.
pub fn pair_verdicts(lts: &Lts, kinds: &[Kind], p: usize, q: usize) -> Result<Vec<(Kind, bool, bool)>> {
    let mut cache = PreorderCache::new(lts);
    kinds
        .iter()
        .map(|&k| {
            let oracle = cache.get(k)?.contains(p, q);
            let cs = char_system(k, lts)?;
            let (logic, _) = characterized_relation_detailed(&cs, lts)?;
            Ok((k, oracle, logic.contains(p, q)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classics_pass_every_property() {
        let config = VerifyConfig {
            samples: 10,
            ..VerifyConfig::default()
        };
        let report = verify_corpus(&classics(), &config).unwrap();
        assert!(report.all_passed(), "{report}");
        for prop in [
            CHARACTERIZATION,
            EXPRESSES,
            INVERSE_GFP,
            INVERSE_CAP,
            PHI_TRANSFER,
            PHI_ROUNDTRIP,
            PHI_INTERSECTION,
            SOLVER_BOUNDS,
            HIERARCHY,
        ] {
            assert!(report.tally(prop).passed > 0, "{prop} never ran");
        }
    }

    #[test]
    fn random_corpus_is_deterministic() {
        let acts = vec!["a".to_string(), "b".to_string()];
        let a = random_corpus(12, 8, &acts, &[0.15, 0.3, 0.5], 9).unwrap();
        let b = random_corpus(12, 8, &acts, &[0.15, 0.3, 0.5], 9).unwrap();
        assert_eq!(a.len(), 12);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.lts, y.lts);
            assert!(x.lts.num_states() <= 8);
        }
    }

    #[test]
    fn failures_carry_witnesses() {
        let entry = &classics()[0];
        let mut c = Checker {
            entry,
            report: Report::default(),
        };
        c.record(HIERARCHY, false, Some(Kind::Sim), Some((0, 1)), || "boom".into());
        assert!(!c.report.all_passed());
        let text = c.report.to_string();
        assert!(text.contains("FAIL hierarchy"));
        assert!(text.contains("pair=(0,1)"));
        assert!(text.contains("des (0,1,2)"));
    }
}
