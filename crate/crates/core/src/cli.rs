//! Command implementations behind the `rera` binary.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::learner::{learn, learn_with, LearnOutcome, Limits};
use crate::rera::format::{self, FormatError};
use crate::rera::random::{random_rera, RandomSpec};
use crate::rera::{equivalent, EquivError, Equivalence, Rera};
use crate::teacher::SimulatedTeacher;
use crate::timed::{TimedWord, WordError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{path}: invalid automaton: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("K = {k} is below the target's max constant {constant}")]
    KTooSmall { k: u32, constant: u32 },
    #[error("limits must be positive")]
    ZeroLimit,
    #[error("word: {0}")]
    Word(#[from] WordError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads, parses and validates an automaton file.
pub fn load(path: &Path) -> Result<Rera, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let rera = format::parse(&text).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })?;
    let violations = rera.validate();
    if !violations.is_empty() {
        let message = violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
        return Err(CliError::Invalid {
            path: path.to_path_buf(),
            message,
        });
    }
    Ok(rera)
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub target_file: PathBuf,
    pub k: u32,
    /// Recorded in the report; learning itself draws no random numbers.
    pub seed: u64,
    pub limits: Limits,
    pub output_dir: PathBuf,
    pub emit_dot: bool,
}

impl RunConfig {
    pub fn check(&self, target: &Rera) -> Result<(), CliError> {
        if self.k < target.max_constant {
            return Err(CliError::KTooSmall {
                k: self.k,
                constant: target.max_constant,
            });
        }
        let l = &self.limits;
        if l.max_queries == 0 || l.max_iterations == 0 || l.max_strategies == 0 {
            return Err(CliError::ZeroLimit);
        }
        Ok(())
    }
}

pub fn report(config: &RunConfig, target: &Rera, out: &LearnOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "target: {}", config.target_file.display());
    let _ = writeln!(s, "K: {}", config.k);
    let _ = writeln!(s, "seed: {}", config.seed);
    let _ = writeln!(s, "target locations: {}", target.locations.len());
    let _ = writeln!(s, "success: {}", out.success);
    let _ = writeln!(s, "hypothesis locations: {}", out.hypothesis.locations.len());
    let _ = writeln!(s, "membership queries: {}", out.teacher.membership_count);
    let _ = writeln!(s, "distinct membership queries: {}", out.teacher.distinct_membership_count);
    let _ = writeln!(s, "equivalence queries: {}", out.teacher.equivalence_count);
    let st = &out.structure;
    let _ = writeln!(
        s,
        "structure: {} language states, {} decision states, {} observation states ({} invalid), {} observations, {} prunes, {} rebuilds",
        st.language_states,
        st.decision_states,
        st.observation_states,
        st.invalid_states,
        st.observations,
        st.prunes,
        st.rebuilds
    );
    let _ = writeln!(s, "\niter  strategies  locations  consistent  mq  counterexample");
    for r in &out.iterations {
        let ce = r
            .counterexample
            .as_ref()
            .map(|w| w.display(&target.alphabet).to_string())
            .unwrap_or_else(|| "-".to_string());
        let _ = writeln!(
            s,
            "{:>4}  {:>10}  {:>9}  {:>10}  {:>2}  {}",
            r.iteration, r.strategies, r.locations, r.consistent, r.membership_count, ce
        );
    }
    s
}

/// Learns the target of `config` and writes the output files. The
/// returned flag is the learner's success.
pub fn cmd_learn(config: &RunConfig) -> Result<bool, CliError> {
    let target = load(&config.target_file)?;
    config.check(&target)?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let teacher = SimulatedTeacher::new(target.clone());
    let mut dot_error = None;
    let outcome = learn_with(&teacher, config.k, &config.limits, |i, obs, _| {
        if !config.emit_dot || dot_error.is_some() {
            return;
        }
        for (kind, text) in [("tdg", obs.tdg_dot()), ("tog", obs.tog_dot())] {
            let path = dir.join(format!("iter-{i}-{kind}.dot"));
            if let Err(e) = fs::write(&path, text) {
                dot_error = Some(CliError::Io { path, source: e });
                return;
            }
        }
    });
    if let Some(e) = dot_error {
        return Err(e);
    }
    let hyp = format::serialize(&outcome.hypothesis).map_err(|source| CliError::Format {
        path: dir.join("hypothesis.rera"),
        source,
    })?;
    let path = dir.join("hypothesis.rera");
    fs::write(&path, hyp).map_err(io_err(&path))?;
    let path = dir.join("report.txt");
    fs::write(&path, report(config, &target, &outcome)).map_err(io_err(&path))?;
    Ok(outcome.success)
}

pub fn cmd_member(target: &Path, word: &str) -> Result<bool, CliError> {
    let a = load(target)?;
    let w = TimedWord::parse(word, &a.alphabet)?;
    Ok(a.accepts(&w))
}

/// `None` when equivalent, otherwise a line describing the separating word.
pub fn cmd_equiv(a: &Path, b: &Path) -> Result<Option<String>, CliError> {
    let ra = load(a)?;
    let rb = load(b)?;
    Ok(match equivalent(&ra, &rb)? {
        Equivalence::Equivalent => None,
        Equivalence::Counterexample { word, in_a, in_b } => Some(format!(
            "{} (first: {}, second: {})",
            word.display(&ra.alphabet),
            verdict(in_a),
            verdict(in_b)
        )),
    })
}

pub fn verdict(accepted: bool) -> &'static str {
    if accepted {
        "accept"
    } else {
        "reject"
    }
}

pub fn cmd_export_dot(file: &Path) -> Result<String, CliError> {
    Ok(format::to_dot(&load(file)?))
}

#[derive(Debug, Clone, Copy)]
pub struct BenchConfig {
    pub n: usize,
    pub spec: RandomSpec,
    pub seed: u64,
    pub limits: Limits,
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub target_locations: usize,
    pub transitions: usize,
    pub outcome: LearnOutcome,
    pub equivalent: bool,
}

/// Learns `n` random targets drawn from one seeded generator.
pub fn bench(config: &BenchConfig) -> Vec<BenchRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.n)
        .map(|_| {
            let target = random_rera(config.spec, &mut rng);
            let teacher = SimulatedTeacher::new(target.clone());
            let outcome = learn(&teacher, config.spec.max_constant, &config.limits);
            let equivalent = matches!(equivalent(&outcome.hypothesis, &target), Ok(Equivalence::Equivalent));
            BenchRow {
                target_locations: target.locations.len(),
                transitions: target.transitions.len(),
                outcome,
                equivalent,
            }
        })
        .collect()
}

/// The bench table. Timings are left out so that reports are reproducible.
pub fn bench_table(config: &BenchConfig, rows: &[BenchRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# n={} locations={} actions={} K={} seed={}",
        config.n, config.spec.locations, config.spec.actions, config.spec.max_constant, config.seed
    );
    let _ = writeln!(s, "{:>3} {:>4} {:>5} {:>7} {:>8} {:>3} {:>5} {:>4} {:>7} {:>7}", "#", "locs", "edges", "mq", "distinct", "eq", "iters", "hyp", "success", "equiv");
    for (i, r) in rows.iter().enumerate() {
        let o = &r.outcome;
        let _ = writeln!(
            s,
            "{:>3} {:>4} {:>5} {:>7} {:>8} {:>3} {:>5} {:>4} {:>7} {:>7}",
            i,
            r.target_locations,
            r.transitions,
            o.teacher.membership_count,
            o.teacher.distinct_membership_count,
            o.teacher.equivalence_count,
            o.iterations.len(),
            o.hypothesis.locations.len(),
            o.success,
            r.equivalent
        );
    }
    let ok = rows.iter().filter(|r| r.outcome.success).count();
    let _ = writeln!(s, "# learned {ok}/{}", rows.len());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rera::samples;

    fn write(dir: &Path, name: &str, a: &Rera) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, format::serialize(a).unwrap()).unwrap();
        p
    }

    fn config(target: PathBuf, k: u32, out: PathBuf) -> RunConfig {
        RunConfig {
            target_file: target,
            k,
            seed: 0,
            limits: Limits::default(),
            output_dir: out,
            emit_dot: true,
        }
    }

    #[test]
    fn learn_writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let t = write(dir.path(), "window.rera", &samples::reset_then_window());
        let out = dir.path().join("out");
        assert!(cmd_learn(&config(t.clone(), 2, out.clone())).unwrap());
        let hyp = load(&out.join("hypothesis.rera")).unwrap();
        assert_eq!(cmd_equiv(&t, &out.join("hypothesis.rera")).unwrap(), None);
        assert_eq!(hyp.max_constant, 2);
        let report = fs::read_to_string(out.join("report.txt")).unwrap();
        assert!(report.contains("success: true"));
        assert!(out.join("iter-1-tdg.dot").exists());
        assert!(out.join("iter-1-tog.dot").exists());
    }

    #[test]
    fn k_below_target_constant_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let t = write(dir.path(), "b.rera", &samples::reset_on_b());
        let err = cmd_learn(&config(t, 1, dir.path().join("out"))).unwrap_err();
        assert!(matches!(err, CliError::KTooSmall { k: 1, constant: 3 }));
        assert!(!dir.path().join("out").exists());
    }

    #[test]
    fn member_and_equiv() {
        let dir = tempfile::tempdir().unwrap();
        let b = write(dir.path(), "b.rera", &samples::reset_on_b());
        assert!(cmd_member(&b, "1.5:a 0:b 0:a 2:a").unwrap());
        assert!(cmd_member(&b, "3/2:a 0:b 0:a 2:a").unwrap());
        assert!(!cmd_member(&b, "0:a 0:a").unwrap());
        assert!(matches!(cmd_member(&b, "1:c"), Err(CliError::Word(_))));
        assert_eq!(cmd_equiv(&b, &b).unwrap(), None);
        let mut other = samples::reset_on_b();
        other.accepting.clear();
        let o = write(dir.path(), "o.rera", &other);
        let line = cmd_equiv(&b, &o).unwrap().unwrap();
        assert!(line.ends_with("(first: accept, second: reject)"), "{line}");
        assert!(cmd_export_dot(&b).unwrap().starts_with("digraph"));
    }

    #[test]
    fn invalid_files_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.rera");
        fs::write(&p, "alphabet = [\"a\"]\n").unwrap();
        assert!(matches!(load(&p), Err(CliError::Format { .. })));
        let mut nondet = samples::reset_then_window();
        nondet.transitions.push(nondet.transitions[1].clone());
        let q = write(dir.path(), "nd.rera", &nondet);
        assert!(matches!(load(&q), Err(CliError::Invalid { .. })));
        assert!(matches!(load(&dir.path().join("none.rera")), Err(CliError::Io { .. })));
    }
}
