//! Client for an external SMT-LIB 2 solver. Every query (or batch of
//! queries) runs in a fresh solver process fed over standard input.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::{Child, Command, Stdio};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use num_traits::Signed;
use thiserror::Error;

use crate::terms::{Sort, Term, Var};
use crate::theory::{Logic, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SmtResult {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Validity {
    Valid,
    NotValid,
    Unknown,
}

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("could not run solver `{executable}`: {source}")]
    Spawn { executable: String, source: std::io::Error },
    #[error("solver i/o failure: {0}")]
    Io(String),
    #[error("solver rejected the query: {0}")]
    Malformed(String),
    #[error("cannot encode for the solver: {0}")]
    Unsupported(String),
    #[error("query cancelled")]
    Cancelled,
}

impl SmtError {
    /// Errors caused by the solver process itself rather than the query.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, SmtError::Spawn { .. } | SmtError::Io(_))
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub executable: PathBuf,
    pub logic: Logic,
    pub timeout: Duration,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { executable: PathBuf::from("z3"), logic: Logic::QF_LIA, timeout: Duration::from_millis(2000) }
    }
}

impl SolverConfig {
    pub fn with_logic(mut self, logic: Logic) -> Self {
        self.logic = logic;
        self
    }

    fn args(&self) -> Vec<String> {
        let name = self.executable.file_name().map(|n| n.to_string_lossy().to_lowercase()).unwrap_or_default();
        if name.contains("cvc") {
            vec!["--lang=smt2".into(), format!("--tlimit-per={}", self.timeout.as_millis())]
        } else if name.contains("yices") {
            Vec::new()
        } else {
            vec!["-in".into(), "-smt2".into(), format!("-t:{}", self.timeout.as_millis())]
        }
    }
}

const RESERVED: &[&str] = &[
    "and", "or", "not", "xor", "ite", "distinct", "true", "false", "let", "forall", "exists", "match", "par", "as",
    "assert", "check-sat", "declare-const", "declare-fun", "define-fun", "set-logic", "reset", "push", "pop", "div",
    "mod", "abs", "Int", "Bool", "Real", "BINARY", "DECIMAL", "HEXADECIMAL", "NUMERAL", "STRING", "_", "!",
];

fn is_simple_symbol(s: &str) -> bool {
    let extra = |c: char| "~!@$%^&*_-+=<>.?/".contains(c);
    !s.is_empty()
        && !s.starts_with(|c: char| c.is_ascii_digit())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || extra(c))
}

fn var_symbol(x: &Var) -> String {
    let base = if x.index() > 0 { format!("{}!{}", x.name(), x.index()) } else { x.name().to_string() };
    if is_simple_symbol(&base) && !RESERVED.contains(&base.as_str()) {
        base
    } else {
        format!("|{}|", base.replace(['|', '\\'], "_"))
    }
}

fn sort_symbol(s: &Sort) -> Result<&'static str, SmtError> {
    match s.name() {
        "Int" => Ok("Int"),
        "Bool" => Ok("Bool"),
        "Real" => Ok("Real"),
        other => Err(SmtError::Unsupported(format!("sort {other}"))),
    }
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Bool(b) => write!(out, "{b}").unwrap(),
        Value::Int(n) if n.is_negative() => write!(out, "(- {})", -n).unwrap(),
        Value::Int(n) => write!(out, "{n}").unwrap(),
        Value::Real(q) => {
            let neg = q.is_negative();
            let q = q.abs();
            if neg {
                out.push_str("(- ");
            }
            if q.is_integer() {
                write!(out, "{}.0", q.numer()).unwrap();
            } else {
                write!(out, "(/ {}.0 {}.0)", q.numer(), q.denom()).unwrap();
            }
            if neg {
                out.push(')');
            }
        }
    }
}

fn write_term(out: &mut String, t: &Term) -> Result<(), SmtError> {
    match t {
        Term::Var(x) => out.push_str(&var_symbol(x)),
        Term::Val(v) => write_value(out, v),
        Term::App(f, args) => {
            let op = f.op().ok_or_else(|| SmtError::Unsupported(format!("symbol {}", f.name())))?;
            write!(out, "({}", op.smt_name()).unwrap();
            for a in args {
                out.push(' ');
                write_term(out, a)?;
            }
            out.push(')');
        }
    }
    Ok(())
}

/// A self-contained SMT-LIB 2 script checking satisfiability of `phi`.
/// Variables are declared in a fixed order, so equal terms give
/// byte-identical scripts.
pub fn serialize(phi: &Term, logic: Logic) -> Result<String, SmtError> {
    if phi.sort() != Sort::boolean() {
        return Err(SmtError::Unsupported(format!("{phi} is not a formula")));
    }
    let mut out = format!("(set-logic {logic})");
    for x in phi.vars() {
        write!(out, "(declare-const {} {})", var_symbol(&x), sort_symbol(x.sort())?).unwrap();
    }
    out.push_str("(assert ");
    write_term(&mut out, phi)?;
    out.push_str(")(check-sat)");
    Ok(out)
}

/// Handle to an external solver. Results are cached per script; a shared
/// cancellation flag aborts pending and future queries.
pub struct Solver {
    config: SolverConfig,
    cache: Mutex<HashMap<String, SmtResult>>,
    cancel: Arc<AtomicBool>,
    queries: AtomicU64,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Solver {
        Solver::with_cancel(config, Arc::new(AtomicBool::new(false)))
    }

    pub fn with_cancel(config: SolverConfig, cancel: Arc<AtomicBool>) -> Solver {
        Solver { config, cache: Mutex::new(HashMap::new()), cancel, queries: AtomicU64::new(0) }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn cancel_token(&self) -> Arc<AtomicBool> {
        self.cancel.clone()
    }

    pub fn is_cancelled(&self) -> bool {
        self.cancel.load(Ordering::Relaxed)
    }

    /// Number of solver processes started so far.
    pub fn process_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn check_sat(&self, phi: &Term) -> Result<SmtResult, SmtError> {
        Ok(self.check_sat_all(std::slice::from_ref(phi))?[0])
    }

    /// Checks several formulas with one solver process.
    pub fn check_sat_all(&self, phis: &[Term]) -> Result<Vec<SmtResult>, SmtError> {
        if self.is_cancelled() {
            return Err(SmtError::Cancelled);
        }
        let scripts = phis.iter().map(|p| serialize(p, self.config.logic)).collect::<Result<Vec<_>, _>>()?;
        let mut results: Vec<Option<SmtResult>> = {
            let cache = self.cache.lock().unwrap();
            scripts.iter().map(|s| cache.get(s).copied()).collect()
        };
        let missing: Vec<usize> = (0..scripts.len()).filter(|&i| results[i].is_none()).collect();
        if !missing.is_empty() {
            let batch: Vec<&str> = missing.iter().map(|&i| scripts[i].as_str()).collect();
            let answers = self.run(&batch)?;
            let mut cache = self.cache.lock().unwrap();
            for (&i, r) in missing.iter().zip(answers) {
                if r != SmtResult::Unknown {
                    cache.insert(scripts[i].clone(), r);
                }
                results[i] = Some(r);
            }
        }
        Ok(results.into_iter().map(Option::unwrap).collect())
    }

    /// Validity through unsatisfiability of the negation.
    pub fn is_valid(&self, phi: &Term) -> Result<Validity, SmtError> {
        Ok(match self.check_sat(&Term::not(phi.clone()))? {
            SmtResult::Unsat => Validity::Valid,
            SmtResult::Sat => Validity::NotValid,
            SmtResult::Unknown => Validity::Unknown,
        })
    }

    /// Validity of several formulas with one solver process.
    pub fn is_valid_all(&self, phis: &[Term]) -> Result<Vec<Validity>, SmtError> {
        let negated: Vec<Term> = phis.iter().map(|p| Term::not(p.clone())).collect();
        Ok(self
            .check_sat_all(&negated)?
            .into_iter()
            .map(|r| match r {
                SmtResult::Unsat => Validity::Valid,
                SmtResult::Sat => Validity::NotValid,
                SmtResult::Unknown => Validity::Unknown,
            })
            .collect())
    }

    fn run(&self, scripts: &[&str]) -> Result<Vec<SmtResult>, SmtError> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let mut child = Command::new(&self.config.executable)
            .args(self.config.args())
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| SmtError::Spawn { executable: self.config.executable.display().to_string(), source })?;

        let mut input = scripts.join("(reset)");
        input.push_str("(exit)\n");
        {
            let mut stdin = child.stdin.take().expect("piped stdin");
            if let Err(e) = stdin.write_all(input.as_bytes()) {
                kill(&mut child);
                return Err(SmtError::Io(e.to_string()));
            }
        }

        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });

        let grace = Duration::from_millis(500);
        let deadline = Instant::now() + self.config.timeout * scripts.len() as u32 + grace;
        let mut answers = Vec::with_capacity(scripts.len());
        while answers.len() < scripts.len() {
            if self.is_cancelled() {
                kill(&mut child);
                return Err(SmtError::Cancelled);
            }
            let now = Instant::now();
            if now >= deadline {
                break;
            }
            let wait = (deadline - now).min(Duration::from_millis(50));
            match rx.recv_timeout(wait) {
                Ok(line) => {
                    let line = line.trim();
                    match line.split_whitespace().next() {
                        Some("sat") => answers.push(SmtResult::Sat),
                        Some("unsat") => answers.push(SmtResult::Unsat),
                        Some("unknown" | "timeout") => answers.push(SmtResult::Unknown),
                        _ if line.starts_with("(error") => {
                            kill(&mut child);
                            return Err(SmtError::Malformed(line.to_string()));
                        }
                        _ => {}
                    }
                }
                Err(mpsc::RecvTimeoutError::Timeout) => {}
                Err(mpsc::RecvTimeoutError::Disconnected) => {
                    let _ = child.wait();
                    if answers.is_empty() {
                        return Err(SmtError::Io("solver exited without an answer".into()));
                    }
                    break;
                }
            }
        }
        kill(&mut child);
        answers.resize(scripts.len(), SmtResult::Unknown);
        Ok(answers)
    }
}

fn kill(child: &mut Child) {
    let _ = child.kill();
    let _ = child.wait();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::Op;

    fn x(n: &str) -> Term {
        Term::var(n, Sort::int())
    }

    fn solver() -> Solver {
        Solver::new(SolverConfig::default())
    }

    #[test]
    fn serialize_exact_script() {
        let phi = Term::op(Op::Ge, vec![x("x"), x("y")]);
        assert_eq!(
            serialize(&phi, Logic::QF_LIA).unwrap(),
            "(set-logic QF_LIA)(declare-const x Int)(declare-const y Int)(assert (>= x y))(check-sat)"
        );
    }

    #[test]
    fn serialize_product_and_names() {
        let phi = Term::eq(x("z"), Term::op(Op::Mul, vec![x("x"), x("x")]));
        let script = serialize(&phi, Logic::QF_NIA).unwrap();
        assert!(script.contains("(* x x)"), "{script}");
        let fresh = Var::with_index("x'", 3, Sort::int());
        let phi = Term::eq(Term::Var(fresh), Term::int(-2));
        assert_eq!(
            serialize(&phi, Logic::QF_LIA).unwrap(),
            "(set-logic QF_LIA)(declare-const |x'!3| Int)(assert (= |x'!3| (- 2)))(check-sat)"
        );
        let phi = Term::eq(x("and"), Term::int(0));
        assert!(serialize(&phi, Logic::QF_LIA).unwrap().contains("|and|"));
    }

    #[test]
    fn serialize_reals() {
        let q = Term::Val(crate::theory::value_of("-3/4").unwrap());
        let phi = Term::op(Op::Le, vec![Term::var("r", Sort::real()), q]);
        assert!(serialize(&phi, Logic::QF_LRA).unwrap().contains("(<= r (- (/ 3.0 4.0)))"));
    }

    #[test]
    fn serialize_rejects_term_symbols() {
        let f = crate::terms::FunSym::term("f", vec![], Sort::int());
        let phi = Term::eq(Term::constant(&f), Term::int(0));
        assert!(matches!(serialize(&phi, Logic::QF_LIA), Err(SmtError::Unsupported(_))));
    }

    #[test]
    fn sat_examples() {
        let s = solver();
        let ge = |a, b| Term::op(Op::Ge, vec![a, b]);
        assert_eq!(s.check_sat(&Term::and(ge(x("x"), x("y")), ge(x("y"), x("x")))).unwrap(), SmtResult::Sat);
        let gt = Term::op(Op::Gt, vec![x("x"), Term::int(0)]);
        let lt = Term::op(Op::Lt, vec![x("x"), Term::int(0)]);
        assert_eq!(s.check_sat(&Term::and(gt, lt)).unwrap(), SmtResult::Unsat);
        let gt = Term::op(Op::Gt, vec![x("m"), Term::int(0)]);
        let lt = Term::op(Op::Lt, vec![x("m"), Term::int(0)]);
        let phi = Term::op(Op::Or, vec![Term::and(gt, lt), Term::ff()]);
        assert_eq!(s.check_sat(&phi).unwrap(), SmtResult::Unsat);
        assert_eq!(s.check_sat(&Term::tt()).unwrap(), SmtResult::Sat);
    }

    #[test]
    fn validity_examples() {
        let s = solver();
        let ge = |a, b| Term::op(Op::Ge, vec![a, b]);
        let hyp = Term::conj([
            ge(x("x"), Term::int(2)),
            ge(x("y"), Term::int(4)),
            Term::eq(x("z"), Term::op(Op::Add, vec![x("x"), x("y")])),
        ]);
        let phi = Term::implies(hyp, ge(x("z"), Term::int(6)));
        assert_eq!(s.is_valid(&phi).unwrap(), Validity::Valid);
        assert_eq!(s.is_valid(&Term::eq(x("x"), x("x"))).unwrap(), Validity::Valid);
        assert_eq!(s.is_valid(&ge(x("x"), x("y"))).unwrap(), Validity::NotValid);
    }

    #[test]
    fn batch_and_cache() {
        let s = solver();
        let phis = vec![
            Term::op(Op::Gt, vec![x("a"), Term::int(0)]),
            Term::and(Term::op(Op::Gt, vec![x("a"), Term::int(0)]), Term::op(Op::Lt, vec![x("a"), Term::int(0)])),
            Term::tt(),
        ];
        let rs = s.check_sat_all(&phis).unwrap();
        assert_eq!(rs, vec![SmtResult::Sat, SmtResult::Unsat, SmtResult::Sat]);
        let before = s.process_count();
        assert_eq!(s.check_sat_all(&phis).unwrap(), rs);
        assert_eq!(s.process_count(), before);
    }

    #[test]
    fn missing_solver_is_a_spawn_error() {
        let cfg = SolverConfig { executable: PathBuf::from("/nonexistent/solver"), ..SolverConfig::default() };
        let err = Solver::new(cfg).check_sat(&Term::tt()).unwrap_err();
        assert!(err.is_solver_failure());
    }

    #[test]
    fn cancelled_solver_refuses_queries() {
        let s = solver();
        s.cancel_token().store(true, Ordering::Relaxed);
        assert!(matches!(s.check_sat(&Term::tt()), Err(SmtError::Cancelled)));
    }
}
