//! Line protocol for external learners.
//!
//! ```text
//! M <word>   ->  A | R
//! E <file>   ->  Y | C <word> <A|R>
//! ```
//!
//! Words are space-separated `delay:action` pairs; `eps` or nothing denotes
//! the empty word. Malformed requests get `ERR <message>` and the session
//! continues.

use std::io::{self, BufRead, Write};
use std::path::Path;

use super::{EquivalenceAnswer, Teacher};
use crate::rera::format;
use crate::timed::TimedWord;

fn verdict(accepted: bool) -> &'static str {
    if accepted {
        "A"
    } else {
        "R"
    }
}

/// Answers one request line. Automaton paths are resolved against `base`.
pub fn answer(teacher: &dyn Teacher, line: &str, base: &Path) -> String {
    let line = line.trim();
    let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    let rest = rest.trim();
    match cmd {
        "M" => match TimedWord::parse(rest, teacher.alphabet()) {
            Ok(w) => match teacher.membership(&w) {
                Ok(o) => verdict(o).to_string(),
                Err(e) => format!("ERR {e}"),
            },
            Err(e) => format!("ERR {e}"),
        },
        "E" => {
            if rest.is_empty() {
                return "ERR missing automaton file".to_string();
            }
            let text = match std::fs::read_to_string(base.join(rest)) {
                Ok(t) => t,
                Err(e) => return format!("ERR {rest}: {e}"),
            };
            let hypothesis = match format::parse(&text) {
                Ok(h) => h,
                Err(e) => return format!("ERR {e}"),
            };
            if let Some(v) = hypothesis.validate().first() {
                return format!("ERR invalid automaton: {v}");
            }
            match teacher.equivalence(&hypothesis) {
                Ok(EquivalenceAnswer::Yes) => "Y".to_string(),
                Ok(EquivalenceAnswer::Counterexample { word, accepted }) => {
                    format!("C {} {}", word.display(teacher.alphabet()), verdict(accepted))
                }
                Err(e) => format!("ERR {e}"),
            }
        }
        _ => format!("ERR unknown command `{cmd}`"),
    }
}

/// Serves requests until end of input. Blank lines are ignored.
pub fn serve(teacher: &dyn Teacher, input: impl BufRead, mut output: impl Write, base: &Path) -> io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writeln!(output, "{}", answer(teacher, &line, base))?;
        output.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rera::samples;
    use crate::teacher::SimulatedTeacher;

    #[test]
    fn session() {
        let dir = tempfile::tempdir().unwrap();
        let target = samples::reset_then_window();
        let mut empty = target.clone();
        empty.accepting.clear();
        std::fs::write(dir.path().join("same.rera"), format::serialize(&target).unwrap()).unwrap();
        std::fs::write(dir.path().join("empty.rera"), format::serialize(&empty).unwrap()).unwrap();
        let teacher = SimulatedTeacher::new(target);
        let input = "M 0.7:a 0.9:a\nM 0.7:a 1.2:a\n\nM eps\nM 1:z\nE same.rera\nE empty.rera\nE missing.rera\nX\n";
        let mut out = Vec::new();
        serve(&teacher, input.as_bytes(), &mut out, dir.path()).unwrap();
        let lines: Vec<&str> = std::str::from_utf8(&out).unwrap().lines().collect();
        assert_eq!(&lines[..3], ["A", "R", "R"]);
        assert!(lines[3].starts_with("ERR"));
        assert_eq!(lines[4], "Y");
        let parts: Vec<&str> = lines[5].split(' ').collect();
        assert_eq!(parts[0], "C");
        assert_eq!(*parts.last().unwrap(), "A");
        let word = TimedWord::parse(&parts[1..parts.len() - 1].join(" "), teacher.alphabet()).unwrap();
        assert!(teacher.target().accepts(&word));
        assert!(lines[6].starts_with("ERR missing.rera"));
        assert!(lines[7].starts_with("ERR unknown command"));
    }
}
