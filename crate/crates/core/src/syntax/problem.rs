//! Problem files: one formula per line, `#` comments, and an `@vars`
//! directive declaring free variables for the whole file.

use super::parse::{parse_formula_with, ParseOptions};
use super::store::{Formula, Store};
use super::SyntaxError;

#[derive(Debug, Clone, Default)]
pub struct Problem {
    pub vars: Vec<String>,
    pub formulas: Vec<Formula>,
}

impl Problem {
    pub fn var_refs(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }
}

pub fn parse_problem(store: &mut Store, text: &str) -> Result<Problem, SyntaxError> {
    parse_problem_with(store, text, ParseOptions::default())
}

pub(crate) fn parse_problem_with(
    store: &mut Store,
    text: &str,
    options: ParseOptions,
) -> Result<Problem, SyntaxError> {
    let mut problem = Problem::default();
    let mut lines = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("@vars") {
            for v in rest.split_whitespace() {
                if v.starts_with(super::RESERVED_PREFIX) && !options.allow_reserved {
                    return Err(SyntaxError::Reserved {
                        name: v.to_owned(),
                        line: n + 1,
                        column: 1,
                    });
                }
                if !problem.vars.iter().any(|w| w == v) {
                    problem.vars.push(v.to_owned());
                }
            }
            continue;
        }
        if line.starts_with('@') {
            return Err(SyntaxError::Parse {
                line: n + 1,
                column: 1,
                message: format!("unknown directive `{line}`"),
            });
        }
        lines.push((n + 1, line));
    }
    let owned = problem.vars.clone();
    let vars: Vec<&str> = owned.iter().map(String::as_str).collect();
    for (n, line) in lines {
        let f = parse_formula_with(store, line, &vars, options).map_err(|e| at_line(e, n))?;
        problem.formulas.push(f);
    }
    Ok(problem)
}

fn at_line(e: SyntaxError, n: usize) -> SyntaxError {
    match e {
        SyntaxError::Parse {
            column, message, ..
        } => SyntaxError::Parse {
            line: n,
            column,
            message,
        },
        SyntaxError::Reserved { name, column, .. } => SyntaxError::Reserved {
            name,
            line: n,
            column,
        },
        other => other,
    }
}
