use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::SandboxError;

/// What candidate code may touch. The runner enforces this on the syntax
/// tree; [`lexical_scan`] is a coarser token-level mirror for executors that
/// have no runner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SandboxPolicy {
    pub allowed_imports: BTreeSet<String>,
    pub denied_call_names: BTreeSet<String>,
    pub deny_dunder_attributes: bool,
    pub wall_clock_timeout_secs: f64,
    pub memory_cap_bytes: u64,
}

const DEFAULT_IMPORTS: &[&str] = &[
    "bisect",
    "collections",
    "copy",
    "dataclasses",
    "functools",
    "heapq",
    "itertools",
    "math",
    "operator",
    "string",
    "typing",
];

const DEFAULT_DENIED: &[&str] = &[
    "__import__",
    "breakpoint",
    "compile",
    "delattr",
    "eval",
    "exec",
    "exit",
    "getattr",
    "globals",
    "help",
    "input",
    "locals",
    "memoryview",
    "open",
    "quit",
    "setattr",
    "vars",
];

impl Default for SandboxPolicy {
    fn default() -> Self {
        Self {
            allowed_imports: DEFAULT_IMPORTS.iter().map(|s| s.to_string()).collect(),
            denied_call_names: DEFAULT_DENIED.iter().map(|s| s.to_string()).collect(),
            deny_dunder_attributes: true,
            wall_clock_timeout_secs: 10.0,
            memory_cap_bytes: 1 << 30,
        }
    }
}

impl SandboxPolicy {
    pub fn check(&self) -> Result<(), SandboxError> {
        if !(self.wall_clock_timeout_secs > 0.0 && self.wall_clock_timeout_secs.is_finite()) {
            return Err(SandboxError::InvalidPolicy(format!(
                "timeout must be positive, got {}",
                self.wall_clock_timeout_secs
            )));
        }
        Ok(())
    }
}

/// Blank out string literals and comments so token checks only see code.
/// Newlines are preserved so line structure survives.
fn strip_literals(source: &str) -> String {
    let chars: Vec<char> = source.chars().collect();
    let mut out = String::with_capacity(source.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '"' || c == '\'' {
            let triple = i + 2 < chars.len() && chars[i + 1] == c && chars[i + 2] == c;
            let width = if triple { 3 } else { 1 };
            i += width;
            out.push_str("\"\"");
            while i < chars.len() {
                if chars[i] == '\\' {
                    i += 2;
                    continue;
                }
                if chars[i] == '\n' {
                    out.push('\n');
                    if !triple {
                        i += 1;
                        break;
                    }
                }
                if chars[i] == c && (!triple || (i + 2 < chars.len() && chars[i + 1] == c && chars[i + 2] == c)) {
                    i += width;
                    break;
                }
                i += 1;
            }
            continue;
        }
        out.push(c);
        i += 1;
    }
    out
}

fn identifiers(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'_' || bytes[i].is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i] == b'_' || bytes[i].is_ascii_alphanumeric()) {
                i += 1;
            }
            out.push((start, &line[start..i]));
        } else {
            i += 1;
        }
    }
    out
}

fn import_roots(line: &str) -> Vec<String> {
    let trimmed = line.trim_start();
    if let Some(rest) = trimmed.strip_prefix("import ") {
        rest.split(',')
            .filter_map(|part| part.split_whitespace().next())
            .map(|m| m.split('.').next().unwrap_or(m).to_string())
            .collect()
    } else if let Some(rest) = trimmed.strip_prefix("from ") {
        let module = rest.split_whitespace().next().unwrap_or("");
        vec![module.split('.').next().unwrap_or(module).to_string()]
    } else {
        Vec::new()
    }
}

/// Token-level screening of candidate source against `policy`; returns the
/// first violation. Also requires a three-parameter `get_plan` definition.
pub fn lexical_scan(source: &str, policy: &SandboxPolicy) -> Result<(), String> {
    let code = strip_literals(source);
    for line in code.lines() {
        for root in import_roots(line) {
            if !policy.allowed_imports.contains(&root) {
                return Err(format!("import of module '{root}' is not allowed"));
            }
        }
        let idents = identifiers(line);
        for &(at, name) in &idents {
            let called = line[at + name.len()..].trim_start().starts_with('(');
            if called && policy.denied_call_names.contains(name) {
                return Err(format!("call to '{name}' is not allowed"));
            }
            if policy.deny_dunder_attributes && name.len() > 4 && name.starts_with("__") && name.ends_with("__") {
                return Err(format!("dunder access '{name}' is not allowed"));
            }
        }
    }
    let has_entry = code.lines().any(|line| {
        let Some(rest) = line.trim_start().strip_prefix("def get_plan") else {
            return false;
        };
        let Some(args) = rest.trim_start().strip_prefix('(') else {
            return false;
        };
        let args = args.split(')').next().unwrap_or("");
        args.split(',').filter(|a| !a.trim().is_empty()).count() == 3
    });
    if !has_entry {
        return Err("missing get_plan(objects, init, goal)".into());
    }
    Ok(())
}
