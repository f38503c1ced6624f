//! Structured verification reports with deterministic text and key-value renderings.

use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "INFO",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One line: where, what was checked, the residual or value, and the verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub scope: String,
    pub assertion: String,
    pub value: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), entries: Vec::new() }
    }

    pub fn push(&mut self, scope: impl Into<String>, assertion: impl Into<String>, value: impl Into<String>, verdict: Verdict) {
        self.entries.push(Entry {
            scope: scope.into(),
            assertion: assertion.into(),
            value: value.into(),
            verdict,
        });
    }

    pub fn check(&mut self, scope: impl Into<String>, assertion: impl Into<String>, value: impl Into<String>, ok: bool) {
        self.push(scope, assertion, value, Verdict::from_bool(ok));
    }

    pub fn info(&mut self, scope: impl Into<String>, assertion: impl Into<String>, value: impl Into<String>) {
        self.push(scope, assertion, value, Verdict::Info);
    }

    pub fn extend(&mut self, other: Report) {
        self.entries.extend(other.entries);
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.entries.iter().filter(|e| e.verdict == verdict).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Verdict::Fail) == 0
    }

    /// Entries matching a scope and assertion.
    pub fn find<'a>(&'a self, scope: &'a str, assertion: &'a str) -> impl Iterator<Item = &'a Entry> + 'a {
        self.entries.iter().filter(move |e| e.scope == scope && e.assertion == assertion)
    }

    /// Flat `key = value` lines in entry order.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "report = {}", self.title);
        for (i, e) in self.entries.iter().enumerate() {
            let key = format!("entry.{:04}", i + 1);
            let _ = writeln!(out, "{key}.scope = {}", e.scope);
            let _ = writeln!(out, "{key}.assertion = {}", e.assertion);
            let _ = writeln!(out, "{key}.value = {}", e.value);
            let _ = writeln!(out, "{key}.verdict = {}", e.verdict.as_str());
        }
        let _ = writeln!(out, "summary.pass = {}", self.count(Verdict::Pass));
        let _ = writeln!(out, "summary.fail = {}", self.count(Verdict::Fail));
        let _ = writeln!(out, "summary.verdict = {}", Verdict::from_bool(self.passed()).as_str());
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        for e in &self.entries {
            let sep = if e.verdict == Verdict::Info { " = " } else { " :: " };
            let _ = writeln!(out, "  [{}] {} :: {}{sep}{}", e.verdict.as_str(), e.scope, e.assertion, e.value);
        }
        let _ = writeln!(
            out,
            "{} ({} passed, {} failed)",
            Verdict::from_bool(self.passed()).as_str(),
            self.count(Verdict::Pass),
            self.count(Verdict::Fail)
        );
        out
    }
}
