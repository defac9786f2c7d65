//! PASS/FAIL reports with symbolic residuals.
//!
//! Every checker returns a [`Report`]: an ordered list of [`Check`]s, each
//! carrying the nonzero residuals that made it fail (printed canonically so
//! that a failing identity can be rechecked by hand) and optional numeric
//! metrics.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A precondition of the check did not hold, so the check itself was
    /// not meaningful.
    Precondition,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Precondition => "PRECONDITION",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub label: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub residuals: Vec<Residual>,
    pub metrics: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl Check {
    /// An exact identity check; passes until a nonzero residual is added.
    pub fn identity(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Pass,
            residuals: Vec::new(),
            metrics: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_status(name: impl Into<String>, status: Status) -> Self {
        Check {
            status,
            ..Self::identity(name)
        }
    }

    /// Passes iff `value <= tol`.
    pub fn numeric(name: impl Into<String>, label: &str, value: f64, tol: f64) -> Self {
        let ok = value <= tol;
        let mut c = Self::with_status(name, if ok { Status::Pass } else { Status::Fail });
        c.metrics.push((label.to_string(), value));
        c.metrics.push(("tol".to_string(), tol));
        c
    }

    /// Records a residual if it is nonzero and marks the check failed.
    pub fn residual(&mut self, label: impl Into<String>, value: &impl IsZeroDisplay) {
        if !value.is_zero_value() {
            self.residuals.push(Residual {
                label: label.into(),
                value: value.to_string(),
            });
            if self.status == Status::Pass {
                self.status = Status::Fail;
            }
        }
    }

    pub fn fail(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
        if self.status == Status::Pass {
            self.status = Status::Fail;
        }
    }

    pub fn metric(mut self, label: &str, value: f64) -> Self {
        self.metrics.push((label.to_string(), value));
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Values that can be reported as residuals.
pub trait IsZeroDisplay: fmt::Display {
    fn is_zero_value(&self) -> bool;
}

impl IsZeroDisplay for crate::poly::Polynomial {
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

impl IsZeroDisplay for crate::exterior::AlgebroidForm {
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Appends the checks of `other`, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.checks.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} ==", self.title)?;
        for c in &self.checks {
            writeln!(f, "{:<12} {}", c.status.to_string(), c.name)?;
            for (k, v) in &c.metrics {
                writeln!(f, "             {k} = {v:.6e}")?;
            }
            for r in &c.residuals {
                writeln!(f, "             {} = {}", r.label, r.value)?;
            }
            for n in &c.notes {
                writeln!(f, "             note: {n}")?;
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        writeln!(
            f,
            "summary: {passed} passed, {} not passed",
            self.checks.len() - passed
        )
    }
}
