//! Named residuals with tolerances, shared by the identity checks.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
}

impl IdentityCheck {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self { name: name.into(), residual, tol }
    }

    /// NaN residuals fail.
    pub fn passed(&self) -> bool {
        self.residual < self.tol
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn push(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        self.checks.push(IdentityCheck::new(name, residual, tol));
    }

    pub fn extend(&mut self, other: IdentityReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Largest residual among checks whose name starts with `prefix`.
    pub fn worst(&self, prefix: &str) -> Option<f64> {
        self.checks
            .iter()
            .filter(|c| c.name.starts_with(prefix))
            .map(|c| c.residual)
            .reduce(f64::max)
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {} residual={:.3e} tol={:.1e}",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tol
            )?;
        }
        Ok(())
    }
}
