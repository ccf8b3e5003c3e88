//! Step-size sequences for the solver: the power family
//! `alpha_k = a / k^p`, `beta_k = xi * k^q`, with validation of the
//! summability and penalty-product conditions the convergence theory
//! needs.

use crate::error::{GfbpError, Result};
use crate::operators::Cocoercivity;

/// Something that yields per-iteration step sizes. Custom sequences are
/// accepted but reported as unvalidated.
pub trait StepSizes: Send + Sync {
    /// Proximal step size at iteration `k >= 1`.
    fn alpha(&self, k: u64) -> f64;
    /// Penalty weight at iteration `k >= 1`.
    fn beta(&self, k: u64) -> f64;
    fn describe(&self) -> String;
    fn validate(&self, _bound: Cocoercivity) -> ValidationReport {
        ValidationReport {
            schedule: self.describe(),
            status: ValidationStatus::Unvalidated,
            checks: vec![Check {
                name: "power family".into(),
                passed: false,
                detail: "custom schedule; conditions are not decidable from parameters".into(),
            }],
        }
    }
}

/// The power-family schedule. Validation is decidable from the exponents:
/// `alpha` lies in l2 but not l1 iff `1/2 < p <= 1`, and
/// `alpha_k * beta_k` has a positive finite limit iff `q = p`, where the
/// limit is `a * xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    pub a: f64,
    pub p: f64,
    pub xi: f64,
    pub q: f64,
}

impl StepSchedule {
    pub fn new(a: f64, p: f64, xi: f64, q: f64) -> Result<Self> {
        if a <= 0.0 {
            return Err(GfbpError::Parameter(format!(
                "schedule scale a must be positive, got {a}"
            )));
        }
        if xi <= 0.0 {
            return Err(GfbpError::Parameter(format!(
                "penalty scale xi must be positive, got {xi}"
            )));
        }
        Ok(Self { a, p, xi, q })
    }

    /// Constant product of the two step sequences when `q = p`.
    pub fn product(&self) -> f64 {
        self.a * self.xi
    }
}

/// `alpha_k = 1/k`, `beta_k = xi * k`.
pub fn make_default(xi: f64) -> Result<StepSchedule> {
    StepSchedule::new(1.0, 1.0, xi, 1.0)
}

impl StepSizes for StepSchedule {
    fn alpha(&self, k: u64) -> f64 {
        self.a / (k as f64).powf(self.p)
    }

    fn beta(&self, k: u64) -> f64 {
        self.xi * (k as f64).powf(self.q)
    }

    fn describe(&self) -> String {
        format!(
            "alpha_k = {}/k^{}, beta_k = {} k^{}",
            self.a, self.p, self.xi, self.q
        )
    }

    fn validate(&self, bound: Cocoercivity) -> ValidationReport {
        let mut checks = Vec::new();
        let l2_not_l1 = self.p > 0.5 && self.p <= 1.0;
        checks.push(Check {
            name: "alpha in l2 \\ l1".into(),
            passed: l2_not_l1,
            detail: format!("requires 1/2 < p <= 1, p = {}", self.p),
        });
        let product_limit = self.q == self.p;
        checks.push(Check {
            name: "alpha*beta has positive finite limit".into(),
            passed: product_limit,
            detail: if product_limit {
                format!("q = p so alpha_k*beta_k = {} for all k", self.product())
            } else {
                format!("q = {} differs from p = {}", self.q, self.p)
            },
        });
        let below = bound.admits_product(self.product());
        checks.push(Check {
            name: "alpha*beta below cocoercivity bound".into(),
            passed: below,
            detail: match bound {
                Cocoercivity::Finite(m) => {
                    format!("a*xi = {} against bound {}", self.product(), m)
                }
                Cocoercivity::Infinite => {
                    "bound is vacuous (zero operator)".into()
                }
            },
        });
        let accepted = checks.iter().all(|c| c.passed);
        ValidationReport {
            schedule: self.describe(),
            status: if accepted {
                ValidationStatus::Accepted
            } else {
                ValidationStatus::Rejected
            },
            checks,
        }
    }
}

/// Arbitrary user-supplied sequences; never validated.
pub struct CustomSchedule {
    alpha: Box<dyn Fn(u64) -> f64 + Send + Sync>,
    beta: Box<dyn Fn(u64) -> f64 + Send + Sync>,
    label: String,
}

impl CustomSchedule {
    pub fn new(
        label: impl Into<String>,
        alpha: impl Fn(u64) -> f64 + Send + Sync + 'static,
        beta: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            alpha: Box::new(alpha),
            beta: Box::new(beta),
            label: label.into(),
        }
    }
}

impl StepSizes for CustomSchedule {
    fn alpha(&self, k: u64) -> f64 {
        (self.alpha)(k)
    }

    fn beta(&self, k: u64) -> f64 {
        (self.beta)(k)
    }

    fn describe(&self) -> String {
        format!("custom schedule ({})", self.label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationStatus {
    Accepted,
    Rejected,
    /// Custom schedule; the checks cannot be decided from parameters.
    Unvalidated,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub schedule: String,
    pub status: ValidationStatus,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.status == ValidationStatus::Accepted
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "schedule: {} [{:?}]", self.schedule, self.status)?;
        for c in &self.checks {
            writeln!(
                f,
                "  {} {} ({})",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule_values() {
        let s = make_default(0.9).unwrap();
        assert_eq!(s.alpha(1), 1.0);
        assert_eq!(s.beta(1), 0.9);
        assert!((s.alpha(1) * s.beta(1) - 0.9).abs() < 1e-15);
        // product is constant in k when q = p
        assert!((s.alpha(10) * s.beta(10) - 0.9).abs() < 1e-15);
        let s = make_default(0.5).unwrap();
        assert_eq!(s.alpha(4), 0.25);
        assert_eq!(s.beta(4), 2.0);
    }

    #[test]
    fn default_rejects_nonpositive_xi() {
        assert!(make_default(0.0).is_err());
        assert!(make_default(-1.0).is_err());
    }

    #[test]
    fn validation_accepts_reference_configuration() {
        let s = make_default(0.9).unwrap();
        let report = s.validate(Cocoercivity::Finite(1.0));
        assert!(report.accepted(), "{report}");
    }

    #[test]
    fn validation_rejects_bad_exponent() {
        let s = StepSchedule::new(1.0, 0.4, 0.9, 0.4).unwrap();
        let report = s.validate(Cocoercivity::Finite(1.0));
        assert!(!report.accepted());
        assert!(!report.checks[0].passed, "l2 membership must fail");
    }

    #[test]
    fn validation_rejects_mismatched_exponents() {
        let s = StepSchedule::new(1.0, 1.0, 0.9, 0.8).unwrap();
        let report = s.validate(Cocoercivity::Finite(1.0));
        assert!(!report.accepted());
        assert!(!report.checks[1].passed, "product limit must fail");
    }

    #[test]
    fn validation_rejects_product_at_bound() {
        let s = make_default(1.0).unwrap();
        assert!(!s.validate(Cocoercivity::Finite(1.0)).accepted());
        assert!(s.validate(Cocoercivity::Infinite).accepted());
    }

    #[test]
    fn partial_sums_diverge_for_default() {
        let s = make_default(0.9).unwrap();
        let sum: f64 = (1..=1_000_000u64).map(|k| s.alpha(k)).sum();
        assert!(sum > 10.0, "partial sum {sum}");
    }

    #[test]
    fn custom_schedule_is_unvalidated() {
        let s = CustomSchedule::new("halving", |k| 1.0 / (k as f64), |k| 0.5 * k as f64);
        let report = s.validate(Cocoercivity::Finite(1.0));
        assert_eq!(report.status, ValidationStatus::Unvalidated);
        assert!(!report.accepted());
        assert_eq!(s.alpha(2), 0.5);
        assert_eq!(s.beta(2), 1.0);
    }
}
