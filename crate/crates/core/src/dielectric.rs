//! Even-power polynomial permittivity profiles and their continuation
//! x → −ix.
//!
//! A profile is either given directly as ε(x) = 1 + Σ aₙxⁿ, or in square-root
//! form √ε(x) = 1 + Σ bₙxⁿ. For even n, (−ix)ⁿ = (−1)^{n/2}xⁿ, so the
//! continued permittivity ε_c(x) = ε(−ix) stays real. Profiles are immutable
//! after construction.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples used by [`DielectricProfile::validate`] (plus both endpoints).
pub const VALIDATION_SAMPLES: usize = 1024;

// Slack for comparisons against the bounds 1 and 0; sampled values at x = 0
// hit the bound exactly.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileForm {
    /// Coefficients describe ε(x) − 1.
    Permittivity,
    /// Coefficients describe √ε(x) − 1.
    SqrtPermittivity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DielectricProfile {
    form: ProfileForm,
    coefficients: BTreeMap<u32, f64>,
    width: f64,
    // Dense coefficient vectors (index = exponent, entry 0 = 1) of the
    // polynomial and of its continuation. `continued` is None when an odd
    // exponent makes the continuation complex.
    dense: Vec<f64>,
    continued: Option<Vec<f64>>,
}

impl DielectricProfile {
    /// Builds a profile. Odd exponents are accepted here so that
    /// [`validate`](Self::validate) can report them; exponent zero and
    /// non-finite values are rejected outright.
    pub fn new(
        form: ProfileForm,
        coefficients: impl IntoIterator<Item = (u32, f64)>,
        width: f64,
    ) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::invalid(
                "dielectric",
                format!("barrier width must be positive and finite, got {width}"),
            ));
        }
        let mut map = BTreeMap::new();
        for (n, a) in coefficients {
            if n == 0 {
                return Err(Error::invalid(
                    "dielectric",
                    "exponent 0 would shift ε(0) away from 1",
                ));
            }
            if !a.is_finite() {
                return Err(Error::invalid(
                    "dielectric",
                    format!("coefficient a{n} is not finite"),
                ));
            }
            *map.entry(n).or_insert(0.0) += a;
        }
        let degree = map.keys().next_back().copied().unwrap_or(0) as usize;
        let mut dense = vec![0.0; degree + 1];
        dense[0] = 1.0;
        for (&n, &a) in &map {
            dense[n as usize] = a;
        }
        let continued = if map.keys().all(|n| n % 2 == 0) {
            let mut c = dense.clone();
            for (n, v) in c.iter_mut().enumerate().skip(1) {
                if n % 4 == 2 {
                    *v = -*v;
                }
            }
            Some(c)
        } else {
            None
        };
        Ok(Self {
            form,
            coefficients: map,
            width,
            dense,
            continued,
        })
    }

    pub fn permittivity(
        coefficients: impl IntoIterator<Item = (u32, f64)>,
        width: f64,
    ) -> Result<Self> {
        Self::new(ProfileForm::Permittivity, coefficients, width)
    }

    pub fn sqrt_form(
        coefficients: impl IntoIterator<Item = (u32, f64)>,
        width: f64,
    ) -> Result<Self> {
        Self::new(ProfileForm::SqrtPermittivity, coefficients, width)
    }

    /// ε ≡ 1 over a barrier of the given width.
    pub fn vacuum(width: f64) -> Result<Self> {
        Self::permittivity([], width)
    }

    /// The model √ε(−ix) = 1 − a x², whose tunneling time has the closed
    /// form d/c − a d³/(3c).
    pub fn quadratic_model(a: f64, width: f64) -> Result<Self> {
        Self::sqrt_form([(2, a)], width)
    }

    pub fn form(&self) -> ProfileForm {
        self.form
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, f64> {
        &self.coefficients
    }

    /// Barrier width d.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// Same coefficients over a different width.
    pub fn with_width(&self, width: f64) -> Result<Self> {
        Self::new(self.form, self.coefficients.clone(), width)
    }

    /// ε(x) = 1 + Σ aₙxⁿ (or the square of the sqrt-form polynomial).
    pub fn eval_eps(&self, x: f64) -> f64 {
        let p = horner(&self.dense, x);
        match self.form {
            ProfileForm::Permittivity => p,
            ProfileForm::SqrtPermittivity => p * p,
        }
    }

    /// dε/dx.
    pub fn eval_eps_derivative(&self, x: f64) -> f64 {
        let dp = horner_derivative(&self.dense, x);
        match self.form {
            ProfileForm::Permittivity => dp,
            ProfileForm::SqrtPermittivity => 2.0 * horner(&self.dense, x) * dp,
        }
    }

    fn continued_poly(&self) -> Result<&[f64]> {
        self.continued.as_deref().ok_or_else(|| {
            Error::domain(
                "dielectric",
                "odd exponents make ε(−ix) complex; the continuation is undefined",
            )
        })
    }

    /// μ(x) = √ε_c(x), the continued refractive index.
    pub fn sqrt_continued(&self, x: f64) -> Result<f64> {
        let q = horner(self.continued_poly()?, x);
        let mu = match self.form {
            ProfileForm::Permittivity => {
                if q <= 0.0 {
                    return Err(self.nonpositive(x, q));
                }
                q.sqrt()
            }
            ProfileForm::SqrtPermittivity => {
                if q <= 0.0 {
                    return Err(self.nonpositive(x, q * q));
                }
                q
            }
        };
        Ok(mu)
    }

    /// ε_c(x) = ε(−ix) = 1 + Σ aₙ(−1)^{n/2}xⁿ.
    pub fn eval_eps_continued(&self, x: f64) -> Result<f64> {
        let q = horner(self.continued_poly()?, x);
        match self.form {
            ProfileForm::Permittivity if q <= 0.0 => Err(self.nonpositive(x, q)),
            ProfileForm::Permittivity => Ok(q),
            ProfileForm::SqrtPermittivity if q <= 0.0 => Err(self.nonpositive(x, q * q)),
            ProfileForm::SqrtPermittivity => Ok(q * q),
        }
    }

    fn nonpositive(&self, x: f64, value: f64) -> Error {
        Error::domain(
            "dielectric",
            format!("continued permittivity {value} at x = {x} is not a positive real square"),
        )
    }

    /// κ(x) = (ω/c)·√ε_c(x).
    pub fn kappa(&self, x: f64, omega: f64, c: f64) -> Result<f64> {
        Ok(omega / c * self.sqrt_continued(x)?)
    }

    /// Local wavenumber k(x) = (ω/c)·√ε(x) of the unmapped medium.
    pub fn wavenumber(&self, x: f64, omega: f64, c: f64) -> f64 {
        omega / c * self.eval_eps(x).sqrt()
    }

    /// Whether the continuation is identically 1 (no barrier effect).
    pub fn is_vacuum(&self) -> bool {
        self.coefficients.values().all(|&a| a == 0.0)
    }

    /// Checks the profile invariants on a uniform grid over [0, d].
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (&n, &a) in &self.coefficients {
            if n % 2 == 1 {
                violations.push(Violation {
                    rule: Rule::EvenExponents,
                    x: None,
                    value: a,
                });
            }
        }
        let origin = self.eval_eps(0.0);
        if origin != 1.0 {
            violations.push(Violation {
                rule: Rule::UnitOrigin,
                x: Some(0.0),
                value: origin,
            });
        }
        let step = self.width / VALIDATION_SAMPLES as f64;
        for i in 0..=VALIDATION_SAMPLES {
            let x = if i == VALIDATION_SAMPLES {
                self.width
            } else {
                i as f64 * step
            };
            let eps = self.eval_eps(x);
            if eps < 1.0 - BOUND_SLACK {
                violations.push(Violation {
                    rule: Rule::PermittivityAtLeastOne,
                    x: Some(x),
                    value: eps,
                });
            }
            if let Some(poly) = &self.continued {
                let q = horner(poly, x);
                let (positive, eps_c) = match self.form {
                    ProfileForm::Permittivity => (q > 0.0, q),
                    ProfileForm::SqrtPermittivity => (q > 0.0, q * q),
                };
                if !positive {
                    violations.push(Violation {
                        rule: Rule::ContinuedPositive,
                        x: Some(x),
                        value: eps_c,
                    });
                } else if eps_c > 1.0 + BOUND_SLACK {
                    violations.push(Violation {
                        rule: Rule::ContinuedAtMostOne,
                        x: Some(x),
                        value: eps_c,
                    });
                }
            }
        }
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }
}

impl fmt::Display for DielectricProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.form {
            ProfileForm::Permittivity => "eps",
            ProfileForm::SqrtPermittivity => "sqrt_eps",
        };
        write!(f, "{name}{{")?;
        for (i, (n, a)) in self.coefficients.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "a{n}={a}")?;
        }
        write!(f, "}}, d={}", self.width)
    }
}

fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn horner_derivative(coefficients: &[f64], x: f64) -> f64 {
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (n, &a)| acc * x + n as f64 * a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    EvenExponents,
    UnitOrigin,
    PermittivityAtLeastOne,
    ContinuedPositive,
    ContinuedAtMostOne,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::EvenExponents => "even-exponents",
            Rule::UnitOrigin => "unit-origin",
            Rule::PermittivityAtLeastOne => "permittivity-at-least-one",
            Rule::ContinuedPositive => "continued-positive",
            Rule::ContinuedAtMostOne => "continued-at-most-one",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    /// Offending position; `None` for structural rules.
    pub x: Option<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    /// Converts a failed report into a domain error naming the first violation.
    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::domain(
                "dielectric",
                match v.x {
                    Some(x) => {
                        format!("profile violates {} at x = {x} (value {})", v.rule, v.value)
                    }
                    None => format!("profile violates {} (coefficient {})", v.rule, v.value),
                },
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a2(a: f64) -> DielectricProfile {
        DielectricProfile::permittivity([(2, a)], 1.0).unwrap()
    }

    fn term_sum(profile: &DielectricProfile, x: f64) -> f64 {
        1.0 + profile
            .coefficients()
            .iter()
            .map(|(&n, &a)| a * x.powi(n as i32))
            .sum::<f64>()
    }

    #[test]
    fn eval_eps_examples() {
        assert_eq!(a2(0.1).eval_eps(0.0), 1.0);
        assert!((a2(0.1).eval_eps(1.0) - 1.1).abs() < 1e-15);
        let p = DielectricProfile::permittivity([(2, 0.1), (4, 0.01)], 3.0).unwrap();
        let expected = term_sum(&p, 2.0);
        assert!((expected - 1.56).abs() < 1e-14);
        assert!((p.eval_eps(2.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn eval_eps_continued_examples() {
        assert_eq!(a2(0.1).eval_eps_continued(0.0).unwrap(), 1.0);
        assert!((a2(0.1).eval_eps_continued(1.0).unwrap() - 0.9).abs() < 1e-15);
        let p = DielectricProfile::permittivity([(2, 0.2), (4, 0.01)], 1.0).unwrap();
        assert!((p.eval_eps_continued(1.0).unwrap() - 0.81).abs() < 1e-15);
    }

    #[test]
    fn continued_domain_error() {
        assert!(matches!(
            a2(2.0).eval_eps_continued(1.0),
            Err(Error::Domain { .. })
        ));
        let odd = DielectricProfile::permittivity([(3, 0.1)], 1.0).unwrap();
        assert!(odd.eval_eps_continued(0.5).is_err());
    }

    #[test]
    fn validate_examples() {
        assert!(a2(0.1).validate().ok);

        let bad = a2(2.0).validate();
        assert!(!bad.ok);
        let at_end = bad
            .violations
            .iter()
            .find(|v| v.rule == Rule::ContinuedPositive && v.x == Some(1.0))
            .expect("violation at x = d");
        assert!((at_end.value + 1.0).abs() < 1e-12);

        let odd = DielectricProfile::permittivity([(3, 0.1)], 1.0)
            .unwrap()
            .validate();
        assert!(odd.has(Rule::EvenExponents));
        assert!(odd.into_result().is_err());
    }

    #[test]
    fn validate_flags_continuation_above_one() {
        // a4 alone raises ε_c above 1.
        let p = DielectricProfile::permittivity([(4, 0.1)], 1.0).unwrap();
        assert!(p.validate().has(Rule::ContinuedAtMostOne));
        // a negative a2 makes ε < 1.
        let p = DielectricProfile::permittivity([(2, -0.1)], 1.0).unwrap();
        assert!(p.validate().has(Rule::PermittivityAtLeastOne));
    }

    #[test]
    fn constructor_rejections() {
        assert!(DielectricProfile::vacuum(0.0).is_err());
        assert!(DielectricProfile::permittivity([(0, 0.1)], 1.0).is_err());
        assert!(DielectricProfile::permittivity([(2, f64::NAN)], 1.0).is_err());
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(a2(0.1).kappa(0.0, 1.0, 1.0).unwrap(), 1.0);
        assert!((a2(0.1).kappa(1.0, 1.0, 1.0).unwrap() - 0.9f64.sqrt()).abs() < 1e-15);
        assert!((0.9f64.sqrt() - 0.948683).abs() < 1e-6);
        let vac = DielectricProfile::vacuum(5.0).unwrap();
        for x in [0.0, 1.3, 4.9] {
            assert_eq!(vac.kappa(x, 2.0, 1.0).unwrap(), 2.0);
        }
    }

    #[test]
    fn sqrt_form_squares_the_polynomial() {
        let p = DielectricProfile::quadratic_model(0.1, 1.0).unwrap();
        assert!((p.sqrt_continued(1.0).unwrap() - 0.9).abs() < 1e-15);
        assert!((p.eval_eps_continued(1.0).unwrap() - 0.81).abs() < 1e-15);
        assert!((p.eval_eps(1.0) - 1.21).abs() < 1e-15);
        assert!(p.validate().ok);
        assert!(
            !DielectricProfile::quadratic_model(1.0, 1.0)
                .unwrap()
                .validate()
                .ok
        );
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = DielectricProfile::permittivity([(2, 0.1), (4, 0.02), (6, 0.003)], 2.0).unwrap();
        let q = DielectricProfile::sqrt_form([(2, 0.1), (4, 0.02)], 2.0).unwrap();
        let h = 1e-5;
        for x in [0.0, 0.3, 1.0, 1.7] {
            for prof in [&p, &q] {
                let fd = (prof.eval_eps(x + h) - prof.eval_eps(x - h)) / (2.0 * h);
                assert!((fd - prof.eval_eps_derivative(x)).abs() < 1e-8);
            }
        }
    }

    fn even_profile() -> impl Strategy<Value = (Vec<(u32, f64)>, f64)> {
        (
            prop::collection::vec((1u32..=4, -0.5f64..0.5), 1..4),
            0.0f64..3.0,
        )
            .prop_map(|(terms, x)| (terms.into_iter().map(|(k, a)| (2 * k, a)).collect(), x))
    }

    proptest! {
        #[test]
        fn continuation_is_real_under_complex_arithmetic((terms, x) in even_profile()) {
            use num_complex::Complex64;
            let p = DielectricProfile::permittivity(terms.clone(), 3.0).unwrap();
            let z = Complex64::new(0.0, -x);
            let mut sum = Complex64::new(1.0, 0.0);
            for (&n, &a) in p.coefficients() {
                sum += a * z.powu(n);
            }
            prop_assert_eq!(sum.im, 0.0);
            if let Ok(eps_c) = p.eval_eps_continued(x) {
                prop_assert!((eps_c - sum.re).abs() <= 1e-12 * sum.re.abs().max(1.0));
            }
        }

        #[test]
        fn pure_a2_continuation_mirrors_eps(a in -0.5f64..0.5, x in 0.0f64..1.0) {
            let p = DielectricProfile::permittivity([(2, a)], 1.0).unwrap();
            let sum = p.eval_eps(x) + horner(p.continued.as_ref().unwrap(), x);
            prop_assert!((sum - 2.0).abs() < 1e-14);
        }

        #[test]
        fn kappa_nonincreasing_for_single_positive_term(k in 1u32..=3, a in 0.001f64..0.4) {
            let n = if k == 2 { 6 } else { 4 * k - 2 };
            let p = DielectricProfile::permittivity([(n, a)], 1.0).unwrap();
            prop_assume!(p.validate().ok);
            let mut prev = f64::INFINITY;
            for i in 0..=200 {
                let kap = p.kappa(i as f64 / 200.0, 1.0, 1.0).unwrap();
                prop_assert!(kap <= prev);
                prev = kap;
            }
        }

        #[test]
        fn valid_profiles_never_fail_continuation((terms, _x) in even_profile(), d in 0.1f64..2.0) {
            let p = DielectricProfile::permittivity(terms, d).unwrap();
            if p.validate().ok {
                for i in 0..=4000 {
                    prop_assert!(p.eval_eps_continued(d * i as f64 / 4000.0).is_ok());
                }
            }
        }
    }
}
