//! Standardized innovation distributions: normal, skew-normal and Student-t,
//! each re-centered and re-scaled to mean 0 and variance 1 so that all scale
//! lives in the GARCH recursion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.5066282746310002;
const FRAC_2_PI: f64 = std::f64::consts::FRAC_2_PI; // 2/pi

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnovationFamily {
    Normal,
    SkewNormal,
    StudentT,
}

/// A standardized innovation distribution. Location and scale are derived
/// from the shape parameters, never free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistSpec", into = "DistSpec")]
pub struct InnovationDist {
    family: InnovationFamily,
    /// Skew-normal slant; 0 for the other families.
    shape: f64,
    /// Student-t degrees of freedom; unused otherwise.
    dof: f64,
}

/// JSON wire form: {"family": ..., "shape": number?, "dof": number?}.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct DistSpec {
    family: InnovationFamily,
    #[serde(skip_serializing_if = "Option::is_none")]
    shape: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dof: Option<f64>,
}

impl TryFrom<DistSpec> for InnovationDist {
    type Error = Error;
    fn try_from(s: DistSpec) -> Result<Self> {
        match s.family {
            InnovationFamily::Normal => Ok(InnovationDist::normal()),
            InnovationFamily::SkewNormal => Ok(InnovationDist::skew_normal(s.shape.unwrap_or(0.0))?),
            InnovationFamily::StudentT => {
                let dof = s
                    .dof
                    .ok_or_else(|| Error::InvalidDistribution("student_t requires dof".into()))?;
                InnovationDist::student_t(dof)
            }
        }
    }
}

impl From<InnovationDist> for DistSpec {
    fn from(d: InnovationDist) -> Self {
        DistSpec {
            family: d.family,
            shape: (d.family == InnovationFamily::SkewNormal).then_some(d.shape),
            dof: (d.family == InnovationFamily::StudentT).then_some(d.dof),
        }
    }
}

/// Derived skew-normal constants for slant `alpha`: delta, scale omega and
/// location eps such that the standardized density has mean 0, variance 1.
fn skew_constants(alpha: f64) -> (f64, f64, f64) {
    let delta = alpha / (1.0 + alpha * alpha).sqrt();
    let omega = 1.0 / (1.0 - FRAC_2_PI * delta * delta).sqrt();
    let eps = -omega * delta * FRAC_2_PI.sqrt();
    (delta, omega, eps)
}

/// ln Phi(x) with an asymptotic expansion in the far left tail where the
/// direct CDF underflows.
fn norm_log_cdf(x: f64) -> f64 {
    if x > -10.0 {
        let n = Normal::new(0.0, 1.0).unwrap();
        n.cdf(x).ln()
    } else {
        let x2 = x * x;
        -0.5 * x2 - (-x).ln() - SQRT_2PI.ln() + (1.0 - 1.0 / x2 + 3.0 / (x2 * x2)).ln()
    }
}

/// Owen's T function T(h, a) by adaptive Simpson quadrature on
/// (1/2pi) * exp(-h^2 (1+t^2)/2) / (1+t^2) over [0, a].
fn owens_t(h: f64, a: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if a < 0.0 {
        return -owens_t(h, -a);
    }
    let f = |t: f64| (-0.5 * h * h * (1.0 + t * t)).exp() / (1.0 + t * t);
    fn simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, flo: f64, fmid: f64, fhi: f64, whole: f64, depth: u32) -> f64 {
        let mid = 0.5 * (lo + hi);
        let lm = 0.5 * (lo + mid);
        let rm = 0.5 * (mid + hi);
        let flm = f(lm);
        let frm = f(rm);
        let left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        let right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() < 1e-13 {
            left + right + delta / 15.0
        } else {
            simpson(f, lo, mid, flo, flm, fmid, left, depth - 1)
                + simpson(f, mid, hi, fmid, frm, fhi, right, depth - 1)
        }
    }
    let mid = 0.5 * a;
    let (flo, fmid, fhi) = (f(0.0), f(mid), f(a));
    let whole = a / 6.0 * (flo + 4.0 * fmid + fhi);
    simpson(&f, 0.0, a, flo, fmid, fhi, whole, 40) / (2.0 * std::f64::consts::PI)
}

impl InnovationDist {
    pub fn normal() -> Self {
        Self {
            family: InnovationFamily::Normal,
            shape: 0.0,
            dof: 0.0,
        }
    }

    pub fn skew_normal(shape: f64) -> Result<Self> {
        if !shape.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "skew-normal shape must be finite, got {shape}"
            )));
        }
        Ok(Self {
            family: InnovationFamily::SkewNormal,
            shape,
            dof: 0.0,
        })
    }

    pub fn student_t(dof: f64) -> Result<Self> {
        if !(dof > 2.0) || !dof.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "student-t dof must exceed 2, got {dof}"
            )));
        }
        Ok(Self {
            family: InnovationFamily::StudentT,
            shape: 0.0,
            dof,
        })
    }

    /// Builds a distribution from a family tag and an optional shape value
    /// (slant for skew-normal, dof for Student-t).
    pub fn from_family(family: InnovationFamily, shape: Option<f64>) -> Result<Self> {
        match family {
            InnovationFamily::Normal => Ok(Self::normal()),
            InnovationFamily::SkewNormal => Self::skew_normal(shape.unwrap_or(0.0)),
            InnovationFamily::StudentT => Self::student_t(shape.unwrap_or(8.0)),
        }
    }

    pub fn family(&self) -> InnovationFamily {
        self.family
    }

    /// The free shape value of the family, if any (slant or dof).
    pub fn shape_value(&self) -> Option<f64> {
        match self.family {
            InnovationFamily::Normal => None,
            InnovationFamily::SkewNormal => Some(self.shape),
            InnovationFamily::StudentT => Some(self.dof),
        }
    }

    pub fn log_density(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFiniteArgument(x));
        }
        Ok(match self.family {
            InnovationFamily::Normal => -0.5 * x * x - SQRT_2PI.ln(),
            InnovationFamily::SkewNormal => {
                let (_, omega, eps) = skew_constants(self.shape);
                let z = (x - eps) / omega;
                std::f64::consts::LN_2 - omega.ln() - 0.5 * z * z - SQRT_2PI.ln()
                    + norm_log_cdf(self.shape * z)
            }
            InnovationFamily::StudentT => {
                let nu = self.dof;
                ln_gamma(0.5 * (nu + 1.0))
                    - ln_gamma(0.5 * nu)
                    - 0.5 * (std::f64::consts::PI * (nu - 2.0)).ln()
                    - 0.5 * (nu + 1.0) * (1.0 + x * x / (nu - 2.0)).ln()
            }
        })
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(self.log_density(x)?.exp())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.family {
            InnovationFamily::Normal => Normal::new(0.0, 1.0).unwrap().cdf(x),
            InnovationFamily::SkewNormal => {
                let (_, omega, eps) = skew_constants(self.shape);
                let z = (x - eps) / omega;
                let phi = Normal::new(0.0, 1.0).unwrap().cdf(z);
                (phi - 2.0 * owens_t(z, self.shape)).clamp(0.0, 1.0)
            }
            InnovationFamily::StudentT => {
                let scale = (self.dof / (self.dof - 2.0)).sqrt();
                StudentsT::new(0.0, 1.0, self.dof).unwrap().cdf(x * scale)
            }
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        Ok(match self.family {
            InnovationFamily::Normal => Normal::new(0.0, 1.0).unwrap().inverse_cdf(p),
            InnovationFamily::StudentT => {
                let scale = (self.dof / (self.dof - 2.0)).sqrt();
                StudentsT::new(0.0, 1.0, self.dof).unwrap().inverse_cdf(p) / scale
            }
            InnovationFamily::SkewNormal => {
                // No closed form: bisection on the numeric CDF.
                let (mut lo, mut hi) = (-40.0f64, 40.0f64);
                while hi - lo > 1e-10 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        })
    }

    /// Deterministic sampling for a fixed seed.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, n)
    }

    pub fn sample_with<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self.family {
            InnovationFamily::Normal => rng.sample(StandardNormal),
            InnovationFamily::SkewNormal => {
                // Two-normal representation, then standardize.
                let (delta, _, _) = skew_constants(self.shape);
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                let raw = delta * z1.abs() + (1.0 - delta * delta).sqrt() * z2;
                let mean = delta * FRAC_2_PI.sqrt();
                (raw - mean) / (1.0 - FRAC_2_PI * delta * delta).sqrt()
            }
            InnovationFamily::StudentT => {
                let t: f64 = rng.sample(rand_distr::StudentT::new(self.dof).unwrap());
                t * ((self.dof - 2.0) / self.dof).sqrt()
            }
        }
    }
}
