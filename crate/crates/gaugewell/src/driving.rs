//! The time-dependent driving field f(t), its running primitive F(t) and the
//! induced displacement ξ(t).
//!
//! Both integrals are anchored so that F(t₀) = 0 and ξ(t₀) = 0: with this
//! convention the gauge map between the two descriptions reduces to the
//! identity at the reference time t₀, and the closed-form trajectory of the
//! driven particle takes its simplest form (see [`crate::classical`]).
//!
//! Constant and cosine drives evaluate in closed form; tabulated drives
//! interpolate piecewise-linearly and integrate with the trapezoid rule on
//! the given samples.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Functional form of the drive.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    /// f(t) = f₀
    Constant { f0: f64 },
    /// f(t) = f₀ cos(ω t)
    Cosine { f0: f64, omega: f64 },
    /// piecewise-linear interpolation of (time, value) samples
    Tabulated { samples: Vec<(f64, f64)> },
}

/// A driving field together with the anchor time t₀ at which F and ξ vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingField {
    kind: FieldKind,
    t0: f64,
    /// cumulative ∫ f and ∫ F at the sample points (tabulated drives only)
    table: Option<TabulatedCache>,
}

#[derive(Debug, Clone, PartialEq)]
struct TabulatedCache {
    /// ∫_{s₀}^{sᵢ} f, trapezoid-exact for piecewise-linear f
    cum_f: Vec<f64>,
    /// ∫_{s₀}^{sᵢ} F with F anchored at the first sample, trapezoid rule
    cum_big_f: Vec<f64>,
}

impl DrivingField {
    pub fn constant(f0: f64, t0: f64) -> Self {
        Self { kind: FieldKind::Constant { f0 }, t0, table: None }
    }

    /// The zero field f ≡ 0.
    pub fn free(t0: f64) -> Self {
        Self::constant(0.0, t0)
    }

    pub fn cosine(f0: f64, omega: f64, t0: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::invalid_argument(format!(
                "cosine drive needs omega > 0, got {omega}"
            )));
        }
        Ok(Self { kind: FieldKind::Cosine { f0, omega }, t0, table: None })
    }

    pub fn tabulated(samples: Vec<(f64, f64)>, t0: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid_argument(
                "tabulated drive needs at least two samples",
            ));
        }
        if samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::invalid_argument(
                "tabulated sample times must be strictly increasing",
            ));
        }
        if samples.iter().any(|(t, f)| !t.is_finite() || !f.is_finite()) {
            return Err(Error::invalid_argument("tabulated samples must be finite"));
        }
        let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
        if t0 < lo || t0 > hi {
            return Err(Error::range(format!(
                "anchor time t0 = {t0} outside tabulated range [{lo}, {hi}]"
            )));
        }
        let mut field = Self { kind: FieldKind::Tabulated { samples }, t0, table: None };
        field.table = Some(field.build_table());
        Ok(field)
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn is_cosine(&self) -> bool {
        matches!(self.kind, FieldKind::Cosine { .. })
    }

    pub fn is_free(&self) -> bool {
        matches!(self.kind, FieldKind::Constant { f0 } if f0 == 0.0)
    }

    /// Check that a time is admissible (always true for smooth kinds).
    pub fn check_time(&self, t: f64) -> Result<()> {
        if let FieldKind::Tabulated { samples } = &self.kind {
            let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
            if t < lo || t > hi {
                return Err(Error::range(format!(
                    "time {t} outside tabulated range [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    /// The dimensionless modulation f(t).
    pub fn modulation(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.f_raw(t))
    }

    /// The anchored primitive F(t) = ∫_{t₀}^{t} f(s) ds.
    pub fn primitive(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.big_f_raw(t))
    }

    /// The induced displacement ξ(t) = −(α/m) ∫_{t₀}^{t} F(s) ds.
    pub fn displacement(&self, t: f64, consts: &PhysicalConstants) -> Result<f64> {
        Ok(-consts.alpha / consts.mass * self.primitive_integral(t)?)
    }

    /// ∫_{t₀}^{t} F(s) ds.
    pub fn primitive_integral(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(match &self.kind {
            FieldKind::Constant { f0 } => {
                let tau = t - self.t0;
                0.5 * f0 * tau * tau
            }
            FieldKind::Cosine { f0, omega } => {
                let (w, tau) = (*omega, t - self.t0);
                let s0 = (w * self.t0).sin();
                f0 / w * (((w * self.t0).cos() - (w * t).cos()) / w - tau * s0)
            }
            FieldKind::Tabulated { .. } => {
                // re-anchor: F = F₀ − F₀(t₀) with F₀ taken from the first sample,
                // so ∫_{t₀}^{t} F = ∫ F₀ − (t−t₀) F₀(t₀)
                self.cum_big_f0_at(t) - self.cum_big_f0_at(self.t0)
                    - (t - self.t0) * self.cum_f_at(self.t0)
            }
        })
    }

    /// ∫_{t₀}^{t} F²(s) ds (enters the commuting-assumption propagator).
    pub fn primitive_squared_integral(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(match &self.kind {
            FieldKind::Constant { f0 } => {
                let tau = t - self.t0;
                f0 * f0 * tau * tau * tau / 3.0
            }
            FieldKind::Cosine { f0, omega } => {
                let (w, tau) = (*omega, t - self.t0);
                let s0 = (w * self.t0).sin();
                let sin2 = |u: f64| (2.0 * w * u).sin();
                let int_sin_sq = 0.5 * tau - (sin2(t) - sin2(self.t0)) / (4.0 * w);
                let int_sin = ((w * self.t0).cos() - (w * t).cos()) / w;
                (f0 / w) * (f0 / w) * (int_sin_sq - 2.0 * s0 * int_sin + tau * s0 * s0)
            }
            FieldKind::Tabulated { samples } => {
                // trapezoid on F² at the sample points plus partial segments
                let big_f = |u: f64| self.big_f_raw(u);
                trapezoid_between(samples, self.t0, t, |u| {
                    let v = big_f(u);
                    v * v
                })
            }
        })
    }

    fn f_raw(&self, t: f64) -> f64 {
        match &self.kind {
            FieldKind::Constant { f0 } => *f0,
            FieldKind::Cosine { f0, omega } => f0 * (omega * t).cos(),
            FieldKind::Tabulated { samples } => {
                let i = segment_index(samples, t);
                let (t1, f1) = samples[i];
                let (t2, f2) = samples[i + 1];
                f1 + (f2 - f1) * (t - t1) / (t2 - t1)
            }
        }
    }

    fn big_f_raw(&self, t: f64) -> f64 {
        match &self.kind {
            FieldKind::Constant { f0 } => f0 * (t - self.t0),
            FieldKind::Cosine { f0, omega } => {
                f0 / omega * ((omega * t).sin() - (omega * self.t0).sin())
            }
            FieldKind::Tabulated { .. } => self.cum_f_at(t) - self.cum_f_at(self.t0),
        }
    }

    // -- tabulated machinery ------------------------------------------------

    fn build_table(&self) -> TabulatedCache {
        let FieldKind::Tabulated { samples } = &self.kind else { unreachable!() };
        let n = samples.len();
        let mut cum_f = vec![0.0; n];
        for i in 1..n {
            let (t1, f1) = samples[i - 1];
            let (t2, f2) = samples[i];
            cum_f[i] = cum_f[i - 1] + 0.5 * (f1 + f2) * (t2 - t1);
        }
        // F relative to the first sample; re-anchoring happens in big_f_raw
        let mut cum_big_f = vec![0.0; n];
        for i in 1..n {
            let (t1, _) = samples[i - 1];
            let (t2, _) = samples[i];
            cum_big_f[i] = cum_big_f[i - 1] + 0.5 * (cum_f[i - 1] + cum_f[i]) * (t2 - t1);
        }
        TabulatedCache { cum_f, cum_big_f }
    }

    /// ∫_{s₀}^{t} f, exact for the piecewise-linear interpolant.
    fn cum_f_at(&self, t: f64) -> f64 {
        let FieldKind::Tabulated { samples } = &self.kind else { unreachable!() };
        let table = self.table.as_ref().expect("tabulated cache");
        let i = segment_index(samples, t);
        let (t1, f1) = samples[i];
        table.cum_f[i] + 0.5 * (f1 + self.f_raw(t)) * (t - t1)
    }

    /// ∫_{s₀}^{t} F₀ where F₀ is anchored at the first sample (trapezoid).
    fn cum_big_f0_at(&self, t: f64) -> f64 {
        let FieldKind::Tabulated { samples } = &self.kind else { unreachable!() };
        let table = self.table.as_ref().expect("tabulated cache");
        let i = segment_index(samples, t);
        let (t1, _) = samples[i];
        table.cum_big_f[i] + 0.5 * (table.cum_f[i] + self.cum_f_at(t)) * (t - t1)
    }

    /// The unimodular gauge phase exp[−(i/ħ) α F(t) x].
    pub fn gauge_phase(&self, t: f64, x: f64, consts: &PhysicalConstants) -> Result<Complex64> {
        let theta = consts.alpha * self.primitive(t)? / consts.hbar;
        Ok(Complex64::new(0.0, -theta * x).exp())
    }
}

fn segment_index(samples: &[(f64, f64)], t: f64) -> usize {
    debug_assert!(t >= samples[0].0 && t <= samples[samples.len() - 1].0);
    let idx = samples.partition_point(|(s, _)| *s <= t);
    idx.clamp(1, samples.len() - 1) - 1
}

/// Trapezoid rule for ∫_{a}^{b} g over the sample grid, with partial end
/// segments. Handles a > b by sign flip.
fn trapezoid_between(samples: &[(f64, f64)], a: f64, b: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut knots: Vec<f64> = vec![lo];
    knots.extend(
        samples
            .iter()
            .map(|(t, _)| *t)
            .filter(|t| *t > lo && *t < hi),
    );
    knots.push(hi);
    let mut acc = 0.0;
    for w in knots.windows(2) {
        acc += 0.5 * (g(w[0]) + g(w[1])) * (w[1] - w[0]);
    }
    sign * acc
}

// -- serialization -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldSpec {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    f0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<(f64, f64)>>,
}

impl Serialize for DrivingField {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let spec = match &self.kind {
            FieldKind::Constant { f0 } => FieldSpec {
                kind: "constant".into(),
                f0: Some(*f0),
                omega: None,
                t0: Some(self.t0),
                samples: None,
            },
            FieldKind::Cosine { f0, omega } => FieldSpec {
                kind: "cosine".into(),
                f0: Some(*f0),
                omega: Some(*omega),
                t0: Some(self.t0),
                samples: None,
            },
            FieldKind::Tabulated { samples } => FieldSpec {
                kind: "tabulated".into(),
                f0: None,
                omega: None,
                t0: Some(self.t0),
                samples: Some(samples.clone()),
            },
        };
        spec.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DrivingField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = FieldSpec::deserialize(deserializer)?;
        let t0 = spec.t0.unwrap_or(0.0);
        let field = match spec.kind.as_str() {
            "constant" => {
                let f0 = spec.f0.ok_or_else(|| D::Error::missing_field("f0"))?;
                if spec.omega.is_some() || spec.samples.is_some() {
                    return Err(D::Error::custom("constant drive takes only f0 and t0"));
                }
                DrivingField::constant(f0, t0)
            }
            "cosine" => {
                let f0 = spec.f0.ok_or_else(|| D::Error::missing_field("f0"))?;
                let omega = spec.omega.ok_or_else(|| D::Error::missing_field("omega"))?;
                if spec.samples.is_some() {
                    return Err(D::Error::custom("cosine drive takes f0, omega and t0"));
                }
                DrivingField::cosine(f0, omega, t0).map_err(D::Error::custom)?
            }
            "tabulated" => {
                let samples =
                    spec.samples.ok_or_else(|| D::Error::missing_field("samples"))?;
                if spec.f0.is_some() || spec.omega.is_some() {
                    return Err(D::Error::custom("tabulated drive takes samples and t0"));
                }
                DrivingField::tabulated(samples, t0).map_err(D::Error::custom)?
            }
            other => {
                return Err(D::Error::custom(format!(
                    "unknown drive kind {other:?}, expected constant|cosine|tabulated"
                )))
            }
        };
        Ok(field)
    }
}
