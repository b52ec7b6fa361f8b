//! Classical dynamics of the driven particle, on the line and in the box.
//!
//! Interior flights are closed-form in the anchored integrals of the drive
//! (the equation of motion m ẍ = −α f(t) integrates to quadratures), so no
//! ODE stepper is involved for smooth drives; tabulated drives inherit the
//! trapezoid-rule integrals of [`crate::driving`]. Wall reflections are
//! located by sign-bracketing the analytic flight plus a safeguarded Newton
//! refinement, and simply negate the velocity.
//!
//! The gauge tag on a state never influences the motion — it selects which
//! canonical momentum [`canonical_momentum`] reads out. In the scalar-
//! potential gauge the momentum is m·v and reflections negate it; in the
//! vector-potential gauge it is m·v + αF(t) and reflections send it to
//! −p + 2αF(t), which is what makes p² a non-conserved quantity there.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::driving::{DrivingField, FieldKind};
use crate::error::{Error, Result};

/// Which potential carries the field, and hence which canonical momentum the
/// state exposes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// Field in the scalar potential: H = p²/2m + αxf(t), p = m·v.
    #[default]
    Scalar,
    /// Field in the vector potential: H = (p − αF(t))²/2m, p = m·v + αF(t).
    Vector,
}

/// Phase-space point at a time, tagged with the gauge used for momentum
/// read-out. `v` is always the gauge-invariant kinematic velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub x: f64,
    pub v: f64,
    pub t: f64,
    pub gauge: Gauge,
}

impl ClassicalState {
    pub fn new(x: f64, v: f64, t: f64, gauge: Gauge) -> Self {
        Self { x, v, t, gauge }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wall {
    Left,
    Right,
}

impl Wall {
    pub fn position(&self, consts: &PhysicalConstants) -> f64 {
        match self {
            Wall::Left => 0.0,
            Wall::Right => consts.box_length,
        }
    }
}

/// A wall hit: velocity negates, kinetic energy is continuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionEvent {
    pub t_hit: f64,
    pub wall: Wall,
    pub v_in: f64,
    pub v_out: f64,
}

/// Closed-form solution of m ẍ = −α f(t) with data (x₀, v₀) at time `t0`.
///
/// In terms of the anchored integrals, with ξ̇(u) = −(α/m) F(u):
///   x(t) = x₀ + (t−t₀)(v₀ − ξ̇(t₀)) + ξ(t) − ξ(t₀)
///   v(t) = v₀ + ξ̇(t) − ξ̇(t₀)
/// When `t0` is the drive's anchor both ξ terms at t₀ vanish and the
/// solution reduces to x₀ + (t−t₀)v₀ + ξ(t).
pub fn line_solution(
    x0: f64,
    v0: f64,
    t0: f64,
    t: f64,
    field: &DrivingField,
    consts: &PhysicalConstants,
) -> Result<(f64, f64)> {
    let am = consts.alpha / consts.mass;
    let xi_t = field.displacement(t, consts)?;
    let xi_t0 = field.displacement(t0, consts)?;
    let xi_dot_t = -am * field.primitive(t)?;
    let xi_dot_t0 = -am * field.primitive(t0)?;
    let x = x0 + (t - t0) * (v0 - xi_dot_t0) + xi_t - xi_t0;
    let v = v0 + xi_dot_t - xi_dot_t0;
    Ok((x, v))
}

/// Initial velocity for which cosine driving produces a forever-bounded
/// orbit on the line: the secular coefficient of the solution vanishes at
/// v₀ = −(α f₀ / m ω) sin(ω t₀), and the trajectory then stays within
/// 2|α f₀|/(m ω²) of x(t₀).
pub fn bounded_orbit_velocity(
    field: &DrivingField,
    t0: f64,
    consts: &PhysicalConstants,
) -> Result<f64> {
    let FieldKind::Cosine { f0, omega } = field.kind() else {
        return Err(Error::invalid_argument(
            "bounded orbits of this form exist only for cosine driving",
        ));
    };
    Ok(-consts.alpha * f0 / (consts.mass * omega) * (omega * t0).sin())
}

/// Maximum |f| the drive can reach, used to set event-search step sizes.
fn modulation_bound(field: &DrivingField) -> f64 {
    match field.kind() {
        FieldKind::Constant { f0 } => f0.abs(),
        FieldKind::Cosine { f0, .. } => f0.abs(),
        FieldKind::Tabulated { samples } => samples
            .iter()
            .map(|(_, f)| f.abs())
            .fold(0.0, f64::max),
    }
}

/// Conservative step for marching along a flight without skipping a wall
/// crossing pair.
fn march_step(state: &ClassicalState, field: &DrivingField, consts: &PhysicalConstants) -> f64 {
    let lam = consts.box_length;
    let mut h = f64::INFINITY;
    let accel = (consts.alpha * modulation_bound(field) / consts.mass).abs();
    // velocity gained over a full traversal bounds the speed scale
    let v_scale = (state.v * state.v + 2.0 * accel * lam).sqrt().max(1e-12);
    h = h.min(lam / v_scale / 16.0);
    if accel > 0.0 {
        h = h.min((2.0 * lam / accel).sqrt() / 16.0);
    }
    match field.kind() {
        FieldKind::Cosine { omega, .. } => {
            h = h.min(std::f64::consts::TAU / omega / 64.0);
        }
        FieldKind::Tabulated { samples } => {
            let min_gap = samples
                .windows(2)
                .map(|w| w[1].0 - w[0].0)
                .fold(f64::INFINITY, f64::min);
            h = h.min(min_gap);
        }
        FieldKind::Constant { .. } => {}
    }
    h
}

/// Sign of x(t) − wall at a point where it may be exactly zero, resolved
/// through the first nonvanishing derivative (velocity, then acceleration).
fn crossing_sign(g: f64, v: f64, a: f64, scale: f64) -> f64 {
    if g.abs() > 1e-14 * scale {
        return g.signum();
    }
    if v.abs() > 1e-14 {
        return v.signum();
    }
    if a != 0.0 {
        return a.signum();
    }
    0.0
}

/// Earliest wall crossing of the interior flight in (state.t, t_max], if any.
///
/// Brackets a sign change by marching the analytic flight, then refines with
/// Newton safeguarded by bisection to an absolute time tolerance of 1e−12.
pub fn wall_hit_time(
    state: &ClassicalState,
    field: &DrivingField,
    consts: &PhysicalConstants,
    t_max: f64,
) -> Result<Option<ReflectionEvent>> {
    let lam = consts.box_length;
    if state.x < -1e-12 * lam || state.x > lam * (1.0 + 1e-12) {
        return Err(Error::range(format!(
            "flight start x = {} outside the box [0, {lam}]",
            state.x
        )));
    }
    if t_max <= state.t {
        return Ok(None);
    }
    let eval = |t: f64| line_solution(state.x, state.v, state.t, t, field, consts);

    let h = march_step(state, field, consts);
    let accel0 = -consts.alpha / consts.mass * field.modulation(state.t)?;
    let mut t_lo = state.t;
    let (mut x_lo, mut v_lo) = (state.x, state.v);
    let mut signs_lo = [
        crossing_sign(x_lo, v_lo, accel0, lam),
        crossing_sign(x_lo - lam, v_lo, accel0, lam),
    ];
    let max_steps = 200_000_000usize;
    for _ in 0..max_steps {
        if t_lo >= t_max {
            return Ok(None);
        }
        let t_hi = (t_lo + h).min(t_max);
        let (x_hi, v_hi) = eval(t_hi)?;
        let signs_hi = [x_hi.signum(), (x_hi - lam).signum()];

        let mut best: Option<(f64, Wall)> = None;
        for (idx, wall) in [(0usize, Wall::Left), (1usize, Wall::Right)] {
            if signs_lo[idx] * signs_hi[idx] < 0.0 || signs_hi[idx] == 0.0 {
                let wall_x = wall.position(consts);
                let root = refine_crossing(&eval, wall_x, t_lo, t_hi, signs_lo[idx])?;
                if best.map_or(true, |(tb, _)| root < tb) {
                    best = Some((root, wall));
                }
            }
        }
        if let Some((t_hit, wall)) = best {
            let (_, v_in) = eval(t_hit)?;
            return Ok(Some(ReflectionEvent { t_hit, wall, v_in, v_out: -v_in }));
        }
        t_lo = t_hi;
        x_lo = x_hi;
        v_lo = v_hi;
        let _ = (x_lo, v_lo);
        signs_lo = signs_hi;
    }
    Err(Error::numerical(format!(
        "wall search exhausted {max_steps} march steps in [{}, {t_max}]",
        state.t
    )))
}

/// Newton with bisection fallback inside a bracket where x(t) − wall
/// changes sign.
fn refine_crossing(
    eval: &impl Fn(f64) -> Result<(f64, f64)>,
    wall_x: f64,
    mut lo: f64,
    mut hi: f64,
    sign_lo: f64,
) -> Result<f64> {
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        if hi - lo <= 1e-12 {
            return Ok(0.5 * (lo + hi));
        }
        let (x, v) = eval(t)?;
        let g = x - wall_x;
        if g == 0.0 {
            return Ok(t);
        }
        // keep the bracket valid
        if g.signum() == sign_lo {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t - g / v;
        t = if v != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::numerical(format!(
        "wall-crossing refinement did not converge in bracket [{lo}, {hi}]"
    )))
}

/// One flight segment, evaluable anywhere inside its time span.
#[derive(Debug, Clone, Copy)]
struct Flight {
    start: ClassicalState,
    t_end: f64,
}

/// Sampled trajectory plus the reflection events that punctuated it.
#[derive(Debug, Clone)]
pub struct BoxTrajectory {
    pub samples: Vec<ClassicalState>,
    pub events: Vec<ReflectionEvent>,
}

fn collect_flights(
    initial: &ClassicalState,
    field: &DrivingField,
    consts: &PhysicalConstants,
    t_end: f64,
) -> Result<(Vec<Flight>, Vec<ReflectionEvent>)> {
    let lam = consts.box_length;
    if initial.x < 0.0 || initial.x > lam {
        return Err(Error::invalid_argument(format!(
            "initial position {} outside the box [0, {lam}]",
            initial.x
        )));
    }
    let mut flights = Vec::new();
    let mut events = Vec::new();
    let mut current = *initial;
    let mut stall_count = 0usize;
    while current.t < t_end {
        match wall_hit_time(&current, field, consts, t_end)? {
            None => {
                flights.push(Flight { start: current, t_end });
                break;
            }
            Some(ev) => {
                flights.push(Flight { start: current, t_end: ev.t_hit });
                if ev.t_hit - current.t <= 1e-13 * ev.t_hit.abs().max(1.0) {
                    stall_count += 1;
                    if stall_count > 1000 {
                        return Err(Error::numerical(format!(
                            "particle stalled against a wall near t = {}",
                            ev.t_hit
                        )));
                    }
                } else {
                    stall_count = 0;
                }
                current = ClassicalState {
                    x: ev.wall.position(consts),
                    v: ev.v_out,
                    t: ev.t_hit,
                    gauge: current.gauge,
                };
                events.push(ev);
            }
        }
    }
    if flights.is_empty() {
        flights.push(Flight { start: current, t_end });
    }
    Ok((flights, events))
}

fn eval_flight(
    flight: &Flight,
    t: f64,
    field: &DrivingField,
    consts: &PhysicalConstants,
) -> Result<ClassicalState> {
    let (x, v) = line_solution(flight.start.x, flight.start.v, flight.start.t, t, field, consts)?;
    // clamp the roundoff sliver outside the walls
    let x = x.clamp(0.0, consts.box_length);
    Ok(ClassicalState { x, v, t, gauge: flight.start.gauge })
}

/// Event-driven simulation of the boxed particle with `n_samples` uniform
/// sample times across [initial.t, t_end].
///
/// Sample times are honored exactly: each is evaluated on the analytic
/// interior solution of its flight, never interpolated. A sample landing on
/// an event reports the post-reflection state.
pub fn simulate_box(
    initial: &ClassicalState,
    field: &DrivingField,
    consts: &PhysicalConstants,
    t_end: f64,
    n_samples: usize,
) -> Result<BoxTrajectory> {
    if t_end < initial.t {
        return Err(Error::invalid_argument("t_end precedes the initial time"));
    }
    let (flights, events) = collect_flights(initial, field, consts, t_end)?;
    let n_samples = n_samples.max(2);
    let mut samples = Vec::with_capacity(n_samples);
    let span = t_end - initial.t;
    let mut flight_idx = 0usize;
    for k in 0..n_samples {
        let t = initial.t + span * k as f64 / (n_samples - 1) as f64;
        while flight_idx + 1 < flights.len() && flights[flight_idx].t_end < t {
            flight_idx += 1;
        }
        // prefer the later flight when t coincides with an event time
        let mut idx = flight_idx;
        while idx + 1 < flights.len() && flights[idx + 1].start.t <= t {
            idx += 1;
        }
        samples.push(eval_flight(&flights[idx], t, field, consts)?);
    }
    Ok(BoxTrajectory { samples, events })
}

/// Advance a state through any number of reflections to exactly `t_target`.
pub fn advance_to(
    state: &ClassicalState,
    field: &DrivingField,
    consts: &PhysicalConstants,
    t_target: f64,
) -> Result<ClassicalState> {
    if t_target < state.t {
        return Err(Error::invalid_argument("cannot advance backwards in time"));
    }
    let (flights, _) = collect_flights(state, field, consts, t_target)?;
    let last = flights.last().expect("at least one flight");
    eval_flight(last, t_target, field, consts)
}

/// The gauge-dependent canonical momentum of a state.
pub fn canonical_momentum(
    state: &ClassicalState,
    field: &DrivingField,
    consts: &PhysicalConstants,
) -> Result<f64> {
    let kinetic = consts.mass * state.v;
    Ok(match state.gauge {
        Gauge::Scalar => kinetic,
        Gauge::Vector => kinetic + consts.alpha * field.primitive(state.t)?,
    })
}

/// Benettin two-trajectory Lyapunov estimate for the driven box.
///
/// A shadow trajectory offset by `delta0` in position is renormalized back
/// to separation `delta0` after every `renorm_interval`; the estimate is the
/// average logarithmic stretching per unit time. Separations are Euclidean
/// in (x, v).
pub fn lyapunov_estimate(
    initial: &ClassicalState,
    field: &DrivingField,
    consts: &PhysicalConstants,
    horizon: f64,
    renorm_interval: f64,
    delta0: f64,
) -> Result<f64> {
    if !(renorm_interval > 0.0) {
        return Err(Error::invalid_argument("renorm_interval must be positive"));
    }
    let intervals = ((horizon / renorm_interval).floor()) as usize;
    if intervals < 50 {
        return Err(Error::invalid_argument(format!(
            "horizon covers only {intervals} renormalization intervals, need at least 50"
        )));
    }
    if !(delta0 > 0.0) || delta0 >= consts.box_length {
        return Err(Error::invalid_argument("delta0 must be positive and well inside the box"));
    }
    let mut reference = *initial;
    let mut shadow = *initial;
    shadow.x = displace_into_box(initial.x, delta0, consts.box_length);

    let mut log_sum = 0.0;
    for k in 0..intervals {
        let t_next = initial.t + (k + 1) as f64 * renorm_interval;
        reference = advance_to(&reference, field, consts, t_next)?;
        shadow = advance_to(&shadow, field, consts, t_next)?;
        let dx = shadow.x - reference.x;
        let dv = shadow.v - reference.v;
        let dist = (dx * dx + dv * dv).sqrt();
        if dist == 0.0 {
            return Err(Error::numerical(
                "degenerate zero separation after renormalization",
            ));
        }
        log_sum += (dist / delta0).ln();
        // pull the shadow back to separation delta0 along the current offset
        let scale = delta0 / dist;
        shadow.x = reference.x + dx * scale;
        shadow.v = reference.v + dv * scale;
        if shadow.x < 0.0 || shadow.x > consts.box_length {
            shadow.x = displace_into_box(reference.x, delta0.min(dist * scale), consts.box_length);
        }
    }
    Ok(log_sum / (intervals as f64 * renorm_interval))
}

fn displace_into_box(x: f64, delta: f64, lam: f64) -> f64 {
    if x + delta <= lam {
        x + delta
    } else {
        x - delta
    }
}
