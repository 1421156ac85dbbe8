//! Parametric driving scenarios built from closed-form profile primitives.
//!
//! A scenario only prescribes what the driver does (steering and longitudinal
//! acceleration over time); the road is implicit in the steering demand. Every
//! maneuver is designed against a target lateral acceleration so that the same
//! template stays plausible across the whole speed range, and every scenario
//! starts with a gentle weave so that the first seconds carry some lateral
//! excitation.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Reference wheelbase used to turn a target lateral acceleration into a
/// steering angle [m].
const L_REF: f64 = 2.5;
/// Largest steering command a template may issue [rad].
const MAX_STEER_CMD: f64 = 0.45;
/// Nominal speed bounds kept by the acceleration profiles [m/s].
const V_FLOOR: f64 = 4.0;
const V_CEIL: f64 = 42.0;
/// Start of the main maneuver, after the approach weave [s].
const MANEUVER_START: f64 = 3.0;

pub const TRAINING_FRICTIONS: [f64; 3] = [1.0, 0.5, 0.2];
pub const EVAL_FRICTIONS: [f64; 3] = [0.75, 0.35, 0.1];
pub const DEFAULT_DT: f64 = 0.01;

/// One closed-form primitive, active from its segment's start time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// Constant value.
    Hold { value: f64 },
    /// Linear ramp from zero to `to` over `duration`, held afterwards.
    Ramp { duration: f64, to: f64 },
    /// `amplitude * sin(2 pi freq tau)` for `cycles` periods, zero afterwards.
    Sine { amplitude: f64, freq: f64, cycles: f64 },
    /// Sine whose frequency sweeps linearly from `f0` to `f1` over `duration`.
    Chirp {
        amplitude: f64,
        f0: f64,
        f1: f64,
        duration: f64,
    },
    /// Raised-cosine trapezoid.
    Pulse {
        amplitude: f64,
        rise: f64,
        hold: f64,
        fall: f64,
    },
}

impl Shape {
    /// Value at `tau` seconds after the segment start (`tau >= 0`).
    fn value(&self, tau: f64) -> f64 {
        match *self {
            Shape::Hold { value } => value,
            Shape::Ramp { duration, to } => to * (tau / duration).min(1.0),
            Shape::Sine {
                amplitude,
                freq,
                cycles,
            } => {
                if tau * freq <= cycles {
                    amplitude * (TAU * freq * tau).sin()
                } else {
                    0.0
                }
            }
            Shape::Chirp {
                amplitude,
                f0,
                f1,
                duration,
            } => {
                if tau <= duration {
                    let phase = TAU * (f0 * tau + 0.5 * (f1 - f0) / duration * tau * tau);
                    amplitude * phase.sin()
                } else {
                    0.0
                }
            }
            Shape::Pulse {
                amplitude,
                rise,
                hold,
                fall,
            } => {
                let smooth = |x: f64| 0.5 - 0.5 * (PI * x).cos();
                if tau < rise {
                    amplitude * smooth(tau / rise)
                } else if tau < rise + hold {
                    amplitude
                } else if tau < rise + hold + fall {
                    amplitude * smooth(1.0 - (tau - rise - hold) / fall)
                } else {
                    0.0
                }
            }
        }
    }

    /// Time after which the primitive contributes a constant.
    fn end(&self) -> f64 {
        match *self {
            Shape::Hold { .. } => 0.0,
            Shape::Ramp { duration, .. } => duration,
            Shape::Sine { freq, cycles, .. } => cycles / freq,
            Shape::Chirp { duration, .. } => duration,
            Shape::Pulse { rise, hold, fall, .. } => rise + hold + fall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub shape: Shape,
}

/// Piecewise signal: the sum of all segments that have started.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Profile {
    pub segments: Vec<Segment>,
}

impl Profile {
    pub fn value(&self, t: f64) -> f64 {
        self.segments
            .iter()
            .filter(|s| t >= s.start)
            .map(|s| s.shape.value(t - s.start))
            .sum()
    }

    pub fn push(&mut self, start: f64, shape: Shape) {
        self.segments.push(Segment { start, shape });
    }

    /// Time after which the profile is constant.
    pub fn settled_after(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.start + s.shape.end())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    Urban,
    Interurban,
    Longitudinal,
    Lateral,
    Racetrack,
    Mountain,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Urban => "urban",
            ScenarioKind::Interurban => "interurban",
            ScenarioKind::Longitudinal => "longitudinal",
            ScenarioKind::Lateral => "lateral",
            ScenarioKind::Racetrack => "racetrack",
            ScenarioKind::Mountain => "mountain",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fully instantiated driving scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    /// Template the scenario was instantiated from.
    pub template: String,
    pub kind: ScenarioKind,
    pub duration: f64,
    pub dt: f64,
    pub steering: Profile,
    pub accel: Profile,
    pub v0: f64,
    pub mu: f64,
    pub mass_extra: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidScenario(format!("{}: {m}", self.id)));
        if !(self.duration > 0.0) {
            return fail(format!("duration must be positive, got {}", self.duration));
        }
        if !(self.dt > 0.0 && self.dt <= 0.05) {
            return fail(format!("dt must lie in (0, 0.05], got {}", self.dt));
        }
        if !(self.v0 >= 0.0 && self.v0.is_finite()) {
            return fail(format!("v0 must be non-negative, got {}", self.v0));
        }
        if !(self.mu > 0.0 && self.mu <= 1.2) {
            return fail(format!("mu must lie in (0, 1.2], got {}", self.mu));
        }
        if !(self.mass_extra >= 0.0 && self.mass_extra.is_finite()) {
            return fail(format!("mass_extra must be non-negative, got {}", self.mass_extra));
        }
        Ok(())
    }

    /// Number of recorded samples, including `t = 0`.
    pub fn num_steps(&self) -> usize {
        (self.duration / self.dt).round() as usize + 1
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        Self { dt, ..self.clone() }
    }
}

/// A course leg for the road-like templates.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Leg {
    Straight { duration: f64, accel: f64 },
    /// Signed target lateral acceleration, held over `duration`.
    Corner { a_y: f64, duration: f64, accel: f64 },
}

#[derive(Debug, Clone, PartialEq)]
enum Maneuver {
    Course(Vec<Leg>),
    AccelBrake { accel: f64, brake: f64 },
    StopGo { amplitude: f64, freq: f64, cycles: f64 },
    StepSteer { a_y: f64 },
    RampSteer { a_y: f64, ramp: f64 },
    SineSteer { a_y: f64, freq: f64, cycles: f64 },
    Sweep { a_y: f64, f0: f64, f1: f64, duration: f64 },
    DoubleLaneChange { a_y: f64 },
    AccelInTurn { a_y: f64, accel: f64 },
    BrakeInTurn { a_y: f64, brake: f64 },
    Fishhook { a_y: f64 },
}

/// A scenario family: one maneuver instantiated over a speed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTemplate {
    pub id: String,
    pub kind: ScenarioKind,
    /// Initial speeds [km/h].
    pub speeds_kmh: Vec<f64>,
    maneuver: Maneuver,
    /// Seeded jitter: lateral demand scale and start offset of the maneuver.
    gain: f64,
    shift: f64,
}

fn steer_for(a_y: f64, v: f64) -> f64 {
    let v = v.max(V_FLOOR);
    a_y.signum() * (L_REF * a_y.abs() / (v * v)).atan().min(MAX_STEER_CMD)
}

/// Accumulates the two command profiles while tracking the nominal speed
/// implied by the acceleration profile.
struct Builder {
    v0: f64,
    v_floor: f64,
    steering: Profile,
    accel: Profile,
}

impl Builder {
    fn new(v0: f64) -> Self {
        let mut b = Self {
            v0,
            v_floor: (0.4 * v0).max(V_FLOOR),
            steering: Profile::default(),
            accel: Profile::default(),
        };
        // approach weave: one gentle left-right cycle
        let delta = steer_for(1.2, v0);
        b.steering.push(
            0.3,
            Shape::Sine {
                amplitude: delta,
                freq: 0.45,
                cycles: 1.0,
            },
        );
        b
    }

    fn nominal_speed(&self, t: f64) -> f64 {
        const H: f64 = 0.01;
        let n = (t / H).round() as usize;
        let mut v = self.v0;
        for k in 0..n {
            v += H * self.accel.value((k as f64 + 0.5) * H);
        }
        v
    }

    /// Smooth acceleration pulse, scaled down if it would leave the nominal
    /// speed band.
    fn accelerate(&mut self, start: f64, accel: f64, duration: f64) {
        if accel == 0.0 || duration <= 0.0 {
            return;
        }
        let ramp = (0.4f64).min(duration / 3.0);
        let v = self.nominal_speed(start);
        // a raised-cosine trapezoid integrates to amplitude * (hold + ramp)
        let area = duration - ramp;
        let v_end = (v + accel * area).clamp(self.v_floor, V_CEIL);
        let amplitude = (v_end - v) / area;
        if amplitude.abs() < 1e-9 {
            return;
        }
        self.accel.push(
            start,
            Shape::Pulse {
                amplitude,
                rise: ramp,
                hold: duration - 2.0 * ramp,
                fall: ramp,
            },
        );
    }

    fn corner(&mut self, start: f64, a_y: f64, rise: f64, hold: f64, fall: f64) {
        let v = self.nominal_speed(start + rise);
        self.steering.push(
            start,
            Shape::Pulse {
                amplitude: steer_for(a_y, v),
                rise,
                hold,
                fall,
            },
        );
    }

    fn steer(&mut self, start: f64, shape: Shape) {
        self.steering.push(start, shape);
    }
}

impl ScenarioTemplate {
    fn new(id: &str, kind: ScenarioKind, speeds_kmh: &[f64], maneuver: Maneuver) -> Self {
        Self {
            id: id.to_string(),
            kind,
            speeds_kmh: speeds_kmh.to_vec(),
            maneuver,
            gain: 1.0,
            shift: 0.0,
        }
    }

    /// Instantiates the template at initial speed `v0_kmh`.
    pub fn instantiate(&self, v0_kmh: f64, mu: f64, mass_extra: f64, dt: f64) -> Scenario {
        let v0 = v0_kmh / 3.6;
        let mut b = Builder::new(v0);
        let g = self.gain;
        let t0 = MANEUVER_START + self.shift;
        let duration = match self.maneuver {
            Maneuver::Course(ref legs) => {
                let mut t = t0;
                for leg in legs {
                    match *leg {
                        Leg::Straight { duration, accel } => {
                            b.accelerate(t, accel, duration);
                            t += duration;
                        }
                        Leg::Corner { a_y, duration, accel } => {
                            b.accelerate(t, accel, duration);
                            let edge = (duration / 4.0).min(1.2);
                            b.corner(t, g * a_y, edge, duration - 2.0 * edge, edge);
                            t += duration;
                        }
                    }
                }
                t + 2.0
            }
            Maneuver::AccelBrake { accel, brake } => {
                b.accelerate(t0, accel, 4.0);
                b.accelerate(t0 + 7.0, brake, 3.0);
                b.accelerate(t0 + 12.0, 0.5 * accel, 3.0);
                t0 + 17.0
            }
            Maneuver::StopGo {
                amplitude,
                freq,
                cycles,
            } => {
                b.accel.push(
                    t0,
                    Shape::Sine {
                        amplitude: -amplitude,
                        freq,
                        cycles,
                    },
                );
                t0 + cycles / freq + 3.0
            }
            Maneuver::StepSteer { a_y } => {
                b.corner(t0, g * a_y, 0.3, 6.0, 0.6);
                t0 + 9.0
            }
            Maneuver::RampSteer { a_y, ramp } => {
                b.corner(t0, g * a_y, ramp, 1.0, 1.5);
                t0 + ramp + 4.5
            }
            Maneuver::SineSteer { a_y, freq, cycles } => {
                let v = b.nominal_speed(t0);
                b.steer(
                    t0,
                    Shape::Sine {
                        amplitude: steer_for(g * a_y, v),
                        freq,
                        cycles,
                    },
                );
                t0 + cycles / freq + 3.0
            }
            Maneuver::Sweep {
                a_y,
                f0,
                f1,
                duration,
            } => {
                let v = b.nominal_speed(t0);
                b.steer(
                    t0,
                    Shape::Chirp {
                        amplitude: steer_for(g * a_y, v),
                        f0,
                        f1,
                        duration,
                    },
                );
                t0 + duration + 2.0
            }
            Maneuver::DoubleLaneChange { a_y } => {
                let v = b.nominal_speed(t0);
                let delta = steer_for(g * a_y, v);
                let lane_change = Shape::Sine {
                    amplitude: delta,
                    freq: 0.5,
                    cycles: 1.0,
                };
                b.steer(t0, lane_change);
                let back = Shape::Sine {
                    amplitude: -delta,
                    freq: 0.5,
                    cycles: 1.0,
                };
                b.steer(t0 + 3.0, back);
                t0 + 8.0
            }
            Maneuver::AccelInTurn { a_y, accel } => {
                b.corner(t0, g * a_y, 1.0, 8.0, 1.0);
                b.accelerate(t0 + 3.0, accel, 4.0);
                t0 + 12.0
            }
            Maneuver::BrakeInTurn { a_y, brake } => {
                b.corner(t0, g * a_y, 1.0, 7.0, 1.0);
                b.accelerate(t0 + 3.5, brake, 2.5);
                t0 + 11.0
            }
            Maneuver::Fishhook { a_y } => {
                b.corner(t0, g * a_y, 0.4, 1.2, 0.4);
                b.corner(t0 + 2.0, -g * a_y, 0.5, 3.0, 0.8);
                t0 + 9.0
            }
        };
        let duration = (duration / dt).round() * dt;
        Scenario {
            id: format!("{}@{}kmh_mu{}", self.id, v0_kmh, mu),
            template: self.id.clone(),
            kind: self.kind,
            duration,
            dt,
            steering: b.steering,
            accel: b.accel,
            v0,
            mu,
            mass_extra,
        }
    }
}

/// The training and held-out scenario families.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub training: Vec<ScenarioTemplate>,
    pub held_out: Vec<ScenarioTemplate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogSet {
    Training,
    HeldOut,
}

impl Catalog {
    pub fn templates(&self, set: CatalogSet) -> &[ScenarioTemplate] {
        match set {
            CatalogSet::Training => &self.training,
            CatalogSet::HeldOut => &self.held_out,
        }
    }

    /// Every `(template, speed, friction)` combination of one set.
    pub fn instances(&self, set: CatalogSet, frictions: &[f64], mass_extra: f64, dt: f64) -> Vec<Scenario> {
        let mut out = Vec::new();
        for template in self.templates(set) {
            for &mu in frictions {
                for &v in &template.speeds_kmh {
                    out.push(template.instantiate(v, mu, mass_extra, dt));
                }
            }
        }
        out
    }
}

/// Builds the deterministic scenario catalog: 20 training families (2 urban,
/// 2 interurban, 2 longitudinal, 14 lateral) and 7 held-out families (2 urban,
/// 2 interurban, 2 racetrack, 1 mountain pass). The seed jitters the lateral
/// demand and the maneuver start of every family.
pub fn scenario_catalog(seed: u64) -> Catalog {
    use Leg::{Corner, Straight};
    use Maneuver::*;
    use ScenarioKind::*;

    const URBAN: [f64; 4] = [20.0, 30.0, 40.0, 50.0];
    const INTERURBAN: [f64; 4] = [50.0, 65.0, 80.0, 100.0];
    const LONG: [f64; 4] = [30.0, 60.0, 90.0, 120.0];
    const LATERAL: [f64; 4] = [40.0, 65.0, 90.0, 115.0];
    const TRACK: [f64; 4] = [70.0, 85.0, 100.0, 120.0];
    const MOUNTAIN: [f64; 4] = [30.0, 40.0, 55.0, 70.0];

    let t = ScenarioTemplate::new;
    let mut training = vec![
        t(
            "urban_grid",
            Urban,
            &URBAN,
            Course(vec![
                Straight { duration: 3.0, accel: 1.2 },
                Corner { a_y: 3.0, duration: 4.0, accel: -0.5 },
                Straight { duration: 4.0, accel: 1.0 },
                Corner { a_y: -3.0, duration: 4.0, accel: 0.0 },
                Straight { duration: 3.0, accel: -1.5 },
                Corner { a_y: 2.5, duration: 3.5, accel: 0.5 },
            ]),
        ),
        t(
            "urban_winding",
            Urban,
            &URBAN,
            Course(vec![
                Corner { a_y: -2.0, duration: 3.0, accel: 0.8 },
                Corner { a_y: 2.5, duration: 3.0, accel: 0.0 },
                Straight { duration: 2.0, accel: -1.0 },
                Corner { a_y: -3.5, duration: 3.0, accel: 0.0 },
                Corner { a_y: 1.5, duration: 4.0, accel: 1.0 },
                Straight { duration: 3.0, accel: -1.5 },
            ]),
        ),
        t(
            "interurban_curves",
            Interurban,
            &INTERURBAN,
            Course(vec![
                Straight { duration: 4.0, accel: 0.8 },
                Corner { a_y: 2.0, duration: 6.0, accel: 0.0 },
                Straight { duration: 3.0, accel: 0.0 },
                Corner { a_y: -2.8, duration: 6.0, accel: -0.3 },
                Straight { duration: 3.0, accel: 0.6 },
                Corner { a_y: 3.2, duration: 5.0, accel: 0.0 },
            ]),
        ),
        t(
            "interurban_overtake",
            Interurban,
            &INTERURBAN,
            Course(vec![
                Straight { duration: 2.0, accel: 0.0 },
                Corner { a_y: 1.8, duration: 2.0, accel: 1.5 },
                Corner { a_y: -1.8, duration: 2.0, accel: 1.5 },
                Straight { duration: 4.0, accel: 1.0 },
                Corner { a_y: -1.8, duration: 2.0, accel: 0.0 },
                Corner { a_y: 1.8, duration: 2.0, accel: -0.5 },
                Straight { duration: 3.0, accel: -1.0 },
            ]),
        ),
        t("long_accel_brake", Longitudinal, &LONG, AccelBrake { accel: 2.5, brake: -4.0 }),
        t(
            "long_stop_go",
            Longitudinal,
            &LONG,
            StopGo {
                amplitude: 1.5,
                freq: 0.1,
                cycles: 2.0,
            },
        ),
        t("lat_step_steer_mid", Lateral, &LATERAL, StepSteer { a_y: 4.0 }),
        t("lat_step_steer_high", Lateral, &LATERAL, StepSteer { a_y: 7.0 }),
        t("lat_ramp_steer_slow", Lateral, &LATERAL, RampSteer { a_y: 8.0, ramp: 10.0 }),
        t("lat_ramp_steer_fast", Lateral, &LATERAL, RampSteer { a_y: 8.0, ramp: 4.0 }),
        t(
            "lat_sine_05hz",
            Lateral,
            &LATERAL,
            SineSteer {
                a_y: 4.0,
                freq: 0.5,
                cycles: 3.0,
            },
        ),
        t(
            "lat_sine_1hz",
            Lateral,
            &LATERAL,
            SineSteer {
                a_y: 5.0,
                freq: 1.0,
                cycles: 4.0,
            },
        ),
        t(
            "lat_sine_sweep",
            Lateral,
            &LATERAL,
            Sweep {
                a_y: 3.0,
                f0: 0.2,
                f1: 1.5,
                duration: 15.0,
            },
        ),
        t("lat_dlc_moderate", Lateral, &LATERAL, DoubleLaneChange { a_y: 4.0 }),
        t("lat_dlc_severe", Lateral, &LATERAL, DoubleLaneChange { a_y: 7.0 }),
        t(
            "lat_slalom_slow",
            Lateral,
            &LATERAL,
            SineSteer {
                a_y: 5.0,
                freq: 0.4,
                cycles: 4.0,
            },
        ),
        t(
            "lat_slalom_fast",
            Lateral,
            &LATERAL,
            SineSteer {
                a_y: 6.0,
                freq: 0.8,
                cycles: 6.0,
            },
        ),
        t("lat_accel_in_turn", Lateral, &LATERAL, AccelInTurn { a_y: 3.0, accel: 1.5 }),
        t("lat_brake_in_turn", Lateral, &LATERAL, BrakeInTurn { a_y: 4.0, brake: -3.0 }),
        t("lat_fishhook", Lateral, &LATERAL, Fishhook { a_y: 6.0 }),
    ];

    let mut held_out = vec![
        t(
            "heldout_urban_junctions",
            Urban,
            &URBAN,
            Course(vec![
                Straight { duration: 2.5, accel: 1.5 },
                Corner { a_y: -3.2, duration: 3.5, accel: -0.8 },
                Straight { duration: 3.0, accel: 1.2 },
                Corner { a_y: -2.8, duration: 3.5, accel: 0.0 },
                Straight { duration: 2.5, accel: -1.2 },
                Corner { a_y: 3.5, duration: 3.0, accel: 0.3 },
                Straight { duration: 2.0, accel: 0.0 },
            ]),
        ),
        t(
            "heldout_urban_roundabout",
            Urban,
            &URBAN,
            Course(vec![
                Straight { duration: 2.0, accel: -1.0 },
                Corner { a_y: -1.5, duration: 1.5, accel: 0.0 },
                Corner { a_y: 3.0, duration: 5.0, accel: 0.0 },
                Corner { a_y: -1.8, duration: 1.5, accel: 0.8 },
                Straight { duration: 4.0, accel: 1.0 },
            ]),
        ),
        t(
            "heldout_interurban_hills",
            Interurban,
            &INTERURBAN,
            Course(vec![
                Corner { a_y: -2.2, duration: 5.0, accel: 0.5 },
                Straight { duration: 2.0, accel: 0.0 },
                Corner { a_y: 2.6, duration: 5.0, accel: -0.5 },
                Corner { a_y: -1.6, duration: 4.0, accel: 0.0 },
                Straight { duration: 4.0, accel: 0.8 },
                Corner { a_y: 3.0, duration: 4.0, accel: -0.4 },
            ]),
        ),
        t(
            "heldout_interurban_bypass",
            Interurban,
            &INTERURBAN,
            Course(vec![
                Straight { duration: 3.0, accel: 1.0 },
                Corner { a_y: 3.5, duration: 7.0, accel: 0.0 },
                Straight { duration: 2.0, accel: -0.8 },
                Corner { a_y: -2.4, duration: 3.0, accel: 0.0 },
                Corner { a_y: 2.4, duration: 3.0, accel: 0.0 },
                Straight { duration: 3.0, accel: 0.5 },
            ]),
        ),
        t(
            "heldout_racetrack_gp",
            Racetrack,
            &TRACK,
            Course(vec![
                Straight { duration: 4.0, accel: 3.0 },
                Straight { duration: 2.0, accel: -5.0 },
                Corner { a_y: 8.0, duration: 3.0, accel: 0.0 },
                Straight { duration: 3.0, accel: 2.5 },
                Corner { a_y: -6.5, duration: 2.5, accel: 0.0 },
                Corner { a_y: 7.0, duration: 3.0, accel: 1.0 },
                Straight { duration: 5.0, accel: 3.0 },
                Straight { duration: 2.0, accel: -5.5 },
                Corner { a_y: -8.5, duration: 3.5, accel: 0.0 },
                Straight { duration: 3.0, accel: 2.0 },
                Corner { a_y: 6.0, duration: 4.0, accel: 0.0 },
            ]),
        ),
        t(
            "heldout_racetrack_ring",
            Racetrack,
            &TRACK,
            Course(vec![
                Corner { a_y: 5.5, duration: 2.5, accel: 1.5 },
                Corner { a_y: -7.0, duration: 2.0, accel: 0.0 },
                Straight { duration: 3.0, accel: 2.5 },
                Corner { a_y: -6.0, duration: 3.0, accel: -1.5 },
                Corner { a_y: 8.0, duration: 2.5, accel: 0.0 },
                Corner { a_y: -5.0, duration: 2.0, accel: 1.5 },
                Straight { duration: 4.0, accel: 2.5 },
                Straight { duration: 1.5, accel: -6.0 },
                Corner { a_y: 7.5, duration: 3.0, accel: 0.0 },
                Corner { a_y: -4.5, duration: 3.0, accel: 1.5 },
            ]),
        ),
        t(
            "heldout_mountain_pass",
            Mountain,
            &MOUNTAIN,
            Course(vec![
                Corner { a_y: 4.0, duration: 3.0, accel: -1.0 },
                Straight { duration: 2.0, accel: 1.2 },
                Corner { a_y: -4.5, duration: 4.0, accel: -0.8 },
                Straight { duration: 2.0, accel: 1.0 },
                Corner { a_y: 5.0, duration: 4.0, accel: -0.5 },
                Corner { a_y: -3.0, duration: 2.5, accel: 0.5 },
                Straight { duration: 2.0, accel: 0.8 },
                Corner { a_y: -5.0, duration: 4.0, accel: -0.8 },
            ]),
        ),
    ];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for template in training.iter_mut().chain(held_out.iter_mut()) {
        template.gain = rng.random_range(0.9..1.1);
        template.shift = (rng.random_range(0.0..0.5f64) / DEFAULT_DT).round() * DEFAULT_DT;
    }
    Catalog { training, held_out }
}
