//! Vehicle parameter sets and their `name = value` text format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Shape coefficients of one magic-formula channel. The peak `D` is not stored
/// here because it is always `mu * F_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagicFormula {
    pub b: f64,
    pub c: f64,
    pub e: f64,
}

/// Longitudinal curve shared by both axles, lateral curve per axle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacejkaCoeffs {
    pub longitudinal: MagicFormula,
    pub lateral_front: MagicFormula,
    pub lateral_rear: MagicFormula,
}

impl Default for PacejkaCoeffs {
    fn default() -> Self {
        let lateral = MagicFormula {
            b: 10.0,
            c: 1.3,
            e: 0.97,
        };
        Self {
            longitudinal: MagicFormula {
                b: 10.0,
                c: 1.9,
                e: 0.97,
            },
            lateral_front: lateral,
            lateral_rear: lateral,
        }
    }
}

/// Physical constants of a single-track vehicle, SI units throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleParams {
    pub id: String,
    /// Mass [kg].
    pub m: f64,
    /// Yaw moment of inertia [kg m^2].
    pub i_z: f64,
    /// Center of gravity to front axle [m].
    pub l_f: f64,
    /// Center of gravity to rear axle [m].
    pub l_r: f64,
    /// Wheelbase [m], always `l_f + l_r`.
    pub l_wb: f64,
    /// Center of gravity height [m].
    pub h_cg: f64,
    /// Specific cornering stiffness, front [1/rad].
    pub c_sf: f64,
    /// Specific cornering stiffness, rear [1/rad].
    pub c_sr: f64,
    pub mu: f64,
    /// Effective tire radius [m].
    pub r_w: f64,
    /// Effective spin inertia of one axle including the driveline [kg m^2].
    pub i_w: f64,
    pub g: f64,
    pub pacejka: PacejkaCoeffs,
    /// Fraction of positive (drive) torque applied at the front axle.
    pub torque_split: f64,
    /// Fraction of negative (brake) torque applied at the front axle.
    pub brake_split: f64,
}

pub const G: f64 = 9.81;

/// The five bundled parameter sets: `(id, file contents)`.
pub const BUNDLED: [(&str, &str); 5] = [
    ("default", include_str!("../../params/default.params")),
    ("small_car", include_str!("../../params/small_car.params")),
    ("suv", include_str!("../../params/suv.params")),
    ("van", include_str!("../../params/van.params")),
    ("sports_car", include_str!("../../params/sports_car.params")),
];

impl Default for VehicleParams {
    fn default() -> Self {
        Self::bundled("default").expect("bundled default parameters are valid")
    }
}

impl VehicleParams {
    /// Loads one of the bundled parameter sets by id.
    pub fn bundled(id: &str) -> Result<Self> {
        let (_, text) = BUNDLED
            .iter()
            .find(|(name, _)| *name == id)
            .ok_or_else(|| Error::InvalidParams(format!("unknown bundled vehicle `{id}`")))?;
        Self::parse(id, text)
    }

    /// All bundled vehicles, default first.
    pub fn all_bundled() -> Vec<Self> {
        BUNDLED
            .iter()
            .map(|(id, text)| Self::parse(id, text).expect("bundled parameters are valid"))
            .collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path)?;
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("vehicle")
            .to_string();
        Self::parse(&id, &text)
    }

    /// Parses the `name = value` format. `#` starts a comment. `l_wb` is
    /// optional; if present it must equal `l_f + l_r`.
    pub fn parse(id: &str, text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `name = value`", lineno + 1))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Parse(format!("line {}: `{}` is not a number", lineno + 1, value.trim()))
            })?;
            values.insert(key.trim().to_string(), value);
        }

        let mut take = |key: &str, default: Option<f64>| -> Result<f64> {
            values
                .remove(key)
                .or(default)
                .ok_or_else(|| Error::InvalidParams(format!("missing parameter `{key}`")))
        };
        let d = PacejkaCoeffs::default();
        let l_f = take("l_f", None)?;
        let l_r = take("l_r", None)?;
        let l_wb = take("l_wb", Some(l_f + l_r))?;
        let params = Self {
            id: id.to_string(),
            m: take("m", None)?,
            i_z: take("i_z", None)?,
            l_f,
            l_r,
            l_wb,
            h_cg: take("h_cg", None)?,
            c_sf: take("c_sf", None)?,
            c_sr: take("c_sr", None)?,
            mu: take("mu", Some(1.0))?,
            r_w: take("r_w", None)?,
            i_w: take("i_w", None)?,
            g: take("g", Some(G))?,
            pacejka: PacejkaCoeffs {
                longitudinal: MagicFormula {
                    b: take("pacejka_long_b", Some(d.longitudinal.b))?,
                    c: take("pacejka_long_c", Some(d.longitudinal.c))?,
                    e: take("pacejka_long_e", Some(d.longitudinal.e))?,
                },
                lateral_front: MagicFormula {
                    b: take("pacejka_lat_b_f", Some(d.lateral_front.b))?,
                    c: take("pacejka_lat_c_f", Some(d.lateral_front.c))?,
                    e: take("pacejka_lat_e_f", Some(d.lateral_front.e))?,
                },
                lateral_rear: MagicFormula {
                    b: take("pacejka_lat_b_r", Some(d.lateral_rear.b))?,
                    c: take("pacejka_lat_c_r", Some(d.lateral_rear.c))?,
                    e: take("pacejka_lat_e_r", Some(d.lateral_rear.e))?,
                },
            },
            torque_split: take("torque_split", Some(0.0))?,
            brake_split: take("brake_split", Some(0.7))?,
        };
        if let Some(key) = values.keys().next() {
            return Err(Error::InvalidParams(format!("unknown parameter `{key}`")));
        }
        params.validate()?;
        Ok(params)
    }

    /// Serializes back to the text format; `parse(to_text())` is lossless.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: f64| {
            let _ = writeln!(out, "{k} = {v:?}");
        };
        put("m", self.m);
        put("i_z", self.i_z);
        put("l_f", self.l_f);
        put("l_r", self.l_r);
        put("l_wb", self.l_wb);
        put("h_cg", self.h_cg);
        put("c_sf", self.c_sf);
        put("c_sr", self.c_sr);
        put("mu", self.mu);
        put("r_w", self.r_w);
        put("i_w", self.i_w);
        put("g", self.g);
        put("pacejka_long_b", self.pacejka.longitudinal.b);
        put("pacejka_long_c", self.pacejka.longitudinal.c);
        put("pacejka_long_e", self.pacejka.longitudinal.e);
        put("pacejka_lat_b_f", self.pacejka.lateral_front.b);
        put("pacejka_lat_c_f", self.pacejka.lateral_front.c);
        put("pacejka_lat_e_f", self.pacejka.lateral_front.e);
        put("pacejka_lat_b_r", self.pacejka.lateral_rear.b);
        put("pacejka_lat_c_r", self.pacejka.lateral_rear.c);
        put("pacejka_lat_e_r", self.pacejka.lateral_rear.e);
        put("torque_split", self.torque_split);
        put("brake_split", self.brake_split);
        out
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        let positive = [
            ("m", self.m),
            ("i_z", self.i_z),
            ("l_f", self.l_f),
            ("l_r", self.l_r),
            ("h_cg", self.h_cg),
            ("r_w", self.r_w),
            ("i_w", self.i_w),
            ("g", self.g),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return fail(format!("{name} must be positive, got {value}"));
            }
        }
        if (self.l_wb - (self.l_f + self.l_r)).abs() > 1e-9 {
            return fail(format!(
                "l_wb = {} differs from l_f + l_r = {}",
                self.l_wb,
                self.l_f + self.l_r
            ));
        }
        if !(self.mu > 0.0 && self.mu <= 1.2) {
            return fail(format!("mu must lie in (0, 1.2], got {}", self.mu));
        }
        for (name, split) in [("torque_split", self.torque_split), ("brake_split", self.brake_split)] {
            if !(0.0..=1.0).contains(&split) {
                return fail(format!("{name} must lie in [0, 1], got {split}"));
            }
        }
        if !(self.c_sf.is_finite() && self.c_sf >= 0.0 && self.c_sr.is_finite() && self.c_sr >= 0.0) {
            return fail("cornering stiffness coefficients must be non-negative".into());
        }
        Ok(())
    }

    /// Same vehicle on a road with friction `mu`.
    pub fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..self.clone() }
    }

    /// Adds a uniformly distributed load: mass grows and the yaw inertia is
    /// rescaled proportionally, the center of gravity height is unchanged.
    pub fn with_extra_mass(&self, extra: f64) -> Self {
        let m = self.m + extra;
        Self {
            m,
            i_z: self.i_z * m / self.m,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_sets_parse_and_validate() {
        let all = VehicleParams::all_bundled();
        assert_eq!(all.len(), 5);
        assert_eq!(all[0].id, "default");
        for p in &all {
            p.validate().unwrap();
            assert!((p.l_wb - p.l_f - p.l_r).abs() <= 1e-9);
        }
    }

    #[test]
    fn text_round_trip() {
        for p in VehicleParams::all_bundled() {
            let back = VehicleParams::parse(&p.id, &p.to_text()).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn rejects_inconsistent_wheelbase() {
        let text = VehicleParams::default().to_text().replace("l_wb = 2.5", "l_wb = 2.6");
        assert!(matches!(
            VehicleParams::parse("x", &text),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn rejects_unknown_and_missing_keys() {
        let text = VehicleParams::default().to_text();
        let extra = format!("{text}wings = 2\n");
        assert!(VehicleParams::parse("x", &extra).is_err());
        let missing: String = text.lines().filter(|l| !l.starts_with("m ")).map(|l| format!("{l}\n")).collect();
        assert!(VehicleParams::parse("x", &missing).is_err());
    }

    #[test]
    fn rejects_out_of_range_friction() {
        let p = VehicleParams::default().with_mu(1.5);
        assert!(p.validate().is_err());
        assert!(VehicleParams::default().with_mu(0.0).validate().is_err());
    }

    #[test]
    fn extra_mass_rescales_inertia() {
        let p = VehicleParams::default();
        let q = p.with_extra_mass(320.0);
        assert_eq!(q.m, p.m + 320.0);
        assert!((q.i_z / q.m - p.i_z / p.m).abs() < 1e-12);
        assert_eq!(q.h_cg, p.h_cg);
    }
}
