//! JSON instance format.

use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{AngleAssignment, ExactAngles};
use crate::topology::Triangulation;

/// Raw instance as read from disk. Edge `i` of the triangulation is the
/// `i`-th entry of `gluings`; `alpha` is indexed the same way.
///
/// Angles can be given as plain numbers (`alpha`, `cone_angle`) or as
/// rational multiples of π written as strings such as `"1/3"`
/// (`alpha_pi`, `cone_angle_pi`). The latter enables exact mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawInstance {
    pub faces: Vec<[u32; 3]>,
    pub gluings: Vec<[(usize, u8); 2]>,
    pub meridian: Vec<(usize, u8, u8)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_pi: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_angle_pi: Option<String>,
}

impl RawInstance {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Canonical serialization (fixed field order, two-space indentation,
    /// trailing newline).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes") + "\n"
    }

    pub fn triangulation(&self) -> Result<Triangulation> {
        Triangulation::from_raw(self)
    }

    /// Angle data carried by the instance. Exact fields take precedence and
    /// also fill in the numeric values.
    pub fn angles(&self) -> Result<AngleAssignment> {
        let n = self.gluings.len();
        if let Some(ap) = &self.alpha_pi {
            let alpha_pi = ap.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
            let k = match &self.cone_angle_pi {
                Some(s) => parse_rational(s)?,
                None => {
                    return Err(Error::InvalidAngle("alpha_pi given without cone_angle_pi".into()));
                }
            };
            if alpha_pi.len() != n {
                return Err(Error::InvalidAngle(format!("expected {n} edge angles, got {}", alpha_pi.len())));
            }
            return AngleAssignment::exact(ExactAngles { alpha_pi, cone_angle_pi: k });
        }
        match (&self.alpha, self.cone_angle) {
            (Some(a), Some(k)) => {
                if a.len() != n {
                    return Err(Error::InvalidAngle(format!("expected {n} edge angles, got {}", a.len())));
                }
                AngleAssignment::new(a.clone(), k)
            }
            _ => Err(Error::InvalidAngle("instance carries no angle data".into())),
        }
    }

    pub fn with_angles(mut self, a: &AngleAssignment) -> Self {
        self.alpha = Some(a.alpha.clone());
        self.cone_angle = Some(a.cone_angle);
        match &a.exact {
            Some(ex) => {
                self.alpha_pi = Some(ex.alpha_pi.iter().map(|q| q.to_string()).collect());
                self.cone_angle_pi = Some(ex.cone_angle_pi.to_string());
            }
            None => {
                self.alpha_pi = None;
                self.cone_angle_pi = None;
            }
        }
        self
    }

    /// The same surface with every face orientation reversed. The meridian
    /// keeps its route, so its holonomy functional changes sign.
    pub fn mirrored(&self) -> Self {
        let sw = |s: u8| match s {
            0 => 0,
            1 => 2,
            _ => 1,
        };
        let mut out = self.clone();
        out.faces = self.faces.iter().map(|f| [f[0], f[2], f[1]]).collect();
        out.gluings = self.gluings.iter().map(|[a, b]| [(a.0, sw(a.1)), (b.0, sw(b.1))]).collect();
        out.meridian = self.meridian.iter().map(|&(f, a, b)| (f, sw(a), sw(b))).collect();
        out
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidAngle(format!("cannot parse rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = n.trim().parse().map_err(|_| bad())?;
            let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == num_bigint::BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}
