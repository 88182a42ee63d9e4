//! Scalar time-dependent coefficients of the form `c0 + Σ a_k cos(ω_k t + φ_k)`.

use serde::{Deserialize, Deserializer, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub amplitude: f64,
    pub angular_frequency: f64,
    pub phase: f64,
}

// Harmonics travel as `[amplitude, omega, phase]` triples in JSON.
mod harmonic_triples {
    use super::Harmonic;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(h: &[Harmonic], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[f64; 3]> = h
            .iter()
            .map(|h| [h.amplitude, h.angular_frequency, h.phase])
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Harmonic>, D::Error> {
        let v: Vec<[f64; 3]> = Vec::deserialize(d)?;
        Ok(v
            .into_iter()
            .map(|[a, w, p]| Harmonic {
                amplitude: a,
                angular_frequency: w,
                phase: p,
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct CoefficientFunction {
    #[serde(rename = "const")]
    pub constant: f64,
    #[serde(with = "harmonic_triples", skip_serializing_if = "Vec::is_empty")]
    pub harmonics: Vec<Harmonic>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientObject {
    #[serde(rename = "const", default)]
    constant: f64,
    #[serde(with = "harmonic_triples", default)]
    harmonics: Vec<Harmonic>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoefficientRepr {
    Number(f64),
    Object(CoefficientObject),
}

// A bare number is accepted as shorthand for `{"const": x}`.
impl<'de> Deserialize<'de> for CoefficientFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match CoefficientRepr::deserialize(d)? {
            CoefficientRepr::Number(x) => CoefficientFunction::constant(x),
            CoefficientRepr::Object(o) => CoefficientFunction {
                constant: o.constant,
                harmonics: o.harmonics,
            },
        })
    }
}

impl From<f64> for CoefficientFunction {
    fn from(x: f64) -> Self {
        Self::constant(x)
    }
}

impl CoefficientFunction {
    pub fn constant(x: f64) -> Self {
        Self {
            constant: x,
            harmonics: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn with_harmonic(mut self, amplitude: f64, angular_frequency: f64, phase: f64) -> Self {
        self.harmonics.push(Harmonic {
            amplitude,
            angular_frequency,
            phase,
        });
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.harmonics.iter().fold(self.constant, |acc, h| {
            acc + h.amplitude * (h.angular_frequency * t + h.phase).cos()
        })
    }

    pub fn is_constant(&self) -> bool {
        self.harmonics
            .iter()
            .all(|h| h.amplitude == 0.0 || h.angular_frequency == 0.0)
    }

    /// True when the coefficient is zero for every t.
    pub fn is_identically_zero(&self) -> bool {
        let dc: f64 = self.constant
            + self
                .harmonics
                .iter()
                .filter(|h| h.angular_frequency == 0.0)
                .map(|h| h.amplitude * h.phase.cos())
                .sum::<f64>();
        dc == 0.0
            && self
                .harmonics
                .iter()
                .all(|h| h.angular_frequency == 0.0 || h.amplitude == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.constant.is_finite()
            && self.harmonics.iter().all(|h| {
                h.amplitude.is_finite() && h.angular_frequency.is_finite() && h.phase.is_finite()
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_harmonics() {
        let f = CoefficientFunction::constant(1.0).with_harmonic(0.5, 2.0, 0.0);
        assert!((f.eval(std::f64::consts::FRAC_PI_2) - 0.5).abs() < 1e-15);
        assert_eq!(f.eval(0.0), 1.5);
    }

    #[test]
    fn json_shapes() {
        let f: CoefficientFunction = serde_json::from_str("2.5").unwrap();
        assert_eq!(f, CoefficientFunction::constant(2.5));
        let g: CoefficientFunction =
            serde_json::from_str(r#"{"const": 1, "harmonics": [[0.5, 1, 0]]}"#).unwrap();
        assert_eq!(g.harmonics.len(), 1);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"const":1.0,"harmonics":[[0.5,1.0,0.0]]}"#);
        assert!(serde_json::from_str::<CoefficientFunction>(r#"{"cnst": 1}"#).is_err());
    }

    #[test]
    fn zero_detection() {
        assert!(CoefficientFunction::zero().is_identically_zero());
        assert!(!CoefficientFunction::zero()
            .with_harmonic(1.0, 1.0, 0.0)
            .is_identically_zero());
    }
}
