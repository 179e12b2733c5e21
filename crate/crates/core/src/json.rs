//! Wire formats shared by every module and the CLI: polynomials, families,
//! loops, groups. Exact rationals travel as "p/q" strings, complex numbers
//! as [re, im] pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monodromy::{Loop, ParamFamily};
use crate::perm::Permutation;
use crate::poly::Polynomial;
use crate::scalar::{rat_from_str, rat_to_string, Rat};

/// `{"kind":"rational","coeffs":["-1/1","0/1","1/1"]}` or
/// `{"kind":"complex","coeffs":[[re,im],...]}`, lowest degree first.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PolyJson {
    Rational { coeffs: Vec<String> },
    Complex { coeffs: Vec<(f64, f64)> },
}

/// A polynomial over either scalar domain.
#[derive(Debug, Clone, PartialEq)]
pub enum PolyData {
    Rational(Polynomial<Rat>),
    Complex(Polynomial<Complex64>),
}

impl PolyData {
    pub fn to_complex(&self) -> Polynomial<Complex64> {
        match self {
            PolyData::Rational(p) => p.to_complex(),
            PolyData::Complex(p) => p.clone(),
        }
    }

    pub fn to_json(&self) -> PolyJson {
        match self {
            PolyData::Rational(p) => PolyJson::Rational {
                coeffs: p.coeffs().iter().map(rat_to_string).collect(),
            },
            PolyData::Complex(p) => PolyJson::Complex {
                coeffs: p.coeffs().iter().map(|c| (c.re, c.im)).collect(),
            },
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<PolyData> {
        match j {
            PolyJson::Rational { coeffs } => {
                let cs: Vec<Rat> = coeffs
                    .iter()
                    .map(|s| rat_from_str(s))
                    .collect::<Result<_>>()?;
                Ok(PolyData::Rational(Polynomial::new(cs)))
            }
            PolyJson::Complex { coeffs } => {
                let cs: Vec<Complex64> = coeffs
                    .iter()
                    .map(|&(re, im)| Complex64::new(re, im))
                    .collect();
                Ok(PolyData::Complex(Polynomial::new(cs)))
            }
        }
    }
}

pub fn complex_poly_json(p: &Polynomial<Complex64>) -> PolyJson {
    PolyData::Complex(p.clone()).to_json()
}

/// `{"n":5,"m":5,"coeffs":[[c_j0, ..., c_jm], ...]}`, one row per
/// coefficient of the monic family (descending degree), entries [re,im].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyJson {
    pub n: usize,
    pub m: usize,
    pub coeffs: Vec<Vec<(f64, f64)>>,
}

impl FamilyJson {
    pub fn to_family(&self) -> Result<ParamFamily> {
        let rows = self
            .coeffs
            .iter()
            .map(|row| row.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
            .collect();
        ParamFamily::new(self.n, self.m, rows)
    }

    pub fn from_family(f: &ParamFamily) -> FamilyJson {
        FamilyJson {
            n: f.n(),
            m: f.m(),
            coeffs: f
                .rows()
                .iter()
                .map(|row| row.iter().map(|c| (c.re, c.im)).collect())
                .collect(),
        }
    }
}

/// `{"basepoint":[[re,im],...],"waypoints":[[[re,im],...],...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoopJson {
    pub basepoint: Vec<(f64, f64)>,
    pub waypoints: Vec<Vec<(f64, f64)>>,
}

impl LoopJson {
    pub fn to_loop(&self) -> Result<Loop> {
        let to_vec = |w: &Vec<(f64, f64)>| -> Vec<Complex64> {
            w.iter().map(|&(re, im)| Complex64::new(re, im)).collect()
        };
        let waypoints: Vec<Vec<Complex64>> = self.waypoints.iter().map(to_vec).collect();
        let lp = Loop::new(waypoints)?;
        if lp.basepoint() != to_vec(&self.basepoint).as_slice() {
            return Err(Error::invalid("basepoint must equal the first waypoint"));
        }
        Ok(lp)
    }

    pub fn from_loop(lp: &Loop) -> LoopJson {
        let from_vec = |w: &[Complex64]| -> Vec<(f64, f64)> {
            w.iter().map(|c| (c.re, c.im)).collect()
        };
        LoopJson {
            basepoint: from_vec(lp.basepoint()),
            waypoints: lp.waypoints().iter().map(|w| from_vec(w)).collect(),
        }
    }
}

/// `{"n":5,"generators":["(1 2)","(1 2 3 4 5)"]}`, 1-based cycle strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupJson {
    pub n: usize,
    pub generators: Vec<String>,
}

impl GroupJson {
    pub fn to_generators(&self) -> Result<Vec<Permutation>> {
        self.generators
            .iter()
            .map(|s| Permutation::parse(s, self.n))
            .collect()
    }
}

/// Parses "a+bi" style complex literals: "2", "-1.5i", "1+2i", "3.1e-2-4i".
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::invalid("empty complex literal"));
    }
    let bad = |_| Error::invalid(format!("bad complex literal {s:?}"));
    // split at the last +/- that is not a leading sign or an exponent sign
    let bytes = s.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
            split = Some(i);
            break;
        }
    }
    let imag_part = |p: &str| -> Result<f64> {
        let core = &p[..p.len() - 1]; // strip the trailing 'i'
        match core {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => core.parse().map_err(bad),
        }
    };
    if let Some(i) = split {
        let (a, b) = (&s[..i], &s[i..]);
        if b.ends_with('i') {
            Ok(Complex64::new(a.parse().map_err(bad)?, imag_part(b)?))
        } else if a.ends_with('i') {
            Ok(Complex64::new(b.parse().map_err(bad)?, imag_part(a)?))
        } else {
            Err(Error::invalid(format!("bad complex literal {s:?}")))
        }
    } else if s.ends_with('i') {
        Ok(Complex64::new(0.0, imag_part(&s)?))
    } else {
        Ok(Complex64::new(s.parse().map_err(bad)?, 0.0))
    }
}
