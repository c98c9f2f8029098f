//! CVSS v3.1 base metrics and the base equation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("unknown {metric} value '{value}'")]
    UnknownValue { metric: &'static str, value: String },
    #[error("malformed vector string '{0}'")]
    Malformed(String),
}

/// Shared behaviour of the eight base metrics.
pub trait Metric: Copy + Eq + Ord + Sized + 'static {
    const NAME: &'static str;
    /// Every value, least severe first.
    const VALUES: &'static [Self];
    fn code(self) -> &'static str;
    fn long_names(self) -> &'static [&'static str];

    fn from_code(code: &str) -> Option<Self> {
        Self::VALUES.iter().copied().find(|v| v.code() == code)
    }

    /// Accepts long names ("Physical", "Adjacent Network") case-insensitively,
    /// and the one-letter codes.
    fn parse_value(text: &str) -> Result<Self, MetricError> {
        let t = text.trim();
        Self::VALUES
            .iter()
            .copied()
            .find(|v| v.code() == t || v.long_names().iter().any(|n| n.eq_ignore_ascii_case(t)))
            .ok_or_else(|| MetricError::UnknownValue { metric: Self::NAME, value: text.to_string() })
    }

    fn long_name(self) -> &'static str {
        self.long_names()[0]
    }
}

macro_rules! metric {
    ($ty:ident, $name:literal, [$($variant:ident => $code:literal, [$($long:literal),+]);+ $(;)?]) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $ty { $($variant),+ }

        impl Metric for $ty {
            const NAME: &'static str = $name;
            const VALUES: &'static [Self] = &[$($ty::$variant),+];
            fn code(self) -> &'static str {
                match self { $($ty::$variant => $code),+ }
            }
            fn long_names(self) -> &'static [&'static str] {
                match self { $($ty::$variant => &[$($long),+]),+ }
            }
        }
    };
}

// Variants are declared least severe first, so `Ord` is the severity order.
metric!(AttackVector, "AV", [
    Physical => "P", ["Physical"];
    Local => "L", ["Local"];
    Adjacent => "A", ["Adjacent", "Adjacent Network", "AdjacentNetwork"];
    Network => "N", ["Network"];
]);
metric!(AttackComplexity, "AC", [High => "H", ["High"]; Low => "L", ["Low"]]);
metric!(PrivilegesRequired, "PR", [High => "H", ["High"]; Low => "L", ["Low"]; None => "N", ["None"]]);
metric!(UserInteraction, "UI", [Required => "R", ["Required"]; None => "N", ["None"]]);
metric!(Scope, "S", [Unchanged => "U", ["Unchanged"]; Changed => "C", ["Changed"]]);
metric!(Impact, "CIA", [None => "N", ["None"]; Low => "L", ["Low"]; High => "H", ["High"]]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CvssVector {
    pub av: AttackVector,
    pub ac: AttackComplexity,
    pub pr: PrivilegesRequired,
    pub ui: UserInteraction,
    pub s: Scope,
    pub c: Impact,
    pub i: Impact,
    pub a: Impact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvssResult {
    pub base_score: f64,
    pub vector_string: String,
}

pub const VECTOR_PREFIX: &str = "CVSS:3.1/";

impl fmt::Display for CvssVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{VECTOR_PREFIX}AV:{}/AC:{}/PR:{}/UI:{}/S:{}/C:{}/I:{}/A:{}",
            self.av.code(),
            self.ac.code(),
            self.pr.code(),
            self.ui.code(),
            self.s.code(),
            self.c.code(),
            self.i.code(),
            self.a.code()
        )
    }
}

impl FromStr for CvssVector {
    type Err = MetricError;

    /// Strict: the prefix and all eight metrics in canonical order.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let malformed = || MetricError::Malformed(text.to_string());
        let body = text.strip_prefix(VECTOR_PREFIX).ok_or_else(malformed)?;
        let parts: Vec<(&str, &str)> = body
            .split('/')
            .map(|kv| kv.split_once(':').ok_or_else(malformed))
            .collect::<Result<_, _>>()?;
        let keys: Vec<&str> = parts.iter().map(|(k, _)| *k).collect();
        if keys != ["AV", "AC", "PR", "UI", "S", "C", "I", "A"] {
            return Err(malformed());
        }
        fn code<M: Metric>(v: &str, text: &str) -> Result<M, MetricError> {
            M::from_code(v).ok_or_else(|| MetricError::Malformed(text.to_string()))
        }
        Ok(CvssVector {
            av: code(parts[0].1, text)?,
            ac: code(parts[1].1, text)?,
            pr: code(parts[2].1, text)?,
            ui: code(parts[3].1, text)?,
            s: code(parts[4].1, text)?,
            c: code(parts[5].1, text)?,
            i: code(parts[6].1, text)?,
            a: code(parts[7].1, text)?,
        })
    }
}

/// The specification's Roundup: smallest one-decimal number >= x, computed
/// on a scaled integer so float noise never bumps an exact value.
pub fn roundup(x: f64) -> f64 {
    let scaled = (x * 100_000.0).round() as i64;
    if scaled % 10_000 == 0 {
        scaled as f64 / 100_000.0
    } else {
        (scaled / 10_000 + 1) as f64 / 10.0
    }
}

fn impact_weight(v: Impact) -> f64 {
    match v {
        Impact::High => 0.56,
        Impact::Low => 0.22,
        Impact::None => 0.0,
    }
}

impl CvssVector {
    pub fn impact_subscore(&self) -> f64 {
        let iss = 1.0
            - (1.0 - impact_weight(self.c)) * (1.0 - impact_weight(self.i)) * (1.0 - impact_weight(self.a));
        match self.s {
            Scope::Unchanged => 6.42 * iss,
            Scope::Changed => 7.52 * (iss - 0.029) - 3.25 * (iss - 0.02).powi(15),
        }
    }

    pub fn exploitability(&self) -> f64 {
        let av = match self.av {
            AttackVector::Network => 0.85,
            AttackVector::Adjacent => 0.62,
            AttackVector::Local => 0.55,
            AttackVector::Physical => 0.2,
        };
        let ac = match self.ac {
            AttackComplexity::Low => 0.77,
            AttackComplexity::High => 0.44,
        };
        let pr = match (self.pr, self.s) {
            (PrivilegesRequired::None, _) => 0.85,
            (PrivilegesRequired::Low, Scope::Unchanged) => 0.62,
            (PrivilegesRequired::Low, Scope::Changed) => 0.68,
            (PrivilegesRequired::High, Scope::Unchanged) => 0.27,
            (PrivilegesRequired::High, Scope::Changed) => 0.5,
        };
        let ui = match self.ui {
            UserInteraction::None => 0.85,
            UserInteraction::Required => 0.62,
        };
        8.22 * av * ac * pr * ui
    }

    pub fn base_score(&self) -> f64 {
        let impact = self.impact_subscore();
        if impact <= 0.0 {
            return 0.0;
        }
        let raw = impact + self.exploitability();
        match self.s {
            Scope::Unchanged => roundup(raw.min(10.0)),
            Scope::Changed => roundup((1.08 * raw).min(10.0)),
        }
    }

    pub fn score(&self) -> CvssResult {
        CvssResult { base_score: self.base_score(), vector_string: self.to_string() }
    }

    /// All 2,592 base vectors.
    pub fn all() -> Vec<CvssVector> {
        let mut out = Vec::with_capacity(2592);
        for &av in AttackVector::VALUES {
            for &ac in AttackComplexity::VALUES {
                for &pr in PrivilegesRequired::VALUES {
                    for &ui in UserInteraction::VALUES {
                        for &s in Scope::VALUES {
                            for &c in Impact::VALUES {
                                for &i in Impact::VALUES {
                                    for &a in Impact::VALUES {
                                        out.push(CvssVector { av, ac, pr, ui, s, c, i, a });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn base_score(v: &CvssVector) -> CvssResult {
    v.score()
}
