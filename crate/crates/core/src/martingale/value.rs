use serde::Serialize;

use super::param::{classify, ParamZ};
use crate::error::Result;
use crate::numeric::SignedLogSum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Kind {
    #[serde(rename = "BST")]
    Bst,
    #[serde(rename = "BIS")]
    Bis,
    #[serde(rename = "GEN")]
    Gen,
    #[serde(rename = "YULE")]
    Yule,
    #[serde(rename = "dBST")]
    DBst,
    #[serde(rename = "dBIS")]
    DBis,
    #[serde(rename = "dGEN")]
    DGen,
    #[serde(rename = "dYULE")]
    DYule,
    #[serde(rename = "MULT")]
    Mult,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Bst => "BST",
            Kind::Bis => "BIS",
            Kind::Gen => "GEN",
            Kind::Yule => "YULE",
            Kind::DBst => "dBST",
            Kind::DBis => "dBIS",
            Kind::DGen => "dGEN",
            Kind::DYule => "dYULE",
            Kind::Mult => "MULT",
        }
    }

    pub fn is_derivative(self) -> bool {
        matches!(self, Kind::DBst | Kind::DBis | Kind::DGen | Kind::DYule)
    }

    pub fn derivative(self) -> Option<Kind> {
        match self {
            Kind::Bst => Some(Kind::DBst),
            Kind::Bis => Some(Kind::DBis),
            Kind::Gen => Some(Kind::DGen),
            Kind::Yule => Some(Kind::DYule),
            _ => None,
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Index of a martingale value: tree size, generation or time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Index {
    Size(u64),
    Generation(u32),
    Time(f64),
}

impl std::fmt::Display for Index {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Index::Size(n) => write!(f, "n={n}"),
            Index::Generation(g) => write!(f, "g={g}"),
            Index::Time(t) => write!(f, "t={t}"),
        }
    }
}

/// A martingale evaluation, kept as `sign · exp(log_abs)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MartingaleValue {
    pub kind: Kind,
    pub index: Index,
    pub z: ParamZ,
    pub log_abs: f64,
    pub sign: f64,
}

impl MartingaleValue {
    pub(crate) fn from_sum(kind: Kind, index: Index, z: ParamZ, sum: &SignedLogSum) -> Self {
        let (log_abs, sign) = sum.log_value();
        MartingaleValue {
            kind,
            index,
            z,
            log_abs,
            sign,
        }
    }

    pub(crate) fn exact(kind: Kind, index: Index, z: ParamZ, value: f64) -> Self {
        MartingaleValue {
            kind,
            index,
            z,
            log_abs: if value == 0.0 { f64::NEG_INFINITY } else { value.abs().ln() },
            sign: value.signum() * f64::from(u8::from(value != 0.0)),
        }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else if self.log_abs == 0.0 {
            self.sign
        } else {
            self.sign * self.log_abs.exp()
        }
    }
}

pub(crate) fn param(z: f64) -> Result<ParamZ> {
    classify(z)
}
