//! Additive, derivative and multiplicative martingales.

mod additive;
mod derivative;
mod multiplicative;
mod param;
mod value;

pub use additive::{
    c_n, c_n_log_derivative, ln_c_n, m_bis, m_bst, m_bst_profile, m_gen, m_gen_births, m_yule,
    m_yule_profile,
};
pub use derivative::{
    d_bis, d_bst, d_bst_profile, d_gen, d_gen_births, d_yule, d_yule_profile,
};
pub(crate) use additive::log_products;
pub use multiplicative::{multiplicative_martingale, Line};
pub use param::{
    alpha_critical, alpha_of, classify, critical, critical_function, critical_points, z_c_minus,
    z_c_plus, ParamZ, Region, CRITICAL_TOLERANCE,
};
pub use value::{Index, Kind, MartingaleValue};

use crate::error::Result;
use crate::ratios::SplitRatios;
use crate::tree::BinaryTreeShape;
use crate::yule::YulePath;

/// The object an additive martingale is evaluated on, with its index.
#[derive(Clone, Copy, Debug)]
pub enum State<'a> {
    Bst(&'a BinaryTreeShape),
    Yule { path: &'a YulePath, t: f64 },
    Gen { path: &'a YulePath, g: u8 },
    Bis { ratios: &'a SplitRatios, g: u8 },
}

impl State<'_> {
    pub fn kind(&self) -> Kind {
        match self {
            State::Bst(_) => Kind::Bst,
            State::Yule { .. } => Kind::Yule,
            State::Gen { .. } => Kind::Gen,
            State::Bis { .. } => Kind::Bis,
        }
    }
}

pub fn additive_martingale(state: State<'_>, z: f64) -> Result<MartingaleValue> {
    match state {
        State::Bst(s) => m_bst(s, z),
        State::Yule { path, t } => m_yule(path, t, z),
        State::Gen { path, g } => m_gen(path, g, z),
        State::Bis { ratios, g } => m_bis(ratios, g, z),
    }
}

pub fn derivative_martingale(state: State<'_>, z: f64) -> Result<MartingaleValue> {
    match state {
        State::Bst(s) => d_bst(s, z),
        State::Yule { path, t } => d_yule(path, t, z),
        State::Gen { path, g } => d_gen(path, g, z),
        State::Bis { ratios, g } => d_bis(ratios, g, z),
    }
}
