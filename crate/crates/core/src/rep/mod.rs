//! Representations of free groups into `PGL(d, ℝ)`: overflow-safe word
//! evaluation, Jordan and Cartan projections, length functionals, flags and
//! the Busemann–Iwasawa cocycle.

mod anosov;
mod constructions;
mod family;
mod flags;
mod functional;
mod matrixrep;
mod projection;

pub use anosov::{anosov_gap_report, least_squares, AnosovReport, RootGrowth, ANOSOV_SLOPE_FLOOR};
pub use constructions::{
    contragredient, direct_sum, schottky_sl2, sym_power, sym_power_matrix, PingPongCertificate,
    Schottky,
};
pub use family::RepFamily;
pub use flags::{
    attracting_flag, busemann_cocycle, busemann_from_tower, limit_map_periodic, repelling_flag,
    word_attracting_flag, Flag,
};
pub use functional::{opposition_involution, LengthFunctional};
pub use matrixrep::{MatrixRep, CONDITION_FLOOR};
pub use projection::{
    cartan_from_tower, cartan_projection, jordan_from_tower, jordan_projection, ExteriorTower,
    JordanVector, LOXODROMIC_GAP,
};
