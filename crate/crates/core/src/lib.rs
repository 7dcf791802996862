//! Exact machinery for the positive-existential theory of rings of entire
//! functions of bounded order over the language `L_z = {0, 1, z, +, ·, =}`.

pub mod cli;
pub mod cyclotomic;
pub mod formula;
pub mod growth;
mod linalg;
pub mod mpoly;
pub mod params;
pub mod pell;
pub mod polyring;
pub mod reduction;
pub mod verify;

pub(crate) fn ser_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}
