//! Double octic Calabi-Yau threefolds branched along eight planes: point
//! counts over finite fields, traces of Frobenius and their comparison with
//! modular forms.

pub mod arrangement;
pub mod counting;
pub mod fibration;
pub mod finite_fields;
pub mod modforms;
pub mod verify;
