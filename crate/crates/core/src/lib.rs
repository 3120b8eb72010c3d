pub mod combos;
pub mod error;
pub mod incidence;
pub mod io;
pub mod lemmas;
pub mod linalg;
pub mod monomial;
pub mod removal;
pub mod sets;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
