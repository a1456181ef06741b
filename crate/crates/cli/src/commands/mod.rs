pub mod born;
pub mod convert;
pub mod sic;
pub mod simulate;
