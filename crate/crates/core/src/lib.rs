//! Text processing for Wylie-transliterated Classical Tibetan.
//!
//! The crate is organized around the syllable: letters are recognized from
//! the transliteration ([`wylie`]), assigned to the slots of the syllable
//! scheme ([`syllable`]), and reduced to normalized stems ([`stem`]). On top
//! of stems sit word segmentation ([`segment`]), detection of approximate
//! parallel passages between documents ([`align`]), stylometric features and
//! classification ([`stylo`]), and corpus ingestion plus gold-standard
//! evaluation ([`corpus`]).
//!
//! ```
//! use tibtext_core::{stem, syllable};
//!
//! let tables = syllable::SyllableTables::shipped();
//! let rules = stem::NormRuleSet::shipped();
//! let past = syllable::parse_str("bsgrubs", tables).unwrap();
//! let present = syllable::parse_str("sgrub", tables).unwrap();
//! assert!(stem::stem_identical(&past, &present, rules));
//! ```
//!
//! Alignment has a data-parallel chunked mode backed by rayon; build with
//! `--no-default-features` for a sequential fallback with identical output.

pub mod align;
pub mod corpus;
pub mod error;
pub mod model;
pub mod segment;
pub mod stem;
pub mod stylo;
pub mod syllable;
pub mod wylie;

pub use error::{Error, Result};
