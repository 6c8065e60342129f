//! Exhaustive, isomorph-free enumeration of N₁ₗ′ configurations.
//!
//! An N₁′ configuration is a 0/1 matrix with exactly three ones per row, no
//! two rows sharing more than one column, and rows split into at most four
//! classes whose members are pairwise disjoint. It is N₁ₗ′ when the rows,
//! lifted to weight-5 words around a common weight-5 anchor vector, span a
//! binary code of minimum weight 5.
//!
//! The crate is organized bottom-up:
//!
//! - [`config`] and [`text`]: the data model, signatures and file formats;
//! - [`perm`] and [`sigcanon`]: the symmetric group on the classes and
//!   canonicalized signatures;
//! - [`validity`] and [`gf2`]: the structural and code-theoretic tests;
//! - [`canon`]: canonical forms used for isomorph rejection;
//! - [`search`] and [`archive`]: staged generation and stage archives.
//!
//! ```
//! use n1l::{run_search, SearchLimits};
//!
//! let table = run_search(&SearchLimits::new(3, 9)).unwrap();
//! assert_eq!(table.get(2, 5), 1);
//! assert_eq!(table.get(2, 6), 2);
//! assert_eq!(table.get(3, 9), 3);
//! ```

pub mod archive;
pub mod canon;
pub mod config;
pub mod error;
pub mod gf2;
pub mod perm;
pub mod search;
pub mod sigcanon;
pub mod text;
pub mod validity;

pub use archive::StageArchive;
pub use canon::{brute_force_canonical, canonical_form, canonical_form_fixed_classes, canonical_key, Canonicalizer};
pub use config::{CanonicalKey, ColumnType, Configuration, RowPartition, Signature};
pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use gf2::{embed, goodness_measure, is_n1l, is_n1l_incremental, span_min_weight, ParentSpan, SpanReport};
pub use perm::{CosetHandle, Perm4, SubgroupTable};
pub use search::{
    report_ratio, run_bounded_search, run_search, run_search_with, BoundedOutcome, BoundedParams, CountsTable,
    SearchLimits, SearchMode,
};
pub use sigcanon::{canonicalize_signature, canonicalize_signature_grouped, SignatureCanonResult};
pub use text::{parse_text, serialize_text};
pub use validity::is_valid_n1_prime;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/configurations.md")]
    mod configurations {}
    #[doc = include_str!("../../../book/src/validity.md")]
    mod validity {}
    #[doc = include_str!("../../../book/src/symmetry.md")]
    mod symmetry {}
    #[doc = include_str!("../../../book/src/canonical-forms.md")]
    mod canonical_forms {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
}
