//! Exact symbolic computation in the Schrödinger algebra and its
//! quasi-Whittaker modules.
//!
//! The crate builds up in layers:
//!
//! - [`rat`], [`poly`], [`linalg`] — exact rational scalars, dense
//!   univariate polynomials with Bezout certificates, and fraction-free
//!   nullspace computation;
//! - [`uea`] — the enveloping algebra of the six-generator Schrödinger
//!   algebra with PBW normal ordering, products, commutators, the
//!   Casimir-like element and the Whittaker-adapted elements;
//! - [`oracle`] — an independent realization by differential operators used
//!   to cross-check the rewriting kernel;
//! - [`whittaker`] — the universal quasi-Whittaker module `M_φ`, its
//!   adapted bases, quasi-Whittaker vector solvers, and the annihilation
//!   ladder identities;
//! - [`structure`] — simple quotients, finite-length quotients, simplicity
//!   witnesses, composition series, direct-sum decompositions, and
//!   annihilator membership.
//!
//! All arithmetic is over exact rationals; equality assertions throughout
//! the crate and its test suites are exact, never approximate.
//!
//! ```
//! use sqw_core::rat::Rat;
//! use sqw_core::uea::{casimir, commutator, normalize, word, UEAElem, Generator};
//! use sqw_core::whittaker::{act, ModElem, WhittakerType};
//!
//! // q·p reorders to p·q - z.
//! let canonical = normalize(&word("qp"), &Rat::one());
//! assert_eq!(canonical.to_string(), "p*q - z");
//!
//! // The Casimir-like element commutes with e up to z·e.
//! let ze = normalize(&word("ez"), &Rat::one());
//! assert_eq!(commutator(&UEAElem::generator(Generator::E), &casimir()), ze);
//!
//! // On the cyclic vector of M_φ, p acts by φ(p).
//! let w = ModElem::cyclic(WhittakerType::from_ints(2, 3));
//! let pw = act(&UEAElem::generator(Generator::P), &w);
//! assert_eq!(pw, w.scale(&Rat::from_int(2)));
//! ```

pub mod error;
pub mod linalg;
pub mod oracle;
pub mod poly;
pub mod rat;
pub mod structure;
pub mod uea;
pub mod whittaker;

pub use error::Error;
pub use linalg::{RatMatrix, RowSpace};
pub use oracle::{cross_check, realize, realize_elem, realize_word, DiffOp};
pub use poly::{bezout_setwise, poly_bezout, poly_rem, Poly};
pub use rat::Rat;
pub use structure::{
    act_simple, cyclic_reduction, local_finiteness_dim, submodule_generator, Component,
    FactoredPoly, FinElem, FiniteQW, QuotElem, SeriesReport, Witness,
};
pub use uea::{
    adapted_elements, bracket_gen, casimir, commutator, normalize, normalize_with_strategy,
    verify_uea_identities, AdaptedQuad, Generator, Monomial, Strategy, UEAElem,
};
pub use whittaker::{
    act, apply_annihilation_power, is_qw_vector, qw_vector_basis, verify_reduction_lemmas,
    AdaptedCase, AdaptedElem, LemmaBounds, LemmaReport, ModElem, PhiClass, ShiftOp, WhittakerType,
};
