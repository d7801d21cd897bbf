//! Exact finite arithmetic BF path integrals.
//!
//! The crate evaluates sums of the form `sum exp(2 pi i BF(a, b))` over finite
//! moduli sets of cohomology classes by brute-force enumeration, decides the
//! resulting sum of roots of unity exactly, and compares it with closed-form
//! class-group and Selmer-group counts.
//!
//! * [`abgroup`]: finite abelian groups, Smith normal form, characters.
//! * [`quadforms`]: class groups of imaginary quadratic fields from reduced forms.
//! * [`cyclo`]: cyclotomic polynomials and exact phase sums.
//! * [`bf_gm`]: the path integral for `G_m` over a totally imaginary field.
//! * [`bf_av`]: the path integral for dual abelian varieties over synthetic models.
//! * [`cli`]: file formats, reports and commands behind the `arithbf` binary.
//! * [`selftest`]: the verification battery.

pub mod abgroup;
pub mod bf_av;
pub mod bf_gm;
pub mod cli;
pub mod cyclo;
pub mod quadforms;
pub mod selftest;

pub use abgroup::{AbElement, CyclicHom, InvariantFactors};
pub use bf_av::{AvInstance, AvModel, DeltaChoice};
pub use bf_gm::{BfError, EnumerationOptions, FieldData, GmInstance, Mode, PathIntegralReport};
pub use cyclo::{Phase, PhaseVector};
pub use quadforms::{Discriminant, QuadForm};
