//! Foliations of domains in C^n by real curves with angular points, and a
//! numerical holomorphy tester built on them.
//!
//! The foliation is the image of the segments parallel to the `Re z1` axis
//! under a composite of compactly supported perturbation stages. Each stage
//! bends one marked segment into a corner lying in a `z_l` coordinate plane.
//! At such a corner a C¹ function that is holomorphic along the curve has two
//! independent one-sided derivatives, which pins down `∂f/∂z̄_l`.
//!
//! The numerical core is generic over [`Real`]; aliases for `f64` and
//! double-double ([`Dd`]) are provided at the crate root.

pub mod builder;
pub mod cfun;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kernel;
pub mod scalar;
pub mod tester;
pub mod verify;

pub use builder::{build, BuildParams, Builder, FoliationManifest, LeafCurve};
pub use error::{Error, Result};
pub use io::{read_manifest, write_manifest, AnyManifest};
pub use geometry::{
    base_leaf_through, complex_coord, plane_frame, BaseLeaf, Domain, DomainKind, PlaneFrame, Point,
};
pub use kernel::{AngularPoint, Stage};
pub use scalar::{Dd, Real};
pub use tester::{test_function, HolomorphyReport, Thresholds, Verdict};

pub type Point64 = Point<f64>;
pub type PointDd = Point<Dd>;
pub type Domain64 = Domain<f64>;
pub type DomainDd = Domain<Dd>;
pub type Stage64 = Stage<f64>;
pub type StageDd = Stage<Dd>;
pub type Manifest64 = FoliationManifest<f64>;
pub type ManifestDd = FoliationManifest<Dd>;
