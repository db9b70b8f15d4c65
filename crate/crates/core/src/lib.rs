//! Exceptional branched-cover data on the sphere, certified through spherical
//! conical metrics.
//!
//! A branching datum `(d, Π)` is certified exceptional when some admissible
//! cone-angle vector `β` lifts through `Π` to an inadmissible one. Every
//! certificate can be cross-checked against an exhaustive permutation
//! monodromy search at small degree.

pub mod angles;
pub mod branch_data;
pub mod catalog;
pub mod families;
pub mod lift;
pub mod monodromy;
pub mod rational;

pub use angles::{
    coaxial_check, decide_admissible, gauss_bonnet_margin, l1_distance_to_odd_lattice,
    parse_angles, rational_gcd, strip_units, troyanov_admissible, AdmissibilityVerdict,
    AdmissibleCase, AngleError, AngleVector, CoaxialWitness, OddLatticeResult,
};
pub use branch_data::{
    enumerate_data, format_datum, parse_datum, partitions, total_defect, validate_datum,
    BranchDatum, Constraint, DatumError, ParseError, Partition, ValidationReport, Violation,
};
pub use families::{
    all_instances, family_2k, family_3k, family_rk, nonprime_witness, FamilyError, FamilyId,
    FamilyInstance, Variant,
};
pub use lift::{
    certify_exceptional, lift_angles, search_certificate, verify_certificate, Certification,
    ExceptionalityCertificate, LiftError, Refusal, SearchConfig,
};
pub use monodromy::{
    canonical_of_type, class_size, conjugacy_class_iter, cycle_type, find_witness, is_transitive,
    verify_witness, MonodromyWitness, OracleResult, Permutation,
};
pub use rational::Rational;
