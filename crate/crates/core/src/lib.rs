//! Ends of the trivalent tree and the structures built on them.

pub mod automorphism;
pub mod axioms;
pub mod back_and_forth;
pub mod classical;
pub mod cone;
pub mod definable;
pub mod dt;
pub mod ef;
pub mod ends;
pub mod error;
pub mod orbits;
pub mod rational;
pub mod runner;
pub mod shape;
pub mod tree;

pub use cone::{cone_containing, cones_at, relate, Cone, ConeKind, ConeRelation};
pub use ends::{c_rel, d_from_c, first_diff, xor, End, EndSampler, Level};
pub use error::{Error, Result};
pub use tree::{d_from_tree, e_a, line, median, ray_step, tree_distance, Direction, Line, TreeVertex};
pub use definable::{ds_complement, ds_intersect, ds_union, union_collapse, DefinableSet};
pub use orbits::{
    a_centres, a_vertices, normalize_from_orbits, orbit_classification, parameter_form, ATree, DepthSelection,
    Exceptions, OrbitClassification, OrbitFamily, ParameterForm, Selection,
};
pub use automorphism::{
    jordan_witness, preserves_d, three_transitivity_witness, Automorphism, Generator,
};
pub use shape::{metric_shape, qf_type_equal, shape, AtomTable, MetricShape, TupleShape};
pub use back_and_forth::{back_and_forth_extend, PartialIso};
pub use ef::{ef_equiv_m, ray_families, ray_instance, EfGame, RESTRICTED_GAME_EXACT};
pub use axioms::{check_d_axioms, check_jordan, check_jordan_with, check_s_axioms, check_structural_partition, check_syzygetic, end_witnesses, NamedSet, RelationHandle, SuiteReport, Verdict};
pub use dt::{adjacency_reconstruction, ball_size, build_ball, claim_check, count_report, gamma_s, t2_decomposition, GammaBall};
pub use classical::{
    affine_invariance_check, b_rel, c_p, cross_ratio, d_from_c_p, d_p, k_rel, s_rel, select_convention,
    separating_triple, z_graph_family, AffineMap, Convention, Mobius, RationalSampler,
};
pub use rational::{v_p, v_p_of_difference, Prime, ProjPoint, Rational, Valuation};
pub use runner::{run, Check, Command, Format, Report, RunConfig, SetExpr, SuiteResult, SCHEMA};
