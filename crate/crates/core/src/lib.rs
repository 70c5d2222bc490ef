//! Behavioural preorders on finite labelled transition systems, computed two
//! ways: as greatest fixed points of relation transformers, and as greatest
//! fixed points of nested modal equation systems (characteristic
//! declarations). The [`verify`] module checks that both agree.
//!
//! ```
//! use nestsim::{char_system, characterized_relation, parse_aut, preorder, Kind};
//!
//! let lts = parse_aut("des (0,5,7)\n(0,\"a\",1)\n(1,\"b\",2)\n(3,\"a\",4)\n(4,\"b\",5)\n(3,\"a\",6)").unwrap();
//! let oracle = preorder(Kind::NSim(2), &lts).unwrap();
//! let via_logic = characterized_relation(&char_system(Kind::NSim(2), &lts).unwrap(), &lts).unwrap();
//! assert_eq!(oracle, via_logic);
//! assert!(!oracle.contains(3, 0));
//! ```

pub mod bitset;
pub mod charform;
pub mod declarations;
pub mod error;
pub mod logic;
pub mod lts;
pub mod relations;
pub mod verify;

pub use bitset::ProcessSet;
pub use charform::{
    char_system, characterized_relation, decl_bisim, decl_opsim, decl_sim, decl_simeq,
    expresses_check, phi, phi_inverse, CharSystem,
};
pub use declarations::{
    derived_function, elaborate, gfp, parse_decl_file, Declaration, FixpointResult, NestedSystem,
};
pub use error::{Error, Result};
pub use logic::{
    check_level, eval_closed, eval_open, parse_formula, ConstName, ConstantEnv, Formula,
    Interpretation, Logic,
};
pub use lts::{generate_random, parse_aut, render_aut, Action, Lts};
pub use relations::{apply, gfp_rel, preorder, step_f, Kind, Relation, Transformer};
