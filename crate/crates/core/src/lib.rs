//! Model checking for first order logic with dependency atoms under lax team
//! semantics, over finite structures.
//!
//! ```
//! use teamsem::structures::{Element, Structure, Team};
//! use teamsem::syntax::{parse_formula, ParseContext, Var};
//! use teamsem::teameval::{team_eval, Strategy};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let m = Structure::with_size(2)?;
//! let x = Team::new(vec![Var::from("x"), Var::from("y")], vec![vec![Element(0), Element(1)]])?;
//! let f = parse_formula("dep(x;y) & exists z. z!=x", &ParseContext::default())?;
//! assert!(team_eval(&m, &x, &f, Strategy::Optimized)?);
//! # Ok(())
//! # }
//! ```

pub mod dependencies;
pub mod harness;
pub mod structures;
pub mod syntax;
pub mod tarski;
pub mod teameval;
pub mod ulogic;
