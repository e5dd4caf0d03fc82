//! Multi-slot tag assignment for digital billboard advertising.
//!
//! A tag (one advertiser's campaign) demands a level of influence in each of
//! several zones. Each zone is served by the time slots of the billboards
//! inside it. The solvers pick disjoint slot sets so that as many tags as
//! possible are fully satisfied within a shared budget.

pub mod baselines;
pub mod ceg;
pub mod error;
pub mod experiment;
pub mod influence;
pub mod model;
pub mod oracle;
pub mod scenario;

pub use baselines::{random_assign, topk_assign, Seed};
pub use ceg::{ceg_assign, ceg_assign_traced, min_cost_zone_cover, InnerSolver, SolverConfig};
pub use error::{Error, Result};
pub use influence::{influence, zonal_influence, InfluenceKind, InfluenceModel};
pub use model::{Allocation, Instance, InstanceParts, SlotId, TagId, ZoneId};
pub use oracle::{exact_optimal, verify_allocation, AuditReport, OracleLimits};
pub use scenario::{gen_compact, gen_synthetic, CompactParams, ScenarioParams};
