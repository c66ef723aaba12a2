pub mod certificate;
pub mod cli;
pub mod collect;
pub mod frame;
pub mod metric;
pub mod oracle;
pub mod error;
pub mod group;
pub mod lattice;
pub mod pc;
pub mod profiler;
pub mod scalar;
pub mod separability;
pub mod subgroup;

pub use error::{Error, Result};

use num_bigint::BigInt;

pub type Elem = group::Element<BigInt>;
pub type Group = group::GroupCtx<BigInt>;
pub type Subgroup = subgroup::SubgroupDesc<BigInt>;
pub type Elem64 = group::Element<i64>;
pub type Group64 = group::GroupCtx<i64>;
pub type Subgroup64 = subgroup::SubgroupDesc<i64>;
