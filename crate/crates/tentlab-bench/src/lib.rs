//! Criterion benchmarks for `tentlab-core`; see `benches/core.rs`.

use tentlab_core::arith::Parameter;
use tentlab_core::tent::TentMap;

pub const GOLDEN: &str = "poly:\"-1,-1,1\":interval:\"1.6,1.7\"";
pub const TRIBONACCI: &str = "poly:\"-1,-1,-1,1\":interval:\"1.8,1.9\"";

pub fn tent(spec: &str) -> TentMap {
    TentMap::new(&Parameter::parse(spec).expect("valid parameter"))
}
