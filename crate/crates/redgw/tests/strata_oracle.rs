mod support;

use std::time::Instant;

use support::strata::compare_with_library;

#[test]
fn rays_match_the_exhaustive_oracle() {
    let t = Instant::now();
    let n = compare_with_library(3, 5).unwrap();
    eprintln!("{n} ray sets agree ({:?})", t.elapsed());
}
