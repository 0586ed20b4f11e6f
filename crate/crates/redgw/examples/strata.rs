//! Prints the boundary divisors of a tangency step.
//!
//! `cargo run --release --example strata -- <genus> <degree> <contacts,...> <mark> [unpruned]`

use std::time::Instant;

use redgw::tropical::{enumerate_boundary_divisors, StrataQuery};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let genus: u8 = args.first().and_then(|x| x.parse().ok()).unwrap_or(1);
    let degree: u32 = args.get(1).and_then(|x| x.parse().ok()).unwrap_or(2);
    let tangency: Vec<u32> =
        args.get(2).map(|x| x.split(',').map(|t| t.parse().unwrap()).collect()).unwrap_or(vec![2]);
    let mark: usize = args.get(3).and_then(|x| x.parse().ok()).unwrap_or(0);
    let mut q = StrataQuery::new(genus, degree, tangency, mark);
    q.prune = args.get(4).map_or(true, |x| x != "unpruned");
    let t = Instant::now();
    if std::env::var_os("TYPES_ONLY").is_some() {
        let ts = redgw::tropical::enumerate_types(genus, degree, &q.tangency, usize::MAX, q.max_vertices);
        eprintln!("{} types in {:?}", ts.len(), t.elapsed());
        return;
    }
    let rays = enumerate_boundary_divisors(&q).expect("valid query");
    for r in &rays {
        println!("{}", r.describe());
    }
    eprintln!("{} rays in {:?}", rays.len(), t.elapsed());
}

