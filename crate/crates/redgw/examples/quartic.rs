use std::sync::Arc;
use redgw::*;
fn main() {
    let jobs: usize = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(1);
    let e = Engine::with_options(Arc::new(Store::new()), EngineOptions { jobs, ..Default::default() });
    let t = std::time::Instant::now();
    let k = primary_key(Theory::AbsoluteAmbient, 1, 2, 4, &vec![(0, 2); 12]);
    println!("{} {:?}", e.compute(&k).unwrap(), t.elapsed());
}
