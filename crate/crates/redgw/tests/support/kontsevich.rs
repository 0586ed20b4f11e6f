//! Rational plane curve counts from the associativity recursion, written
//! directly with binomials and no shared code.

fn binom(n: i64, k: i64) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// `N_1..=N_max`: rational plane curves of degree d through 3d - 1 points.
pub fn plane_rational_counts(max: usize) -> Vec<i128> {
    let mut n = vec![0i128; max + 1];
    if max >= 1 {
        n[1] = 1;
    }
    for d in 2..=max {
        let di = d as i64;
        let mut s = 0i128;
        for a in 1..d {
            let b = d - a;
            let (ai, bi) = (a as i128, b as i128);
            let w = ai * ai * bi * bi * binom(3 * di - 4, 3 * a as i64 - 2)
                - ai * ai * ai * bi * binom(3 * di - 4, 3 * a as i64 - 1);
            s += n[a] * n[b] * w;
        }
        n[d] = s;
    }
    n[1..].to_vec()
}
