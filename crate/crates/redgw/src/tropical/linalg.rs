//! Exact integer linear algebra for small cone computations. Rows are
//! integral linear forms; elimination is fraction free with gcd reduction.

use num_integer::Integer;

pub type Row = Vec<i64>;

type Wide = Vec<i128>;

fn widen(r: &[i64]) -> Wide {
    r.iter().map(|&x| x as i128).collect()
}

fn narrow(r: &[i128]) -> Row {
    r.iter().map(|&x| i64::try_from(x).expect("cone coefficient fits in i64")).collect()
}

fn reduce(r: &mut [i128]) {
    let g = r.iter().fold(0i128, |acc, &x| acc.gcd(&x));
    if g > 1 {
        for x in r.iter_mut() {
            *x /= g;
        }
    }
}

/// Fraction-free echelon form; pivot entries are positive.
fn echelon(mut m: Vec<Wide>, ncols: usize) -> (Vec<Wide>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        if m[r][c] < 0 {
            for x in m[r].iter_mut() {
                *x = -*x;
            }
        }
        let a = m[r][c];
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let b = m[i][c];
                for j in 0..ncols {
                    m[i][j] = a * m[i][j] - b * m[r][j];
                }
                reduce(&mut m[i]);
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Row], ncols: usize) -> usize {
    echelon(rows.iter().map(|r| widen(r)).collect(), ncols).1.len()
}

/// Primitive integral basis of `{x : rows . x = 0}`.
pub fn nullspace(rows: &[Row], ncols: usize) -> Vec<Row> {
    let (m, pivots) = echelon(rows.iter().map(|r| widen(r)).collect(), ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            // Reduced form: every pivot row reads a_i x_{p_i} + sum_free c x_f = 0.
            let l = pivots.iter().enumerate().fold(1i128, |acc, (i, &p)| acc.lcm(&m[i][p]));
            let mut v = vec![0i128; ncols];
            v[f] = l;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m[i][f] * (l / m[i][p]);
            }
            reduce(&mut v);
            narrow(&v)
        })
        .collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> Row {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[i64], b: &[i64]) -> Row {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[i64], c: i64) -> Row {
    a.iter().map(|x| x * c).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Is `{x : eq . x = 0, strict . x > 0}` nonempty? Equalities are
/// substituted away, then the strict system is decided by Fourier-Motzkin
/// elimination.
pub fn feasible(eq: &[Row], strict: &[Row], ncols: usize) -> bool {
    let (eqs, pivots) = echelon(eq.iter().map(|r| widen(r)).collect(), ncols);
    let mut sys: Vec<Wide> = strict.iter().map(|r| widen(r)).collect();
    for (e, &c) in eqs.iter().zip(&pivots) {
        let a = e[c];
        for row in sys.iter_mut() {
            let b = row[c];
            if b != 0 {
                for j in 0..ncols {
                    row[j] = a * row[j] - b * e[j];
                }
                reduce(row);
            }
        }
    }
    for var in (0..ncols).filter(|c| !pivots.contains(c)) {
        if sys.iter().any(|r| r.iter().all(|&x| x == 0)) {
            return false;
        }
        let (pos, rest): (Vec<Wide>, Vec<Wide>) = sys.into_iter().partition(|r| r[var] > 0);
        let (neg, mut next): (Vec<Wide>, Vec<Wide>) = rest.into_iter().partition(|r| r[var] < 0);
        for p in &pos {
            for n in &neg {
                let (a, b) = (p[var], -n[var]);
                let mut row: Wide = p.iter().zip(n).map(|(x, y)| x * b + y * a).collect();
                reduce(&mut row);
                next.push(row);
            }
        }
        next.sort();
        next.dedup();
        sys = next;
    }
    sys.is_empty()
}

/// The vector divided by the gcd of its entries.
pub fn primitive(v: &[i64]) -> Row {
    let mut w = widen(v);
    reduce(&mut w);
    narrow(&w)
}
