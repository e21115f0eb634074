use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use wso_rk::exact::{int, rat, RMatrix, Rational};
use wso_rk::tableau::Tableau;

fn nonnegative_rational(rng: &mut ChaCha8Rng) -> Rational {
    if rng.gen_bool(0.35) {
        int(0)
    } else {
        rat(rng.gen_range(1..=6), rng.gen_range(1..=6))
    }
}

/// Non-negative explicit tableau. Half of the draws place `b` on the
/// segment that satisfies `bᵀe = 1`, `bᵀc = 1/2`, so second order is common.
pub fn nonnegative_tableau(rng: &mut ChaCha8Rng) -> Tableau {
    let s = rng.gen_range(2..=6);
    let a = RMatrix::from_fn(s, s, |i, j| if j < i { nonnegative_rational(rng) } else { int(0) });
    let c: Vec<Rational> = (0..s).map(|i| a.row(i).iter().sum()).collect();
    let half = rat(1, 2);
    let low: Vec<usize> = (0..s).filter(|&i| c[i] < half).collect();
    let high: Vec<usize> = (0..s).filter(|&i| c[i] > half).collect();
    let b = if rng.gen_bool(0.5) && !low.is_empty() && !high.is_empty() {
        // convex mix of two-point rules, each exact for 1 and c
        let mut b = vec![int(0); s];
        let pairs = rng.gen_range(1..=3);
        for _ in 0..pairs {
            let i = low[rng.gen_range(0..low.len())];
            let j = high[rng.gen_range(0..high.len())];
            let wj = (&half - &c[i]) / (&c[j] - &c[i]);
            b[i] += (int(1) - &wj) / int(pairs);
            b[j] += wj / int(pairs);
        }
        b
    } else {
        (0..s).map(|_| nonnegative_rational(rng)).collect()
    };
    Tableau::new("non-negative", a, b, None).unwrap()
}

pub fn is_nonnegative(t: &Tableau) -> bool {
    t.a().entries().iter().chain(t.b()).all(|v| !v.is_negative())
}
