use num_bigint::BigInt;

/// `C(a, b)`, zero outside `0 <= b <= a`.
///
/// Multiplicative form; each partial product `C(a - b + i, i)` is an integer,
/// so the running division is exact.
pub fn binomial(a: u64, b: i64) -> BigInt {
    if b < 0 || b as u64 > a {
        return BigInt::from(0);
    }
    let b = (b as u64).min(a - b as u64);
    let mut acc = BigInt::from(1);
    for i in 1..=b {
        acc *= a - b + i;
        acc /= i;
    }
    acc
}
