use crate::scalar::Scalar;

/// Associated Laguerre polynomial L_n^k(x) by the three-term recurrence
///
/// (m + 1) L_{m+1}^k = (2m + k + 1 - x) L_m^k - (m + k) L_{m-1}^k,
///
/// with L_0^k = 1 and L_1^k = 1 + k - x. Always finite.
pub fn laguerre<T: Scalar>(n: u32, k: u32, x: T) -> T {
    let (l, _) = laguerre_pair(n, k, x);
    l
}

/// Returns (L_n^k(x), L_{n-1}^k(x)); the previous value is handy for callers
/// stepping the recurrence themselves. L_{-1} is reported as 0.
pub(crate) fn laguerre_pair<T: Scalar>(n: u32, k: u32, x: T) -> (T, T) {
    let kf = T::from_u32(k).unwrap();
    let one = T::one();
    if n == 0 {
        return (one, T::zero());
    }
    let mut prev = one;
    let mut cur = one + kf - x;
    for m in 1..n {
        let mf = T::from_u32(m).unwrap();
        let next = ((mf + mf + kf + one - x) * cur - (mf + kf) * prev) / (mf + one);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}
