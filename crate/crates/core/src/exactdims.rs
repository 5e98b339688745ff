//! Closed-form cohomology dimensions on projective space.
//!
//! All quantities are exact integers. Arithmetic is checked: an overflow is
//! reported as [`Error::Overflow`] and never wraps.

use serde::{Deserialize, Serialize};

use crate::betti::{BettiRow, BettiTable};
use crate::error::{Error, Result};

/// A query for `h^q(P^n, Ω^p(k))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimQuery {
    pub n: u32,
    pub p: u32,
    pub k: i64,
    pub q: u32,
}

impl DimQuery {
    pub fn new(n: u32, p: u32, k: i64, q: u32) -> Result<Self> {
        if n == 0 || p > n || q > n {
            return Err(Error::Domain(format!(
                "h^{q}(P^{n}, Omega^{p}({k})) requires n >= 1 and p, q in 0..=n"
            )));
        }
        Ok(Self { n, p, k, q })
    }

    pub fn eval(&self) -> Result<u64> {
        bott(self.n, self.p, self.k, self.q)
    }
}

/// Euclidean division of `t_n(ℓ)` by `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QRSplit {
    pub t: u64,
    pub q: u64,
    pub r: u64,
}

/// Predicted `a_{n-2}` and `b_{n-1}` for `a` general points in `P^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Prediction {
    pub n: u32,
    pub a: u64,
    pub d: i64,
    /// `h^0(Ω^{n-1}(d+n-1))`, the source dimension of the restriction map.
    pub h: u64,
    pub a_nm2: u64,
    pub b_nm1: u64,
}

fn overflow(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

/// Binomial coefficient; zero outside `0 <= k <= m`.
pub fn binom(m: i64, k: i64) -> Result<u64> {
    if k < 0 || m < 0 || k > m {
        return Ok(0);
    }
    let k = k.min(m - k) as u128;
    let m = m as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (m - i) is divisible by (i + 1) at every step.
        acc = acc
            .checked_mul(m - i)
            .ok_or_else(|| overflow("binomial coefficient"))?
            / (i + 1);
    }
    u64::try_from(acc).map_err(|_| overflow("binomial coefficient"))
}

/// `o_n(ℓ) = h^0(P^n, O(ℓ))`. Also defined for `n = 0` (a point).
pub fn o(n: u32, l: i64) -> Result<u64> {
    if l < 0 {
        return Ok(0);
    }
    let top = (n as i64)
        .checked_add(l)
        .ok_or_else(|| overflow("o_n(l)"))?;
    binom(top, n as i64)
}

/// `t_n(ℓ) = h^0(P^n, T(ℓ))`, from the twisted Euler sequence.
pub fn t(n: u32, l: i64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("t_n(l) requires n >= 1".into()));
    }
    if n == 1 {
        // T_{P^1} = O(2)
        return o(1, l + 2);
    }
    if l <= -2 {
        return Ok(0);
    }
    let free = o(n, l + 1)?
        .checked_mul(n as u64 + 1)
        .ok_or_else(|| overflow("t_n(l)"))?;
    free.checked_sub(o(n, l)?)
        .ok_or_else(|| Error::Inconsistency(format!("negative t_{n}({l})")))
}

/// Bott's formula for `h^q(P^n, Ω^p(k))`.
pub fn bott(n: u32, p: u32, k: i64, q: u32) -> Result<u64> {
    DimQuery::new(n, p, k, q)?;
    if q == n {
        // Serre duality: H^n(Ω^p(k)) ≅ H^0(Ω^{n-p}(-k))^*
        if n == 0 {
            unreachable!();
        }
        return bott_h0(n, n - p, -k);
    }
    if q == 0 {
        return bott_h0(n, p, k);
    }
    Ok(u64::from(q == p && k == 0))
}

fn bott_h0(n: u32, p: u32, k: i64) -> Result<u64> {
    if k == 0 && p == 0 {
        return Ok(1);
    }
    if k <= p as i64 {
        return Ok(0);
    }
    let left = binom(k - 1, p as i64)?;
    let right = binom(k + n as i64 - p as i64, (n - p) as i64)?;
    left.checked_mul(right).ok_or_else(|| overflow("Bott h^0"))
}

pub fn qr_split(n: u32, l: i64) -> Result<QRSplit> {
    let t = t(n, l)?;
    let n = n as u64;
    Ok(QRSplit {
        t,
        q: t / n,
        r: t % n,
    })
}

/// `n·o_n(ℓ+1) − t_{n−1}(ℓ) = t_n(ℓ−1)` and `t_n(ℓ−1) ≥ n·o_n(ℓ)`.
pub fn euler_identity_check(n: u32, l: i64) -> Result<bool> {
    if n < 2 || l < 0 {
        return Err(Error::Domain(
            "euler_identity_check requires n >= 2 and l >= 0".into(),
        ));
    }
    let nn = n as u64;
    let lhs = o(n, l + 1)?
        .checked_mul(nn)
        .ok_or_else(|| overflow("n*o_n(l+1)"))?;
    let lhs = lhs.checked_sub(t(n - 1, l)?);
    let prev = t(n, l - 1)?;
    let bound = o(n, l)?
        .checked_mul(nn)
        .ok_or_else(|| overflow("n*o_n(l)"))?;
    Ok(lhs == Some(prev) && prev >= bound)
}

/// Smallest degree carrying a form through `a` general points.
pub fn d_min(n: u32, a: u64) -> Result<i64> {
    if n == 0 {
        return Err(Error::Domain("d_min requires n >= 1".into()));
    }
    if a == 0 {
        return Err(Error::Domain("d_min requires a >= 1".into()));
    }
    let mut l = 0i64;
    while o(n, l)? <= a {
        l += 1;
    }
    Ok(l)
}

pub fn theorem1_prediction(n: u32, a: u64) -> Result<Theorem1Prediction> {
    if n < 2 {
        return Err(Error::Domain("theorem1_prediction requires n >= 2".into()));
    }
    let d = d_min(n, a)?;
    let h = bott(n, n - 1, d + n as i64 - 1, 0)?;
    let via_tangent = t(n, d - 2)?;
    if h != via_tangent {
        return Err(Error::Inconsistency(format!(
            "h^0(Omega^{}({})) = {h} but t_{n}({}) = {via_tangent}",
            n - 1,
            d + n as i64 - 1,
            d - 2
        )));
    }
    let na = (n as u64).checked_mul(a).ok_or_else(|| overflow("n*a"))?;
    Ok(Theorem1Prediction {
        n,
        a,
        d,
        h,
        a_nm2: na.saturating_sub(h),
        b_nm1: h.saturating_sub(na),
    })
}

/// Betti numbers predicted by maximal rank of every restriction map
/// `H^0(Ω^p(d+p)) → H^0(Ω^p(d+p)|_R)`.
pub fn mrc_prediction(n: u32, a: u64) -> Result<BettiTable> {
    let d = d_min(n, a)?;
    let mut rows = Vec::with_capacity(n as usize + 1);
    for p in 0..=n {
        let a_p = if p < n {
            let fibers = binom(n as i64, p as i64 + 1)?
                .checked_mul(a)
                .ok_or_else(|| overflow("fiber total"))?;
            fibers.saturating_sub(bott(n, p + 1, d + p as i64 + 1, 0)?)
        } else {
            0
        };
        let fibers = binom(n as i64, p as i64)?
            .checked_mul(a)
            .ok_or_else(|| overflow("fiber total"))?;
        let b_p = bott(n, p, d + p as i64, 0)?.saturating_sub(fibers);
        rows.push(BettiRow { p, a_p, b_p });
    }
    let table = BettiTable { n, a, d, rows };

    let last = &table.rows[n as usize];
    if last.a_p != 0 || last.b_p != 0 {
        return Err(Error::Inconsistency(format!(
            "predicted a_n = {}, b_n = {} (both must vanish)",
            last.a_p, last.b_p
        )));
    }
    let a_nm1 = table.rows[n as usize - 1].a_p;
    let closed = a
        .checked_sub(o(n, d - 1)?)
        .ok_or_else(|| Error::Inconsistency("a < o_n(d-1)".into()))?;
    if a_nm1 != closed {
        return Err(Error::Inconsistency(format!(
            "a_(n-1) = {a_nm1} but a - o_n(d-1) = {closed}"
        )));
    }
    let b0 = o(n, d)? - a;
    if table.rows[0].b_p != b0 {
        return Err(Error::Inconsistency(format!(
            "b_0 = {} but o_n(d) - a = {b0}",
            table.rows[0].b_p
        )));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Pascal-triangle oracle, independent of the multiplicative formula.
    fn pascal(m: usize) -> Vec<Vec<u64>> {
        let mut rows = vec![vec![1u64]];
        for i in 1..=m {
            let prev = &rows[i - 1];
            let mut row = vec![1u64; i + 1];
            for j in 1..i {
                row[j] = prev[j - 1] + prev[j];
            }
            rows.push(row);
        }
        rows
    }

    // Count exponent vectors directly.
    fn count_monomials(vars: u32, deg: i64) -> u64 {
        if deg < 0 {
            return 0;
        }
        if vars == 1 {
            return 1;
        }
        (0..=deg).map(|e| count_monomials(vars - 1, deg - e)).sum()
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(4, 2).unwrap(), 6);
        assert_eq!(binom(3, 5).unwrap(), 0);
        assert_eq!(binom(7, 5).unwrap(), 21);
        assert_eq!(binom(7, -1).unwrap(), 0);
        assert_eq!(binom(0, 0).unwrap(), 1);
    }

    #[test]
    fn binom_matches_pascal() {
        let tri = pascal(60);
        for (m, row) in tri.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                assert_eq!(binom(m as i64, k as i64).unwrap(), v, "C({m},{k})");
            }
        }
    }

    #[test]
    fn binom_overflow_errors() {
        assert!(matches!(binom(200, 100), Err(Error::Overflow(_))));
        assert_eq!(binom(67, 33).unwrap(), 14226520737620288370);
    }

    #[test]
    fn o_examples() {
        assert_eq!(o(2, 2).unwrap(), 6);
        assert_eq!(o(3, -1).unwrap(), 0);
        assert_eq!(o(3, 1).unwrap(), 4);
        assert_eq!(o(0, 4).unwrap(), 1);
        for n in 1..6 {
            for l in -3..9 {
                assert_eq!(o(n, l).unwrap(), count_monomials(n + 1, l));
            }
        }
    }

    #[test]
    fn t_examples() {
        assert_eq!(t(2, 0).unwrap(), 8);
        assert_eq!(t(3, 1).unwrap(), 36);
        assert_eq!(t(1, 3).unwrap(), 6);
        assert_eq!(t(2, 1).unwrap(), 15);
        assert_eq!(t(2, -2).unwrap(), 0);
        assert_eq!(t(3, -1).unwrap(), 4);
    }

    #[test]
    fn t_euler_form_nonnegative() {
        for n in 1..8 {
            for l in -1..20 {
                let euler = (n as u64 + 1) * o(n, l + 1).unwrap() - o(n, l).unwrap();
                assert_eq!(t(n, l).unwrap(), euler, "n={n} l={l}");
            }
        }
    }

    #[test]
    fn bott_examples() {
        assert_eq!(bott(3, 1, 5, 0).unwrap(), 84);
        assert_eq!(bott(2, 0, 3, 0).unwrap(), 10);
        assert_eq!(bott(2, 1, 0, 1).unwrap(), 1);
        assert_eq!(bott(2, 0, 0, 0).unwrap(), 1);
        assert_eq!(bott(2, 2, 0, 2).unwrap(), 1);
        // canonical bundle: H^n(O(-n-1)) = 1
        assert_eq!(bott(3, 0, -4, 3).unwrap(), 1);
        assert!(bott(2, 3, 0, 0).is_err());
    }

    #[test]
    fn bott_line_bundles_are_o() {
        for n in 1..6 {
            for k in -5..10 {
                assert_eq!(bott(n, 0, k, 0).unwrap(), o(n, k).unwrap());
            }
        }
    }

    #[test]
    fn bott_omega_n_minus_1_is_twisted_tangent() {
        for n in 2..7 {
            for k in -4..(n as i64 + 16) {
                assert_eq!(
                    bott(n, n - 1, k, 0).unwrap(),
                    t(n, k - n as i64 - 1).unwrap(),
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn serre_duality() {
        for n in 1..=5 {
            for p in 0..=n {
                for q in 0..=n {
                    for k in -10..=10 {
                        assert_eq!(
                            bott(n, p, k, q).unwrap(),
                            bott(n, n - p, -k, n - q).unwrap(),
                            "n={n} p={p} k={k} q={q}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn qr_split_examples() {
        assert_eq!(qr_split(2, 1).unwrap(), QRSplit { t: 15, q: 7, r: 1 });
        assert_eq!(qr_split(3, 1).unwrap(), QRSplit { t: 36, q: 12, r: 0 });
        for l in -1..10 {
            assert_eq!(qr_split(1, l).unwrap().r, 0);
        }
        for n in 1..7 {
            for l in -3..15 {
                let s = qr_split(n, l).unwrap();
                assert_eq!(s.t, n as u64 * s.q + s.r);
                assert!(s.r < n as u64);
            }
        }
    }

    #[test]
    fn euler_identity_examples() {
        assert!(euler_identity_check(2, 1).unwrap());
        assert!(euler_identity_check(3, 2).unwrap());
        assert!(euler_identity_check(4, 0).unwrap());
        assert!(euler_identity_check(1, 0).is_err());
    }

    #[test]
    fn d_min_examples() {
        assert_eq!(d_min(2, 5).unwrap(), 2);
        assert_eq!(d_min(2, 3).unwrap(), 2);
        for n in 1..6 {
            assert_eq!(d_min(n, 1).unwrap(), 1);
        }
        assert!(d_min(2, 0).is_err());
    }

    #[test]
    fn theorem1_prediction_examples() {
        let p = theorem1_prediction(2, 5).unwrap();
        assert_eq!((p.d, p.h, p.a_nm2, p.b_nm1), (2, 8, 2, 0));
        let p = theorem1_prediction(2, 3).unwrap();
        assert_eq!((p.d, p.h, p.a_nm2, p.b_nm1), (2, 8, 0, 2));
        // balanced case in P^3: a = 5 gives d = 2, h = t(3,0) = 15 = 3*5
        let p = theorem1_prediction(3, 5).unwrap();
        assert_eq!((p.d, p.h, p.a_nm2, p.b_nm1), (2, 15, 0, 0));
        for n in 2..6 {
            for a in 1..60 {
                let p = theorem1_prediction(n, a).unwrap();
                assert_eq!(p.a_nm2 * p.b_nm1, 0);
            }
        }
    }

    #[test]
    fn mrc_prediction_examples() {
        let t = mrc_prediction(2, 5).unwrap();
        let pairs: Vec<_> = t.rows.iter().map(|r| (r.b_p, r.a_p)).collect();
        assert_eq!(pairs, vec![(1, 2), (0, 2), (0, 0)]);
        let t = mrc_prediction(2, 3).unwrap();
        let pairs: Vec<_> = t.rows.iter().map(|r| (r.b_p, r.a_p)).collect();
        assert_eq!(pairs, vec![(3, 0), (2, 0), (0, 0)]);
    }

    #[test]
    fn mrc_prediction_ghost_terms_one_sided() {
        for n in 1..6 {
            for a in 1..80 {
                let t = mrc_prediction(n, a).unwrap();
                assert_eq!(t.rows[0].b_p, o(n, t.d).unwrap() - a);
                for p in 0..n as usize {
                    assert_eq!(t.rows[p].a_p * t.rows[p + 1].b_p, 0, "n={n} a={a} p={p}");
                }
            }
        }
    }
}
