use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactdims::{bott, o, t};

/// A bundle on `P^n`, possibly supported on a hyperplane `P^{n−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "twist")]
pub enum BundleKind {
    /// `⊕ O(k_i)` on `P^n`.
    Free(Vec<i64>),
    /// `T_{P^n}(ℓ)`.
    Tangent(i64),
    /// `T_{P^{n−1}}(ℓ)` on a hyperplane.
    TangentOnHyperplane(i64),
    /// `O_{P^{n−1}}(k)` on a hyperplane.
    LineOnHyperplane(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicBundle {
    pub space_dim: u32,
    pub kind: BundleKind,
}

fn to_i64(v: u64) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow(format!("{v} does not fit in i64")))
}

impl SymbolicBundle {
    pub fn free(n: u32, twists: Vec<i64>) -> Self {
        Self {
            space_dim: n,
            kind: BundleKind::Free(twists),
        }
    }

    /// `O(k)^copies` on `P^n`.
    pub fn free_uniform(n: u32, copies: usize, k: i64) -> Self {
        Self::free(n, vec![k; copies])
    }

    pub fn tangent(n: u32, l: i64) -> Self {
        Self {
            space_dim: n,
            kind: BundleKind::Tangent(l),
        }
    }

    pub fn tangent_on_hyperplane(n: u32, l: i64) -> Self {
        Self {
            space_dim: n,
            kind: BundleKind::TangentOnHyperplane(l),
        }
    }

    pub fn line_on_hyperplane(n: u32, k: i64) -> Self {
        Self {
            space_dim: n,
            kind: BundleKind::LineOnHyperplane(k),
        }
    }

    pub fn rank(&self) -> i64 {
        let n = self.space_dim as i64;
        match &self.kind {
            BundleKind::Free(tw) => tw.len() as i64,
            BundleKind::Tangent(_) => n,
            BundleKind::TangentOnHyperplane(_) => n - 1,
            BundleKind::LineOnHyperplane(_) => 1,
        }
    }

    pub fn h0(&self) -> Result<i64> {
        let n = self.space_dim;
        let v = match &self.kind {
            BundleKind::Free(tw) => {
                let mut s = 0u64;
                for &k in tw {
                    s = s
                        .checked_add(o(n, k)?)
                        .ok_or_else(|| Error::Overflow("h0 of free bundle".into()))?;
                }
                s
            }
            BundleKind::Tangent(l) => t(n, *l)?,
            BundleKind::TangentOnHyperplane(l) => {
                if n <= 1 {
                    0
                } else {
                    t(n - 1, *l)?
                }
            }
            BundleKind::LineOnHyperplane(k) => o(n.saturating_sub(1), *k)?,
        };
        to_i64(v)
    }

    pub fn h1(&self) -> Result<i64> {
        let n = self.space_dim;
        let v = match &self.kind {
            BundleKind::Free(_) if n == 0 => 0,
            BundleKind::Free(tw) => {
                let mut s = 0u64;
                for &k in tw {
                    s += bott(n, 0, k, 1)?;
                }
                s
            }
            // T(ℓ) ≅ Ω^{n−1}(ℓ+n+1)
            BundleKind::Tangent(l) => bott(n, n - 1, l + n as i64 + 1, 1)?,
            BundleKind::TangentOnHyperplane(l) => {
                if n <= 1 {
                    0
                } else {
                    let m = n - 1;
                    bott(m, m - 1, l + m as i64 + 1, 1)?
                }
            }
            BundleKind::LineOnHyperplane(k) => {
                if n <= 1 {
                    0
                } else {
                    bott(n - 1, 0, *k, 1)?
                }
            }
        };
        to_i64(v)
    }

    pub fn is_on_hyperplane(&self) -> bool {
        matches!(
            self.kind,
            BundleKind::TangentOnHyperplane(_) | BundleKind::LineOnHyperplane(_)
        )
    }

    /// The same bundle viewed on the hyperplane as its own projective space.
    pub fn on_hyperplane_as_ambient(&self) -> Result<Self> {
        let m = self
            .space_dim
            .checked_sub(1)
            .filter(|&m| m >= 1)
            .ok_or_else(|| {
                Error::Domain(format!("{self} has no positive-dimensional hyperplane"))
            })?;
        Ok(match &self.kind {
            BundleKind::TangentOnHyperplane(l) => Self::tangent(m, *l),
            BundleKind::LineOnHyperplane(k) => Self::free(m, vec![*k]),
            BundleKind::Free(tw) => Self::free(m, tw.clone()),
            BundleKind::Tangent(_) => {
                return Err(Error::RuleInapplicable(format!(
                    "restriction of {self} to a hyperplane is not a tracked bundle"
                )))
            }
        })
    }

    /// `F(−X′)` for a hyperplane `X′`.
    pub fn twist_down(&self) -> Result<Self> {
        Ok(match &self.kind {
            BundleKind::Free(tw) => Self::free(self.space_dim, tw.iter().map(|k| k - 1).collect()),
            BundleKind::Tangent(l) => Self::tangent(self.space_dim, l - 1),
            _ => {
                return Err(Error::RuleInapplicable(format!(
                    "{self} is supported on a hyperplane"
                )))
            }
        })
    }

    /// `O^c(k)` on `P^n` as `(c, k)`.
    pub fn as_uniform_free(&self) -> Option<(usize, i64)> {
        match &self.kind {
            BundleKind::Free(tw) if !tw.is_empty() && tw.iter().all(|&k| k == tw[0]) => {
                Some((tw.len(), tw[0]))
            }
            _ => None,
        }
    }
}

/// Kernel `E` of `F → F′` and the kernel `F″` of `F|_{X′} → F′`.
///
/// Only the two transforms along the Euler sequence are tracked:
/// `T(ℓ) → O_{X′}(ℓ+1)` with kernel `O^n(ℓ+1)` and `F″ = T_{X′}(ℓ)`, and
/// `O^n(ℓ+1) → T_{X′}(ℓ)` with kernel `T(ℓ−1)` and `F″ = O_{X′}(ℓ)`.
pub fn elementary_transform(
    f: &SymbolicBundle,
    f_prime: &SymbolicBundle,
) -> Result<(SymbolicBundle, SymbolicBundle)> {
    let n = f.space_dim;
    if f_prime.space_dim != n {
        return Err(Error::DimensionMismatch(format!(
            "{f} and {f_prime} live on different spaces"
        )));
    }
    match (&f.kind, &f_prime.kind) {
        (BundleKind::Tangent(l), BundleKind::LineOnHyperplane(k)) if *k == l + 1 => Ok((
            SymbolicBundle::free_uniform(n, n as usize, l + 1),
            SymbolicBundle::tangent_on_hyperplane(n, *l),
        )),
        (BundleKind::Free(_), BundleKind::TangentOnHyperplane(l))
            if f.as_uniform_free() == Some((n as usize, l + 1)) =>
        {
            Ok((
                SymbolicBundle::tangent(n, l - 1),
                SymbolicBundle::line_on_hyperplane(n, *l),
            ))
        }
        _ => Err(Error::RuleInapplicable(format!(
            "no tracked elementary transform of {f} along {f_prime}"
        ))),
    }
}

impl fmt::Display for SymbolicBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.space_dim;
        match &self.kind {
            BundleKind::Free(tw) => {
                if tw.is_empty() {
                    return write!(f, "0");
                }
                let mut groups: Vec<(i64, usize)> = Vec::new();
                for &k in tw {
                    match groups.last_mut() {
                        Some((g, c)) if *g == k => *c += 1,
                        _ => groups.push((k, 1)),
                    }
                }
                for (i, (k, c)) in groups.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    match c {
                        1 => write!(f, "O_P{n}({k})")?,
                        _ => write!(f, "O^{c}_P{n}({k})")?,
                    }
                }
                Ok(())
            }
            BundleKind::Tangent(l) => write!(f, "T_P{n}({l})"),
            BundleKind::TangentOnHyperplane(l) => write!(f, "T_P{}({l})", n.saturating_sub(1)),
            BundleKind::LineOnHyperplane(k) => write!(f, "O_P{}({k})", n.saturating_sub(1)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_and_sections() {
        let t2 = SymbolicBundle::tangent(2, 1);
        assert_eq!((t2.rank(), t2.h0().unwrap(), t2.h1().unwrap()), (2, 15, 0));
        let f = SymbolicBundle::free_uniform(2, 2, 2);
        assert_eq!((f.rank(), f.h0().unwrap(), f.h1().unwrap()), (2, 12, 0));
        let th = SymbolicBundle::tangent_on_hyperplane(3, 1);
        assert_eq!((th.rank(), th.h0().unwrap()), (2, 15));
        let lh = SymbolicBundle::line_on_hyperplane(2, 2);
        assert_eq!((lh.rank(), lh.h0().unwrap()), (1, 3));
        assert_eq!(SymbolicBundle::tangent(2, -3).h1().unwrap(), 1);
        assert_eq!(SymbolicBundle::tangent(3, -3).h1().unwrap(), 0);
        assert_eq!(SymbolicBundle::free(1, vec![-3]).h1().unwrap(), 2);
        assert_eq!(SymbolicBundle::free(3, vec![-5, 4]).h1().unwrap(), 0);
        let p0 = SymbolicBundle::tangent_on_hyperplane(1, 4);
        assert_eq!((p0.rank(), p0.h0().unwrap()), (0, 0));
    }

    #[test]
    fn tangent_on_p1_is_line_bundle() {
        for l in -4..6 {
            let tb = SymbolicBundle::tangent(1, l);
            let lb = SymbolicBundle::free(1, vec![l + 2]);
            assert_eq!(tb.h0().unwrap(), lb.h0().unwrap());
            assert_eq!(tb.h1().unwrap(), lb.h1().unwrap());
        }
    }

    #[test]
    fn transforms() {
        let (e, f2) = elementary_transform(
            &SymbolicBundle::tangent(3, 1),
            &SymbolicBundle::line_on_hyperplane(3, 2),
        )
        .unwrap();
        assert_eq!(e, SymbolicBundle::free_uniform(3, 3, 2));
        assert_eq!(f2, SymbolicBundle::tangent_on_hyperplane(3, 1));
        // h0 is additive along 0 → E → F → F′ → 0 when h1(E) = 0
        let f = SymbolicBundle::tangent(3, 1);
        let fp = SymbolicBundle::line_on_hyperplane(3, 2);
        assert_eq!(f.h0().unwrap(), e.h0().unwrap() + fp.h0().unwrap());

        let (e, f2) = elementary_transform(&e, &f2).unwrap();
        assert_eq!(e, SymbolicBundle::tangent(3, 0));
        assert_eq!(f2, SymbolicBundle::line_on_hyperplane(3, 1));
        assert!(elementary_transform(
            &SymbolicBundle::tangent(3, 1),
            &SymbolicBundle::line_on_hyperplane(3, 1)
        )
        .is_err());
    }

    #[test]
    fn display() {
        assert_eq!(SymbolicBundle::tangent(2, 1).to_string(), "T_P2(1)");
        assert_eq!(
            SymbolicBundle::free_uniform(2, 2, 2).to_string(),
            "O^2_P2(2)"
        );
        assert_eq!(
            SymbolicBundle::line_on_hyperplane(2, 2).to_string(),
            "O_P1(2)"
        );
        assert_eq!(
            SymbolicBundle::free(3, vec![2, 2, 1]).to_string(),
            "O^2_P3(2)+O_P3(1)"
        );
    }
}
