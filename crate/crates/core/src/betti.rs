//! Graded Betti numbers of the ideal of random points.
//!
//! With `d` the least degree of a form through the points, the `p`-th
//! module of the minimal resolution is `S(−d−p−1)^{a_p} ⊕ S(−d−p)^{b_p}`.
//! Both numbers are read off the restriction maps
//! `H^0(Ω^p(d+p)) → H^0(Ω^p(d+p)|_R)`: `b_p` is the kernel of the map for
//! `p` and `a_p` the cokernel of the map for `p+1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactdims::{binom, bott, d_min, theorem1_prediction, Theorem1Prediction};
use crate::ffla::random_points;
use crate::maxrank::TrialConfig;
use crate::sections::{eval_koszul, koszul_basis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiRow {
    pub p: u32,
    pub a_p: u64,
    pub b_p: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub n: u32,
    pub a: u64,
    pub d: i64,
    /// Rows for `p = 0..=n`.
    pub rows: Vec<BettiRow>,
}

impl BettiTable {
    pub fn row(&self, p: u32) -> Option<&BettiRow> {
        self.rows.get(p as usize)
    }
}

pub fn betti_table(n: u32, a: u64, cfg: &TrialConfig) -> Result<BettiTable> {
    if n == 0 || a == 0 {
        return Err(Error::Domain(
            "betti_table requires n >= 1 and a >= 1".into(),
        ));
    }
    if cfg.trials == 0 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    let d = d_min(n, a)?;
    let field = cfg.field;
    let mut sources = Vec::with_capacity(n as usize + 1);
    let mut fibers = Vec::with_capacity(n as usize + 1);
    for p in 0..=n {
        let k = d + p as i64;
        // the cokernel is h^1(Ω^p(k) ⊗ I_R) only if h^1(Ω^p(k)) vanishes
        let h1 = bott(n, p, k, 1)?;
        if p > 0 && h1 != 0 {
            return Err(Error::Obstruction(format!(
                "h^1(Omega^{p}({k})) = {h1}, a_{} is not computable",
                p - 1
            )));
        }
        let basis = koszul_basis(field, n, p, k)?;
        fibers.push(binom(n as i64, p as i64)? * a);
        sources.push(basis);
    }

    let mut best: Option<Vec<BettiRow>> = None;
    for trial in 0..cfg.trials {
        let pts = random_points(field, n, a as usize, &mut cfg.rng(trial));
        let mut ranks = Vec::with_capacity(sources.len());
        for basis in &sources {
            ranks.push(eval_koszul(basis, field, &pts)?.rank() as u64);
        }
        let rows: Vec<BettiRow> = (0..=n as usize)
            .map(|p| BettiRow {
                p: p as u32,
                a_p: if p < n as usize {
                    fibers[p + 1] - ranks[p + 1]
                } else {
                    0
                },
                b_p: sources[p].dim() as u64 - ranks[p],
            })
            .collect();
        // generic Betti numbers are the entrywise minima
        best = Some(match best {
            None => rows,
            Some(prev) => prev
                .iter()
                .zip(&rows)
                .map(|(x, y)| BettiRow {
                    p: x.p,
                    a_p: x.a_p.min(y.a_p),
                    b_p: x.b_p.min(y.b_p),
                })
                .collect(),
        });
    }
    Ok(BettiTable {
        n,
        a,
        d,
        rows: best.expect("at least one trial"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrcRowDiff {
    pub p: u32,
    pub a_p: u64,
    pub b_p: u64,
    pub pred_a_p: u64,
    pub pred_b_p: u64,
    pub a_match: bool,
    pub b_match: bool,
}

impl MrcRowDiff {
    pub fn matches(&self) -> bool {
        self.a_match && self.b_match
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrcDiff {
    pub n: u32,
    pub a: u64,
    pub rows: Vec<MrcRowDiff>,
    pub all_match: bool,
}

impl MrcDiff {
    /// `(p, "a" | "b")` for every differing entry.
    pub fn mismatches(&self) -> Vec<(u32, &'static str)> {
        let mut out = Vec::new();
        for r in &self.rows {
            if !r.a_match {
                out.push((r.p, "a"));
            }
            if !r.b_match {
                out.push((r.p, "b"));
            }
        }
        out
    }
}

pub fn compare_mrc(computed: &BettiTable, predicted: &BettiTable) -> Result<MrcDiff> {
    if computed.n != predicted.n
        || computed.a != predicted.a
        || computed.rows.len() != predicted.rows.len()
    {
        return Err(Error::DimensionMismatch(format!(
            "cannot compare tables for (n, a) = ({}, {}) and ({}, {})",
            computed.n, computed.a, predicted.n, predicted.a
        )));
    }
    let rows: Vec<MrcRowDiff> = computed
        .rows
        .iter()
        .zip(&predicted.rows)
        .map(|(c, p)| MrcRowDiff {
            p: c.p,
            a_p: c.a_p,
            b_p: c.b_p,
            pred_a_p: p.a_p,
            pred_b_p: p.b_p,
            a_match: c.a_p == p.a_p,
            b_match: c.b_p == p.b_p,
        })
        .collect();
    let all_match = rows.iter().all(MrcRowDiff::matches);
    Ok(MrcDiff {
        n: computed.n,
        a: computed.a,
        rows,
        all_match,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub prediction: Theorem1Prediction,
    pub a_nm2: u64,
    pub b_nm1: u64,
    pub matches: bool,
}

/// Compares `(a_{n−2}, b_{n−1})` of a computed table with the closed forms.
pub fn theorem1_from_table(table: &BettiTable) -> Result<Theorem1Report> {
    let n = table.n;
    let prediction = theorem1_prediction(n, table.a)?;
    let a_nm2 = table.rows[n as usize - 2].a_p;
    let b_nm1 = table.rows[n as usize - 1].b_p;
    Ok(Theorem1Report {
        matches: a_nm2 == prediction.a_nm2 && b_nm1 == prediction.b_nm1,
        prediction,
        a_nm2,
        b_nm1,
    })
}

pub fn theorem1_check(n: u32, a: u64, cfg: &TrialConfig) -> Result<Theorem1Report> {
    if n < 2 {
        return Err(Error::Domain("theorem1_check requires n >= 2".into()));
    }
    theorem1_from_table(&betti_table(n, a, cfg)?)
}
