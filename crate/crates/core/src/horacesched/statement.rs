use std::fmt;

use serde::{Deserialize, Serialize};

use super::bundle::SymbolicBundle;
use crate::error::Result;

/// The three interpolation statements of the induction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Statement {
    /// Maximal rank at general points plus `a` arbitrary fiber quotients.
    R { f: SymbolicBundle, a: i64 },
    /// Bijectivity with `z` points of `X`, `y` points of `X′` seen through
    /// `F′`, an `α`-dimensional quotient of `F′` and a `β`-dimensional
    /// quotient of `F`.
    #[serde(rename = "RB")]
    Rb {
        f: SymbolicBundle,
        f_prime: SymbolicBundle,
        z: i64,
        y: i64,
        alpha: i64,
        beta: i64,
    },
    /// Bijectivity with `z` points of `F`, `y` points of the quotient `G`
    /// and an `a`-dimensional quotient of `G`.
    #[serde(rename = "MB")]
    Mb {
        f: SymbolicBundle,
        g: SymbolicBundle,
        z: i64,
        y: i64,
        a: i64,
    },
}

impl Statement {
    pub fn main_bundle(&self) -> &SymbolicBundle {
        match self {
            Statement::R { f, .. } | Statement::Rb { f, .. } | Statement::Mb { f, .. } => f,
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::R { f, a } => write!(fm, "R({f}; {a})"),
            Statement::Rb {
                f,
                f_prime,
                z,
                y,
                alpha,
                beta,
            } => write!(fm, "RB({f}, {f_prime}, {z}, {y}; {alpha}, {beta})"),
            Statement::Mb { f, g, z, y, a } => write!(fm, "MB({f}, {g}, {z}, {y}; {a})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

impl Relation {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
        }
    }
}

/// One checked side condition `lhs relation rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub lhs: i64,
    pub rhs: i64,
    pub relation: Relation,
    pub pass: bool,
}

impl Condition {
    pub fn new(name: impl Into<String>, lhs: i64, relation: Relation, rhs: i64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            relation,
            pass: relation.holds(lhs, rhs),
        }
    }
}

fn nonneg(out: &mut Vec<Condition>, params: &[(&str, i64)]) {
    for &(name, v) in params {
        out.push(Condition::new(format!("nonneg {name}"), 0, Relation::Le, v));
    }
}

/// Every side condition of the statement, passing or not.
pub fn conditions(s: &Statement) -> Result<Vec<Condition>> {
    let mut out = Vec::new();
    match s {
        Statement::R { a, .. } => nonneg(&mut out, &[("a", *a)]),
        Statement::Rb {
            f,
            f_prime,
            z,
            y,
            alpha,
            beta,
        } => {
            nonneg(
                &mut out,
                &[("z", *z), ("y", *y), ("alpha", *alpha), ("beta", *beta)],
            );
            let (r, rp) = (f.rank(), f_prime.rank());
            let b = if *beta != 0 { rp } else { 0 };
            out.push(Condition::new(
                "RB1 balance",
                r * z + rp * y + alpha + beta,
                Relation::Eq,
                f.h0()?,
            ));
            out.push(Condition::new(
                "RB2 hyperplane",
                rp * y + alpha + b,
                Relation::Le,
                f_prime.h0()?,
            ));
            out.push(Condition::new(
                "RB3 alpha <= rank F'",
                *alpha,
                Relation::Le,
                rp,
            ));
            if *beta != 0 {
                out.push(Condition::new(
                    "RB4 rank F' <= beta",
                    rp,
                    Relation::Le,
                    *beta,
                ));
                out.push(Condition::new("RB4 beta < rank F", *beta, Relation::Lt, r));
            }
        }
        Statement::Mb { f, g, z, y, a } => {
            nonneg(&mut out, &[("z", *z), ("y", *y), ("a", *a)]);
            let (r, rg) = (f.rank(), g.rank());
            out.push(Condition::new(
                "MB1 balance",
                r * z + rg * y + a,
                Relation::Eq,
                f.h0()?,
            ));
            out.push(Condition::new(
                "MB2 quotient",
                rg * (z + y) + a,
                Relation::Le,
                g.h0()?,
            ));
            out.push(Condition::new("MB3 a < rank G", *a, Relation::Lt, rg));
        }
    }
    Ok(out)
}

/// The failing side conditions; empty iff the statement is well posed.
pub fn check_conditions(s: &Statement) -> Result<Vec<Condition>> {
    Ok(conditions(s)?.into_iter().filter(|c| !c.pass).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rb(z: i64, y: i64, alpha: i64, beta: i64) -> Statement {
        Statement::Rb {
            f: SymbolicBundle::tangent(2, 1),
            f_prime: SymbolicBundle::line_on_hyperplane(2, 2),
            z,
            y,
            alpha,
            beta,
        }
    }

    #[test]
    fn rb_examples() {
        assert!(check_conditions(&rb(7, 0, 0, 1)).unwrap().is_empty());
        let v = check_conditions(&rb(6, 0, 0, 1)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].name, "RB1 balance");
        assert_eq!((v[0].lhs, v[0].rhs), (13, 15));
        assert_eq!(
            rb(7, 0, 0, 1).to_string(),
            "RB(T_P2(1), O_P1(2), 7, 0; 0, 1)"
        );
    }

    #[test]
    fn mb_examples() {
        let mb = |z, y, a| Statement::Mb {
            f: SymbolicBundle::free_uniform(2, 3, 1),
            g: SymbolicBundle::tangent(2, 0),
            z,
            y,
            a,
        };
        // 3z + 2y + a = 9, 2(z+y) + a <= 8
        assert!(check_conditions(&mb(3, 0, 0)).unwrap().is_empty());
        assert!(check_conditions(&mb(1, 3, 0)).unwrap().is_empty());
        let v = check_conditions(&mb(1, 2, 2)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].name, "MB3 a < rank G");
    }

    #[test]
    fn negative_parameters_are_violations() {
        let v = check_conditions(&rb(8, -1, 0, 0)).unwrap();
        assert!(v.iter().any(|c| c.name == "nonneg y"));
    }

    #[test]
    fn condition_json_shape() {
        let c = Condition::new("RB1 balance", 15, Relation::Eq, 15);
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["relation"], "==");
        assert_eq!(v["pass"], true);
    }
}
