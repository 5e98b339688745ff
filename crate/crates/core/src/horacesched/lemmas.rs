use serde::{Deserialize, Serialize};

use super::bundle::{elementary_transform, BundleKind, SymbolicBundle};
use super::statement::{check_conditions, conditions, Condition, Relation, Statement};
use crate::error::{Error, Result};
use crate::exactdims::{o, t};

/// Name of the step applied at a trace node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "lemred1")]
    Lemred1,
    #[serde(rename = "lemred2")]
    Lemred2,
    #[serde(rename = "alakon")]
    Alakon,
    #[serde(rename = "iv-case1")]
    IvCase1,
    #[serde(rename = "iv-case2")]
    IvCase2,
    #[serde(rename = "iv-case3")]
    IvCase3,
    #[serde(rename = "iv-case4")]
    IvCase4,
    #[serde(rename = "lemRB")]
    LemRB,
    #[serde(rename = "lemMB")]
    LemMB,
    #[serde(rename = "base-n1")]
    BaseN1,
    #[serde(rename = "trivial")]
    Trivial,
    /// `R(T(ℓ); a)` through the bijectivity statement for `T(ℓ)`.
    #[serde(rename = "iii")]
    Iii,
    #[serde(rename = "stuck")]
    Stuck,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Lemred1 => "lemred1",
            Rule::Lemred2 => "lemred2",
            Rule::Alakon => "alakon",
            Rule::IvCase1 => "iv-case1",
            Rule::IvCase2 => "iv-case2",
            Rule::IvCase3 => "iv-case3",
            Rule::IvCase4 => "iv-case4",
            Rule::LemRB => "lemRB",
            Rule::LemMB => "lemMB",
            Rule::BaseN1 => "base-n1",
            Rule::Trivial => "trivial",
            Rule::Iii => "iii",
            Rule::Stuck => "stuck",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemRBParams {
    pub t: i64,
    pub y_prime: i64,
    pub delta: i64,
    pub zeta: i64,
    pub beta_prime: i64,
    pub alpha_prime: i64,
    pub z_prime: i64,
    pub r: i64,
    pub r_prime: i64,
}

fn require_conditions(s: &Statement) -> Result<()> {
    let bad = check_conditions(s)?;
    if bad.is_empty() {
        return Ok(());
    }
    let names: Vec<&str> = bad.iter().map(|c| c.name.as_str()).collect();
    Err(Error::RuleInapplicable(format!(
        "{s} violates {}",
        names.join(", ")
    )))
}

/// The parameter recursion of the RB lemma. Pure arithmetic.
pub fn lem_rb_params(s: &Statement) -> Result<LemRBParams> {
    let Statement::Rb {
        f,
        f_prime,
        z,
        y,
        alpha,
        beta,
    } = s
    else {
        return Err(Error::Domain(format!("{s} is not an RB statement")));
    };
    let (r, rp) = (f.rank(), f_prime.rank());
    if rp <= 0 {
        return Err(Error::RuleInapplicable(format!("{f_prime} has rank 0")));
    }
    let b = if *beta != 0 { rp } else { 0 };
    let t = f_prime.h0()? - rp * y - alpha - b;
    let (y_prime, delta) = (t.div_euclid(rp), t.rem_euclid(rp));
    let zeta = (delta != 0) as i64;
    Ok(LemRBParams {
        t,
        y_prime,
        delta,
        zeta,
        beta_prime: zeta * (r - delta),
        alpha_prime: if *beta != 0 { beta - rp } else { 0 },
        z_prime: z - y_prime - zeta,
        r,
        r_prime: rp,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RbReduction {
    pub params: LemRBParams,
    /// Kernel of `F → F′`.
    pub e: SymbolicBundle,
    /// Kernel of `F|_{X′} → F′`.
    pub f_second: SymbolicBundle,
    /// `R(F′; a(α))` then `RB(E, F″, z′, y′; α′, β′)`.
    pub children: [Statement; 2],
}

pub fn reduce_rb(s: &Statement) -> Result<RbReduction> {
    require_conditions(s)?;
    let params = lem_rb_params(s)?;
    let Statement::Rb {
        f, f_prime, alpha, ..
    } = s
    else {
        unreachable!("lem_rb_params accepted a non-RB statement");
    };
    let (e, f_second) = elementary_transform(f, f_prime)?;
    let h1 = e.h1()?;
    if h1 != 0 {
        return Err(Error::Obstruction(format!("h1({e}) = {h1}")));
    }
    if params.z_prime < 0 {
        return Err(Error::RuleInapplicable(format!(
            "z' = {} is negative for {s}",
            params.z_prime
        )));
    }
    let r_child = Statement::R {
        f: f_prime.on_hyperplane_as_ambient()?,
        a: (*alpha != 0) as i64,
    };
    let rb_child = Statement::Rb {
        f: e.clone(),
        f_prime: f_second.clone(),
        z: params.z_prime,
        y: params.y_prime,
        alpha: params.alpha_prime,
        beta: params.beta_prime,
    };
    if let Some(c) = conditions(&rb_child)?
        .into_iter()
        .find(|c| c.name == "RB1 balance")
    {
        if !c.pass {
            return Err(Error::Inconsistency(format!(
                "child {rb_child} of {s} is unbalanced: {} != {}",
                c.lhs, c.rhs
            )));
        }
    }
    Ok(RbReduction {
        params,
        e,
        f_second,
        children: [r_child, rb_child],
    })
}

/// `h^0(F|_{X′})` for the bundles whose restriction is tracked.
fn restricted_h0(f: &SymbolicBundle) -> Result<i64> {
    let n = f.space_dim;
    if n < 2 {
        return Err(Error::RuleInapplicable(format!(
            "{f} has no positive-dimensional hyperplane"
        )));
    }
    match &f.kind {
        BundleKind::Free(_) => f.on_hyperplane_as_ambient()?.h0(),
        // T_{P^n}|_{X′} = T_{X′} ⊕ N_{X′} = T_{X′} ⊕ O_{X′}(1)
        BundleKind::Tangent(l) => Ok(SymbolicBundle::tangent(n - 1, *l).h0()?
            + SymbolicBundle::free(n - 1, vec![l + 1]).h0()?),
        _ => Err(Error::RuleInapplicable(format!(
            "{f} is supported on a hyperplane"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MbReduction {
    pub z_prime: i64,
    /// `R(F(−X′); 0)` then `MB(F|_{X′}, F′, z′, y; a)`.
    pub children: [Statement; 2],
}

/// The MB lemma applied to `RB(F, F′, z, y; a, 0)`.
pub fn lem_mb(s: &Statement) -> Result<MbReduction> {
    require_conditions(s)?;
    let Statement::Rb {
        f,
        f_prime,
        y,
        alpha,
        beta,
        ..
    } = s
    else {
        return Err(Error::Domain(format!("{s} is not an RB statement")));
    };
    if *beta != 0 {
        return Err(Error::RuleInapplicable(format!("{s} has beta != 0")));
    }
    let (r, rp) = (f.rank(), f_prime.rank());
    let num = restricted_h0(f)? - rp * y - alpha;
    if r == 0 || num.rem_euclid(r) != 0 {
        return Err(Error::RuleInapplicable(format!(
            "z' = {num}/{r} is not an integer for {s}"
        )));
    }
    let z_prime = num / r;
    if z_prime < 0 {
        return Err(Error::RuleInapplicable(format!(
            "z' = {z_prime} is negative for {s}"
        )));
    }
    let down = f.twist_down()?;
    let h1 = down.h1()?;
    if h1 != 0 {
        return Err(Error::Obstruction(format!("h1({down}) = {h1}")));
    }
    let restricted = match &f.kind {
        BundleKind::Free(_) => f.on_hyperplane_as_ambient()?,
        _ => {
            return Err(Error::RuleInapplicable(format!(
                "restriction of {f} to a hyperplane splits and is not tracked"
            )))
        }
    };
    Ok(MbReduction {
        z_prime,
        children: [
            Statement::R { f: down, a: 0 },
            Statement::Mb {
                f: restricted,
                g: f_prime.on_hyperplane_as_ambient()?,
                z: z_prime,
                y: *y,
                a: *alpha,
            },
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseIVParams {
    pub alpha_iv: i64,
    /// `z − o_n(ℓ−1)`, the number of points specialized to the hyperplane.
    pub d_iv: i64,
    /// `z − o_n(ℓ)` as displayed in the source.
    pub d_literal: i64,
    pub y_prime: i64,
    pub a_prime: i64,
    pub e: i64,
    pub f: i64,
    pub g: i64,
    pub delta_d: i64,
}

/// Which of the four ranges of `z` applies to
/// `MB(O^{n+1}(ℓ+1), T(ℓ), z, y; a)` on `P^n`.
pub fn iv_case(n: u32, l: i64, z: i64) -> Result<Option<Rule>> {
    let oi = |m: u32, k: i64| -> Result<i64> { Ok(o(m, k)? as i64) };
    let (lo, hi) = (oi(n, l)?, oi(n, l + 1)?);
    let mid = oi(n, l - 1)? + oi(n - 1, l + 1)?;
    Ok(if z == hi {
        Some(Rule::IvCase1)
    } else if mid <= z && z < hi {
        Some(Rule::IvCase2)
    } else if z == lo {
        Some(Rule::IvCase3)
    } else if lo < z && z < mid {
        Some(Rule::IvCase4)
    } else {
        None
    })
}

/// One step on an MB node of the `(iv)` family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MbStep {
    pub rule: Rule,
    pub children: Vec<Statement>,
    pub case_iv: Option<CaseIVParams>,
    pub conditions: Vec<Condition>,
    pub warnings: Vec<String>,
    pub annotations: Vec<String>,
}

impl MbStep {
    fn leaf(rule: Rule) -> Self {
        Self {
            rule,
            children: Vec::new(),
            case_iv: None,
            conditions: Vec::new(),
            warnings: Vec::new(),
            annotations: Vec::new(),
        }
    }
}

/// `(n, ℓ)` if `s` is `MB(O^{n+1}_{P^n}(ℓ+1), T_{P^n}(ℓ), z, y; a)`.
pub fn iv_shape(s: &Statement) -> Option<(u32, i64)> {
    let Statement::Mb { f, g, .. } = s else {
        return None;
    };
    let n = f.space_dim;
    match (f.as_uniform_free(), &g.kind) {
        (Some((c, k)), BundleKind::Tangent(l))
            if g.space_dim == n && c == n as usize + 1 && k == l + 1 =>
        {
            Some((n, *l))
        }
        _ => None,
    }
}

/// Reduction of `MB(O^{n+1}_{P^n}(ℓ+1), T_{P^n}(ℓ), z, y; a)`: the base case
/// `n = 1` or one of the four ranges of `z`.
pub fn reduce_mb(s: &Statement) -> Result<MbStep> {
    require_conditions(s)?;
    let Some((n, l)) = iv_shape(s) else {
        return Err(Error::RuleInapplicable(format!(
            "{s} is not of the form MB(O^(n+1)(l+1), T(l), z, y; a)"
        )));
    };
    let Statement::Mb { z, y, a, .. } = *s else {
        unreachable!()
    };
    let oi = |m: u32, k: i64| -> Result<i64> { Ok(o(m, k)? as i64) };
    if s.main_bundle().h0()? == 0 {
        return Ok(MbStep::leaf(Rule::Trivial));
    }

    if n == 1 {
        if z == oi(1, l + 1)? {
            return Ok(MbStep::leaf(Rule::Trivial));
        }
        if (z, y, a) == (oi(1, l)?, 2, 0) {
            let mut step = MbStep::leaf(Rule::BaseN1);
            step.warnings.push(format!(
                "base case displayed as MB(O^2(l+1), O(l+2), {}, 1; 1), which violates a < rank G; \
                 its proof uses two quotient points, so (z, y; a) = ({}, 2; 0) is used",
                z, z
            ));
            return Ok(step);
        }
        return Err(Error::RuleInapplicable(format!(
            "{s} is not one of the two base statements"
        )));
    }

    let Some(case) = iv_case(n, l, z)? else {
        return Err(Error::RuleInapplicable(format!(
            "z = {z} lies outside [o_n(l), o_n(l+1)] = [{}, {}]",
            oi(n, l)?,
            oi(n, l + 1)?
        )));
    };
    let free = |m: u32, c: usize, k: i64| SymbolicBundle::free_uniform(m, c, k);
    let np1 = n as usize + 1;
    let mut step = MbStep::leaf(case);
    match case {
        Rule::IvCase1 => {}
        Rule::IvCase2 => {
            step.children = vec![
                Statement::R {
                    f: free(n - 1, np1, l + 1),
                    a: 0,
                },
                Statement::Mb {
                    f: free(n, np1, l),
                    g: SymbolicBundle::tangent(n, l - 1),
                    z: z - oi(n - 1, l + 1)?,
                    y,
                    a,
                },
            ];
        }
        Rule::IvCase3 => {
            step.children = vec![
                Statement::R {
                    f: free(n, 1, l),
                    a: 0,
                },
                Statement::Rb {
                    f: SymbolicBundle::tangent(n, l),
                    f_prime: SymbolicBundle::line_on_hyperplane(n, l + 1),
                    z: oi(n, l)? + y,
                    y: 0,
                    alpha: 0,
                    beta: a,
                },
            ];
        }
        Rule::IvCase4 => case_four(&mut step, n, l, z, y, a)?,
        _ => unreachable!("iv_case returns only the four cases"),
    }
    Ok(step)
}

fn case_four(step: &mut MbStep, n: u32, l: i64, z: i64, y: i64, a: i64) -> Result<()> {
    let oi = |m: u32, k: i64| -> Result<i64> { Ok(o(m, k)? as i64) };
    let ni = n as i64;
    let alpha_iv = (a != 0) as i64;
    let d_iv = z - oi(n, l - 1)?;
    let d_literal = z - oi(n, l)?;
    let y_prime = oi(n - 1, l + 1)? - d_iv - alpha_iv;
    let a_prime = if a >= 2 { a - 1 } else { 0 };
    let e = ni * oi(n - 1, l + 1)? - d_iv * ni - (ni - 1) * y_prime - a_prime;
    let (f, g) = (e.div_euclid(ni - 1), e.rem_euclid(ni - 1));
    let delta_d = if g != 0 { ni - g } else { 0 };
    let zeta = (g != 0) as i64;
    step.case_iv = Some(CaseIVParams {
        alpha_iv,
        d_iv,
        d_literal,
        y_prime,
        a_prime,
        e,
        f,
        g,
        delta_d,
    });
    step.conditions
        .push(Condition::new("iv4 nonneg y'", 0, Relation::Le, y_prime));
    step.conditions
        .push(Condition::new("iv4 nonneg d", 0, Relation::Le, d_iv));
    step.conditions.push(Condition::new(
        "iv4 y >= y'+f+zeta",
        y_prime + f + zeta,
        Relation::Le,
        y,
    ));
    step.warnings.push(format!(
        "iv-case4: displayed d = z - o_n(l) = {d_literal} is inconsistent with the stated \
         z - d = o_n(l-1); d = z - o_n(l-1) = {d_iv} is used"
    ));

    let (mb_y, mb_a) = if g == 0 {
        (y_prime + f, a_prime)
    } else if g + a_prime < ni - 1 {
        (y_prime + f, g + a_prime)
    } else {
        if g + a_prime == ni - 1 {
            step.warnings.push(format!(
                "iv-case4: g + a' = n - 1 = {}; an MB with a = rank G is ill posed, so the \
                 second sub-branch (y'+f+1, 0) is used",
                ni - 1
            ));
        }
        (y_prime + f + 1, g + a_prime - (ni - 1))
    };
    let rb_z = oi(n, l - 1)? + y - y_prime - f - zeta;
    let displayed_z = oi(n, l)? - 1 + y - y_prime - f - zeta;
    if displayed_z != rb_z {
        step.warnings.push(format!(
            "iv-case4: displayed RB point count o_n(l)-1+y-y'-f{} = {displayed_z}; \
             the balanced count o_n(l-1)+y-y'-f{} = {rb_z} is used",
            if zeta != 0 { "-1" } else { "" },
            if zeta != 0 { "-1" } else { "" }
        ));
    }
    let rb = Statement::Rb {
        f: SymbolicBundle::tangent(n, l - 1),
        f_prime: SymbolicBundle::line_on_hyperplane(n, l),
        z: rb_z,
        y: f,
        alpha: 0,
        beta: delta_d,
    };
    if g != 0 {
        let alt = Statement::Rb {
            f: SymbolicBundle::tangent(n - 1, l - 1),
            f_prime: SymbolicBundle::line_on_hyperplane(n - 1, l),
            z: rb_z,
            y: f,
            alpha: 0,
            beta: delta_d,
        };
        let alt_ok = n >= 2
            && check_conditions(&alt)
                .map(|v| v.is_empty())
                .unwrap_or(false);
        step.warnings.push(format!(
            "iv-case4: displayed child uses T_(n-1)(l-1); read as T_n(l-1) ({rb}); the \
             alternative {alt} is {}",
            if alt_ok {
                "also well posed"
            } else {
                "not well posed"
            }
        ));
        step.annotations.push(format!(
            "quotient D of dimension {delta_d} with kernel contained in T_P{}({})",
            n - 1,
            l - 1
        ));
    }
    if alpha_iv != 0 {
        step.annotations.push(format!(
            "quotient A of dimension {a} with kernel contained in T_P{}({l})",
            n - 1
        ));
    }
    step.children = vec![
        Statement::R {
            f: SymbolicBundle::free(n - 1, vec![l + 1]),
            a: alpha_iv,
        },
        Statement::Mb {
            f: SymbolicBundle::free_uniform(n - 1, n as usize, l + 1),
            g: SymbolicBundle::tangent(n - 1, l),
            z: d_iv,
            y: mb_y,
            a: mb_a,
        },
        rb,
    ];
    Ok(())
}

/// Statement of bijectivity for `τ_ℓ`, with `t_n(ℓ) = nq + r`.
pub fn tau_root(n: u32, l: i64) -> Result<Statement> {
    let tn = t(n, l)? as i64;
    let ni = n as i64;
    Ok(Statement::Rb {
        f: SymbolicBundle::tangent(n, l),
        f_prime: SymbolicBundle::line_on_hyperplane(n, l + 1),
        z: tn / ni,
        y: 0,
        alpha: 0,
        beta: tn % ni,
    })
}
