use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bundle::{BundleKind, SymbolicBundle};
use super::lemmas::{iv_shape, lem_mb, reduce_mb, reduce_rb, tau_root, LemRBParams, Rule};
use super::statement::{conditions, Condition, Relation, Statement};
use crate::error::{Error, Result};
use crate::exactdims::{o, t};

/// The four assertions proved together by induction on the dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `RB(T_{P^n}(ℓ), O_{P^{n−1}}(ℓ+1), z, y; 0, b)`
    I,
    /// `RB(O^n_{P^n}(ℓ+1), T_{P^{n−1}}(ℓ), z, y; a, 0)`
    Ii,
    /// `R(T_{P^n}(ℓ); a)`
    Iii,
    /// `MB(O^{n+1}_{P^n}(ℓ+1), T_{P^n}(ℓ), z, y; a)`
    Iv,
}

/// `(family, n, ℓ)` of a statement, when it belongs to one.
pub fn classify(s: &Statement) -> Option<(Family, u32, i64)> {
    match s {
        Statement::R { f, .. } => match f.kind {
            BundleKind::Tangent(l) => Some((Family::Iii, f.space_dim, l)),
            _ => None,
        },
        Statement::Rb {
            f,
            f_prime,
            alpha,
            beta,
            ..
        } => {
            let n = f.space_dim;
            match (&f.kind, &f_prime.kind) {
                (BundleKind::Tangent(l), BundleKind::LineOnHyperplane(k))
                    if *k == l + 1 && *alpha == 0 =>
                {
                    Some((Family::I, n, *l))
                }
                (BundleKind::Free(_), BundleKind::TangentOnHyperplane(l))
                    if *beta == 0 && f.as_uniform_free() == Some((n as usize, l + 1)) =>
                {
                    Some((Family::Ii, n, *l))
                }
                _ => None,
            }
        }
        Statement::Mb { .. } => iv_shape(s).map(|(n, l)| (Family::Iv, n, l)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceVerdict {
    Certified,
    Violated,
    Stuck,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub rule: Rule,
    pub leaf: bool,
    pub family: Option<Family>,
    pub statement: Statement,
    pub display: String,
    pub params: BTreeMap<String, i64>,
    pub children: Vec<usize>,
    pub conditions: Vec<Condition>,
    pub warnings: Vec<String>,
    pub annotations: Vec<String>,
    /// Why no rule applied, with a dump of the statement's numbers.
    pub stuck_reason: Option<String>,
}

impl TraceNode {
    pub fn violations(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub n: u32,
    pub l: i64,
    pub root: Statement,
    pub nodes: Vec<TraceNode>,
    pub verdict: TraceVerdict,
    /// Number of levels.
    pub depth: usize,
    pub depth_bound: usize,
    pub violations: usize,
    pub stuck: usize,
}

impl ReductionTrace {
    pub fn certified(&self) -> bool {
        self.verdict == TraceVerdict::Certified
    }

    /// Every warning, prefixed by its node id.
    pub fn warnings(&self) -> Vec<String> {
        self.nodes
            .iter()
            .flat_map(|n| {
                n.warnings
                    .iter()
                    .map(move |w| format!("node {}: {w}", n.id))
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Inconsistency(e.to_string()))
    }
}

/// Result of choosing a rule for one node.
struct Expansion {
    rule: Rule,
    children: Vec<Statement>,
    params: BTreeMap<String, i64>,
    conditions: Vec<Condition>,
    warnings: Vec<String>,
    annotations: Vec<String>,
}

impl Expansion {
    fn leaf(rule: Rule) -> Self {
        Self {
            rule,
            children: Vec::new(),
            params: BTreeMap::new(),
            conditions: Vec::new(),
            warnings: Vec::new(),
            annotations: Vec::new(),
        }
    }
}

fn oi(n: u32, l: i64) -> Result<i64> {
    Ok(o(n, l)? as i64)
}

fn ti(n: u32, l: i64) -> Result<i64> {
    Ok(t(n, l)? as i64)
}

fn lemrb_params(p: &LemRBParams) -> BTreeMap<String, i64> {
    [
        ("t", p.t),
        ("y'", p.y_prime),
        ("delta", p.delta),
        ("zeta", p.zeta),
        ("beta'", p.beta_prime),
        ("alpha'", p.alpha_prime),
        ("z'", p.z_prime),
        ("r", p.r),
        ("r'", p.r_prime),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn beta_annotation(s: &Statement, f_second: &SymbolicBundle) -> Option<String> {
    match s {
        Statement::Rb { beta, .. } if *beta != 0 => Some(format!(
            "quotient B of dimension {beta} with kernel contained in {f_second}"
        )),
        _ => None,
    }
}

fn range_conditions(s: &Statement) -> Result<Vec<Condition>> {
    let mut out = Vec::new();
    let Some((family, n, l)) = classify(s) else {
        return Ok(out);
    };
    let ni = n as i64;
    match (family, s) {
        (Family::I, Statement::Rb { y, beta, .. }) => {
            out.push(Condition::new(
                "(i) y <= o_(n-1)(l+1)",
                *y,
                Relation::Le,
                oi(n - 1, l + 1)?,
            ));
            out.push(Condition::new("(i) b <= n-1", *beta, Relation::Le, ni - 1));
        }
        (Family::Ii, Statement::Rb { z, alpha, .. }) => {
            out.push(Condition::new(
                "(ii) a <= n-2",
                *alpha,
                Relation::Le,
                ni - 2,
            ));
            out.push(Condition::new(
                "remark z >= o_n(l)",
                oi(n, l)?,
                Relation::Le,
                *z,
            ));
        }
        (Family::Iv, Statement::Mb { z, a, .. }) if ti(n, l)? > 0 => {
            out.push(Condition::new(
                "(iv) z >= o_n(l)",
                oi(n, l)?,
                Relation::Le,
                *z,
            ));
            out.push(Condition::new("(iv) a <= n-1", *a, Relation::Le, ni - 1));
        }
        _ => {}
    }
    Ok(out)
}

fn expand(s: &Statement) -> Result<Expansion> {
    if s.main_bundle().h0()? == 0 {
        let mut e = Expansion::leaf(Rule::Trivial);
        e.annotations.push("no sections".into());
        return Ok(e);
    }
    match (classify(s), s) {
        (_, Statement::R { f, .. }) => expand_r(f),
        (Some((Family::I, n, l)), _) => expand_i(s, n, l),
        (Some((Family::Ii, n, l)), _) => expand_ii(s, n, l),
        (Some((Family::Iv, _, _)), _) => {
            let step = reduce_mb(s)?;
            let mut e = Expansion::leaf(step.rule);
            e.children = step.children;
            e.conditions = step.conditions;
            e.warnings = step.warnings;
            e.annotations = step.annotations;
            if let Some(c) = step.case_iv {
                for (k, v) in [
                    ("alpha_iv", c.alpha_iv),
                    ("d_iv", c.d_iv),
                    ("d_literal", c.d_literal),
                    ("y'", c.y_prime),
                    ("a'", c.a_prime),
                    ("e", c.e),
                    ("f", c.f),
                    ("g", c.g),
                    ("delta_D", c.delta_d),
                ] {
                    e.params.insert(k.to_string(), v);
                }
            }
            Ok(e)
        }
        (_, Statement::Rb { .. }) => {
            let red = reduce_rb(s)?;
            let mut e = Expansion::leaf(Rule::LemRB);
            e.params = lemrb_params(&red.params);
            e.annotations.extend(beta_annotation(s, &red.f_second));
            e.children = red.children.to_vec();
            Ok(e)
        }
        (_, Statement::Mb { .. }) => Err(Error::RuleInapplicable(format!(
            "{s} is outside the tracked MB family"
        ))),
    }
}

fn expand_r(f: &SymbolicBundle) -> Result<Expansion> {
    match &f.kind {
        BundleKind::Free(_) if f.as_uniform_free().is_some() => {
            let mut e = Expansion::leaf(Rule::Trivial);
            e.annotations.push("copies of one line bundle".into());
            Ok(e)
        }
        BundleKind::Tangent(_) if f.space_dim == 1 => {
            let mut e = Expansion::leaf(Rule::Trivial);
            e.annotations.push("T_P1(l) = O_P1(l+2)".into());
            Ok(e)
        }
        BundleKind::Tangent(l) => {
            let mut e = Expansion::leaf(Rule::Iii);
            e.children.push(tau_root(f.space_dim, *l)?);
            e.annotations.push(
                "fractional quotient handled by q and q+1 points of the bijective case".into(),
            );
            Ok(e)
        }
        _ => Err(Error::RuleInapplicable(format!("no rule for R({f})"))),
    }
}

fn expand_i(s: &Statement, n: u32, l: i64) -> Result<Expansion> {
    if n == 1 {
        let mut e = Expansion::leaf(Rule::Trivial);
        e.annotations.push("n = 1".into());
        return Ok(e);
    }
    let red = reduce_rb(s)?;
    let mut e = Expansion::leaf(Rule::Lemred1);
    e.params = lemrb_params(&red.params);
    e.annotations.extend(beta_annotation(s, &red.f_second));
    if let Statement::Rb { z, y, beta, .. } = s {
        let bp = (*beta != 0) as i64;
        let shown = oi(n, l + 1)?;
        let (dz, dy) = (z - shown + y + bp, shown - y - bp);
        if (dz, dy) != (red.params.z_prime, red.params.y_prime) {
            e.warnings.push(format!(
                "lemred1: displayed child (z, y) = ({dz}, {dy}) from o_n(l+1) = {shown} is \
                 unbalanced; ({}, {}) from o_(n-1)(l+1) = {} is used",
                red.params.z_prime,
                red.params.y_prime,
                oi(n - 1, l + 1)?
            ));
        }
    }
    e.children = red.children.to_vec();
    Ok(e)
}

fn expand_ii(s: &Statement, n: u32, l: i64) -> Result<Expansion> {
    let Statement::Rb { z, y, alpha, .. } = *s else {
        unreachable!()
    };
    let ni = n as i64;
    let threshold = oi(n, l)? + oi(n - 1, l)?;
    if z > threshold {
        let red = lem_mb(s)?;
        let expected = z - oi(n, l)?;
        if red.z_prime != expected {
            return Err(Error::Inconsistency(format!(
                "alakon: lemMB gives z' = {} but z - o_n(l) = {expected}",
                red.z_prime
            )));
        }
        let mut e = Expansion::leaf(Rule::Alakon);
        e.params.insert("z'".into(), red.z_prime);
        e.params.insert("o_n(l)+o_(n-1)(l)".into(), threshold);
        e.children = red.children.to_vec();
        return Ok(e);
    }
    let red = reduce_rb(s)?;
    let mut e = Expansion::leaf(Rule::Lemred2);
    e.params = lemrb_params(&red.params);
    let tt = red.params.t;
    let bound = (ni - 1) * oi(n - 1, l)?;
    e.conditions.push(Condition::new(
        "lemred2 t <= (n-1) o_(n-1)(l)",
        tt,
        Relation::Le,
        bound,
    ));
    let shown_t = ti(n, l)? - 3 * y - alpha;
    let shown_bound = ni * oi(n, l)?;
    if shown_t != tt || (shown_t <= shown_bound) != (tt <= bound) {
        e.warnings.push(format!(
            "lemred2: displayed t = t_n(l) - 3y - a = {shown_t} with hypothesis t <= n o_n(l) = \
             {shown_bound} ({}); lemRB gives t = t_(n-1)(l) - (n-1)y - a = {tt} with hypothesis \
             t <= {bound} ({}), which is used",
            if shown_t <= shown_bound {
                "holds"
            } else {
                "fails"
            },
            if tt <= bound { "holds" } else { "fails" },
        ));
    }
    e.children = red.children.to_vec();
    Ok(e)
}

fn dump(s: &Statement) -> String {
    let describe = |b: &SymbolicBundle| {
        format!(
            "{b}: rank {}, h0 {}, h1 {}",
            b.rank(),
            b.h0().map_or_else(|e| e.to_string(), |v| v.to_string()),
            b.h1().map_or_else(|e| e.to_string(), |v| v.to_string()),
        )
    };
    match s {
        Statement::R { f, a } => format!("R: F = [{}], a = {a}", describe(f)),
        Statement::Rb {
            f,
            f_prime,
            z,
            y,
            alpha,
            beta,
        } => format!(
            "RB: F = [{}], F' = [{}], z = {z}, y = {y}, alpha = {alpha}, beta = {beta}",
            describe(f),
            describe(f_prime)
        ),
        Statement::Mb { f, g, z, y, a } => format!(
            "MB: F = [{}], G = [{}], z = {z}, y = {y}, a = {a}",
            describe(f),
            describe(g)
        ),
    }
}

struct Builder {
    nodes: Vec<TraceNode>,
    depth_bound: usize,
}

impl Builder {
    fn visit(&mut self, s: Statement, parent: Option<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let mut node = TraceNode {
            id,
            parent,
            depth,
            rule: Rule::Stuck,
            leaf: true,
            family: classify(&s).map(|c| c.0),
            display: s.to_string(),
            statement: s.clone(),
            params: BTreeMap::new(),
            children: Vec::new(),
            conditions: Vec::new(),
            warnings: Vec::new(),
            annotations: Vec::new(),
            stuck_reason: None,
        };
        let checked = conditions(&s).and_then(|mut c| {
            c.extend(range_conditions(&s)?);
            Ok(c)
        });
        match checked {
            Ok(c) => node.conditions = c,
            Err(e) => node.stuck_reason = Some(format!("{e}; {}", dump(&s))),
        }
        if node.stuck_reason.is_none() && node.violations().next().is_some() {
            node.stuck_reason = Some(format!("side conditions violated; {}", dump(&s)));
        }
        if node.stuck_reason.is_none() && depth + 1 > self.depth_bound {
            node.stuck_reason = Some(format!(
                "depth bound {} reached; {}",
                self.depth_bound,
                dump(&s)
            ));
        }
        if node.stuck_reason.is_some() {
            self.nodes.push(node);
            return id;
        }
        match expand(&s) {
            Err(e) => {
                node.stuck_reason = Some(format!("{e}; {}", dump(&s)));
                self.nodes.push(node);
            }
            Ok(exp) => {
                node.rule = exp.rule;
                node.leaf = exp.children.is_empty();
                node.params = exp.params;
                node.conditions.extend(exp.conditions);
                node.warnings = exp.warnings;
                node.annotations = exp.annotations;
                let expandable = node.violations().next().is_none();
                if !expandable {
                    node.stuck_reason = Some(format!("side conditions violated; {}", dump(&s)));
                    node.rule = Rule::Stuck;
                    node.leaf = true;
                }
                self.nodes.push(node);
                if expandable {
                    for child in exp.children {
                        let c = self.visit(child, Some(id), depth + 1);
                        self.nodes[id].children.push(c);
                    }
                }
            }
        }
        id
    }
}

/// Replays the induction from the bijectivity statement for `T_{P^n}(ℓ)`.
pub fn schedule(n: u32, l: i64) -> Result<ReductionTrace> {
    if n == 0 {
        return Err(Error::Domain("schedule requires n >= 1".into()));
    }
    let root = tau_root(n, l)?;
    let depth_bound = (10 * (n as i64 + l + 2)).max(10) as usize;
    let mut b = Builder {
        nodes: Vec::new(),
        depth_bound,
    };
    b.visit(root.clone(), None, 0);
    let nodes = b.nodes;
    let violations = nodes
        .iter()
        .filter(|n| n.violations().next().is_some())
        .count();
    let stuck = nodes.iter().filter(|n| n.rule == Rule::Stuck).count();
    let verdict = if violations > 0 {
        TraceVerdict::Violated
    } else if stuck > 0 {
        TraceVerdict::Stuck
    } else {
        TraceVerdict::Certified
    };
    let depth = nodes.iter().map(|n| n.depth + 1).max().unwrap_or(0);
    Ok(ReductionTrace {
        n,
        l,
        root,
        nodes,
        verdict,
        depth,
        depth_bound,
        violations,
        stuck,
    })
}

/// Every `(ii)` node of the trace has `z >= o_n(ℓ)`.
pub fn verify_remark(n: u32, l: i64) -> Result<bool> {
    if n < 2 {
        return Err(Error::Domain("verify_remark requires n >= 2".into()));
    }
    remark_holds(&schedule(n, l)?)
}

pub fn remark_holds(trace: &ReductionTrace) -> Result<bool> {
    for node in &trace.nodes {
        if let (Some((Family::Ii, m, k)), Statement::Rb { z, .. }) =
            (classify(&node.statement), &node.statement)
        {
            if *z < oi(m, k)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
