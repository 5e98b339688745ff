//! Bases of global sections and evaluation matrices at points.
//!
//! Column order is summand-major, then graded-lex monomials. Row order is
//! point-major, then fiber coordinate.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactdims;
use crate::ffla::{self, FieldSpec, FpMatrix, ProjectivePoint};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    exponents: Vec<u32>,
    degree: u32,
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        let degree = exponents.iter().sum();
        Self { exponents, degree }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn eval(&self, field: FieldSpec, point: &[u64]) -> u64 {
        self.exponents
            .iter()
            .zip(point)
            .fold(1, |acc, (&e, &x)| field.mul(acc, field.pow(x, e as u64)))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            match e {
                1 => write!(f, "x{i}")?,
                _ => write!(f, "x{i}^{e}")?,
            }
        }
        Ok(())
    }
}

/// Degree-`k` monomials in `n+1` variables, graded-lex (`x0 > x1 > …`).
pub fn monomials(n: u32, k: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    if k < 0 {
        return out;
    }
    let mut exps = vec![0u32; n as usize + 1];
    fill_lex(&mut exps, 0, k as u32, &mut out);
    out
}

fn fill_lex(exps: &mut [u32], idx: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if idx + 1 == exps.len() {
        exps[idx] = remaining;
        out.push(Monomial::new(exps.to_vec()));
        return;
    }
    for e in (0..=remaining).rev() {
        exps[idx] = e;
        fill_lex(exps, idx + 1, remaining - e, out);
    }
    exps[idx] = 0;
}

/// Values of every monomial in `monos` at one point.
fn monomial_values(field: FieldSpec, monos: &[Monomial], point: &ProjectivePoint) -> Vec<u64> {
    let coords = point.coords();
    let max_deg = monos.first().map_or(0, |m| m.degree) as usize;
    let powers: Vec<Vec<u64>> = coords
        .iter()
        .map(|&x| {
            let mut pw = Vec::with_capacity(max_deg + 1);
            let mut acc = 1;
            for _ in 0..=max_deg {
                pw.push(acc);
                acc = field.mul(acc, x);
            }
            pw
        })
        .collect();
    monos
        .iter()
        .map(|m| {
            m.exponents
                .iter()
                .enumerate()
                .fold(1, |acc, (i, &e)| field.mul(acc, powers[i][e as usize]))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowLabel {
    pub point: usize,
    pub fiber: usize,
}

/// An evaluation matrix with labelled rows (fiber coordinates at points)
/// and columns (basis sections).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalMatrix {
    pub matrix: FpMatrix,
    pub row_labels: Vec<RowLabel>,
    pub col_labels: Vec<String>,
}

impl EvalMatrix {
    fn new(matrix: FpMatrix, row_labels: Vec<RowLabel>, col_labels: Vec<String>) -> Self {
        debug_assert_eq!(matrix.rows(), row_labels.len());
        debug_assert_eq!(matrix.cols(), col_labels.len());
        Self {
            matrix,
            row_labels,
            col_labels,
        }
    }

    pub fn rank(&self) -> usize {
        ffla::rank(&self.matrix)
    }

    /// Row indices belonging to one point.
    pub fn point_rows(&self, point: usize) -> Vec<usize> {
        self.row_labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.point == point)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Evaluation of `H^0(⊕ O(k_i))` at the points.
pub fn eval_free(
    field: FieldSpec,
    n: u32,
    twists: &[i64],
    points: &[ProjectivePoint],
) -> Result<EvalMatrix> {
    check_points(n, points)?;
    let bases: Vec<Vec<Monomial>> = twists.iter().map(|&k| monomials(n, k)).collect();
    let offsets: Vec<usize> = bases
        .iter()
        .scan(0, |acc, b| {
            let o = *acc;
            *acc += b.len();
            Some(o)
        })
        .collect();
    let cols: usize = bases.iter().map(Vec::len).sum();
    let mut m = FpMatrix::zeros(field, points.len() * twists.len(), cols);
    let mut rows = Vec::with_capacity(m.rows());
    for (pi, pt) in points.iter().enumerate() {
        for (si, basis) in bases.iter().enumerate() {
            let r = rows.len();
            for (j, v) in monomial_values(field, basis, pt).into_iter().enumerate() {
                m.set(r, offsets[si] + j, v);
            }
            rows.push(RowLabel {
                point: pi,
                fiber: si,
            });
        }
    }
    let col_labels = bases
        .iter()
        .enumerate()
        .flat_map(|(si, b)| b.iter().map(move |mono| format!("e{si}*{mono}")))
        .collect();
    Ok(EvalMatrix::new(m, rows, col_labels))
}

/// Evaluation of `H^0(T(ℓ))` at the points, through the Euler sequence.
///
/// Columns are the generators `e_i ⊗ m` of `H^0(O(ℓ+1))^{n+1}`. The fiber
/// at `P` is trivialized by `v ↦ (v_j − P_j·v_i)_{j≠i}` with `i` the pivot
/// coordinate of `P`, which kills the Euler relations. For `ℓ ≤ −2` the
/// matrix has no columns.
pub fn eval_tangent(
    field: FieldSpec,
    n: u32,
    l: i64,
    points: &[ProjectivePoint],
) -> Result<EvalMatrix> {
    check_points(n, points)?;
    let basis = if l <= -2 {
        Vec::new()
    } else {
        monomials(n, l + 1)
    };
    let nm = basis.len();
    let dim = n as usize + 1;
    let mut m = FpMatrix::zeros(field, points.len() * n as usize, dim * nm);
    let mut rows = Vec::with_capacity(m.rows());
    for (pi, pt) in points.iter().enumerate() {
        let vals = monomial_values(field, &basis, pt);
        let piv = pt.pivot();
        let coords = pt.coords();
        let mut fiber = 0;
        for (j, &pj) in coords.iter().enumerate() {
            if j == piv {
                continue;
            }
            let r = rows.len();
            for (mi, &v) in vals.iter().enumerate() {
                // column e_j ⊗ m contributes m(P); column e_piv ⊗ m contributes −P_j·m(P)
                m.set(r, j * nm + mi, v);
                m.set(r, piv * nm + mi, field.neg(field.mul(pj, v)));
            }
            rows.push(RowLabel { point: pi, fiber });
            fiber += 1;
        }
    }
    let col_labels = (0..dim)
        .flat_map(|i| basis.iter().map(move |mono| format!("e{i}*{mono}")))
        .collect();
    Ok(EvalMatrix::new(m, rows, col_labels))
}

/// `H^0(Ω^p(k))` as the kernel of the contraction
/// `Λ^p V ⊗ S_{k−p} → Λ^{p−1} V ⊗ S_{k−p+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulBasis {
    pub n: u32,
    pub p: u32,
    pub k: i64,
    /// Ascending `p`-subsets of `{0..=n}`, lexicographic.
    pub subsets: Vec<Vec<usize>>,
    /// Degree `k−p` monomials.
    pub monomials: Vec<Monomial>,
    /// One row per section; column `s·|monomials| + m` is the coefficient of `e_S ⊗ m`.
    pub vectors: FpMatrix,
}

impl KoszulBasis {
    pub fn dim(&self) -> usize {
        self.vectors.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.vectors.cols()
    }
}

pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= n {
        go(0, n, size, &mut Vec::new(), &mut out);
    }
    out
}

pub fn koszul_basis(field: FieldSpec, n: u32, p: u32, k: i64) -> Result<KoszulBasis> {
    if n == 0 || p > n {
        return Err(Error::Domain(format!(
            "Omega^{p} on P^{n} needs n >= 1 and p <= n"
        )));
    }
    let dim = n as usize + 1;
    let subs = subsets(dim, p as usize);
    let monos = monomials(n, k - p as i64);
    let nm = monos.len();
    let ambient = subs.len() * nm;

    // The contraction preserves the multidegree exps(m) + 1_S, so the kernel
    // splits into small blocks.
    let mut blocks: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for (si, s) in subs.iter().enumerate() {
        for (mi, mono) in monos.iter().enumerate() {
            let mut md = mono.exponents.clone();
            for &i in s {
                md[i] += 1;
            }
            blocks.entry(md).or_default().push(si * nm + mi);
        }
    }

    // blocks in order of their first ambient column
    let mut blocks: Vec<Vec<usize>> = blocks.into_values().collect();
    blocks.sort_by_key(|cols| cols[0]);

    let mut kernel_rows: Vec<Vec<(usize, u64)>> = Vec::new();
    for cols in &blocks {
        if p == 0 {
            kernel_rows.extend(cols.iter().map(|&c| vec![(c, 1)]));
            continue;
        }
        let mut targets: BTreeMap<(Vec<usize>, Vec<u32>), usize> = BTreeMap::new();
        let mut entries: Vec<(usize, usize, u64)> = Vec::new();
        for (local, &c) in cols.iter().enumerate() {
            let s = &subs[c / nm];
            let mono = &monos[c % nm];
            for (pos, &i) in s.iter().enumerate() {
                let mut rest = s.clone();
                rest.remove(pos);
                let mut exps = mono.exponents.clone();
                exps[i] += 1;
                let next = targets.len();
                let t = *targets.entry((rest, exps)).or_insert(next);
                let sign = if pos % 2 == 0 { 1 } else { field.neg(1) };
                entries.push((t, local, sign));
            }
        }
        let mut block = FpMatrix::zeros(field, targets.len(), cols.len());
        for (t, local, v) in entries {
            block.set(t, local, field.add(block.get(t, local), v));
        }
        let ker = ffla::kernel_basis(&block);
        for r in 0..ker.rows() {
            let row: Vec<(usize, u64)> = ker
                .row(r)
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(local, &v)| (cols[local], v))
                .collect();
            kernel_rows.push(row);
        }
    }

    let expected = exactdims::bott(n, p, k, 0)?;
    if kernel_rows.len() as u64 != expected {
        return Err(Error::Inconsistency(format!(
            "Koszul kernel for Omega^{p}({k}) on P^{n} has dimension {} but Bott gives {expected}",
            kernel_rows.len()
        )));
    }
    let mut vectors = FpMatrix::zeros(field, kernel_rows.len(), ambient);
    for (r, row) in kernel_rows.iter().enumerate() {
        for &(c, v) in row {
            vectors.set(r, c, v);
        }
    }
    Ok(KoszulBasis {
        n,
        p,
        k,
        subsets: subs,
        monomials: monos,
        vectors,
    })
}

/// Restriction of `H^0(Ω^p(k))` to the points, in ambient `Λ^p` coordinates.
pub fn eval_omega(
    field: FieldSpec,
    n: u32,
    p: u32,
    k: i64,
    points: &[ProjectivePoint],
) -> Result<EvalMatrix> {
    let basis = koszul_basis(field, n, p, k)?;
    eval_koszul(&basis, field, points)
}

/// Like [`eval_omega`] but reusing a precomputed basis.
pub fn eval_koszul(
    basis: &KoszulBasis,
    field: FieldSpec,
    points: &[ProjectivePoint],
) -> Result<EvalMatrix> {
    check_points(basis.n, points)?;
    let ns = basis.subsets.len();
    let nm = basis.monomials.len();
    let sparse: Vec<Vec<(usize, u64)>> = (0..basis.dim())
        .map(|r| {
            basis
                .vectors
                .row(r)
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(c, &v)| (c, v))
                .collect()
        })
        .collect();
    let mut m = FpMatrix::zeros(field, points.len() * ns, basis.dim());
    let mut rows = Vec::with_capacity(m.rows());
    for (pi, pt) in points.iter().enumerate() {
        let vals = monomial_values(field, &basis.monomials, pt);
        let base = rows.len();
        for (c, entries) in sparse.iter().enumerate() {
            for &(idx, coeff) in entries {
                let r = base + idx / nm;
                let v = field.mul(coeff, vals[idx % nm]);
                m.set(r, c, field.add(m.get(r, c), v));
            }
        }
        rows.extend((0..ns).map(|s| RowLabel {
            point: pi,
            fiber: s,
        }));
    }
    let col_labels = (0..basis.dim())
        .map(|c| format!("omega{}({})#{c}", basis.p, basis.k))
        .collect();
    Ok(EvalMatrix::new(m, rows, col_labels))
}

/// Replace the rows of one point by `q` applied to that block.
pub fn apply_quotient(m: &EvalMatrix, point_index: usize, q: &FpMatrix) -> Result<EvalMatrix> {
    let block = m.point_rows(point_index);
    if block.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "no rows for point {point_index}"
        )));
    }
    if q.cols() != block.len() {
        return Err(Error::DimensionMismatch(format!(
            "quotient has {} columns but point {point_index} has {} fiber rows",
            q.cols(),
            block.len()
        )));
    }
    let replaced = q.mul(&m.matrix.select_rows(&block))?;
    let first = block[0];
    let mut keep_before: Vec<usize> = (0..first).collect();
    keep_before.retain(|r| !block.contains(r));
    let after: Vec<usize> = (first..m.matrix.rows())
        .filter(|r| !block.contains(r))
        .collect();

    let mut matrix = m.matrix.select_rows(&keep_before);
    matrix = matrix.vstack(&replaced)?;
    matrix = matrix.vstack(&m.matrix.select_rows(&after))?;
    let mut labels: Vec<RowLabel> = keep_before.iter().map(|&r| m.row_labels[r]).collect();
    labels.extend((0..q.rows()).map(|fiber| RowLabel {
        point: point_index,
        fiber,
    }));
    labels.extend(after.iter().map(|&r| m.row_labels[r]));
    Ok(EvalMatrix::new(matrix, labels, m.col_labels.clone()))
}

fn check_points(n: u32, points: &[ProjectivePoint]) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("ambient dimension must be >= 1".into()));
    }
    if let Some(bad) = points.iter().find(|p| p.n() != n) {
        return Err(Error::DimensionMismatch(format!(
            "point in P^{} evaluated on P^{n}",
            bad.n()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactdims::{binom, bott, o, t};
    use crate::ffla::{random_points, random_surjection, rank};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field() -> FieldSpec {
        FieldSpec::default()
    }

    fn pts(n: u32, count: usize, seed: u64) -> Vec<ProjectivePoint> {
        random_points(field(), n, count, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Independent oracle for the rank of σ: a tuple (f_i) dies at P iff
    /// f_i(P)P_j − f_j(P)P_i = 0 for all i < j, without choosing a splitting.
    fn tangent_rank_by_wedge(n: u32, l: i64, points: &[ProjectivePoint]) -> usize {
        let f = field();
        let basis = monomials(n, l + 1);
        let nm = basis.len();
        let dim = n as usize + 1;
        let mut rows = Vec::new();
        for pt in points {
            let c = pt.coords();
            let vals: Vec<u64> = basis.iter().map(|m| m.eval(f, c)).collect();
            for i in 0..dim {
                for j in i + 1..dim {
                    let mut row = vec![0u64; dim * nm];
                    for (mi, &v) in vals.iter().enumerate() {
                        row[i * nm + mi] = f.add(row[i * nm + mi], f.mul(v, c[j]));
                        row[j * nm + mi] = f.sub(row[j * nm + mi], f.mul(v, c[i]));
                    }
                    rows.extend(row);
                }
            }
        }
        let r = rows.len() / (dim * nm).max(1);
        rank(&FpMatrix::from_rows(f, r, dim * nm, rows).unwrap())
    }

    #[test]
    fn monomial_examples() {
        let m: Vec<String> = monomials(1, 2).iter().map(|m| m.to_string()).collect();
        assert_eq!(m, vec!["x0^2", "x0*x1", "x1^2"]);
        assert!(monomials(2, -1).is_empty());
        assert_eq!(monomials(3, 2).len(), 10);
        for n in 1..5 {
            for k in 0..7 {
                let ms = monomials(n, k);
                assert_eq!(ms.len() as u64, o(n, k).unwrap());
                assert!(ms.windows(2).all(|w| w[0].exponents > w[1].exponents));
            }
        }
    }

    #[test]
    fn eval_free_examples() {
        let f = field();
        for l in 0..6i64 {
            let p = pts(1, l as usize + 1, 10 + l as u64);
            let m = eval_free(f, 1, &[l], &p).unwrap();
            assert_eq!(m.rank(), l as usize + 1);
        }
        let m = eval_free(f, 3, &[0], &pts(3, 1, 1)).unwrap();
        assert_eq!(m.matrix.entries(), &[1]);
        assert_eq!(eval_free(f, 2, &[2], &pts(2, 6, 2)).unwrap().rank(), 6);
        let m = eval_free(f, 2, &[1, 2], &pts(2, 3, 3)).unwrap();
        assert_eq!((m.matrix.rows(), m.matrix.cols()), (6, 9));
        assert_eq!(eval_free(f, 2, &[2], &[]).unwrap().matrix.rows(), 0);
    }

    #[test]
    fn eval_tangent_examples() {
        let f = field();
        let p4 = pts(2, 4, 21);
        let m = eval_tangent(f, 2, 0, &p4).unwrap();
        assert_eq!((m.matrix.rows(), m.matrix.cols()), (8, 9));
        assert_eq!(m.rank(), 8);
        assert_eq!(tangent_rank_by_wedge(2, 0, &p4), 8);
        assert_eq!(eval_tangent(f, 2, 0, &pts(2, 3, 22)).unwrap().rank(), 6);
        assert_eq!(eval_tangent(f, 1, 0, &pts(1, 1, 23)).unwrap().rank(), 1);
        assert_eq!(
            eval_tangent(f, 3, -2, &pts(3, 2, 24))
                .unwrap()
                .matrix
                .cols(),
            0
        );
    }

    #[test]
    fn eval_tangent_matches_wedge_oracle() {
        let f = field();
        for n in 2..4u32 {
            for l in -1..3i64 {
                let tn = t(n, l).unwrap() as usize;
                for a in [1usize, tn / n as usize, tn / n as usize + 1] {
                    let p = pts(n, a, (100 + a as i64 + l * 7 + n as i64) as u64);
                    let r = eval_tangent(f, n, l, &p).unwrap().rank();
                    assert_eq!(r, tangent_rank_by_wedge(n, l, &p), "n={n} l={l} a={a}");
                    assert_eq!(r, tn.min(n as usize * a));
                }
            }
        }
    }

    #[test]
    fn eval_tangent_rank_is_representative_independent() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let base = pts(3, 5, 31);
        let r0 = eval_tangent(f, 3, 1, &base).unwrap().rank();
        // rescaled representatives normalize to the same points
        let rescaled: Vec<ProjectivePoint> = base
            .iter()
            .map(|p| {
                let s = rng.gen_range(1..f.modulus());
                let c = p.coords().iter().map(|&x| f.mul(x, s)).collect();
                ProjectivePoint::new(f, c).unwrap()
            })
            .collect();
        assert_eq!(rescaled, base);
        assert_eq!(eval_tangent(f, 3, 1, &rescaled).unwrap().rank(), r0);
        let mut perm = base.clone();
        perm.reverse();
        perm.swap(0, 2);
        assert_eq!(eval_tangent(f, 3, 1, &perm).unwrap().rank(), r0);
        // a point whose pivot is not x0
        let special = vec![ProjectivePoint::new(f, vec![0, 3, 5, 7]).unwrap()];
        let m = eval_tangent(f, 3, 0, &special).unwrap();
        assert_eq!(m.rank(), tangent_rank_by_wedge(3, 0, &special));
    }

    #[test]
    fn euler_relations_are_absorbed() {
        let f = field();
        for (n, l, a) in [(2u32, 1i64, 4usize), (3, 0, 3), (2, 2, 9)] {
            let p = pts(n, a, 40 + a as u64);
            let m = eval_tangent(f, n, l, &p).unwrap();
            let basis = monomials(n, l);
            let up = monomials(n, l + 1);
            let nm = up.len();
            let dim = n as usize + 1;
            // f ↦ (x_0 f, …, x_n f) written in the e_i ⊗ m basis, then evaluated
            let mut euler = FpMatrix::zeros(f, dim * nm, basis.len());
            for (bi, mono) in basis.iter().enumerate() {
                for i in 0..dim {
                    let mut e = mono.exponents().to_vec();
                    e[i] += 1;
                    let idx = up
                        .iter()
                        .position(|u| u.exponents() == e.as_slice())
                        .unwrap();
                    euler.set(i * nm + idx, bi, 1);
                }
            }
            let extra = m.matrix.mul(&euler).unwrap();
            assert!(extra.entries().iter().all(|&v| v == 0));
            let wide = m.matrix.hstack(&extra).unwrap();
            assert_eq!(rank(&wide), m.rank());
        }
    }

    #[test]
    fn n1_tangent_equals_twisted_line_bundle() {
        let f = field();
        for l in -1..=5i64 {
            for a in 0..=10usize {
                let p = pts(1, a, 500 + a as u64 * 13 + (l + 1) as u64);
                let tan = eval_tangent(f, 1, l, &p).unwrap().rank();
                let free = eval_free(f, 1, &[l + 2], &p).unwrap().rank();
                assert_eq!(tan, free, "l={l} a={a}");
            }
        }
    }

    #[test]
    fn koszul_examples() {
        let f = field();
        let b = koszul_basis(f, 3, 0, 2).unwrap();
        assert_eq!(b.dim(), 10);
        assert_eq!(b.vectors, FpMatrix::identity(f, 10));
        assert_eq!(koszul_basis(f, 2, 1, 2).unwrap().dim(), 3);
        assert_eq!(koszul_basis(f, 3, 1, 5).unwrap().dim(), 84);
        assert_eq!(koszul_basis(f, 2, 2, 2).unwrap().dim(), 0);
        assert_eq!(koszul_basis(f, 2, 2, 3).unwrap().dim(), 1);
    }

    #[test]
    fn koszul_rows_are_cycles() {
        // apply the full contraction to every row and check it vanishes
        let f = field();
        for (n, p, k) in [(2u32, 1u32, 3i64), (3, 2, 4), (3, 1, 3), (4, 2, 4)] {
            let b = koszul_basis(f, n, p, k).unwrap();
            let nm = b.monomials.len();
            let tsubs = subsets(n as usize + 1, p as usize - 1);
            let tmon = monomials(n, k - p as i64 + 1);
            for r in 0..b.dim() {
                let mut image = vec![0u64; tsubs.len() * tmon.len()];
                for (c, &v) in b.vectors.row(r).iter().enumerate() {
                    if v == 0 {
                        continue;
                    }
                    let s = &b.subsets[c / nm];
                    let m = &b.monomials[c % nm];
                    for (pos, &i) in s.iter().enumerate() {
                        let mut rest = s.clone();
                        rest.remove(pos);
                        let mut e = m.exponents().to_vec();
                        e[i] += 1;
                        let ti = tsubs.iter().position(|x| *x == rest).unwrap();
                        let mi = tmon
                            .iter()
                            .position(|x| x.exponents() == e.as_slice())
                            .unwrap();
                        let idx = ti * tmon.len() + mi;
                        let term = if pos % 2 == 0 { v } else { f.neg(v) };
                        image[idx] = f.add(image[idx], term);
                    }
                }
                assert!(image.iter().all(|&x| x == 0));
            }
            assert_eq!(rank(&b.vectors), b.dim());
        }
    }

    #[test]
    fn koszul_dimension_equals_bott() {
        let f = field();
        for n in 1..=4u32 {
            for p in 0..=n {
                for k in -1..=7i64 {
                    let b = koszul_basis(f, n, p, k).unwrap();
                    assert_eq!(
                        b.dim() as u64,
                        bott(n, p, k, 0).unwrap(),
                        "n={n} p={p} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn eval_omega_examples() {
        let f = field();
        let m = eval_omega(f, 3, 1, 5, &pts(3, 28, 1984)).unwrap();
        assert_eq!((m.matrix.rows(), m.matrix.cols()), (112, 84));
        assert_eq!(m.rank(), 84);
        for a in 1..12 {
            let p = pts(2, a, 60 + a as u64);
            let r = eval_omega(f, 2, 0, 2, &p).unwrap().rank();
            assert_eq!(r, a.min(6));
            assert_eq!(r, eval_free(f, 2, &[2], &p).unwrap().rank());
        }
        assert_eq!(eval_omega(f, 3, 1, 5, &[]).unwrap().rank(), 0);
    }

    #[test]
    fn eval_omega_point_blocks_have_fiber_rank() {
        let f = field();
        for n in 1..=4u32 {
            for p in 0..=n {
                let k = p as i64 + 2;
                let points = pts(n, 3, 900 + n as u64 * 10 + p as u64);
                let m = eval_omega(f, n, p, k, &points).unwrap();
                let fiber = binom(n as i64, p as i64).unwrap() as usize;
                for i in 0..points.len() {
                    let block = m.matrix.select_rows(&m.point_rows(i));
                    assert!(rank(&block) <= fiber);
                }
            }
        }
    }

    #[test]
    fn omega_n_minus_1_matches_tangent() {
        let f = field();
        for (n, l, a) in [(2u32, 0i64, 5usize), (2, 1, 7), (3, 1, 12), (3, 0, 6)] {
            let p = pts(n, a, 321 + a as u64);
            let tan = eval_tangent(f, n, l, &p).unwrap().rank();
            let om = eval_omega(f, n, n - 1, l + n as i64 + 1, &p)
                .unwrap()
                .rank();
            assert_eq!(tan, om, "n={n} l={l} a={a}");
        }
    }

    #[test]
    fn apply_quotient_examples() {
        let f = field();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = eval_tangent(f, 3, 1, &pts(3, 5, 9)).unwrap();
        let same = apply_quotient(&m, 2, &FpMatrix::identity(f, 3)).unwrap();
        assert_eq!(same, m);
        let deleted = apply_quotient(&m, 4, &FpMatrix::zeros(f, 0, 3)).unwrap();
        assert_eq!(deleted.matrix.rows(), 12);
        assert!(deleted.point_rows(4).is_empty());
        let q = random_surjection(f, 3, 1, &mut rng).unwrap();
        let cut = apply_quotient(&m, 0, &q).unwrap();
        assert_eq!(cut.matrix.rows(), 13);
        assert!(cut.rank() + 2 >= m.rank() && cut.rank() <= m.rank());
        assert!(apply_quotient(&m, 0, &FpMatrix::identity(f, 2)).is_err());
        assert!(apply_quotient(&m, 9, &FpMatrix::identity(f, 3)).is_err());
    }
}
