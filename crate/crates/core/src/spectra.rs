//! Floating-point spectra of commuting families: joint eigenbases, simple
//! spectrum, cyclic vectors, normality under a Hermitian form, and eigenline
//! continuation along loops.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{to_f64, Mat, Poly, Rational, Tolerance};
use crate::envelope::{Envelope, UEElement};
use crate::reps::{RepError, TensorRep};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("ill-conditioned eigenproblem (condition estimate {0:e})")]
    IllConditioned(f64),
    #[error("matrices {0} and {1} do not commute (norm {2:e})")]
    NotCommuting(usize, usize, f64),
    #[error("form is not positive definite")]
    FormNotPositive,
    #[error("spectrum collision near s = {0}")]
    SpectrumCollision(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Rep(#[from] RepError),
}

pub fn to_complex(m: &Mat<Rational>) -> CMat {
    let r = m.len();
    let c = m.first().map_or(0, |x| x.len());
    CMat::from_fn(r, c, |i, j| Complex64::new(to_f64(&m[i][j]), 0.0))
}

/// Matrices with exact sources where available.
#[derive(Clone, Debug)]
pub struct CommutingFamily {
    matrices: Vec<CMat>,
    labels: Vec<String>,
    exact: Option<Vec<Mat<Rational>>>,
    tol: Tolerance,
}

impl CommutingFamily {
    pub fn new(matrices: Vec<CMat>, labels: Vec<String>, tol: Tolerance) -> Result<Self, SpectraError> {
        let d = matrices.first().map_or(0, |m| m.nrows());
        if matrices.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(SpectraError::Dimension("matrices must be square of equal size".into()));
        }
        if labels.len() != matrices.len() {
            return Err(SpectraError::Dimension("one label per matrix".into()));
        }
        let f = CommutingFamily {
            matrices,
            labels,
            exact: None,
            tol,
        };
        f.check_commuting()?;
        Ok(f)
    }

    pub fn from_exact(mats: Vec<Mat<Rational>>, labels: Vec<String>, tol: Tolerance) -> Result<Self, SpectraError> {
        let mut f = Self::new(mats.iter().map(to_complex).collect(), labels, tol)?;
        f.exact = Some(mats);
        Ok(f)
    }

    /// Matrices of `elems` on `rep`, restricted to the basis indices `rows` (whole space if `None`).
    pub fn from_elements(
        rep: &TensorRep,
        elems: &[UEElement<Rational>],
        labels: Vec<String>,
        rows: Option<&[usize]>,
        tol: Tolerance,
    ) -> Result<Self, SpectraError> {
        let all: Vec<usize> = (0..rep.dim()).collect();
        let rows = rows.unwrap_or(&all);
        let mats = elems.iter().map(|x| rep.matrix_block(x, rows, rows)).collect::<Result<Vec<_>, _>>()?;
        Self::from_exact(mats, labels, tol)
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn exact(&self) -> Option<&[Mat<Rational>]> {
        self.exact.as_deref()
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.nrows())
    }

    /// Restriction to a coordinate subspace preserved by every matrix.
    pub fn restrict(&self, idx: &[usize]) -> Result<Self, SpectraError> {
        let sub = |m: &CMat| CMat::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])]);
        for (k, m) in self.matrices.iter().enumerate() {
            let leak: f64 = (0..m.nrows())
                .filter(|r| !idx.contains(r))
                .flat_map(|r| idx.iter().map(move |&c| m[(r, c)].norm_sqr()))
                .sum::<f64>()
                .sqrt();
            if leak > self.bound(m.norm()) {
                return Err(SpectraError::Dimension(format!("{} does not preserve the subspace", self.labels[k])));
            }
        }
        Ok(CommutingFamily {
            matrices: self.matrices.iter().map(sub).collect(),
            labels: self.labels.clone(),
            exact: self.exact.as_ref().map(|ms| {
                ms.iter()
                    .map(|m| idx.iter().map(|&a| idx.iter().map(|&b| m[a][b].clone()).collect()).collect())
                    .collect()
            }),
            tol: self.tol,
        })
    }

    fn bound(&self, scale: f64) -> f64 {
        self.tol.absolute + self.tol.relative * scale
    }

    fn check_commuting(&self) -> Result<(), SpectraError> {
        let m = &self.matrices;
        for a in 0..m.len() {
            for b in a + 1..m.len() {
                let c = (&m[a] * &m[b] - &m[b] * &m[a]).norm();
                if c > self.bound(m[a].norm() * m[b].norm()) {
                    return Err(SpectraError::NotCommuting(a, b, c));
                }
            }
        }
        Ok(())
    }

    /// Eigenvalues closer than this are treated as equal.
    fn cluster_tol(&self, norm: f64) -> f64 {
        self.tol.absolute.sqrt().max(1e3 * self.tol.relative) * (1.0 + norm)
    }

    pub fn joint_eigenbasis(&self, seed: u64) -> Result<JointSpectrum, SpectraError> {
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let norm = self.matrices.iter().map(|m| m.norm()).fold(0.0, f64::max);
        let ctol = self.cluster_tol(norm);
        let mut leaves = Vec::new();
        if d > 0 {
            split(&self.matrices, CMat::identity(d, d), ctol, &mut rng, &mut leaves)?;
        }
        let mut lines = Vec::new();
        let mut values = Vec::new();
        let mut simple = true;
        let mut residual_max: f64 = 0.0;
        for leaf in &leaves {
            if leaf.ncols() > 1 {
                simple = false;
            }
            for c in 0..leaf.ncols() {
                let v: CVec = leaf.column(c).into_owned();
                let mut tuple = Vec::new();
                for m in &self.matrices {
                    let mv = m * &v;
                    let lam = v.dotc(&mv);
                    residual_max = residual_max.max((mv - &v * lam).norm() / m.norm().max(1.0));
                    tuple.push(lam);
                }
                lines.push(v);
                values.push(tuple);
            }
        }
        // lexicographic, per coordinate
        let mut order: Vec<usize> = (0..lines.len()).collect();
        order.sort_by(|&a, &b| {
            for (x, y) in values[a].iter().zip(&values[b]) {
                let o = x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap());
                if (x - y).norm() > ctol {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        });
        let lines: Vec<CVec> = order.iter().map(|&i| lines[i].clone()).collect();
        let values: Vec<Vec<Complex64>> = order.iter().map(|&i| values[i].clone()).collect();
        for a in 0..values.len() {
            for b in a + 1..values.len() {
                if values[a].iter().zip(&values[b]).all(|(x, y)| (x - y).norm() <= ctol) {
                    simple = false;
                }
            }
        }
        Ok(JointSpectrum {
            labels: self.labels.clone(),
            eigenlines: lines,
            eigenvalues: values,
            simple,
            residual_max,
        })
    }

    /// Krylov test: monomials of degree ≤ `cap` (default `dim`) applied to `v` span the space.
    pub fn is_cyclic(&self, v: &CVec, cap: Option<usize>) -> bool {
        let d = self.dim();
        let cap = cap.unwrap_or(d);
        let scale = self.matrices.iter().map(|m| m.norm()).fold(1.0, f64::max);
        let mut basis: Vec<CVec> = Vec::new();
        let mut frontier = Vec::new();
        if let Some(u) = orthonormalize(&basis, v.clone(), self.bound(v.norm().max(1.0))) {
            basis.push(u.clone());
            frontier.push(u);
        }
        let mut deg = 0;
        while !frontier.is_empty() && basis.len() < d && deg < cap {
            let mut next = Vec::new();
            for u in &frontier {
                for m in &self.matrices {
                    if let Some(w) = orthonormalize(&basis, m * u, self.bound(scale)) {
                        basis.push(w.clone());
                        next.push(w);
                    }
                }
            }
            frontier = next;
            deg += 1;
        }
        d > 0 && basis.len() == d
    }

    /// Every matrix commutes with its adjoint `G⁻¹ Aᴴ G` under the form `G`.
    pub fn is_normal_family(&self, form: &CMat) -> Result<bool, SpectraError> {
        let g = check_form(form, self.dim(), self.tol)?;
        let ginv = g.clone().try_inverse().ok_or(SpectraError::FormNotPositive)?;
        Ok(self.matrices.iter().all(|a| {
            let adj = &ginv * a.adjoint() * &g;
            (a * &adj - &adj * a).norm() <= self.bound(a.norm() * adj.norm())
        }))
    }
}

fn check_form(form: &CMat, d: usize, tol: Tolerance) -> Result<CMat, SpectraError> {
    if form.nrows() != d || form.ncols() != d {
        return Err(SpectraError::Dimension(format!(
            "form is {}x{}, family acts on dimension {d}",
            form.nrows(),
            form.ncols()
        )));
    }
    if (form - form.adjoint()).norm() > tol.absolute + tol.relative * form.norm() {
        return Err(SpectraError::FormNotPositive);
    }
    for k in 1..=d {
        let minor = form.view((0, 0), (k, k)).into_owned().determinant();
        if minor.re <= 0.0 {
            return Err(SpectraError::FormNotPositive);
        }
    }
    Ok(form.clone())
}

/// Component of `v` orthogonal to `basis`, normalized; `None` if negligible.
fn orthonormalize(basis: &[CVec], mut v: CVec, eps: f64) -> Option<CVec> {
    let n0 = v.norm();
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(&v);
            v -= b * c;
        }
    }
    let n = v.norm();
    if n <= eps.max(1e-12 * n0) {
        None
    } else {
        Some(v / Complex64::new(n, 0.0))
    }
}

fn is_scalar(m: &CMat, ctol: f64) -> bool {
    let d = m.nrows();
    let t = m.trace() / Complex64::new(d as f64, 0.0);
    (m - CMat::identity(d, d) * t).norm() <= ctol
}

/// Orthonormal basis (columns) of the `k`-dimensional near-kernel of `m`, with the largest discarded singular value.
fn near_kernel(m: &CMat, k: usize) -> (CMat, f64) {
    let d = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].partial_cmp(&svd.singular_values[b]).unwrap());
    let worst = idx[..k].iter().map(|&i| svd.singular_values[i]).fold(0.0, f64::max);
    let cols: Vec<CVec> = idx[..k].iter().map(|&i| vt.row(i).adjoint()).collect();
    let mut out = CMat::zeros(d, k);
    for (c, v) in cols.iter().enumerate() {
        out.set_column(c, v);
    }
    (out, worst)
}

fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>, SpectraError> {
    let d = m.nrows();
    if d == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000 * d).ok_or(SpectraError::IllConditioned(f64::INFINITY))?;
    Ok(schur
        .eigenvalues()
        .ok_or(SpectraError::IllConditioned(f64::INFINITY))?
        .iter()
        .cloned()
        .collect())
}

/// Greedy single-linkage clusters of eigenvalues: (representative, multiplicity).
fn cluster(vals: &[Complex64], ctol: f64) -> Vec<(Complex64, usize)> {
    let mut vs = vals.to_vec();
    vs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for v in vs {
        match groups.iter_mut().find(|g| g.iter().any(|x| (x - v).norm() <= ctol)) {
            Some(g) => g.push(v),
            None => groups.push(vec![v]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let k = g.len();
            (g.iter().sum::<Complex64>() / Complex64::new(k as f64, 0.0), k)
        })
        .collect()
}

/// Splits the invariant subspace spanned by the orthonormal columns of `v` into joint eigenspaces.
fn split(mats: &[CMat], v: CMat, ctol: f64, rng: &mut ChaCha8Rng, out: &mut Vec<CMat>) -> Result<(), SpectraError> {
    let m = v.ncols();
    let vh = v.adjoint();
    let restricted: Vec<CMat> = mats.iter().map(|a| &vh * a * &v).collect();
    if m == 1 || restricted.iter().all(|b| is_scalar(b, ctol)) {
        out.push(v);
        return Ok(());
    }
    for _attempt in 0..4 {
        let mut c = CMat::zeros(m, m);
        for b in &restricted {
            let w: f64 = rng.random_range(0.5..1.5);
            c += b * Complex64::new(w, 0.0);
        }
        let groups = cluster(&eigenvalues(&c)?, ctol);
        if groups.len() == 1 {
            // a generic combination is scalar while some matrix is not: not semisimple, or unlucky
            continue;
        }
        let mut parts = Vec::new();
        for (lam, k) in groups {
            let shifted = &c - CMat::identity(m, m) * lam;
            let (ker, worst) = near_kernel(&shifted, k);
            if worst > ctol {
                return Err(SpectraError::IllConditioned(worst / ctol));
            }
            let w = &v * ker;
            // re-orthonormalize in the ambient space
            let q = w.qr().q();
            parts.push(q);
        }
        for p in parts {
            split(mats, p, ctol, rng, out)?;
        }
        return Ok(());
    }
    Err(SpectraError::IllConditioned(f64::INFINITY))
}

#[derive(Clone, Debug)]
pub struct JointSpectrum {
    pub labels: Vec<String>,
    pub eigenlines: Vec<CVec>,
    /// One row per eigenline, one entry per matrix.
    pub eigenvalues: Vec<Vec<Complex64>>,
    pub simple: bool,
    /// Largest `‖Av − λv‖ / max(1, ‖A‖)`.
    pub residual_max: f64,
}

impl JointSpectrum {
    pub fn len(&self) -> usize {
        self.eigenlines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenlines.is_empty()
    }

    /// Largest normalized `|⟨u, v⟩_G|` between distinct eigenlines.
    pub fn orthogonality_defect(&self, form: &CMat) -> f64 {
        let ip = |a: &CVec, b: &CVec| a.dotc(&(form * b));
        let mut worst: f64 = 0.0;
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                let (u, v) = (&self.eigenlines[a], &self.eigenlines[b]);
                worst = worst.max(ip(u, v).norm() / (ip(u, u).norm() * ip(v, v).norm()).sqrt());
            }
        }
        worst
    }

    fn all_real(&self, eps: f64) -> bool {
        self.eigenvalues.iter().flatten().all(|z| z.im.abs() <= eps)
    }

    pub fn to_json(&self) -> Value {
        let eps = 1e-9;
        let re: Vec<Vec<f64>> = self.eigenvalues.iter().map(|r| r.iter().map(|z| z.re).collect()).collect();
        let mut o = json!({
            "labels": self.labels,
            "eigenvalues": re,
            "simple": self.simple,
            "residual_max": self.residual_max,
        });
        if !self.all_real(eps) {
            let im: Vec<Vec<f64>> = self.eigenvalues.iter().map(|r| r.iter().map(|z| z.im).collect()).collect();
            o["eigenvalues_im"] = json!(im);
        }
        o
    }

    /// One row per eigenline: `line`, then `label` (and `label_im` for complex spectra) columns.
    /// Eigenvalues have imaginary parts above 1e-9.
    pub fn is_complex(&self) -> bool {
        !self.all_real(1e-9)
    }

    pub fn csv_header(&self, complex: bool) -> Vec<String> {
        let mut head = vec!["block".to_string(), "line".to_string()];
        for l in &self.labels {
            head.push(l.clone());
            if complex {
                head.push(format!("{l}_im"));
            }
        }
        head
    }

    pub fn csv_rows(&self, tag: &str, complex: bool) -> Vec<Vec<String>> {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(k, row)| {
                let mut rec = vec![tag.to_string(), k.to_string()];
                for z in row {
                    rec.push(z.re.to_string());
                    if complex {
                        rec.push(z.im.to_string());
                    }
                }
                rec
            })
            .collect()
    }

    /// One block with its header.
    pub fn write_csv<W: std::io::Write>(&self, w: W, tag: &str) -> Result<(), csv::Error> {
        let complex = self.is_complex();
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(self.csv_header(complex))?;
        for r in self.csv_rows(tag, complex) {
            wr.write_record(&r)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Exact oracle: a random integer combination has square-free characteristic polynomial.
pub fn exact_simple_spectrum(mats: &[Mat<Rational>], seed: u64) -> bool {
    let d = mats.first().map_or(0, |m| m.len());
    if d <= 1 {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![vec![Rational::zero(); d]; d];
    for m in mats {
        let w = Rational::from_integer(rng.random_range(1..=997).into());
        for i in 0..d {
            for j in 0..d {
                c[i][j] += &m[i][j] * &w;
            }
        }
    }
    let p = charpoly(&c);
    let dp = Poly::new(
        (1..p.coeffs().len())
            .map(|k| &p.coeffs()[k] * Rational::from_integer((k as i64).into()))
            .collect(),
    );
    Poly::gcd(&p, &dp).is_constant()
}

/// Faddeev–LeVerrier: `det(x − A)`.
pub fn charpoly(a: &Mat<Rational>) -> Poly {
    let d = a.len();
    let mut coeffs = vec![Rational::zero(); d + 1];
    coeffs[d] = Rational::from_integer(1.into());
    let mut m = vec![vec![Rational::zero(); d]; d];
    for k in 1..=d {
        // M_k = A M_{k−1} + c_{d−k+1} I
        let mut next = crate::arith::mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[d - k + 1];
        }
        m = next;
        let am = crate::arith::mat_mul(a, &m);
        let tr: Rational = (0..d).map(|i| am[i][i].clone()).sum();
        coeffs[d - k] = -tr / Rational::from_integer((k as i64).into());
    }
    Poly::new(coeffs)
}

/// Eigenline permutation of a closed loop `s ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monodromy {
    /// Line `a` at the start ends on line `permutation[a]` of the start basis.
    pub permutation: Vec<usize>,
    pub samples: usize,
}

impl Monodromy {
    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(a, &b)| a == b)
    }

    pub fn compose(&self, o: &Monodromy) -> Vec<usize> {
        self.permutation.iter().map(|&b| o.permutation[b]).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({ "permutation": self.permutation, "samples": self.samples })
    }
}

const MAX_REFINE: usize = 16;

/// Greedy maximal-overlap matching; `None` when some match is not clear-cut.
fn match_lines(from: &[CVec], to: &[CVec]) -> Option<Vec<usize>> {
    let n = from.len();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            pairs.push((from[a].dotc(&to[b]).norm() / (from[a].norm() * to[b].norm()), a, b));
        }
    }
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let mut out = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for &(o, a, b) in &pairs {
        if out[a] == usize::MAX && !used[b] {
            if o < 0.75 {
                return None;
            }
            out[a] = b;
            used[b] = true;
        }
    }
    Some(out)
}

/// Tracks eigenlines of `family(s)` from `s = 0` to `s = 1` over `steps` equal steps,
/// bisecting a step when matching is ambiguous and nudging samples off collisions.
pub fn monodromy_permutation<F>(family: F, steps: usize, seed: u64) -> Result<Monodromy, SpectraError>
where
    F: Fn(f64) -> Result<CommutingFamily, SpectraError>,
{
    let steps = steps.max(1);
    let simple_at = |s: f64| -> Result<Option<Vec<CVec>>, SpectraError> {
        let sp = family(s)?.joint_eigenbasis(seed)?;
        Ok(if sp.simple { Some(sp.eigenlines) } else { None })
    };
    let start = simple_at(0.0)?.ok_or(SpectraError::SpectrumCollision(0.0))?;
    let mut samples = 1;
    let mut lines = start.clone();
    let mut s0 = 0.0;
    for k in 1..=steps {
        let s1 = k as f64 / steps as f64;
        let (next, used) = advance(&simple_at, &lines, s0, s1, 0)?;
        samples += used;
        lines = next;
        s0 = s1;
    }
    let perm = match_lines(&lines, &start).ok_or(SpectraError::SpectrumCollision(1.0))?;
    Ok(Monodromy { permutation: perm, samples })
}

type Sampler<'a> = dyn Fn(f64) -> Result<Option<Vec<CVec>>, SpectraError> + 'a;

/// Lines at `s1` continued from `lines` at `s0`, in the same order; also returns the sample count.
fn advance(at: &Sampler<'_>, lines: &[CVec], s0: f64, s1: f64, depth: usize) -> Result<(Vec<CVec>, usize), SpectraError> {
    let mut target = s1;
    let mut sample = at(target)?;
    let mut nudge = 0;
    while sample.is_none() {
        nudge += 1;
        if nudge > MAX_REFINE || s1 >= 1.0 {
            return Err(SpectraError::SpectrumCollision(s1));
        }
        target = s1 - (s1 - s0) * 0.5f64.powi(nudge as i32 + 1);
        sample = at(target)?;
    }
    let new = sample.unwrap();
    if new.len() != lines.len() {
        return Err(SpectraError::Dimension("eigenline count changed along the path".into()));
    }
    if let Some(m) = match_lines(lines, &new) {
        let ordered = m.iter().map(|&b| new[b].clone()).collect();
        if target == s1 {
            return Ok((ordered, 1));
        }
        let (rest, used) = advance(at, &ordered, target, s1, depth + 1)?;
        return Ok((rest, used + 1));
    }
    if depth >= MAX_REFINE {
        return Err(SpectraError::SpectrumCollision(s1));
    }
    let mid = 0.5 * (s0 + s1);
    let (half, u1) = advance(at, lines, s0, mid, depth + 1)?;
    let (full, u2) = advance(at, &half, mid, s1, depth + 1)?;
    Ok((full, u1 + u2))
}

/// `s ↦ fixed ∪ {cos(πs)·a + sin(πs)·b}`: the pencil `[a : b]` traversed once around ℙ¹(ℝ).
pub fn pencil_loop(fixed: Vec<CMat>, a: CMat, b: CMat, tol: Tolerance) -> impl Fn(f64) -> Result<CommutingFamily, SpectraError> {
    move |s: f64| {
        let (sn, cs) = (std::f64::consts::PI * s).sin_cos();
        let mut mats = fixed.clone();
        mats.push(&a * Complex64::new(cs, 0.0) + &b * Complex64::new(sn, 0.0));
        let labels = (0..mats.len()).map(|k| format!("m{k}")).collect();
        CommutingFamily::new(mats, labels, tol)
    }
}

/// Exchange loop for two points, inhomogeneous model: `ν = 1/(z₁ − z₂)` runs once around ℙ¹(ℝ)
/// (through the flower point `ν = 0` and the collision `ν = ∞`).
/// Family: `{Δχ, sin(πs)·χ^{(1)} + cos(πs)·Ω^{(12)}}`.
pub fn exchange_loop(
    env: &Envelope,
    rep: &TensorRep,
    chi: &[Rational],
    tol: Tolerance,
) -> Result<impl Fn(f64) -> Result<CommutingFamily, SpectraError>, SpectraError> {
    if rep.n_factors() != 2 {
        return Err(SpectraError::Dimension("exchange loop needs two factors".into()));
    }
    let c1 = env.cartan(2, 0, chi);
    let delta = c1.add(&env.cartan(2, 1, chi));
    let om = env.omega::<Rational>(2, 0, 1);
    let m = |x: &UEElement<Rational>| rep.matrix_of(x).map(|m| to_complex(&m));
    Ok(pencil_loop(vec![m(&delta)?], m(&om)?, m(&c1)?, tol))
}

/// `s ↦ p(2s)` then back: `p(2 − 2s)`.
pub fn there_and_back<F>(p: F) -> impl Fn(f64) -> Result<CommutingFamily, SpectraError>
where
    F: Fn(f64) -> Result<CommutingFamily, SpectraError>,
{
    move |s: f64| if s <= 0.5 { p(2.0 * s) } else { p(2.0 - 2.0 * s) }
}

/// Trigonometric Hamiltonians with complex `z`, `θ` (h-coordinates) as matrices on the basis indices `rows`.
pub fn trig_matrices(env: &Envelope, rep: &TensorRep, z: &[Complex64], theta: &[Complex64], rows: &[usize]) -> Result<Vec<CMat>, SpectraError> {
    let n = z.len();
    let r = env.lie().rank();
    if theta.len() != r || rep.n_factors() != n {
        return Err(SpectraError::Dimension("theta or point count".into()));
    }
    let block = |x: &UEElement<Rational>| -> Result<CMat, SpectraError> { Ok(to_complex(&rep.matrix_block(x, rows, rows)?)) };
    let mut out = Vec::new();
    for i in 0..n {
        let mut h = CMat::zeros(rows.len(), rows.len());
        let zi_inv = Complex64::new(1.0, 0.0) / z[i];
        for (k, t) in theta.iter().enumerate() {
            let mut e = vec![Rational::zero(); r];
            e[k] = Rational::from_integer(1.into());
            h += block(&env.cartan(n, i, &e))? * (t * zi_inv);
        }
        for j in 0..n {
            h -= block(&env.omega_minus(n, i, j))? * zi_inv;
            if j != i {
                h += block(&env.omega(n, i, j))? / (z[i] - z[j]);
            }
        }
        out.push(h);
    }
    Ok(out)
}

/// Reality conditions tried for the compact real form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompactConvention {
    /// `θ − μ/2 ∈ i𝔥_ℝ`
    MinusHalfMu,
    /// `θ + μ/2 ∈ i𝔥_ℝ`
    PlusHalfMu,
    /// `θ + ρ + μ/2 ∈ i𝔥_ℝ`
    RhoPlusHalfMu,
}

impl CompactConvention {
    pub const ALL: [CompactConvention; 3] = [Self::MinusHalfMu, Self::PlusHalfMu, Self::RhoPlusHalfMu];

    pub fn describe(self) -> &'static str {
        match self {
            Self::MinusHalfMu => "theta - mu/2 imaginary",
            Self::PlusHalfMu => "theta + mu/2 imaginary",
            Self::RhoPlusHalfMu => "theta + rho + mu/2 imaginary",
        }
    }
}

/// `θ` in h-coordinates with the given imaginary part satisfying `conv` for the weight `mu` (fundamental coordinates).
pub fn compact_theta(env: &Envelope, mu: &[Rational], imag: &[f64], conv: CompactConvention) -> Result<Vec<Complex64>, SpectraError> {
    let lie = env.lie();
    let m = lie.weight_to_cartan(mu).map_err(|e| SpectraError::Dimension(e.to_string()))?.coords;
    if imag.len() != m.len() {
        return Err(SpectraError::Dimension("imaginary part has wrong length".into()));
    }
    let rho = lie.rho().coords;
    Ok((0..m.len())
        .map(|k| {
            let half = 0.5 * to_f64(&m[k]);
            let re = match conv {
                CompactConvention::MinusHalfMu => half,
                CompactConvention::PlusHalfMu => -half,
                CompactConvention::RhoPlusHalfMu => -half - to_f64(&rho[k]),
            };
            Complex64::new(re, imag[k])
        })
        .collect())
}

/// Normal and simple on every weight space for the compact trig family.
pub fn compact_trig_check(
    env: &Envelope,
    rep: &TensorRep,
    z: &[Complex64],
    imag: &[f64],
    conv: CompactConvention,
    tol: Tolerance,
    seed: u64,
) -> Result<(bool, bool), SpectraError> {
    let g = to_complex(&rep.hermitian_gram());
    let (mut normal, mut simple) = (true, true);
    for w in rep.weights() {
        let rows = rep.weight_space(&w);
        let theta = compact_theta(env, &w, imag, conv)?;
        let mats = trig_matrices(env, rep, z, &theta, &rows)?;
        let labels = (1..=mats.len()).map(|i| format!("H{i}")).collect();
        let f = CommutingFamily::new(mats, labels, tol)?;
        let form = CMat::from_fn(rows.len(), rows.len(), |a, b| g[(rows[a], rows[b])]);
        normal &= f.is_normal_family(&form)?;
        let sp = f.joint_eigenbasis(seed)?;
        simple &= sp.simple && sp.residual_max <= 1e-9;
    }
    Ok((normal, simple))
}
