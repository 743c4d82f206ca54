//! Quadratic Gaudin Hamiltonians (homogeneous, trigonometric, inhomogeneous,
//! dynamical), their quadratic spans at interior and boundary points, and
//! exact ε → 0 limits of spans.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{express_in, mat_inv, mat_mul, mat_vec, rank, rref, transpose, Mat, RatFunc, Rational, Scalar};
use crate::envelope::{coordinate_matrix, from_coordinates, Envelope, EnvelopeError, Theta, UEElement, Word};
use crate::holonomy::{gamma_apply, GammaVariant, HolonomyAlgebra, HolonomyError};
use crate::liealg::{is_regular, CartanRole, CartanVector};
use crate::moduli::{ModuliError, ModuliPoint, Space};
use crate::reps::{build_irrep, default_depth, is_generic_theta, Factor, RepError, TensorRep, TruncatedVerma};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaudinError {
    #[error("marked points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),
    #[error("point {0} sits at 0")]
    ZeroPoint(usize),
    #[error("chi is not regular")]
    NonRegularChi,
    #[error("no chart contains the point: {0}")]
    ChartNotFound(String),
    #[error("limit lost rank ({got} < {want})")]
    RankDrop { got: usize, want: usize },
    #[error("parameter has {got} entries, expected {want}")]
    WrongLength { got: usize, want: usize },
    #[error("wrong point type: {0}")]
    WrongPoint(String),
    #[error("pairwise commutator [{0}, {1}] is nonzero")]
    NotCommutative(usize, usize),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("theta is not generic for depth {0}")]
    NonGenericTheta(usize),
    #[error("singular space and weight space differ in dimension ({0} vs {1})")]
    SingularDimension(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Homogeneous,
    Trig,
    Inhomogeneous,
    Dynamical,
}

impl Model {
    pub fn parse(s: &str) -> Option<Model> {
        match s {
            "homogeneous" => Some(Model::Homogeneous),
            "trig" | "trigonometric" => Some(Model::Trig),
            "inhomogeneous" => Some(Model::Inhomogeneous),
            "dynamical" => Some(Model::Dynamical),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HamiltonianSet<S> {
    pub model: Model,
    pub n: usize,
    pub elements: Vec<UEElement<S>>,
}

impl<S: Scalar> HamiltonianSet<S> {
    /// First non-commuting pair, if any.
    pub fn commutator_failure(&self, env: &Envelope) -> Option<(usize, usize)> {
        let e = &self.elements;
        (0..e.len())
            .flat_map(|a| (a + 1..e.len()).map(move |b| (a, b)))
            .find(|&(a, b)| !env.commutator(&e[a], &e[b]).is_zero())
    }

    pub fn check_commutative(&self, env: &Envelope) -> Result<(), GaudinError> {
        match self.commutator_failure(env) {
            Some((a, b)) => Err(GaudinError::NotCommutative(a, b)),
            None => Ok(()),
        }
    }
}

fn check_distinct<S: Scalar>(z: &[S]) -> Result<(), GaudinError> {
    for a in 0..z.len() {
        for b in a + 1..z.len() {
            if z[a] == z[b] {
                return Err(GaudinError::CoincidentPoints(a + 1, b + 1));
            }
        }
    }
    Ok(())
}

fn check_rank(env: &Envelope, got: usize) -> Result<(), GaudinError> {
    let want = env.lie().rank();
    if got != want {
        return Err(GaudinError::WrongLength { got, want });
    }
    Ok(())
}

/// `Σ_{j≠i} Ω^{(ij)}/(z_i − z_j)` on `z.len()` factors (factor `i` ↔ `z[i]`).
fn rational_part<S: Scalar>(env: &Envelope, z: &[S], i: usize) -> UEElement<S> {
    let n = z.len();
    let mut h = UEElement::zero(n);
    for j in 0..n {
        if j != i {
            let c = S::one() / (z[i].clone() - &z[j]);
            h.add_assign(&env.omega::<S>(n, i, j).scale(&c));
        }
    }
    h
}

/// `H_i(z) = Σ_{j≠i} Ω^{(ij)}/(z_i − z_j)`.
pub fn homogeneous<S: Scalar>(env: &Envelope, z: &[S]) -> Result<HamiltonianSet<S>, GaudinError> {
    check_distinct(z)?;
    let elements = (0..z.len()).map(|i| rational_part(env, z, i)).collect();
    Ok(HamiltonianSet {
        model: Model::Homogeneous,
        n: z.len(),
        elements,
    })
}

/// `H^trig_{i,θ} = θ^{(i)}/z_i + Σ_{j≠i} Ω^{(ij)}/(z_i − z_j) − Σ_j Ω₋^{(ij)}/z_i`, θ in h-coordinates.
pub fn trigonometric<S: Scalar>(env: &Envelope, z: &[S], theta: &[S]) -> Result<HamiltonianSet<S>, GaudinError> {
    check_distinct(z)?;
    check_rank(env, theta.len())?;
    let n = z.len();
    if let Some(i) = z.iter().position(|x| x.is_zero()) {
        return Err(GaudinError::ZeroPoint(i + 1));
    }
    let mut elements = Vec::new();
    for i in 0..n {
        let inv = S::one() / z[i].clone();
        let mut x = env.cartan(n, i, theta);
        for j in 0..n {
            x = x.sub(&env.omega_minus(n, i, j));
        }
        let mut h = x.scale(&inv);
        h.add_assign(&rational_part(env, z, i));
        elements.push(h);
    }
    Ok(HamiltonianSet {
        model: Model::Trig,
        n,
        elements,
    })
}

/// `ψ_θ(H_i(0, z))` for `i = 1..n`, computed by reduction.
pub fn trig_by_reduction<S: Scalar>(env: &Envelope, z: &[S], theta: &[S]) -> Result<Vec<UEElement<S>>, GaudinError> {
    check_rank(env, theta.len())?;
    let mut w = vec![S::zero()];
    w.extend(z.iter().cloned());
    let h = homogeneous(env, &w)?;
    h.elements[1..]
        .iter()
        .map(|x| Ok(env.psi_reduce(x, &Theta::Value(theta.to_vec()), false)?))
        .collect()
}

/// `H_{i,χ} = χ^{(i)} + Σ_{j≠i} Ω^{(ij)}/(z_i − z_j)`, χ ∈ 𝔥 in h-coordinates.
pub fn inhomogeneous<S: Scalar>(env: &Envelope, z: &[S], chi: &[S]) -> Result<HamiltonianSet<S>, GaudinError> {
    check_distinct(z)?;
    check_rank(env, chi.len())?;
    let n = z.len();
    let elements = (0..n)
        .map(|i| {
            let mut h = env.cartan(n, i, chi);
            h.add_assign(&rational_part(env, z, i));
            h
        })
        .collect();
    Ok(HamiltonianSet {
        model: Model::Inhomogeneous,
        n,
        elements,
    })
}

/// `G_k = Σ_{α>0} α(h_k)/α(χ) Δⁿ(e_α f_α) + Σ_j z_j h_k^{(j)}` for each Cartan basis vector `h_k`.
///
/// `e_α, f_α` are dual under the trace form, so `x_α x^α = e_α f_α` with factor 1.
pub fn dynamical(env: &Envelope, z: &[Rational], chi: &[Rational]) -> Result<HamiltonianSet<Rational>, GaudinError> {
    check_distinct(z)?;
    check_rank(env, chi.len())?;
    let lie = env.lie();
    if !is_regular(&CartanVector::new(chi.to_vec(), CartanRole::Chi), lie) {
        return Err(GaudinError::NonRegularChi);
    }
    let n = z.len();
    let all: Vec<usize> = (0..n).collect();
    let mut elements = Vec::new();
    for k in 0..lie.rank() {
        let mut hk = vec![Rational::zero(); lie.rank()];
        hk[k] = Rational::one();
        let mut g = UEElement::zero(n);
        for r in 0..lie.n_pos_roots() {
            let c = lie.root_value(r, &hk) / lie.root_value(r, chi);
            if c.is_zero() {
                continue;
            }
            let e = env.diagonal::<Rational>(n, &all, lie.e_index(r));
            let f = env.diagonal::<Rational>(n, &all, lie.f_index(r));
            g.add_assign(&env.mul(&e, &f).scale(&c));
        }
        for (j, zj) in z.iter().enumerate() {
            g.add_assign(&UEElement::gen(n, j, lie.h_index(k)).scale(zj));
        }
        elements.push(g);
    }
    Ok(HamiltonianSet {
        model: Model::Dynamical,
        n,
        elements,
    })
}

/// `ω^{(i)}` for all factors.
pub fn casimirs<S: Scalar>(env: &Envelope, n: usize) -> Vec<UEElement<S>> {
    (0..n).map(|i| env.omega(n, i, i)).collect()
}

/// Row-reduced span of filtered-degree-2 elements in PBW coordinates.
#[derive(Clone, Debug)]
pub struct QuadraticSpan<S> {
    n_factors: usize,
    words: Vec<Word>,
    rows: Mat<S>,
}

impl<S: Scalar> QuadraticSpan<S> {
    pub fn from_elements(n_factors: usize, elems: &[UEElement<S>]) -> Self {
        let (words, m) = coordinate_matrix(elems);
        let (rows, _) = rref(m, words.len());
        QuadraticSpan { n_factors, words, rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn n_factors(&self) -> usize {
        self.n_factors
    }

    pub fn elements(&self) -> Vec<UEElement<S>> {
        from_coordinates(&self.words, &self.rows, self.n_factors)
    }

    pub fn contains(&self, x: &UEElement<S>) -> bool {
        let mut e = self.elements();
        e.push(x.clone());
        let (w, m) = coordinate_matrix(&e);
        rank(&m, w.len()) == self.dim()
    }

    pub fn same_as(&self, o: &Self) -> bool {
        if self.dim() != o.dim() || self.n_factors != o.n_factors {
            return false;
        }
        let mut e = self.elements();
        e.extend(o.elements());
        let (w, m) = coordinate_matrix(&e);
        rank(&m, w.len()) == self.dim()
    }

    pub fn to_json(&self, env: &Envelope) -> serde_json::Value {
        serde_json::Value::Array(self.elements().iter().map(|e| serde_json::Value::String(env.render(e))).collect())
    }
}

/// Grassmannian limit at ε = 0 of a span over ℚ(ε).
pub fn span_limit_eps0(span: &QuadraticSpan<RatFunc>) -> Result<QuadraticSpan<Rational>, GaudinError> {
    let want = span.dim();
    let ncols = span.words.len();
    let normalize = |row: Vec<RatFunc>| -> Vec<RatFunc> {
        let ord = row.iter().filter_map(|x| x.leading_laurent().map(|(o, _)| o)).min().expect("nonzero row");
        row.into_iter().map(|x| x.shift(-ord)).collect()
    };
    let mut rows: Vec<Vec<RatFunc>> = span.rows.iter().cloned().map(normalize).collect();
    for _ in 0..(64 * want.max(1)) {
        let at0: Mat<Rational> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.limit_at_zero().expect("normalized rows are regular")).collect())
            .collect();
        // dependency among the leading rows, found as a kernel vector of the transpose
        let t: Mat<Rational> = (0..ncols).map(|c| at0.iter().map(|r| r[c].clone()).collect()).collect();
        let ker = crate::arith::nullspace(&t, rows.len());
        let Some(dep) = ker.into_iter().next() else {
            let elems = from_coordinates(&span.words, &at0, span.n_factors);
            return Ok(QuadraticSpan::from_elements(span.n_factors, &elems));
        };
        let k = dep.iter().rposition(|c| !c.is_zero()).unwrap();
        let mut comb = vec![RatFunc::zero(); ncols];
        for (c, r) in dep.iter().zip(&rows) {
            if !c.is_zero() {
                let cc = RatFunc::from_rational(c.clone());
                for (a, b) in comb.iter_mut().zip(r) {
                    *a += cc.clone() * b;
                }
            }
        }
        if comb.iter().all(|x| x.is_zero()) {
            return Err(GaudinError::RankDrop { got: want - 1, want });
        }
        rows[k] = normalize(comb);
    }
    Err(GaudinError::RankDrop { got: 0, want })
}

/// Parameters of a quadratic span request.
#[derive(Clone, Debug)]
pub enum SpanParams {
    /// M point on labels `1..=n` (∞ implicit)
    Homogeneous,
    /// M point on labels `0..=n` (0 and ∞ marked), θ in h-coordinates
    Trig(Vec<Rational>),
    /// F point on labels `1..=n`, χ in h-coordinates
    Inhomogeneous(Vec<Rational>),
}

/// `{H} ∪ {ω}` at an interior point, `γ(Q(C)) ⊕ span(ω)` at a boundary point.
pub fn quad_span(env: &Envelope, point: &ModuliPoint, params: &SpanParams) -> Result<QuadraticSpan<Rational>, GaudinError> {
    let labels = point.labels();
    match params {
        SpanParams::Homogeneous => {
            if point.space() != Space::M {
                return Err(GaudinError::WrongPoint("homogeneous spans live on M points".into()));
            }
        }
        SpanParams::Trig(_) => {
            if point.space() != Space::M || labels.first() != Some(&0) {
                return Err(GaudinError::WrongPoint("trig spans live on M points with labels 0..=n".into()));
            }
        }
        SpanParams::Inhomogeneous(_) => {
            if point.space() != Space::F {
                return Err(GaudinError::WrongPoint("inhomogeneous spans live on F points".into()));
            }
        }
    }
    match point.interior_marked_points() {
        Some(z) => interior_span(env, &z, params),
        None => boundary_span(env, point, params),
    }
}

/// Span of the Hamiltonians and Casimirs at marked points (for trig, `z[0]` is the point 0).
pub fn interior_span(env: &Envelope, z: &[Rational], params: &SpanParams) -> Result<QuadraticSpan<Rational>, GaudinError> {
    let (n, mut elems) = match params {
        SpanParams::Homogeneous => (z.len(), homogeneous(env, z)?.elements),
        SpanParams::Trig(theta) => {
            let w: Vec<Rational> = z[1..].iter().map(|x| x - &z[0]).collect();
            (w.len(), trigonometric(env, &w, theta)?.elements)
        }
        SpanParams::Inhomogeneous(chi) => (z.len(), inhomogeneous(env, z, chi)?.elements),
    };
    elems.extend(casimirs(env, n));
    Ok(QuadraticSpan::from_elements(n, &elems))
}

/// `γ(Q(C)) ⊕ span(ω)` through the chart of a compatible forest.
pub fn boundary_span(env: &Envelope, point: &ModuliPoint, params: &SpanParams) -> Result<QuadraticSpan<Rational>, GaudinError> {
    let forest = point.compatible_forest()?;
    let vals = point.chart_membership(&forest)?.ok_or_else(|| GaudinError::ChartNotFound(forest.to_string()))?;
    let labels = point.labels().to_vec();
    let (h, variant, n) = match params {
        SpanParams::Homogeneous => (HolonomyAlgebra::s(&labels), GammaVariant::Plain, labels.len()),
        SpanParams::Trig(theta) => (HolonomyAlgebra::s(&labels), GammaVariant::Theta(theta.clone()), labels.len() - 1),
        SpanParams::Inhomogeneous(chi) => (HolonomyAlgebra::r(labels.len()), GammaVariant::ChiHbar(chi.clone()), labels.len()),
    };
    let q = h.q_of_curve(&forest, &vals)?;
    let imgs = h.gamma_images(env, &variant)?;
    let mut elems: Vec<UEElement<Rational>> = q.rows().iter().map(|r| gamma_apply(&imgs, r, n)).collect();
    elems.extend(casimirs(env, n));
    Ok(QuadraticSpan::from_elements(n, &elems))
}

/// `ι₀` image of the homogeneous span at `(z₀, z₁, …, zₙ)`, and the homogeneous span at `(z_i − z₀)⁻¹`.
pub fn iota0_span(env: &Envelope, z: &[Rational]) -> Result<(QuadraticSpan<Rational>, QuadraticSpan<Rational>), GaudinError> {
    let full = interior_span(env, z, &SpanParams::Homogeneous)?;
    let n = z.len() - 1;
    let imgs: Vec<UEElement<Rational>> = full.elements().iter().map(|x| env.iota0_reduce(x)).collect();
    let w: Vec<Rational> = z[1..].iter().map(|x| Rational::one() / (x - &z[0])).collect();
    Ok((QuadraticSpan::from_elements(n, &imgs), interior_span(env, &w, &SpanParams::Homogeneous)?))
}

/// Where the trigonometric points sit along the degeneration family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegenerationPoints {
    /// `1 − εz_i`
    Literal,
    /// `(1 − εz_i)⁻¹`
    Inverse,
    /// `1 + εz_i`
    Plus,
}

/// `span{H^trig_{i,ε⁻¹χ}(w(ε)), ω^{(i)}}` over ℚ(ε).
pub fn degeneration_family(env: &Envelope, z: &[Rational], chi: &[Rational], pts: DegenerationPoints) -> Result<QuadraticSpan<RatFunc>, GaudinError> {
    let e = RatFunc::var();
    let one = RatFunc::from_rational(Rational::one());
    let w: Vec<RatFunc> = z
        .iter()
        .map(|zi| {
            let ez = e.clone() * RatFunc::from_rational(zi.clone());
            match pts {
                DegenerationPoints::Literal => one.clone() - ez,
                DegenerationPoints::Inverse => one.clone() / (one.clone() - ez),
                DegenerationPoints::Plus => one.clone() + ez,
            }
        })
        .collect();
    let theta: Vec<RatFunc> = chi.iter().map(|c| RatFunc::from_rational(c.clone()) / e.clone()).collect();
    let mut elems = trigonometric(env, &w, &theta)?.elements;
    elems.extend(casimirs(env, z.len()));
    Ok(QuadraticSpan::from_elements(z.len(), &elems))
}

/// `span{γ^ε_χ(h_i^ε(z)), ω^{(i)}}` over ℚ(ε).
pub fn rtilde_family(env: &Envelope, z: &[Rational], chi: &[Rational]) -> Result<QuadraticSpan<RatFunc>, GaudinError> {
    let n = z.len();
    let h = HolonomyAlgebra::rtilde(n, RatFunc::var());
    let gens = h.point_generators(z)?;
    let chi_r: Vec<RatFunc> = chi.iter().map(|c| RatFunc::from_rational(c.clone())).collect();
    let imgs = h.gamma_images(env, &GammaVariant::ChiHbar(chi_r))?;
    let mut elems: Vec<UEElement<RatFunc>> = gens.iter().map(|g| gamma_apply(&imgs, g, n)).collect();
    elems.extend(casimirs(env, n));
    Ok(QuadraticSpan::from_elements(n, &elems))
}

/// Interior spans along a family `z(t)` over ℚ(t) (trig: `z[0]` is the point 0).
pub fn family_span(env: &Envelope, z: &[RatFunc], params: &SpanParams) -> Result<QuadraticSpan<RatFunc>, GaudinError> {
    let lift = |v: &[Rational]| v.iter().map(|c| RatFunc::from_rational(c.clone())).collect::<Vec<_>>();
    let (n, mut elems) = match params {
        SpanParams::Homogeneous => (z.len(), homogeneous(env, z)?.elements),
        SpanParams::Trig(theta) => {
            let w: Vec<RatFunc> = z[1..].iter().map(|x| x.clone() - &z[0]).collect();
            (w.len(), trigonometric(env, &w, &lift(theta))?.elements)
        }
        SpanParams::Inhomogeneous(chi) => (z.len(), inhomogeneous(env, z, &lift(chi))?.elements),
    };
    elems.extend(casimirs(env, n));
    Ok(QuadraticSpan::from_elements(n, &elems))
}

/// Action of `H_i(0, z)` on singular vectors of weight `θ + μ` in `M(θ) ⊗ V(λ̲)`, moved to
/// `V(λ̲)_μ` through `π_θ`, next to the matrix of `H^trig_{i,θ}(z)` there. One pair per `i`.
pub fn verma_matching(
    env: &Envelope,
    lambdas: &[Vec<Rational>],
    z: &[Rational],
    theta: &[Rational],
    mu: &[Rational],
) -> Result<Vec<(Mat<Rational>, Mat<Rational>)>, GaudinError> {
    let lie = env.lie();
    check_rank(env, theta.len())?;
    if lambdas.len() != z.len() {
        return Err(GaudinError::WrongLength {
            got: z.len(),
            want: lambdas.len(),
        });
    }
    let depth = default_depth(lie, lambdas);
    if !is_generic_theta(lie, theta, depth) {
        return Err(GaudinError::NonGenericTheta(depth));
    }
    let verma = std::sync::Arc::new(TruncatedVerma::build(env, theta, depth)?);
    let mut factors = vec![Factor::Verma(verma)];
    for l in lambdas {
        factors.push(Factor::Irrep(std::sync::Arc::new(build_irrep(lie, l)?)));
    }
    let full = TensorRep::new(factors);
    let tail = full.tail();
    let sing = full.singular_vectors(env, mu)?;
    let rows = tail.weight_space(mu);
    if sing.len() != rows.len() {
        return Err(GaudinError::SingularDimension(sing.len(), rows.len()));
    }
    // P: columns π_θ(s) restricted to V(λ̲)_μ
    let p_cols: Vec<Vec<Rational>> = sing
        .iter()
        .map(|s| {
            Ok(full
                .pi_theta(s)?
                .iter()
                .enumerate()
                .filter(|(i, _)| rows.contains(i))
                .map(|(_, x)| x.clone())
                .collect())
        })
        .collect::<Result<_, GaudinError>>()?;
    let p = transpose(&p_cols, rows.len());
    let p_inv = mat_inv(&p).ok_or(GaudinError::SingularDimension(sing.len(), rows.len()))?;
    let mut w = vec![Rational::zero()];
    w.extend(z.iter().cloned());
    let hom = homogeneous(env, &w)?;
    let trig = trigonometric(env, z, theta)?;
    let mut out = Vec::new();
    for i in 0..z.len() {
        let m = full.matrix_of(&hom.elements[i + 1])?;
        // A: H_i s_b = Σ_a A_ab s_a
        let a_cols: Vec<Vec<Rational>> = sing
            .iter()
            .map(|s| express_in(&sing, &mat_vec(&m, s)).ok_or(GaudinError::SingularDimension(sing.len(), rows.len())))
            .collect::<Result<_, _>>()?;
        let a = transpose(&a_cols, sing.len());
        let moved = mat_mul(&mat_mul(&p, &a), &p_inv);
        out.push((moved, tail.matrix_block(&trig.elements[i], &rows, &rows)?));
    }
    Ok(out)
}
