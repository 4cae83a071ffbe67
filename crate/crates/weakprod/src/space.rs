//! Diagonal complete Nevanlinna-Pick spaces.
//!
//! A diagonal space is determined by the number of variables `d` and the
//! Taylor coefficients `a_n > 0` of its kernel `k(z,w) = sum_n a_n <z,w>^n`.
//! Monomials are orthogonal with `||z^alpha||^2 = alpha! / (a_{|alpha|} |alpha|!)`,
//! which makes every operator in this crate a finite matrix on graded
//! truncations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::C64;

/// Kernel family of a diagonal space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Family {
    /// `d = 1`, `a_n = 1`.
    Hardy,
    /// `a_n = 1`, any finite `d >= 1`.
    DruryArveson,
    /// `d = 1`, `a_n = 1/(n+1)`.
    Dirichlet,
    /// User supplied coefficient list.
    Custom,
}

/// A diagonal kernel space: variable count plus kernel Taylor coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceSpec {
    family: Family,
    d: usize,
    /// Explicit coefficients; only populated for [`Family::Custom`].
    coeffs: Vec<f64>,
}

impl SpaceSpec {
    pub fn hardy() -> Self {
        SpaceSpec {
            family: Family::Hardy,
            d: 1,
            coeffs: Vec::new(),
        }
    }

    pub fn drury_arveson(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidSpace(
                "Drury-Arveson space needs d >= 1".into(),
            ));
        }
        Ok(SpaceSpec {
            family: Family::DruryArveson,
            d,
            coeffs: Vec::new(),
        })
    }

    pub fn dirichlet() -> Self {
        SpaceSpec {
            family: Family::Dirichlet,
            d: 1,
            coeffs: Vec::new(),
        }
    }

    /// A custom diagonal kernel from an explicit coefficient list.
    ///
    /// Requires `a_0 = 1` and `a_n >= 0`. Coefficients that are zero make the
    /// corresponding monomial norms undefined; operations that need them
    /// report a configuration error. The coefficient test accepts zeros so
    /// that truncated kernels can be probed.
    pub fn custom(d: usize, coeffs: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidSpace("need d >= 1".into()));
        }
        match coeffs.first() {
            Some(&a0) if a0 == 1.0 => {}
            _ => {
                return Err(Error::InvalidSpace(
                    "custom kernel must be normalized with a_0 = 1".into(),
                ))
            }
        }
        if coeffs.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidSpace(
                "custom kernel coefficients must be finite and non-negative".into(),
            ));
        }
        Ok(SpaceSpec {
            family: Family::Custom,
            d,
            coeffs,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn custom_coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Kernel Taylor coefficient `a_n`.
    pub fn coeff(&self, n: usize) -> Result<f64> {
        match self.family {
            Family::Hardy | Family::DruryArveson => Ok(1.0),
            Family::Dirichlet => Ok(1.0 / (n as f64 + 1.0)),
            Family::Custom => self
                .coeffs
                .get(n)
                .copied()
                .ok_or(Error::CoefficientUnavailable { n }),
        }
    }

    /// Like [`coeff`](Self::coeff), treating coefficients past a custom list as zero.
    pub fn coeff_or_zero(&self, n: usize) -> f64 {
        match self.family {
            Family::Custom => self.coeffs.get(n).copied().unwrap_or(0.0),
            _ => self.coeff(n).expect("builtin coefficients are total"),
        }
    }

    /// Short label used by the CLI and in reports, e.g. `da2`.
    pub fn label(&self) -> String {
        match self.family {
            Family::Hardy => "hardy".into(),
            Family::DruryArveson => format!("da{}", self.d),
            Family::Dirichlet => "dirichlet".into(),
            Family::Custom => format!("custom{}", self.d),
        }
    }
}

/// Exponent tuple of a monomial `z^alpha` in `d` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exps: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        let degree = exps.iter().sum();
        MultiIndex { exps, degree }
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex {
            exps: vec![0; d],
            degree: 0,
        }
    }

    /// The `i`-th coordinate monomial `z_i`.
    pub fn unit(d: usize, i: usize) -> Self {
        let mut exps = vec![0; d];
        exps[i] = 1;
        MultiIndex { exps, degree: 1 }
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    /// Componentwise sum. Both indices must live in the same dimension.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a + b)
            .collect();
        MultiIndex::new(exps)
    }

    /// Componentwise difference, `None` if any component would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if self.dim() != other.dim() {
            return None;
        }
        let mut exps = Vec::with_capacity(self.dim());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex::new(exps))
    }

    /// The multinomial count `|alpha|! / alpha!`, exact in `f64` at desk scale.
    pub fn multinomial(&self) -> f64 {
        let mut result = 1.0f64;
        let mut total: u32 = 0;
        for &e in &self.exps {
            for j in 1..=e {
                total += 1;
                result = result * total as f64 / j as f64;
            }
        }
        result.round()
    }

    /// Value of `z^alpha` at a point.
    pub fn eval(&self, z: &[C64]) -> C64 {
        self.exps
            .iter()
            .zip(z)
            .map(|(&e, &zi)| zi.powu(e))
            .product()
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded lexicographic order: degree major, then lexicographic with the
/// first variable weighted heaviest (so `(1,0)` precedes `(0,1)`).
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

/// All multi-indices with `|alpha| <= max_degree` in graded lexicographic order.
pub fn enumerate_multi_indices(d: usize, max_degree: u32) -> Vec<MultiIndex> {
    assert!(d >= 1, "need at least one variable");
    let mut out = Vec::new();
    let mut current = vec![0u32; d];
    for deg in 0..=max_degree {
        push_degree(d, 0, deg, &mut current, &mut out);
    }
    out
}

fn push_degree(d: usize, pos: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if pos + 1 == d {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        push_degree(d, pos + 1, remaining - e, current, out);
    }
}

/// `||z^alpha||^2 = alpha! / (a_{|alpha|} |alpha|!)` in the given space.
pub fn monomial_norm_sq(space: &SpaceSpec, alpha: &MultiIndex) -> Result<f64> {
    if alpha.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: alpha.dim(),
        });
    }
    let a = space.coeff(alpha.degree() as usize)?;
    if a <= 0.0 {
        return Err(Error::InvalidSpace(format!(
            "kernel coefficient a_{} = 0 leaves monomial norms undefined",
            alpha.degree()
        )));
    }
    Ok(1.0 / (a * alpha.multinomial()))
}

/// A polynomial in `d` variables with complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    d: usize,
    terms: BTreeMap<MultiIndex, C64>,
}

impl Poly {
    pub fn zero(d: usize) -> Self {
        Poly {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(d: usize, c: C64) -> Self {
        let mut p = Poly::zero(d);
        p.add_term(MultiIndex::zero(d), c);
        p
    }

    pub fn one(d: usize) -> Self {
        Poly::constant(d, C64::new(1.0, 0.0))
    }

    pub fn monomial(d: usize, exps: &[u32], c: C64) -> Self {
        assert_eq!(exps.len(), d, "exponent tuple length must equal d");
        let mut p = Poly::zero(d);
        p.add_term(MultiIndex::new(exps.to_vec()), c);
        p
    }

    /// The coordinate function `z_i` (zero based).
    pub fn variable(d: usize, i: usize) -> Self {
        let mut p = Poly::zero(d);
        p.add_term(MultiIndex::unit(d, i), C64::new(1.0, 0.0));
        p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.last_key_value().map(|(k, _)| k.degree())
    }

    pub fn degree_or_zero(&self) -> u32 {
        self.degree().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> C64 {
        self.terms.get(alpha).copied().unwrap_or_default()
    }

    /// Adds `c` to the coefficient of `z^alpha`, pruning exact zeros.
    pub fn add_term(&mut self, alpha: MultiIndex, c: C64) {
        assert_eq!(alpha.dim(), self.d, "multi-index dimension must equal d");
        let v = self.terms.get(&alpha).copied().unwrap_or_default() + c;
        if v.re == 0.0 && v.im == 0.0 {
            self.terms.remove(&alpha);
        } else {
            self.terms.insert(alpha, v);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.d, other.d);
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), *v);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        assert_eq!(self.d, other.d);
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), -*v);
        }
        out
    }

    pub fn scale(&self, c: C64) -> Poly {
        if c.re == 0.0 && c.im == 0.0 {
            return Poly::zero(self.d);
        }
        let mut out = Poly::zero(self.d);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.d, other.d);
        let mut out = Poly::zero(self.d);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.add(b), ca * cb);
            }
        }
        out
    }

    /// Entrywise complex conjugate of the coefficients.
    pub fn conj(&self) -> Poly {
        let mut out = Poly::zero(self.d);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.conj());
        }
        out
    }

    /// Drops all terms of degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Poly {
        let mut out = Poly::zero(self.d);
        for (k, v) in &self.terms {
            if k.degree() <= max_degree {
                out.add_term(k.clone(), *v);
            }
        }
        out
    }

    /// Euclidean norm of the coefficient vector (no kernel weights).
    pub fn coeff_norm(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Point evaluation `sum_alpha c_alpha z^alpha`.
    pub fn evaluate(&self, z: &[C64]) -> Result<C64> {
        if z.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: z.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(alpha, c)| c * alpha.eval(z))
            .sum())
    }
}

/// Kernel-weighted inner product `<f, g> = sum_alpha f_alpha conj(g_alpha) ||z^alpha||^2`.
///
/// Conjugate linear in `g`.
pub fn inner_product(space: &SpaceSpec, f: &Poly, g: &Poly) -> Result<C64> {
    if f.dim() != space.dim() || g.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: if f.dim() != space.dim() { f.dim() } else { g.dim() },
        });
    }
    let mut acc = C64::default();
    for (alpha, fa) in f.terms() {
        let ga = g.coeff(alpha);
        if ga.re != 0.0 || ga.im != 0.0 {
            acc += fa * ga.conj() * monomial_norm_sq(space, alpha)?;
        }
    }
    Ok(acc)
}

pub fn space_norm_sq(space: &SpaceSpec, f: &Poly) -> Result<f64> {
    Ok(inner_product(space, f, f)?.re)
}

pub fn space_norm(space: &SpaceSpec, f: &Poly) -> Result<f64> {
    Ok(space_norm_sq(space, f)?.max(0.0).sqrt())
}

/// Degree-`max_degree` truncation of the kernel function `k_w`.
///
/// The coefficient of `z^alpha` is `a_{|alpha|} (|alpha|!/alpha!) conj(w)^alpha`.
pub fn kernel_polynomial(space: &SpaceSpec, w: &[C64], max_degree: u32) -> Result<Poly> {
    if w.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: w.len(),
        });
    }
    let wbar: Vec<C64> = w.iter().map(|z| z.conj()).collect();
    let mut p = Poly::zero(space.dim());
    for alpha in enumerate_multi_indices(space.dim(), max_degree) {
        let a = space.coeff(alpha.degree() as usize)?;
        let c = alpha.eval(&wbar) * a * alpha.multinomial();
        if c.re != 0.0 || c.im != 0.0 {
            p.add_term(alpha, c);
        }
    }
    Ok(p)
}

/// Result of the complete Nevanlinna-Pick coefficient test.
#[derive(Clone, Debug)]
pub struct CnpCheck {
    /// Taylor coefficients `b_1..b_N` of `1 - 1/k(s)`.
    pub coeffs: Vec<f64>,
    pub pass: bool,
}

/// Expands `1 - 1/k(s)` to degree `n` by formal series inversion and checks
/// that every coefficient is `>= -1e-12`.
///
/// For a diagonal kernel this is exactly the complete Nevanlinna-Pick
/// condition. Coefficients past a custom list are treated as zero.
pub fn cnp_coefficient_check(space: &SpaceSpec, n: usize) -> Result<CnpCheck> {
    if n < 1 {
        return Err(Error::InvalidArgument("CNP check needs N >= 1".into()));
    }
    // c = 1/k with c_0 = 1, then b_m = -c_m for m >= 1.
    let mut c = vec![0.0f64; n + 1];
    c[0] = 1.0;
    for m in 1..=n {
        let mut s = 0.0;
        for j in 1..=m {
            s += space.coeff_or_zero(j) * c[m - j];
        }
        c[m] = -s;
    }
    let coeffs: Vec<f64> = c[1..].iter().map(|x| -x).collect();
    let pass = coeffs.iter().all(|&b| b >= -1e-12);
    Ok(CnpCheck { coeffs, pass })
}

/// Ordered monomial basis of all degrees `<= max_degree` with cached norms.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    d: usize,
    max_degree: u32,
    indices: Vec<MultiIndex>,
    norm_sq: Vec<f64>,
    pos: HashMap<MultiIndex, usize>,
}

impl GradedBasis {
    pub fn new(space: &SpaceSpec, max_degree: u32) -> Result<Self> {
        let indices = enumerate_multi_indices(space.dim(), max_degree);
        let mut norm_sq = Vec::with_capacity(indices.len());
        for alpha in &indices {
            norm_sq.push(monomial_norm_sq(space, alpha)?);
        }
        let pos = indices
            .iter()
            .enumerate()
            .map(|(i, alpha)| (alpha.clone(), i))
            .collect();
        Ok(GradedBasis {
            d: space.dim(),
            max_degree,
            indices,
            norm_sq,
            pos,
        })
    }

    pub fn dim_vars(&self) -> usize {
        self.d
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.pos.get(alpha).copied()
    }

    pub fn norm_sq(&self, i: usize) -> f64 {
        self.norm_sq[i]
    }

    pub fn norm(&self, i: usize) -> f64 {
        self.norm_sq[i].sqrt()
    }
}
