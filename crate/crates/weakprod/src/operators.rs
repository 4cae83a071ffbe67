//! Matrix representations of multiplication and Hankel operators on graded
//! truncations, and a deterministic power iteration for dominant singular
//! values.
//!
//! Matrices are expressed with respect to the orthonormalized monomial basis
//! `z^alpha / ||z^alpha||` in graded lexicographic order. A multiplication
//! operator from degree `N` is captured together with its full image (degree
//! `N + deg phi`), so its largest singular value is an exact lower bound of
//! the multiplier norm, non-decreasing in `N`. A Hankel matrix with
//! `N_dom + N_cod >= deg b` contains every nonzero entry of `H_b`, so its
//! largest singular value is the exact operator norm for polynomial symbols.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::space::{monomial_norm_sq, GradedBasis, Poly, SpaceSpec};
use crate::C64;

/// Whether a computed singular value is the exact norm of the (polynomial
/// symbol) operator or only a truncated lower bound of the full norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum NormKind {
    ExactOnTruncation,
    LowerBoundOfFullNorm,
}

/// Dominant singular value estimate from the power iteration.
#[derive(Clone, Debug, serde::Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub kind: NormKind,
    /// `|sigma_k - sigma_{k-1}|` at the last iteration.
    pub residual: f64,
    pub iterations: usize,
}

/// Column/row arrangement for tuples of multipliers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleShape {
    /// Stacked vertically: one operator `H -> H (x) C^r`.
    Column,
    /// Concatenated horizontally: `H (x) C^r -> H`.
    Row,
}

/// Dense complex matrix labeled by graded monomial bases.
///
/// `conj_codomain` marks operators into the conjugate space; coordinates are
/// stored in the same monomial basis, with the anti-linearity of the symbol
/// map realized by conjugating symbol coefficients in the entry formula.
#[derive(Clone, Debug)]
pub struct OpMatrix {
    pub entries: DMatrix<C64>,
    pub dim_vars: usize,
    pub domain_degree: u32,
    pub codomain_degree: u32,
    /// Number of scalar-basis blocks along rows/columns (1 except for tuples).
    pub row_blocks: usize,
    pub col_blocks: usize,
    pub conj_codomain: bool,
    /// True when every nonzero entry of the full operator is present, making
    /// the dominant singular value exact rather than a lower bound.
    pub captures_symbol: bool,
}

impl OpMatrix {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }
}

fn mult_block(phi: &Poly, dom: &GradedBasis, cod: &GradedBasis) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(cod.len(), dom.len());
    for i in 0..dom.len() {
        let alpha = dom.index(i);
        for (gamma, c) in phi.terms() {
            let beta = alpha.add(gamma);
            if let Some(j) = cod.position(&beta) {
                m[(j, i)] += c * (cod.norm_sq(j) / dom.norm_sq(i)).sqrt();
            }
        }
    }
    m
}

/// Matrix of `f -> phi f` from degree `<= N` into degree `<= N + deg phi`.
///
/// The entry at `(gamma + alpha, alpha)` is `phi_gamma ||z^{gamma+alpha}|| / ||z^alpha||`.
pub fn mult_matrix(space: &SpaceSpec, phi: &Poly, n: u32) -> Result<OpMatrix> {
    if phi.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: phi.dim(),
        });
    }
    let cod_degree = n + phi.degree_or_zero();
    let dom = GradedBasis::new(space, n)?;
    let cod = GradedBasis::new(space, cod_degree)?;
    Ok(OpMatrix {
        entries: mult_block(phi, &dom, &cod),
        dim_vars: space.dim(),
        domain_degree: n,
        codomain_degree: cod_degree,
        row_blocks: 1,
        col_blocks: 1,
        conj_codomain: false,
        captures_symbol: false,
    })
}

/// Stacked (column) or concatenated (row) multiplication operators of a tuple.
pub fn tuple_mult_matrix(
    space: &SpaceSpec,
    phis: &[Poly],
    shape: TupleShape,
    n: u32,
) -> Result<OpMatrix> {
    if phis.is_empty() {
        return Err(Error::InvalidArgument(
            "tuple of multipliers must be non-empty".into(),
        ));
    }
    for phi in phis {
        if phi.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: phi.dim(),
            });
        }
    }
    let max_deg = phis.iter().map(|p| p.degree_or_zero()).max().unwrap();
    let cod_degree = n + max_deg;
    let dom = GradedBasis::new(space, n)?;
    let cod = GradedBasis::new(space, cod_degree)?;
    let blocks: Vec<DMatrix<C64>> = phis.iter().map(|p| mult_block(p, &dom, &cod)).collect();
    let (entries, row_blocks, col_blocks) = match shape {
        TupleShape::Column => {
            let mut m = DMatrix::<C64>::zeros(cod.len() * phis.len(), dom.len());
            for (k, b) in blocks.iter().enumerate() {
                m.view_mut((k * cod.len(), 0), (cod.len(), dom.len()))
                    .copy_from(b);
            }
            (m, phis.len(), 1)
        }
        TupleShape::Row => {
            let mut m = DMatrix::<C64>::zeros(cod.len(), dom.len() * phis.len());
            for (k, b) in blocks.iter().enumerate() {
                m.view_mut((0, k * dom.len()), (cod.len(), dom.len()))
                    .copy_from(b);
            }
            (m, 1, phis.len())
        }
    };
    Ok(OpMatrix {
        entries,
        dim_vars: space.dim(),
        domain_degree: n,
        codomain_degree: cod_degree,
        row_blocks,
        col_blocks,
        conj_codomain: false,
        captures_symbol: false,
    })
}

/// Hankel matrix of the symbol `b` between graded truncations.
///
/// Entry at `(beta, alpha)` is
/// `conj(b_{alpha+beta}) ||z^{alpha+beta}||^2 / (||z^alpha|| ||z^beta||)`.
/// Nonzero entries require `alpha + beta` in the support of `b`, so both
/// `|alpha| <= deg b` and `|beta| <= deg b`; once both truncation degrees
/// reach `deg b` the matrix holds every nonzero entry of the full operator.
pub fn hankel_matrix(space: &SpaceSpec, b: &Poly, n_dom: u32, n_cod: u32) -> Result<OpMatrix> {
    if b.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: b.dim(),
        });
    }
    let dom = GradedBasis::new(space, n_dom)?;
    let cod = GradedBasis::new(space, n_cod)?;
    let mut m = DMatrix::<C64>::zeros(cod.len(), dom.len());
    for i in 0..dom.len() {
        for j in 0..cod.len() {
            let gamma = dom.index(i).add(cod.index(j));
            let c = b.coeff(&gamma);
            if c.re != 0.0 || c.im != 0.0 {
                let ns = monomial_norm_sq(space, &gamma)?;
                m[(j, i)] = c.conj() * ns / (dom.norm(i) * cod.norm(j));
            }
        }
    }
    Ok(OpMatrix {
        entries: m,
        dim_vars: space.dim(),
        domain_degree: n_dom,
        codomain_degree: n_cod,
        row_blocks: 1,
        col_blocks: 1,
        conj_codomain: true,
        captures_symbol: n_dom >= b.degree_or_zero() && n_cod >= b.degree_or_zero(),
    })
}

/// Dominant singular triplet `(sigma, u, v)` of a complex matrix via power
/// iteration on the Gram matrix of the smaller side, with the deterministic
/// normalized all-ones start vector.
pub fn dominant_singular_triplet(
    a: &DMatrix<C64>,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, DVector<C64>, DVector<C64>, f64, usize)> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Ok((
            0.0,
            DVector::zeros(rows),
            DVector::zeros(cols),
            0.0,
            0,
        ));
    }
    if tol <= 0.0 || max_iter < 1 {
        return Err(Error::InvalidArgument(
            "power iteration needs tol > 0 and max_iter >= 1".into(),
        ));
    }
    let on_domain = cols <= rows;
    let n = cols.min(rows);
    let ah = a.adjoint();
    let mut v = DVector::from_element(n, C64::new(1.0, 0.0));
    v /= C64::new(v.norm(), 0.0);
    let mut sigma_prev = f64::NAN;
    let mut sigma = 0.0;
    let mut residual = f64::INFINITY;
    let mut diff_prev = f64::INFINITY;
    let mut converged_at = None;
    for it in 1..=max_iter {
        let w = if on_domain { &ah * (a * &v) } else { a * (&ah * &v) };
        let rayleigh = v.dotc(&w).re.max(0.0);
        sigma = rayleigh.sqrt();
        let wn = w.norm();
        if wn == 0.0 {
            // v is in the kernel of the Gram matrix; with the all-ones start
            // this only happens for the zero matrix.
            return Ok((0.0, DVector::zeros(rows), DVector::zeros(cols), 0.0, it));
        }
        v = w / C64::new(wn, 0.0);
        let diff = (sigma - sigma_prev).abs();
        // Rayleigh iterates converge geometrically; with near-degenerate top
        // singular values the per-step difference alone can fall below tol
        // long before the value has converged, so extrapolate the remaining
        // geometric tail diff * rho / (1 - rho) and require it small as well.
        // Differences at the floating point noise floor carry no geometric
        // signal and count as converged.
        let noise = sigma * 1e-14;
        let rho = diff / diff_prev;
        let tail = if diff <= noise {
            0.0
        } else if rho < 1.0 {
            diff * rho / (1.0 - rho)
        } else {
            f64::INFINITY
        };
        residual = diff.max(tail);
        if it >= 3 && residual <= tol.max(noise) {
            converged_at = Some(it);
            break;
        }
        sigma_prev = sigma;
        diff_prev = diff;
    }
    let it = match converged_at {
        Some(it) => it,
        None => {
            return Err(Error::NormNonConvergence {
                max_iter,
                best: NormEstimate {
                    value: sigma,
                    kind: NormKind::LowerBoundOfFullNorm,
                    residual,
                    iterations: max_iter,
                },
            })
        }
    };
    let (u, vd) = if on_domain {
        let mut u = a * &v;
        let un = u.norm();
        if un > 0.0 {
            u /= C64::new(un, 0.0);
        }
        (u, v)
    } else {
        let mut vd = &ah * &v;
        let vn = vd.norm();
        if vn > 0.0 {
            vd /= C64::new(vn, 0.0);
        }
        (v, vd)
    };
    Ok((sigma, u, vd, residual, it))
}

/// Largest singular value of an operator matrix.
///
/// Deterministic across runs; fails explicitly (carrying the best iterate)
/// instead of returning a silently unconverged value.
pub fn operator_norm(m: &OpMatrix, tol: f64, max_iter: usize) -> Result<NormEstimate> {
    let (sigma, _, _, residual, iterations) =
        dominant_singular_triplet(&m.entries, tol, max_iter)?;
    Ok(NormEstimate {
        value: sigma,
        kind: if m.captures_symbol {
            NormKind::ExactOnTruncation
        } else {
            NormKind::LowerBoundOfFullNorm
        },
        residual,
        iterations,
    })
}

/// Spectral norm of `H_b T_psi - T_{conj(psi)}^* H_b` with both sides built
/// independently and sized so that no truncation loss occurs.
pub fn intertwining_residual(space: &SpaceSpec, b: &Poly, psi: &Poly, n: u32) -> Result<f64> {
    let db = b.degree_or_zero();
    let dpsi = psi.degree_or_zero();
    // Left side: multiply first (degree N -> N + deg psi), then Hankel into
    // conjugate degree <= deg b.
    let t_psi = mult_matrix(space, psi, n)?;
    let h_left = hankel_matrix(space, b, n + dpsi, db)?;
    let lhs = &h_left.entries * &t_psi.entries;
    // Right side: Hankel into conjugate degree <= deg b + deg psi, then the
    // adjoint of multiplication by conj(psi) on the conjugate space. In
    // coordinates that adjoint is the plain transpose of the T_psi block.
    let t_psi_cod = mult_matrix(space, psi, db)?;
    let h_right = hankel_matrix(space, b, n, db + dpsi)?;
    let rhs = t_psi_cod.entries.transpose() * &h_right.entries;
    let diff = lhs - rhs;
    let (sigma, _, _, _, _) = dominant_singular_triplet(&diff, 1e-13, 100_000)?;
    Ok(sigma)
}

/// Outcome of the rank-one check for kernel-symbol Hankel operators.
#[derive(Clone, Debug)]
pub struct KernelHankelReport {
    /// Second singular value of the Hankel matrix of the truncated `k_w`;
    /// zero up to rounding because `H_{k_w}` has rank one.
    pub second_singular_value: f64,
    /// Largest deviation of a column from `e_alpha(w)` times the coordinate
    /// vector of the truncated conjugated kernel.
    pub factor_residual: f64,
}

/// Builds the Hankel matrix of the degree-`2N` truncation of `k_w` on
/// domain/codomain degree `N` and verifies the rank-one factorization
/// `H_{k_w} f = f(w) conj(k_w)` at truncation.
pub fn kernel_hankel_rank_check(space: &SpaceSpec, w: &[C64], n: u32) -> Result<KernelHankelReport> {
    let b = crate::space::kernel_polynomial(space, w, 2 * n)?;
    let h = hankel_matrix(space, &b, n, n)?;
    let (sigma1, u, v, _, _) = dominant_singular_triplet(&h.entries, 1e-14, 100_000)?;
    let deflated = &h.entries - (u * v.adjoint()).map(|x| x * C64::new(sigma1, 0.0));
    let (sigma2, _, _, _, _) = dominant_singular_triplet(&deflated, 1e-14, 100_000)?;

    let basis = GradedBasis::new(space, n)?;
    // Closed-form rank-one factor: column alpha is (w^alpha/||z^alpha||) times
    // the vector with entries w^beta/||z^beta||.
    let factor = DVector::from_fn(basis.len(), |j, _| {
        basis.index(j).eval(w) / C64::new(basis.norm(j), 0.0)
    });
    let mut worst: f64 = 0.0;
    for i in 0..basis.len() {
        let scale = basis.index(i).eval(w) / C64::new(basis.norm(i), 0.0);
        let expected = factor.map(|x| x * scale);
        let diff = h.entries.column(i) - expected;
        worst = worst.max(diff.norm());
    }
    Ok(KernelHankelReport {
        second_singular_value: sigma2,
        factor_residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{MultiIndex, Poly};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hardy_shift_matrix() {
        let hardy = SpaceSpec::hardy();
        let z = Poly::variable(1, 0);
        let m = mult_matrix(&hardy, &z, 2).unwrap();
        assert_eq!(m.entries.shape(), (4, 3));
        for i in 0..4 {
            for j in 0..3 {
                let expected = if i == j + 1 { 1.0 } else { 0.0 };
                assert!((m.entries[(i, j)] - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn drury_arveson_shift_entries() {
        let da2 = SpaceSpec::drury_arveson(2).unwrap();
        let z1 = Poly::variable(2, 0);
        let m = mult_matrix(&da2, &z1, 1).unwrap();
        // domain basis: 1, z1, z2; codomain: 1, z1, z2, z1^2, z1z2, z2^2
        assert_eq!(m.entries.shape(), (6, 3));
        assert!((m.entries[(1, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m.entries[(3, 1)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m.entries[(4, 2)] - c(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn constant_multiplier_is_inclusion() {
        let da2 = SpaceSpec::drury_arveson(2).unwrap();
        let m = mult_matrix(&da2, &Poly::one(2), 3).unwrap();
        assert_eq!(m.entries.shape(), (10, 10));
        for i in 0..10 {
            for j in 0..10 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((m.entries[(i, j)] - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn tuple_norms_at_degree_zero() {
        let da2 = SpaceSpec::drury_arveson(2).unwrap();
        let phis = vec![Poly::variable(2, 0), Poly::variable(2, 1)];
        let row = tuple_mult_matrix(&da2, &phis, TupleShape::Row, 0).unwrap();
        let col = tuple_mult_matrix(&da2, &phis, TupleShape::Column, 0).unwrap();
        let rn = operator_norm(&row, 1e-12, 100_000).unwrap();
        let cn = operator_norm(&col, 1e-12, 100_000).unwrap();
        assert!((rn.value - 1.0).abs() < 1e-10);
        assert!((cn.value - 2f64.sqrt()).abs() < 1e-10);

        let hardy = SpaceSpec::hardy();
        let single = tuple_mult_matrix(&hardy, &[Poly::variable(1, 0)], TupleShape::Column, 1)
            .unwrap();
        let plain = mult_matrix(&hardy, &Poly::variable(1, 0), 1).unwrap();
        assert_eq!(single.entries, plain.entries);

        assert!(tuple_mult_matrix(&da2, &[], TupleShape::Row, 0).is_err());
    }

    #[test]
    fn power_iteration_examples() {
        let id = OpMatrix {
            entries: DMatrix::identity(2, 2),
            dim_vars: 1,
            domain_degree: 1,
            codomain_degree: 1,
            row_blocks: 1,
            col_blocks: 1,
            conj_codomain: false,
            captures_symbol: false,
        };
        assert!((operator_norm(&id, 1e-12, 1000).unwrap().value - 1.0).abs() < 1e-12);

        let mut jordan = id.clone();
        jordan.entries = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((operator_norm(&jordan, 1e-12, 1000).unwrap().value - 2.0).abs() < 1e-12);

        let hardy = SpaceSpec::hardy();
        let shift = mult_matrix(&hardy, &Poly::variable(1, 0), 5).unwrap();
        assert!((operator_norm(&shift, 1e-12, 100_000).unwrap().value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hankel_examples() {
        let hardy = SpaceSpec::hardy();
        let z2 = Poly::monomial(1, &[2], c(1.0, 0.0));
        let h = hankel_matrix(&hardy, &z2, 2, 2).unwrap();
        assert!(h.conj_codomain);
        assert!(h.captures_symbol);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i + j == 2 { 1.0 } else { 0.0 };
                assert!((h.entries[(i, j)] - c(expected, 0.0)).norm() < 1e-15);
            }
        }
        assert!((operator_norm(&h, 1e-12, 1000).unwrap().value - 1.0).abs() < 1e-12);

        let da2 = SpaceSpec::drury_arveson(2).unwrap();
        let h1 = hankel_matrix(&da2, &Poly::one(2), 2, 2).unwrap();
        let mut nonzero = 0;
        for v in h1.entries.iter() {
            if v.norm() > 0.0 {
                nonzero += 1;
            }
        }
        assert_eq!(nonzero, 1);
        assert!((h1.entries[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let z = Poly::variable(1, 0);
        let h = hankel_matrix(&hardy, &z, 1, 1).unwrap();
        assert!((h.entries[(0, 1)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((h.entries[(1, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((h.entries[(0, 0)]).norm() < 1e-15);
        assert!((operator_norm(&h, 1e-12, 1000).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hankel_entries_depend_only_on_index_sum_modulo_weights() {
        let da2 = SpaceSpec::drury_arveson(2).unwrap();
        let mut b = Poly::zero(2);
        b.add_term(MultiIndex::new(vec![2, 1]), c(0.7, -0.3));
        b.add_term(MultiIndex::new(vec![0, 2]), c(-0.2, 0.5));
        let dom = GradedBasis::new(&da2, 2).unwrap();
        let cod = GradedBasis::new(&da2, 2).unwrap();
        let h = hankel_matrix(&da2, &b, 2, 2).unwrap();
        for i in 0..dom.len() {
            for j in 0..cod.len() {
                let gamma = dom.index(i).add(cod.index(j));
                // strip the norm-weight factors and compare against the symbol
                let weight = monomial_norm_sq(&da2, &gamma).unwrap_or(0.0)
                    / (dom.norm(i) * cod.norm(j));
                let expected = if weight > 0.0 {
                    b.coeff(&gamma).conj() * weight
                } else {
                    C64::default()
                };
                assert!((h.entries[(j, i)] - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn hankel_norm_is_stable_under_enlarging_truncation() {
        let hardy = SpaceSpec::hardy();
        let mut b = Poly::zero(1);
        b.add_term(MultiIndex::new(vec![0]), c(0.4, 0.0));
        b.add_term(MultiIndex::new(vec![2]), c(1.0, -0.5));
        b.add_term(MultiIndex::new(vec![3]), c(-0.3, 0.2));
        let small = hankel_matrix(&hardy, &b, 2, 1).unwrap();
        assert!(!small.captures_symbol);
        let base = hankel_matrix(&hardy, &b, 3, 3).unwrap();
        assert!(base.captures_symbol);
        let n0 = operator_norm(&base, 1e-12, 100_000).unwrap().value;
        assert!(operator_norm(&small, 1e-12, 100_000).unwrap().value <= n0 + 1e-10);
        for (nd, nc) in [(4, 3), (5, 4), (6, 6)] {
            let h = hankel_matrix(&hardy, &b, nd, nc).unwrap();
            let n1 = operator_norm(&h, 1e-12, 100_000).unwrap().value;
            assert!((n1 - n0).abs() < 1e-10);
        }
    }

    #[test]
    fn intertwining_examples() {
        let hardy = SpaceSpec::hardy();
        let z = Poly::variable(1, 0);
        let z2 = Poly::monomial(1, &[2], c(1.0, 0.0));
        let r = intertwining_residual(&hardy, &z2, &z, 3).unwrap();
        assert!(r <= 1e-12, "residual {r}");

        // psi = 1: both sides equal H_b exactly
        let r = intertwining_residual(&hardy, &z2, &Poly::one(1), 3).unwrap();
        assert!(r == 0.0 || r < 1e-15);

        let da2 = SpaceSpec::drury_arveson(2).unwrap();
        let b = Poly::monomial(2, &[2, 1], c(1.0, 0.0));
        let psi = Poly::variable(2, 1);
        let r = intertwining_residual(&da2, &b, &psi, 3).unwrap();
        assert!(r <= 1e-12, "residual {r}");
    }

    #[test]
    fn kernel_hankel_rank_one() {
        let hardy = SpaceSpec::hardy();
        let rep = kernel_hankel_rank_check(&hardy, &[c(0.0, 0.0)], 3).unwrap();
        assert!(rep.second_singular_value <= 1e-14);
        assert!(rep.factor_residual <= 1e-14);

        let rep = kernel_hankel_rank_check(&hardy, &[c(0.5, 0.0)], 4).unwrap();
        assert!(rep.second_singular_value <= 1e-12);
        assert!(rep.factor_residual <= 1e-12);

        let da2 = SpaceSpec::drury_arveson(2).unwrap();
        let rep = kernel_hankel_rank_check(&da2, &[c(0.3, 0.0), c(0.0, 0.4)], 3).unwrap();
        assert!(rep.second_singular_value <= 1e-12);
        assert!(rep.factor_residual <= 1e-10);
    }

    #[test]
    fn mult_norm_monotone_in_truncation() {
        let da2 = SpaceSpec::drury_arveson(2).unwrap();
        let mut phi = Poly::zero(2);
        phi.add_term(MultiIndex::new(vec![1, 0]), c(1.0, 0.0));
        phi.add_term(MultiIndex::new(vec![0, 2]), c(0.5, 0.5));
        let mut prev = 0.0;
        for n in 0..6 {
            let m = mult_matrix(&da2, &phi, n).unwrap();
            let v = operator_norm(&m, 1e-12, 100_000).unwrap().value;
            assert!(v >= prev - 1e-10, "norm decreased at N={n}");
            prev = v;
        }
    }

    #[test]
    fn row_column_comparison() {
        let da2 = SpaceSpec::drury_arveson(2).unwrap();
        let phis = vec![
            Poly::variable(2, 0),
            Poly::variable(2, 1),
            Poly::monomial(2, &[1, 1], c(0.8, 0.0)),
        ];
        let row = operator_norm(
            &tuple_mult_matrix(&da2, &phis, TupleShape::Row, 3).unwrap(),
            1e-12,
            100_000,
        )
        .unwrap()
        .value;
        let col = operator_norm(
            &tuple_mult_matrix(&da2, &phis, TupleShape::Column, 3).unwrap(),
            1e-12,
            100_000,
        )
        .unwrap()
        .value;
        let singles: Vec<f64> = phis
            .iter()
            .map(|p| {
                operator_norm(&mult_matrix(&da2, p, 3).unwrap(), 1e-12, 100_000)
                    .unwrap()
                    .value
            })
            .collect();
        let max_single = singles.iter().cloned().fold(0.0, f64::max);
        assert!(row <= col * (phis.len() as f64).sqrt() + 1e-9);
        assert!(row >= max_single - 1e-9);
        assert!(col >= max_single - 1e-9);
    }
}
