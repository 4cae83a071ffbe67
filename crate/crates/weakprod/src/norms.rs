//! Quantitative column/row norm constructions on the two-variable
//! Drury-Arveson space.
//!
//! The binomial family `psi_k = C(n,k)^{1/2} z_1^k z_2^{n-k}` has truncated
//! column norm exactly `sqrt(n+1)` at every truncation (attained on the
//! constant function and globally bounded by the same value) and row norm at
//! most 1. Pairing its row with the coordinate row `[1, 0, ..., 0]` produces
//! a matrix of multipliers whose block multiplier norm is `sqrt(n+1)` while a
//! factorization certificate bounds its weak-product multiplier norm by 1 —
//! the transpose gap.

use crate::error::{Error, Result};
use crate::operators::{
    mult_matrix, operator_norm, tuple_mult_matrix, NormEstimate, OpMatrix, TupleShape,
};
use crate::space::{Family, GradedBasis, Poly, SpaceSpec};
use crate::weak_product::{certify_matrix_factorization, MatrixFactorizationCertificate};
use crate::C64;

/// Row/column norms of a multiplier tuple at one truncation.
#[derive(Clone, Debug)]
pub struct GapReport {
    /// Family parameter; for a generic tuple this is `len - 1`.
    pub n: usize,
    pub truncation: u32,
    pub row_norm: NormEstimate,
    pub col_norm: NormEstimate,
    /// `col / row` when the row norm is positive, else 0.
    pub ratio: f64,
    pub expected_ratio: f64,
}

/// Rectangular matrix of polynomials over a shared variable count.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    d: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    /// Row-major construction.
    pub fn new(rows: usize, cols: usize, entries: Vec<Poly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch("matrix must be non-empty".into()));
        }
        let d = entries[0].dim();
        if entries.iter().any(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: entries.iter().find(|p| p.dim() != d).unwrap().dim(),
            });
        }
        Ok(PolyMatrix {
            rows,
            cols,
            d,
            entries,
        })
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        PolyMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn max_degree(&self) -> u32 {
        self.entries
            .iter()
            .map(|p| p.degree_or_zero())
            .max()
            .unwrap_or(0)
    }
}

/// Binomial coefficient as an exact small float.
pub fn binomial(n: u32, k: u32) -> f64 {
    let mut r = 1.0f64;
    for i in 0..k.min(n - k) {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r.round()
}

/// The family `psi_k = C(n,k)^{1/2} z_1^k z_2^{n-k}` for `k = 0..=n`, each of
/// unit norm in the two-variable Drury-Arveson space.
pub fn binomial_family(n: u32) -> Vec<Poly> {
    (0..=n)
        .map(|k| {
            Poly::monomial(
                2,
                &[k, n - k],
                C64::new(binomial(n, k).sqrt(), 0.0),
            )
        })
        .collect()
}

/// Truncated row and column norms of a multiplier tuple.
pub fn column_row_gap(space: &SpaceSpec, phis: &[Poly], n: u32) -> Result<GapReport> {
    if phis.is_empty() {
        return Err(Error::InvalidArgument("need a non-empty tuple".into()));
    }
    let tol = 1e-12;
    let max_iter = 200_000;
    let row = operator_norm(
        &tuple_mult_matrix(space, phis, TupleShape::Row, n)?,
        tol,
        max_iter,
    )?;
    let col = operator_norm(
        &tuple_mult_matrix(space, phis, TupleShape::Column, n)?,
        tol,
        max_iter,
    )?;
    let ratio = if row.value > 0.0 {
        col.value / row.value
    } else {
        0.0
    };
    let expected_ratio = (phis.len() as f64).sqrt();
    Ok(GapReport {
        n: phis.len() - 1,
        truncation: n,
        ratio,
        expected_ratio,
        row_norm: row,
        col_norm: col,
    })
}

/// `(Psi^T Phi)_{ij} = sum_k phi_{kj} psi_{ki}` with exact coefficient
/// arithmetic. Both inputs must have the same number of rows (the summed
/// index).
pub fn psi_t_phi(psi: &PolyMatrix, phi: &PolyMatrix) -> Result<PolyMatrix> {
    if psi.rows() != phi.rows() {
        return Err(Error::ShapeMismatch(format!(
            "row counts differ: {} vs {}",
            psi.rows(),
            phi.rows()
        )));
    }
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            found: phi.dim(),
        });
    }
    let d = psi.dim();
    let mut entries = Vec::with_capacity(psi.cols() * phi.cols());
    for i in 0..psi.cols() {
        for j in 0..phi.cols() {
            let mut acc = Poly::zero(d);
            for k in 0..psi.rows() {
                acc = acc.add(&phi.get(k, j).mul(psi.get(k, i)));
            }
            entries.push(acc);
        }
    }
    PolyMatrix::new(psi.cols(), phi.cols(), entries)
}

/// Block operator matrix of a matrix of multipliers on the degree-`n`
/// truncation, with the shared codomain sized to capture every image.
pub fn block_mult_matrix(space: &SpaceSpec, theta: &PolyMatrix, n: u32) -> Result<OpMatrix> {
    if theta.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: theta.dim(),
        });
    }
    let cod_degree = n + theta.max_degree();
    let dom = GradedBasis::new(space, n)?;
    let cod = GradedBasis::new(space, cod_degree)?;
    let mut big = nalgebra::DMatrix::<C64>::zeros(cod.len() * theta.rows(), dom.len() * theta.cols());
    for i in 0..theta.rows() {
        for j in 0..theta.cols() {
            let p = theta.get(i, j);
            if p.is_zero() {
                continue;
            }
            // reuse the scalar builder by rebuilding at the shared codomain degree
            let block = mult_matrix(space, p, n)?;
            // embed the block (its codomain degree may be smaller than cod_degree)
            let small_cod = GradedBasis::new(space, block.codomain_degree)?;
            for bj in 0..dom.len() {
                for bi in 0..small_cod.len() {
                    let v = block.entries[(bi, bj)];
                    if v.re != 0.0 || v.im != 0.0 {
                        let target = cod.position(small_cod.index(bi)).expect("nested basis");
                        big[(i * cod.len() + target, j * dom.len() + bj)] = v;
                    }
                }
            }
        }
    }
    Ok(OpMatrix {
        entries: big,
        dim_vars: space.dim(),
        domain_degree: n,
        codomain_degree: cod_degree,
        row_blocks: theta.rows(),
        col_blocks: theta.cols(),
        conj_codomain: false,
        captures_symbol: false,
    })
}

/// Result of the transpose-gap experiment.
#[derive(Clone, Debug)]
pub struct TransposeGapReport {
    pub gap: GapReport,
    /// Block multiplier norm of `Theta = Psi^T Phi` at truncation; `sqrt(n+1)`
    /// for the binomial family.
    pub theta_block_norm: NormEstimate,
    pub theta: PolyMatrix,
    /// Certificate that `(Psi, Phi)` witnesses weak-product multiplier norm
    /// at most 1 for `Theta`.
    pub certificate: MatrixFactorizationCertificate,
}

/// Builds `Psi` from the binomial family, `Phi = [1, 0, ..., 0]`, forms
/// `Theta = Psi^T Phi` and compares its truncated block multiplier norm
/// (`sqrt(n+1)`) with the factorization certificate bounding its weak-product
/// multiplier norm by 1.
pub fn transpose_gap_experiment(space: &SpaceSpec, n: u32, trunc: u32) -> Result<TransposeGapReport> {
    if space.family() != Family::DruryArveson || space.dim() < 2 {
        return Err(Error::InvalidSpace(
            "the transpose-gap construction needs the Drury-Arveson space with d >= 2".into(),
        ));
    }
    let family = binomial_family(n);
    let gap = column_row_gap(space, &family, trunc)?;

    let width = family.len();
    let psi = PolyMatrix::new(1, width, family.clone())?;
    let mut phi_entries = vec![Poly::zero(2); width];
    phi_entries[0] = Poly::one(2);
    let phi = PolyMatrix::new(1, width, phi_entries)?;
    let theta = psi_t_phi(&psi, &phi)?;

    let theta_block_norm = operator_norm(&block_mult_matrix(space, &theta, trunc)?, 1e-12, 200_000)?;
    let certificate = certify_matrix_factorization(space, &theta, &phi, &psi, trunc, 1e-9)?;
    Ok(TransposeGapReport {
        gap,
        theta_block_norm,
        theta,
        certificate,
    })
}
