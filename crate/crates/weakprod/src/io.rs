//! JSON interchange formats shared by the CLI and the test suite.
//!
//! Polynomials travel as arrays of terms `{"e":[..],"re":..,"im":..}`, spaces
//! as `{"family":..,"d":..,"coeffs":[..]}` (coefficients only for custom
//! kernels), and operator matrices as a flat row-major list of `[re, im]`
//! pairs plus shape metadata.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::OpMatrix;
use crate::space::{Family, MultiIndex, Poly, SpaceSpec};
use crate::C64;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyTerm {
    pub e: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

/// Terms in graded lexicographic order, zero coefficients omitted.
pub fn poly_to_terms(p: &Poly) -> Vec<PolyTerm> {
    p.terms()
        .map(|(alpha, c)| PolyTerm {
            e: alpha.exps().to_vec(),
            re: c.re,
            im: c.im,
        })
        .collect()
}

pub fn poly_from_terms(d: usize, terms: &[PolyTerm]) -> Result<Poly> {
    let mut p = Poly::zero(d);
    for t in terms {
        if t.e.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: t.e.len(),
            });
        }
        p.add_term(MultiIndex::new(t.e.clone()), C64::new(t.re, t.im));
    }
    Ok(p)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceJson {
    pub family: String,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coeffs: Vec<f64>,
}

pub fn space_to_json(space: &SpaceSpec) -> SpaceJson {
    SpaceJson {
        family: match space.family() {
            Family::Hardy => "hardy",
            Family::DruryArveson => "da",
            Family::Dirichlet => "dirichlet",
            Family::Custom => "custom",
        }
        .to_string(),
        d: space.dim(),
        coeffs: space.custom_coeffs().to_vec(),
    }
}

pub fn space_from_json(json: &SpaceJson) -> Result<SpaceSpec> {
    match json.family.as_str() {
        "hardy" => {
            if json.d != 1 {
                return Err(Error::InvalidSpace("hardy space has d = 1".into()));
            }
            Ok(SpaceSpec::hardy())
        }
        "da" => SpaceSpec::drury_arveson(json.d),
        "dirichlet" => {
            if json.d != 1 {
                return Err(Error::InvalidSpace("dirichlet space has d = 1".into()));
            }
            Ok(SpaceSpec::dirichlet())
        }
        "custom" => SpaceSpec::custom(json.d, json.coeffs.clone()),
        other => Err(Error::InvalidSpace(format!("unknown family '{other}'"))),
    }
}

/// Reads a space from a JSON file, for `--space custom:<file>`.
pub fn space_from_file(path: &Path) -> Result<SpaceSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let json: SpaceJson = serde_json::from_str(&text)?;
    space_from_json(&json)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OpMatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub domain_degree: u32,
    pub codomain_degree: u32,
    pub conj_codomain: bool,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<[f64; 2]>,
}

pub fn op_matrix_to_json(m: &OpMatrix) -> OpMatrixJson {
    let mut entries = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m.entries[(i, j)];
            entries.push([v.re, v.im]);
        }
    }
    OpMatrixJson {
        rows: m.rows(),
        cols: m.cols(),
        domain_degree: m.domain_degree,
        codomain_degree: m.codomain_degree,
        conj_codomain: m.conj_codomain,
        entries,
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::mult_matrix;

    #[test]
    fn poly_round_trip() {
        let p = Poly::monomial(2, &[1, 2], C64::new(0.5, -1.5))
            .add(&Poly::constant(2, C64::new(3.0, 0.0)));
        let terms = poly_to_terms(&p);
        let text = serde_json::to_string(&terms).unwrap();
        let back: Vec<PolyTerm> = serde_json::from_str(&text).unwrap();
        assert_eq!(poly_from_terms(2, &back).unwrap(), p);

        let bad = vec![PolyTerm {
            e: vec![1],
            re: 1.0,
            im: 0.0,
        }];
        assert!(poly_from_terms(2, &bad).is_err());
    }

    #[test]
    fn space_round_trip() {
        for space in [
            SpaceSpec::hardy(),
            SpaceSpec::drury_arveson(3).unwrap(),
            SpaceSpec::dirichlet(),
            SpaceSpec::custom(2, vec![1.0, 0.5, 0.25]).unwrap(),
        ] {
            let json = space_to_json(&space);
            let text = serde_json::to_string(&json).unwrap();
            let back: SpaceJson = serde_json::from_str(&text).unwrap();
            let space2 = space_from_json(&back).unwrap();
            assert_eq!(space2.family(), space.family());
            assert_eq!(space2.dim(), space.dim());
            assert_eq!(space2.custom_coeffs(), space.custom_coeffs());
        }
        assert!(space_from_json(&SpaceJson {
            family: "bergman".into(),
            d: 1,
            coeffs: vec![],
        })
        .is_err());
    }

    #[test]
    fn op_matrix_export_shape() {
        let hardy = SpaceSpec::hardy();
        let m = mult_matrix(&hardy, &Poly::variable(1, 0), 2).unwrap();
        let json = op_matrix_to_json(&m);
        assert_eq!(json.rows, m.rows());
        assert_eq!(json.cols, 3);
        assert_eq!(json.entries.len(), json.rows * json.cols);
        assert_eq!(json.domain_degree, 2);
        // shift matrix: subdiagonal ones
        assert_eq!(json.entries[1 * json.cols], [1.0, 0.0]);
    }
}
