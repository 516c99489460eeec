//! Catalog of analytic data functions and their compiled polynomial form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest total degree accepted for catalog polynomials.
pub const MAX_DEGREE: usize = 4;

/// A data function as written in problem files:
/// `{"kind": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum FnSpec {
    Constant(ConstantParams),
    Coordinate(CoordinateParams),
    Polynomial(PolynomialParams),
    Scaled(ScaledParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantParams {
    pub value: ConstValue,
}

/// A constant: one number broadcast to every component, or a full vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstValue {
    Scalar(f64),
    Vector(Vec<f64>),
}

/// The coordinate `x_index` placed in output `component` (both 1-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordinateParams {
    pub index: usize,
    #[serde(default = "first_component")]
    pub component: usize,
}

fn first_component() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialParams {
    pub terms: Vec<Term>,
}

/// `coeff · x₁^{p₁} ⋯ x_n^{p_n}` with a vector coefficient of length `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coeff: Vec<f64>,
    pub powers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaledParams {
    pub inner: Box<FnSpec>,
    pub factor: f64,
}

impl FnSpec {
    pub fn constant(value: Vec<f64>) -> Self {
        FnSpec::Constant(ConstantParams { value: ConstValue::Vector(value) })
    }

    pub fn scalar(value: f64) -> Self {
        FnSpec::Constant(ConstantParams { value: ConstValue::Scalar(value) })
    }

    pub fn zero() -> Self {
        Self::scalar(0.0)
    }

    /// `x_index` (1-based) in the first output component.
    pub fn coordinate(index: usize) -> Self {
        FnSpec::Coordinate(CoordinateParams { index, component: 1 })
    }

    pub fn polynomial(terms: Vec<Term>) -> Self {
        FnSpec::Polynomial(PolynomialParams { terms })
    }

    pub fn scaled(inner: FnSpec, factor: f64) -> Self {
        FnSpec::Scaled(ScaledParams { inner: Box::new(inner), factor })
    }

    /// Flatten into a polynomial `ℝⁿ → ℝ^m`, validating the parameters.
    pub fn compile(&self, n: usize, m: usize) -> Result<Poly> {
        let mut poly = Poly { n, m, terms: Vec::new() };
        self.collect(n, m, 1.0, &mut poly)?;
        poly.normalise();
        Ok(poly)
    }

    fn collect(&self, n: usize, m: usize, scale: f64, poly: &mut Poly) -> Result<()> {
        match self {
            FnSpec::Constant(p) => {
                let v = match &p.value {
                    ConstValue::Scalar(s) => vec![*s; m],
                    ConstValue::Vector(v) => {
                        if v.len() != m {
                            return Err(schema(format!("constant has {} components, expected m = {m}", v.len())));
                        }
                        v.clone()
                    }
                };
                poly.push(v.iter().map(|c| c * scale).collect(), vec![0; n]);
            }
            FnSpec::Coordinate(p) => {
                if p.index < 1 || p.index > n {
                    return Err(schema(format!("coordinate index {} outside 1..={n}", p.index)));
                }
                if p.component < 1 || p.component > m {
                    return Err(schema(format!("coordinate component {} outside 1..={m}", p.component)));
                }
                let mut c = vec![0.0; m];
                c[p.component - 1] = scale;
                let mut powers = vec![0u8; n];
                powers[p.index - 1] = 1;
                poly.push(c, powers);
            }
            FnSpec::Polynomial(p) => {
                for t in &p.terms {
                    if t.coeff.len() != m {
                        return Err(schema(format!("term coefficient has {} components, expected m = {m}", t.coeff.len())));
                    }
                    if t.powers.len() != n {
                        return Err(schema(format!("term powers have length {}, expected n = {n}", t.powers.len())));
                    }
                    let degree: usize = t.powers.iter().sum();
                    if degree > MAX_DEGREE {
                        return Err(schema(format!("term degree {degree} exceeds {MAX_DEGREE}")));
                    }
                    poly.push(t.coeff.iter().map(|c| c * scale).collect(), t.powers.iter().map(|&p| p as u8).collect());
                }
            }
            FnSpec::Scaled(p) => p.inner.collect(n, m, scale * p.factor, poly)?,
        }
        Ok(())
    }
}

fn schema(msg: String) -> Error {
    Error::Schema(msg)
}

/// Polynomial map `ℝⁿ → ℝ^m` with terms in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    n: usize,
    m: usize,
    terms: Vec<(Vec<f64>, Vec<u8>)>,
}

impl Poly {
    fn push(&mut self, coeff: Vec<f64>, powers: Vec<u8>) {
        self.terms.push((coeff, powers));
    }

    fn normalise(&mut self) {
        self.terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut merged: Vec<(Vec<f64>, Vec<u8>)> = Vec::with_capacity(self.terms.len());
        for (c, p) in self.terms.drain(..) {
            match merged.last_mut() {
                Some((mc, mp)) if *mp == p => mc.iter_mut().zip(&c).for_each(|(a, b)| *a += b),
                _ => merged.push((c, p)),
            }
        }
        merged.retain(|(c, _)| c.iter().any(|&v| v != 0.0));
        self.terms = merged;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, p)| p.iter().map(|&v| v as usize).sum()).max().unwrap_or(0)
    }

    /// True when the map has no non-constant term.
    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    fn power_table(&self, x: &[f64]) -> [[f64; MAX_DEGREE + 1]; 8] {
        let mut t = [[1.0; MAX_DEGREE + 1]; 8];
        for (k, &xk) in x.iter().enumerate().take(8) {
            for p in 1..=MAX_DEGREE {
                t[k][p] = t[k][p - 1] * xk;
            }
        }
        t
    }

    fn monomial(&self, x: &[f64], table: &[[f64; MAX_DEGREE + 1]; 8], powers: &[u8]) -> f64 {
        powers
            .iter()
            .enumerate()
            .map(|(k, &p)| if k < 8 { table[k][p as usize] } else { x[k].powi(p as i32) })
            .product()
    }

    /// Evaluate into `out` (length `m`).
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let table = self.power_table(x);
        for (c, p) in &self.terms {
            let v = self.monomial(x, &table, p);
            for (o, ci) in out.iter_mut().zip(c) {
                *o += ci * v;
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        self.eval_into(x, &mut out);
        out
    }

    /// Jacobian `∂p_i/∂x_k`, row-major `m × n`.
    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut jac = vec![vec![0.0; self.n]; self.m];
        for (c, p) in &self.terms {
            for k in 0..self.n {
                if p[k] == 0 {
                    continue;
                }
                let mut q = p.clone();
                q[k] -= 1;
                let table = self.power_table(x);
                let v = p[k] as f64 * self.monomial(x, &table, &q);
                for (row, ci) in jac.iter_mut().zip(c) {
                    row[k] += ci * v;
                }
            }
        }
        jac
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        let json = r#"{"kind":"scaled","params":{"factor":-2,"inner":{"kind":"polynomial","params":{"terms":[
            {"coeff":[1.0],"powers":[2,0]},{"coeff":[3.0],"powers":[0,1]}]}}}}"#;
        let f: FnSpec = serde_json::from_str(json).unwrap();
        let p = f.compile(2, 1).unwrap();
        assert_eq!(p.eval(&[0.5, 2.0]), vec![-2.0 * (0.25 + 6.0)]);
        let c: FnSpec = serde_json::from_str(r#"{"kind":"constant","params":{"value":[64,0]}}"#).unwrap();
        assert_eq!(c.compile(3, 2).unwrap().eval(&[0.1, 0.2, 0.3]), vec![64.0, 0.0]);
        let s: FnSpec = serde_json::from_str(r#"{"kind":"constant","params":{"value":1.5}}"#).unwrap();
        assert_eq!(s.compile(2, 3).unwrap().eval(&[0.0, 0.0]), vec![1.5; 3]);
        let x: FnSpec = serde_json::from_str(r#"{"kind":"coordinate","params":{"index":2,"component":2}}"#).unwrap();
        assert_eq!(x.compile(3, 2).unwrap().eval(&[0.1, 0.2, 0.3]), vec![0.0, 0.2]);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_parameters() {
        assert!(serde_json::from_str::<FnSpec>(r#"{"kind":"constant","params":{"value":1,"extra":0}}"#).is_err());
        assert!(serde_json::from_str::<FnSpec>(r#"{"kind":"constant","params":{"value":1},"x":1}"#).is_err());
        assert!(serde_json::from_str::<FnSpec>(r#"{"kind":"bessel","params":{}}"#).is_err());
        assert!(FnSpec::coordinate(4).compile(3, 1).is_err());
        assert!(FnSpec::constant(vec![1.0, 2.0]).compile(3, 1).is_err());
        let high = FnSpec::polynomial(vec![Term { coeff: vec![1.0], powers: vec![5, 0] }]);
        assert!(matches!(high.compile(2, 1), Err(Error::Schema(_))));
    }

    #[test]
    fn normalises_and_detects_zero() {
        let p = FnSpec::polynomial(vec![
            Term { coeff: vec![1.0], powers: vec![1, 1] },
            Term { coeff: vec![-1.0], powers: vec![1, 1] },
        ]);
        assert!(p.compile(2, 1).unwrap().is_zero());
        assert!(FnSpec::zero().compile(3, 2).unwrap().is_zero());
        assert!(FnSpec::scaled(FnSpec::coordinate(1), 0.0).compile(2, 1).unwrap().is_zero());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = FnSpec::polynomial(vec![
            Term { coeff: vec![1.0, 2.0], powers: vec![2, 1, 0] },
            Term { coeff: vec![-0.5, 0.0], powers: vec![0, 0, 4] },
            Term { coeff: vec![0.3, 1.0], powers: vec![1, 1, 1] },
        ])
        .compile(3, 2)
        .unwrap();
        let x = [0.3, -0.4, 0.5];
        let jac = p.jacobian(&x);
        for k in 0..3 {
            let mut a = x;
            let mut b = x;
            a[k] += 1e-6;
            b[k] -= 1e-6;
            let (fa, fb) = (p.eval(&a), p.eval(&b));
            for i in 0..2 {
                assert!((jac[i][k] - (fa[i] - fb[i]) / 2e-6).abs() < 1e-8);
            }
        }
    }
}
