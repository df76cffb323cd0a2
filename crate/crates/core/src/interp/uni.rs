use rug::Complex;

use crate::error::{Error, Result};
use crate::numerics::scalar::{log2_abs, Scalar};
use crate::numerics::{deflate, ext_euclid_row, poly_product_tree, UniPoly};

fn check_gaps(nodes: &[Complex]) -> Result<()> {
    let prec = nodes[0].prec().0;
    let bound = -(prec as f64) / 4.0;
    let scale = nodes.iter().map(log2_abs).fold(0.0, f64::max);
    for i in 0..nodes.len() {
        for j in 0..i {
            let d = log2_abs(&Complex::with_val(prec, &nodes[i] - &nodes[j]));
            if d < bound + scale {
                return Err(Error::IllConditioned(format!(
                    "nodes {j} and {i} are 2^{d:.1} apart"
                )));
            }
        }
    }
    Ok(())
}

/// Interpolating polynomial of degree < n through n points (Newton's
/// divided differences).
pub fn interp_poly_uni(nodes: &[Complex], values: &[Complex]) -> Result<UniPoly> {
    assert_eq!(nodes.len(), values.len());
    if nodes.is_empty() {
        return Ok(UniPoly::zero());
    }
    check_gaps(nodes)?;
    let n = nodes.len();
    let mut c: Vec<Complex> = values.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = c[i].sub(&c[i - 1]);
            let den = nodes[i].sub(&nodes[i - j]);
            c[i] = num.div(&den);
        }
    }
    let mut p = UniPoly::constant(c[n - 1].clone());
    for i in (0..n - 1).rev() {
        let lin = UniPoly::new(vec![nodes[i].neg(), nodes[i].one_like()]);
        p = p.mul(&lin).add(&UniPoly::constant(c[i].clone()));
    }
    Ok(p)
}

/// Rational reconstruction from values: (r, t) with r(xᵢ) = t(xᵢ)·yᵢ,
/// deg r ≤ deg_a, deg t ≤ deg_b. A result whose degrees fall short of the
/// bounds signals an unlucky specialisation and is reported as
/// `Degenerate`.
pub fn cauchy_interp_uni(
    nodes: &[Complex],
    values: &[Complex],
    deg_a: usize,
    deg_b: usize,
) -> Result<(UniPoly, UniPoly)> {
    if nodes.len() < deg_a + deg_b + 1 {
        return Err(Error::Config(format!(
            "{} nodes for degrees ({deg_a}, {deg_b})",
            nodes.len()
        )));
    }
    let f = interp_poly_uni(nodes, values)?;
    let g = poly_product_tree(nodes);
    let (r, t) = ext_euclid_row(&g, &f, deg_a + 1)?;
    let (dr, dt) = (r.deg_i(), t.deg_i());
    if dt > deg_b as isize || dr > deg_a as isize {
        return Err(Error::Degenerate(format!(
            "degrees ({dr}, {dt}) exceed the bounds ({deg_a}, {deg_b})"
        )));
    }
    if dr < deg_a as isize || dt < deg_b as isize {
        return Err(Error::Degenerate(format!(
            "degrees ({dr}, {dt}) below the expected ({deg_a}, {deg_b})"
        )));
    }
    Ok((r, t))
}

/// How a rational fit fixes the scale of the denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// B(0) = 1
    Constant,
    /// leading coefficient of B is 1
    Leading,
}

/// Outcome of [`fit_rational`].
#[derive(Clone, Debug)]
pub enum RationalFit {
    /// (A, B) interpolating the data, consistent with the held-out nodes.
    Fit(UniPoly, UniPoly),
    /// The square system is singular: the degree bounds leave slack in both
    /// numerator and denominator (or the normalisation is impossible).
    Singular,
    /// A unique solution exists but misses the held-out nodes.
    Mismatch,
}

/// Solve A(xᵢ) = vᵢ·B(xᵢ) on the first a + b + 1 nodes as a square linear
/// system, then check the remaining nodes to 2^-(prec/4) relative error.
/// Unlike the Euclidean route this stays stable when the interpolating
/// polynomial has rapidly decaying coefficients.
pub fn fit_rational(
    nodes: &[Complex],
    values: &[Complex],
    a: usize,
    b: usize,
    norm: Normalization,
) -> Result<RationalFit> {
    let m = a + b + 1;
    if nodes.len() < m {
        return Err(Error::Config(format!("{} nodes for degrees ({a}, {b})", nodes.len())));
    }
    let prec = nodes[0].prec().0;
    // unknowns: A_0..A_a, then the b free coefficients of B
    let free_b: Vec<usize> = match norm {
        Normalization::Constant => (1..=b).collect(),
        Normalization::Leading => (0..b).collect(),
    };
    let fixed_b = match norm {
        Normalization::Constant => 0,
        Normalization::Leading => b,
    };
    let mut mat = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let x = &nodes[i];
        let v = &values[i];
        let mut pw = vec![Complex::with_val(prec, 1)];
        for k in 1..=a.max(b) {
            let next = Complex::with_val(prec, &pw[k - 1] * x);
            pw.push(next);
        }
        let mut row: Vec<Complex> = pw[..=a].to_vec();
        for &k in &free_b {
            row.push(-Complex::with_val(prec, v * &pw[k]));
        }
        mat.push(row);
        rhs.push(Complex::with_val(prec, v * &pw[fixed_b]));
    }
    let sol = match crate::numerics::linalg::solve(mat, rhs, prec as f64 / 2.0) {
        Ok(s) => s,
        Err(_) => return Ok(RationalFit::Singular),
    };
    let num = UniPoly::new(sol[..=a].to_vec());
    let mut bc = vec![Complex::new(prec); b + 1];
    bc[fixed_b] = Complex::with_val(prec, 1);
    for (slot, &k) in free_b.iter().enumerate() {
        bc[k] = sol[a + 1 + slot].clone();
    }
    let den = UniPoly::new(bc);
    for i in m..nodes.len() {
        let lhs = num.eval(&nodes[i]);
        let rhs = den.eval(&nodes[i]).mul(&values[i]);
        let err = log2_abs(&lhs.sub(&rhs)) - log2_abs(&lhs).max(log2_abs(&rhs));
        if !(err < -(prec as f64) / 4.0) {
            return Ok(RationalFit::Mismatch);
        }
    }
    Ok(RationalFit::Fit(num, den))
}

/// Divide (r, t) by the constant term of t.
pub fn normalize_constant(r: &UniPoly, t: &UniPoly) -> Result<(UniPoly, UniPoly)> {
    let c0 = t.coeffs.first().ok_or(Error::NormalizationZero)?;
    let prec = c0.prec().0;
    if log2_abs(c0) < t.max_log2() - prec as f64 / 4.0 {
        return Err(Error::NormalizationZero);
    }
    let inv = c0.one_like().div(c0);
    Ok((r.scale(&inv), t.scale(&inv)))
}

/// `n` points center + radius·e^(2πi(k + phase)/n).
pub fn circle_nodes(n: usize, center: (f64, f64), radius: f64, phase: f64, prec: u32) -> Vec<Complex> {
    let pi2 = rug::Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
    (0..n)
        .map(|k| {
            let ang = rug::Float::with_val(prec, &pi2 * (k as f64 + phase)) / n as u32;
            let (s, c) = ang.sin_cos(rug::Float::new(prec));
            let mut z = Complex::with_val(prec, (c, s));
            z *= radius;
            z += Complex::with_val(prec, center);
            z
        })
        .collect()
}

/// Precomputed inverse Vandermonde matrix of a node set: coefficient t of
/// the interpolant is Σᵢ inv[t][i]·vᵢ.
#[derive(Clone, Debug)]
pub struct AxisInterpolator {
    pub nodes: Vec<Complex>,
    pub inv: Vec<Vec<Complex>>,
}

impl AxisInterpolator {
    pub fn new(nodes: Vec<Complex>) -> Result<Self> {
        check_gaps(&nodes)?;
        let n = nodes.len();
        let prec = nodes[0].prec().0;
        let g = poly_product_tree(&nodes);
        let mut inv = vec![vec![Complex::new(prec); n]; n];
        for (i, x) in nodes.iter().enumerate() {
            let mut l = deflate(&g, x);
            l.coeffs.resize(n, Complex::new(prec));
            let li = UniPoly::new(l.coeffs.clone()).eval(x);
            for t in 0..n {
                inv[t][i] = l.coeffs[t].div(&li);
            }
        }
        Ok(Self { nodes, inv })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Coefficients of the interpolant of `values`.
    pub fn apply(&self, values: &[Complex]) -> Vec<Complex> {
        let prec = self.nodes[0].prec().0;
        self.inv
            .iter()
            .map(|row| {
                let mut acc = Complex::new(prec);
                let mut tmp = Complex::new(prec);
                for (a, v) in row.iter().zip(values) {
                    rug::Assign::assign(&mut tmp, a * v);
                    acc += &tmp;
                }
                acc
            })
            .collect()
    }
}
