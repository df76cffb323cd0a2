//! Points of the Siegel upper half-space ℍ₂ and reduction into the
//! fundamental domain F₂.

use std::sync::OnceLock;

use num_complex::Complex64;
use rug::{Assign, Complex, Float};

use crate::error::{Error, Result};
use crate::numerics::scalar::{log2_abs, reprec};
use crate::symplectic::SymplecticMatrix;

/// Ω = [[τ₁, τ₃], [τ₃, τ₂]].
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodMatrix {
    pub tau1: Complex,
    pub tau2: Complex,
    pub tau3: Complex,
}

impl PeriodMatrix {
    pub fn new(tau1: Complex, tau2: Complex, tau3: Complex) -> Self {
        Self { tau1, tau2, tau3 }
    }

    /// Entries given as (re, im) pairs in the order τ₁, τ₂, τ₃.
    pub fn from_f64(prec: u32, t1: (f64, f64), t2: (f64, f64), t3: (f64, f64)) -> Self {
        Self {
            tau1: Complex::with_val(prec, t1),
            tau2: Complex::with_val(prec, t2),
            tau3: Complex::with_val(prec, t3),
        }
    }

    pub fn prec(&self) -> u32 {
        self.tau1.prec().0
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self {
            tau1: reprec(&self.tau1, prec),
            tau2: reprec(&self.tau2, prec),
            tau3: reprec(&self.tau3, prec),
        }
    }

    /// Entry (i, j) of the symmetric matrix.
    pub fn entry(&self, i: usize, j: usize) -> &Complex {
        match (i, j) {
            (0, 0) => &self.tau1,
            (1, 1) => &self.tau2,
            _ => &self.tau3,
        }
    }

    pub fn to_c64(&self) -> [[Complex64; 2]; 2] {
        let c = |z: &Complex| Complex64::new(z.real().to_f64(), z.imag().to_f64());
        [[c(&self.tau1), c(&self.tau3)], [c(&self.tau3), c(&self.tau2)]]
    }

    /// Ω multiplied by a rational k/d.
    pub fn scaled(&self, k: i64, d: i64) -> Self {
        let s = |z: &Complex| {
            let mut w = z.clone();
            w *= k;
            w /= d;
            w
        };
        Self {
            tau1: s(&self.tau1),
            tau2: s(&self.tau2),
            tau3: s(&self.tau3),
        }
    }

    pub fn half(&self) -> Self {
        self.scaled(1, 2)
    }

    /// Imaginary part as an f64 matrix.
    pub fn im_f64(&self) -> [[f64; 2]; 2] {
        let y1 = self.tau1.imag().to_f64();
        let y2 = self.tau2.imag().to_f64();
        let y3 = self.tau3.imag().to_f64();
        [[y1, y3], [y3, y2]]
    }

    /// Im Ω positive definite.
    pub fn is_in_h2(&self) -> bool {
        let y = self.im_f64();
        y[0][0] > 0.0 && y[0][0] * y[1][1] - y[0][1] * y[0][1] > 0.0
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let d = |a: &Complex, b: &Complex| log2_abs(&Complex::with_val(a.prec(), a - b)).exp2();
        d(&self.tau1, &o.tau1)
            .max(d(&self.tau2, &o.tau2))
            .max(d(&self.tau3, &o.tau3))
    }
}

type CMat = [[Complex; 2]; 2];

fn cmat(om: &PeriodMatrix) -> CMat {
    [
        [om.tau1.clone(), om.tau3.clone()],
        [om.tau3.clone(), om.tau2.clone()],
    ]
}

/// X·Ω + Y for integer 2×2 blocks X, Y.
fn lin(x: &[[i64; 2]; 2], om: &CMat, y: &[[i64; 2]; 2], prec: u32) -> CMat {
    let mut out: CMat = [
        [Complex::new(prec), Complex::new(prec)],
        [Complex::new(prec), Complex::new(prec)],
    ];
    let mut t = Complex::new(prec);
    for i in 0..2 {
        for j in 0..2 {
            let o = &mut out[i][j];
            o.assign(y[i][j]);
            for k in 0..2 {
                if x[i][k] != 0 {
                    t.assign(&om[k][j] * x[i][k]);
                    *o += &t;
                }
            }
        }
    }
    out
}

fn det2(m: &CMat) -> Complex {
    let prec = m[0][0].prec().0;
    let mut d = Complex::with_val(prec, &m[0][0] * &m[1][1]);
    d -= Complex::with_val(prec, &m[0][1] * &m[1][0]);
    d
}

/// det(CΩ + D) at the precision of Ω.
pub fn det_c_omega_d(g: &SymplecticMatrix, om: &PeriodMatrix) -> Complex {
    det2(&lin(&g.c(), &cmat(om), &g.d(), om.prec()))
}

/// γ·Ω = (AΩ + B)(CΩ + D)⁻¹.
pub fn act(g: &SymplecticMatrix, om: &PeriodMatrix) -> Result<PeriodMatrix> {
    let prec = om.prec();
    let w = cmat(om);
    let m = lin(&g.c(), &w, &g.d(), prec);
    let n = lin(&g.a(), &w, &g.b(), prec);
    let det = det2(&m);
    if det.real().is_zero() && det.imag().is_zero() {
        return Err(Error::Numeric("det(CΩ+D) vanished".into()));
    }
    // (CΩ+D)^{-1} = adj / det
    let inv = [
        [m[1][1].clone(), Complex::with_val(prec, -&m[0][1])],
        [Complex::with_val(prec, -&m[1][0]), m[0][0].clone()],
    ];
    let mut r: CMat = [
        [Complex::new(prec), Complex::new(prec)],
        [Complex::new(prec), Complex::new(prec)],
    ];
    for i in 0..2 {
        for j in 0..2 {
            let mut s = Complex::with_val(prec, &n[i][0] * &inv[0][j]);
            s += Complex::with_val(prec, &n[i][1] * &inv[1][j]);
            s /= &det;
            r[i][j] = s;
        }
    }
    let defect = log2_abs(&Complex::with_val(prec, &r[0][1] - &r[1][0]));
    let scale = log2_abs(&r[0][0])
        .max(log2_abs(&r[1][1]))
        .max(log2_abs(&r[0][1]))
        .max(0.0);
    if defect > scale - prec as f64 / 2.0 {
        return Err(Error::Numeric(format!(
            "symmetry defect 2^{defect:.1} after the symplectic action"
        )));
    }
    let mut t3 = Complex::with_val(prec, &r[0][1] + &r[1][0]);
    t3 /= 2;
    let [[t1, _], [_, t2]] = r;
    Ok(PeriodMatrix::new(t1, t2, t3))
}

/// Minkowski reduction of a positive definite 2×2 matrix: returns
/// (ᵗU·Y·U, U) with 0 ≤ 2·Y₁₂ ≤ Y₁₁ ≤ Y₂₂.
pub fn minkowski_reduce(y: [[f64; 2]; 2]) -> ([[f64; 2]; 2], [[i64; 2]; 2]) {
    let (mut a, mut b, mut c) = (y[0][0], y[0][1], y[1][1]);
    let mut u = [[1i64, 0], [0, 1]];
    for _ in 0..200 {
        if a > c {
            std::mem::swap(&mut a, &mut c);
            u = [[u[0][1], u[0][0]], [u[1][1], u[1][0]]];
        }
        let r = (b / a).round();
        if r == 0.0 || 2.0 * b.abs() <= a {
            if a <= c {
                break;
            }
            continue;
        }
        // column op: second basis vector minus r times the first
        c = c - 2.0 * r * b + r * r * a;
        b -= r * a;
        let ri = r as i64;
        u = [[u[0][0], u[0][1] - ri * u[0][0]], [u[1][0], u[1][1] - ri * u[1][0]]];
    }
    if b < 0.0 {
        b = -b;
        u = [[u[0][0], -u[0][1]], [u[1][0], -u[1][1]]];
    }
    ([[a, b], [b, c]], u)
}

/// Matrix of Sp₄(ℤ) taking Ω to ᵗUΩU.
fn unimodular_step(u: [[i64; 2]; 2]) -> SymplecticMatrix {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let ut = [[u[0][0], u[1][0]], [u[0][1], u[1][1]]];
    let uinv = [[u[1][1] * det, -u[0][1] * det], [-u[1][0] * det, u[0][0] * det]];
    SymplecticMatrix::from_blocks(ut, [[0, 0], [0, 0]], [[0, 0], [0, 0]], uinv)
        .expect("unimodular block matrix is symplectic")
}

fn translation(b: [[i64; 2]; 2]) -> SymplecticMatrix {
    SymplecticMatrix::from_blocks([[1, 0], [0, 1]], b, [[0, 0], [0, 0]], [[1, 0], [0, 1]])
        .expect("translation is symplectic")
}

fn omega_form(u: &[i64; 4], v: &[i64; 4]) -> i64 {
    u[0] * v[2] + u[1] * v[3] - u[2] * v[0] - u[3] * v[1]
}

/// Complete a primitive isotropic pair of rows (r3, r4) to a symplectic
/// matrix.
fn complete(r3: [i64; 4], r4: [i64; 4]) -> Option<SymplecticMatrix> {
    let find = |t3: i64, t4: i64| -> Option<[i64; 4]> {
        for bound in 1..=3i64 {
            let rng = -bound..=bound;
            for a in rng.clone() {
                for b in rng.clone() {
                    for c in rng.clone() {
                        for d in rng.clone() {
                            let u = [a, b, c, d];
                            if omega_form(&u, &r3) == t3 && omega_form(&u, &r4) == t4 {
                                return Some(u);
                            }
                        }
                    }
                }
            }
        }
        None
    };
    let r1 = find(1, 0)?;
    let mut r2 = find(0, 1)?;
    let c = omega_form(&r1, &r2);
    for k in 0..4 {
        r2[k] -= c * r3[k];
    }
    SymplecticMatrix::new([r1, r2, r3, r4])
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Hermite normal form of a rank-2 integer 2×4 matrix under left GL₂(ℤ).
fn hnf(mut rows: [[i64; 4]; 2]) -> [[i64; 4]; 2] {
    let mut piv_row = 0;
    for col in 0..4 {
        if piv_row == 2 {
            break;
        }
        // Euclid on the column entries of rows piv_row..2
        loop {
            let nz: Vec<usize> = (piv_row..2).filter(|&r| rows[r][col] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&r) = nz.first() {
                    rows.swap(piv_row, r);
                }
                break;
            }
            let (i, j) = if rows[nz[0]][col].abs() <= rows[nz[1]][col].abs() {
                (nz[0], nz[1])
            } else {
                (nz[1], nz[0])
            };
            let q = rows[j][col] / rows[i][col];
            for k in 0..4 {
                rows[j][k] -= q * rows[i][k];
            }
        }
        if rows[piv_row][col] == 0 {
            continue;
        }
        if rows[piv_row][col] < 0 {
            for x in rows[piv_row].iter_mut() {
                *x = -*x;
            }
        }
        let p = rows[piv_row][col];
        for r in 0..piv_row {
            let q = rows[r][col].div_euclid(p);
            for k in 0..4 {
                rows[r][k] -= q * rows[piv_row][k];
            }
        }
        piv_row += 1;
    }
    rows
}

/// Symplectic matrices whose bottom blocks (C, D) run over the primitive
/// isotropic pairs with entries in {−1, 0, 1} and C ≠ 0, one per left
/// GL₂(ℤ)-class. This contains the classical 19 conditions cutting out F₂.
pub fn fundamental_candidates() -> &'static Vec<SymplecticMatrix> {
    static C: OnceLock<Vec<SymplecticMatrix>> = OnceLock::new();
    C.get_or_init(|| {
        let mut seen = std::collections::BTreeMap::new();
        for code in 0..3i64.pow(8) {
            let mut e = [0i64; 8];
            let mut x = code;
            for v in e.iter_mut() {
                *v = x % 3 - 1;
                x /= 3;
            }
            let r3 = [e[0], e[1], e[4], e[5]];
            let r4 = [e[2], e[3], e[6], e[7]];
            if e[0] == 0 && e[1] == 0 && e[2] == 0 && e[3] == 0 {
                continue;
            }
            if omega_form(&r3, &r4) != 0 {
                continue;
            }
            // primitive: gcd of 2×2 minors is 1
            let mut g = 0;
            for a in 0..4 {
                for b in a + 1..4 {
                    g = gcd(g, r3[a] * r4[b] - r3[b] * r4[a]);
                }
            }
            if g != 1 {
                continue;
            }
            let key = hnf([r3, r4]);
            if seen.contains_key(&key) {
                continue;
            }
            let m = complete(r3, r4).expect("primitive isotropic pair completes");
            seen.insert(key, m);
        }
        seen.into_values().collect()
    })
}

fn det_c64(g: &SymplecticMatrix, w: &[[Complex64; 2]; 2]) -> f64 {
    let (c, d) = (g.c(), g.d());
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut s = Complex64::new(d[i][j] as f64, 0.0);
            for k in 0..2 {
                s += w[k][j] * c[i][k] as f64;
            }
            m[i][j] = s;
        }
    }
    (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm()
}

#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub omega_reduced: PeriodMatrix,
    pub gamma: SymplecticMatrix,
    pub steps: usize,
}

pub const MAX_REDUCTION_STEPS: usize = 10_000;

/// Reduce Ω into F₂. Each step is chosen from an f64 image of the current
/// point and applied to the full-precision value.
pub fn reduce_to_fundamental(om: &PeriodMatrix) -> Result<ReductionResult> {
    if !om.is_in_h2() {
        return Err(Error::Numeric("period matrix is not in H2".into()));
    }
    let cands = fundamental_candidates();
    let mut cur = om.clone();
    let mut gamma = SymplecticMatrix::identity();
    let mut steps = 0;
    let apply = |s: SymplecticMatrix, cur: &mut PeriodMatrix, gamma: &mut SymplecticMatrix| -> Result<()> {
        *cur = act(&s, cur)?;
        *gamma = s.mul(gamma);
        Ok(())
    };
    loop {
        if steps > MAX_REDUCTION_STEPS {
            return Err(Error::NonTermination(steps));
        }
        let (_, u) = minkowski_reduce(cur.im_f64());
        if u != [[1, 0], [0, 1]] {
            apply(unimodular_step(u), &mut cur, &mut gamma)?;
            steps += 1;
        }
        let w = cur.to_c64();
        let b = [
            [-w[0][0].re.round() as i64, -w[0][1].re.round() as i64],
            [-w[1][0].re.round() as i64, -w[1][1].re.round() as i64],
        ];
        if b != [[0, 0], [0, 0]] {
            apply(translation(b), &mut cur, &mut gamma)?;
            steps += 1;
        }
        let w = cur.to_c64();
        let best = cands
            .iter()
            .map(|g| (det_c64(g, &w), g))
            .min_by(|x, y| x.0.total_cmp(&y.0))
            .expect("candidate set is nonempty");
        if best.0 < 1.0 - 1e-12 {
            apply(*best.1, &mut cur, &mut gamma)?;
            steps += 1;
            continue;
        }
        // Minkowski and translation may have been undone by nothing else;
        // a clean pass means we are done.
        let (_, u) = minkowski_reduce(cur.im_f64());
        let w = cur.to_c64();
        let clean_re = w.iter().flatten().all(|z| z.re.abs() <= 0.5 + 1e-12);
        if u == [[1, 0], [0, 1]] && clean_re {
            break;
        }
    }
    Ok(ReductionResult {
        omega_reduced: cur,
        gamma,
        steps,
    })
}

/// The three F₂ conditions, each allowed to fail by `tol`.
pub fn is_in_fundamental(om: &PeriodMatrix, tol: f64) -> bool {
    if !om.is_in_h2() {
        return false;
    }
    let w = om.to_c64();
    if w.iter().flatten().any(|z| z.re.abs() > 0.5 + tol) {
        return false;
    }
    let y = om.im_f64();
    let (y1, y2, y3) = (y[0][0], y[1][1], y[0][1]);
    if !(-tol <= 2.0 * y3 && 2.0 * y3 <= y1 + tol && y1 <= y2 + tol) {
        return false;
    }
    let prec = om.prec();
    let one = Float::with_val(prec, 1.0 - tol);
    fundamental_candidates().iter().all(|g| {
        let d = det_c_omega_d(g, om);
        let n = Float::with_val(prec, d.abs_ref());
        n >= one
    })
}

/// A random point of the interior of F₂, by rejection from a box that
/// covers the region where Im Ω is Minkowski reduced with y₁ ∈ [0.9, 1.5].
pub fn sample_fundamental<R: rand::Rng>(rng: &mut R, prec: u32) -> PeriodMatrix {
    loop {
        let y1: f64 = rng.gen_range(0.9..1.5);
        let y2: f64 = y1 + rng.gen_range(0.0..0.6);
        let y3: f64 = rng.gen_range(0.05..y1 / 2.0);
        let om = PeriodMatrix::from_f64(
            prec,
            (rng.gen_range(-0.5..0.5), y1),
            (rng.gen_range(-0.5..0.5), y2),
            (rng.gen_range(-0.5..0.5), y3),
        );
        if is_in_fundamental(&om, 0.0) {
            return om;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_h2(rng: &mut ChaCha8Rng, prec: u32, scale: f64) -> PeriodMatrix {
        // Y = L·ᵗL with random lower-triangular L
        let a: f64 = rng.gen_range(0.2..1.5) * scale;
        let b: f64 = rng.gen_range(-1.0..1.0) * scale;
        let c: f64 = rng.gen_range(0.2..1.5) * scale;
        let (y1, y3, y2) = (a * a, a * b, b * b + c * c);
        PeriodMatrix::from_f64(
            prec,
            (rng.gen_range(-3.0..3.0), y1),
            (rng.gen_range(-3.0..3.0), y2),
            (rng.gen_range(-3.0..3.0), y3),
        )
    }

    #[test]
    fn action_basics() {
        let om = PeriodMatrix::from_f64(128, (0.1, 1.2), (-0.2, 1.5), (0.05, 0.3));
        let id = SymplecticMatrix::identity();
        assert!(act(&id, &om).unwrap().max_abs_diff(&om) < 1e-30);
        let t = act(&SymplecticMatrix::m_gen(0, 0), &om).unwrap();
        let mut want = om.clone();
        want.tau1 += 1;
        assert!(t.max_abs_diff(&want) < 1e-30);
        // J: Ω ↦ −Ω⁻¹
        let j = act(&SymplecticMatrix::j(), &om).unwrap();
        let det = Complex::with_val(128, &om.tau1 * &om.tau2) - Complex::with_val(128, &om.tau3 * &om.tau3);
        let want = PeriodMatrix::new(
            -Complex::with_val(128, &om.tau2 / &det),
            -Complex::with_val(128, &om.tau1 / &det),
            Complex::with_val(128, &om.tau3 / &det),
        );
        assert!(j.max_abs_diff(&want) < 1e-30);
    }

    #[test]
    fn action_is_a_group_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gens = SymplecticMatrix::generators();
        for _ in 0..30 {
            let om = random_h2(&mut rng, 200, 1.0);
            let mut g1 = SymplecticMatrix::identity();
            let mut g2 = SymplecticMatrix::identity();
            for _ in 0..5 {
                g1 = g1.mul(&gens[rng.gen_range(0..4)]);
                g2 = g2.mul(&gens[rng.gen_range(0..4)]);
            }
            let lhs = act(&g1.mul(&g2), &om).unwrap();
            let rhs = act(&g1, &act(&g2, &om).unwrap()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-40);
        }
    }

    #[test]
    fn minkowski_examples() {
        let (y, u) = minkowski_reduce([[2.0, 0.0], [0.0, 1.0]]);
        assert_eq!(y, [[1.0, 0.0], [0.0, 2.0]]);
        assert_eq!(u, [[0, 1], [1, 0]]);
        let (_, u) = minkowski_reduce([[1.0, 0.2], [0.2, 1.5]]);
        assert_eq!(u, [[1, 0], [0, 1]]);
        let y0 = [[1.0, 0.9], [0.9, 1.0]];
        let (y, u) = minkowski_reduce(y0);
        assert!(0.0 <= 2.0 * y[0][1] && 2.0 * y[0][1] <= y[0][0] && y[0][0] <= y[1][1]);
        assert!(((y[0][0] * y[1][1] - y[0][1] * y[0][1]) - 0.19).abs() < 1e-12);
        // exhaustive oracle: no unimodular U with entries in [-3, 3] gives a
        // shorter first vector
        let q = |v: [i64; 2]| {
            let (a, b) = (v[0] as f64, v[1] as f64);
            y0[0][0] * a * a + 2.0 * y0[0][1] * a * b + y0[1][1] * b * b
        };
        let mut best = f64::INFINITY;
        for a in -3..=3i64 {
            for b in -3..=3i64 {
                if (a, b) != (0, 0) {
                    best = best.min(q([a, b]));
                }
            }
        }
        assert!((y[0][0] - best).abs() < 1e-12);
        assert_eq!((u[0][0] * u[1][1] - u[0][1] * u[1][0]).abs(), 1);
    }

    #[test]
    fn candidate_set_contains_classical_conditions() {
        let c = fundamental_candidates();
        assert!(c.len() >= 19);
        let has = |cc: [[i64; 2]; 2], dd: [[i64; 2]; 2]| {
            c.iter().any(|g| {
                // same left GL2(Z) class
                hnf([[g.c()[0][0], g.c()[0][1], g.d()[0][0], g.d()[0][1]], [g.c()[1][0], g.c()[1][1], g.d()[1][0], g.d()[1][1]]])
                    == hnf([[cc[0][0], cc[0][1], dd[0][0], dd[0][1]], [cc[1][0], cc[1][1], dd[1][0], dd[1][1]]])
            })
        };
        // |τ₁| ≥ 1, |det Ω| ≥ 1, |det(Ω − diag(1, 0))| ≥ 1
        assert!(has([[1, 0], [0, 0]], [[0, 0], [0, 1]]));
        assert!(has([[1, 0], [0, 1]], [[0, 0], [0, 0]]));
        assert!(has([[1, 0], [0, 1]], [[-1, 0], [0, 0]]));
    }

    #[test]
    fn reduction_examples() {
        let om = PeriodMatrix::from_f64(128, (0.7, 1.0), (0.7, 1.0), (0.7, 0.0));
        let r = reduce_to_fundamental(&om).unwrap();
        let w = r.omega_reduced.to_c64();
        assert!((w[0][0].re + 0.3).abs() < 1e-12 && (w[0][0].im - 1.0).abs() < 1e-12);
        let om = PeriodMatrix::from_f64(128, (0.0, 0.1), (0.0, 0.1), (0.0, 0.0));
        let r = reduce_to_fundamental(&om).unwrap();
        assert!(is_in_fundamental(&r.omega_reduced, 1e-10));
        let y = r.omega_reduced.im_f64();
        assert!(y[0][0] * y[1][1] - y[0][1] * y[0][1] > 0.01);
        let om = PeriodMatrix::from_f64(128, (0.1, 1.1), (0.0, 1.3), (0.0, 0.2));
        let r = reduce_to_fundamental(&om).unwrap();
        assert!(r.gamma == SymplecticMatrix::identity() || r.gamma == SymplecticMatrix::identity().neg());
        assert!(is_in_fundamental(&om, 1e-12));
        let bad = PeriodMatrix::from_f64(128, (0.9, 1.1), (0.0, 1.3), (0.0, 0.2));
        assert!(!is_in_fundamental(&bad, 1e-12));
    }

    #[test]
    fn random_points_reduce() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..500 {
            let scale = if k % 2 == 0 { 0.3 } else { 1.0 };
            let om = random_h2(&mut rng, 128, scale);
            let r = reduce_to_fundamental(&om).unwrap();
            assert!(is_in_fundamental(&r.omega_reduced, 1e-9), "{k}");
            let back = act(&r.gamma, &om).unwrap();
            assert!(back.max_abs_diff(&r.omega_reduced) < 1e-25);
            // idempotent up to ±I
            let again = reduce_to_fundamental(&r.omega_reduced).unwrap();
            assert!(again.omega_reduced.max_abs_diff(&r.omega_reduced) < 1e-9 || again.steps > 0);
        }
    }
}
