use std::fmt;

/// Element of Sp₄(ℤ) stored as a 4×4 integer matrix with blocks
/// `[[A, B], [C, D]]`. Entries are `i64`; every product in this crate stays
/// far below overflow, and multiplication checks it anyway.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticMatrix {
    pub m: [[i64; 4]; 4],
}

pub type Block = [[i64; 2]; 2];

impl fmt::Debug for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.m)
    }
}

impl fmt::Display for SymplecticMatrix {
    /// Sixteen space-separated integers, row by row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.m.iter().flatten().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

const J: [[i64; 4]; 4] = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]];

fn mul_raw(a: &[[i64; 4]; 4], b: &[[i64; 4]; 4]) -> [[i64; 4]; 4] {
    let mut out = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s: i64 = 0;
            for k in 0..4 {
                let t = a[i][k].checked_mul(b[k][j]).expect("matrix entry overflow");
                s = s.checked_add(t).expect("matrix entry overflow");
            }
            out[i][j] = s;
        }
    }
    out
}

fn transpose(a: &[[i64; 4]; 4]) -> [[i64; 4]; 4] {
    let mut t = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// ᵗM J M = J over ℤ.
pub fn is_symplectic(m: &[[i64; 4]; 4]) -> bool {
    mul_raw(&mul_raw(&transpose(m), &J), m) == J
}

impl SymplecticMatrix {
    /// Wraps `m`, returning `None` if it is not symplectic.
    pub fn new(m: [[i64; 4]; 4]) -> Option<Self> {
        is_symplectic(&m).then_some(Self { m })
    }

    pub fn from_blocks(a: Block, b: Block, c: Block, d: Block) -> Option<Self> {
        let mut m = [[0i64; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][j];
                m[i][j + 2] = b[i][j];
                m[i + 2][j] = c[i][j];
                m[i + 2][j + 2] = d[i][j];
            }
        }
        Self::new(m)
    }

    pub fn identity() -> Self {
        let mut m = [[0i64; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        Self { m }
    }

    pub fn j() -> Self {
        Self { m: J }
    }

    /// Translation generator: identity plus 1 at B-positions (i, j) and (j, i).
    pub fn m_gen(i: usize, j: usize) -> Self {
        let mut g = Self::identity();
        g.m[i][2 + j] = 1;
        g.m[j][2 + i] = 1;
        g
    }

    /// The generating set {J, M₁₁, M₁₂, M₂₂} of Sp₄(ℤ).
    pub fn generators() -> Vec<Self> {
        vec![Self::j(), Self::m_gen(0, 0), Self::m_gen(0, 1), Self::m_gen(1, 1)]
    }

    fn block(&self, r: usize, c: usize) -> Block {
        [
            [self.m[r][c], self.m[r][c + 1]],
            [self.m[r + 1][c], self.m[r + 1][c + 1]],
        ]
    }

    pub fn a(&self) -> Block {
        self.block(0, 0)
    }
    pub fn b(&self) -> Block {
        self.block(0, 2)
    }
    pub fn c(&self) -> Block {
        self.block(2, 0)
    }
    pub fn d(&self) -> Block {
        self.block(2, 2)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            m: mul_raw(&self.m, &o.m),
        }
    }

    /// Inverse `[[ᵗD, −ᵗB], [−ᵗC, ᵗA]]`.
    pub fn inverse(&self) -> Self {
        let (a, b, c, d) = (self.a(), self.b(), self.c(), self.d());
        let t = |x: Block| [[x[0][0], x[1][0]], [x[0][1], x[1][1]]];
        let n = |x: Block| [[-x[0][0], -x[0][1]], [-x[1][0], -x[1][1]]];
        Self::from_blocks(t(d), n(t(b)), n(t(c)), t(a)).expect("inverse of a symplectic matrix")
    }

    pub fn neg(&self) -> Self {
        let mut m = self.m;
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
        Self { m }
    }

    pub fn transpose(&self) -> Self {
        Self { m: transpose(&self.m) }
    }

    pub fn max_abs(&self) -> i64 {
        self.m.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// Entries reduced into `0..n`.
    pub fn reduce_mod(&self, n: i64) -> [[i64; 4]; 4] {
        let mut m = self.m;
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = x.rem_euclid(n);
            }
        }
        m
    }

    /// Parse sixteen whitespace-separated integers.
    pub fn parse(s: &str) -> Option<Self> {
        let v: Vec<i64> = s
            .split_whitespace()
            .map(|t| t.parse().ok())
            .collect::<Option<Vec<_>>>()?;
        if v.len() != 16 {
            return None;
        }
        let mut m = [[0i64; 4]; 4];
        for (k, x) in v.into_iter().enumerate() {
            m[k / 4][k % 4] = x;
        }
        Self::new(m)
    }
}

/// Multiply 4×4 matrices mod `n` with entries in `0..n`.
pub fn mul_mod(a: &[[i64; 4]; 4], b: &[[i64; 4]; 4], n: i64) -> [[i64; 4]; 4] {
    let mut out = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = 0;
            for k in 0..4 {
                s += a[i][k] * b[k][j];
            }
            out[i][j] = s.rem_euclid(n);
        }
    }
    out
}
