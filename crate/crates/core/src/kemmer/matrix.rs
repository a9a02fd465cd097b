use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Exact Gaussian integer a + bi.
pub type GaussInt = Complex<i64>;

pub const DIM: usize = 10;

const ZERO: GaussInt = Complex::new(0, 0);

/// 10×10 matrix over the Gaussian integers; all products are exact.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExactMatrix(pub [[GaussInt; DIM]; DIM]);

impl ExactMatrix {
    pub fn zero() -> Self {
        ExactMatrix([[ZERO; DIM]; DIM])
    }

    pub fn identity() -> Self {
        Self::diagonal([1; DIM])
    }

    pub fn diagonal(d: [i64; DIM]) -> Self {
        let mut m = Self::zero();
        for (i, &v) in d.iter().enumerate() {
            m.0[i][i] = Complex::new(v, 0);
        }
        m
    }

    /// Builds a matrix from 1-based (row, column, value) triples.
    pub fn from_entries(entries: &[(usize, usize, GaussInt)]) -> Self {
        let mut m = Self::zero();
        for &(r, c, v) in entries {
            m.0[r - 1][c - 1] = v;
        }
        m
    }

    /// 0-based entry access.
    pub fn get(&self, row: usize, col: usize) -> GaussInt {
        self.0[row][col]
    }

    pub fn scale(&self, s: GaussInt) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|v| *v *= s);
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                m.0[j][i] = self.0[i][j];
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|v| *v == ZERO)
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().flatten().all(|v| v.im == 0)
    }

    pub fn diagonal_is_zero(&self) -> bool {
        (0..DIM).all(|i| self.0[i][i] == ZERO)
    }

    pub fn nonzero_entries(&self) -> Vec<(usize, usize, GaussInt)> {
        let mut out = Vec::new();
        for i in 0..DIM {
            for j in 0..DIM {
                if self.0[i][j] != ZERO {
                    out.push((i, j, self.0[i][j]));
                }
            }
        }
        out
    }

    /// Real part as floating point; callers check [`is_real`](Self::is_real)
    /// when the imaginary part matters.
    pub fn real_f64(&self) -> [[f64; DIM]; DIM] {
        let mut out = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                out[i][j] = self.0[i][j].re as f64;
            }
        }
        out
    }

    /// Imaginary part as floating point.
    pub fn imag_f64(&self) -> [[f64; DIM]; DIM] {
        let mut out = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                out[i][j] = self.0[i][j].im as f64;
            }
        }
        out
    }

    pub fn apply(&self, v: &[GaussInt; DIM]) -> [GaussInt; DIM] {
        let mut out = [ZERO; DIM];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..DIM).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// `[re, im]` pairs, row-major, for JSON output.
    pub fn to_pairs(&self) -> Vec<Vec<[i64; 2]>> {
        self.0
            .iter()
            .map(|row| row.iter().map(|v| [v.re, v.im]).collect())
            .collect()
    }
}

impl Add for ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..DIM {
            for j in 0..DIM {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ExactMatrix {
    type Output = ExactMatrix;
    fn neg(self) -> Self {
        self.scale(Complex::new(-1, 0))
    }
}

impl Mul for ExactMatrix {
    type Output = ExactMatrix;
    #[allow(clippy::op_ref)]
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: Self) -> ExactMatrix {
        let mut m = ExactMatrix::zero();
        for i in 0..DIM {
            for k in 0..DIM {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..DIM {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix [")?;
        for row in &self.0 {
            let cells: Vec<String> = row.iter().map(fmt_gauss).collect();
            writeln!(f, "  {}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

pub(crate) fn fmt_gauss(v: &GaussInt) -> String {
    match (v.re, v.im) {
        (0, 0) => "0".into(),
        (r, 0) => format!("{r}"),
        (0, 1) => "i".into(),
        (0, -1) => "-i".into(),
        (0, i) => format!("{i}i"),
        (r, i) => format!("{r}{i:+}i"),
    }
}

/// Serializable form of a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub name: String,
    pub entries: Vec<Vec<[i64; 2]>>,
}

pub(crate) const fn gi(re: i64, im: i64) -> GaussInt {
    Complex::new(re, im)
}
