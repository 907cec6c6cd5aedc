//! Unitary-like matrices: square `U` with `U·Uᴴ = Uᴴ·U = α·I` for some `α > 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Mode, Scalar, Sequence, SequenceFamily};

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryLike {
    rows: Vec<Vec<Scalar>>,
    alpha: Scalar,
}

impl UnitaryLike {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// The scale `α` of `U·Uᴴ = α·I`.
    pub fn alpha(&self) -> &Scalar {
        &self.alpha
    }

    pub fn entry(&self, m: usize, n: usize) -> &Scalar {
        &self.rows[m][n]
    }

    pub fn mode(&self) -> Mode {
        self.rows[0][0].mode()
    }

    pub fn order(&self) -> usize {
        self.rows().iter().fold(1, |k, r| num_integer::lcm(k, r.order()))
    }

    /// Row `m` as a sequence of length `N`.
    pub fn row(&self, m: usize) -> Sequence {
        Sequence::new(self.rows[m].clone()).expect("rows are non-empty and single-mode")
    }

    pub fn rows(&self) -> Vec<Sequence> {
        (0..self.dim()).map(|m| self.row(m)).collect()
    }

    /// The rows viewed as an `(N, 1, {N})` family.
    pub fn row_family(&self) -> SequenceFamily {
        SequenceFamily::from_column(self.rows()).expect("rows share length and mode")
    }
}

fn inner(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc: Option<Scalar> = None;
    for (x, y) in a.iter().zip(b) {
        let p = x * &y.conj();
        acc = Some(match acc {
            None => p,
            Some(s) => &s + &p,
        });
    }
    acc.expect("non-empty rows")
}

/// `W_N^{mn}` with `W_N = exp(-2πi/N)`, exact, `α = N`.
pub fn dft_matrix(n: usize) -> Result<UnitaryLike> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let rows = (0..n)
        .map(|m| (0..n).map(|k| Scalar::root(n, ((m * k) % n) as i64)).collect())
        .collect();
    Ok(UnitaryLike {
        rows,
        alpha: Scalar::int(n as i64),
    })
}

/// Sylvester-recursive Walsh-Hadamard matrix, `H_1 = [1]`, `α = N`.
pub fn hadamard_matrix(n: usize) -> Result<UnitaryLike> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut h: Vec<Vec<i64>> = vec![vec![1]];
    while h.len() < n {
        let top: Vec<Vec<i64>> = h.iter().map(|r| [r.as_slice(), r.as_slice()].concat()).collect();
        let bottom: Vec<Vec<i64>> = h
            .iter()
            .map(|r| r.iter().copied().chain(r.iter().map(|x| -x)).collect())
            .collect();
        h = top.into_iter().chain(bottom).collect();
    }
    Ok(UnitaryLike {
        rows: h
            .into_iter()
            .map(|r| r.into_iter().map(Scalar::int).collect())
            .collect(),
        alpha: Scalar::int(n as i64),
    })
}

pub fn identity_matrix(n: usize) -> Result<UnitaryLike> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let rows = (0..n)
        .map(|m| (0..n).map(|k| Scalar::int(i64::from(m == k))).collect())
        .collect();
    Ok(UnitaryLike {
        rows,
        alpha: Scalar::one(),
    })
}

/// Validates a user-supplied matrix. `α` is read off `(U·Uᴴ)_{00}`; every row
/// and column inner product is then checked against `α·δ`, exactly in exact
/// mode and to `tol·α` in approximate mode.
pub fn custom_matrix(rows: Vec<Vec<Scalar>>, tol: f64) -> Result<UnitaryLike> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare {
                row: i,
                expected: n,
                got: r.len(),
            });
        }
    }
    let mode = rows[0][0].mode();
    if rows.iter().flatten().any(|e| e.mode() != mode) {
        return Err(Error::ModeMismatch("a matrix".into()));
    }
    let alpha = inner(&rows[0], &rows[0]);
    let alpha_c = alpha.to_complex();
    let alpha_ok = match &alpha {
        Scalar::Exact(a) => alpha_c.re > 0.0 && a.conj() == *a,
        Scalar::Approx(z) => z.re > 0.0 && z.im.abs() <= tol * z.re,
    };
    if !alpha_ok {
        return Err(Error::NotUnitaryLike {
            row: 0,
            other: 0,
            value: alpha.to_string(),
        });
    }
    let thr = tol * alpha_c.re;
    let matches = |value: &Scalar, diag: bool| {
        let target = if diag { alpha.clone() } else { Scalar::zero() };
        (value - &target).is_negligible(thr)
    };
    for i in 0..n {
        for j in i..n {
            let v = inner(&rows[i], &rows[j]);
            if !matches(&v, i == j) {
                return Err(Error::NotUnitaryLike {
                    row: i,
                    other: j,
                    value: v.to_string(),
                });
            }
        }
    }
    let cols: Vec<Vec<Scalar>> = (0..n).map(|k| rows.iter().map(|r| r[k].clone()).collect()).collect();
    for i in 0..n {
        for j in i..n {
            let v = inner(&cols[i], &cols[j]);
            if !matches(&v, i == j) {
                return Err(Error::NotUnitaryLikeColumns {
                    col: i,
                    other: j,
                    value: v.to_string(),
                });
            }
        }
    }
    Ok(UnitaryLike { rows, alpha })
}

/// Declarative matrix description, as used in recipe and command-line input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MatrixSpec {
    Dft {
        dim: usize,
    },
    Hadamard {
        dim: usize,
    },
    Identity {
        dim: usize,
    },
    Custom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        entries: Vec<Vec<Scalar>>,
    },
}

impl MatrixSpec {
    pub fn dim(&self) -> usize {
        match self {
            MatrixSpec::Dft { dim } | MatrixSpec::Hadamard { dim } | MatrixSpec::Identity { dim } => *dim,
            MatrixSpec::Custom { dim, entries } => dim.unwrap_or(entries.len()),
        }
    }

    /// Hadamard for power-of-two sizes (including 1), DFT otherwise.
    pub fn preferred(dim: usize) -> MatrixSpec {
        if dim.is_power_of_two() {
            MatrixSpec::Hadamard { dim }
        } else {
            MatrixSpec::Dft { dim }
        }
    }

    pub fn build(&self) -> Result<UnitaryLike> {
        match self {
            MatrixSpec::Dft { dim } => dft_matrix(*dim),
            MatrixSpec::Hadamard { dim } => hadamard_matrix(*dim),
            MatrixSpec::Identity { dim } => identity_matrix(*dim),
            MatrixSpec::Custom { dim, entries } => {
                if let Some(d) = dim {
                    if *d != entries.len() {
                        return Err(Error::DimensionMismatch {
                            cell: 0,
                            expected: *d,
                            got: entries.len(),
                        });
                    }
                }
                custom_matrix(entries.clone(), crate::corr::DEFAULT_TOLERANCE)
            }
        }
    }
}

impl std::str::FromStr for MatrixSpec {
    type Err = Error;

    /// `dft:N`, `hadamard:N`, `identity:N` (also `F:N`, `H:N`, `I:N`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Precondition(format!("invalid matrix spec {s:?}"));
        let (kind, dim) = s.split_once(':').ok_or_else(bad)?;
        let dim: usize = dim.trim().parse().map_err(|_| bad())?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "dft" | "f" => Ok(MatrixSpec::Dft { dim }),
            "hadamard" | "h" => Ok(MatrixSpec::Hadamard { dim }),
            "identity" | "i" => Ok(MatrixSpec::Identity { dim }),
            _ => Err(bad()),
        }
    }
}
