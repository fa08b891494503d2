//! Integer linear algebra on small matrices: Smith invariants, kernel
//! lattices, Euclid schedules and unimodular transforms.

use std::fmt;

use crate::error::{Error, Result};

/// Dense integer matrix with overflow-checked arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct IntMatrix(Vec<Vec<i64>>);

fn narrow(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow)
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows of unequal length".into()));
        }
        Ok(IntMatrix(rows))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<i64>]) -> Result<Self> {
        let m = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != m) {
            return Err(Error::Dimension("columns of unequal length".into()));
        }
        Ok(IntMatrix(
            (0..m)
                .map(|i| cols.iter().map(|c| c[i]).collect())
                .collect(),
        ))
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix(
            (0..n)
                .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.len()
    }

    pub fn ncols(&self) -> usize {
        self.0.first().map_or(0, Vec::len)
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.0.iter().map(|r| r[j]).collect()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.ncols() != other.nrows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        let mut out = Vec::with_capacity(self.nrows());
        for row in &self.0 {
            let mut r = Vec::with_capacity(other.ncols());
            for j in 0..other.ncols() {
                let s: i128 = row
                    .iter()
                    .zip(&other.0)
                    .map(|(a, b)| i128::from(*a) * i128::from(b[j]))
                    .sum();
                r.push(narrow(s)?);
            }
            out.push(r);
        }
        Ok(IntMatrix(out))
    }

    /// `self · v` for a column vector `v`.
    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        self.0
            .iter()
            .map(|row| {
                narrow(
                    row.iter()
                        .zip(v)
                        .map(|(a, b)| i128::from(*a) * i128::from(*b))
                        .sum(),
                )
            })
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<i64> {
        if !self.is_square() {
            return Err(Error::Dimension(
                "determinant of a non-square matrix".into(),
            ));
        }
        let n = self.nrows();
        let mut a: Vec<Vec<i128>> = self
            .0
            .iter()
            .map(|r| r.iter().map(|&x| i128::from(x)).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| a[i][k] != 0) else {
                return Ok(0);
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i][j]
                        .checked_mul(a[k][k])
                        .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                        .ok_or(Error::Overflow)?;
                    a[i][j] = v / prev;
                }
                a[i][k] = 0;
            }
            prev = a[k][k];
        }
        narrow(if n == 0 { 1 } else { sign * a[n - 1][n - 1] })
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse(&self) -> Result<IntMatrix> {
        let det = self.det()?;
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det));
        }
        let n = self.nrows();
        // Gauss-Jordan over Z succeeds since every pivot divides what it clears.
        let mut a: Vec<Vec<i128>> = self
            .0
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row: Vec<i128> = r.iter().map(|&x| i128::from(x)).collect();
                row.extend((0..n).map(|j| i128::from(i == j)));
                row
            })
            .collect();
        for c in 0..n {
            // make column c a unit by unimodular row operations
            loop {
                let nz: Vec<usize> = (c..n).filter(|&i| a[i][c] != 0).collect();
                let p = *nz.iter().min_by_key(|&&i| a[i][c].abs()).unwrap();
                a.swap(c, p);
                let mut done = true;
                for i in c + 1..n {
                    let q = a[i][c].div_euclid(a[c][c]);
                    if q != 0 {
                        let pivot = a[c].clone();
                        for (x, y) in a[i].iter_mut().zip(&pivot) {
                            *x -= q * y;
                        }
                    }
                    if a[i][c] != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if a[c][c] < 0 {
                for x in a[c].iter_mut() {
                    *x = -*x;
                }
            }
            let pivot = a[c].clone();
            for i in 0..n {
                if i != c && a[i][c] != 0 {
                    let q = a[i][c];
                    for (x, y) in a[i].iter_mut().zip(&pivot) {
                        *x -= q * y;
                    }
                }
            }
        }
        let rows = a
            .into_iter()
            .map(|r| {
                r[n..]
                    .iter()
                    .map(|&x| narrow(x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntMatrix(rows))
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .0
            .iter()
            .map(|r| {
                let xs: Vec<String> = r.iter().map(i64::to_string).collect();
                format!("[{}]", xs.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Nonzero diagonal entries of the Smith normal form, in divisibility order.
pub fn smith_invariants(b: &IntMatrix) -> Result<Vec<i64>> {
    let mut a: Vec<Vec<i128>> = b
        .rows()
        .iter()
        .map(|r| r.iter().map(|&x| i128::from(x)).collect())
        .collect();
    let (m, n) = (b.nrows(), b.ncols());
    let mut out = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the remaining block becomes the pivot
        let Some((pi, pj)) = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| a[i][j].abs())
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let p = a[t][t];
        let mut clean = true;
        for i in t + 1..m {
            let q = a[i][t].div_euclid(p);
            let pivot = a[t].clone();
            for (x, y) in a[i].iter_mut().zip(&pivot) {
                *x = x
                    .checked_sub(q.checked_mul(*y).ok_or(Error::Overflow)?)
                    .ok_or(Error::Overflow)?;
            }
            clean &= a[i][t] == 0;
        }
        for j in t + 1..n {
            let q = a[t][j].div_euclid(p);
            for row in a.iter_mut() {
                let y = row[t];
                row[j] = row[j]
                    .checked_sub(q.checked_mul(y).ok_or(Error::Overflow)?)
                    .ok_or(Error::Overflow)?;
            }
            clean &= a[t][j] == 0;
        }
        if !clean {
            continue;
        }
        // the pivot must divide the rest of the block
        if let Some(i) = (t + 1..m).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0)) {
            let row = a[i].clone();
            for (x, y) in a[t].iter_mut().zip(&row) {
                *x += y;
            }
            continue;
        }
        out.push(narrow(p.abs())?);
        t += 1;
    }
    Ok(out)
}

/// Whether the columns of `b` generate all of Z^m.
pub fn generates_full_lattice(b: &IntMatrix) -> Result<bool> {
    let inv = smith_invariants(b)?;
    Ok(inv.len() == b.nrows() && inv.iter().all(|&d| d == 1))
}

/// Row Hermite normal form of a list of integer vectors: echelon, pivots
/// positive, entries above each pivot reduced into `[0, pivot)`, zero rows
/// dropped.
pub fn hermite_rows(vectors: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let mut a: Vec<Vec<i128>> = vectors
        .iter()
        .map(|r| r.iter().map(|&x| i128::from(x)).collect())
        .collect();
    let n = vectors.first().map_or(0, Vec::len);
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        loop {
            let nz: Vec<usize> = (r..a.len()).filter(|&i| a[i][c] != 0).collect();
            let Some(&p) = nz.iter().min_by_key(|&&i| a[i][c].abs()) else {
                break;
            };
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..a.len() {
                let q = a[i][c].div_euclid(a[r][c]);
                if q != 0 {
                    let pivot = a[r].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot) {
                        *x = x
                            .checked_sub(q.checked_mul(*y).ok_or(Error::Overflow)?)
                            .ok_or(Error::Overflow)?;
                    }
                }
                done &= a[i][c] == 0;
            }
            if done {
                break;
            }
        }
        if r < a.len() && a[r][c] != 0 {
            if a[r][c] < 0 {
                for x in a[r].iter_mut() {
                    *x = -*x;
                }
            }
            pivots.push((r, c));
            r += 1;
        }
    }
    for &(pr, pc) in &pivots {
        let pivot = a[pr].clone();
        for i in 0..pr {
            let q = a[i][pc].div_euclid(pivot[pc]);
            if q != 0 {
                for (x, y) in a[i].iter_mut().zip(&pivot) {
                    *x -= q * y;
                }
            }
        }
    }
    a.truncate(r);
    a.into_iter()
        .map(|row| row.into_iter().map(narrow).collect())
        .collect()
}

/// Basis of `{A ∈ Z^n : B·A = 0}`, Hermite-reduced and sorted
/// lex-descending.
pub fn kernel_basis(b: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    let (m, n) = (b.nrows(), b.ncols());
    let mut a: Vec<Vec<i128>> = b
        .rows()
        .iter()
        .map(|r| r.iter().map(|&x| i128::from(x)).collect())
        .collect();
    // columns of `u` track the unimodular column operations applied to `a`
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();
    let col_sub = |mat: &mut Vec<Vec<i128>>, dst: usize, src: usize, q: i128| -> Result<()> {
        for row in mat.iter_mut() {
            row[dst] = row[dst]
                .checked_sub(q.checked_mul(row[src]).ok_or(Error::Overflow)?)
                .ok_or(Error::Overflow)?;
        }
        Ok(())
    };
    let mut c = 0;
    for i in 0..m {
        loop {
            let nz: Vec<usize> = (c..n).filter(|&j| a[i][j] != 0).collect();
            let Some(&p) = nz.iter().min_by_key(|&&j| a[i][j].abs()) else {
                break;
            };
            for row in a.iter_mut().chain(u.iter_mut()) {
                row.swap(c, p);
            }
            let mut done = true;
            for j in c + 1..n {
                let q = a[i][j].div_euclid(a[i][c]);
                if q != 0 {
                    col_sub(&mut a, j, c, q)?;
                    col_sub(&mut u, j, c, q)?;
                }
                done &= a[i][j] == 0;
            }
            if done {
                break;
            }
        }
        if c < n && a[i][c] != 0 {
            c += 1;
        }
    }
    let kernel: Vec<Vec<i64>> = (c..n)
        .map(|j| u.iter().map(|row| narrow(row[j])).collect())
        .collect::<Result<_>>()?;
    let mut basis = hermite_rows(&kernel)?;
    basis.sort_by(|x, y| y.cmp(x));
    Ok(basis)
}

/// One division step `a = q·b + r` of the Euclidean algorithm, with the
/// number of blow-ups it costs: `q`, or `q − 1` when `r = 0` (the last
/// blow-up would only swap the roles of equal values).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EuclidRound {
    pub quotient: u64,
    pub remainder: u64,
    pub blowups: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EuclidSchedule {
    pub rounds: Vec<EuclidRound>,
    pub gcd: u64,
}

impl EuclidSchedule {
    pub fn total_blowups(&self) -> u64 {
        self.rounds.iter().map(|r| r.blowups).sum()
    }
}

/// Euclid chain of the larger of `d1, d2` divided by the smaller.
pub fn euclid_schedule(d1: u64, d2: u64) -> Result<EuclidSchedule> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::InvalidInput(
            "euclid_schedule needs positive values".into(),
        ));
    }
    let (mut a, mut b) = (d1.max(d2), d1.min(d2));
    let mut rounds = Vec::new();
    loop {
        let (q, r) = (a / b, a % b);
        rounds.push(EuclidRound {
            quotient: q,
            remainder: r,
            blowups: if r == 0 { q - 1 } else { q },
        });
        if r == 0 {
            return Ok(EuclidSchedule { rounds, gcd: b });
        }
        (a, b) = (b, r);
    }
}

/// Ordered product `M_1 · M_2 ⋯ M_k` of `n×n` unimodular matrices; the
/// identity for an empty list.
pub fn compose_transforms(n: usize, steps: &[IntMatrix]) -> Result<IntMatrix> {
    let mut acc = IntMatrix::identity(n);
    for m in steps {
        if !m.is_square() || m.nrows() != n {
            return Err(Error::Dimension(format!("expected {n}x{n} transforms")));
        }
        let det = m.det()?;
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det));
        }
        acc = acc.mul(m)?;
    }
    Ok(acc)
}

/// Exponent matrix of a blow-up: the new `dividend` coordinate is the old
/// dividend divided by the old divisor. Row `j` holds the exponents of new
/// coordinate `j` in the old ones.
pub fn blowup_matrix(n: usize, divisor: usize, dividend: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    m.0[dividend][divisor] = -1;
    m
}

/// Permutation matrix: new coordinate `j` is old coordinate `perm[j]`.
pub fn permutation_matrix(perm: &[usize]) -> IntMatrix {
    let n = perm.len();
    IntMatrix(
        perm.iter()
            .map(|&p| (0..n).map(|j| i64::from(j == p)).collect())
            .collect(),
    )
}
