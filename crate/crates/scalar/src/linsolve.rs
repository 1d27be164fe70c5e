//! Exact sparse Gauss-Jordan elimination over the rational function field.
//!
//! A pivot is usable iff it is not identically zero as a rational function;
//! among usable candidates the smallest expression is chosen to limit swell.

use std::collections::BTreeMap;

use crate::error::ScalarError;
use crate::scalar::{Budget, Scalar};

/// One linear equation `Σ coeffs[j]·x_j = rhs`.
#[derive(Clone, Debug, Default)]
pub struct Equation {
    pub coeffs: BTreeMap<usize, Scalar>,
    pub rhs: Scalar,
}

impl Equation {
    pub fn new() -> Self {
        Equation::default()
    }

    /// Adds `c` to the coefficient of `x_j`.
    pub fn add_term(&mut self, j: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(j).or_default();
        *e = &*e + c;
        if e.is_zero() {
            self.coeffs.remove(&j);
        }
    }

    /// Adds `c` to the right-hand side.
    pub fn add_rhs(&mut self, c: &Scalar) {
        self.rhs = &self.rhs + c;
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Result of solving an affine system.
#[derive(Clone, Debug)]
pub enum AffineSolution {
    /// `particular` solves the system with every free variable set to 0;
    /// `kernel` spans the homogeneous solutions.
    Solved {
        particular: Vec<Scalar>,
        kernel: Vec<Vec<Scalar>>,
    },
    /// The system reduces to `0 = residual` with a nonzero residual.
    Infeasible { residual: Scalar },
}

impl AffineSolution {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, AffineSolution::Infeasible { .. })
    }
}

/// Solves `equations` in `unknowns` variables.
pub fn solve(
    unknowns: usize,
    equations: impl IntoIterator<Item = Equation>,
    budget: &Budget,
) -> Result<AffineSolution, ScalarError> {
    // Reduced rows, each keyed by its pivot column with pivot coefficient 1.
    let mut rows: Vec<(usize, Equation)> = Vec::new();
    // Sparse, small equations first: they make cheap pivots and keep the
    // reduced rows from swelling.
    let mut pending: Vec<Equation> = equations.into_iter().collect();
    pending.sort_by_cached_key(|eq| (eq.coeffs.len(), eq.coeffs.values().map(Scalar::size).sum::<usize>()));
    for mut eq in pending {
        for (col, prow) in &rows {
            if let Some(f) = eq.coeffs.get(col).cloned() {
                axpy(&mut eq, &f, prow, budget)?;
            }
        }
        if eq.is_trivial() {
            if !eq.rhs.is_zero() {
                return Ok(AffineSolution::Infeasible { residual: eq.rhs });
            }
            continue;
        }
        let (&col, _) = eq
            .coeffs
            .iter()
            .min_by_key(|(j, c)| (c.size(), **j))
            .expect("nonempty row");
        let inv = eq.coeffs[&col].recip()?;
        for c in eq.coeffs.values_mut() {
            *c = &*c * &inv;
            budget.check(c)?;
        }
        eq.rhs = &eq.rhs * &inv;
        budget.check(&eq.rhs)?;
        for (_, other) in rows.iter_mut() {
            if let Some(f) = other.coeffs.get(&col).cloned() {
                axpy(other, &f, &eq, budget)?;
            }
        }
        rows.push((col, eq));
    }

    let pivot_cols: BTreeMap<usize, usize> =
        rows.iter().enumerate().map(|(i, (c, _))| (*c, i)).collect();
    let mut particular = vec![Scalar::zero(); unknowns];
    for (col, eq) in &rows {
        particular[*col] = eq.rhs.clone();
    }
    let mut kernel = Vec::new();
    for free in (0..unknowns).filter(|j| !pivot_cols.contains_key(j)) {
        let mut v = vec![Scalar::zero(); unknowns];
        v[free] = Scalar::one();
        for (col, eq) in &rows {
            if let Some(c) = eq.coeffs.get(&free) {
                v[*col] = -c;
            }
        }
        kernel.push(v);
    }
    Ok(AffineSolution::Solved { particular, kernel })
}

/// `eq -= f * pivot_row`.
fn axpy(eq: &mut Equation, f: &Scalar, prow: &Equation, budget: &Budget) -> Result<(), ScalarError> {
    for (j, c) in &prow.coeffs {
        let e = eq.coeffs.entry(*j).or_default();
        *e = &*e - &(f * c);
        budget.check(e)?;
        if e.is_zero() {
            eq.coeffs.remove(j);
        }
    }
    eq.rhs = &eq.rhs - &(f * &prow.rhs);
    budget.check(&eq.rhs)
}

/// Dense square or rectangular matrix of scalars, row-major.
pub type Matrix = Vec<Vec<Scalar>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Basis of `{v : m·v = 0}` over the field.
pub fn nullspace(m: &Matrix, budget: &Budget) -> Result<Vec<Vec<Scalar>>, ScalarError> {
    let cols = m.first().map_or(0, |r| r.len());
    let eqs = m.iter().map(|row| {
        let mut e = Equation::new();
        for (j, c) in row.iter().enumerate() {
            e.add_term(j, c);
        }
        e
    });
    match solve(cols, eqs, budget)? {
        AffineSolution::Solved { kernel, .. } => Ok(kernel),
        AffineSolution::Infeasible { .. } => unreachable!("homogeneous systems are feasible"),
    }
}

pub fn rank(m: &Matrix, budget: &Budget) -> Result<usize, ScalarError> {
    let cols = m.first().map_or(0, |r| r.len());
    Ok(cols - nullspace(m, budget)?.len())
}

/// Inverse of a square matrix, or `DivisionByZero` when singular.
pub fn inverse(m: &Matrix, budget: &Budget) -> Result<Matrix, ScalarError> {
    let n = m.len();
    let mut inv = vec![vec![Scalar::zero(); n]; n];
    for k in 0..n {
        let eqs = m.iter().enumerate().map(|(i, row)| {
            let mut e = Equation::new();
            for (j, c) in row.iter().enumerate() {
                e.add_term(j, c);
            }
            if i == k {
                e.rhs = Scalar::one();
            }
            e
        });
        match solve(n, eqs, budget)? {
            AffineSolution::Solved { particular, kernel } if kernel.is_empty() => {
                for (i, v) in particular.into_iter().enumerate() {
                    inv[i][k] = v;
                }
            }
            _ => return Err(ScalarError::DivisionByZero),
        }
    }
    Ok(inv)
}

/// Determinant by elimination with symbolic-nonzero pivots.
pub fn determinant(m: &Matrix) -> Scalar {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Scalar::one();
    for k in 0..n {
        let Some(p) = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .min_by_key(|&i| a[i][k].size())
        else {
            return Scalar::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let piv = a[k][k].clone();
        det = &det * &piv;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &piv;
            for j in k..n {
                let t = &a[i][j] - &(&f * &a[k][j]);
                a[i][j] = t;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn underdetermined_and_infeasible() {
        // x0 + x1 = 2, x1 - x2 = 1
        let mut e1 = Equation::new();
        e1.add_term(0, &s(1));
        e1.add_term(1, &s(1));
        e1.rhs = s(2);
        let mut e2 = Equation::new();
        e2.add_term(1, &s(1));
        e2.add_term(2, &s(-1));
        e2.rhs = s(1);
        let sol = solve(3, vec![e1.clone(), e2.clone()], &Budget::default()).unwrap();
        let AffineSolution::Solved { particular, kernel } = sol else {
            panic!("expected solution")
        };
        assert_eq!(kernel.len(), 1);
        for v in std::iter::once(&particular) {
            assert_eq!(&v[0] + &v[1], s(2));
            assert_eq!(&v[1] - &v[2], s(1));
        }
        let mut e3 = e1.clone();
        e3.rhs = s(3);
        let bad = solve(3, vec![e1, e3], &Budget::default()).unwrap();
        assert!(bad.is_infeasible());
    }

    #[test]
    fn symbolic_inverse() {
        let x = Scalar::var(0);
        let m = vec![vec![s(1), x.clone()], vec![s(0), x.clone()]];
        let inv = inverse(&m, &Budget::default()).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity(2));
        assert_eq!(determinant(&m), x);
        let sing = vec![vec![x.clone(), x.clone()], vec![s(1), s(1)]];
        assert!(inverse(&sing, &Budget::default()).is_err());
        assert_eq!(rank(&sing, &Budget::default()).unwrap(), 1);
    }
}
