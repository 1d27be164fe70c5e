use leibniz_scalar::linsolve::{determinant, inverse};
use leibniz_scalar::{Budget, Matrix, Scalar, ScalarError};

use crate::algebroid::Algebroid;
use crate::array::SparseArray;
use crate::connection::{Connection, Metric};
use crate::error::{GeomError, Result};

/// A change of local frame `X'_a = A^b_a X_b`, stored as `a[b][a]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameChange {
    a: Matrix,
    ainv: Matrix,
}

impl FrameChange {
    pub fn new(a: Matrix, budget: &Budget) -> Result<Self> {
        let r = a.len();
        if a.iter().any(|row| row.len() != r) {
            return Err(GeomError::Shape("frame matrix must be square".into()));
        }
        if determinant(&a).is_zero() {
            return Err(GeomError::SingularFrame);
        }
        let ainv = inverse(&a, budget).map_err(|e| match e {
            ScalarError::DivisionByZero => GeomError::SingularFrame,
            other => GeomError::Scalar(other),
        })?;
        Ok(FrameChange { a, ainv })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn inverse_matrix(&self) -> &Matrix {
        &self.ainv
    }

    pub fn inverse(&self) -> FrameChange {
        FrameChange {
            a: self.ainv.clone(),
            ainv: self.a.clone(),
        }
    }

    /// The new frame element `X'_a` in old components.
    pub fn column(&self, a: usize) -> Vec<Scalar> {
        self.a.iter().map(|row| row[a].clone()).collect()
    }

    /// Transforms tensor components: the first `contra` slots by `A^{-1}`,
    /// the remaining ones by `A`.
    pub fn tensor(&self, t: &SparseArray, contra: usize) -> SparseArray {
        let slots: Vec<Slot> = (0..t.order())
            .map(|k| if k < contra { Slot::Upper } else { Slot::Lower })
            .collect();
        self.transform(t, &slots)
    }

    /// Transforms each slot according to its variance; `Fixed` slots are
    /// left untouched.
    pub fn transform(&self, t: &SparseArray, slots: &[Slot]) -> SparseArray {
        let mut cur = t.clone();
        for (slot, kind) in slots.iter().enumerate() {
            if *kind == Slot::Fixed {
                continue;
            }
            let mut next = SparseArray::new(t.dims());
            for (idx, v) in cur.iter() {
                let x = idx[slot];
                for z in 0..self.a.len() {
                    // upper: (A^{-1})^z_x T^x; lower: A^x_z T_x.
                    let c = match kind {
                        Slot::Upper => &self.ainv[z][x],
                        _ => &self.a[x][z],
                    };
                    if c.is_zero() {
                        continue;
                    }
                    let mut j = idx.to_vec();
                    j[slot] = z;
                    next.add_to(&j, &(c * v));
                }
            }
            cur = next;
        }
        cur
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Upper,
    Lower,
    Fixed,
}

/// Bundle data expressed in a new frame.
#[derive(Clone, Debug)]
pub struct FrameChanged {
    pub algebroid: Algebroid,
    pub connection: Option<Connection>,
    pub metric: Option<Metric>,
}

/// Re-expresses the algebroid, and optionally a connection and metric, in
/// the frame `X'_a = A^b_a X_b`. Anholonomies are recomputed through the
/// bracket, so they pick up derivative and L terms.
pub fn change_frame(
    alg: &Algebroid,
    fc: &FrameChange,
    conn: Option<&Connection>,
    metric: Option<&Metric>,
    budget: &Budget,
) -> Result<FrameChanged> {
    let r = alg.rank();
    if fc.a.len() != r {
        return Err(GeomError::Shape("frame matrix size differs from rank".into()));
    }
    let (a, ainv) = (&fc.a, &fc.ainv);

    let anchor: Matrix = alg
        .anchor()
        .iter()
        .map(|row| (0..r).map(|c| (0..r).map(|b| &row[b] * &a[b][c]).sum()).collect())
        .collect();
    let cols: Vec<Vec<Scalar>> = (0..r).map(|c| fc.column(c)).collect();
    let mut gamma = SparseArray::new(&[r, r, r]);
    for x in 0..r {
        for y in 0..r {
            let br = alg.bracket(&cols[x], &cols[y])?;
            for c in 0..r {
                let v: Scalar = (0..r).map(|d| &ainv[c][d] * &br[d]).sum();
                budget.check(&v)?;
                gamma.set(&[c, x, y], v);
            }
        }
    }
    let loc = fc.tensor(alg.loc(), 2);
    let proj = alg.proj().map(|p| array_matrix(&fc.tensor(&matrix_array(p), 1), r));
    let algebroid = Algebroid::new(alg.coords().to_vec(), r, anchor, gamma, loc, proj)?;
    let connection = match conn {
        None => None,
        Some(conn) => {
            // Γ'^x_bc = (A^{-1})^x_d [A^e_b ρ_e(A^d_c) + A^e_b A^f_c Γ^d_ef]
            let mut inner = SparseArray::new(&[r, r, r]);
            for b in 0..r {
                let rb = &cols[b];
                for c in 0..r {
                    for d in 0..r {
                        let t = alg.rho_section(rb, &a[d][c]);
                        inner.add_to(&[d, b, c], &t);
                    }
                }
            }
            let lower = fc.transform(conn.coeff(), &[Slot::Fixed, Slot::Lower, Slot::Lower]);
            let out = fc.transform(&inner.add(&lower), &[Slot::Upper, Slot::Fixed, Slot::Fixed]);
            Some(Connection::new(out)?)
        }
    };
    let metric = match metric {
        None => None,
        Some(m) => {
            let t = fc.tensor(&matrix_array(m.g()), 0);
            Some(Metric::new(array_matrix(&t, r), budget)?)
        }
    };
    Ok(FrameChanged {
        algebroid,
        connection,
        metric,
    })
}

fn matrix_array(m: &Matrix) -> SparseArray {
    let r = m.len();
    SparseArray::from_fn(&[r, r], |k| m[k[0]][k[1]].clone())
}

fn array_matrix(t: &SparseArray, r: usize) -> Matrix {
    (0..r).map(|i| (0..r).map(|j| t.get(&[i, j]).clone()).collect()).collect()
}
