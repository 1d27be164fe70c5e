//! Seeded pseudo-random generators for sections, forms and algebroid
//! fixtures. Everything is deterministic in the seed.

use leibniz_scalar::{Budget, Matrix, Monomial, Poly, Rational, Scalar};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebroid::{Algebroid, Section};
use crate::array::{all_indices, increasing_tuples, SparseArray};
use crate::catalog::coordinate_names;
use crate::connection::{bracket_from_connection, l_contraction, Connection, Metric};
use crate::error::Result;
use crate::forms::EForm;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A polynomial in `n` variables of total degree `<= degree` with at most
/// `terms` terms and small integer coefficients.
pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, degree: u32, terms: usize) -> Scalar {
    let mut p = Poly::zero();
    for _ in 0..terms {
        let c = rng.gen_range(-3i64..=3);
        if c == 0 {
            continue;
        }
        let mut exps = vec![0u16; n];
        let mut left = rng.gen_range(0..=degree);
        while left > 0 && n > 0 {
            exps[rng.gen_range(0..n)] += 1;
            left -= 1;
        }
        p = p.add(&Poly::monomial(Monomial::from_exponents(&exps), Rational::from_integer(c)));
    }
    Scalar::from_poly(p)
}

pub fn random_section(rng: &mut ChaCha8Rng, r: usize, n: usize, degree: u32) -> Section {
    (0..r).map(|_| random_poly(rng, n, degree, 2)).collect()
}

pub fn random_sections(seed: u64, count: usize, r: usize, n: usize, degree: u32) -> Vec<Section> {
    let mut g = rng(seed);
    (0..count).map(|_| random_section(&mut g, r, n, degree)).collect()
}

pub fn random_form(rng: &mut ChaCha8Rng, r: usize, p: usize, n: usize, degree: u32) -> EForm {
    EForm::from_fn(r, p, |_| {
        if rng.gen_bool(0.6) {
            random_poly(rng, n, degree, 2)
        } else {
            Scalar::zero()
        }
    })
}

/// A random connection; each entry is nonzero with probability `density`.
pub fn random_connection(rng: &mut ChaCha8Rng, r: usize, n: usize, degree: u32, density: f64) -> Connection {
    let coeff = SparseArray::from_fn(&[r, r, r], |_| {
        if rng.gen_bool(density) {
            random_poly(rng, n, degree, 2)
        } else {
            Scalar::zero()
        }
    });
    Connection::new(coeff).expect("cube")
}

/// A constant symmetric matrix with nonzero determinant.
pub fn random_constant_metric(rng: &mut ChaCha8Rng, r: usize, budget: &Budget) -> Metric {
    loop {
        let mut g: Matrix = vec![vec![Scalar::zero(); r]; r];
        for a in 0..r {
            for b in a..r {
                let v = if a == b {
                    Scalar::from_int(*[-2i64, -1, 1, 2, 3].choose(rng).expect("nonempty"))
                } else if rng.gen_bool(0.4) {
                    Scalar::from_int(rng.gen_range(-1..=1))
                } else {
                    Scalar::zero()
                };
                g[a][b] = v.clone();
                g[b][a] = v;
            }
        }
        if let Ok(m) = Metric::new(g, budget) {
            return m;
        }
    }
}

/// An invertible frame matrix: unit-free triangular with a random
/// nonvanishing diagonal (constants or a coordinate-shifted factor).
pub fn random_frame_matrix(rng: &mut ChaCha8Rng, r: usize, n: usize, degree: u32) -> Matrix {
    let mut a: Matrix = vec![vec![Scalar::zero(); r]; r];
    let upper = rng.gen_bool(0.5);
    for i in 0..r {
        for j in 0..r {
            if i == j {
                a[i][j] = if n > 0 && rng.gen_bool(0.4) {
                    Scalar::var(rng.gen_range(0..n))
                } else {
                    Scalar::from_int(*[-2i64, -1, 1, 2].choose(rng).expect("nonempty"))
                };
            } else if (i < j) == upper && rng.gen_bool(0.5) {
                a[i][j] = random_poly(rng, n, degree, 2);
            }
        }
    }
    a
}

/// A generated algebroid together with a connection and metric on it.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub algebroid: Algebroid,
    pub connection: Connection,
    pub metric: Metric,
}

/// An anti-commutable pre-Leibniz algebroid on `E = TM ⊕ K` with the
/// connection used to build its bracket. The anchor projects onto `TM`,
/// `L` takes values in `K`, `P` projects onto `K`, and the structure
/// functions come from the connection, which is therefore admissible.
pub fn anticommutable_fixture(seed: u64, budget: &Budget) -> Result<Fixture> {
    let mut g = rng(seed);
    let n = g.gen_range(1..=2usize);
    let r = g.gen_range(n + 1..=4usize);
    let coords = coordinate_names(n);
    let mut anchor: Matrix = vec![vec![Scalar::zero(); r]; n];
    for (i, row) in anchor.iter_mut().enumerate() {
        row[i] = Scalar::one();
    }
    let mut proj: Matrix = vec![vec![Scalar::zero(); r]; r];
    for (a, row) in proj.iter_mut().enumerate().skip(n) {
        row[a] = Scalar::one();
    }
    let mut loc = SparseArray::new(&[r; 4]);
    for idx in all_indices(&[r; 4]) {
        if idx[0] >= n && g.gen_bool(0.12) {
            loc.set(&idx, random_poly(&mut g, n, 1, 2));
        }
    }
    let mut coeff = SparseArray::new(&[r, r, r]);
    for idx in all_indices(&[r, r, r]) {
        let (a, b, c) = (idx[0], idx[1], idx[2]);
        if a < n && b > c {
            continue;
        }
        if g.gen_bool(0.35) {
            let v = random_poly(&mut g, n, 2, 2);
            if a < n {
                coeff.set(&[a, c, b], v.clone());
            }
            coeff.set(&idx, v);
        }
    }
    let conn = Connection::new(coeff)?;
    let probe = Algebroid::new(coords.clone(), r, anchor.clone(), SparseArray::new(&[r, r, r]), loc.clone(), Some(proj.clone()))?;
    let gamma = bracket_from_connection(&conn, &l_contraction(&probe, &conn))?;
    let alg = Algebroid::new(coords, r, anchor, gamma, loc, Some(proj))?;
    let metric = random_constant_metric(&mut g, r, budget);
    Ok(Fixture { algebroid: alg, connection: conn, metric })
}

/// An almost-dull algebroid (`L = 0`) whose bracket has a nonzero
/// symmetric part on the frame.
pub fn almost_dull_not_lie(seed: u64) -> Result<Algebroid> {
    let mut g = rng(seed);
    let n = g.gen_range(1..=2usize);
    let r = g.gen_range(1..=3usize);
    let anchor: Matrix = (0..n)
        .map(|_| (0..r).map(|_| random_poly(&mut g, n, 1, 2)).collect())
        .collect();
    let mut gamma = SparseArray::from_fn(&[r, r, r], |_| {
        if g.gen_bool(0.3) {
            random_poly(&mut g, n, 2, 2)
        } else {
            Scalar::zero()
        }
    });
    let (c, a, b) = (g.gen_range(0..r), g.gen_range(0..r), g.gen_range(0..r));
    let bump = Scalar::from_int(g.gen_range(1..=3)) + random_poly(&mut g, n, 1, 1);
    let s = gamma.get(&[c, a, b]) + &bump;
    gamma.set(&[c, a, b], s);
    if a != b {
        let s = gamma.get(&[c, b, a]) + &bump;
        gamma.set(&[c, b, a], s);
    }
    Algebroid::new(coordinate_names(n), r, anchor, gamma, SparseArray::new(&[r; 4]), None)
}

/// An anti-commutable algebroid with arbitrary anchor and `L`, whose bracket
/// is built from a connection that is torsion-free by construction.
pub fn torsion_free_constructible(seed: u64) -> Result<(Algebroid, Connection)> {
    let mut g = rng(seed);
    let n = g.gen_range(1..=2usize);
    let r = g.gen_range(1..=3usize);
    let anchor: Matrix = (0..n)
        .map(|_| (0..r).map(|_| random_poly(&mut g, n, 1, 2)).collect())
        .collect();
    let loc = SparseArray::from_fn(&[r; 4], |_| {
        if g.gen_bool(0.15) {
            random_poly(&mut g, n, 1, 2)
        } else {
            Scalar::zero()
        }
    });
    let conn = random_connection(&mut g, r, n, 2, 0.4);
    let probe = Algebroid::new(coordinate_names(n), r, anchor.clone(), SparseArray::new(&[r, r, r]), loc.clone(), None)?;
    let gamma = bracket_from_connection(&conn, &l_contraction(&probe, &conn))?;
    let alg = Algebroid::new(coordinate_names(n), r, anchor, gamma, loc, None)?;
    Ok((alg, conn))
}

/// Random forms of degrees 0..=max_degree (capped at the rank).
pub fn random_forms(seed: u64, r: usize, n: usize, max_degree: usize, degree: u32) -> Vec<EForm> {
    let mut g = rng(seed);
    (0..=max_degree.min(r))
        .filter(|p| !increasing_tuples(r, *p).is_empty())
        .map(|p| random_form(&mut g, r, p, n, degree))
        .collect()
}

/// Like [`anticommutable_fixture`] but `L` also has a `TM`-valued component
/// whose form slot lies in `K`, so `(1 − P) L ≠ 0` while the algebroid stays
/// pre-Leibniz. The connection is adjusted so the bracket keeps no `TM`
/// structure functions. Needs `rank K ≥ 2`.
pub fn mixed_locality_fixture(seed: u64, budget: &Budget) -> Result<Fixture> {
    let base = anticommutable_fixture(seed, budget)?;
    let mut g = rng(seed ^ 0x9e37_79b9);
    let alg = &base.algebroid;
    let (n, r) = (alg.dim(), alg.rank());
    if r < n + 2 {
        return Err(crate::error::GeomError::InvalidParams("needs rank K >= 2".into()));
    }
    let mut loc = alg.loc().clone();
    for e in n..r {
        for c in e + 1..r {
            let m = Scalar::from_int(*[-2i64, -1, 1, 2].choose(&mut g).expect("nonempty"));
            loc.set(&[0, n, e, c], m.clone());
            loc.set(&[0, n, c, e], -m);
        }
    }
    let mut coeff = base.connection.coeff().clone();
    let phi = random_poly(&mut g, n, 1, 2);
    let phi = if phi.is_zero() { Scalar::one() } else { phi };
    for e in n..r {
        for a in 0..r {
            coeff.set(&[e, n, a], if a == e { phi.clone() } else { Scalar::zero() });
        }
    }
    // Symmetric TM rows shifted by −A/2, where A^0 is antisymmetric.
    let mut coeff_tm = SparseArray::new(&[r, r, r]);
    for (k, v) in coeff.iter() {
        if k[0] < n && k[1] <= k[2] {
            coeff_tm.set(k, v.clone());
            coeff_tm.set(&[k[0], k[2], k[1]], v.clone());
        } else if k[0] >= n {
            coeff_tm.set(k, v.clone());
        }
    }
    let probe = alg.with_loc(loc.clone())?;
    let a = l_contraction(&probe, &Connection::new(coeff_tm.clone())?);
    let half = Rational::new(1, 2);
    for (k, v) in a.iter() {
        if k[0] < n {
            coeff_tm.add_to(k, &-v.scale(&half));
        }
    }
    let conn = Connection::new(coeff_tm)?;
    let gamma = bracket_from_connection(&conn, &l_contraction(&probe, &conn))?;
    let alg = probe.with_gamma(gamma)?;
    Ok(Fixture { algebroid: alg, connection: conn, metric: base.metric })
}
