use std::collections::BTreeMap;

use leibniz_scalar::{Rational, Scalar};

/// Sparse multi-index array of scalars. Absent entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseArray {
    dims: Vec<usize>,
    data: BTreeMap<Vec<usize>, Scalar>,
}

impl SparseArray {
    pub fn new(dims: &[usize]) -> Self {
        SparseArray {
            dims: dims.to_vec(),
            data: BTreeMap::new(),
        }
    }

    /// Builds a cube `[r; order]` from a function of the index tuple.
    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> Scalar) -> Self {
        let mut out = SparseArray::new(dims);
        for idx in all_indices(dims) {
            let v = f(&idx);
            out.set(&idx, v);
        }
        out
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn in_range(&self, idx: &[usize]) -> bool {
        idx.len() == self.dims.len() && idx.iter().zip(&self.dims).all(|(i, d)| i < d)
    }

    pub fn get(&self, idx: &[usize]) -> &Scalar {
        debug_assert!(self.in_range(idx), "index {idx:?} out of range {:?}", self.dims);
        self.data.get(idx).unwrap_or_else(|| Scalar::zero_ref())
    }

    pub fn set(&mut self, idx: &[usize], v: Scalar) {
        assert!(self.in_range(idx), "index {idx:?} out of range {:?}", self.dims);
        if v.is_zero() {
            self.data.remove(idx);
        } else {
            self.data.insert(idx.to_vec(), v);
        }
    }

    pub fn add_to(&mut self, idx: &[usize], v: &Scalar) {
        if v.is_zero() {
            return;
        }
        let cur = self.get(idx);
        let next = cur + v;
        self.set(idx, next);
    }

    /// Nonzero entries in lexicographic index order.
    pub fn iter(&self) -> impl Iterator<Item = (&[usize], &Scalar)> {
        self.data.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn is_zero(&self) -> bool {
        self.data.is_empty()
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> SparseArray {
        let mut out = SparseArray::new(&self.dims);
        for (k, v) in &self.data {
            out.set(k, f(v));
        }
        out
    }

    pub fn add(&self, other: &SparseArray) -> SparseArray {
        assert_eq!(self.dims, other.dims, "shape mismatch");
        let mut out = self.clone();
        for (k, v) in &other.data {
            out.add_to(k, v);
        }
        out
    }

    pub fn sub(&self, other: &SparseArray) -> SparseArray {
        self.add(&other.scale(&Rational::from_integer(-1)))
    }

    pub fn scale(&self, c: &Rational) -> SparseArray {
        self.map(|v| v.scale(c))
    }

    pub fn mul_scalar(&self, c: &Scalar) -> SparseArray {
        self.map(|v| v * c)
    }

    /// Reorders indices so that slot `k` of the result is slot `perm[k]` of
    /// the input.
    pub fn permuted(&self, perm: &[usize]) -> SparseArray {
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut out = SparseArray::new(&dims);
        for (k, v) in &self.data {
            let nk: Vec<usize> = perm.iter().map(|&p| k[p]).collect();
            out.set(&nk, v.clone());
        }
        out
    }
}

/// Every index tuple of the given shape, in lexicographic order.
pub fn all_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &d in dims {
        let mut next = Vec::with_capacity(out.len() * d);
        for prefix in &out {
            for i in 0..d {
                let mut p = prefix.clone();
                p.push(i);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Strictly increasing `p`-tuples drawn from `0..r`.
pub fn increasing_tuples(r: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, r: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..r {
            cur.push(i);
            rec(i + 1, r, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, r, p, &mut Vec::new(), &mut out);
    out
}

/// Sorts a tuple, returning the permutation sign, or `None` on a repeat.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_storage_drops_zeros() {
        let mut a = SparseArray::new(&[2, 2]);
        a.set(&[0, 1], Scalar::from_int(3));
        a.add_to(&[0, 1], &Scalar::from_int(-3));
        assert!(a.is_zero());
        a.set(&[1, 0], Scalar::var(0));
        assert_eq!(a.permuted(&[1, 0]).get(&[0, 1]), &Scalar::var(0));
    }

    #[test]
    fn tuple_helpers() {
        assert_eq!(increasing_tuples(4, 2).len(), 6);
        assert_eq!(all_indices(&[2, 3]).len(), 6);
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(sort_with_sign(&[1, 0]), Some((vec![0, 1], -1)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }
}
