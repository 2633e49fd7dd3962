//! Sparse exact row reduction over the rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::scalar::Rational;

/// A sparse vector, sorted by column, without zero entries.
pub type SparseVec = Vec<(usize, Rational)>;

/// Rows in echelon form while generators are being inserted; call
/// [`Echelon::into_reduced`] for the reduced row-echelon form.
///
/// Pivot rule: leftmost nonzero column. Each row is normalised so its pivot
/// entry is 1.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ncols: usize,
    /// pivot column -> row
    rows: BTreeMap<usize, SparseVec>,
    reduced: bool,
}

fn to_map(v: &SparseVec) -> BTreeMap<usize, Rational> {
    v.iter().cloned().collect()
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: BTreeMap::new(),
            reduced: true,
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&usize, &SparseVec)> {
        self.rows.iter()
    }

    /// Reduce `v` against the rows; the result has zeros in every pivot
    /// column. With reduced rows it is the canonical normal form of `v`.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut work = to_map(v);
        let mut cursor = 0usize;
        loop {
            let next = work.range(cursor..).next().map(|(&c, _)| c);
            let Some(c) = next else { break };
            cursor = c + 1;
            let Some(row) = self.rows.get(&c) else { continue };
            let coef = work.remove(&c).expect("present");
            for (col, val) in row.iter().skip(1) {
                let e = work.entry(*col).or_insert_with(Rational::zero);
                *e -= &coef * val;
                if e.is_zero() {
                    work.remove(col);
                }
            }
        }
        work.into_iter().collect()
    }

    /// Insert a generator; returns true if the rank grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        if self.is_full() {
            return false;
        }
        let r = self.reduce(v);
        let Some((pivot, lead)) = r.first().cloned() else {
            return false;
        };
        let inv = lead.recip();
        let row: SparseVec = r
            .into_iter()
            .map(|(c, x)| (c, if c == pivot { Rational::one() } else { x * &inv }))
            .collect();
        self.rows.insert(pivot, row);
        self.reduced = false;
        true
    }

    /// Back-substitute so every pivot column is zero outside its own row.
    pub fn into_reduced(mut self) -> Self {
        if self.reduced {
            return self;
        }
        let pivots: Vec<usize> = self.rows.keys().rev().copied().collect();
        for &p in &pivots {
            let prow = self.rows[&p].clone();
            let above: Vec<usize> = self.rows.range(..p).map(|(&c, _)| c).collect();
            for q in above {
                let row = self.rows.get_mut(&q).expect("row");
                let Ok(pos) = row.binary_search_by_key(&p, |(c, _)| *c) else {
                    continue;
                };
                let coef = row[pos].1.clone();
                let mut m = to_map(row);
                for (col, val) in &prow {
                    let e = m.entry(*col).or_insert_with(Rational::zero);
                    *e -= &coef * val;
                    if e.is_zero() {
                        m.remove(col);
                    }
                }
                *row = m.into_iter().collect();
            }
        }
        self.reduced = true;
        self
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn sv(x: &[(usize, i64)]) -> SparseVec {
        x.iter().filter(|(_, v)| *v != 0).map(|&(c, v)| (c, int(v))).collect()
    }

    #[test]
    fn rank_and_membership() {
        let mut e = Echelon::new(3);
        assert!(e.insert(&sv(&[(0, 2), (1, 4)])));
        assert!(e.insert(&sv(&[(0, 1), (1, 2), (2, 1)])));
        assert!(!e.insert(&sv(&[(0, 3), (1, 6), (2, 5)])));
        assert_eq!(e.rank(), 2);
        let e = e.into_reduced();
        assert!(e.reduce(&sv(&[(0, 1), (1, 2)])).is_empty());
        assert_eq!(e.reduce(&sv(&[(1, 1)])), vec![(1, int(1))]);
    }

    #[test]
    fn reduced_rows_are_canonical() {
        let mut e = Echelon::new(3);
        e.insert(&sv(&[(0, 1), (1, 1), (2, 1)]));
        e.insert(&sv(&[(1, 2), (2, 1)]));
        let e = e.into_reduced();
        let rows: Vec<SparseVec> = e.rows().map(|(_, r)| r.clone()).collect();
        assert_eq!(rows[0], vec![(0, int(1)), (2, rat(1, 2))]);
        assert_eq!(rows[1], vec![(1, int(1)), (2, rat(1, 2))]);
    }
}
