//! Difference-bound matrices over an exact scalar with strict and non-strict bounds.

use std::cmp::Ordering;
use std::fmt;

use crate::scalar::Scalar;

/// An upper bound `≤ c`, `< c` or `< ∞` on a difference of two variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bound<T> {
    Le(T),
    Lt(T),
    Inf,
}

impl<T: Scalar> Bound<T> {
    pub fn le(v: i64) -> Self {
        Bound::Le(T::from_int(v))
    }

    pub fn lt(v: i64) -> Self {
        Bound::Lt(T::from_int(v))
    }

    pub fn zero() -> Self {
        Bound::Le(T::zero())
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            Bound::Le(v) | Bound::Lt(v) => Some(v),
            Bound::Inf => None,
        }
    }

    pub fn is_strict(&self) -> bool {
        !matches!(self, Bound::Le(_))
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Bound::Inf, _) | (_, Bound::Inf) => Bound::Inf,
            (Bound::Le(a), Bound::Le(b)) => Bound::Le(a.clone() + b.clone()),
            (Bound::Le(a), Bound::Lt(b))
            | (Bound::Lt(a), Bound::Le(b))
            | (Bound::Lt(a), Bound::Lt(b)) => Bound::Lt(a.clone() + b.clone()),
        }
    }

    /// The bound with the strictness flipped into non-strict.
    pub fn relaxed(&self) -> Self {
        match self {
            Bound::Lt(v) => Bound::Le(v.clone()),
            b => b.clone(),
        }
    }

    /// Whether `v` satisfies the bound.
    pub fn admits(&self, v: &T) -> bool {
        match self {
            Bound::Le(c) => v <= c,
            Bound::Lt(c) => v < c,
            Bound::Inf => true,
        }
    }
}

impl<T: Scalar> PartialOrd for Bound<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Bound<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Bound::Inf, Bound::Inf) => Ordering::Equal,
            (Bound::Inf, _) => Ordering::Greater,
            (_, Bound::Inf) => Ordering::Less,
            _ => {
                let (a, b) = (self.value().unwrap(), other.value().unwrap());
                a.cmp(b)
                    .then_with(|| self.is_strict().cmp(&other.is_strict()).reverse())
            }
        }
    }
}

impl<T: Scalar> fmt::Display for Bound<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Le(v) => write!(f, "≤{v}"),
            Bound::Lt(v) => write!(f, "<{v}"),
            Bound::Inf => write!(f, "<∞"),
        }
    }
}

/// A square matrix of bounds; entry `(i, j)` bounds `v_i - v_j`. Index 0 is
/// the constant zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dbm<T> {
    dim: usize,
    m: Vec<Bound<T>>,
    empty: bool,
}

impl<T: Scalar> Dbm<T> {
    /// The unconstrained matrix over `dim` entries (including the zero).
    pub fn unconstrained(dim: usize) -> Self {
        let mut m = vec![Bound::Inf; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Bound::zero();
        }
        Dbm {
            dim,
            m,
            empty: false,
        }
    }

    /// The matrix where every variable is non-negative.
    pub fn nonnegative(dim: usize) -> Self {
        let mut d = Self::unconstrained(dim);
        for i in 1..dim {
            d.m[i] = Bound::zero();
        }
        d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn get(&self, i: usize, j: usize) -> &Bound<T> {
        &self.m[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, b: Bound<T>) {
        self.m[i * self.dim + j] = b;
    }

    /// Tightens entry `(i, j)` to `b` without re-closing.
    pub fn constrain(&mut self, i: usize, j: usize, b: Bound<T>) {
        let k = i * self.dim + j;
        if b < self.m[k] {
            self.m[k] = b;
        }
    }

    /// Floyd-Warshall closure. Marks the matrix empty on a negative cycle.
    pub fn close(&mut self) {
        if self.empty {
            return;
        }
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                let ik = self.m[i * n + k].clone();
                if ik == Bound::Inf {
                    continue;
                }
                for j in 0..n {
                    let cand = ik.add(&self.m[k * n + j]);
                    if cand < self.m[i * n + j] {
                        self.m[i * n + j] = cand;
                    }
                }
            }
        }
        if (0..n).any(|i| self.m[i * n + i] < Bound::zero()) {
            self.make_empty();
        }
    }

    /// Replaces the matrix by the canonical empty matrix.
    pub fn make_empty(&mut self) {
        self.empty = true;
        for b in self.m.iter_mut() {
            *b = Bound::Lt(T::zero());
        }
    }

    /// Adds a constraint `v_i - v_j ⋈ c` and re-closes incrementally.
    pub fn and(&mut self, i: usize, j: usize, b: Bound<T>) {
        if self.empty {
            return;
        }
        if b.add(self.get(j, i)) < Bound::zero() {
            self.make_empty();
            return;
        }
        if &b >= self.get(i, j) {
            return;
        }
        self.set(i, j, b);
        let n = self.dim;
        for k in [i, j] {
            for p in 0..n {
                let pk = self.get(p, k).clone();
                if pk == Bound::Inf {
                    continue;
                }
                for q in 0..n {
                    let cand = pk.add(self.get(k, q));
                    if &cand < self.get(p, q) {
                        self.set(p, q, cand);
                    }
                }
            }
        }
        if (0..n).any(|p| self.get(p, p) < &Bound::zero()) {
            self.make_empty();
        }
    }

    /// Whether the assignment (with `vals[0] = 0`) satisfies every entry.
    pub fn admits(&self, vals: &[T]) -> bool {
        if self.empty {
            return false;
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                if !self.get(i, j).admits(&(vals[i].clone() - vals[j].clone())) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_order_puts_strict_first() {
        assert!(Bound::<i64>::lt(3) < Bound::le(3));
        assert!(Bound::<i64>::le(2) < Bound::lt(3));
        assert!(Bound::<i64>::le(100) < Bound::Inf);
        assert_eq!(Bound::<i64>::lt(1).add(&Bound::le(2)), Bound::lt(3));
    }

    #[test]
    fn negative_cycle_is_empty() {
        let mut d = Dbm::<i64>::nonnegative(3);
        d.constrain(1, 2, Bound::le(-1));
        d.constrain(2, 1, Bound::le(0));
        d.close();
        assert!(d.is_empty());

        let mut d = Dbm::<i64>::nonnegative(2);
        d.constrain(1, 0, Bound::lt(0));
        d.close();
        assert!(d.is_empty());
    }

    #[test]
    fn incremental_and_matches_full_closure() {
        let mut a = Dbm::<i64>::nonnegative(3);
        a.close();
        a.and(1, 0, Bound::le(5));
        a.and(2, 1, Bound::lt(-1));
        let mut b = Dbm::<i64>::nonnegative(3);
        b.constrain(1, 0, Bound::le(5));
        b.constrain(2, 1, Bound::lt(-1));
        b.close();
        assert_eq!(a, b);
        assert_eq!(a.get(2, 0), &Bound::lt(4));
    }
}
