//! Canonical-form group arithmetic for Cayley graph generation.

use std::fmt::Debug;
use std::hash::Hash;

use crate::error::BuildError;

pub trait Group: Clone {
    type Elem: Clone + Eq + Hash + Ord + Debug;

    fn identity(&self) -> Self::Elem;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;
    fn render(&self, a: &Self::Elem) -> String;

    /// Brings an element to normal form. Elements produced by `multiply` and
    /// `inverse` are already canonical.
    fn canonicalize(&self, a: Self::Elem) -> Self::Elem {
        a
    }

    fn power(&self, a: &Self::Elem, n: i64) -> Self::Elem {
        let base = if n < 0 { self.inverse(a) } else { a.clone() };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.multiply(&acc, &base);
        }
        acc
    }

    /// `g⁻¹ a g`.
    fn conjugate(&self, a: &Self::Elem, g: &Self::Elem) -> Self::Elem {
        self.multiply(&self.multiply(&self.inverse(g), a), g)
    }

    fn commutes(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.multiply(a, b) == self.multiply(b, a)
    }
}

/// ℤᵈ under addition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerLattice {
    pub dim: usize,
}

impl IntegerLattice {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn unit(&self, k: usize) -> Vec<i64> {
        let mut v = vec![0; self.dim];
        v[k] = 1;
        v
    }
}

impl Group for IntegerLattice {
    type Elem = Vec<i64>;

    fn identity(&self) -> Vec<i64> {
        vec![0; self.dim]
    }

    fn multiply(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn inverse(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }

    fn render(&self, a: &Vec<i64>) -> String {
        let parts: Vec<String> = a.iter().map(i64::to_string).collect();
        format!("({})", parts.join(","))
    }
}

/// Free group on `rank` letters. Elements are freely reduced words; letter
/// `i` is stored as `i + 1` and its inverse as `-(i + 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeGroup {
    pub rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Self {
        Self { rank }
    }

    pub fn letter(&self, i: usize) -> Vec<i32> {
        assert!(i < self.rank, "letter index out of range");
        vec![i as i32 + 1]
    }

    fn reduce_into(out: &mut Vec<i32>, letters: impl IntoIterator<Item = i32>) {
        for x in letters {
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
    }
}

impl Group for FreeGroup {
    type Elem = Vec<i32>;

    fn identity(&self) -> Vec<i32> {
        Vec::new()
    }

    fn multiply(&self, a: &Vec<i32>, b: &Vec<i32>) -> Vec<i32> {
        let mut out = a.clone();
        Self::reduce_into(&mut out, b.iter().copied());
        out
    }

    fn inverse(&self, a: &Vec<i32>) -> Vec<i32> {
        a.iter().rev().map(|x| -x).collect()
    }

    fn canonicalize(&self, a: Vec<i32>) -> Vec<i32> {
        let mut out = Vec::with_capacity(a.len());
        Self::reduce_into(&mut out, a);
        out
    }

    fn render(&self, a: &Vec<i32>) -> String {
        if a.is_empty() {
            return "1".into();
        }
        a.iter()
            .map(|&x| {
                let c = (b'a' + (x.unsigned_abs() - 1) as u8) as char;
                if x > 0 {
                    c.to_string()
                } else {
                    format!("{c}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// ℤ/2 ∗ ℤ/2 as ℤ ⋊ ℤ/2 with normal form `(n, flip)` and
/// `(n,f)(m,g) = (n + (−1)^f m, f ⊕ g)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InfiniteDihedral;

impl InfiniteDihedral {
    pub fn reflection(n: i64) -> (i64, bool) {
        (n, true)
    }
}

impl Group for InfiniteDihedral {
    type Elem = (i64, bool);

    fn identity(&self) -> (i64, bool) {
        (0, false)
    }

    fn multiply(&self, a: &(i64, bool), b: &(i64, bool)) -> (i64, bool) {
        let m = if a.1 { -b.0 } else { b.0 };
        (a.0 + m, a.1 ^ b.1)
    }

    fn inverse(&self, a: &(i64, bool)) -> (i64, bool) {
        if a.1 {
            *a
        } else {
            (-a.0, false)
        }
    }

    fn render(&self, a: &(i64, bool)) -> String {
        format!("({},{})", a.0, u8::from(a.1))
    }
}

/// Discrete Heisenberg group of integer triples,
/// `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Heisenberg;

impl Heisenberg {
    pub const X: (i64, i64, i64) = (1, 0, 0);
    pub const Y: (i64, i64, i64) = (0, 1, 0);
    pub const Z: (i64, i64, i64) = (0, 0, 1);
}

impl Group for Heisenberg {
    type Elem = (i64, i64, i64);

    fn identity(&self) -> Self::Elem {
        (0, 0, 0)
    }

    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (a.0 + b.0, a.1 + b.1, a.2 + b.2 + a.0 * b.1)
    }

    fn inverse(&self, a: &Self::Elem) -> Self::Elem {
        (-a.0, -a.1, -a.2 + a.0 * a.1)
    }

    fn render(&self, a: &Self::Elem) -> String {
        format!("({},{},{})", a.0, a.1, a.2)
    }
}

/// Finite group given by its multiplication table over `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, BuildError> {
        let n = table.len();
        let bad = |m: &str| BuildError::InvalidParameter(format!("multiplication table: {m}"));
        if n == 0 || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(bad("must be square with entries in range"));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| bad("no identity"))?;
        let mut inverses = Vec::with_capacity(n);
        for x in 0..n {
            let inv = (0..n).find(|&y| table[x][y] == identity).ok_or_else(|| bad("missing inverse"))?;
            inverses.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(bad("not associative"));
                    }
                }
            }
        }
        Ok(Self { table, identity, inverses })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(table).expect("cyclic table is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        let n = self.order();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
            return false;
        }
        (0..n).all(|a| (0..n).all(|b| perm[self.mul(a, b)] == self.mul(perm[a], perm[b])))
    }
}

/// Semidirect product F ⋊ ℤᵈ of a finite group with a lattice, where the
/// k-th unit vector acts on F by the automorphism `actions[k]`. Trivial
/// actions give the direct product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteByLattice {
    finite: FiniteGroup,
    actions: Vec<Vec<usize>>,
    inverse_actions: Vec<Vec<usize>>,
}

impl FiniteByLattice {
    pub fn new(finite: FiniteGroup, actions: Vec<Vec<usize>>) -> Result<Self, BuildError> {
        if actions.is_empty() {
            return Err(BuildError::InvalidParameter("lattice rank must be at least 1".into()));
        }
        for phi in &actions {
            if !finite.is_automorphism(phi) {
                return Err(BuildError::InvalidParameter("action is not an automorphism".into()));
            }
        }
        for p in &actions {
            for q in &actions {
                if (0..finite.order()).any(|x| p[q[x]] != q[p[x]]) {
                    return Err(BuildError::InvalidParameter("actions must commute".into()));
                }
            }
        }
        let inverse_actions = actions
            .iter()
            .map(|phi| {
                let mut inv = vec![0; phi.len()];
                for (x, &y) in phi.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect();
        Ok(Self { finite, actions, inverse_actions })
    }

    pub fn direct(finite: FiniteGroup, dim: usize) -> Self {
        let id: Vec<usize> = (0..finite.order()).collect();
        Self::new(finite, vec![id; dim]).expect("identity actions are valid")
    }

    pub fn finite(&self) -> &FiniteGroup {
        &self.finite
    }

    pub fn dim(&self) -> usize {
        self.actions.len()
    }

    /// Applies the action of `v ∈ ℤᵈ` to `f`.
    pub fn act(&self, v: &[i64], mut f: usize) -> usize {
        for (k, &n) in v.iter().enumerate() {
            let perm = if n >= 0 { &self.actions[k] } else { &self.inverse_actions[k] };
            for _ in 0..n.unsigned_abs() {
                f = perm[f];
            }
        }
        f
    }

    /// The finite normal subgroup F × {0}.
    pub fn normal_subgroup(&self) -> Vec<(usize, Vec<i64>)> {
        (0..self.finite.order()).map(|f| (f, vec![0; self.dim()])).collect()
    }
}

impl Group for FiniteByLattice {
    type Elem = (usize, Vec<i64>);

    fn identity(&self) -> Self::Elem {
        (self.finite.identity_index(), vec![0; self.dim()])
    }

    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let f = self.finite.mul(a.0, self.act(&a.1, b.0));
        (f, a.1.iter().zip(&b.1).map(|(x, y)| x + y).collect())
    }

    fn inverse(&self, a: &Self::Elem) -> Self::Elem {
        let neg: Vec<i64> = a.1.iter().map(|x| -x).collect();
        (self.act(&neg, self.finite.inv(a.0)), neg)
    }

    fn render(&self, a: &Self::Elem) -> String {
        let parts: Vec<String> = a.1.iter().map(i64::to_string).collect();
        format!("({};{})", a.0, parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn heis_matrix(a: (i64, i64, i64)) -> [[i64; 3]; 3] {
        [[1, a.0, a.2], [0, 1, a.1], [0, 0, 1]]
    }

    fn mat_mul(p: [[i64; 3]; 3], q: [[i64; 3]; 3]) -> [[i64; 3]; 3] {
        let mut r = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = (0..3).map(|k| p[i][k] * q[k][j]).sum();
            }
        }
        r
    }

    fn check_laws<G: Group>(g: &G, a: &G::Elem, b: &G::Elem, c: &G::Elem) {
        assert_eq!(g.multiply(&g.multiply(a, b), c), g.multiply(a, &g.multiply(b, c)));
        assert_eq!(g.multiply(a, &g.inverse(a)), g.identity());
        assert_eq!(g.multiply(&g.inverse(a), a), g.identity());
        assert_eq!(g.canonicalize(g.canonicalize(a.clone())), g.canonicalize(a.clone()));
    }

    fn free_word() -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec(prop_oneof![Just(1), Just(-1), Just(2), Just(-2), Just(3), Just(-3)], 0..8)
            .prop_map(|w| FreeGroup::new(3).canonicalize(w))
    }

    fn z3_by_z() -> FiniteByLattice {
        FiniteByLattice::new(FiniteGroup::cyclic(3), vec![vec![0, 2, 1]]).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn heisenberg_laws(a in (-9i64..9, -9i64..9, -9i64..9), b in (-9i64..9, -9i64..9, -9i64..9), c in (-9i64..9, -9i64..9, -9i64..9)) {
            check_laws(&Heisenberg, &a, &b, &c);
        }

        #[test]
        fn dihedral_laws(a in (-9i64..9, any::<bool>()), b in (-9i64..9, any::<bool>()), c in (-9i64..9, any::<bool>())) {
            check_laws(&InfiniteDihedral, &a, &b, &c);
        }

        #[test]
        fn free_laws(a in free_word(), b in free_word(), c in free_word()) {
            check_laws(&FreeGroup::new(3), &a, &b, &c);
        }

        #[test]
        fn lattice_laws(a in prop::collection::vec(-9i64..9, 3), b in prop::collection::vec(-9i64..9, 3), c in prop::collection::vec(-9i64..9, 3)) {
            check_laws(&IntegerLattice::new(3), &a, &b, &c);
        }

        #[test]
        fn semidirect_laws(a in (0usize..3, -5i64..5), b in (0usize..3, -5i64..5), c in (0usize..3, -5i64..5)) {
            let g = z3_by_z();
            let e = |x: (usize, i64)| (x.0, vec![x.1]);
            check_laws(&g, &e(a), &e(b), &e(c));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn heisenberg_matches_matrices(a in (-20i64..20, -20i64..20, -20i64..20), b in (-20i64..20, -20i64..20, -20i64..20)) {
            let prod = Heisenberg.multiply(&a, &b);
            prop_assert_eq!(heis_matrix(prod), mat_mul(heis_matrix(a), heis_matrix(b)));
        }
    }

    #[test]
    fn free_reduction() {
        let g = FreeGroup::new(2);
        assert_eq!(g.canonicalize(vec![1, 2, -2]), vec![1]);
        assert_eq!(g.render(&vec![1, -2]), "a b^-1");
    }

    #[test]
    fn heisenberg_commutator_is_central() {
        let h = Heisenberg;
        let (x, y) = (Heisenberg::X, Heisenberg::Y);
        let comm = h.multiply(&h.multiply(&h.multiply(&x, &y), &h.inverse(&x)), &h.inverse(&y));
        assert_eq!(comm, Heisenberg::Z);
        assert!(h.commutes(&Heisenberg::Z, &x) && h.commutes(&Heisenberg::Z, &y));
    }

    #[test]
    fn dihedral_reflections_have_order_two() {
        let d = InfiniteDihedral;
        for n in -3..3 {
            let r = InfiniteDihedral::reflection(n);
            assert_eq!(d.multiply(&r, &r), d.identity());
        }
        let t = d.multiply(&(0, true), &(1, true));
        assert_eq!(t, (-1, false));
    }

    #[test]
    fn semidirect_action_inverts() {
        let g = z3_by_z();
        let t = (0usize, vec![1i64]);
        let f = (1usize, vec![0i64]);
        assert_eq!(g.conjugate(&f, &t), (2, vec![0]));
        assert_eq!(g.conjugate(&f, &g.power(&t, 2)), (1, vec![0]));
    }

    #[test]
    fn finite_table_validation() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert_eq!(FiniteGroup::cyclic(4).inv(1), 3);
        let z3 = FiniteGroup::cyclic(3);
        assert!(FiniteByLattice::new(z3, vec![vec![1, 2, 0]]).is_err());
    }
}
