//! Exact descendant integrals `⟨τ_{a_1}⋯τ_{a_n}⟩_g` on the moduli space of
//! stable curves, by the Dijkgraaf-Verlinde-Verlinde recursion with base
//! constants `⟨τ_0³⟩_0 = 1` and `⟨τ_1⟩_1 = 1/24`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::rational::Rational;
use crate::Result;

/// A genus together with a multiset of descendant exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PsiSpec {
    pub genus: usize,
    pub exponents: Vec<usize>,
}

impl PsiSpec {
    pub fn new(genus: usize, mut exponents: Vec<usize>) -> Self {
        exponents.sort_unstable();
        PsiSpec { genus, exponents }
    }

    pub fn points(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_stable(&self) -> bool {
        self.points() >= 1 && 2 * self.genus + self.points() > 2
    }

    /// The complex dimension of the target moduli space.
    pub fn dimension(&self) -> usize {
        3 * self.genus + self.points() - 3
    }
}

/// Memoizing evaluator. Results are identical regardless of query
/// interleaving; the cache only ever stores final values.
pub struct PsiCache {
    memo: Mutex<HashMap<(usize, Vec<usize>), Rational>>,
    entry_cap: usize,
}

impl Default for PsiCache {
    fn default() -> Self {
        PsiCache::new(1 << 20)
    }
}

fn double_factorial(k: i64) -> BigInt {
    // (2m+1)!! for k = 2m+1 ≥ -1; (-1)!! = 1.
    let mut acc = BigInt::one();
    let mut i = k;
    while i > 1 {
        acc *= i;
        i -= 2;
    }
    acc
}

fn df_rat(k: i64) -> Rational {
    Rational::from_integer(double_factorial(k))
}

impl PsiCache {
    pub fn new(entry_cap: usize) -> Self {
        PsiCache { memo: Mutex::new(HashMap::new()), entry_cap }
    }

    /// `⟨τ_{a_1}⋯τ_{a_n}⟩_g`, exactly. Errors on unstable `(g, n)`.
    pub fn integral(&self, spec: &PsiSpec) -> Result<Rational> {
        if !spec.is_stable() {
            return Err(Error::Unstable { genus: spec.genus, points: spec.points() });
        }
        Ok(self.eval(spec.genus, {
            let mut a = spec.exponents.clone();
            a.sort_unstable();
            a
        }))
    }

    /// Same value, but expanding the recursion at the given index of the
    /// (sorted) exponent list rather than at the largest exponent. The
    /// chosen exponent must be positive. Used to cross-check the recursion.
    /// The base cases `(g,n) ∈ {(0,3),(1,1)}` have no recursion step to
    /// vary and evaluate directly.
    pub fn integral_with_pivot(&self, spec: &PsiSpec, pivot: usize) -> Result<Rational> {
        if !spec.is_stable() {
            return Err(Error::Unstable { genus: spec.genus, points: spec.points() });
        }
        let mut a = spec.exponents.clone();
        a.sort_unstable();
        if pivot >= a.len() {
            return Err(Error::InvalidInput("pivot index out of range".into()));
        }
        let total: usize = a.iter().sum();
        if total != 3 * spec.genus + a.len() - 3 {
            return Ok(Rational::zero());
        }
        if (spec.genus == 0 && a.len() == 3) || (spec.genus == 1 && a.len() == 1) {
            return Ok(self.eval(spec.genus, a));
        }
        if a[pivot] == 0 {
            return Err(Error::InvalidInput("pivot exponent must be positive".into()));
        }
        let head = a.remove(pivot);
        Ok(self.dvv_step(spec.genus, head, &a))
    }

    fn eval(&self, g: usize, sorted: Vec<usize>) -> Rational {
        let n = sorted.len();
        debug_assert!(n >= 1 && 2 * g + n > 2);
        // Dimension gate.
        let total: usize = sorted.iter().sum();
        if total != 3 * g + n - 3 {
            return Rational::zero();
        }
        if let Some(hit) = self.memo.lock().unwrap().get(&(g, sorted.clone())) {
            return hit.clone();
        }
        let value = if g == 0 && n == 3 {
            // ⟨τ_0³⟩_0 = 1 (total degree 0 forces all exponents 0).
            Rational::one()
        } else if g == 1 && n == 1 {
            // ⟨τ_1⟩_1 = 1/24.
            Rational::new(BigInt::one(), BigInt::from(24))
        } else {
            // Recurse on the largest exponent; it is positive here, since a
            // zero maximum forces total degree 0, handled above.
            let mut rest = sorted.clone();
            let head = rest.pop().expect("nonempty");
            debug_assert!(head > 0);
            self.dvv_step(g, head, &rest)
        };
        let mut memo = self.memo.lock().unwrap();
        if memo.len() < self.entry_cap {
            memo.insert((g, sorted), value.clone());
        }
        value
    }

    /// Evaluates `⟨τ_head ∏ τ_{rest}⟩_g` by one application of the DVV
    /// recursion on `τ_head` (`head ≥ 1`), dividing by `(2·head+1)!!`.
    fn dvv_step(&self, g: usize, head: usize, rest: &[usize]) -> Rational {
        let mut sum = Rational::zero();
        // Contraction with each remaining insertion.
        for (j, &aj) in rest.iter().enumerate() {
            let coeff = df_rat(2 * (head as i64 + aj as i64) - 1) / df_rat(2 * aj as i64 - 1);
            let mut sub: Vec<usize> = Vec::with_capacity(rest.len());
            sub.extend(rest.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &a)| a));
            sub.push(head + aj - 1);
            sub.sort_unstable();
            if 2 * g + sub.len() > 2 {
                sum += coeff * self.eval(g, sub);
            }
        }
        // Splitting terms exist only for head ≥ 2.
        if head >= 2 {
            let mut split_sum = Rational::zero();
            for b in 0..=(head - 2) {
                let c = head - 2 - b;
                let weight = df_rat(2 * b as i64 + 1) * df_rat(2 * c as i64 + 1);
                // Nonseparating: genus drops by one.
                if g >= 1 {
                    let mut sub: Vec<usize> = rest.to_vec();
                    sub.push(b);
                    sub.push(c);
                    sub.sort_unstable();
                    if 2 * (g - 1) + sub.len() > 2 {
                        split_sum += weight.clone() * self.eval(g - 1, sub);
                    }
                }
                // Separating: split the genus and the remaining insertions.
                for g1 in 0..=g {
                    let g2 = g - g1;
                    for mask in 0..(1u64 << rest.len()) {
                        let mut left = vec![b];
                        let mut right = vec![c];
                        for (i, &a) in rest.iter().enumerate() {
                            if mask >> i & 1 == 1 {
                                left.push(a);
                            } else {
                                right.push(a);
                            }
                        }
                        if 2 * g1 + left.len() <= 2 || 2 * g2 + right.len() <= 2 {
                            continue;
                        }
                        left.sort_unstable();
                        right.sort_unstable();
                        split_sum +=
                            weight.clone() * self.eval(g1, left) * self.eval(g2, right);
                    }
                }
            }
            sum += split_sum / Rational::from_integer(BigInt::from(2));
        }
        sum / df_rat(2 * head as i64 + 1)
    }
}

/// Evaluates against a process-wide shared cache.
pub fn psi_integral(spec: &PsiSpec) -> Result<Rational> {
    use std::sync::OnceLock;
    static GLOBAL: OnceLock<PsiCache> = OnceLock::new();
    GLOBAL.get_or_init(PsiCache::default).integral(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn psi(g: usize, a: &[usize]) -> Rational {
        psi_integral(&PsiSpec::new(g, a.to_vec())).unwrap()
    }

    #[test]
    fn base_values() {
        assert_eq!(psi(0, &[0, 0, 0]), rat_int(1));
        assert_eq!(psi(1, &[1]), rat(1, 24));
        assert_eq!(psi(0, &[1, 0, 0, 0]), rat_int(1));
        assert_eq!(psi(2, &[4]), rat(1, 1152));
        assert_eq!(psi(1, &[0, 2]), rat(1, 24));
    }

    #[test]
    fn classical_table_spot_checks() {
        assert_eq!(psi(0, &[0, 0, 0, 1, 1]), rat_int(2));
        assert_eq!(psi(0, &[0, 0, 0, 0, 2]), rat_int(1));
        assert_eq!(psi(1, &[1, 1]), rat(1, 24));
        assert_eq!(psi(2, &[0, 5]), rat(1, 1152));
        assert_eq!(psi(2, &[1, 4]), rat(1, 384));
        assert_eq!(psi(2, &[2, 3]), rat(29, 5760));
        assert_eq!(psi(3, &[7]), rat(1, 82944));
    }

    #[test]
    fn dimension_gate() {
        assert_eq!(psi(1, &[0]), rat_int(0));
        assert_eq!(psi(0, &[2, 0, 0]), rat_int(0));
        assert_eq!(psi(2, &[3]), rat_int(0));
    }

    #[test]
    fn unstable_error() {
        for (g, a) in [(0usize, vec![0usize]), (0, vec![0, 0])] {
            assert!(matches!(
                psi_integral(&PsiSpec::new(g, a)),
                Err(Error::Unstable { .. })
            ));
        }
    }

    #[test]
    fn symmetric_in_exponents() {
        assert_eq!(psi(1, &[2, 0]), psi(1, &[0, 2]));
        assert_eq!(psi(0, &[1, 0, 0, 0]), psi(0, &[0, 0, 1, 0]));
    }

    fn enumerate_tuples(n: usize, total: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in 0..=total {
            for mut rest in enumerate_tuples(n - 1, total - first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }

    #[test]
    fn string_and_dilaton_identities() {
        for g in 0..=3usize {
            for n in 1..=5usize {
                if 2 * g + n <= 2 {
                    continue;
                }
                let dim = 3 * g + n - 3;
                if dim > 12 {
                    continue;
                }
                for a in enumerate_tuples(n, dim) {
                    // String: ⟨τ_0 ∏τ_{a_i}⟩ = Σ_j ⟨τ_{a_j−1}∏rest⟩.
                    let mut with_zero = a.clone();
                    with_zero.push(0);
                    let lhs = psi(g, &with_zero);
                    let mut rhs = Rational::zero();
                    for j in 0..a.len() {
                        if a[j] >= 1 {
                            let mut sub = a.clone();
                            sub[j] -= 1;
                            rhs += psi(g, &sub);
                        }
                    }
                    assert_eq!(lhs, rhs, "string fails at g={g}, a={a:?}");
                    // Dilaton: ⟨τ_1 ∏τ_{a_i}⟩ = (2g−2+n)⟨∏τ_{a_i}⟩.
                    let mut with_one = a.clone();
                    with_one.push(1);
                    let lhs = psi(g, &with_one);
                    let factor = rat_int(2 * g as i64 - 2 + n as i64);
                    assert_eq!(lhs, factor * psi(g, &a), "dilaton fails at g={g}, a={a:?}");
                }
            }
        }
    }

    #[test]
    fn pivot_overdetermination() {
        let cache = PsiCache::default();
        let specs = vec![
            PsiSpec::new(1, vec![1, 1]),
            PsiSpec::new(1, vec![2, 0]),
            PsiSpec::new(2, vec![2, 2]),
            PsiSpec::new(2, vec![3, 1]),
            PsiSpec::new(0, vec![2, 1, 0, 0, 0]),
            PsiSpec::new(3, vec![5, 2]),
        ];
        for spec in specs {
            let reference = cache.integral(&spec).unwrap();
            for p in 0..spec.exponents.len() {
                if spec.exponents[p] == 0 {
                    continue;
                }
                let alt = cache.integral_with_pivot(&spec, p).unwrap();
                assert_eq!(alt, reference, "pivot {p} disagrees on {spec:?}");
            }
        }
    }

    #[test]
    fn concurrent_queries_match_sequential() {
        use std::sync::Arc;
        let sequential: Vec<Rational> = (0..=3usize)
            .flat_map(|g| (1..=4usize).map(move |k| (g, k)))
            .filter(|&(g, k)| 2 * g + k > 2)
            .map(|(g, k)| {
                let a: Vec<usize> = (0..k).map(|i| (3 * g + k - 3) / k + usize::from(i < (3 * g + k - 3) % k)).collect();
                PsiCache::default().integral(&PsiSpec::new(g, a)).unwrap()
            })
            .collect();
        let shared = Arc::new(PsiCache::default());
        let mut handles = Vec::new();
        for t in 0..4 {
            let cache = Arc::clone(&shared);
            handles.push(std::thread::spawn(move || {
                let mut out = Vec::new();
                let specs: Vec<(usize, usize)> = (0..=3usize)
                    .flat_map(|g| (1..=4usize).map(move |k| (g, k)))
                    .filter(|&(g, k)| 2 * g + k > 2)
                    .collect();
                // Different threads walk in different orders.
                let n = specs.len();
                for i in 0..n {
                    let (g, k) = specs[(i * (t + 1)) % n];
                    let a: Vec<usize> = (0..k)
                        .map(|i| (3 * g + k - 3) / k + usize::from(i < (3 * g + k - 3) % k))
                        .collect();
                    out.push(((g, k), cache.integral(&PsiSpec::new(g, a)).unwrap()));
                }
                out
            }));
        }
        let specs: Vec<(usize, usize)> = (0..=3usize)
            .flat_map(|g| (1..=4usize).map(move |k| (g, k)))
            .filter(|&(g, k)| 2 * g + k > 2)
            .collect();
        for handle in handles {
            for ((g, k), value) in handle.join().unwrap() {
                let idx = specs.iter().position(|&s| s == (g, k)).unwrap();
                assert_eq!(value, sequential[idx]);
            }
        }
    }

    #[test]
    fn dilaton_validates_base_constant() {
        // ⟨τ_1τ_1⟩_1 computed by the recursion equals the dilaton prediction
        // (2g−2+n)·⟨τ_1⟩_1, tying the 1/24 base constant down twice.
        assert_eq!(psi(1, &[1, 1]), rat(1, 24));
    }
}
