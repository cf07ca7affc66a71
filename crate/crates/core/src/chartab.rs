//! Exact complex character tables of finite groups, computed by Dixon's
//! modular method: simultaneous diagonalization of the class matrices over
//! a prime field `F_p` with `p ≡ 1 (mod exp G)` and `p > 2⌈√|G|⌉`, followed
//! by discrete-Fourier lifting of eigenvalue data to `Q(ζ_e)`.

use num_traits::Zero;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::cyclotomic::Cyclotomic;
use crate::error::Error;
use crate::group::{ConjClass, FiniteGroup};
use crate::linalg::{self, FieldOps, Fp};
use crate::rational::Rational;
use crate::Result;

/// One irreducible character: its degree and one exact value per class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct Irrep {
    pub dim: usize,
    pub values: Vec<Cyclotomic>,
}

/// The full character table of a group. Irreps are sorted by degree, then
/// by the structural order of their value tuples, so identical groups
/// always produce identical tables.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    group: FiniteGroup,
    classes: Vec<ConjClass>,
    class_of: Vec<usize>,
    irreps: Vec<Irrep>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn isqrt_ceil(n: u64) -> u64 {
    let mut r = 0;
    while r * r < n {
        r += 1;
    }
    r
}

fn small_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl CharacterTable {
    /// Runs Dixon's algorithm.
    pub fn compute(group: &FiniteGroup) -> Result<CharacterTable> {
        let g = group;
        let n = g.order();
        let classes = g.conjugacy_classes();
        let r = classes.len();
        let class_of = g.class_map(&classes);
        let class_sizes: Vec<u64> = classes.iter().map(|c| c.size() as u64).collect();
        let inv_class: Vec<usize> =
            classes.iter().map(|c| class_of[g.inv(c.representative)]).collect();
        let e = g.exponent();

        // Modulus: smallest prime ≡ 1 (mod e) exceeding 2⌈√|G|⌉.
        let mut p = e + 1;
        loop {
            if p > 2 * isqrt_ceil(n as u64) && is_prime(p) && (p - 1) % e == 0 {
                break;
            }
            p += if e > 1 { e } else { 1 };
        }
        let fp = Fp { p };

        // Element of multiplicative order exactly e in F_p.
        let e_primes = small_prime_factors(e);
        let mut z = 1u64;
        if e > 1 {
            z = (2..p)
                .map(|h| fp.pow(h, (p - 1) / e))
                .find(|&cand| {
                    cand != 0
                        && fp.pow(cand, e) == 1
                        && e_primes.iter().all(|&q| fp.pow(cand, e / q) != 1)
                })
                .ok_or_else(|| Error::Defect("no element of full order in F_p".into()))?;
        }

        // Structure constants: a[i][j][k] = #{x ∈ C_i : x⁻¹·rep_k ∈ C_j};
        // class matrices M_i with (M_i)[j][k] = a[i][j][k] mod p.
        let mut class_matrices: Vec<Vec<Vec<u64>>> = vec![vec![vec![0; r]; r]; r];
        for (k, ck) in classes.iter().enumerate() {
            let zk = ck.representative;
            for x in 0..n {
                let i = class_of[x];
                let j = class_of[g.mul(g.inv(x), zk)];
                class_matrices[i][j][k] = (class_matrices[i][j][k] + 1) % p;
            }
        }

        // Iterative simultaneous eigenspace splitting.
        let mut spaces: Vec<Vec<Vec<u64>>> =
            vec![(0..r).map(|i| (0..r).map(|j| u64::from(i == j)).collect()).collect()];
        for m in &class_matrices {
            if spaces.iter().all(|s| s.len() == 1) {
                break;
            }
            let mut next = Vec::with_capacity(r);
            for basis in spaces {
                if basis.len() == 1 {
                    next.push(basis);
                    continue;
                }
                next.extend(split_space(m, &basis, &fp)?);
            }
            spaces = next;
        }
        if spaces.iter().any(|s| s.len() != 1) {
            return Err(Error::Defect("class matrices failed to separate characters".into()));
        }

        // Class-of-powers map used by the Fourier lifting.
        let mut pow_class = vec![vec![0usize; e as usize]; r];
        for (k, c) in classes.iter().enumerate() {
            let mut x = 0usize;
            for j in 0..e as usize {
                pow_class[k][j] = class_of[x];
                x = g.mul(x, c.representative);
            }
        }

        let mut irreps = Vec::with_capacity(r);
        for space in &spaces {
            let mut omega = space[0].clone();
            if omega[0] == 0 {
                return Err(Error::Defect("eigenvector vanishes at the identity class".into()));
            }
            let scale = fp.inv(&omega[0]);
            for w in omega.iter_mut() {
                *w = *w * scale % p;
            }
            // Degree from Σ_k ω_k ω_{k'} / c_k = |G| / d².
            let mut s = 0u64;
            for k in 0..r {
                s = (s + omega[k] * omega[inv_class[k]] % p * fp.inv(&class_sizes[k])) % p;
            }
            if s == 0 {
                return Err(Error::Defect("degree sum vanished mod p".into()));
            }
            let d2 = n as u64 % p * fp.inv(&s) % p;
            let dim = (1..=isqrt_ceil(n as u64))
                .find(|&d| d * d % p == d2)
                .ok_or_else(|| Error::Defect("no degree matches mod p".into()))?;

            // Character values mod p: χ(g_k) = d·ω_k / c_k.
            let chi_p: Vec<u64> =
                (0..r).map(|k| dim % p * omega[k] % p * fp.inv(&class_sizes[k]) % p).collect();

            // Fourier lifting: χ(g) = Σ_t m_t ζ_e^t with
            // m_t = (1/e) Σ_j χ(g^j) z^{−jt} mod p, each m_t a true integer.
            let e_inv = fp.inv(&(e % p));
            let z_inv = fp.inv(&z);
            let mut values = Vec::with_capacity(r);
            for k in 0..r {
                let mut poly = vec![Rational::zero(); e as usize];
                let mut total = 0u64;
                for (t, slot) in poly.iter_mut().enumerate() {
                    let mut acc = 0u64;
                    let mut zpow = 1u64; // z^{−jt}
                    let step = fp.pow(z_inv, t as u64);
                    for j in 0..e as usize {
                        acc = (acc + chi_p[pow_class[k][j]] * zpow) % p;
                        zpow = zpow * step % p;
                    }
                    let m_t = acc * e_inv % p;
                    total += m_t;
                    *slot = Rational::from_integer(m_t.into());
                }
                if total != dim {
                    return Err(Error::Defect(
                        "eigenvalue multiplicities do not sum to the degree".into(),
                    ));
                }
                values.push(Cyclotomic::from_poly(e, poly));
            }
            irreps.push(Irrep { dim: dim as usize, values });
        }

        irreps.sort_by(|a, b| {
            a.dim.cmp(&b.dim).then_with(|| {
                for (x, y) in a.values.iter().zip(b.values.iter()) {
                    let c = x.sort_cmp(y);
                    if c != std::cmp::Ordering::Equal {
                        return c;
                    }
                }
                std::cmp::Ordering::Equal
            })
        });

        let table = CharacterTable { group: g.clone(), classes, class_of, irreps };
        table.verify()?;
        Ok(table)
    }

    /// Cross-check mode: wraps externally provided rows and verifies every
    /// table invariant against the group instead of computing.
    pub fn from_rows(group: &FiniteGroup, irreps: Vec<Irrep>) -> Result<CharacterTable> {
        let classes = group.conjugacy_classes();
        let class_of = group.class_map(&classes);
        for row in &irreps {
            if row.values.len() != classes.len() {
                return Err(Error::InvalidInput(
                    "row length differs from the class count".into(),
                ));
            }
        }
        let table = CharacterTable { group: group.clone(), classes, class_of, irreps };
        table.verify()?;
        Ok(table)
    }

    /// Full invariant check: row count, degrees, orthogonality, and the
    /// value at the identity. Used after computation and for externally
    /// provided tables.
    pub fn verify(&self) -> Result<()> {
        let n = self.group.order();
        let r = self.classes.len();
        if self.irreps.len() != r {
            return Err(Error::Defect("irrep count differs from class count".into()));
        }
        let dim_sq: usize = self.irreps.iter().map(|i| i.dim * i.dim).sum();
        if dim_sq != n {
            return Err(Error::Defect("sum of squared degrees misses the group order".into()));
        }
        for irrep in &self.irreps {
            if n % irrep.dim != 0 {
                return Err(Error::Defect("degree does not divide the group order".into()));
            }
            if irrep.values[0] != Cyclotomic::from_int(irrep.dim as i64) {
                return Err(Error::Defect("value at the identity differs from the degree".into()));
            }
        }
        // Row orthogonality: (1/|G|) Σ_g χ_i(g) conj(χ_j(g)) = δ_ij.
        let order = Cyclotomic::from_int(n as i64);
        for (i, a) in self.irreps.iter().enumerate() {
            for (j, b) in self.irreps.iter().enumerate() {
                let mut s = Cyclotomic::zero();
                for (k, class) in self.classes.iter().enumerate() {
                    let term = a.values[k].mul(&b.values[k].conj());
                    s = s.add(&term.scale(&Rational::from_integer((class.size() as i64).into())));
                }
                let expect = if i == j { order.clone() } else { Cyclotomic::zero() };
                if s != expect {
                    return Err(Error::Defect(format!("row orthogonality fails at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn classes(&self) -> &[ConjClass] {
        &self.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn value(&self, irrep: usize, class: usize) -> &Cyclotomic {
        &self.irreps[irrep].values[class]
    }

    pub fn value_at(&self, irrep: usize, element: usize) -> &Cyclotomic {
        &self.irreps[irrep].values[self.class_of[element]]
    }

    /// The scalar by which a central element acts in an irrep:
    /// `α_z = χ(z)/χ(1)`, asserted to satisfy `χ(zg) = α_z χ(g)` for all
    /// `g`; a root of unity of order dividing the order of `z`.
    pub fn central_character(&self, irrep: usize, z: usize) -> Result<Cyclotomic> {
        let g = &self.group;
        if (0..g.order()).any(|x| g.mul(z, x) != g.mul(x, z)) {
            return Err(Error::NotCentral(z));
        }
        let chi = &self.irreps[irrep];
        let dim = Cyclotomic::from_int(chi.dim as i64);
        let alpha = chi.values[self.class_of[z]].div(&dim)?;
        for x in 0..g.order() {
            let lhs = &chi.values[self.class_of[g.mul(z, x)]];
            let rhs = alpha.mul(&chi.values[self.class_of[x]]);
            if *lhs != rhs {
                return Err(Error::Defect("central character fails to scale the row".into()));
            }
        }
        let ord = g.element_order(z) as i64;
        if !alpha.pow(ord)?.is_one() {
            return Err(Error::Defect(
                "central character is not a root of unity of the right order".into(),
            ));
        }
        Ok(alpha)
    }
}

/// Splits `span(basis)` into the eigenspaces of `m` restricted to it.
fn split_space(m: &[Vec<u64>], basis: &[Vec<u64>], fp: &Fp) -> Result<Vec<Vec<Vec<u64>>>> {
    let r = basis[0].len();
    let dim = basis.len();
    let p = fp.p;
    // Restriction R with M·B = B·R, solved column by column.
    let bt: Vec<Vec<u64>> = (0..r).map(|row| (0..dim).map(|c| basis[c][row]).collect()).collect();
    let mut restricted = vec![vec![0u64; dim]; dim];
    for (c, bvec) in basis.iter().enumerate() {
        let mut w = vec![0u64; r];
        for (row, wr) in w.iter_mut().enumerate() {
            let mut acc = 0u64;
            for k in 0..r {
                acc = (acc + m[row][k] * bvec[k]) % p;
            }
            *wr = acc;
        }
        let x = linalg::solve(&bt, &w, fp)
            .ok_or_else(|| Error::Defect("space is not invariant under a class matrix".into()))?;
        for s in 0..dim {
            restricted[s][c] = x[s];
        }
    }
    // Deterministic eigenvalue scan.
    let mut out = Vec::new();
    let mut found = 0usize;
    for lambda in 0..p {
        if found == dim {
            break;
        }
        let shifted: Vec<Vec<u64>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            (restricted[i][j] + p - lambda) % p
                        } else {
                            restricted[i][j]
                        }
                    })
                    .collect()
            })
            .collect();
        let kernel = linalg::nullspace(&shifted, fp);
        if kernel.is_empty() {
            continue;
        }
        found += kernel.len();
        let sub: Vec<Vec<u64>> = kernel
            .iter()
            .map(|coeffs| {
                let mut v = vec![0u64; r];
                for (s, &c) in coeffs.iter().enumerate() {
                    for (row, vr) in v.iter_mut().enumerate() {
                        *vr = (*vr + c * basis[s][row]) % p;
                    }
                }
                v
            })
            .collect();
        out.push(sub);
    }
    if found != dim {
        return Err(Error::Defect("class matrix is not diagonalizable over F_p".into()));
    }
    Ok(out)
}

impl Serialize for CharacterTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct IrrepJson<'a> {
            dim: usize,
            values: &'a [Cyclotomic],
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("classes", &self.classes)?;
        let rows: Vec<IrrepJson> = self
            .irreps
            .iter()
            .map(|i| IrrepJson { dim: i.dim, values: &i.values })
            .collect();
        map.serialize_entry("irreps", &rows)?;
        map.end()
    }
}
