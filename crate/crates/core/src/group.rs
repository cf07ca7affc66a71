//! Finite groups as explicit multiplication tables.
//!
//! Elements are dense indices `0..order` with the identity at index 0.
//! Construction validates the full set of group axioms, so everything
//! downstream can assume a genuine group. All derived data (classes,
//! centralizers, quotients) is deterministic: set-valued results are sorted
//! by element index and class representatives are minimal indices.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Default cap on group orders; everything in the test corpus is far below.
pub const DEFAULT_ORDER_CAP: usize = 2000;

/// A finite group presented by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    name: Option<String>,
}

impl FiniteGroup {
    /// Validates and wraps a multiplication table. Index 0 must be a
    /// two-sided identity; associativity and inverses are checked in full.
    pub fn from_table(mul: Vec<Vec<usize>>, name: Option<String>) -> Result<Self> {
        let n = mul.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        for row in &mul {
            if row.len() != n {
                return Err(Error::InvalidGroup("table is not square".into()));
            }
            if row.iter().any(|&x| x >= n) {
                return Err(Error::InvalidGroup("entry out of range".into()));
            }
        }
        for i in 0..n {
            if mul[0][i] != i || mul[i][0] != i {
                return Err(Error::InvalidGroup("index 0 is not a two-sided identity".into()));
            }
        }
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            let Some(b) = (0..n).find(|&b| mul[a][b] == 0 && mul[b][a] == 0) else {
                return Err(Error::InvalidGroup(format!("no inverse for element {a}")));
            };
            inv[a] = b;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup { order: n, mul, inv, name })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = Some(name.into());
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    pub fn conj(&self, g: usize, x: usize) -> usize {
        // x g x⁻¹
        self.mul(self.mul(x, g), self.inv(x))
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        // [a, b] = a b a⁻¹ b⁻¹
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        (0..self.order).fold(1u64, |acc, g| {
            num_integer::lcm(acc, self.element_order(g) as u64)
        })
    }

    pub fn power(&self, g: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(g) } else { g };
        let mut e = k.unsigned_abs();
        let mut acc = 0usize;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a..self.order).all(|b| self.mul[a][b] == self.mul[b][a]))
    }

    /// Conjugacy classes, partitioning all elements, ordered by minimal
    /// representative index.
    pub fn conjugacy_classes(&self) -> Vec<ConjClass> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for g in 0..self.order {
            if seen[g] {
                continue;
            }
            let mut members: Vec<usize> = (0..self.order).map(|x| self.conj(g, x)).collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                seen[m] = true;
            }
            classes.push(ConjClass { representative: members[0], members });
        }
        classes
    }

    /// Index of the class containing each element.
    pub fn class_map(&self, classes: &[ConjClass]) -> Vec<usize> {
        let mut map = vec![usize::MAX; self.order];
        for (i, c) in classes.iter().enumerate() {
            for &m in &c.members {
                map[m] = i;
            }
        }
        map
    }

    /// `{h : hg = gh}`, sorted.
    pub fn centralizer(&self, g: usize) -> Vec<usize> {
        (0..self.order).filter(|&h| self.mul[h][g] == self.mul[g][h]).collect()
    }

    /// The center as a validated central subgroup.
    pub fn center(&self) -> CentralSubgroupData {
        let elements: Vec<usize> = (0..self.order)
            .filter(|&z| (0..self.order).all(|g| self.mul[z][g] == self.mul[g][z]))
            .collect();
        CentralSubgroupData { elements }
    }

    /// Checks that `elements` forms a central subgroup and wraps it.
    pub fn central_subgroup(&self, mut elements: Vec<usize>) -> Result<CentralSubgroupData> {
        elements.sort_unstable();
        elements.dedup();
        if !elements.contains(&0) {
            return Err(Error::InvalidGroup("subgroup misses the identity".into()));
        }
        for &a in &elements {
            if a >= self.order {
                return Err(Error::InvalidGroup("subgroup element out of range".into()));
            }
            if !elements.contains(&self.inv(a)) {
                return Err(Error::InvalidGroup("subgroup not closed under inverses".into()));
            }
            for &b in &elements {
                if !elements.contains(&self.mul(a, b)) {
                    return Err(Error::InvalidGroup("subgroup not closed under products".into()));
                }
            }
            if (0..self.order).any(|g| self.mul[a][g] != self.mul[g][a]) {
                return Err(Error::NotCentral(a));
            }
        }
        Ok(CentralSubgroupData { elements })
    }

    /// Quotient by a central subgroup, with the projection and the
    /// minimal-index section. The section maps the identity coset to 0.
    pub fn central_quotient(&self, a: &CentralSubgroupData) -> Result<QuotientData> {
        // Re-validate (the data may come from another group).
        let a = self.central_subgroup(a.elements.clone())?;
        let mut coset_of = vec![usize::MAX; self.order];
        let mut section = Vec::new();
        for g in 0..self.order {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let k = section.len();
            // g has minimal index in its coset because we scan in order.
            section.push(g);
            for &z in &a.elements {
                coset_of[self.mul(z, g)] = k;
            }
        }
        let m = section.len();
        let mut mul = vec![vec![0usize; m]; m];
        for i in 0..m {
            for j in 0..m {
                mul[i][j] = coset_of[self.mul(section[i], section[j])];
            }
        }
        let quotient = FiniteGroup::from_table(mul, None)?;
        Ok(QuotientData { quotient, projection: coset_of, section })
    }

    /// Direct product; index `(g, h) ↦ g·|H| + h`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Result<FiniteGroup> {
        self.direct_product_capped(other, DEFAULT_ORDER_CAP)
    }

    pub fn direct_product_capped(&self, other: &FiniteGroup, cap: usize) -> Result<FiniteGroup> {
        let n = self.order.checked_mul(other.order).filter(|&n| n <= cap).ok_or_else(|| {
            Error::CapExceeded(format!("product order exceeds cap {cap}"))
        })?;
        let h = other.order;
        let mut mul = vec![vec![0usize; n]; n];
        for g1 in 0..self.order {
            for h1 in 0..h {
                for g2 in 0..self.order {
                    for h2 in 0..h {
                        mul[g1 * h + h1][g2 * h + h2] = self.mul[g1][g2] * h + other.mul[h1][h2];
                    }
                }
            }
        }
        let name = match (&self.name, &other.name) {
            (Some(a), Some(b)) => Some(format!("{a}x{b}")),
            _ => None,
        };
        FiniteGroup::from_table(mul, name)
    }
}

/// A conjugacy class; the representative is the minimal member index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjClass {
    pub representative: usize,
    pub members: Vec<usize>,
}

impl ConjClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// A subgroup whose members all commute with the whole group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralSubgroupData {
    elements: Vec<usize>,
}

impl CentralSubgroupData {
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, g: usize) -> Option<usize> {
        self.elements.binary_search(&g).ok()
    }
}

/// Result of a central quotient: the quotient group `K`, the projection
/// `G → K`, and the minimal-index section `K → G`.
#[derive(Clone, Debug)]
pub struct QuotientData {
    pub quotient: FiniteGroup,
    pub projection: Vec<usize>,
    pub section: Vec<usize>,
}

/// Closure of a set of permutations of `0..degree` under composition,
/// Dimino-style, producing a multiplication table. Element 0 is the
/// identity; the rest follow discovery order.
pub fn permutation_group(degree: usize, generators: &[Vec<usize>], cap: usize) -> Result<FiniteGroup> {
    for g in generators {
        if g.len() != degree {
            return Err(Error::InvalidGroup("generator has wrong degree".into()));
        }
        let mut seen = vec![false; degree];
        for &img in g {
            if img >= degree || seen[img] {
                return Err(Error::InvalidGroup("generator is not a permutation".into()));
            }
            seen[img] = true;
        }
    }
    let identity: Vec<usize> = (0..degree).collect();
    let mut elements: Vec<Vec<usize>> = vec![identity];
    let mut index: std::collections::HashMap<Vec<usize>, usize> = std::collections::HashMap::new();
    index.insert(elements[0].clone(), 0);
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        for g in generators {
            let composed: Vec<usize> = current.iter().map(|&i| g[i]).collect();
            if !index.contains_key(&composed) {
                if elements.len() >= cap {
                    return Err(Error::CapExceeded(format!("closure exceeds cap {cap}")));
                }
                index.insert(composed.clone(), elements.len());
                elements.push(composed);
            }
        }
        frontier += 1;
    }
    let n = elements.len();
    let mut mul = vec![vec![0usize; n]; n];
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            // (a · b)(x) = a(b(x)): apply b first.
            let composed: Vec<usize> = b.iter().map(|&x| a[x]).collect();
            mul[i][j] = index[&composed];
        }
    }
    FiniteGroup::from_table(mul, None)
}

fn cyclic(n: usize) -> FiniteGroup {
    let mut mul = vec![vec![0usize; n]; n];
    for a in 0..n {
        for b in 0..n {
            mul[a][b] = (a + b) % n;
        }
    }
    FiniteGroup::from_table(mul, Some(format!("C{n}"))).expect("cyclic table is a group")
}

/// The order-`p³` Heisenberg group over `Z/p`: triples `(a, b, c)` with
/// `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
fn heisenberg(p: usize) -> FiniteGroup {
    let n = p * p * p;
    let enc = |a: usize, b: usize, c: usize| (a * p + b) * p + c;
    let mut mul = vec![vec![0usize; n]; n];
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for a2 in 0..p {
                    for b2 in 0..p {
                        for c2 in 0..p {
                            mul[enc(a, b, c)][enc(a2, b2, c2)] =
                                enc((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p);
                        }
                    }
                }
            }
        }
    }
    FiniteGroup::from_table(mul, Some(format!("Heis{p}"))).expect("heisenberg table is a group")
}

fn symmetric(n: usize) -> FiniteGroup {
    // Generated by the transposition (0 1) and the n-cycle.
    let mut transposition: Vec<usize> = (0..n).collect();
    transposition.swap(0, 1);
    let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let mut g = permutation_group(n, &[transposition, cycle], DEFAULT_ORDER_CAP)
        .expect("symmetric group generators close");
    g.set_name(format!("S{n}"));
    g
}

fn alternating4() -> FiniteGroup {
    // (0 1)(2 3) and (0 1 2).
    let double = vec![1, 0, 3, 2];
    let three = vec![1, 2, 0, 3];
    let mut g = permutation_group(4, &[double, three], DEFAULT_ORDER_CAP)
        .expect("A4 generators close");
    g.set_name("A4");
    g
}

fn dihedral4() -> FiniteGroup {
    // Symmetries of the square: rotation (0 1 2 3) and a reflection.
    let rot = vec![1, 2, 3, 0];
    let refl = vec![1, 0, 3, 2];
    let mut g = permutation_group(4, &[rot, refl], DEFAULT_ORDER_CAP).expect("D4 generators close");
    g.set_name("D4");
    g
}

fn quaternion8() -> FiniteGroup {
    // Q8 as permutations of {1,-1,i,-i,j,-j,k,-k} by left multiplication by i and j.
    // Order: 1,-1,i,-i,j,-j,k,-k -> indices 0..8.
    // i·(…): 1→i, -1→-i, i→-1, -i→1, j→k, -j→-k, k→-j, -k→j
    let by_i = vec![2, 3, 1, 0, 6, 7, 5, 4];
    // j·(…): 1→j, -1→-j, i→-k, -i→k, j→-1, -j→1, k→i, -k→-i
    let by_j = vec![4, 5, 7, 6, 1, 0, 2, 3];
    let mut g = permutation_group(8, &[by_i, by_j], DEFAULT_ORDER_CAP).expect("Q8 generators close");
    g.set_name("Q8");
    g
}

/// Builds a group from the fixed builtin catalog:
/// `C<n>`, `C<a>xC<b>`, `D4`, `Q8`, `S3`, `S4`, `A4`, `Heis<p>`.
pub fn builtin(name: &str) -> Result<FiniteGroup> {
    let trimmed = name.trim();
    match trimmed {
        "D4" => return Ok(dihedral4()),
        "Q8" => return Ok(quaternion8()),
        "S3" => return Ok(symmetric(3)),
        "S4" => return Ok(symmetric(4)),
        "A4" => return Ok(alternating4()),
        _ => {}
    }
    if let Some(rest) = trimmed.strip_prefix("Heis") {
        let p: usize = rest
            .parse()
            .map_err(|_| Error::InvalidInput(format!("unknown builtin group {name:?}")))?;
        if !(2..=13).contains(&p) {
            return Err(Error::InvalidInput(format!("Heisenberg parameter {p} out of range")));
        }
        return Ok(heisenberg(p));
    }
    if let Some((a, b)) = trimmed.split_once('x') {
        let (ga, gb) = (builtin(a)?, builtin(b)?);
        let mut g = ga.direct_product(&gb)?;
        g.set_name(trimmed);
        return Ok(g);
    }
    if let Some(rest) = trimmed.strip_prefix('C') {
        let n: usize = rest
            .parse()
            .map_err(|_| Error::InvalidInput(format!("unknown builtin group {name:?}")))?;
        if n == 0 || n > DEFAULT_ORDER_CAP {
            return Err(Error::InvalidInput(format!("cyclic order {n} out of range")));
        }
        return Ok(cyclic(n));
    }
    Err(Error::InvalidInput(format!("unknown builtin group {name:?}")))
}

/// Serializable description of how to build a group. Parsing and rebuilding
/// round-trips exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Table {
        #[serde(skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        mul: Vec<Vec<usize>>,
    },
    Permutations {
        #[serde(skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        degree: usize,
        generators: Vec<Vec<usize>>,
    },
    Builtin {
        name: String,
    },
    Product {
        factors: Vec<GroupSpec>,
    },
    Extension {
        coeff: Vec<u64>,
        base: Box<GroupSpec>,
        exponents: Vec<Vec<u64>>,
    },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        self.build_capped(DEFAULT_ORDER_CAP)
    }

    pub fn build_capped(&self, cap: usize) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Table { name, mul } => {
                if mul.len() > cap {
                    return Err(Error::CapExceeded(format!("order exceeds cap {cap}")));
                }
                FiniteGroup::from_table(mul.clone(), name.clone())
            }
            GroupSpec::Permutations { name, degree, generators } => {
                let mut g = permutation_group(*degree, generators, cap)?;
                if let Some(n) = name {
                    g.set_name(n.clone());
                }
                Ok(g)
            }
            GroupSpec::Builtin { name } => builtin(name),
            GroupSpec::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidInput("empty product".into()));
                }
                let mut acc = factors[0].build_capped(cap)?;
                for f in &factors[1..] {
                    acc = acc.direct_product_capped(&f.build_capped(cap)?, cap)?;
                }
                Ok(acc)
            }
            GroupSpec::Extension { coeff, base, exponents } => {
                let k = base.build_capped(cap)?;
                let nu = crate::cocycle::TwoCocycleA::new(k, coeff.clone(), exponents.clone())?;
                let ext = crate::cocycle::build_extension(&nu, cap)?;
                Ok(ext.total)
            }
        }
    }

    /// Accepts `builtin:<name>` or a path to a JSON group spec.
    pub fn parse_cli(arg: &str) -> Result<GroupSpec> {
        if let Some(name) = arg.strip_prefix("builtin:") {
            return Ok(GroupSpec::Builtin { name: name.to_string() });
        }
        let text = std::fs::read_to_string(arg)
            .map_err(|e| Error::InvalidInput(format!("cannot read group file {arg:?}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("bad group JSON: {e}")))
    }
}
