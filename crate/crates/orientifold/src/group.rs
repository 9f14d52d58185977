//! Finite symmetry groups with an orientation character.
//!
//! An [`OrientifoldGroup`] is a finite group given by its multiplication
//! table together with a character `epsilon: G -> {+1, -1}` recording which
//! elements reverse orientation.  Everything downstream (twisted cochains,
//! equivariant local data, descent) consumes this table form; construction
//! re-checks all the axioms so a hand-edited JSON table cannot smuggle in a
//! non-group.

use serde::{Deserialize, Serialize};

use crate::phase::Phase;

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("group table is not square or is empty")]
    BadShape,
    #[error("table entry {0} out of range")]
    EntryOutOfRange(usize),
    #[error("no identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("multiplication is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("epsilon must take values +1 or -1")]
    BadEpsilonValue,
    #[error("epsilon is not a homomorphism at ({0}, {1})")]
    EpsilonNotHom(usize, usize),
    #[error("element names must be distinct and match the table size")]
    BadNames,
    #[error("index action has wrong shape")]
    ActionShape,
    #[error("index action entry is not a permutation")]
    ActionNotPermutation,
    #[error("index action violates act(g*h) = act(g) . act(h) at ({0}, {1})")]
    ActionNotAction(usize, usize),
}

/// Serialized form; promoted to [`OrientifoldGroup`] only if the axioms hold.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawGroup {
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
    epsilon: Vec<i8>,
}

/// A finite group with orientation character, construction-checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGroup", into = "RawGroup")]
pub struct OrientifoldGroup {
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
    epsilon: Vec<i8>,
    identity: usize,
    inverse: Vec<usize>,
}

impl TryFrom<RawGroup> for OrientifoldGroup {
    type Error = GroupError;
    fn try_from(raw: RawGroup) -> Result<Self, GroupError> {
        OrientifoldGroup::new(raw.elements, raw.table, raw.epsilon)
    }
}

impl From<OrientifoldGroup> for RawGroup {
    fn from(g: OrientifoldGroup) -> RawGroup {
        RawGroup {
            elements: g.elements,
            table: g.table,
            epsilon: g.epsilon,
        }
    }
}

impl OrientifoldGroup {
    /// Validates the table, locates the identity and inverses, and checks
    /// that `epsilon` is a homomorphism onto `{+1, -1}`.
    pub fn new(
        elements: Vec<String>,
        table: Vec<Vec<usize>>,
        epsilon: Vec<i8>,
    ) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 || table.iter().any(|row| row.len() != n) {
            return Err(GroupError::BadShape);
        }
        if elements.len() != n || epsilon.len() != n {
            return Err(GroupError::BadNames);
        }
        {
            let mut names = elements.clone();
            names.sort();
            names.dedup();
            if names.len() != n {
                return Err(GroupError::BadNames);
            }
        }
        for row in &table {
            for &e in row {
                if e >= n {
                    return Err(GroupError::EntryOutOfRange(e));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverse = vec![usize::MAX; n];
        for x in 0..n {
            inverse[x] = (0..n)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or(GroupError::NoInverse(x))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        for &s in &epsilon {
            if s != 1 && s != -1 {
                return Err(GroupError::BadEpsilonValue);
            }
        }
        for a in 0..n {
            for b in 0..n {
                if epsilon[table[a][b]] != epsilon[a] * epsilon[b] {
                    return Err(GroupError::EpsilonNotHom(a, b));
                }
            }
        }
        Ok(OrientifoldGroup {
            elements,
            table,
            epsilon,
            identity,
            inverse,
        })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn epsilon(&self, a: usize) -> i8 {
        self.epsilon[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.elements[a]
    }

    /// Multiplicative order of an element.
    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Elements with `epsilon = +1` (the orientation-preserving kernel).
    pub fn kernel(&self) -> Vec<usize> {
        (0..self.order()).filter(|&g| self.epsilon[g] == 1).collect()
    }

    /// Elements with `epsilon = -1` (the reflections), possibly empty.
    pub fn reflections(&self) -> Vec<usize> {
        (0..self.order()).filter(|&g| self.epsilon[g] == -1).collect()
    }

    /// True when some element reverses orientation.
    pub fn has_reflection(&self) -> bool {
        self.epsilon.iter().any(|&s| s == -1)
    }

    /// The order-2 group `{1, k}` with `epsilon(k) = -1`: the symmetry type
    /// of a single orientation-reversing involution.
    pub fn jandl() -> Self {
        OrientifoldGroup::new(
            vec!["1".into(), "k".into()],
            vec![vec![0, 1], vec![1, 0]],
            vec![1, -1],
        )
        .expect("jandl group table is valid")
    }

    /// The trivial group.
    pub fn trivial() -> Self {
        OrientifoldGroup::new(vec!["1".into()], vec![vec![0]], vec![1])
            .expect("trivial group table is valid")
    }

    /// Cyclic group of order `n`; if `reflecting` the generator gets
    /// `epsilon = -1`, which requires `n` even.
    pub fn cyclic(n: usize, reflecting: bool) -> Result<Self, GroupError> {
        let elements = (0..n).map(|j| format!("g{j}")).collect();
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        let epsilon = (0..n)
            .map(|j| if reflecting && j % 2 == 1 { -1 } else { 1 })
            .collect();
        OrientifoldGroup::new(elements, table, epsilon)
    }

    /// `Z2 x Z2` with `epsilon` the projection onto the second factor.
    pub fn z2z2_projection() -> Self {
        // elements (a, b) encoded as 2a + b; epsilon((a, b)) = (-1)^b
        let code = |a: usize, b: usize| 2 * a + b;
        let mut table = vec![vec![0usize; 4]; 4];
        for a1 in 0..2 {
            for b1 in 0..2 {
                for a2 in 0..2 {
                    for b2 in 0..2 {
                        table[code(a1, b1)][code(a2, b2)] = code((a1 + a2) % 2, (b1 + b2) % 2);
                    }
                }
            }
        }
        let elements = vec!["1".into(), "k".into(), "t".into(), "tk".into()];
        let epsilon = vec![1, -1, 1, -1];
        OrientifoldGroup::new(elements, table, epsilon).expect("z2z2 table is valid")
    }

    /// `S3` with `epsilon` the sign character; the smallest nonabelian case.
    pub fn symmetric_3() -> Self {
        // permutations of {0,1,2}: e, (01), (02), (12), (012), (021)
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [1, 0, 2],
            [2, 1, 0],
            [0, 2, 1],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let compose = |p: &[usize; 3], q: &[usize; 3]| -> [usize; 3] {
            // (p . q)(x) = p(q(x))
            [p[q[0]], p[q[1]], p[q[2]]]
        };
        let mut table = vec![vec![0usize; 6]; 6];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let r = compose(p, q);
                table[i][j] = perms.iter().position(|s| *s == r).unwrap();
            }
        }
        let elements = vec![
            "e".into(),
            "(01)".into(),
            "(02)".into(),
            "(12)".into(),
            "(012)".into(),
            "(021)".into(),
        ];
        let epsilon = vec![1, -1, -1, -1, 1, 1];
        OrientifoldGroup::new(elements, table, epsilon).expect("s3 table is valid")
    }

    /// Quotient by the kernel of `epsilon`: the trivial group when nothing
    /// reflects, otherwise the Jandl group.  Also returns the projection,
    /// element by element.
    pub fn quotient_group(&self) -> (OrientifoldGroup, Vec<usize>) {
        if !self.has_reflection() {
            (OrientifoldGroup::trivial(), vec![0; self.order()])
        } else {
            let proj = (0..self.order())
                .map(|g| if self.epsilon[g] == -1 { 1 } else { 0 })
                .collect();
            (OrientifoldGroup::jandl(), proj)
        }
    }
}

/// `phase^{epsilon(g)}`: how a group element acts on an abstract phase.
pub fn twisted_action_on_phase(group: &OrientifoldGroup, g: usize, p: &Phase) -> Phase {
    if group.epsilon(g) == -1 {
        p.inv()
    } else {
        p.clone()
    }
}

/// A left action of an [`OrientifoldGroup`] on a finite index set
/// `{0, .., count-1}` by permutations: `act[g]` sends `i` to `act[g][i]`,
/// and `act(g*h) = act(g) . act(h)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexAction {
    perms: Vec<Vec<usize>>,
}

impl IndexAction {
    pub fn new(group: &OrientifoldGroup, perms: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        if perms.len() != group.order() {
            return Err(GroupError::ActionShape);
        }
        let count = perms.first().map(|p| p.len()).unwrap_or(0);
        for p in &perms {
            if p.len() != count {
                return Err(GroupError::ActionShape);
            }
            let mut seen = vec![false; count];
            for &i in p {
                if i >= count || seen[i] {
                    return Err(GroupError::ActionNotPermutation);
                }
                seen[i] = true;
            }
        }
        if (0..count).any(|i| perms[group.identity()][i] != i) {
            return Err(GroupError::ActionNotAction(group.identity(), group.identity()));
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                let gh = group.mul(g, h);
                for i in 0..count {
                    if perms[gh][i] != perms[g][perms[h][i]] {
                        return Err(GroupError::ActionNotAction(g, h));
                    }
                }
            }
        }
        Ok(IndexAction { perms })
    }

    pub fn count(&self) -> usize {
        self.perms.first().map(|p| p.len()).unwrap_or(0)
    }

    pub fn act(&self, g: usize, i: usize) -> usize {
        self.perms[g][i]
    }

    /// True when every listed element other than the identity moves every
    /// index (a free action of that subset).
    pub fn is_free_on(&self, group: &OrientifoldGroup, elements: &[usize]) -> bool {
        elements
            .iter()
            .filter(|&&g| g != group.identity())
            .all(|&g| (0..self.count()).all(|i| self.perms[g][i] != i))
    }

    /// Orbits of the listed subgroup elements on the index set, each sorted.
    pub fn orbits_of(&self, elements: &[usize]) -> Vec<Vec<usize>> {
        let count = self.count();
        let mut seen = vec![false; count];
        let mut orbits = Vec::new();
        for start in 0..count {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut frontier = vec![start];
            while let Some(i) = frontier.pop() {
                for &g in elements {
                    let j = self.perms[g][i];
                    if !seen[j] {
                        seen[j] = true;
                        orbit.push(j);
                        frontier.push(j);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }
}
