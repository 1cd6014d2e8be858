use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Multiset over `[alphabet]`, stored as sorted `(index, count)` pairs with
/// every count at least one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVector {
    alphabet: usize,
    entries: Vec<(usize, usize)>,
}

/// One `{index, count}` record of the JSON form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeEntry {
    pub index: usize,
    pub count: usize,
}

impl TypeVector {
    /// Canonicalizes: merges repeated indices, drops zero counts, sorts.
    pub fn new(alphabet: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut entries: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
        let mut sorted = pairs.to_vec();
        sorted.sort_unstable();
        for (idx, cnt) in sorted {
            if idx >= alphabet {
                return Err(LabError::Invalid(format!(
                    "type index {idx} outside alphabet of size {alphabet}"
                )));
            }
            if cnt == 0 {
                continue;
            }
            match entries.last_mut() {
                Some(last) if last.0 == idx => last.1 += cnt,
                _ => entries.push((idx, cnt)),
            }
        }
        Ok(TypeVector { alphabet, entries })
    }

    /// Type with every element of `set` appearing once.
    pub fn from_set(alphabet: usize, set: &[usize]) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = set.iter().map(|&i| (i, 1)).collect();
        let tv = Self::new(alphabet, &pairs)?;
        if tv.entries.len() != set.len() {
            return Err(LabError::Invalid("set contains repeated elements".into()));
        }
        Ok(tv)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn count(&self, index: usize) -> usize {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map(|k| self.entries[k].1)
            .unwrap_or(0)
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn has_repeats(&self) -> bool {
        self.entries.iter().any(|e| e.1 > 1)
    }

    pub fn is_disjoint(&self, other: &TypeVector) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            match self.entries[i].0.cmp(&other.entries[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    /// Every tuple whose type is `self`, in lexicographic order.
    pub fn arrangements(&self) -> Vec<Vec<usize>> {
        let t = self.size();
        let mut counts: Vec<(usize, usize)> = self.entries.clone();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(t);
        fn rec(
            counts: &mut [(usize, usize)],
            cur: &mut Vec<usize>,
            t: usize,
            out: &mut Vec<Vec<usize>>,
        ) {
            if cur.len() == t {
                out.push(cur.clone());
                return;
            }
            for k in 0..counts.len() {
                if counts[k].1 == 0 {
                    continue;
                }
                counts[k].1 -= 1;
                cur.push(counts[k].0);
                rec(counts, cur, t, out);
                cur.pop();
                counts[k].1 += 1;
            }
        }
        rec(&mut counts, &mut cur, t, &mut out);
        out
    }

    /// `Π freq! / t!`, the squared amplitude of each tuple in the type state.
    pub fn weight(&self) -> f64 {
        let num: f64 = self.entries.iter().map(|e| factorial(e.1)).product();
        num / factorial(self.size())
    }

    pub fn to_json_entries(&self) -> Vec<TypeEntry> {
        self.entries
            .iter()
            .map(|&(index, count)| TypeEntry { index, count })
            .collect()
    }

    pub fn from_json_entries(alphabet: usize, entries: &[TypeEntry]) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = entries.iter().map(|e| (e.index, e.count)).collect();
        Self::new(alphabet, &pairs)
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `N (N-1) ... (N-k+1)`.
pub fn falling_factorial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| n as f64 - i as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    falling_factorial(n, k) / factorial(k)
}

pub fn type_of(v: &[usize], alphabet: usize) -> Result<TypeVector> {
    let pairs: Vec<(usize, usize)> = v.iter().map(|&i| (i, 1)).collect();
    TypeVector::new(alphabet, &pairs)
}

/// Index of a tuple over `[alphabet]^t`, first entry most significant.
pub fn tuple_index(v: &[usize], alphabet: usize) -> usize {
    v.iter().fold(0usize, |acc, &x| acc * alphabet + x)
}

pub fn index_tuple(mut idx: usize, alphabet: usize, t: usize) -> Vec<usize> {
    let mut v = vec![0usize; t];
    for j in (0..t).rev() {
        v[j] = idx % alphabet;
        idx /= alphabet;
    }
    v
}

/// Serialized type family: `{alphabet, family, types: [[{index, count}]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeFamilyRecord {
    pub alphabet: usize,
    pub family: super::family::FamilyKind,
    pub types: Vec<Vec<TypeEntry>>,
}

impl TypeFamilyRecord {
    pub fn new(family: super::family::FamilyKind, types: &[TypeVector]) -> Result<Self> {
        let alphabet = types.first().map(|t| t.alphabet()).unwrap_or(0);
        if types.iter().any(|t| t.alphabet() != alphabet) {
            return Err(LabError::Invalid(
                "types in a family must share an alphabet".into(),
            ));
        }
        Ok(TypeFamilyRecord {
            alphabet,
            family,
            types: types.iter().map(|t| t.to_json_entries()).collect(),
        })
    }

    pub fn types(&self) -> Result<Vec<TypeVector>> {
        self.types
            .iter()
            .map(|e| TypeVector::from_json_entries(self.alphabet, e))
            .collect()
    }
}
