use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

use super::types::TypeVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Independent uniformly random size-t types.
    Uniform,
    /// Pairwise disjoint supports; repetition allowed inside a type.
    Distinct,
    /// Pairwise disjoint supports and no repetition at all.
    Unique,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeFamilyTag {
    pub family: FamilyKind,
    pub alphabet: usize,
    pub s: usize,
    pub t: usize,
}

const MAX_REJECTIONS: usize = 1_000_000;

/// Uniform over size-t types (not over tuples), by stars and bars.
pub fn sample_uniform_type<R: Rng + ?Sized>(
    alphabet: usize,
    t: usize,
    rng: &mut R,
) -> Result<TypeVector> {
    if alphabet == 0 {
        return Err(LabError::Invalid("empty alphabet".into()));
    }
    let mut bars = sample(rng, alphabet + t - 1, t).into_vec();
    bars.sort_unstable();
    let pairs: Vec<(usize, usize)> = bars.iter().enumerate().map(|(i, &b)| (b - i, 1)).collect();
    TypeVector::new(alphabet, &pairs)
}

/// Uniform size-t type with t distinct elements.
pub fn sample_unique_type<R: Rng + ?Sized>(
    alphabet: usize,
    t: usize,
    rng: &mut R,
) -> Result<TypeVector> {
    if t > alphabet {
        return Err(LabError::Infeasible(format!(
            "cannot pick {t} distinct elements from {alphabet}"
        )));
    }
    TypeVector::from_set(alphabet, &sample(rng, alphabet, t).into_vec())
}

pub fn sample_type_family<R: Rng + ?Sized>(
    tag: &TypeFamilyTag,
    rng: &mut R,
) -> Result<Vec<TypeVector>> {
    let TypeFamilyTag {
        family,
        alphabet,
        s,
        t,
    } = *tag;
    if family == FamilyKind::Unique && s * t > alphabet {
        return Err(LabError::Infeasible(format!(
            "unique family needs s*t = {} <= N = {alphabet}",
            s * t
        )));
    }
    if family == FamilyKind::Distinct && s > alphabet {
        return Err(LabError::Infeasible(format!(
            "distinct family needs s = {s} <= N = {alphabet}"
        )));
    }
    match family {
        FamilyKind::Uniform => (0..s)
            .map(|_| sample_uniform_type(alphabet, t, rng))
            .collect(),
        FamilyKind::Distinct => rejection(s, rng, |r| sample_uniform_type(alphabet, t, r)),
        FamilyKind::Unique => rejection(s, rng, |r| sample_unique_type(alphabet, t, r)),
    }
}

fn rejection<R: Rng + ?Sized>(
    s: usize,
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> Result<TypeVector>,
) -> Result<Vec<TypeVector>> {
    'attempt: for _ in 0..MAX_REJECTIONS {
        let mut fam: Vec<TypeVector> = Vec::with_capacity(s);
        for _ in 0..s {
            let ty = draw(rng)?;
            if fam.iter().any(|f| !f.is_disjoint(&ty)) {
                continue 'attempt;
            }
            fam.push(ty);
        }
        return Ok(fam);
    }
    Err(LabError::Infeasible(
        "type-family rejection sampler did not accept".into(),
    ))
}

pub fn is_distinct_family(fam: &[TypeVector]) -> bool {
    fam.iter()
        .enumerate()
        .all(|(i, a)| fam[i + 1..].iter().all(|b| a.is_disjoint(b)))
}

pub fn is_unique_family(fam: &[TypeVector]) -> bool {
    is_distinct_family(fam) && fam.iter().all(|t| !t.has_repeats())
}
