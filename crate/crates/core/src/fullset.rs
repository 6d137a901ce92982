//! Atom structure of the full set algebra on ^n b: atoms are maps n -> b.

use crate::frame::{explicit_from_faces, ExplicitCa, StructureError};

/// Decodes the lexicographic index of a map u in ^n b.
pub fn map_of(n: usize, b: usize, mut idx: usize) -> Vec<usize> {
    let mut u = vec![0; n];
    for p in (0..n).rev() {
        u[p] = idx % b;
        idx /= b;
    }
    u
}

pub fn index_of_map(b: usize, u: &[usize]) -> usize {
    u.iter().fold(0, |acc, &x| acc * b + x)
}

pub fn map_name(u: &[usize]) -> String {
    let parts: Vec<String> = u.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn build_full_set_structure(n: usize, b: usize) -> Result<ExplicitCa, StructureError> {
    if b == 0 {
        return Err(StructureError::NoAtoms);
    }
    let count = b.checked_pow(n as u32).ok_or_else(|| StructureError::Other("too many atoms".into()))?;
    let atoms: Vec<u64> = (0..count as u64).collect();
    let names = (0..count).map(|k| map_name(&map_of(n, b, k))).collect();
    let face = |a: u64, i: usize| {
        let mut u = map_of(n, b, a as usize);
        u[i] = 0;
        index_of_map(b, &u) as u64
    };
    let in_diag = |a: u64, i: usize, j: usize| {
        let u = map_of(n, b, a as usize);
        u[i] == u[j]
    };
    let transpose = |a: u64, i: usize, j: usize| {
        let mut u = map_of(n, b, a as usize);
        u.swap(i, j);
        index_of_map(b, &u) as u64
    };
    explicit_from_faces(n, &atoms, names, face, in_diag, Some(transpose))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::validate_explicit;

    #[test]
    fn small_full_frames_validate() {
        for (n, b) in [(2, 2), (3, 1), (3, 2), (3, 3)] {
            let f = build_full_set_structure(n, b).unwrap();
            assert_eq!(f.len(), b.pow(n as u32));
            assert!(validate_explicit(&f).is_valid(), "^{n} {b}");
        }
    }

    #[test]
    fn names_follow_lexicographic_order() {
        let f = build_full_set_structure(3, 3).unwrap();
        assert_eq!(f.name(0), "(0,0,0)");
        assert_eq!(f.name(3), "(0,1,0)");
        assert_eq!(f.name(9), "(1,0,0)");
        assert_eq!(f.diag_members(0, 1).len(), 9);
    }
}
