//! Red splitting and the map Θ from a rainbow frame into its split.
//!
//! Θ(a) is the set of copies of a: atoms of the split frame that become a
//! once red superscripts are forgotten. The check below confirms that Θ is
//! injective, that its images partition the split atoms, and that the
//! projection is a bounded morphism (diagonals, transpositions and every
//! cylindrifier class are carried onto the matching class), which is what
//! lets each realizable pattern of base atoms lift to copies and back.

use crate::atoms::AtomId;
use crate::frame::StructureError;
use crate::rainbow::RainbowFrame;

pub fn split_reds(base: &RainbowFrame, copies: usize) -> Result<RainbowFrame, StructureError> {
    if base.signature().copies != 1 {
        return Err(StructureError::Other("frame is already split".into()));
    }
    RainbowFrame::new(base.signature().clone().with_copies(copies))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ThetaReport {
    pub injective: bool,
    pub partition: bool,
    pub lifting: bool,
    pub base_atoms: usize,
    pub split_atoms: usize,
    pub faces_checked: usize,
    pub problems: Vec<String>,
}

impl ThetaReport {
    pub fn holds(&self) -> bool {
        self.injective && self.partition && self.lifting
    }
}

const MAX_PROBLEMS: usize = 10;

pub fn theta_check(base: &RainbowFrame, split: &RainbowFrame) -> Result<ThetaReport, StructureError> {
    let (bs, ss) = (base.signature(), split.signature());
    if bs.dim != ss.dim || bs.greens != ss.greens || bs.reds != ss.reds || bs.order_rule != ss.order_rule || bs.copies != 1 {
        return Err(StructureError::Other("split frame does not come from this base frame".into()));
    }
    let t = ss.copies;
    let n = bs.dim;
    let mut rep = ThetaReport {
        injective: true,
        partition: true,
        lifting: true,
        ..Default::default()
    };
    let note = |rep: &mut ThetaReport, s: String| {
        if rep.problems.len() < MAX_PROBLEMS {
            rep.problems.push(s);
        }
    };
    let base_atoms = base.atom_list();
    let split_atoms = split.atom_list();
    rep.base_atoms = base_atoms.len();
    rep.split_atoms = split_atoms.len();
    let base_pos = |a: AtomId| base_atoms.binary_search(&a).ok();
    let split_pos = |b: AtomId| split_atoms.binary_search(&b).ok();

    // proj[k] = dense base index of the image of split atom k
    const NONE: u32 = u32::MAX;
    let project = split
        .projector(base)
        .ok_or_else(|| StructureError::Other("split frame does not come from this base frame".into()))?;
    let mut proj = vec![NONE; split_atoms.len()];
    let mut count = vec![0usize; base_atoms.len()];
    for (k, &b) in split_atoms.iter().enumerate() {
        match base_pos(project(b)) {
            Some(x) => {
                count[x] += 1;
                proj[k] = x as u32;
            }
            None => {
                rep.partition = false;
                note(&mut rep, format!("split atom {} lies in no image", split.atom_name(b)));
            }
        }
    }
    for (x, &a) in base_atoms.iter().enumerate() {
        let want = t.pow(base.red_edge_count(a).unwrap_or(0) as u32);
        if count[x] == 0 {
            rep.injective = false;
            note(&mut rep, format!("Θ({}) is empty", base.atom_name(a)));
        }
        if count[x] != want {
            rep.partition = false;
            note(
                &mut rep,
                format!("Θ({}) has {} copies, expected {want}", base.atom_name(a), count[x]),
            );
        }
    }

    for (k, &b) in split_atoms.iter().enumerate() {
        if proj[k] == NONE {
            continue;
        }
        let a = base_atoms[proj[k] as usize];
        let (kb, ka) = (split.kernel_of(b), base.kernel_of(a));
        if kb != ka {
            rep.lifting = false;
            note(&mut rep, format!("diagonals differ at {}", split.atom_name(b)));
            continue;
        }
        // a transposition that fixes the kernel fixes the atom, so only
        // kernels with distinct entries at i, j need the graph rebuilt
        let kern = kb.unwrap_or(&[]);
        for i in 0..n {
            for j in i + 1..n {
                if kern[i] == kern[j] {
                    continue;
                }
                if project(split.transpose(b, i, j)) != base.transpose(a, i, j) {
                    rep.lifting = false;
                    note(&mut rep, format!("s{i}{j} does not commute at {}", split.atom_name(b)));
                }
            }
        }
    }

    // each c_i class of the split frame projects onto the c_i class of the
    // image; faces of c_i are the atoms with position i merged into j0
    for i in 0..n {
        let j0 = if i == 0 { 1 } else { 0 };
        for (k, &f) in split_atoms.iter().enumerate() {
            let Some(kern) = split.kernel_of(f) else { continue };
            if kern[i] != kern[j0] || proj[k] == NONE {
                continue;
            }
            rep.faces_checked += 1;
            let mut image: Vec<AtomId> = split
                .cyl_class(f, i)
                .into_iter()
                .map(|c| split_pos(c).map_or(AtomId::MAX, |q| base_atoms.get(proj[q] as usize).copied().unwrap_or(AtomId::MAX)))
                .collect();
            image.sort_unstable();
            image.dedup();
            let want = base.cyl_class(base_atoms[proj[k] as usize], i);
            if image != want {
                rep.lifting = false;
                note(
                    &mut rep,
                    format!(
                        "c{i} class of {} projects to {} atoms, base class has {}",
                        split.atom_name(f),
                        image.len(),
                        want.len()
                    ),
                );
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rainbow::RainbowSignature;

    #[test]
    fn small_split_embeds() {
        let base = RainbowFrame::new(RainbowSignature::pea(3, 2, 2)).unwrap();
        let split = split_reds(&base, 2).unwrap();
        let rep = theta_check(&base, &split).unwrap();
        assert!(rep.holds(), "{:?}", rep.problems);
        let one = split_reds(&base, 1).unwrap();
        assert_eq!(one.atom_count(), base.atom_count());
    }

    #[test]
    fn deleted_copy_breaks_partition() {
        let base = RainbowFrame::new(RainbowSignature::pea(3, 2, 2)).unwrap();
        let split = split_reds(&base, 2).unwrap();
        let victim = *split
            .atom_list()
            .iter()
            .find(|&&b| split.red_edge_count(b) == Some(1))
            .unwrap();
        let tampered = split.with_excluded([victim]);
        let rep = theta_check(&base, &tampered).unwrap();
        assert!(!rep.partition);
    }
}
