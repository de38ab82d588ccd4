//! Direct enumeration of complete weakly-stable matchings in marriage
//! instances with ties on the women's side. Used as the ground truth when
//! cross-checking instances generated from such cores.

use crate::model::SmtiInstance;

/// A complete matching given as the woman index assigned to each man.
pub type CompleteMatching = Vec<usize>;

fn is_weakly_stable(inst: &SmtiInstance, wife: &[usize], husband: &[usize]) -> bool {
    for (m, man) in inst.men.iter().enumerate() {
        for &w in &man.pref {
            // A pair blocks only if both sides strictly gain; a woman who is
            // indifferent between two men (same tie group) never moves.
            let m_gains = inst.man_rank(m, w) < inst.man_rank(m, wife[m]);
            if !m_gains {
                continue;
            }
            let w_gains = inst.woman_rank(w, m) < inst.woman_rank(w, husband[w]);
            if w_gains {
                return false;
            }
        }
    }
    true
}

/// All complete weakly-stable matchings (every man and every woman matched),
/// up to `limit`. Deterministic order; exponential — keep instances tiny.
pub fn enumerate_complete_stable(
    inst: &SmtiInstance,
    limit: Option<usize>,
) -> Vec<CompleteMatching> {
    let cap = limit.unwrap_or(usize::MAX);
    let mut found = Vec::new();
    if inst.men.len() != inst.women.len() {
        return found; // no complete matching can exist
    }
    let mut wife = vec![usize::MAX; inst.men.len()];
    let mut husband = vec![usize::MAX; inst.women.len()];

    fn go(
        inst: &SmtiInstance,
        m: usize,
        wife: &mut Vec<usize>,
        husband: &mut Vec<usize>,
        found: &mut Vec<CompleteMatching>,
        cap: usize,
    ) {
        if found.len() >= cap {
            return;
        }
        if m == inst.men.len() {
            if is_weakly_stable(inst, wife, husband) {
                found.push(wife.clone());
            }
            return;
        }
        for &w in &inst.men[m].pref {
            if husband[w] != usize::MAX {
                continue;
            }
            wife[m] = w;
            husband[w] = m;
            go(inst, m + 1, wife, husband, found, cap);
            husband[w] = usize::MAX;
            wife[m] = usize::MAX;
        }
    }

    go(inst, 0, &mut wife, &mut husband, &mut found, cap);
    found
}

/// Existence form of [`enumerate_complete_stable`].
pub fn has_complete_stable(inst: &SmtiInstance) -> bool {
    !enumerate_complete_stable(inst, Some(1)).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SmtiMan, SmtiWoman};

    fn man(name: &str, pref: Vec<usize>) -> SmtiMan {
        SmtiMan {
            name: name.into(),
            pref,
        }
    }

    fn woman(name: &str, groups: Vec<Vec<usize>>) -> SmtiWoman {
        SmtiWoman {
            name: name.into(),
            pref: groups,
        }
    }

    // ===== 1. a tie shields both rotations of the square =====

    #[test]
    fn indifferent_woman_makes_both_completions_stable() {
        let inst = SmtiInstance {
            men: vec![man("m1", vec![0, 1]), man("m2", vec![0, 1])],
            women: vec![
                woman("w1", vec![vec![0, 1]]),
                woman("w2", vec![vec![0], vec![1]]),
            ],
            man_order: None,
        };
        let all = enumerate_complete_stable(&inst, None);
        assert_eq!(all.len(), 2);
        assert!(all.contains(&vec![0, 1]));
        assert!(all.contains(&vec![1, 0]));
    }

    // ===== 2. strict competition for one woman leaves no complete matching =====

    #[test]
    fn shared_unique_target_means_no_complete_matching() {
        let inst = SmtiInstance {
            men: vec![man("m1", vec![0]), man("m2", vec![0])],
            women: vec![
                woman("w1", vec![vec![0], vec![1]]),
                woman("w2", vec![]),
            ],
            man_order: None,
        };
        assert!(!has_complete_stable(&inst));
    }

    // ===== 3. strict preferences reject the unstable completion =====

    #[test]
    fn strict_square_has_exactly_the_assortative_matching() {
        let inst = SmtiInstance {
            men: vec![man("m1", vec![0, 1]), man("m2", vec![0, 1])],
            women: vec![
                woman("w1", vec![vec![0], vec![1]]),
                woman("w2", vec![vec![0], vec![1]]),
            ],
            man_order: None,
        };
        let all = enumerate_complete_stable(&inst, None);
        assert_eq!(all, vec![vec![0, 1]]);
    }
}
