//! Frequency mining over temporal motifs: canonicalize each motif into a
//! timestamp-free signature, count exact signature occurrences, and rank
//! the most frequent patterns.
//!
//! A signature records, frame by frame, which leaves were active, in which
//! flow direction, at which level. Window timestamps are deliberately
//! excluded so a pattern recurring at different times (or on different
//! meters with the same channel names) counts as the same pattern. Trends
//! are derived from frames, so they add nothing and are excluded too.
//!
//! [`naive_equivalence_classes`] and [`verify_counts`] provide a
//! brute-force cross-check that never touches signature strings: motifs
//! are grouped by direct pairwise content comparison.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::motif::{MotifFrame, TemporalMotif};

/// Canonical, timestamp-free encoding of a temporal motif's edge content.
///
/// Within each frame, triples `name(>|<)symbol` are sorted and joined with
/// `,`; frames are joined with `|`. `>` marks center→leaf (consumption),
/// `<` leaf→center (generation). Names and symbols are percent-escaped so
/// the delimiters stay unambiguous and the encoding is injective.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MotifSignature(String);

impl MotifSignature {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MotifSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn escape(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '%' => out.push_str("%25"),
            ',' => out.push_str("%2C"),
            '|' => out.push_str("%7C"),
            '>' => out.push_str("%3E"),
            '<' => out.push_str("%3C"),
            c => out.push(c),
        }
    }
}

/// (leaf name, center-to-leaf?, symbol) for one edge, read off against the
/// frame's center node.
fn edge_triple(frame: &MotifFrame, edge_index: usize) -> (String, bool, char) {
    let e = &frame.edges[edge_index];
    if e.u == frame.center {
        (e.v.clone(), true, e.x)
    } else if e.v == frame.center {
        (e.u.clone(), false, e.x)
    } else {
        panic!(
            "edge {} -> {} does not touch the frame's center node {}",
            e.u, e.v, frame.center
        );
    }
}

/// Canonical signature of a motif. Two motifs built in any edge order, at
/// any timestamps, produce byte-identical signatures iff their per-frame
/// edge content matches.
pub fn signature_of(motif: &TemporalMotif) -> MotifSignature {
    let mut encoded_frames = Vec::with_capacity(motif.frames.len());
    for frame in &motif.frames {
        let mut triples: Vec<(String, bool, char)> = (0..frame.edges.len())
            .map(|i| edge_triple(frame, i))
            .collect();
        triples.sort();
        let encoded: Vec<String> = triples
            .into_iter()
            .map(|(name, center_to_leaf, symbol)| {
                let mut s = String::new();
                escape(&name, &mut s);
                s.push(if center_to_leaf { '>' } else { '<' });
                escape(&symbol.to_string(), &mut s);
                s
            })
            .collect();
        encoded_frames.push(encoded.join(","));
    }
    MotifSignature(encoded_frames.join("|"))
}

/// Exact multiset of signature occurrences over one motif collection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureCounts {
    delta: Option<usize>,
    counts: BTreeMap<MotifSignature, usize>,
    total: usize,
}

impl SignatureCounts {
    /// Frame count shared by all counted motifs; `None` when nothing was
    /// counted.
    pub fn delta(&self) -> Option<usize> {
        self.delta
    }

    pub fn counts(&self) -> &BTreeMap<MotifSignature, usize> {
        &self.counts
    }

    /// Number of motifs counted. Always equals the sum of all counts.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

/// Count how often each signature occurs. All motifs must span the same
/// number of frames; mixing deltas would make counts incomparable.
pub fn count_signatures(motifs: &[TemporalMotif]) -> Result<SignatureCounts> {
    let mut delta = None;
    let mut counts: BTreeMap<MotifSignature, usize> = BTreeMap::new();
    for motif in motifs {
        match delta {
            None => delta = Some(motif.delta()),
            Some(d) if d != motif.delta() => {
                return Err(Error::MixedDelta(d, motif.delta()));
            }
            Some(_) => {}
        }
        *counts.entry(signature_of(motif)).or_insert(0) += 1;
    }
    Ok(SignatureCounts {
        delta,
        counts,
        total: motifs.len(),
    })
}

/// The `k` most frequent signatures, descending by count; equal counts
/// order by signature so the ranking is deterministic. Fewer than `k`
/// distinct signatures return all of them.
pub fn top_k(counts: &SignatureCounts, k: usize) -> Vec<(MotifSignature, usize)> {
    let mut entries: Vec<(MotifSignature, usize)> = counts
        .counts
        .iter()
        .map(|(sig, &n)| (sig.clone(), n))
        .collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(k);
    entries
}

/// Direct structural comparison of two motifs, used by the brute-force
/// oracle. Never looks at signature strings.
fn same_pattern(a: &TemporalMotif, b: &TemporalMotif) -> bool {
    if a.frames.len() != b.frames.len() {
        return false;
    }
    a.frames.iter().zip(&b.frames).all(|(fa, fb)| {
        if fa.edges.len() != fb.edges.len() {
            return false;
        }
        let content = |f: &MotifFrame| {
            let mut triples: Vec<(String, bool, char)> =
                (0..f.edges.len()).map(|i| edge_triple(f, i)).collect();
            triples.sort();
            triples
        };
        content(fa) == content(fb)
    })
}

/// Group motifs by pairwise content equality: a quadratic reference
/// implementation independent of signatures. Returns index classes in
/// first-seen order.
pub fn naive_equivalence_classes(motifs: &[TemporalMotif]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, motif) in motifs.iter().enumerate() {
        match classes
            .iter_mut()
            .find(|class| same_pattern(&motifs[class[0]], motif))
        {
            Some(class) => class.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes
}

/// Cross-check signature counts against the brute-force grouping: every
/// equivalence class must map to exactly one signature whose count is the
/// class size, and nothing may be left over.
pub fn verify_counts(motifs: &[TemporalMotif], counts: &SignatureCounts) -> Result<()> {
    if counts.total() != motifs.len() {
        return Err(Error::CountMismatch(format!(
            "counted {} motifs but {} were supplied",
            counts.total(),
            motifs.len()
        )));
    }
    let classes = naive_equivalence_classes(motifs);
    if classes.len() != counts.counts().len() {
        return Err(Error::CountMismatch(format!(
            "{} distinct signatures but {} pairwise-distinct patterns",
            counts.counts().len(),
            classes.len()
        )));
    }
    for class in &classes {
        let sig = signature_of(&motifs[class[0]]);
        for &i in &class[1..] {
            if signature_of(&motifs[i]) != sig {
                return Err(Error::CountMismatch(format!(
                    "motifs {} and {} match structurally but their signatures differ",
                    class[0], i
                )));
            }
        }
        match counts.counts().get(&sig) {
            Some(&n) if n == class.len() => {}
            Some(&n) => {
                return Err(Error::CountMismatch(format!(
                    "signature {sig} counted {n} times but {} motifs match it",
                    class.len()
                )));
            }
            None => {
                return Err(Error::CountMismatch(format!(
                    "signature {sig} missing from the counts"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motif::{assemble_temporal_motifs, TemporalEdge};
    use crate::symbolize::Alphabet;
    use proptest::prelude::*;
    use std::collections::BTreeMap as Map;

    fn frame(t_w: i64, center: &str, edges: &[(&str, &str, char)]) -> MotifFrame {
        MotifFrame {
            t_w,
            center: center.into(),
            edges: edges
                .iter()
                .map(|&(u, v, x)| TemporalEdge {
                    u: u.into(),
                    v: v.into(),
                    t_w,
                    x,
                })
                .collect(),
        }
    }

    fn motif(frames: Vec<MotifFrame>) -> TemporalMotif {
        TemporalMotif {
            frames,
            trends: Map::new(),
        }
    }

    #[test]
    fn edge_order_does_not_change_the_signature() {
        let a = motif(vec![frame(
            0,
            "h",
            &[("h", "fridge", 'a'), ("h", "oven", 'c')],
        )]);
        let b = motif(vec![frame(
            0,
            "h",
            &[("h", "oven", 'c'), ("h", "fridge", 'a')],
        )]);
        assert_eq!(signature_of(&a), signature_of(&b));
        assert_eq!(signature_of(&a).as_str(), "fridge>a,oven>c");
    }

    #[test]
    fn timestamps_do_not_change_the_signature() {
        let a = motif(vec![
            frame(0, "h", &[("h", "fridge", 'a')]),
            frame(3600, "h", &[("h", "fridge", 'b')]),
        ]);
        let b = motif(vec![
            frame(86400, "h", &[("h", "fridge", 'a')]),
            frame(90000, "h", &[("h", "fridge", 'b')]),
        ]);
        assert_eq!(signature_of(&a), signature_of(&b));
    }

    #[test]
    fn one_symbol_changes_the_signature() {
        let a = motif(vec![frame(0, "h", &[("h", "fridge", 'a')])]);
        let b = motif(vec![frame(0, "h", &[("h", "fridge", 'b')])]);
        assert_ne!(signature_of(&a), signature_of(&b));
    }

    #[test]
    fn flow_direction_changes_the_signature() {
        let consuming = motif(vec![frame(0, "h", &[("h", "pv", 'b')])]);
        let generating = motif(vec![frame(0, "h", &[("pv", "h", 'b')])]);
        assert_ne!(signature_of(&consuming), signature_of(&generating));
        assert_eq!(signature_of(&generating).as_str(), "pv<b");
    }

    #[test]
    fn empty_frames_are_encoded_as_absent() {
        let m = motif(vec![
            frame(0, "h", &[]),
            frame(3600, "h", &[("h", "oven", 'd')]),
            frame(7200, "h", &[]),
        ]);
        assert_eq!(signature_of(&m).as_str(), "|oven>d|");
    }

    #[test]
    fn delimiter_characters_in_names_stay_unambiguous() {
        // Unescaped, both would encode as "a>c,b>c".
        let tricky = motif(vec![frame(0, "h", &[("h", "a>c,b", 'c')])]);
        let plain = motif(vec![frame(0, "h", &[("h", "a", 'c'), ("h", "b", 'c')])]);
        assert_ne!(signature_of(&tricky), signature_of(&plain));
        assert_eq!(signature_of(&tricky).as_str(), "a%3Ec%2Cb>c");
    }

    #[test]
    fn counts_are_exact_multisets() {
        let m1 = motif(vec![frame(0, "h", &[("h", "fridge", 'a')])]);
        let m1_again = motif(vec![frame(900, "h", &[("h", "fridge", 'a')])]);
        let m2 = motif(vec![frame(0, "h", &[("h", "fridge", 'd')])]);
        let counts = count_signatures(&[m1.clone(), m1_again, m2.clone()]).unwrap();
        assert_eq!(counts.total(), 3);
        assert_eq!(counts.delta(), Some(1));
        assert_eq!(counts.counts()[&signature_of(&m1)], 2);
        assert_eq!(counts.counts()[&signature_of(&m2)], 1);
    }

    #[test]
    fn empty_input_counts_nothing() {
        let counts = count_signatures(&[]).unwrap();
        assert!(counts.is_empty());
        assert_eq!(counts.total(), 0);
        assert_eq!(counts.delta(), None);
        assert!(counts.counts().is_empty());
    }

    #[test]
    fn mixed_deltas_are_rejected() {
        let short = motif(vec![frame(0, "h", &[])]);
        let long = motif(vec![frame(0, "h", &[]), frame(900, "h", &[])]);
        let err = count_signatures(&[short, long]).unwrap_err();
        assert!(matches!(err, Error::MixedDelta(1, 2)));
    }

    #[test]
    fn top_k_ranks_by_count_then_signature() {
        let a = motif(vec![frame(0, "h", &[("h", "a", 'a')])]);
        let b = motif(vec![frame(0, "h", &[("h", "b", 'a')])]);
        let c = motif(vec![frame(0, "h", &[("h", "c", 'a')])]);
        let counts =
            count_signatures(&[a.clone(), a.clone(), a.clone(), b.clone(), b.clone(), c]).unwrap();

        let top1 = top_k(&counts, 1);
        assert_eq!(top1, vec![(signature_of(&a), 3)]);

        // b and c tie at... b has 2, a has 3, c has 1: full order.
        let all = top_k(&counts, 10);
        assert_eq!(all.len(), 3);
        assert_eq!(all[0].1, 3);
        assert_eq!(all[1].1, 2);
        assert_eq!(all[2].1, 1);

        assert!(top_k(&counts, 0).is_empty());
    }

    #[test]
    fn ties_break_toward_the_smaller_signature() {
        let a = motif(vec![frame(0, "h", &[("h", "x", 'a')])]);
        let b = motif(vec![frame(0, "h", &[("h", "y", 'a')])]);
        let counts = count_signatures(&[b.clone(), a.clone(), b.clone(), a.clone()]).unwrap();
        let top = top_k(&counts, 2);
        assert_eq!(top[0].0, signature_of(&a));
        assert_eq!(top[1].0, signature_of(&b));
        assert_eq!((top[0].1, top[1].1), (2, 2));
    }

    #[test]
    fn shuffling_the_input_leaves_counts_unchanged() {
        let a = motif(vec![frame(0, "h", &[("h", "x", 'a')])]);
        let b = motif(vec![frame(0, "h", &[("h", "y", 'b')])]);
        let c = motif(vec![frame(0, "h", &[])]);
        let forward = count_signatures(&[a.clone(), b.clone(), c.clone(), a.clone()]).unwrap();
        let shuffled = count_signatures(&[c, a.clone(), a, b]).unwrap();
        assert_eq!(forward.counts(), shuffled.counts());
        assert_eq!(forward.total(), shuffled.total());
    }

    #[test]
    fn oracle_groups_match_counts_on_a_hand_case() {
        let a = motif(vec![frame(0, "h", &[("h", "x", 'a')])]);
        let b = motif(vec![frame(0, "h", &[("h", "x", 'b')])]);
        let motifs = vec![a.clone(), b, a.clone(), a];
        let classes = naive_equivalence_classes(&motifs);
        assert_eq!(classes, vec![vec![0, 2, 3], vec![1]]);
        let counts = count_signatures(&motifs).unwrap();
        verify_counts(&motifs, &counts).unwrap();
    }

    #[test]
    fn verify_rejects_foreign_counts() {
        let a = motif(vec![frame(0, "h", &[("h", "x", 'a')])]);
        let b = motif(vec![frame(0, "h", &[("h", "x", 'b')])]);
        let counts_for_a = count_signatures(&[a.clone(), a.clone()]).unwrap();
        assert!(verify_counts(&[a, b], &counts_for_a).is_err());
    }

    // Random motif lists built through the real assembly path.
    fn arb_motifs() -> impl Strategy<Value = Vec<TemporalMotif>> {
        let channels = ["c0", "c1", "c2", "c3", "c4"];
        let arb_frame = proptest::collection::vec(proptest::option::of(0usize..4), 5);
        (proptest::collection::vec(arb_frame, 3..20), 1usize..=3).prop_map(
            move |(frame_specs, delta)| {
                let alphabet = Alphabet::uniform(4).unwrap();
                let frames: Vec<MotifFrame> = frame_specs
                    .iter()
                    .enumerate()
                    .map(|(k, spec)| {
                        let edges = spec
                            .iter()
                            .enumerate()
                            .filter_map(|(c, sym)| {
                                sym.map(|rank| (channels[c], alphabet.labels()[rank]))
                            })
                            .map(|(name, x)| ("h", name, x))
                            .collect::<Vec<_>>();
                        frame(
                            k as i64 * 900,
                            "h",
                            &edges.iter().map(|&(u, v, x)| (u, v, x)).collect::<Vec<_>>(),
                        )
                    })
                    .collect();
                assemble_temporal_motifs(&frames, delta, &alphabet).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn counts_always_agree_with_the_naive_oracle(motifs in arb_motifs()) {
            let counts = count_signatures(&motifs).unwrap();
            verify_counts(&motifs, &counts).unwrap();
            prop_assert_eq!(counts.counts().values().sum::<usize>(), counts.total());
        }

        #[test]
        fn equal_signatures_mean_equal_content(motifs in arb_motifs()) {
            prop_assume!(motifs.len() >= 2);
            for a in &motifs {
                for b in &motifs {
                    prop_assert_eq!(
                        signature_of(a) == signature_of(b),
                        same_pattern(a, b),
                        "signature equality must coincide with structural equality"
                    );
                }
            }
        }
    }
}
