use collapse_iso::oracle::{corpus_up_to, dedup_corpus, enumerate_nonisomorphic, oracle_iso};
use collapse_iso::{Constraint, Graph, SearchBudget};

#[test]
fn class_counts_through_seven() {
    let counts: Vec<usize> = (1..=7)
        .map(|n| enumerate_nonisomorphic(n, SearchBudget::default()).unwrap().len())
        .collect();
    assert_eq!(counts, vec![1, 2, 4, 11, 34, 156, 1044]);
}

#[test]
fn class_count_eight() {
    assert_eq!(enumerate_nonisomorphic(8, SearchBudget::default()).unwrap().len(), 12346);
}

#[test]
fn six_vertex_classes_are_pairwise_distinct() {
    let six = enumerate_nonisomorphic(6, SearchBudget::default()).unwrap();
    for (i, g) in six.iter().enumerate() {
        for h in &six[i + 1..] {
            if g.edge_count() == h.edge_count() {
                assert!(oracle_iso(g, h, &Constraint::none(), SearchBudget::default()).unwrap().is_none());
            }
        }
    }
}

#[test]
fn enumeration_is_deterministic() {
    let a = corpus_up_to(5, SearchBudget::default()).unwrap();
    let b = corpus_up_to(5, SearchBudget::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn dedup_of_relabeled_copies_keeps_one_per_class() {
    let mut input = Vec::new();
    for g in enumerate_nonisomorphic(5, SearchBudget::default()).unwrap() {
        input.push(g.permute(&[4, 2, 0, 1, 3]).unwrap());
        input.push(g);
    }
    input.push(Graph::cycle(5));
    assert_eq!(dedup_corpus(input, SearchBudget::default()).unwrap().len(), 34);
}
