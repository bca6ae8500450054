use nidkit::exec::Execution;
use nidkit::ncd::*;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Frozen after measuring the default-seed corpus (largest observed 0.021294).
fn self_distance_max() -> BigRational {
    BigRational::new(15.into(), 100.into())
}

/// Frozen margin for `C(xx) < 2C(x) - SLACK` on 4 KiB corpus items
/// (smallest observed margin above 2300 bytes).
const SELF_CONCAT_SLACK: u64 = 1024;

fn families_of(tree: &Tree) -> Vec<Vec<String>> {
    tree.cut(3)
}

#[test]
fn synthetic_corpus_structure() {
    let corpus = synthetic_corpus(&SyntheticSpec::default());
    let m = matrix(&corpus.items, &Builtin).unwrap();
    assert!(m.is_symmetric());
    for i in 0..m.len() {
        assert!(m.get(i, i) <= &self_distance_max());
    }
    assert!(m.separation(&corpus.families).is_separated());
    let expected: Vec<Vec<String>> = corpus
        .items
        .chunks(4)
        .map(|c| c.iter().map(|it| it.label.clone()).collect())
        .collect();
    assert_eq!(families_of(&upgma(&m)), expected);
}

#[test]
fn tree_survives_tsv_and_permutation() {
    let corpus = synthetic_corpus(&SyntheticSpec::default());
    let m = matrix(&corpus.items, &Builtin).unwrap();
    let back = DistanceMatrix::from_tsv(&m.to_tsv()).unwrap();
    assert_eq!(families_of(&upgma(&back)), families_of(&upgma(&m)));

    let mut order: Vec<usize> = (0..corpus.items.len()).collect();
    order.reverse();
    order.swap(1, 7);
    let shuffled: Vec<CorpusItem> = order.iter().map(|&i| corpus.items[i].clone()).collect();
    let ms = matrix_with(&shuffled, &Builtin, Execution::Sequential).unwrap();
    assert_eq!(ms, m.permuted(&order));
    assert_eq!(upgma(&ms).to_newick(), upgma(&m).to_newick());
}

#[test]
fn compressor_contrast() {
    let corpus = synthetic_corpus(&SyntheticSpec::default());
    for it in &corpus.items {
        let cx = Builtin.compressed_len(&it.payload).unwrap();
        let doubled = [it.payload.as_slice(), it.payload.as_slice()].concat();
        let cxx = Builtin.compressed_len(&doubled).unwrap();
        assert!(cxx + SELF_CONCAT_SLACK < 2 * cx, "{}: {cxx} vs {cx}", it.label);
    }
    let repeated = vec![0x41u8; 1000];
    assert!(Builtin.compressed_len(&repeated).unwrap() * 100 <= 5 * 1000);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let random: Vec<u8> = (0..1000).map(|_| rng.gen()).collect();
    assert!(Builtin.compressed_len(&random).unwrap() * 100 >= 95 * 1000);
    assert!(Builtin.compressed_len(&[]).unwrap() >= 1);
}

#[test]
fn range_and_triangle_audit() {
    let corpus = synthetic_corpus(&SyntheticSpec::default());
    let m = matrix(&corpus.items, &Builtin).unwrap();
    let top = BigRational::new(11.into(), 10.into());
    assert!(m.rows().iter().flatten().all(|v| *v >= BigRational::from_integer(0.into()) && *v <= top));
    let audit = m.triangle_audit(&BigRational::new(1.into(), 20.into()));
    assert_eq!(audit.triples, 12 * 12 * 12);
    assert!(audit.max_excess <= BigRational::new(1.into(), 20.into()));
}

#[test]
fn other_seeds_still_separate() {
    for seed in [1u64, 2, 3] {
        let corpus = synthetic_corpus(&SyntheticSpec {
            seed,
            ..SyntheticSpec::default()
        });
        let m = matrix(&corpus.items, &Builtin).unwrap();
        assert!(m.separation(&corpus.families).is_separated(), "seed {seed}");
    }
}
