use num_rational::BigRational;
use num_traits::Zero;

use super::matrix::{decimal, DistanceMatrix};

/// Rooted binary tree from average-linkage clustering. Node heights are
/// half the merge distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Leaf(String),
    Node {
        left: Box<Tree>,
        right: Box<Tree>,
        height: BigRational,
    },
}

impl Tree {
    pub fn height(&self) -> BigRational {
        match self {
            Tree::Leaf(_) => BigRational::zero(),
            Tree::Node { height, .. } => height.clone(),
        }
    }

    /// Leaf labels, left to right.
    pub fn leaves(&self) -> Vec<String> {
        match self {
            Tree::Leaf(l) => vec![l.clone()],
            Tree::Node { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }

    fn min_label(&self) -> &str {
        match self {
            Tree::Leaf(l) => l,
            Tree::Node { left, .. } => left.min_label(),
        }
    }

    /// Newick with 6-digit branch lengths, e.g. `(A:0.050000,B:0.050000);`.
    pub fn to_newick(&self) -> String {
        let mut s = String::new();
        self.write_newick(&mut s, None);
        s.push(';');
        s
    }

    fn write_newick(&self, s: &mut String, parent: Option<&BigRational>) {
        match self {
            Tree::Leaf(l) => s.push_str(&quote(l)),
            Tree::Node { left, right, height } => {
                s.push('(');
                left.write_newick(s, Some(height));
                s.push(',');
                right.write_newick(s, Some(height));
                s.push(')');
            }
        }
        if let Some(p) = parent {
            s.push(':');
            s.push_str(&decimal(&(p - self.height()), 6));
        }
    }

    /// The `k` clusters left after undoing the `k - 1` highest merges, each
    /// as a sorted label list; clusters ordered by their least label.
    pub fn cut(&self, k: usize) -> Vec<Vec<String>> {
        assert!(k >= 1, "a cut needs at least one cluster");
        let mut parts: Vec<&Tree> = vec![self];
        while parts.len() < k {
            let highest = parts
                .iter()
                .enumerate()
                .filter(|(_, t)| matches!(t, Tree::Node { .. }))
                .max_by(|(_, a), (_, b)| {
                    a.height()
                        .cmp(&b.height())
                        .then_with(|| b.min_label().cmp(a.min_label()))
                })
                .map(|(i, _)| i);
            let Some(i) = highest else { break };
            let Tree::Node { left, right, .. } = parts.swap_remove(i) else {
                unreachable!("filtered to nodes")
            };
            parts.push(left);
            parts.push(right);
        }
        let mut out: Vec<Vec<String>> = parts
            .into_iter()
            .map(|t| {
                let mut l = t.leaves();
                l.sort();
                l
            })
            .collect();
        out.sort();
        out
    }
}

fn quote(label: &str) -> String {
    let plain = !label.is_empty()
        && !label
            .chars()
            .any(|c| c.is_whitespace() || "()[]':;,".contains(c));
    if plain {
        label.to_string()
    } else {
        format!("'{}'", label.replace('\'', "''"))
    }
}

/// Average-linkage clustering in exact arithmetic. Among equally close
/// cluster pairs the one with the lexicographically least pair of least
/// labels merges first; the child with the smaller least label goes left.
pub fn upgma(m: &DistanceMatrix) -> Tree {
    let n = m.len();
    let mut clusters: Vec<Option<(Tree, u64)>> = m
        .labels()
        .iter()
        .map(|l| Some((Tree::Leaf(l.clone()), 1)))
        .collect();
    let mut d: Vec<Vec<BigRational>> = m.rows().to_vec();
    for _ in 1..n {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..n {
            for j in i + 1..n {
                let (Some((ti, _)), Some((tj, _))) = (&clusters[i], &clusters[j]) else {
                    continue;
                };
                let key = pair_key(ti, tj);
                let better = match best {
                    None => true,
                    Some((bi, bj)) => {
                        let (Some((bti, _)), Some((btj, _))) = (&clusters[bi], &clusters[bj]) else {
                            unreachable!("best pair is live")
                        };
                        d[i][j] < d[bi][bj] || (d[i][j] == d[bi][bj] && key < pair_key(bti, btj))
                    }
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        let (i, j) = best.expect("two live clusters remain");
        let (ti, si) = clusters[i].take().expect("live");
        let (tj, sj) = clusters[j].take().expect("live");
        let height = &d[i][j] / BigRational::from_integer(2.into());
        for k in 0..n {
            if clusters[k].is_some() {
                let v = (&d[i][k] * BigRational::from_integer(si.into())
                    + &d[j][k] * BigRational::from_integer(sj.into()))
                    / BigRational::from_integer((si + sj).into());
                d[i][k] = v.clone();
                d[k][i] = v;
            }
        }
        let (left, right) = if ti.min_label() <= tj.min_label() {
            (ti, tj)
        } else {
            (tj, ti)
        };
        clusters[i] = Some((
            Tree::Node {
                left: Box::new(left),
                right: Box::new(right),
                height,
            },
            si + sj,
        ));
    }
    clusters
        .into_iter()
        .flatten()
        .next()
        .map(|(t, _)| t)
        .expect("a matrix has at least two items")
}

fn pair_key<'a>(a: &'a Tree, b: &'a Tree) -> (&'a str, &'a str) {
    let (x, y) = (a.min_label(), b.min_label());
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn dm(labels: &[&str], upper: &[BigRational]) -> DistanceMatrix {
        let n = labels.len();
        let mut e = vec![vec![BigRational::zero(); n]; n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = it.next().unwrap().clone();
                e[i][j] = v.clone();
                e[j][i] = v;
            }
        }
        DistanceMatrix::new(labels.iter().map(|s| s.to_string()).collect(), e).unwrap()
    }

    #[test]
    fn two_leaves() {
        let t = upgma(&dm(&["A", "B"], &[r(3, 10)]));
        assert_eq!(t.to_newick(), "(A:0.150000,B:0.150000);");
    }

    #[test]
    fn closest_pair_first() {
        let t = upgma(&dm(&["A", "B", "C"], &[r(1, 10), r(9, 10), r(9, 10)]));
        assert_eq!(t.to_newick(), "((A:0.050000,B:0.050000):0.400000,C:0.450000);");
        assert_eq!(t.cut(2), vec![vec!["A".to_string(), "B".into()], vec!["C".into()]]);
        assert_eq!(t.cut(1).len(), 1);
        assert_eq!(t.cut(9).len(), 3);
    }

    #[test]
    fn average_linkage_weights_by_size() {
        // {A,B} to C: (0.8 + 0.4) / 2; then D joins at its own distance
        let t = upgma(&dm(
            &["A", "B", "C", "D"],
            &[r(1, 10), r(8, 10), r(1, 1), r(4, 10), r(1, 1), r(1, 1)],
        ));
        let Tree::Node { left, right, height } = &t else { panic!() };
        assert_eq!(*height, r(1, 2));
        assert_eq!(right.leaves(), vec!["D"]);
        assert_eq!(left.height(), r(3, 10));
    }

    #[test]
    fn ties_break_on_labels() {
        let t = upgma(&dm(&["c", "a", "b"], &[r(1, 2), r(1, 2), r(1, 2)]));
        assert_eq!(t.to_newick(), "((a:0.250000,b:0.250000):0.000000,c:0.250000);");
    }

    #[test]
    fn quoting() {
        assert_eq!(quote("plain-name.txt"), "plain-name.txt");
        assert_eq!(quote("has space"), "'has space'");
        assert_eq!(quote("it's"), "'it''s'");
        assert_eq!(quote(""), "''");
    }

    proptest! {
        #[test]
        fn permutation_invariant(
            vals in prop::collection::vec(0u32..20, 10),
            perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let labels = ["p", "q", "r", "s", "t"];
            let upper: Vec<BigRational> = vals.iter().map(|&v| r(v as i64, 20)).collect();
            let m = dm(&labels, &upper);
            prop_assert_eq!(upgma(&m).to_newick(), upgma(&m.permuted(&perm)).to_newick());
        }
    }
}
