use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::NcdError;

/// Seed used by the CLI and the acceptance suite when none is given.
pub const DEFAULT_SEED: u64 = 0x4E49_445F_5345_4544;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusItem {
    pub label: String,
    pub payload: Vec<u8>,
}

impl CorpusItem {
    pub fn new(label: impl Into<String>, payload: Vec<u8>) -> Self {
        Self {
            label: label.into(),
            payload,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> NcdError + '_ {
    move |source| NcdError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Regular files in `dir`, labelled by file name, in label order.
pub fn load_dir(dir: &Path) -> Result<Vec<CorpusItem>, NcdError> {
    let mut items = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if !path.is_file() {
            continue;
        }
        let label = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        items.push(CorpusItem::new(label, fs::read(&path).map_err(io_err(&path))?));
    }
    items.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(items)
}

/// A manifest has one `label,path` per line; `#` starts a comment line and
/// relative paths are taken from the manifest's directory. Order is kept.
pub fn load_manifest(manifest: &Path) -> Result<Vec<CorpusItem>, NcdError> {
    let text = fs::read_to_string(manifest).map_err(io_err(manifest))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut items = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, path) = line.split_once(',').ok_or_else(|| NcdError::Parse {
            line: i + 1,
            message: format!("expected label,path in {line:?}"),
        })?;
        let path = base.join(path.trim());
        items.push(CorpusItem::new(label.trim(), fs::read(&path).map_err(io_err(&path))?));
    }
    Ok(items)
}

/// Shape of the synthetic corpus: each family is an order-2 Markov source
/// over a small alphabet whose every context favours a few successors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub families: usize,
    pub per_family: usize,
    pub item_len: usize,
    pub alphabet: u8,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            families: 3,
            per_family: 4,
            item_len: 4096,
            alphabet: 16,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub items: Vec<CorpusItem>,
    /// Family index of each item.
    pub families: Vec<usize>,
}

/// Successor weights in percent for the favoured symbols of a context.
const PEAK: [u32; 3] = [70, 20, 8];

struct MarkovSource {
    alphabet: u8,
    /// `table[a][b]` lists the favoured successors of context `(a, b)`.
    table: Vec<Vec<[u8; 3]>>,
}

impl MarkovSource {
    fn new(alphabet: u8, rng: &mut ChaCha8Rng) -> Self {
        let k = alphabet as usize;
        let table = (0..k)
            .map(|_| {
                (0..k)
                    .map(|_| {
                        let mut s = [0u8; 3];
                        for i in 0..s.len() {
                            s[i] = loop {
                                let c = rng.gen_range(0..alphabet);
                                if !s[..i].contains(&c) {
                                    break c;
                                }
                            };
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        Self { alphabet, table }
    }

    fn sample(&self, len: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
        let mut sym: Vec<u8> = Vec::with_capacity(len);
        while sym.len() < len.min(2) {
            sym.push(rng.gen_range(0..self.alphabet));
        }
        while sym.len() < len {
            let (a, b) = (sym[sym.len() - 2], sym[sym.len() - 1]);
            let roll = rng.gen_range(0..100);
            let favoured = &self.table[a as usize][b as usize];
            let next = match roll {
                r if r < PEAK[0] => favoured[0],
                r if r < PEAK[0] + PEAK[1] => favoured[1],
                r if r < PEAK[0] + PEAK[1] + PEAK[2] => favoured[2],
                _ => rng.gen_range(0..self.alphabet),
            };
            sym.push(next);
        }
        sym.into_iter().map(|s| b'a' + s).collect()
    }
}

/// Labels are `fam<F>_<I>` with `F` a letter from `A`.
pub fn synthetic_corpus(spec: &SyntheticSpec) -> SyntheticCorpus {
    assert!(spec.alphabet >= 3 && spec.alphabet <= 26, "alphabet must be 3..=26");
    assert!(spec.families <= 26, "at most 26 families");
    let mut items = Vec::new();
    let mut families = Vec::new();
    for f in 0..spec.families {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(f as u64);
        let source = MarkovSource::new(spec.alphabet, &mut rng);
        for i in 0..spec.per_family {
            let payload = source.sample(spec.item_len, &mut rng);
            items.push(CorpusItem::new(format!("fam{}_{i}", (b'A' + f as u8) as char), payload));
            families.push(f);
        }
    }
    SyntheticCorpus { items, families }
}
