//! `ct` — build, query, verify, and benchmark categorical text indexes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use catree::corpus::{load_corpus, load_tree, write_tree, CategoryTree, Corpus};
use catree::oracle::OracleIndex;
use catree::{container, gen};
use catree::{BuildConfig, CatIndex, Engine, Error};

#[derive(Parser)]
#[command(name = "ct", version, about = "Categorical document retrieval indexes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus manifest (JSON listing document files or inline text).
    #[arg(long, short = 'm')]
    manifest: PathBuf,
    /// Category tree file (JSON node/parent list plus leaf order).
    #[arg(long, short = 't')]
    tree: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an index file from a corpus manifest and category tree.
    Build {
        #[command(flatten)]
        input: CorpusArgs,
        /// Engines to build, comma separated (colored|wavelet|heavy).
        #[arg(long, default_value = "colored,wavelet,heavy", value_delimiter = ',')]
        engine: Vec<Engine>,
        /// Sparsification factor for the colored engine (default depends on
        /// the document-array mode).
        #[arg(long)]
        alpha: Option<usize>,
        /// Suffix-array sample rate (default max(1, ceil(log2 n'))).
        #[arg(long)]
        sample_rate: Option<usize>,
        /// Document-array mode: stored | compact.
        #[arg(long, default_value = "stored")]
        doc_array: String,
        /// Output index file.
        #[arg(long, short = 'o')]
        output: PathBuf,
    },
    /// Query an index file: report the level-i nodes with a matching document.
    Query {
        /// Index file produced by `ct build`.
        #[arg(long)]
        index: PathBuf,
        /// Pattern (literal bytes, or hex digits with --hex).
        #[arg(long, short = 'p')]
        pattern: String,
        /// Interpret the pattern as hex digits (for non-printable alphabets).
        #[arg(long)]
        hex: bool,
        /// Tree level to report (root = 1).
        #[arg(long, short = 'i')]
        level: u32,
        /// Engine to query (defaults to the first one present in the file).
        #[arg(long)]
        engine: Option<Engine>,
        /// Emit JSON instead of newline-separated node ids.
        #[arg(long)]
        json: bool,
    },
    /// Cross-check every engine against a brute-force oracle on random queries.
    Verify {
        #[command(flatten)]
        input: CorpusArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Negative control: corrupt one answer to prove mismatches are caught.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Emit per-query CSV rows (space and instrumentation counters) to stdout.
    Bench {
        #[command(flatten)]
        input: CorpusArgs,
        /// Colored-engine sparsification factors to compare.
        #[arg(long, default_value = "1", value_delimiter = ',')]
        alpha: Vec<usize>,
        /// Number of random (pattern, level) queries.
        #[arg(long, default_value_t = 200)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a synthetic corpus and tree into a directory.
    Gen {
        #[arg(long, default_value_t = 16)]
        docs: usize,
        /// Maximum document length.
        #[arg(long, default_value_t = 64)]
        doc_len: usize,
        #[arg(long, default_value_t = 4)]
        sigma: u8,
        #[arg(long, default_value_t = 4)]
        height: u32,
        /// Probability of a unary (single-child) internal node.
        #[arg(long, default_value_t = 0.3)]
        unary_density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory (created if missing).
        #[arg(long, short = 'o')]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::LevelOutOfRange(..) => ExitCode::from(2),
                Error::MalformedIndex(_) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn load_inputs(input: &CorpusArgs) -> Result<(Corpus, CategoryTree), Error> {
    let corpus = load_corpus(&input.manifest)?;
    let tree = load_tree(&input.tree, &corpus)?;
    Ok((corpus, tree))
}

fn parse_pattern(pattern: &str, hex: bool) -> Result<Vec<u8>, Error> {
    if !hex {
        return Ok(pattern.as_bytes().to_vec());
    }
    let digits: Vec<u8> = pattern.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
    if digits.is_empty() || digits.len() % 2 != 0 || !digits.iter().all(u8::is_ascii_hexdigit) {
        return Err(Error::MalformedIndex(format!(
            "'{pattern}' is not an even-length hex string"
        )));
    }
    Ok(digits
        .chunks(2)
        .map(|pair| {
            let s = std::str::from_utf8(pair).unwrap();
            u8::from_str_radix(s, 16).unwrap()
        })
        .collect())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Build {
            input,
            engine,
            alpha,
            sample_rate,
            doc_array,
            output,
        } => {
            let store_doc_array = match doc_array.as_str() {
                "stored" => true,
                "compact" => false,
                other => {
                    eprintln!("error: --doc-array must be stored|compact, got '{other}'");
                    return Ok(ExitCode::FAILURE);
                }
            };
            let (corpus, tree) = load_inputs(&input)?;
            let cfg = BuildConfig {
                colored: engine.contains(&Engine::Colored),
                wavelet: engine.contains(&Engine::Wavelet),
                heavy: engine.contains(&Engine::Heavy),
                alpha,
                sample_rate,
                store_doc_array,
            };
            let idx = CatIndex::build(&corpus, tree, &cfg)?;
            print_space_breakdown(&idx);
            let sections = container::write_index(&output, &idx)?;
            let total: u64 = sections.iter().map(|s| s.len).sum();
            eprintln!("wrote {} ({} sections, {} payload bytes)", output.display(), sections.len(), total);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Query {
            index,
            pattern,
            hex,
            level,
            engine,
            json,
        } => {
            let idx = container::read_index(&index)?;
            let engine = match engine {
                Some(e) => e,
                None => *idx
                    .engines()
                    .first()
                    .ok_or_else(|| Error::EngineMissing("any".into()))?,
            };
            let p = parse_pattern(&pattern, hex)?;
            let mut scratch = idx.new_scratch();
            let result = match idx.query(engine, &p, level, &mut scratch) {
                // a byte above the alphabet occurs in no document: empty result
                Err(Error::InvalidPatternByte(b)) if b > idx.sigma => {
                    catree::QueryResult { level, nodes: Vec::new() }
                }
                other => other?,
            };
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "level": result.level,
                        "t": result.t(),
                        "nodes": result.nodes,
                    })
                );
            } else {
                for node in &result.nodes {
                    println!("{node}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify {
            input,
            trials,
            seed,
            inject_fault,
        } => {
            let (corpus, tree) = load_inputs(&input)?;
            let height = tree.height;
            let oracle = OracleIndex::build(&corpus, &tree);
            let idx = CatIndex::build(&corpus, tree, &BuildConfig::default())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut scratch = idx.new_scratch();
            for trial in 0..trials {
                let p = gen::random_pattern(&mut rng, &corpus, 8);
                let level = rng.gen_range(1..=height);
                let want = oracle.query(&p, level)?;
                for engine in idx.engines() {
                    let mut got = idx.query(engine, &p, level, &mut scratch)?;
                    if inject_fault && trial == trials / 2 && engine == Engine::Colored {
                        got.nodes.push(u32::MAX);
                    }
                    if got.nodes != want.nodes {
                        eprintln!(
                            "mismatch at trial {trial}: engine {engine:?}, |p|={}, level {level}: got {:?}, want {:?}",
                            p.len(),
                            got.nodes,
                            want.nodes
                        );
                        return Ok(ExitCode::FAILURE);
                    }
                }
            }
            eprintln!("verified {} trials x {} engines against the oracle", trials, idx.engines().len());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bench {
            input,
            alpha,
            queries,
            seed,
        } => {
            let (corpus, tree) = load_inputs(&input)?;
            let height = tree.height;
            println!("engine,alpha,engine_bits,pattern_len,level,t,rmq_calls,ai_accesses,wt_visits,lf_steps");
            // shaped and heavy do not depend on alpha: build once, reuse
            let base = CatIndex::build(&corpus, tree.clone(), &BuildConfig::default())?;
            let mut workload = Vec::with_capacity(queries);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..queries {
                let p = gen::random_pattern(&mut rng, &corpus, 8);
                let level = rng.gen_range(1..=height);
                workload.push((p, level));
            }
            for &a in &alpha {
                let cfg = BuildConfig {
                    wavelet: false,
                    heavy: false,
                    alpha: Some(a),
                    ..BuildConfig::default()
                };
                let idx = CatIndex::build(&corpus, tree.clone(), &cfg)?;
                let eng = idx.colored.as_ref().unwrap();
                let bits: usize = eng.reporter_bits().iter().sum();
                bench_rows(&idx, Engine::Colored, a, bits, &workload)?;
            }
            if let Some(eng) = &base.shaped {
                let bits = eng.bitvector_bits() + eng.pointer_bits();
                bench_rows(&base, Engine::Wavelet, 0, bits, &workload)?;
            }
            if let Some(eng) = &base.heavy {
                bench_rows(&base, Engine::Heavy, 0, eng.bitvector_bits(), &workload)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Gen {
            docs,
            doc_len,
            sigma,
            height,
            unary_density,
            seed,
            output,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let corpus = gen::random_corpus(&mut rng, docs, doc_len, sigma);
            let tree = gen::random_tree(&mut rng, docs, height, unary_density);
            std::fs::create_dir_all(&output)?;
            // small alphabets are remapped onto letters so documents and
            // patterns stay printable; sigma is then inferred from the bytes
            let letters = sigma <= 26;
            let mut manifest_docs = Vec::with_capacity(docs);
            for id in 1..=docs as u32 {
                let bytes: Vec<u8> = corpus
                    .document(id)
                    .iter()
                    .map(|&b| if letters { b'a' + b - 1 } else { b })
                    .collect();
                let name = format!("doc_{id}.txt");
                std::fs::write(output.join(&name), &bytes)?;
                manifest_docs.push(serde_json::json!({"id": id, "path": name}));
            }
            let manifest = serde_json::json!({
                "sigma": if letters { None } else { Some(sigma) },
                "documents": manifest_docs,
            });
            serde_json::to_writer_pretty(
                std::fs::File::create(output.join("manifest.json"))?,
                &manifest,
            )?;
            write_tree(&tree, &output.join("tree.json"))?;
            eprintln!(
                "generated {} docs (n={}, sigma={}) and a height-{} tree in {}",
                docs,
                corpus.n,
                sigma,
                tree.height,
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn bench_rows(
    idx: &CatIndex,
    engine: Engine,
    alpha: usize,
    bits: usize,
    workload: &[(Vec<u8>, u32)],
) -> Result<(), Error> {
    let name = match engine {
        Engine::Colored => "colored",
        Engine::Wavelet => "wavelet",
        Engine::Heavy => "heavy",
    };
    use std::io::Write;
    let mut scratch = idx.new_scratch();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for (p, level) in workload {
        let r = idx.query(engine, p, *level, &mut scratch)?;
        let s = &scratch.stats;
        let line = writeln!(
            out,
            "{name},{alpha},{bits},{},{},{},{},{},{},{}",
            p.len(),
            level,
            r.t(),
            s.rmq_calls,
            s.ai_accesses,
            s.wt_visits,
            s.lf_steps
        );
        if let Err(e) = line {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                return Ok(());
            }
            return Err(e.into());
        }
    }
    Ok(())
}

fn print_space_breakdown(idx: &CatIndex) {
    let d = idx.num_docs as usize;
    let np = idx.n_prime;
    let h = idx.tree.height as usize;
    let clog = |x: usize| if x <= 1 { 1 } else { (x - 1).ilog2() as usize + 1 };
    eprintln!("space breakdown (measured bits):");
    eprintln!(
        "  suffix index:    {:>12}  (text+rank+samples; sample rate {})",
        idx.text.size_bits(),
        idx.text.sample_rate
    );
    let da_target = np * clog(d + 1);
    if idx.docs.is_stored() {
        eprintln!(
            "  document array:  {:>12}  (stored; target n'*ceil(log2(D+1)) = {})",
            idx.docs.stored_bits(),
            da_target
        );
    } else {
        eprintln!(
            "  document array:  {:>12}  (compact: separator bitmap only; stored target would be {})",
            idx.docs.size_bits(),
            da_target
        );
    }
    eprintln!("  tree ancestry:   {:>12}  (level-ancestor tables)", idx.laq.size_bits());
    if let Some(e) = &idx.colored {
        let bits: usize = e.reporter_bits().iter().sum();
        match e.indexed_cells() {
            Some(cells) => eprintln!(
                "  colored engine:  {:>12}  (alpha={}, {} indexed cells, target <= 2n'/alpha per level = {})",
                bits,
                e.alpha,
                cells,
                2 * np / e.alpha
            ),
            None => eprintln!(
                "  colored engine:  {:>12}  (alpha=1, full per-level prev arrays: n'*h = {} entries)",
                bits,
                np * h
            ),
        }
    }
    if let Some(e) = &idx.shaped {
        eprintln!(
            "  wavelet engine:  {:>12}  (+{} pointer bits; target <= 1.5*n'*h_b*ceil(log2 d_max) = {})",
            e.bitvector_bits(),
            e.pointer_bits(),
            (3 * np * e.branching_depth as usize * clog(e.max_arity as usize).max(1)) / 2
        );
    }
    if let Some(e) = &idx.heavy {
        eprintln!(
            "  heavy engine:    {:>12}  ({} heavy paths; per-path trees over light edges <= floor(log2 D) deep)",
            e.bitvector_bits(),
            e.path_count()
        );
    }
}
