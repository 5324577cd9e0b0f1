//! `milnor`: Milnor invariants of marked links and of their covering links.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use milnor_cover::brunnian::{self, band_sum, milnor_link, Expected, MilnorLinkSpec};
use milnor_cover::cover::{self, bigint_json, double_cover};
use milnor_cover::diagram::PDiagram;
use milnor_cover::verify::{self, eps_string, Verdict, VerifyReport};
use milnor_cover::{parse_tangle, Exec, Index, MilnorEngine, Modulus, TangleWord};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "milnor", version, about = "Milnor invariants of links with an unknotted axis and of their covering links")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct Opts {
    /// Coefficient modulus; 0 for the integers.
    #[arg(long, default_value_t = 0)]
    p: u64,
    /// Truncation degree.
    #[arg(long, default_value_t = 6)]
    q: usize,
    /// Mirror the input word before computing.
    #[arg(long)]
    mirror: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Run without the thread pool.
    #[arg(long)]
    sequential: bool,
}

impl Opts {
    fn modulus(&self) -> Result<Modulus> {
        Ok(if self.p == 0 { Modulus::INTEGERS } else { Modulus::new(self.p)? })
    }

    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }
}

#[derive(Args, Clone)]
struct Input {
    /// Built-in word (see `corpus list`), or `trivial_<k>`.
    #[arg(long, conflicts_with = "file")]
    corpus: Option<String>,
    /// Tangle word file, or a `.json` diagram (for `mu` only).
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// mu, delta and mubar of the link with its axis.
    Mu {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
        /// Index such as 132 or 1,3,12; repeatable.
        #[arg(long = "I", required = true)]
        index: Vec<String>,
    },
    /// Covering multiset over lift selections with eps_1 = 0.
    Mset {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
        #[arg(long = "I")]
        index: String,
    },
    /// Covering links L(eps) as diagrams.
    Cover {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
        /// Single selection such as 01; default all.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Mod 2 congruence between the link and its covering links.
    Verify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
        /// Admissible index; default all of them.
        #[arg(long = "I")]
        index: Option<String>,
        /// Check seeded random band sums instead of one input.
        #[arg(long, conflicts_with_all = ["corpus", "file", "index"])]
        sweep: bool,
        #[arg(long, value_enum, default_value_t = Generator::Milnor)]
        gen: Generator,
        /// Non-axis components of generated links.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        max_terms: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Writes a tangle word.
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
    Corpus {
        #[command(subcommand)]
        what: CorpusCmd,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    /// Band sums of Milnor links.
    Milnor,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Milnor link for an index permutation; the last label is the axis.
    Milnor {
        #[arg(long, value_delimiter = ',', required = true)]
        index: Vec<usize>,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i8,
        #[arg(long)]
        json: bool,
    },
    /// Band sum of two port-form words.
    Bandsum {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    List {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

enum Loaded {
    Word(TangleWord),
    Diagram(PDiagram),
}

fn read_word(path: &PathBuf) -> Result<TangleWord> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_tangle(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load(input: &Input, mirror: bool) -> Result<(String, Loaded)> {
    let (name, loaded) = match (&input.corpus, &input.file) {
        (Some(c), _) => (c.clone(), Loaded::Word(brunnian::corpus_word(c)?)),
        (None, Some(path)) => {
            let stem = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            if path.extension().is_some_and(|e| e == "json") {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                (stem, Loaded::Diagram(PDiagram::from_json(&text)?))
            } else {
                let w = read_word(path)?;
                (w.name().map_or(stem, String::from), Loaded::Word(w))
            }
        }
        (None, None) => bail!("give an input file or --corpus <name>"),
    };
    Ok(match loaded {
        Loaded::Word(w) if mirror => (name, Loaded::Word(w.mirror())),
        Loaded::Diagram(d) if mirror => (name, Loaded::Diagram(d.mirror())),
        other => (name, other),
    })
}

fn load_word(input: &Input, mirror: bool) -> Result<(String, TangleWord)> {
    match load(input, mirror)? {
        (name, Loaded::Word(w)) => Ok((name, w)),
        (_, Loaded::Diagram(_)) => bail!("this command needs a tangle word, not a diagram"),
    }
}

fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

fn render_csv(headers: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn emit(format: Format, headers: &[&str], rows: &[Vec<String>], json: Value, preface: Option<String>) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&json)? + "\n",
        Format::Csv => render_csv(headers, rows)?,
        Format::Table => preface.map_or_else(String::new, |p| p + "\n") + &render_table(headers, rows),
    })
}

fn cmd_mu(input: &Input, opts: &Opts, indices: &[String]) -> Result<String> {
    let (name, loaded) = load(input, opts.mirror)?;
    let d = match loaded {
        Loaded::Word(w) => w.insert_axis()?.diagram,
        Loaded::Diagram(d) => d,
    };
    let indices = indices.iter().map(|s| Index::parse(s)).collect::<Result<Vec<_>, _>>()?;
    let engine = MilnorEngine::new(&d, opts.modulus()?, opts.q)?;
    let results = engine.mu_bar_many(opts.exec(), &indices).into_iter().collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<String>> = indices
        .iter()
        .zip(&results)
        .map(|(i, r)| vec![i.to_string(), r.mu.to_string(), r.delta.to_string(), r.mubar.to_string()])
        .collect();
    let json = json!({
        "input": name,
        "p": opts.p,
        "q": opts.q,
        "mirror": opts.mirror,
        "results": indices.iter().zip(&results).map(|(i, r)| json!({
            "I": i.to_string(),
            "mu": bigint_json(&r.mu),
            "delta": bigint_json(&r.delta),
            "mubar": bigint_json(&r.mubar),
        })).collect::<Vec<_>>(),
    });
    emit(opts.format, &["I", "mu", "delta", "mubar"], &rows, json, None)
}

fn cmd_mset(input: &Input, opts: &Opts, index: &str) -> Result<String> {
    let (name, w) = load_word(input, opts.mirror)?;
    let idx = Index::parse(index)?;
    let m = cover::m_set(&w, &idx, opts.modulus()?, opts.q, opts.exec())?;
    let rows: Vec<Vec<String>> = m
        .entries
        .iter()
        .map(|e| {
            let r = &e.result;
            vec![eps_string(&e.eps), r.mu.to_string(), r.delta.to_string(), r.mubar.to_string()]
        })
        .collect();
    let values: Vec<String> = m.values().iter().map(|v| v.to_string()).collect();
    let mut json = m.to_json();
    json["name"] = json!(name);
    json["mirror"] = json!(opts.mirror);
    json["values"] = json!(m.values().iter().map(bigint_json).collect::<Vec<_>>());
    let preface = format!("{name}: M({idx}) = {{{}}}", values.join(", "));
    emit(opts.format, &["eps", "mu", "delta", "mubar"], &rows, json, Some(preface))
}

fn cmd_cover(input: &Input, opts: &Opts, eps: Option<&str>) -> Result<String> {
    let (name, w) = load_word(input, opts.mirror)?;
    let model = double_cover(&w)?;
    let selections: Vec<Vec<u8>> = match eps {
        Some(s) => vec![s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => bail!("selection {s:?} must be a string of 0 and 1"),
            })
            .collect::<Result<_>>()?],
        None => cover::all_selections(model.n(), false),
    };
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for e in &selections {
        let d = model.covering_link(e)?;
        let n = d.component_count();
        let lk: Vec<String> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .map(|(a, b)| format!("{}{}:{}", a + 1, b + 1, d.linking_number(a, b)))
            .collect();
        rows.push(vec![eps_string(e), n.to_string(), d.crossing_count().to_string(), lk.join(" ")]);
        entries.push(json!({"eps": eps_string(e), "diagram": serde_json::to_value(&d)?}));
    }
    let json = json!({"name": name, "mirror": opts.mirror, "covering_links": entries});
    emit(opts.format, &["eps", "components", "crossings", "linking"], &rows, json, None)
}

fn report_rows(reports: &[VerifyReport], sample: Option<usize>) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            let mut row = vec![
                r.index.to_string(),
                r.lhs.mubar.to_string(),
                r.per_eps.iter().map(|e| format!("{}:{}", eps_string(&e.eps), e.result.mubar)).collect::<Vec<_>>().join(" "),
                r.rhs_sum.to_string(),
                r.verdict.as_str().to_string(),
                if r.strict() { "strict".into() } else { String::new() },
            ];
            if let Some(s) = sample {
                row.insert(0, s.to_string());
                row.insert(1, r.name.clone().unwrap_or_default());
            }
            row
        })
        .collect()
}

const VERIFY_HEADERS: [&str; 6] = ["I", "lhs", "per_eps", "rhs", "verdict", "note"];

fn cmd_verify(input: &Input, opts: &Opts, index: Option<&str>) -> Result<(String, bool)> {
    if opts.p != 0 {
        bail!("verify works over the integers; drop --p");
    }
    let (name, w) = load_word(input, opts.mirror)?;
    let reports = match index {
        Some(s) => vec![verify::verify_mod2(&w, &Index::parse(s)?, opts.q, opts.exec())?],
        None => verify::verify_all(&w, opts.q, opts.exec())?,
    };
    let ok = reports.iter().all(|r| r.verdict == Verdict::Pass);
    let json = json!({
        "name": name,
        "mirror": opts.mirror,
        "reports": reports.iter().map(VerifyReport::to_json).collect::<Vec<_>>(),
        "pass": ok,
    });
    let out = emit(opts.format, &VERIFY_HEADERS, &report_rows(&reports, None), json, Some(format!("{name}:")))?;
    Ok((out, ok))
}

fn cmd_sweep(opts: &Opts, n: usize, samples: usize, max_terms: usize, seed: u64) -> Result<(String, bool)> {
    if opts.p != 0 {
        bail!("verify works over the integers; drop --p");
    }
    if opts.mirror {
        bail!("--mirror does not apply to generated sweeps");
    }
    let all = verify::sweep(n, samples, max_terms, seed, opts.q, opts.exec())?;
    let mut rows = Vec::new();
    let mut counts = [0usize; 3];
    for (s, reps) in all.iter().enumerate() {
        rows.extend(report_rows(reps, Some(s)));
        for r in reps {
            counts[r.verdict as usize] += 1;
        }
    }
    let ok = counts[1] == 0 && counts[2] == 0;
    let json = json!({
        "n": n,
        "samples": samples,
        "max_terms": max_terms,
        "seed": seed,
        "q": opts.q,
        "results": all.iter().map(|reps| reps.iter().map(VerifyReport::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "counts": {"pass": counts[0], "fail": counts[1], "indeterminate": counts[2]},
        "pass": ok,
    });
    let preface = format!(
        "sweep n={n} samples={samples} seed={seed}: {} pass, {} fail, {} indeterminate",
        counts[0], counts[1], counts[2]
    );
    let mut headers = vec!["sample", "word"];
    headers.extend(VERIFY_HEADERS);
    Ok((emit(opts.format, &headers, &rows, json, Some(preface))?, ok))
}

fn word_out(w: &TangleWord, json: bool) -> Result<String> {
    Ok(if json { serde_json::to_string_pretty(w)? + "\n" } else { w.to_text() })
}

fn cmd_gen(what: &GenCmd) -> Result<String> {
    match what {
        GenCmd::Milnor { index, sign, json } => word_out(&milnor_link(&MilnorLinkSpec::new(index.clone(), *sign)?)?, *json),
        GenCmd::Bandsum { a, b, json } => word_out(&band_sum(&read_word(a)?, &read_word(b)?)?, *json),
    }
}

fn cmd_corpus_list(format: Format) -> Result<String> {
    let entries = brunnian::corpus()?;
    let mut rows = Vec::new();
    let mut list = Vec::new();
    for e in &entries {
        let expected: Vec<String> = e
            .expected
            .iter()
            .map(|x| match x {
                Expected::MuBar { index, value } => format!("mubar({index})={value}"),
                Expected::MSet { index, values } => format!(
                    "M({index})={{{}}}",
                    values.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
                ),
            })
            .collect();
        let components = e.word.component_count() + 1;
        rows.push(vec![e.name.clone(), components.to_string(), e.word.crossing_count().to_string(), expected.join(" ")]);
        list.push(json!({
            "name": e.name,
            "components": components,
            "word": e.word.to_text(),
            "expected": expected,
        }));
    }
    rows.push(vec!["trivial_<k>".into(), "k".into(), "0".into(), String::new()]);
    emit(format, &["name", "components", "crossings", "expected"], &rows, json!(list), None)
}

fn run(cli: Cli) -> Result<(String, bool)> {
    Ok(match &cli.cmd {
        Cmd::Mu { input, opts, index } => (cmd_mu(input, opts, index)?, true),
        Cmd::Mset { input, opts, index } => (cmd_mset(input, opts, index)?, true),
        Cmd::Cover { input, opts, eps } => (cmd_cover(input, opts, eps.as_deref())?, true),
        Cmd::Verify { input, opts, index, sweep, gen: Generator::Milnor, n, samples, max_terms, seed } => {
            if *sweep {
                cmd_sweep(opts, *n, *samples, *max_terms, *seed)?
            } else {
                cmd_verify(input, opts, index.as_deref())?
            }
        }
        Cmd::Gen { what } => (cmd_gen(what)?, true),
        Cmd::Corpus { what: CorpusCmd::List { format } } => (cmd_corpus_list(*format)?, true),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((out, ok)) => {
            let _ = io::stdout().write_all(out.as_bytes());
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
