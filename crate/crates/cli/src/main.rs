//! `amalgam`: decide congruence extension and amalgamation properties of
//! varieties generated by finite algebras given as JSON operation tables.

mod span;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use amalgam_core::catalog;
use amalgam_core::format::{read_algebra, to_pretty, write_algebra};
use amalgam_core::homsearch::search_amalgam;
use amalgam_core::{
    canonical_form, check_join_ap, fsi_star, AlgebraSet, AmalgamMode, DecideOptions, DecisionReport, Error,
    FiniteAlgebra, GeneratorSet, Limits, Property, Session, Verdict,
};

const EXIT_DECIDED: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "amalgam", version, about = "Decide CEP, EP, AP, TIP, SE and SAP for finitely generated varieties")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Treat congruence distributivity as given instead of searching for Jonsson terms.
    #[arg(long, global = true)]
    assume_cd: bool,
    /// Treat arithmeticity as given instead of searching for the term conditions.
    #[arg(long, global = true)]
    assume_arithmetical: bool,
    /// Largest algebra accepted or constructed.
    #[arg(long, global = true, default_value_t = 64)]
    max_algebra_size: usize,
    /// Largest number of isomorphism types in a computed class.
    #[arg(long, global = true, default_value_t = 256)]
    max_class: usize,
    /// Largest free algebra computed while testing term conditions.
    #[arg(long, global = true, default_value_t = 20_000)]
    max_free: usize,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Output directory (fsi, decide, joinap) or file (catalog export).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Record per-phase timings in reports.
    #[arg(long, global = true)]
    timings: bool,
}

impl GlobalArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_algebra_size: self.max_algebra_size,
            max_class: self.max_class,
            max_free: self.max_free,
            ..Limits::default()
        }
    }

    fn options(&self) -> DecideOptions {
        DecideOptions {
            assume_cd: self.assume_cd,
            assume_arithmetical: self.assume_arithmetical,
            timings: self.timings,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check algebra files.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Compute the finitely subdirectly irreducible members of V(paths).
    Fsi {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Decide a property of V(paths).
    Decide {
        property: PropertyArg,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Search an amalgam for a span among the algebras of a directory.
    Amalgamate {
        span_file: PathBuf,
        class_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Plain)]
        mode: ModeArg,
    },
    /// Built-in algebras.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// Check the amalgamation property for the join of two varieties.
    Joinap {
        #[arg(long, num_args = 1.., required = true)]
        left: Vec<PathBuf>,
        #[arg(long, num_args = 1.., required = true)]
        right: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List the catalog entries.
    List,
    /// Print or write one catalog algebra.
    Export { name: String, params: Vec<usize> },
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Cep,
    Ep,
    Ap,
    Tip,
    Se,
    Sap,
}

impl From<PropertyArg> for Property {
    fn from(p: PropertyArg) -> Self {
        match p {
            PropertyArg::Cep => Property::Cep,
            PropertyArg::Ep => Property::Ep,
            PropertyArg::Ap => Property::Ap,
            PropertyArg::Tip => Property::Tip,
            PropertyArg::Se => Property::Se,
            PropertyArg::Sap => Property::Sap,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Plain,
    OneSided,
    Strong,
}

impl From<ModeArg> for AmalgamMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Plain => AmalgamMode::Plain,
            ModeArg::OneSided => AmalgamMode::OneSided,
            ModeArg::Strong => AmalgamMode::Strong,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let resource = e.chain().any(|c| c.downcast_ref::<Error>().is_some_and(Error::is_resource_limit));
            ExitCode::from(if resource { EXIT_RESOURCE } else { EXIT_INPUT })
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { paths } => Ok(cmd_validate(paths, g.json)),
        Command::Fsi { paths } => cmd_fsi(paths, g),
        Command::Decide { property, paths } => cmd_decide((*property).into(), paths, g),
        Command::Amalgamate {
            span_file,
            class_dir,
            mode,
        } => cmd_amalgamate(span_file, class_dir, (*mode).into(), g),
        Command::Catalog { command } => cmd_catalog(command, g),
        Command::Joinap { left, right } => cmd_joinap(left, right, g),
    }
}

fn load(path: &Path) -> anyhow::Result<FiniteAlgebra> {
    read_algebra(path).with_context(|| format!("{}", path.display()))
}

fn generators(paths: &[PathBuf], limits: Limits) -> anyhow::Result<GeneratorSet> {
    let algs = paths.iter().map(|p| load(p)).collect::<anyhow::Result<Vec<_>>>()?;
    Ok(GeneratorSet::new(algs, limits)?)
}

fn cmd_validate(paths: &[PathBuf], as_json: bool) -> u8 {
    let mut code = EXIT_DECIDED;
    let mut rows = Vec::new();
    for path in paths {
        match read_algebra(path) {
            Ok(alg) => {
                let ops: Vec<_> = alg.signature().symbols().iter().map(|s| format!("{}/{}", s.name, s.arity)).collect();
                if as_json {
                    rows.push(json!({"path": path.display().to_string(), "ok": true, "name": alg.name(), "size": alg.size(), "ops": ops}));
                } else {
                    println!("OK {}: {} (size {}, ops [{}])", path.display(), alg.name(), alg.size(), ops.join(", "));
                }
            }
            Err(e) => {
                code = EXIT_INPUT;
                if as_json {
                    rows.push(json!({"path": path.display().to_string(), "ok": false, "error": e.to_string()}));
                } else {
                    println!("ERROR {}: {e}", path.display());
                }
            }
        }
    }
    if as_json {
        print!("{}", to_pretty(&json!(rows)));
    }
    code
}

/// A file name made from an algebra name.
fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn cmd_fsi(paths: &[PathBuf], g: &GlobalArgs) -> anyhow::Result<u8> {
    let gens = generators(paths, g.limits())?;
    let k = fsi_star(&gens)?;
    let mut index = Vec::new();
    for (i, alg) in k.iter().enumerate() {
        let file = format!("{:03}_{}.json", i, file_stem(alg.name()));
        index.push(json!({
            "file": file,
            "name": alg.name(),
            "canonical_hash": k.forms()[i].hash_hex(),
            "size": alg.size(),
            "fsi": true,
        }));
    }
    if let Some(dir) = &g.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (alg, entry) in k.iter().zip(&index) {
            let file = dir.join(entry["file"].as_str().expect("file is a string"));
            write_algebra(&file, alg).with_context(|| format!("writing {}", file.display()))?;
        }
        fs::write(dir.join("index.json"), to_pretty(&json!(index)))?;
    }
    if g.json {
        print!("{}", to_pretty(&json!(index)));
    } else {
        let trivial = if k.has_trivial() { ", including the trivial algebra" } else { "" };
        println!("{} FSI members up to isomorphism{trivial}", k.len());
        for alg in k.iter() {
            println!("  {} (size {})", alg.name(), alg.size());
        }
    }
    Ok(EXIT_DECIDED)
}

fn emit_report(report: &DecisionReport, g: &GlobalArgs, file: &str) -> anyhow::Result<u8> {
    if g.json {
        print!("{}", report.to_json_string());
    } else {
        print!("{}", report.to_text());
    }
    if let Some(dir) = &g.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        fs::write(dir.join(file), report.to_json_string())?;
    }
    Ok(match report.verdict {
        Verdict::Undecided => EXIT_UNDECIDED,
        _ => EXIT_DECIDED,
    })
}

fn cmd_decide(property: Property, paths: &[PathBuf], g: &GlobalArgs) -> anyhow::Result<u8> {
    let gens = generators(paths, g.limits())?;
    let report = Session::new(gens, g.options()).decide(property)?;
    emit_report(&report, g, &format!("{}.json", property.as_str().to_lowercase()))
}

fn cmd_joinap(left: &[PathBuf], right: &[PathBuf], g: &GlobalArgs) -> anyhow::Result<u8> {
    let g1 = generators(left, g.limits())?;
    let g2 = generators(right, g.limits())?;
    let report = check_join_ap(&g1, &g2, g.options())?;
    emit_report(&report, g, "joinap.json")
}

/// Algebra files of a directory in file-name order, skipping `index.json`.
fn read_class_dir(dir: &Path, limits: &Limits) -> anyhow::Result<Vec<FiniteAlgebra>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    files.retain(|p| p.extension().is_some_and(|x| x == "json") && p.file_name().is_some_and(|n| n != "index.json"));
    files.sort();
    let mut out = Vec::with_capacity(files.len());
    for f in &files {
        let alg = load(f)?;
        if alg.size() > limits.max_algebra_size {
            return Err(Error::resource(format!("size of `{}`", alg.name()), limits.max_algebra_size).into());
        }
        out.push(alg);
    }
    if out.is_empty() {
        bail!("{} contains no algebra files", dir.display());
    }
    Ok(out)
}

fn cmd_amalgamate(span_file: &Path, class_dir: &Path, mode: AmalgamMode, g: &GlobalArgs) -> anyhow::Result<u8> {
    let limits = g.limits();
    let algs = read_class_dir(class_dir, &limits)?;
    let span = span::load_span(span_file, &algs)?;
    let k = AlgebraSet::from_algebras(algs)?;
    if k.len() > limits.max_class {
        return Err(Error::resource("class size", limits.max_class).into());
    }
    let found = search_amalgam(&span, &k, mode)?;
    if g.json {
        let v = match &found {
            Some(am) => json!({"span": span.to_json(), "mode": mode, "amalgam": am.to_json()}),
            None => json!({"span": span.to_json(), "mode": mode, "amalgam": null}),
        };
        print!("{}", to_pretty(&v));
        return Ok(EXIT_DECIDED);
    }
    match found {
        Some(am) => {
            let d = &am.target;
            let show = |src: &FiniteAlgebra, img: &[usize]| {
                img.iter()
                    .enumerate()
                    .map(|(x, &y)| format!("{}->{}", src.label(x), d.label(y)))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            println!("amalgam in {} (size {}){}", d.name(), d.size(), if am.strong { ", strong" } else { "" });
            println!("  psiB: {}", show(&span.b, am.psi_b.image()));
            println!("  psiC: {}", show(&span.c, am.psi_c.image()));
        }
        None => println!("NONE"),
    }
    Ok(EXIT_DECIDED)
}

fn cmd_catalog(command: &CatalogCommand, g: &GlobalArgs) -> anyhow::Result<u8> {
    match command {
        CatalogCommand::List => {
            for (name, params, about) in catalog::ENTRIES {
                let args = if *params == 0 { String::new() } else { " <n>".to_string() };
                println!("{name}{args}: {about}");
            }
        }
        CatalogCommand::Export { name, params } => {
            let alg = catalog::by_name(name, params)?;
            match &g.out {
                Some(path) => {
                    write_algebra(path, &alg).with_context(|| format!("writing {}", path.display()))?;
                    if !g.json {
                        println!("wrote {} ({})", path.display(), canonical_form(&alg).hash_hex());
                    }
                }
                None => print!("{}", amalgam_core::format::algebra_to_string(&alg)),
            }
        }
    }
    Ok(EXIT_DECIDED)
}
