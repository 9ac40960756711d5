use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use svcnet::community::{
    community_domain_mixing, domain_labels, parse_domains_csv, size_distribution_csv, walktrap, DEFAULT_WALK_LENGTH,
};
use svcnet::compose::{ComposeError, Composer, CompositionRequest, Strategy};
use svcnet::model::{generate_collection, import_wsdl, Collection, GeneratorParams, ImportReport, Service};
use svcnet::network::{
    build_operation_network, build_parameter_network, decompose, BuildOptions, InteractionNetwork, Invocation,
};
use svcnet::ontology::{ConceptRef, MatchLevel, Ontology, OntologyRegistry};
use svcnet::report::{analyze_collection, AnalysisOptions};

#[derive(Debug, Error)]
enum CliError {
    /// Bad input: exit status 2.
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

type Result<T> = std::result::Result<T, CliError>;

fn input(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

#[derive(Parser)]
#[command(name = "svcnet", version, about = "Interaction networks of semantic Web services")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an operation or parameter network and export it.
    Extract(ExtractArgs),
    /// Component, topology, degree and community analysis of a collection.
    Analyze(AnalyzeArgs),
    /// Walktrap communities of a network's giant component.
    Communities(CommunitiesArgs),
    /// Search for a composition reaching the goal concepts.
    Compose(ComposeArgs),
    /// Generate a synthetic collection and its ontology.
    Generate(GenerateArgs),
    /// Convert a directory of SAWSDL-annotated WSDL files to a collection.
    Import(ImportArgs),
}

#[derive(Args)]
struct Inputs {
    /// Collection JSON.
    #[arg(long)]
    collection: PathBuf,
    /// Ontology JSON; repeat for several ontologies.
    #[arg(long = "ontology", required = true)]
    ontologies: Vec<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NetworkArg {
    Operation,
    Parameter,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Dot,
    Json,
}

fn parse_level(s: &str) -> std::result::Result<MatchLevel, String> {
    s.parse()
}

fn parse_invocation(s: &str) -> std::result::Result<Invocation, String> {
    s.parse()
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    s.parse()
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_enum, default_value = "operation")]
    network: NetworkArg,
    /// exact, plugin, subsume or fitin (operation networks only).
    #[arg(long = "match", value_parser = parse_level)]
    level: Option<MatchLevel>,
    /// full or partial (operation networks only).
    #[arg(long, value_parser = parse_invocation)]
    invocation: Option<Invocation>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
    /// Output file; standard output when omitted or `-`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Directory receiving analysis.json, tables.md and the CSV series.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 32)]
    er_samples: usize,
    #[arg(long, default_value_t = 100)]
    bootstrap: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_WALK_LENGTH)]
    walk_length: usize,
    /// Analyse all four operation networks and the parameter network.
    #[arg(long)]
    all_levels: bool,
    #[arg(long = "match", value_parser = parse_level, default_value = "exact")]
    level: MatchLevel,
    #[arg(long, value_parser = parse_invocation, default_value = "full")]
    invocation: Invocation,
}

#[derive(Args)]
struct CommunitiesArgs {
    /// Collection JSON (with --ontology).
    #[arg(long, conflicts_with = "network_json", requires = "ontologies")]
    collection: Option<PathBuf>,
    #[arg(long = "ontology")]
    ontologies: Vec<PathBuf>,
    /// A network exported with `extract --format json`.
    #[arg(long, required_unless_present = "collection")]
    network_json: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "operation")]
    network: NetworkArg,
    #[arg(long = "match", value_parser = parse_level, default_value = "exact")]
    level: MatchLevel,
    #[arg(long, value_parser = parse_invocation, default_value = "full")]
    invocation: Invocation,
    #[arg(long, default_value_t = DEFAULT_WALK_LENGTH)]
    walk_length: usize,
    /// `node,domain` CSV; unlisted nodes are unclassified.
    #[arg(long)]
    domains: Option<PathBuf>,
    /// Directory receiving partition.json, membership.csv, sizes.csv and domains.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ComposeArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Provided concepts, comma separated.
    #[arg(long, value_delimiter = ',')]
    provided: Vec<String>,
    /// Goal concepts, comma separated.
    #[arg(long = "goal", value_delimiter = ',', required = true)]
    goals: Vec<String>,
    #[arg(long, value_parser = parse_level, default_value = "exact")]
    level: MatchLevel,
    /// forward, backward, hub-seeded, community-pruned or two-phase.
    #[arg(long, value_parser = parse_strategy, default_value = "forward")]
    strategy: Strategy,
    #[arg(long, default_value_t = 8)]
    max_depth: usize,
    /// Walk length of the communities used by community-pruned search.
    #[arg(long, default_value_t = DEFAULT_WALK_LENGTH)]
    walk_length: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    services: usize,
    #[arg(long, default_value_t = 1)]
    ops_per_service: usize,
    #[arg(long)]
    concepts: usize,
    /// Zipf exponent of concept popularity.
    #[arg(long, default_value_t = 1.0)]
    skew: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory receiving collection.json and ontology.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ImportArgs {
    /// Directory scanned for *.wsdl and *.xml files.
    #[arg(long)]
    wsdl_dir: PathBuf,
    /// Collection JSON to write.
    #[arg(long)]
    out: PathBuf,
    /// Optional JSON import report.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| input(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) if p != Path::new("-") => write(p, contents),
        _ => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_registry(paths: &[PathBuf]) -> Result<OntologyRegistry> {
    let mut reg = OntologyRegistry::new();
    for path in paths {
        let ont = Ontology::from_json(&read(path)?).map_err(|e| input(path, e))?;
        reg.register(ont).map_err(|e| input(path, e))?;
    }
    Ok(reg)
}

fn load(inputs: &Inputs) -> Result<(Collection, OntologyRegistry)> {
    let reg = load_registry(&inputs.ontologies)?;
    let path = &inputs.collection;
    let coll = Collection::from_json(&read(path)?).map_err(|e| input(path, e))?;
    coll.validate(&reg).map_err(|e| input(path, e))?;
    Ok((coll, reg))
}

fn build(
    coll: &Collection,
    reg: &OntologyRegistry,
    network: NetworkArg,
    level: MatchLevel,
    invocation: Invocation,
) -> InteractionNetwork {
    let built = match network {
        NetworkArg::Operation => build_operation_network(coll, reg, level, invocation, BuildOptions::default()),
        NetworkArg::Parameter => build_parameter_network(coll, reg),
    };
    built.expect("collection validated against the registry")
}

fn extract(args: ExtractArgs) -> Result<ExitCode> {
    let (coll, reg) = load(&args.inputs)?;
    if matches!(args.network, NetworkArg::Parameter) && (args.level.is_some() || args.invocation.is_some()) {
        eprintln!("warning: --match and --invocation are ignored for parameter networks");
    }
    let net = build(
        &coll,
        &reg,
        args.network,
        args.level.unwrap_or(MatchLevel::Exact),
        args.invocation.unwrap_or(Invocation::Full),
    );
    let text = match args.format {
        FormatArg::Tsv => net.to_tsv(),
        FormatArg::Dot => net.to_dot(),
        FormatArg::Json => net.to_json(),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let (coll, reg) = load(&args.inputs)?;
    let opts = AnalysisOptions {
        er_samples: args.er_samples,
        bootstrap: args.bootstrap,
        seed: args.seed,
        walk_length: args.walk_length,
        level: args.level,
        invocation: args.invocation,
        all_levels: args.all_levels,
    };
    if opts.er_samples == 0 || opts.walk_length == 0 {
        return Err(CliError::Input("--er-samples and --walk-length must be positive".into()));
    }
    let bundle = analyze_collection(&coll, &reg, &opts).map_err(|e| input(&args.inputs.collection, e))?;
    create_dir(&args.out_dir)?;
    for (name, contents) in bundle.files() {
        write(&args.out_dir.join(name), &contents)?;
    }
    print!("{}", bundle.to_markdown());
    Ok(ExitCode::SUCCESS)
}

fn communities(args: CommunitiesArgs) -> Result<ExitCode> {
    let net = match (&args.network_json, &args.collection) {
        (Some(path), _) => InteractionNetwork::from_json(&read(path)?).map_err(|e| input(path, e))?,
        (None, Some(collection)) => {
            let (coll, reg) = load(&Inputs {
                collection: collection.clone(),
                ontologies: args.ontologies.clone(),
            })?;
            build(&coll, &reg, args.network, args.level, args.invocation)
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let domains = match &args.domains {
        Some(path) => parse_domains_csv(&read(path)?).map_err(|e| input(path, e))?,
        None => Default::default(),
    };
    let giant = decompose(&net).giant().map(<[usize]>::to_vec).unwrap_or_default();
    let sub = net.induced(&giant);
    let result = walktrap(&sub.graph().undirected(), args.walk_length)
        .map_err(|e| CliError::Input(format!("{}: {e}", net.name())))?;
    let p = &result.partition;
    create_dir(&args.out_dir)?;
    write(&args.out_dir.join("partition.json"), &p.to_json(sub.nodes()))?;
    write(&args.out_dir.join("membership.csv"), &p.membership_csv(sub.nodes()))?;
    write(&args.out_dir.join("sizes.csv"), &size_distribution_csv(p))?;
    if args.domains.is_some() {
        let labels = domain_labels(sub.nodes(), &domains);
        write(&args.out_dir.join("domains.csv"), &community_domain_mixing(p, &labels).to_csv())?;
    }
    println!(
        "{}: {} nodes in the giant component, {} communities, modularity {:.3}",
        net.name(),
        sub.n_nodes(),
        p.len(),
        p.modularity()
    );
    Ok(ExitCode::SUCCESS)
}

fn concepts(raw: &[String]) -> Result<Vec<ConceptRef>> {
    raw.iter()
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| CliError::Input(format!("concept `{s}`: {e}"))))
        .collect()
}

fn compose(args: ComposeArgs) -> Result<ExitCode> {
    let (coll, reg) = load(&args.inputs)?;
    let request = CompositionRequest {
        provided: concepts(&args.provided)?,
        goals: concepts(&args.goals)?,
        level: args.level,
        max_depth: args.max_depth,
        strategy: args.strategy,
    };
    let composer = Composer::new(&coll, &reg).map_err(|e| input(&args.inputs.collection, e))?;
    let membership = match args.strategy {
        Strategy::CommunityPruned => match composer.operation_communities(args.level, args.walk_length) {
            Ok(m) => Some(m),
            Err(ComposeError::Community(e)) => {
                eprintln!("warning: no communities ({e}); searching unpruned");
                None
            }
            Err(e) => return Err(CliError::Input(e.to_string())),
        },
        _ => None,
    };
    let outcome = composer
        .compose(&request, membership.as_deref())
        .map_err(|e| CliError::Input(e.to_string()))?;
    print!("{}", outcome.to_json());
    Ok(if outcome.is_solvable() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn generate(args: GenerateArgs) -> Result<ExitCode> {
    let generated = generate_collection(&GeneratorParams {
        n_services: args.services,
        ops_per_service: args.ops_per_service,
        n_concepts: args.concepts,
        concept_reuse_skew: args.skew,
        seed: args.seed,
    })
    .map_err(|e| CliError::Input(e.to_string()))?;
    create_dir(&args.out_dir)?;
    write(&args.out_dir.join("collection.json"), &generated.collection.to_json())?;
    write(&args.out_dir.join("ontology.json"), &generated.ontology.to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn import(args: ImportArgs) -> Result<ExitCode> {
    let dir = &args.wsdl_dir;
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| input(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| input(dir, e)))
        .collect::<Result<_>>()?;
    files.retain(|p| {
        p.is_file() && p.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("wsdl") || ext.eq_ignore_ascii_case("xml"))
    });
    files.sort();
    let mut services: Vec<Service> = Vec::new();
    let mut report = ImportReport::default();
    for path in &files {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let mut imported = import_wsdl(&read(path)?, &stem).map_err(|e| input(path, e))?;
        imported.report.file = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        for w in &imported.report.warnings {
            eprintln!("warning: {}: {w}", path.display());
        }
        services.extend(imported.services);
        report.push(imported.report);
    }
    let collection = Collection::new(services).map_err(|e| input(dir, e))?;
    write(&args.out, &collection.to_json())?;
    if let Some(path) = &args.report {
        let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
        json.push('\n');
        write(path, &json)?;
    }
    eprintln!(
        "imported {} services, {} operations from {} files ({} rejected, {} parts skipped)",
        report.services,
        report.operations_imported,
        files.len(),
        report.operations_rejected,
        report.parts_skipped
    );
    Ok(ExitCode::SUCCESS)
}

/// Size the global pool from `SVCNET_THREADS` (unset or 0: one per core).
fn configure_threads() -> Result<()> {
    let threads = match std::env::var("SVCNET_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Input(format!("SVCNET_THREADS: expected a thread count, got `{v}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Input(format!("SVCNET_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = configure_threads().and_then(|()| match cli.command {
        Command::Extract(a) => extract(a),
        Command::Analyze(a) => analyze(a),
        Command::Communities(a) => communities(a),
        Command::Compose(a) => compose(a),
        Command::Generate(a) => generate(a),
        Command::Import(a) => import(a),
    });
    match run {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
