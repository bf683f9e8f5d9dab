mod backends;
mod settings;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sosbias::analysis::{correlation_matrix, render_report, BundledStats, ReportInputs, SeriesTable, SosSlice};
use sosbias::dataset::{generate, parse_templates, PairDataset, Template};
use sosbias::debias::{
    contextualize, debiased_backend, embed, estimate_subspace, parse_corpus, BiasSubspace, PooledEncoder, Pooling,
    ProjectionSite, DEFAULT_CAP_PER_WORD,
};
use sosbias::fairness::{
    contractions_version, gap_report, parse_predictions, preprocess, split_indices, GapReport, PairingTable,
    PreprocessConfig, SplitSpec, DEFAULT_THRESHOLD,
};
use sosbias::lexicon::{Group, Lexicon, SensitiveAttribute};
use sosbias::provenance::RunConfig;
use sosbias::scoring::{parse_external_pairs, score_external_pairs, sos_score, MaskedLm, ScoreFilter, SosResult};

use settings::ConfigFile;

/// Progress line on stdout; a closed pipe is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "sosbias",
    version,
    about = "Offensive-stereotyping bias audits for masked language models"
)]
struct Cli {
    /// `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for shuffles and seeded toy backends (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for output artifacts (default: current directory).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a lexicon and templates into the sentence-pair dataset.
    GenerateDataset(GenerateArgs),
    /// Score a pair dataset or an external pair file with a backend.
    Score(ScoreArgs),
    /// Estimate the profanity subspace from a sentence corpus.
    DebiasEstimate(DebiasArgs),
    /// Score with the profanity subspace removed from the backend.
    ScoreDebiased(ScoreDebiasedArgs),
    /// Classifier fairness utilities.
    Fairness {
        #[command(subcommand)]
        command: FairnessCommand,
    },
    /// Pearson correlation matrix between two groups of series.
    Correlate(CorrelateArgs),
    /// Text report over SOS results, debiasing runs and fairness gaps.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Lexicon file (default: the shipped reference lexicon).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Template file (default: the single shipped template).
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(long, default_value = "dataset.tsv")]
    output: String,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Generated pair dataset.
    #[arg(long, conflicts_with = "external")]
    dataset: Option<PathBuf>,
    /// CSV in the CrowS-Pairs layout (sent_more, sent_less, bias_type).
    #[arg(long)]
    external: Option<PathBuf>,
    /// Restrict a dataset to one sensitive attribute.
    #[arg(long)]
    attribute: Option<SensitiveAttribute>,
    /// Restrict a dataset to marginalized or non_marginalized identities.
    #[arg(long)]
    group: Option<Group>,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    input: InputArgs,
    /// toy-uniform:V, toy-table:PATH, toy-linear:DIM:BUCKETS[:SEED], hf:MODEL or process:COMMAND
    #[arg(long)]
    backend: Option<String>,
    #[arg(long, default_value = "sos_result.json")]
    output: String,
}

#[derive(Args)]
struct DebiasArgs {
    #[arg(long)]
    backend: Option<String>,
    /// One sentence per line.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Lexicon whose word pairs are contextualized (default: reference).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Number of principal components (default 1).
    #[arg(long)]
    k: Option<usize>,
    /// mean or first_token (default mean).
    #[arg(long)]
    pooling: Option<Pooling>,
    /// Maximum matches used per list word (default 1000).
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, default_value = "subspace.txt")]
    output: String,
}

#[derive(Args)]
struct ScoreDebiasedArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    backend: Option<String>,
    /// Subspace file from debias-estimate.
    #[arg(long)]
    subspace: Option<PathBuf>,
    /// hidden_states (projected states feed the head) or sentence_representation (head untouched).
    #[arg(long)]
    projection_site: Option<ProjectionSite>,
    #[arg(long, default_value = "sos_result_debiased.json")]
    output: String,
}

#[derive(Subcommand)]
enum FairnessCommand {
    /// FPR, TPR and AUC gaps between paired identity groups.
    Gaps(GapsArgs),
    /// Clean texts and split records 40/30/30 with a seeded shuffle.
    Split(SplitArgs),
}

#[derive(Args)]
struct GapsArgs {
    /// Tab-separated id, true_label, score, subgroups.
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Pairing table (default: female/male, black+asian/white, jewish+muslim/christian).
    #[arg(long)]
    pairings: Option<PathBuf>,
    /// Decision threshold; score >= threshold is positive (default 0.5).
    #[arg(long)]
    threshold: Option<f64>,
    /// Compare each marginalized identity on its own instead of pooling.
    #[arg(long)]
    per_identity: bool,
    /// Model name written in the report rows.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, default_value = "gap_report.tsv")]
    output: String,
}

#[derive(Args)]
struct SplitArgs {
    /// Tab-separated file with a header line.
    #[arg(long)]
    input: PathBuf,
    /// Column to clean with the text preprocessing steps.
    #[arg(long)]
    text_column: Option<String>,
    #[arg(long, default_value_t = 0.4)]
    train: f64,
    #[arg(long, default_value_t = 0.3)]
    validation: f64,
    #[arg(long, default_value_t = 0.3)]
    test: f64,
}

#[derive(Args)]
struct CorrelateArgs {
    /// Series table files.
    #[arg(long)]
    series: Vec<PathBuf>,
    /// SOS result files, turned into one series per backend.
    #[arg(long)]
    sos: Vec<PathBuf>,
    /// Which SOS counts to use: all, marginalized or non_marginalized (default marginalized).
    #[arg(long)]
    sos_slice: Option<SosSlice>,
    /// Add the bundled online-hate survey series (group online_hate).
    #[arg(long)]
    online_hate: bool,
    /// Series group for matrix rows.
    #[arg(long)]
    rows: Option<String>,
    /// Series group for matrix columns.
    #[arg(long)]
    cols: Option<String>,
    /// Also render the matrix as a PNG heatmap.
    #[arg(long)]
    heatmap: bool,
    #[arg(long, default_value = "correlation.tsv")]
    output: String,
}

#[derive(Args)]
struct ReportArgs {
    /// SOS result files.
    #[arg(long)]
    sos: Vec<PathBuf>,
    /// Result before debiasing; pairs with the --after at the same position.
    #[arg(long)]
    before: Vec<PathBuf>,
    #[arg(long)]
    after: Vec<PathBuf>,
    /// Gap report files.
    #[arg(long)]
    gaps: Vec<PathBuf>,
    #[arg(long, default_value = "report.txt")]
    output: String,
}

struct Session {
    config: ConfigFile,
    seed: u64,
    out_dir: PathBuf,
}

impl Session {
    fn output(&self, name: &str) -> Result<PathBuf> {
        if name.contains('/') || name.contains('\\') || name.is_empty() {
            bail!("output name {name:?} must be a plain file name; use --out-dir for the directory");
        }
        std::fs::create_dir_all(&self.out_dir)
            .with_context(|| format!("creating output directory {}", self.out_dir.display()))?;
        Ok(self.out_dir.join(name))
    }

    fn write(&self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        let path = self.output(name)?;
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn read_text(path: &Path) -> Result<(String, Vec<u8>)> {
    let bytes = read_bytes(path)?;
    let text = String::from_utf8(bytes.clone()).with_context(|| format!("{} is not UTF-8", path.display()))?;
    Ok((text, bytes))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Library errors often embed their source; print each cause once.
            let mut message = String::new();
            for cause in e.chain().map(|c| c.to_string()) {
                if !message.ends_with(&cause) {
                    if !message.is_empty() {
                        message.push_str(": ");
                    }
                    message.push_str(&cause);
                }
            }
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let seed = config.pick(cli.seed, "seed")?.unwrap_or(0);
    let out_dir = config
        .pick(cli.out_dir, "out-dir")?
        .unwrap_or_else(|| PathBuf::from("."));
    let ctx = Session { config, seed, out_dir };
    match cli.command {
        Command::GenerateDataset(a) => generate_dataset(&ctx, a),
        Command::Score(a) => score(&ctx, a),
        Command::DebiasEstimate(a) => debias_estimate(&ctx, a),
        Command::ScoreDebiased(a) => score_debiased(&ctx, a),
        Command::Fairness {
            command: FairnessCommand::Gaps(a),
        } => fairness_gaps(&ctx, a),
        Command::Fairness {
            command: FairnessCommand::Split(a),
        } => fairness_split(&ctx, a),
        Command::Correlate(a) => correlate(&ctx, a),
        Command::Report(a) => report(&ctx, a),
    }
}

fn load_lexicon(ctx: &Session, flag: Option<PathBuf>, run: &mut RunConfig) -> Result<Lexicon> {
    match ctx.config.pick(flag, "lexicon")? {
        Some(p) => {
            let (text, bytes) = read_text(&p)?;
            run.input("lexicon", &bytes);
            Lexicon::parse(&text).with_context(|| format!("lexicon {}", p.display()))
        }
        None => {
            let lex = Lexicon::reference();
            run.set("lexicon", "reference");
            Ok(lex)
        }
    }
}

fn generate_dataset(ctx: &Session, a: GenerateArgs) -> Result<()> {
    let mut run = RunConfig::new("generate-dataset");
    let lexicon = load_lexicon(ctx, a.lexicon, &mut run)?;
    let templates = match ctx.config.pick(a.templates, "templates")? {
        Some(p) => {
            let (text, bytes) = read_text(&p)?;
            run.input("templates", &bytes);
            parse_templates(&text).with_context(|| format!("templates {}", p.display()))?
        }
        None => {
            run.set("templates", "default");
            Template::defaults()
        }
    };
    let mut dataset = generate(&lexicon, &templates).context("generating dataset")?;
    dataset.provenance = run.provenance();
    let path = ctx.write(&a.output, dataset.to_text().as_bytes())?;
    say!("wrote {} sentence pairs to {}", dataset.len(), path.display());
    for attr in SensitiveAttribute::ALL {
        say!("  {attr}: {}", dataset.count_for(attr, None));
    }
    Ok(())
}

enum Input {
    Dataset(PairDataset, ScoreFilter),
    External(Vec<sosbias::scoring::ExternalPair>),
}

fn load_input(ctx: &Session, a: InputArgs, run: &mut RunConfig) -> Result<Input> {
    let dataset: Option<PathBuf> = ctx.config.pick(a.dataset, "dataset")?;
    let external: Option<PathBuf> = ctx.config.pick(a.external, "external")?;
    let filter = ScoreFilter {
        attribute: ctx.config.pick(a.attribute, "attribute")?,
        group: ctx.config.pick(a.group, "group")?,
    };
    match (dataset, external) {
        (Some(p), None) => {
            let (text, bytes) = read_text(&p)?;
            run.input("dataset", &bytes);
            if let Some(attr) = filter.attribute {
                run.set("attribute", attr);
            }
            if let Some(g) = filter.group {
                run.set("group", g);
            }
            let ds = PairDataset::parse(&text).with_context(|| format!("dataset {}", p.display()))?;
            Ok(Input::Dataset(ds, filter))
        }
        (None, Some(p)) => {
            if filter.attribute.is_some() || filter.group.is_some() {
                bail!("--attribute and --group apply only to generated datasets");
            }
            let (text, bytes) = read_text(&p)?;
            run.input("external", &bytes);
            Ok(Input::External(
                parse_external_pairs(&text).with_context(|| format!("pair file {}", p.display()))?,
            ))
        }
        (Some(_), Some(_)) => bail!("give either --dataset or --external, not both"),
        (None, None) => bail!("missing input: give --dataset or --external"),
    }
}

fn run_scoring(input: &Input, backend: &dyn MaskedLm) -> Result<SosResult> {
    Ok(match input {
        Input::Dataset(ds, filter) => sos_score(ds, backend, *filter).context("scoring dataset")?,
        Input::External(pairs) => score_external_pairs(pairs, backend).context("scoring pair file")?,
    })
}

fn print_summary(r: &SosResult, path: &Path) {
    say!(
        "{}: SOS = {:.4} ({} of {} pairs, {} ties, {} excluded) -> {}",
        r.backend,
        r.overall.fraction(),
        r.overall.greater,
        r.overall.n(),
        r.overall.ties,
        r.excluded.len(),
        path.display()
    );
    for (k, c) in &r.per_attribute {
        say!("  {k}: {:.4} (n = {})", c.fraction(), c.n());
    }
}

fn score(ctx: &Session, a: ScoreArgs) -> Result<()> {
    let mut run = RunConfig::new("score");
    let input = load_input(ctx, a.input, &mut run)?;
    let spec: String = ctx.config.require(a.backend, "backend")?;
    let resolved = backends::resolve(&spec, ctx.seed)?;
    run.set("backend", &resolved.canonical);
    let mut result = run_scoring(&input, resolved.backend.as_ref())?;
    result.provenance.extend(run.provenance());
    let path = ctx.write(&a.output, result.to_json().as_bytes())?;
    print_summary(&result, &path);
    Ok(())
}

fn debias_estimate(ctx: &Session, a: DebiasArgs) -> Result<()> {
    let mut run = RunConfig::new("debias-estimate");
    let lexicon = load_lexicon(ctx, a.lexicon, &mut run)?;
    let corpus_path: PathBuf = ctx.config.require(a.corpus, "corpus")?;
    let (text, bytes) = read_text(&corpus_path)?;
    run.input("corpus", &bytes);
    let k = ctx.config.pick(a.k, "k")?.unwrap_or(1);
    let pooling = ctx.config.pick(a.pooling, "pooling")?.unwrap_or_default();
    let cap = ctx.config.pick(a.cap, "cap")?.unwrap_or(DEFAULT_CAP_PER_WORD);
    run.set("k", k).set("pooling", pooling).set("cap", cap);
    let spec: String = ctx.config.require(a.backend, "backend")?;
    let resolved = backends::resolve(&spec, ctx.seed)?;
    run.set("backend", &resolved.canonical);

    let corpus = parse_corpus(&text);
    let examples = contextualize(&lexicon.word_pairs, &corpus, cap).context("contextualizing word pairs")?;
    let encoder = PooledEncoder::new(resolved.backend.as_ref(), pooling)?;
    let profane: Vec<&str> = examples.iter().map(|e| e.profane_text()).collect();
    let clean: Vec<&str> = examples.iter().map(|e| e.non_profane_text()).collect();
    let reps = embed(&profane, &encoder)?
        .into_iter()
        .zip(embed(&clean, &encoder)?)
        .collect::<Vec<_>>();
    let mut subspace = estimate_subspace(&reps, k).context("estimating the bias subspace")?;
    subspace.provenance = run.provenance();
    subspace
        .provenance
        .insert("lexicon_version".into(), lexicon.version.clone());
    subspace.provenance.insert("pooling".into(), pooling.to_string());
    subspace
        .provenance
        .insert("model_id".into(), resolved.backend.model_id());
    subspace
        .provenance
        .insert("counterfactual_pairs".into(), examples.len().to_string());
    let path = ctx.write(&a.output, subspace.to_text().as_bytes())?;
    say!(
        "estimated k = {} of d = {} from {} counterfactual pairs; explained variance {:.4} -> {}",
        subspace.k(),
        subspace.dim,
        examples.len(),
        subspace.explained_variance,
        path.display()
    );
    Ok(())
}

fn score_debiased(ctx: &Session, a: ScoreDebiasedArgs) -> Result<()> {
    let mut run = RunConfig::new("score-debiased");
    let input = load_input(ctx, a.input, &mut run)?;
    let sub_path: PathBuf = ctx.config.require(a.subspace, "subspace")?;
    let (text, bytes) = read_text(&sub_path)?;
    run.input("subspace", &bytes);
    let subspace = BiasSubspace::parse(&text).with_context(|| format!("subspace {}", sub_path.display()))?;
    let spec: String = ctx.config.require(a.backend, "backend")?;
    let resolved = backends::resolve(&spec, ctx.seed)?;
    run.set("backend", &resolved.canonical);
    let site = ctx
        .config
        .pick(a.projection_site, "projection-site")?
        .unwrap_or_default();
    run.set("projection_site", site);
    let (k, explained) = (subspace.k(), subspace.explained_variance);
    let wrapped = debiased_backend(resolved.backend, subspace)?.with_site(site);
    let mut result = run_scoring(&input, &wrapped)?;
    result.provenance.extend(run.provenance());
    result.provenance.insert("subspace_k".into(), k.to_string());
    result
        .provenance
        .insert("subspace_explained_variance".into(), format!("{explained:?}"));
    let path = ctx.write(&a.output, result.to_json().as_bytes())?;
    print_summary(&result, &path);
    Ok(())
}

fn fairness_gaps(ctx: &Session, a: GapsArgs) -> Result<()> {
    let mut run = RunConfig::new("fairness-gaps");
    let pred_path: PathBuf = ctx.config.require(a.predictions, "predictions")?;
    let (text, bytes) = read_text(&pred_path)?;
    run.input("predictions", &bytes);
    let records = parse_predictions(&text).with_context(|| format!("predictions {}", pred_path.display()))?;
    let pairings = match ctx.config.pick(a.pairings, "pairings")? {
        Some(p) => {
            let (text, bytes) = read_text(&p)?;
            run.input("pairings", &bytes);
            PairingTable::parse(&text).with_context(|| format!("pairing table {}", p.display()))?
        }
        None => {
            run.set("pairings", "default");
            PairingTable::default()
        }
    };
    let threshold = ctx.config.pick(a.threshold, "threshold")?.unwrap_or(DEFAULT_THRESHOLD);
    let model: String = ctx.config.pick(a.model, "model")?.unwrap_or_else(|| "model".into());
    run.set("decision_threshold", format!("{threshold:?}"))
        .set("per_identity", a.per_identity)
        .set("model_name", &model);
    let mut report = gap_report(&records, &pairings, threshold, a.per_identity, &model)?;
    report.provenance = run.provenance();
    for d in &report.diagnostics {
        log::warn!("{d}");
    }
    if report.rows.is_empty() {
        bail!("no pairing could be compared: {}", report.diagnostics.join("; "));
    }
    let path = ctx.write(&a.output, report.to_text().as_bytes())?;
    say!(
        "wrote {} gap rows ({} excluded) -> {}",
        report.rows.len(),
        report.diagnostics.len(),
        path.display()
    );
    Ok(())
}

fn fairness_split(ctx: &Session, a: SplitArgs) -> Result<()> {
    let mut run = RunConfig::new("fairness-split");
    let (text, bytes) = read_text(&a.input)?;
    run.input("input", &bytes);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("input file is empty")?;
    let columns: Vec<&str> = header.split('\t').collect();
    let text_col = match &a.text_column {
        Some(name) => Some(
            columns
                .iter()
                .position(|c| c == name)
                .with_context(|| format!("no column {name:?} in header"))?,
        ),
        None => None,
    };
    let config = PreprocessConfig::default();
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut fields: Vec<String> = line.split('\t').map(str::to_string).collect();
        if fields.len() != columns.len() {
            bail!(
                "record {}: expected {} fields, found {}",
                i + 1,
                columns.len(),
                fields.len()
            );
        }
        if let Some(c) = text_col {
            fields[c] = preprocess(&fields[c], &config);
        }
        records.push(fields.join("\t"));
    }
    let spec = SplitSpec {
        train: a.train,
        validation: a.validation,
        test: a.test,
        seed: ctx.seed,
    };
    run.set("seed", ctx.seed)
        .set("fractions", format!("{:?},{:?},{:?}", a.train, a.validation, a.test))
        .set("text_column", a.text_column.as_deref().unwrap_or("-"))
        .set("contractions", contractions_version());
    let parts = split_indices(records.len(), &spec)?;
    let mut manifest = String::from("# sosbias split manifest v1\n");
    for (k, v) in run.provenance() {
        manifest.push_str(&format!("# {k}\t{v}\n"));
    }
    manifest.push_str("record\tsplit\n");
    let mut assignment = vec![""; records.len()];
    for (name, idx) in [
        ("train", &parts.train),
        ("validation", &parts.validation),
        ("test", &parts.test),
    ] {
        let mut out = format!("{header}\n");
        for &i in idx {
            out.push_str(&records[i]);
            out.push('\n');
            assignment[i] = name;
        }
        let path = ctx.write(&format!("{name}.tsv"), out.as_bytes())?;
        say!("{name}: {} records -> {}", idx.len(), path.display());
    }
    for (i, s) in assignment.iter().enumerate() {
        manifest.push_str(&format!("{}\t{s}\n", i + 1));
    }
    ctx.write("split_manifest.tsv", manifest.as_bytes())?;
    Ok(())
}

fn load_results(paths: &[PathBuf], run: &mut RunConfig, key: &str) -> Result<Vec<SosResult>> {
    paths
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (text, bytes) = read_text(p)?;
            run.input(&format!("{key}.{i}"), &bytes);
            SosResult::from_json(&text).with_context(|| format!("SOS result {}", p.display()))
        })
        .collect()
}

fn correlate(ctx: &Session, a: CorrelateArgs) -> Result<()> {
    let mut run = RunConfig::new("correlate");
    let mut table = SeriesTable::default();
    for (i, p) in a.series.iter().enumerate() {
        let (text, bytes) = read_text(p)?;
        run.input(&format!("series.{i}"), &bytes);
        let t = SeriesTable::parse(&text).with_context(|| format!("series table {}", p.display()))?;
        table = table.merge(&t)?;
    }
    if !a.sos.is_empty() {
        let slice = ctx
            .config
            .pick(a.sos_slice, "sos-slice")?
            .unwrap_or(SosSlice::Group(Group::Marginalized));
        run.set("sos_slice", slice.group_name());
        let results = load_results(&a.sos, &mut run, "sos")?;
        table = table.merge(&SeriesTable::from_sos_results(&results, slice)?)?;
    }
    if a.online_hate {
        run.set("online_hate", "bundled");
        table = table.merge(&BundledStats::reference().to_series())?;
    }
    if table.series.is_empty() {
        bail!("no series given: use --series, --sos or --online-hate");
    }
    let rows: String = ctx.config.require(a.rows, "rows")?;
    let cols: String = ctx.config.pick(a.cols, "cols")?.unwrap_or_else(|| rows.clone());
    run.set("row_group", &rows).set("col_group", &cols);
    let groups: std::collections::BTreeSet<&str> = table.series.iter().map(|s| s.group.as_str()).collect();
    for g in [&rows, &cols] {
        if !groups.contains(g.as_str()) {
            let known: Vec<&str> = groups.iter().copied().collect();
            bail!("no series in group {g:?}; available: {}", known.join(", "));
        }
    }
    let mut matrix = correlation_matrix(&table, &rows, &cols)?;
    matrix.provenance = run.provenance();
    let path = ctx.write(&a.output, matrix.to_text().as_bytes())?;
    say!(
        "{} x {} correlation matrix -> {}",
        matrix.rows.len(),
        matrix.cols.len(),
        path.display()
    );
    if a.heatmap {
        let png = ctx.output(&format!("{}.png", a.output.trim_end_matches(".tsv")))?;
        matrix.save_heatmap(&png)?;
        say!("heatmap -> {}", png.display());
    }
    Ok(())
}

fn report(ctx: &Session, a: ReportArgs) -> Result<()> {
    let mut run = RunConfig::new("report");
    if a.before.len() != a.after.len() {
        bail!("--before and --after must be given the same number of times");
    }
    let results = load_results(&a.sos, &mut run, "sos")?;
    let before = load_results(&a.before, &mut run, "before")?;
    let after = load_results(&a.after, &mut run, "after")?;
    let debiased: Vec<(SosResult, SosResult)> = before.into_iter().zip(after).collect();
    let mut gaps = Vec::new();
    for (i, p) in a.gaps.iter().enumerate() {
        let (text, bytes) = read_text(p)?;
        run.input(&format!("gaps.{i}"), &bytes);
        gaps.push(GapReport::parse(&text).with_context(|| format!("gap report {}", p.display()))?);
    }
    if results.is_empty() && debiased.is_empty() && gaps.is_empty() {
        bail!("nothing to report: give --sos, --before/--after or --gaps");
    }
    let provenance = run.provenance();
    let text = render_report(&ReportInputs {
        results: &results,
        debiased: &debiased,
        gaps: &gaps,
        provenance: Some(&provenance),
    });
    let path = ctx.write(&a.output, text.as_bytes())?;
    say!("report -> {}", path.display());
    Ok(())
}
