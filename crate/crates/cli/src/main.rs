mod settings;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crfpos::affix::{AffixList, Stemmer, StripOrder};
use crfpos::corpus::{parse_column_file, write_column_file, Corpus};
use crfpos::crf::{load_model, save_model, IterationLog, Method, TrainConfig, Trainer};
use crfpos::eval::{evaluate, LabelFilter};
use crfpos::experiment::{Experiment, ExtraColumn};
use crfpos::features::{annotate_columns, FeatureConfig, FrequencyTable};
use crfpos::rmwe::{bio_column, identify_all, Dictionary};
use crfpos::template::{default_best_template, parse_template, Template};
use log::{info, warn};
use settings::Settings;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    InFile { path: String, source: crfpos::Error },
    #[error(transparent)]
    Core(#[from] crfpos::Error),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn in_file(path: &Path, source: crfpos::Error) -> Self {
        CliError::InFile {
            path: path.display().to_string(),
            source,
        }
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Parser)]
#[command(
    name = "crfpos",
    version,
    about = "CRF part-of-speech tagging for agglutinative text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// key=value file supplying defaults for long options.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for training and tagging (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Format of per-iteration training progress on stderr.
    #[arg(long, global = true, value_enum)]
    log_format: Option<LogFormat>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LogFormat {
    Text,
    Tsv,
}

impl FromStr for LogFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Optimizer {
    Lbfgs,
    Gd,
}

impl FromStr for Optimizer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Args)]
struct AffixArgs {
    /// Prefix list, one per line (default: bundled Manipuri list).
    #[arg(long, value_name = "FILE")]
    prefixes: Option<PathBuf>,
    /// Suffix list, one per line (default: bundled Manipuri list).
    #[arg(long, value_name = "FILE")]
    suffixes: Option<PathBuf>,
    /// Strip order: `ps` (prefixes first) or `sp`.
    #[arg(long)]
    order: Option<StripOrder>,
}

#[derive(Debug, Args)]
struct DictArgs {
    /// RMWE dictionary: `surface<TAB>sense,sense` lines, `#MIMIC` section for pairs.
    #[arg(long, value_name = "FILE")]
    dict: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Gaussian prior standard deviation.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, visible_alias = "max-iter")]
    max_iterations: Option<usize>,
    /// Gradient-norm convergence threshold.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Drop observations seen fewer times in training.
    #[arg(long)]
    min_count: Option<usize>,
    #[arg(long, value_enum)]
    optimizer: Option<Optimizer>,
    /// L-BFGS history length.
    #[arg(long)]
    history: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split whitespace-separated words into prefixes, stem and suffixes.
    Stem {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        affixes: AffixArgs,
    },
    /// Mark reduplicated multiword expressions in a column file.
    Rmwe {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// List spans instead of appending a BIO column.
        #[arg(long)]
        spans: bool,
        #[command(flatten)]
        affixes: AffixArgs,
        #[command(flatten)]
        dict: DictArgs,
    },
    /// Annotate a column file with feature columns.
    Extract {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Feature notation, e.g. "W[-2,+1], SW[-1,+1], P[1], S[4], L, F, NS, NP, D, SF".
        #[arg(long)]
        features: Option<String>,
        /// Add the RMWE BIO column before the label.
        #[arg(long)]
        rmwe: bool,
        /// Corpus for word frequencies (default: the input).
        #[arg(long, value_name = "FILE")]
        frequencies: Option<PathBuf>,
        /// Characters counted as symbols (default: Unicode punctuation and symbols).
        #[arg(long)]
        symbols: Option<String>,
        #[command(flatten)]
        affixes: AffixArgs,
        #[command(flatten)]
        dict: DictArgs,
    },
    /// Print the template generated for a feature configuration.
    Template {
        #[arg(long)]
        features: Option<String>,
    },
    /// Train a model on an annotated column file (label last).
    Train {
        input: PathBuf,
        /// Where to write the model.
        #[arg(short = 'o', long, visible_alias = "output", short_alias = 'm')]
        model: PathBuf,
        /// Template file; generated from --features when absent.
        #[arg(long, value_name = "FILE")]
        template: Option<PathBuf>,
        #[arg(long)]
        features: Option<String>,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Append a predicted label column.
    Tag {
        input: Option<PathBuf>,
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Score predictions (last column of PRED) against gold (last column of GOLD).
    Eval {
        gold: PathBuf,
        pred: PathBuf,
        /// Labels that do not count as answers (repeatable).
        #[arg(long)]
        exclude_label: Vec<String>,
        /// Count only these labels as answers (repeatable).
        #[arg(long, conflicts_with = "exclude_label")]
        only_label: Vec<String>,
    },
    /// Train and evaluate several feature configurations on raw gold corpora.
    Sweep {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// File with one feature notation per line.
        #[arg(long, value_name = "FILE")]
        configs: Option<PathBuf>,
        /// Feature notation (repeatable).
        #[arg(long)]
        features: Vec<String>,
        /// Include the nine published feature combinations.
        #[arg(long)]
        table4: bool,
        /// Also run every configuration with the RMWE column.
        #[arg(long)]
        with_rmwe: bool,
        #[arg(long)]
        exclude_label: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        affixes: AffixArgs,
        #[command(flatten)]
        dict: DictArgs,
        #[command(flatten)]
        training: TrainArgs,
    },
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::io(p, e)),
        None => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::io(Path::new("<stdin>"), e))?;
            Ok(text)
        }
    }
}

fn read_corpus(path: Option<&Path>) -> Result<Corpus> {
    let text = read_input(path)?;
    parse_column_file(&text).map_err(|e| CliError::in_file(path.unwrap_or(Path::new("<stdin>")), e))
}

/// Writes to stdout, or atomically to `path` via a sibling temp file.
fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    let Some(path) = path else {
        let mut out = io::stdout().lock();
        return out
            .write_all(content.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    file.write_all(content.as_bytes()).map_err(|e| CliError::io(path, e))?;
    file.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn stemmer(args: &AffixArgs, settings: &Settings) -> Result<Stemmer> {
    let bundled = AffixList::manipuri();
    let read = |flag: &Option<PathBuf>, key: &str| -> Result<Option<String>> {
        settings
            .get(flag.clone(), key)?
            .map(|p: PathBuf| fs::read_to_string(&p).map_err(|e| CliError::io(&p, e)))
            .transpose()
    };
    let prefixes = read(&args.prefixes, "prefixes")?;
    let suffixes = read(&args.suffixes, "suffixes")?;
    let affixes = match (prefixes, suffixes) {
        (None, None) => bundled,
        (p, s) => {
            let lines = |t: Option<String>, fallback: &[String]| match t {
                Some(t) => t.lines().map(str::to_string).collect::<Vec<_>>(),
                None => fallback.to_vec(),
            };
            AffixList::new(&lines(p, bundled.prefixes()), &lines(s, bundled.suffixes()))
        }
    };
    let order = settings.or(args.order, "order", StripOrder::default())?;
    Ok(Stemmer::new(affixes).with_order(order))
}

fn dictionary(args: &DictArgs, settings: &Settings) -> Result<Dictionary> {
    match settings.get(args.dict.clone(), "dict")? {
        Some(path) => Dictionary::load(&path).map_err(|e| CliError::in_file(&path, e)),
        None => Ok(Dictionary::new()),
    }
}

fn feature_config(flag: Option<String>, settings: &Settings) -> Result<FeatureConfig> {
    match settings.get(flag, "features")? {
        Some(text) => text
            .parse::<FeatureConfig>()
            .map_err(|e| CliError::Data(format!("--features: {e}"))),
        None => Ok(FeatureConfig::best()),
    }
}

fn train_config(args: &TrainArgs, settings: &Settings) -> Result<TrainConfig> {
    let defaults = TrainConfig::default();
    let optimizer = match settings.or(args.optimizer, "optimizer", Optimizer::Lbfgs)? {
        Optimizer::Lbfgs => Method::Lbfgs,
        Optimizer::Gd => Method::GradientDescent,
    };
    let config = TrainConfig {
        sigma: settings.or(args.sigma, "sigma", defaults.sigma)?,
        max_iterations: settings.or(args.max_iterations, "max-iterations", defaults.max_iterations)?,
        gradient_tolerance: settings.or(args.tolerance, "tolerance", defaults.gradient_tolerance)?,
        min_feature_count: settings.or(args.min_count, "min-count", defaults.min_feature_count)?,
        optimizer,
        history: settings.or(args.history, "history", defaults.history)?,
    };
    if !(config.sigma > 0.0 && config.sigma.is_finite()) {
        return Err(CliError::Data(format!("sigma must be positive, got {}", config.sigma)));
    }
    Ok(config)
}

fn label_filter(exclude: Vec<String>, only: Vec<String>) -> LabelFilter {
    if !only.is_empty() {
        LabelFilter::only(only)
    } else if !exclude.is_empty() {
        LabelFilter::exclude(exclude)
    } else {
        LabelFilter::All
    }
}

fn join_or_dash(items: &[String]) -> String {
    if items.is_empty() {
        "-".into()
    } else {
        items.join("+")
    }
}

fn cmd_stem(input: Option<PathBuf>, output: Option<PathBuf>, args: AffixArgs, settings: &Settings) -> Result<()> {
    let stemmer = stemmer(&args, settings)?;
    let text = read_input(input.as_deref())?;
    let mut out = String::new();
    for word in text.split_whitespace() {
        let r = stemmer.stem(word);
        let _ = writeln!(
            out,
            "{word}\t{}\t{}\t{}",
            r.stem,
            join_or_dash(&r.stripped_prefixes),
            join_or_dash(&r.stripped_suffixes)
        );
    }
    write_output(output.as_deref(), &out)
}

fn cmd_rmwe(
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    spans: bool,
    affix_args: AffixArgs,
    dict_args: DictArgs,
    settings: &Settings,
) -> Result<()> {
    let stemmer = stemmer(&affix_args, settings)?;
    let dict = dictionary(&dict_args, settings)?;
    let corpus = read_corpus(input.as_deref())?;
    let out = if spans {
        let mut out = String::new();
        for (i, sentence) in corpus.sentences().iter().enumerate() {
            let words = sentence.surfaces();
            for span in identify_all(&words, stemmer.affixes(), &dict) {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    i + 1,
                    span.start + 1,
                    span.end + 1,
                    span.kind,
                    words[span.start..=span.end].join(" ")
                );
            }
        }
        out
    } else {
        let column = bio_column(&corpus, stemmer.affixes(), &dict);
        write_column_file(&corpus.append_column(&column)?)
    };
    write_output(output.as_deref(), &out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_extract(
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    features: Option<String>,
    rmwe: bool,
    frequencies: Option<PathBuf>,
    symbols: Option<String>,
    affix_args: AffixArgs,
    dict_args: DictArgs,
    settings: &Settings,
) -> Result<()> {
    let mut config = feature_config(features, settings)?;
    config.use_rmwe |= settings.switch(rmwe, "rmwe")?;
    if let Some(symbols) = settings.get(symbols, "symbols")? {
        config.symbols = crfpos::chars::SymbolClass::from_chars(symbols.chars());
    }
    let stemmer = stemmer(&affix_args, settings)?;
    let dict = if config.use_rmwe {
        Some(dictionary(&dict_args, settings)?)
    } else {
        None
    };
    let corpus = read_corpus(input.as_deref())?;
    let table = match settings.get(frequencies, "frequencies")? {
        Some(path) => FrequencyTable::build(&read_corpus(Some(&path))?),
        None => FrequencyTable::build(&corpus),
    };
    let extra = dict.map(|d| bio_column(&corpus, stemmer.affixes(), &d));
    let annotated = annotate_columns(&corpus, &stemmer, &table, extra.as_deref(), &config)?;
    write_output(output.as_deref(), &write_column_file(&annotated))
}

fn progress_printer(format: LogFormat) -> impl FnMut(&IterationLog) {
    let mut header = format == LogFormat::Tsv;
    move |log: &IterationLog| {
        let mut err = io::stderr().lock();
        if header {
            let _ = writeln!(err, "iteration\tobjective\tgradient_norm\tstep");
            header = false;
        }
        let _ = match format {
            LogFormat::Text => writeln!(
                err,
                "iter {:>4}  objective {:.6}  |grad| {:.3e}  step {:.3e}",
                log.iteration, log.objective, log.gradient_norm, log.step
            ),
            LogFormat::Tsv => writeln!(
                err,
                "{}\t{:?}\t{:?}\t{:?}",
                log.iteration, log.objective, log.gradient_norm, log.step
            ),
        };
    }
}

fn load_template(path: Option<PathBuf>, features: Option<String>, settings: &Settings) -> Result<Template> {
    match settings.get(path, "template")? {
        Some(path) => {
            let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            parse_template(&text).map_err(|e| CliError::in_file(&path, e))
        }
        None => Ok(parse_template(&default_best_template(&feature_config(
            features, settings,
        )?))?),
    }
}

fn cmd_train(
    input: PathBuf,
    model: PathBuf,
    template: Option<PathBuf>,
    features: Option<String>,
    args: TrainArgs,
    format: LogFormat,
    settings: &Settings,
) -> Result<()> {
    let template = load_template(template, features, settings)?;
    let config = train_config(&args, settings)?;
    let corpus = read_corpus(Some(&input))?;
    let trainer = Trainer::new(&corpus, &template, config).map_err(|e| CliError::in_file(&input, e))?;
    let outcome = trainer.train(progress_printer(format))?;
    info!(
        "stopped after {} iterations ({:?}), objective {:.6}",
        outcome.iterations, outcome.stop, outcome.objective
    );
    save_model(&outcome.model, &model).map_err(|e| CliError::in_file(&model, e))
}

fn cmd_tag(input: Option<PathBuf>, model: PathBuf, output: Option<PathBuf>) -> Result<()> {
    let model = load_model(&model).map_err(|e| CliError::in_file(&model, e))?;
    let corpus = read_corpus(input.as_deref())?;
    let tagged = model.tag_corpus(&corpus)?;
    write_output(output.as_deref(), &write_column_file(&tagged))
}

fn cmd_eval(gold: PathBuf, pred: PathBuf, exclude: Vec<String>, only: Vec<String>) -> Result<()> {
    let gold = read_corpus(Some(&gold))?;
    let pred = read_corpus(Some(&pred))?;
    let report = evaluate(&gold, &pred, &label_filter(exclude, only))?;
    write_output(None, &report.to_string())
}

fn sweep_configs(
    configs: Option<PathBuf>,
    features: Vec<String>,
    table4: bool,
    with_rmwe: bool,
) -> Result<Vec<FeatureConfig>> {
    let mut list = Vec::new();
    if let Some(path) = configs {
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            list.push(
                line.parse()
                    .map_err(|e| CliError::Data(format!("{} line {}: {e}", path.display(), n + 1)))?,
            );
        }
    }
    for notation in features {
        list.push(
            notation
                .parse()
                .map_err(|e| CliError::Data(format!("--features: {e}")))?,
        );
    }
    if table4 {
        list.extend(FeatureConfig::table4());
    }
    if list.is_empty() {
        list.push(FeatureConfig::best());
    }
    if with_rmwe {
        let extra: Vec<FeatureConfig> = list
            .iter()
            .filter(|c| !c.use_rmwe)
            .map(|c| c.clone().with_rmwe(true))
            .collect();
        list.extend(extra);
    }
    Ok(list)
}

fn cmd_sweep(command: Command, settings: &Settings) -> Result<()> {
    let Command::Sweep {
        train,
        test,
        configs,
        features,
        table4,
        with_rmwe,
        exclude_label,
        output,
        affixes,
        dict,
        training,
    } = command
    else {
        unreachable!("sweep arguments")
    };
    let configs = sweep_configs(configs, features, table4, with_rmwe)?;
    let experiment = Experiment {
        train: read_corpus(Some(&train))?,
        test: read_corpus(Some(&test))?,
        stemmer: stemmer(&affixes, settings)?,
        extra: ExtraColumn::Rmwe(dictionary(&dict, settings)?),
        train_config: train_config(&training, settings)?,
        filter: label_filter(exclude_label, Vec::new()),
    };
    let mut out = String::from("Feature\tR\tP\tFS\n");
    let mut failures = 0;
    for (config, result) in experiment.sweep(&configs) {
        match result {
            Ok(r) => {
                let _ = writeln!(
                    out,
                    "{config}\t{:.2}\t{:.2}\t{:.2}",
                    100.0 * r.recall,
                    100.0 * r.precision,
                    100.0 * r.f_score
                );
            }
            Err(e) => {
                failures += 1;
                let _ = writeln!(out, "{config}\terror: {e}");
            }
        }
    }
    write_output(output.as_deref(), &out)?;
    if failures == configs.len() {
        return Err(CliError::Data(format!("all {failures} configurations failed")));
    }
    Ok(())
}

const KNOWN_KEYS: [&str; 17] = [
    "prefixes",
    "suffixes",
    "order",
    "dict",
    "features",
    "template",
    "rmwe",
    "symbols",
    "frequencies",
    "sigma",
    "max-iterations",
    "tolerance",
    "min-count",
    "optimizer",
    "history",
    "threads",
    "log-format",
];

fn run(cli: Cli) -> Result<()> {
    let settings = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    for key in settings.keys() {
        if !KNOWN_KEYS.contains(&key) {
            warn!("config key `{key}` is not recognized");
        }
    }
    let threads = settings.or(cli.threads, "threads", 0)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Data(format!("thread pool: {e}")))?;
    }
    let format = settings.or(cli.log_format, "log-format", LogFormat::Text)?;

    match cli.command {
        Command::Stem { input, output, affixes } => cmd_stem(input, output, affixes, &settings),
        Command::Rmwe {
            input,
            output,
            spans,
            affixes,
            dict,
        } => cmd_rmwe(input, output, spans, affixes, dict, &settings),
        Command::Extract {
            input,
            output,
            features,
            rmwe,
            frequencies,
            symbols,
            affixes,
            dict,
        } => cmd_extract(
            input,
            output,
            features,
            rmwe,
            frequencies,
            symbols,
            affixes,
            dict,
            &settings,
        ),
        Command::Template { features } => {
            write_output(None, &default_best_template(&feature_config(features, &settings)?))
        }
        Command::Train {
            input,
            model,
            template,
            features,
            train,
        } => cmd_train(input, model, template, features, train, format, &settings),
        Command::Tag { input, model, output } => cmd_tag(input, model, output),
        Command::Eval {
            gold,
            pred,
            exclude_label,
            only_label,
        } => cmd_eval(gold, pred, exclude_label, only_label),
        command @ Command::Sweep { .. } => cmd_sweep(command, &settings),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .format_target(false)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("crfpos: error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn sweep_list_adds_rmwe_variants() {
        let list = sweep_configs(None, vec!["W[-1,+1]".into()], false, true).unwrap();
        assert_eq!(list.len(), 2);
        assert!(list[1].use_rmwe && !list[0].use_rmwe);
    }
}
