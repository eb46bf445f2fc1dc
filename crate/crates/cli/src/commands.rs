use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use serde::Serialize;

use clc_core::analysis::{
    correlate_consistency, linear_regression, load_similarity, paired_values, vocab_overlap,
    SimilarityTable, TokenVocabulary,
};
use clc_core::dataset::{stats, validate};
use clc_core::editing::{
    flip_consistency_summary, propagation_report, read_logits, read_rankc_values, FlipSummary,
};
use clc_core::heatmap::render_svg;
use clc_core::metrics::{
    consistency_matrix, format_percent, mean_clc, probing_accuracy, MatrixMetadata,
};
use clc_core::scores::load_scores;
use clc_core::{ConsistencyMatrix, Dataset, Execution, LanguageId};

use crate::{Cli, Command, Failure};

type Result<T> = std::result::Result<T, Failure>;

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Validate { dataset } => cmd_validate(cli, dataset),
        Command::Stats { dataset } => cmd_stats(cli, dataset),
        Command::Matrix {
            dataset,
            scores,
            svg,
        } => cmd_matrix(cli, dataset, scores, svg.as_deref()),
        Command::Accuracy { dataset, scores } => cmd_accuracy(cli, dataset, scores),
        Command::Correlate { matrix, similarity } => cmd_correlate(cli, matrix, similarity),
        Command::VocabOverlap {
            vocabularies,
            feature,
        } => cmd_vocab_overlap(cli, vocabularies, feature),
        Command::Regress {
            matrix,
            similarity,
            feature,
        } => cmd_regress(cli, matrix, similarity, feature.as_deref()),
        Command::EditReport {
            logits,
            rankc,
            threshold,
        } => cmd_edit_report(cli, logits, rankc, *threshold),
        Command::Heatmap { matrix } => cmd_heatmap(cli, matrix),
    }
}

fn input(path: &Path) -> Result<&Path> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(Failure::Usage(anyhow!(
            "input file not found: {}",
            path.display()
        )))
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file =
        File::open(input(path)?).map_err(|e| Failure::Usage(anyhow!("{}: {e}", path.display())))?;
    Ok(BufReader::new(file))
}

fn write_file(path: &Path, content: &[u8]) -> Result<()> {
    std::fs::write(path, content)
        .map_err(|e| Failure::Domain(anyhow!("writing {}: {e}", path.display())))
}

/// Machine-readable output goes to `--out` when given, otherwise stdout.
fn emit(cli: &Cli, content: &str) -> Result<()> {
    match &cli.out {
        Some(path) => write_file(path, content.as_bytes()),
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

/// Human-readable lines, printed only when the machine output went to a file.
fn say(cli: &Cli, text: &str) {
    if !cli.quiet && cli.out.is_some() {
        print!("{text}");
    }
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    Ok(Dataset::read_jsonl(input(path)?)?)
}

fn load_valid_dataset(path: &Path) -> Result<Dataset> {
    let ds = load_dataset(path)?;
    let report = validate(&ds);
    if let Some(first) = report.violations.first() {
        return Err(Failure::Domain(anyhow!(
            "{} is not a valid dataset ({} violations, first: {})",
            path.display(),
            report.violations.len(),
            first.message
        )));
    }
    Ok(ds)
}

fn load_matrix(path: &Path) -> Result<ConsistencyMatrix> {
    Ok(ConsistencyMatrix::read_csv(
        open(path)?,
        &path.display().to_string(),
    )?)
}

fn cmd_validate(cli: &Cli, path: &Path) -> Result<()> {
    #[derive(Serialize)]
    struct Report<'a> {
        dataset: &'a str,
        valid: bool,
        violations: &'a [clc_core::dataset::Violation],
    }
    let ds = load_dataset(path)?;
    let report = validate(&ds);
    emit(
        cli,
        &to_json(&Report {
            dataset: &ds.name,
            valid: report.is_valid(),
            violations: &report.violations,
        }),
    )?;
    if report.is_valid() {
        say(cli, &format!("{}: valid\n", ds.name));
        Ok(())
    } else {
        say(
            cli,
            &format!("{}: {} violations\n", ds.name, report.violations.len()),
        );
        Err(Failure::Rejected)
    }
}

fn cmd_stats(cli: &Cli, path: &Path) -> Result<()> {
    let ds = load_valid_dataset(path)?;
    let s = stats(&ds)?;
    emit(cli, &to_json(&s))?;
    say(cli, &format!("{s}\n"));
    Ok(())
}

fn cmd_matrix(cli: &Cli, dataset: &Path, scores: &Path, svg: Option<&Path>) -> Result<()> {
    let out = cli
        .out
        .as_deref()
        .ok_or_else(|| Failure::Usage(anyhow!("matrix needs --out for the CSV file")))?;
    let ds = load_valid_dataset(dataset)?;
    let store = load_scores(input(scores)?, &ds)?;
    let matrix = consistency_matrix(&ds, &store, cli.metric, cli.scheme, Execution::default())?;

    write_file(out, matrix.to_csv_string().as_bytes())?;
    write_file(
        &out.with_extension("json"),
        to_json(&MatrixMetadata::of(&matrix)).as_bytes(),
    )?;
    if let Some(svg) = svg {
        write_file(svg, render_svg(&matrix).as_bytes())?;
    }

    if !cli.quiet {
        let scheme = matrix.scheme.map(|s| format!(" ({s})")).unwrap_or_default();
        println!("model: {}", matrix.model_id);
        println!("metric: {}{scheme}", matrix.metric_name);
        match mean_clc(&matrix) {
            Ok(v) => println!("mean CLC: {}%", format_percent(v)),
            Err(_) => println!("mean CLC: n/a"),
        }
        println!("probing accuracy:");
        for lang in &ds.languages {
            let acc = probing_accuracy(&ds, &store, lang)?;
            println!("  {lang}\t{}%", format_percent(acc));
        }
    }
    Ok(())
}

fn cmd_accuracy(cli: &Cli, dataset: &Path, scores: &Path) -> Result<()> {
    #[derive(Serialize)]
    struct Row<'a> {
        language: &'a LanguageId,
        accuracy: f64,
    }
    #[derive(Serialize)]
    struct Report<'a> {
        model_id: &'a str,
        accuracy: Vec<Row<'a>>,
    }
    let ds = load_valid_dataset(dataset)?;
    let store = load_scores(input(scores)?, &ds)?;
    let rows = ds
        .languages
        .iter()
        .map(|l| {
            Ok(Row {
                language: l,
                accuracy: probing_accuracy(&ds, &store, l)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut human = String::new();
    for r in &rows {
        human.push_str(&format!(
            "{}\t{}%\n",
            r.language,
            format_percent(r.accuracy)
        ));
    }
    emit(
        cli,
        &to_json(&Report {
            model_id: store.model_id(),
            accuracy: rows,
        }),
    )?;
    say(cli, &human);
    Ok(())
}

fn load_tables(paths: &[PathBuf]) -> Result<Vec<SimilarityTable>> {
    let mut tables = Vec::new();
    for path in paths {
        tables.extend(load_similarity(input(path)?)?);
    }
    Ok(tables)
}

fn cmd_correlate(cli: &Cli, matrix: &Path, similarity: &[PathBuf]) -> Result<()> {
    #[derive(Serialize)]
    struct Row<'a> {
        feature: &'a str,
        r: f64,
        p_value: f64,
        n: usize,
    }
    let matrix = load_matrix(matrix)?;
    let tables = load_tables(similarity)?;
    let mut rows = Vec::with_capacity(tables.len());
    for t in &tables {
        let c = correlate_consistency(&matrix, t)
            .map_err(|e| Failure::Domain(anyhow!("feature {}: {e}", t.feature)))?;
        rows.push(Row {
            feature: &t.feature,
            r: c.r,
            p_value: c.p_value,
            n: c.n,
        });
    }
    let mut human = String::new();
    for r in &rows {
        human.push_str(&format!(
            "{}\tr={:.3}\tp={:.3e}\tn={}\n",
            r.feature, r.r, r.p_value, r.n
        ));
    }
    emit(cli, &to_json(&rows))?;
    say(cli, &human);
    Ok(())
}

fn cmd_vocab_overlap(cli: &Cli, paths: &[PathBuf], feature: &str) -> Result<()> {
    let mut vocabs: Vec<TokenVocabulary> = Vec::with_capacity(paths.len());
    for path in paths {
        let v = TokenVocabulary::load(input(path)?)?;
        if vocabs.iter().any(|o| o.language == v.language) {
            return Err(Failure::Usage(anyhow!(
                "two vocabularies for language {}",
                v.language
            )));
        }
        vocabs.push(v);
    }
    let mut table = SimilarityTable::new(feature);
    for (i, a) in vocabs.iter().enumerate() {
        for b in &vocabs[i + 1..] {
            table.insert(&a.language, &b.language, vocab_overlap(a, b)?)?;
        }
    }
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    emit(cli, &String::from_utf8(buf).expect("CSV output is UTF-8"))?;
    say(cli, &format!("{} language pairs\n", table.len()));
    Ok(())
}

fn cmd_regress(cli: &Cli, matrix: &Path, similarity: &Path, feature: Option<&str>) -> Result<()> {
    #[derive(Serialize)]
    struct Report<'a> {
        feature: &'a str,
        slope: f64,
        intercept: f64,
        r_squared: f64,
        n: usize,
    }
    let matrix = load_matrix(matrix)?;
    let tables = load_similarity(input(similarity)?)?;
    let table = match feature {
        Some(f) => tables.iter().find(|t| t.feature == f).ok_or_else(|| {
            Failure::Usage(anyhow!("feature {f} not found in {}", similarity.display()))
        })?,
        None if tables.len() == 1 => &tables[0],
        None => {
            let names: Vec<_> = tables.iter().map(|t| t.feature.as_str()).collect();
            return Err(Failure::Usage(anyhow!(
                "choose one feature with --feature: {}",
                names.join(", ")
            )));
        }
    };
    let (x, y, _) = paired_values(&matrix, table);
    let fit = linear_regression(&x, &y)?;
    emit(
        cli,
        &to_json(&Report {
            feature: &table.feature,
            slope: fit.slope,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
            n: x.len(),
        }),
    )?;
    say(
        cli,
        &format!(
            "{}: y = {:.4}x + {:.4}, r^2 = {:.4}\n",
            table.feature, fit.slope, fit.intercept, fit.r_squared
        ),
    );
    Ok(())
}

fn cmd_edit_report(cli: &Cli, logits: &Path, rankc: &Path, threshold: Option<f64>) -> Result<()> {
    let records = read_logits(open(logits)?, &logits.display().to_string())?;
    let rankc_values: BTreeMap<LanguageId, f64> =
        read_rankc_values(open(rankc)?, &rankc.display().to_string())?;
    let report = propagation_report(&records, &rankc_values)?;

    let summary: Option<FlipSummary> = if report.rows.is_empty() {
        None
    } else {
        let threshold = match threshold {
            Some(t) => t,
            None if rankc_values.is_empty() => {
                return Err(Failure::Domain(anyhow!(
                    "no consistency values to derive a threshold from"
                )))
            }
            None => rankc_values.values().sum::<f64>() / rankc_values.len() as f64,
        };
        Some(flip_consistency_summary(&report, threshold)?)
    };

    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    emit(cli, &String::from_utf8(csv).expect("CSV output is UTF-8"))?;
    if let Some(out) = &cli.out {
        write_file(&out.with_extension("json"), to_json(&summary).as_bytes())?;
    }
    let human = match &summary {
        Some(s) => format!(
            "threshold {:.2}: high-CLC flip rate {}%, low-CLC flip rate {}%\n",
            s.threshold,
            format_percent(s.high_clc_flip_rate),
            format_percent(s.low_clc_flip_rate)
        ),
        None => "no records\n".to_string(),
    };
    say(cli, &human);
    Ok(())
}

fn cmd_heatmap(cli: &Cli, matrix: &Path) -> Result<()> {
    let matrix = load_matrix(matrix)?;
    emit(cli, &render_svg(&matrix))
}
