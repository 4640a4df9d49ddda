use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use realstrata::detector::{detect, DetectOptions, Model};
use realstrata::fqf::{format_rational, signed_mod_two};
use realstrata::lattices::{binary_autos, polarized_disc, BinaryLattice, GeneratorTag, RootSpec};
use realstrata::nikulin::{embeds_into_big_l, EmbeddingProfile};
use realstrata::oracle::cross_check;
use realstrata::{Error, FiniteQuadraticForm};
use serde::Serialize;
use serde_json::json;

use crate::cache::{Cache, JobKey};
use crate::report::{OracleV1, ReportV1, WitnessV1};

pub struct DetectJob {
    pub model: Model,
    pub spec: RootSpec,
    pub t_gram: Option<BinaryLattice>,
}

pub struct RunSettings<'a> {
    pub cache: &'a Cache,
    pub use_cache: bool,
    pub threads: Option<usize>,
    pub oracle: bool,
}

pub struct DetectOutcome {
    pub report: ReportV1,
    pub cache_hit: bool,
}

fn t_entries(t: &BinaryLattice) -> [i64; 3] {
    let g = t.gram();
    [g[0][0], g[0][1], g[1][1]]
}

fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn tag_label(spec: &RootSpec, tag: &GeneratorTag) -> String {
    match tag {
        GeneratorTag::Component(c) => spec.components()[*c].to_string(),
        GeneratorTag::H => "h".into(),
    }
}

pub fn run_disc(spec: &RootSpec, h2: i64, json_out: Option<&Path>) -> Result<()> {
    let pf = polarized_disc(spec, h2)?;
    let tags: Vec<String> = pf.tags.iter().map(|t| tag_label(spec, t)).collect();
    println!(
        "S_h = {} + <{}>   (rank {})",
        spec.canonical(),
        h2,
        spec.rank() + 1
    );
    println!("disc = {}", pf.form);
    for (i, tag) in tags.iter().enumerate() {
        println!(
            "  g{i}: order {:>3}  q = {:>6}  from {tag}",
            pf.form.orders()[i],
            format_rational(&signed_mod_two(pf.form.q_value(i)))
        );
    }
    if let Some(path) = json_out {
        let value = json!({
            "spec": spec.canonical(),
            "h2": h2,
            "display": pf.form.to_string(),
            "form": pf.form,
            "tags": tags,
        });
        write_json(path, &value)?;
    }
    Ok(())
}

/// Runs or recalls one detection.
pub fn detect_job(job: &DetectJob, settings: &RunSettings) -> Result<DetectOutcome> {
    let t_gram = job.t_gram.as_ref().map(t_entries);
    let key = JobKey {
        model: job.model.to_string(),
        spec: job.spec.canonical(),
        t_gram,
    };
    // oracle runs need the live report, so they always recompute
    if settings.use_cache && !settings.oracle {
        if let Some(report) = settings.cache.load(&key) {
            return Ok(DetectOutcome {
                report,
                cache_hit: true,
            });
        }
    }
    let options = DetectOptions {
        t_gram: job.t_gram,
        threads: settings.threads,
    };
    let started = Instant::now();
    let computed_at = unix_ms();
    let report = detect(job.model, &job.spec, &options)?;
    let wall = started.elapsed().as_millis();
    let disc = polarized_disc(&job.spec, job.model.h_square())?.form;
    let mut v1 = ReportV1::new(&report, disc, t_gram, computed_at, wall);
    if settings.oracle {
        let oracle = match cross_check(&report) {
            Ok(check) => OracleV1::from(check),
            Err(Error::CutoffExceeded { size, cutoff }) => OracleV1 {
                witness_revalidated: None,
                trace_exhaustive: None,
                involutions_agree: None,
                skipped: Some(format!(
                    "|disc| = {size} exceeds the brute-force cutoff {cutoff}"
                )),
            },
            Err(e) => return Err(e.into()),
        };
        if !oracle.agrees() {
            bail!("oracle disagrees with the detector: {oracle:?}");
        }
        v1.oracle = Some(oracle);
    }
    settings.cache.store(&key, &v1)?;
    Ok(DetectOutcome {
        report: v1,
        cache_hit: false,
    })
}

pub fn print_report(outcome: &DetectOutcome, cache: &Cache) {
    let r = &outcome.report;
    println!(
        "stratum    {} {} (rank S {}, rank T {})",
        r.model, r.spec, r.rank_s, r.rank_t
    );
    println!("disc       {}", r.disc_display);
    match &r.conclusiveness_basis {
        Some(basis) => println!("verdict    {} ({basis})", r.verdict),
        None => println!("verdict    {}", r.verdict),
    }
    if r.rank_s < 19 {
        let examined = r.trace.iter().filter(|e| e.kappa.is_some()).count();
        println!(
            "searched   {examined} candidates against {} involutions",
            r.involutions
        );
    }
    match &r.witness {
        Some(WitnessV1::Kernel { a2, n, kappa, phi }) => {
            println!("witness    a2 = {a2}, n = {n}, kappa = {kappa:?}, phi = {phi:?}")
        }
        Some(WitnessV1::Reflection { matrix }) => println!("witness    reflection {matrix:?}"),
        None => {}
    }
    if let Some(o) = &r.oracle {
        match &o.skipped {
            Some(why) => println!("oracle     skipped: {why}"),
            None => println!("oracle     agrees"),
        }
    }
    let status = if outcome.cache_hit { "hit" } else { "stored" };
    println!("cache      {status} in {}", cache.dir().display());
    println!("note       {}", r.scope_note);
}

#[derive(Debug, Default, Serialize, PartialEq, Eq)]
pub struct BatchSummary {
    pub found: usize,
    pub none: usize,
    pub inconclusive: usize,
    pub errors: usize,
    pub unparseable: usize,
}

#[derive(Serialize)]
struct BatchRow {
    line: usize,
    spec: String,
    outcome: String,
    report: Option<String>,
}

enum BatchLine {
    Blank,
    Job(DetectJob),
    Bad(String),
}

/// `SPEC` or `SPEC ; a,b,d`, with `#` starting a comment.
fn parse_batch_line(model: Model, line: &str) -> BatchLine {
    let content = line.split('#').next().unwrap_or("").trim();
    if content.is_empty() {
        return BatchLine::Blank;
    }
    let (spec_text, t_text) = match content.split_once(';') {
        Some((s, t)) => (s, Some(t.trim())),
        None => (content, None),
    };
    let spec = match spec_text.parse::<RootSpec>() {
        Ok(s) => s,
        Err(e) => return BatchLine::Bad(e.to_string()),
    };
    let t_gram = match t_text.map(str::parse::<BinaryLattice>).transpose() {
        Ok(t) => t,
        Err(e) => return BatchLine::Bad(e.to_string()),
    };
    BatchLine::Job(DetectJob {
        model,
        spec,
        t_gram,
    })
}

pub fn run_batch(
    model: Model,
    file: &Path,
    settings: &RunSettings,
    json_out: Option<&Path>,
) -> Result<BatchSummary> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let mut summary = BatchSummary::default();
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let job = match parse_batch_line(model, line) {
            BatchLine::Blank => continue,
            BatchLine::Bad(why) => {
                summary.unparseable += 1;
                eprintln!("line {line_no}: {why}");
                rows.push(BatchRow {
                    line: line_no,
                    spec: line.trim().to_string(),
                    outcome: "unparseable".into(),
                    report: None,
                });
                continue;
            }
            BatchLine::Job(job) => job,
        };
        let spec = job.spec.canonical();
        let key = JobKey {
            model: model.to_string(),
            spec: spec.clone(),
            t_gram: job.t_gram.as_ref().map(t_entries),
        };
        let (outcome, report) = match detect_job(&job, settings) {
            Ok(out) => {
                match out.report.exit_code() {
                    0 => summary.found += 1,
                    3 => summary.none += 1,
                    _ => summary.inconclusive += 1,
                }
                let path = settings.cache.path_for(&key);
                (out.report.verdict, Some(path.display().to_string()))
            }
            Err(e) => {
                summary.errors += 1;
                (format!("error: {e}"), None)
            }
        };
        println!("{line_no:>4}  {spec:<28} {outcome}");
        rows.push(BatchRow {
            line: line_no,
            spec,
            outcome,
            report,
        });
    }
    println!(
        "found {}  none {}  inconclusive {}  errors {}  unparseable {}",
        summary.found, summary.none, summary.inconclusive, summary.errors, summary.unparseable
    );
    if let Some(path) = json_out {
        write_json(path, &json!({ "summary": summary, "strata": rows }))?;
    }
    Ok(summary)
}

fn read_form(arg: &str) -> Result<FiniteQuadraticForm> {
    let text = match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).context("parsing form JSON")
}

pub fn run_embed(
    sigma_plus: u32,
    sigma_minus: u32,
    form_arg: &str,
    json_out: Option<&Path>,
) -> Result<bool> {
    let form = read_form(form_arg)?;
    let profile = EmbeddingProfile::new(sigma_plus, sigma_minus, form.clone());
    let verdict = embeds_into_big_l(&profile)?;
    println!("form       {form}");
    println!("signature  ({sigma_plus}, {sigma_minus})");
    if verdict.embeds {
        println!("verdict    a lattice with this discriminant exists");
    } else {
        println!("verdict    no such lattice");
        if let Some(clause) = &verdict.obstruction {
            println!("fails      {}", serde_json::to_string(clause)?);
        }
    }
    if let Some(path) = json_out {
        write_json(
            path,
            &json!({
                "sigma_plus": sigma_plus,
                "sigma_minus": sigma_minus,
                "form": form,
                "embeds": verdict.embeds,
                "obstruction": verdict.obstruction,
            }),
        )?;
    }
    Ok(verdict.embeds)
}

pub fn run_autos(t: &BinaryLattice, json_out: Option<&Path>) -> Result<()> {
    let autos = binary_autos(t);
    let [a, b, d] = t_entries(t);
    println!("T = [[{a}, {b}], [{b}, {d}]], |O(T)| = {}", autos.len());
    for g in &autos {
        let kind = if g.is_reflection() {
            "reflection"
        } else {
            "rotation"
        };
        println!("  {:?}  det {:>2}  {kind}", g.rows(), g.det);
    }
    if let Some(path) = json_out {
        let rows: Vec<_> = autos
            .iter()
            .map(|g| json!({ "matrix": g.rows(), "det": g.det, "reflection": g.is_reflection() }))
            .collect();
        write_json(path, &json!({ "t_gram": [a, b, d], "autos": rows }))?;
    }
    Ok(())
}
