//! Batch command-line front end: load JSON objects, run one computation,
//! emit JSON (default) or text. Deterministic given inputs and `--seed`;
//! exit codes are 0 success, 1 usage, 2 validation/load failure,
//! 3 refuted-with-witness.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use grpdlab::algebra::{
    convolve, expectation, lambda_matrix, reduced_norm, twisted_convolve, verify_admissible_pair,
    AlgebraElement, AlgebraElementJson, Cocycle, CocycleJson, GroupoidRef, PartialUnitMap,
};
use grpdlab::config::{DEFAULT_SEED, NORM_SLACK, WITNESS_SLACK};
use grpdlab::groupoid::{
    condition_w_check, decompose_elementary, germ_groupoid, validate_groupoid,
    FinitePartialBijectionSemigroup, GroupoidJson,
};
use grpdlab::pnorm::{
    hermitian_test, is_invertible_isometry, is_mp_partial_isometry, p_operator_norm_seeded,
    vector_p_norm, MatrixJson,
};
use grpdlab::rigidity::{
    af_embeddability_report, core_diagonal_check, isometry_classification_check,
    non_abelian_witness, tfg_quotient_check, RigidityReport,
};
use grpdlab::sft::{
    bisection_inverse, bisection_product, domain_boxes, extend_to_full_group_bisection,
    is_full_group_element, range_boxes, BisectionJson, CylinderPair,
};
use grpdlab::thompson::{
    apply, compose, equals, invert, reduce, table_to_bisection, TableJson,
};
use grpdlab::{CylinderBisection, FiniteGroupoid, Table, Word};
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

fn parse_p(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 1.0 {
        Ok(v)
    } else {
        Err("p must be a finite real number with p >= 1".into())
    }
}

fn parse_depth(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v <= 8 {
        Ok(v)
    } else {
        Err("depth must be at most 8".into())
    }
}

fn parse_samples(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v <= 1_000_000 {
        Ok(v)
    } else {
        Err("samples must be at most 1000000".into())
    }
}

#[derive(Parser)]
#[command(
    name = "grpdlab",
    version,
    about = "Desk-scale lab for finite groupoids, box tables, and l^p convolution algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit JSON output (the default)
    #[arg(long, global = true)]
    json: bool,
    /// Emit human-readable text instead of JSON
    #[arg(long, global = true, conflicts_with = "json")]
    text: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Finite groupoid tables: validation, germs, decompositions
    #[command(subcommand)]
    Groupoid(GroupoidCmd),
    /// Symbolic bisections over product shift spaces
    #[command(subcommand)]
    Sft(SftCmd),
    /// Two-row box tables (full-group elements)
    #[command(subcommand)]
    Table(TableCmd),
    /// Convolution-algebra elements over a finite groupoid
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// p-operator norms of complex matrices
    #[command(subcommand)]
    Pnorm(PnormCmd),
    /// Statistical rigidity checks
    #[command(subcommand)]
    Check(CheckCmd),
}

#[derive(Subcommand)]
enum GroupoidCmd {
    /// Check every groupoid axiom on an arrow-table file
    Validate { file: PathBuf },
    /// Build the germ groupoid of a partial-bijection action
    Germ { file: PathBuf },
    /// Decompose a principal groupoid into elementary blocks
    Decompose { file: PathBuf },
    /// Check condition (W): per-unit non-isotropy witnesses
    Condw { file: PathBuf },
}

#[derive(Subcommand)]
enum SftCmd {
    /// Compose two bisections (left file acts after the right file)
    Product { left: PathBuf, right: PathBuf },
    /// Invert a bisection
    Invert { file: PathBuf },
    /// Report the domain/range Kraft measures and full-group membership
    Fullgroup { file: PathBuf },
    /// Extend a single cylinder pair to a full-group bisection
    Extend { file: PathBuf },
}

#[derive(Subcommand)]
enum TableCmd {
    /// Check the two-row partition conditions of a box table
    Validate { file: PathBuf },
    /// Compose two tables: outer after inner
    Compose { outer: PathBuf, inner: PathBuf },
    /// Swap the two rows
    Invert { file: PathBuf },
    /// Apply a table to a word tuple
    Apply {
        file: PathBuf,
        /// Comma-separated words, one per coordinate (e.g. `01,1`)
        #[arg(long)]
        word: String,
    },
    /// Decide whether two tables define the same homeomorphism
    Equals {
        left: PathBuf,
        right: PathBuf,
        /// Override the comparison depth (at most 8)
        #[arg(long, value_parser = parse_depth)]
        depth: Option<usize>,
    },
    /// Merge sibling columns until no reduction applies
    Reduce { file: PathBuf },
    /// Convert a table to its cylinder-bisection form
    ToBisection { file: PathBuf },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Convolution product of two elements
    Convolve {
        left: PathBuf,
        right: PathBuf,
        /// Twist by this 2-cocycle file
        #[arg(long)]
        cocycle: Option<PathBuf>,
    },
    /// Reduced p-norm: max fiberwise p-operator norm
    Norm {
        file: PathBuf,
        #[arg(long, value_parser = parse_p)]
        p: f64,
        #[arg(long)]
        cocycle: Option<PathBuf>,
    },
    /// Restrict the coefficients to the unit space
    Expect { file: PathBuf },
    /// Matrix of the left regular representation on one fiber
    Lambda {
        file: PathBuf,
        /// Unit label naming the fiber
        #[arg(long)]
        unit: String,
        #[arg(long, value_parser = parse_p, default_value = "2")]
        p: f64,
        #[arg(long)]
        cocycle: Option<PathBuf>,
    },
    /// Verify the admissible-pair conditions against a unit-space map
    Admissible {
        left: PathBuf,
        right: PathBuf,
        /// JSON file `{"map": {"unit": "unit"}}`
        #[arg(long)]
        beta: PathBuf,
        #[arg(long, value_parser = parse_p, default_value = "2")]
        p: f64,
    },
}

#[derive(Subcommand)]
enum PnormCmd {
    /// p-operator norm with a maximizing witness
    Norm {
        file: PathBuf,
        #[arg(long, value_parser = parse_p)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Witness-consistency tolerance
        #[arg(long, default_value_t = WITNESS_SLACK)]
        tol: f64,
    },
    /// Test whether exp(itA) is isometric for all t
    Herm {
        file: PathBuf,
        #[arg(long, value_parser = parse_p)]
        p: f64,
    },
    /// Test the Moore-Penrose partial-isometry conditions for a pair
    Mp {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_parser = parse_p)]
        p: f64,
    },
    /// Test invertibility with both norms at most one
    Isometry {
        file: PathBuf,
        #[arg(long, value_parser = parse_p)]
        p: f64,
        /// Acceptance slack on both norms
        #[arg(long, default_value_t = NORM_SLACK)]
        tol: f64,
    },
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_p)]
    p: f64,
    #[arg(long, value_parser = parse_samples, default_value = "1000")]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Sampled check: one-parameter isometry generators are real diagonals
    Core(SampleArgs),
    /// Sampled check: invertible isometries are complex permutations
    Isometries(SampleArgs),
    /// Census: isometries modulo diagonal phases form the symmetric group
    Tfg(SampleArgs),
    /// AF-structure report for a groupoid file
    Af {
        file: PathBuf,
        #[arg(long, value_parser = parse_p, default_value = "3")]
        p: f64,
    },
    /// Non-abelian witness: two transpositions and their commutator
    Witness {
        /// Comma-separated alphabet sizes (e.g. `2` or `2,3`)
        #[arg(long)]
        alphabets: String,
    },
}

fn main() {
    grpdlab::configure_threads_from_env();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let emit = Emit {
        out: cli.out.clone(),
        text: cli.text,
    };
    match run(cli.command, &emit) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

struct Emit {
    out: Option<PathBuf>,
    text: bool,
}

impl Emit {
    fn value<T: Serialize>(&self, v: &T, text: String) -> Result<()> {
        let body = if self.text {
            text
        } else {
            let mut s = serde_json::to_string_pretty(v)?;
            s.push('\n');
            s
        };
        match &self.out {
            Some(p) => std::fs::write(p, body)
                .with_context(|| format!("writing {}", p.display()))?,
            None => print!("{body}"),
        }
        Ok(())
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let data = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&data).with_context(|| format!("parsing {}", path.display()))
}

fn load_groupoid(path: &Path) -> Result<FiniteGroupoid> {
    let j: GroupoidJson = read_json(path)?;
    Ok(FiniteGroupoid::from_json(&j)?)
}

fn load_bisection(path: &Path) -> Result<CylinderBisection> {
    let j: BisectionJson = read_json(path)?;
    Ok(CylinderBisection::from_json(&j)?)
}

fn load_table(path: &Path) -> Result<Table> {
    let j: TableJson = read_json(path)?;
    Ok(Table::from_json(&j)?)
}

/// Loads an algebra element: the groupoid comes inline or from a path
/// resolved relative to the element file.
fn load_element(path: &Path) -> Result<(Arc<FiniteGroupoid>, BTreeMap<String, [f64; 2]>)> {
    let j: AlgebraElementJson = read_json(path)?;
    let gj = match j.groupoid {
        GroupoidRef::Inline(g) => g,
        GroupoidRef::Path(rel) => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            read_json(&base.join(&rel))?
        }
    };
    Ok((Arc::new(FiniteGroupoid::from_json(&gj)?), j.coeffs))
}

/// Loads two elements that must live over the same groupoid; the second is
/// rebuilt over the first's handle.
fn load_element_pair(
    left: &Path,
    right: &Path,
) -> Result<(Arc<FiniteGroupoid>, AlgebraElement, AlgebraElement)> {
    let (g, lc) = load_element(left)?;
    let (g2, rc) = load_element(right)?;
    if *g != *g2 {
        bail!(
            "{} and {} are defined over different groupoids",
            left.display(),
            right.display()
        );
    }
    let f = AlgebraElement::from_coeffs(g.clone(), &lc)?;
    let h = AlgebraElement::from_coeffs(g.clone(), &rc)?;
    Ok((g, f, h))
}

fn load_cocycle(g: &Arc<FiniteGroupoid>, path: &Path) -> Result<Cocycle> {
    let j: CocycleJson = read_json(path)?;
    Ok(Cocycle::from_json(g.clone(), &j)?)
}

fn element_out(g: &FiniteGroupoid, f: &AlgebraElement) -> AlgebraElementJson {
    f.to_json(GroupoidRef::Inline(g.to_json()))
}

fn element_text(j: &AlgebraElementJson) -> String {
    let mut s = String::new();
    if j.coeffs.is_empty() {
        s.push_str("0\n");
    }
    for (label, [re, im]) in &j.coeffs {
        let _ = writeln!(s, "{label}: {re:+.12}{im:+.12}i");
    }
    s
}

fn parse_alphabets(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| anyhow!("bad alphabet `{t}`: {e}"))
        })
        .collect()
}

fn report_exit(r: &RigidityReport) -> i32 {
    r.verdict.exit_code()
}

fn run(command: Command, emit: &Emit) -> Result<i32> {
    match command {
        Command::Groupoid(cmd) => run_groupoid(cmd, emit),
        Command::Sft(cmd) => run_sft(cmd, emit),
        Command::Table(cmd) => run_table(cmd, emit),
        Command::Algebra(cmd) => run_algebra(cmd, emit),
        Command::Pnorm(cmd) => run_pnorm(cmd, emit),
        Command::Check(cmd) => run_check(cmd, emit),
    }
}

fn run_groupoid(cmd: GroupoidCmd, emit: &Emit) -> Result<i32> {
    match cmd {
        GroupoidCmd::Validate { file } => {
            let j: GroupoidJson = read_json(&file)?;
            match FiniteGroupoid::from_json(&j) {
                Ok(g) => {
                    let rep = validate_groupoid(&g);
                    let ok = rep.is_valid();
                    emit.value(&rep, format!("{rep}\n"))?;
                    Ok(if ok { 0 } else { 2 })
                }
                Err(e) => {
                    eprintln!("invalid groupoid: {e}");
                    Ok(2)
                }
            }
        }
        GroupoidCmd::Germ { file } => {
            let j = read_json(&file)?;
            let action = FinitePartialBijectionSemigroup::from_json(&j)?;
            let g = germ_groupoid(&action)?;
            let out = g.to_json();
            let text = format!("germ groupoid: {} arrows, {} units\n", g.n_arrows(), g.n_units());
            emit.value(&out, text)?;
            Ok(0)
        }
        GroupoidCmd::Decompose { file } => {
            let g = load_groupoid(&file)?;
            match decompose_elementary(&g) {
                Ok(d) => {
                    let text = d
                        .elementary
                        .blocks
                        .iter()
                        .map(|b| format!("X size {} x full relation on {}", b.x.len(), b.n))
                        .join("\n")
                        + "\n";
                    emit.value(&d, text)?;
                    Ok(0)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(2)
                }
            }
        }
        GroupoidCmd::Condw { file } => {
            let g = load_groupoid(&file)?;
            let rep = condition_w_check(&g);
            emit.value(&rep, format!("{rep}"))?;
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct FullGroupOut {
    full_group: bool,
    domain_measure: String,
    range_measure: String,
}

fn run_sft(cmd: SftCmd, emit: &Emit) -> Result<i32> {
    match cmd {
        SftCmd::Product { left, right } => {
            let a = load_bisection(&left)?;
            let b = load_bisection(&right)?;
            let prod = bisection_product(&a, &b)?;
            emit.value(&prod.to_json(), bisection_text(&prod))?;
            Ok(0)
        }
        SftCmd::Invert { file } => {
            let a = load_bisection(&file)?;
            let inv = bisection_inverse(&a);
            emit.value(&inv.to_json(), bisection_text(&inv))?;
            Ok(0)
        }
        SftCmd::Fullgroup { file } => {
            let a = load_bisection(&file)?;
            let (_, dom) = domain_boxes(&a);
            let (_, ran) = range_boxes(&a);
            let out = FullGroupOut {
                full_group: is_full_group_element(&a),
                domain_measure: dom.to_string(),
                range_measure: ran.to_string(),
            };
            let text = format!(
                "full group: {}\ndomain measure {}\nrange measure {}\n",
                out.full_group, out.domain_measure, out.range_measure
            );
            emit.value(&out, text)?;
            Ok(0)
        }
        SftCmd::Extend { file } => {
            let j: BisectionJson = read_json(&file)?;
            if j.columns.len() != 1 {
                bail!("extend expects exactly one cylinder pair, got {} columns", j.columns.len());
            }
            let col = &j.columns[0];
            let range: Vec<&str> = col.range.iter().map(String::as_str).collect();
            let domain: Vec<&str> = col.domain.iter().map(String::as_str).collect();
            let pair = CylinderPair::parse(&range, &domain, &j.alphabets)?;
            let full = extend_to_full_group_bisection(&pair)?;
            emit.value(&full.to_json(), bisection_text(&full))?;
            Ok(0)
        }
    }
}

fn bisection_text(s: &CylinderBisection) -> String {
    let mut out = String::new();
    for c in s.columns() {
        let range = c.range_box().iter().map(|w| w.to_string()).join(", ");
        let domain = c.domain_box().iter().map(|w| w.to_string()).join(", ");
        let _ = writeln!(out, "Z(({range}); ({domain}))");
    }
    out
}

fn table_text(t: &Table) -> String {
    let j = t.to_json();
    let mut out = String::new();
    for c in &j.columns {
        let _ = writeln!(out, "v = ({}); u = ({})", c.v.join(", "), c.u.join(", "));
    }
    out
}

#[derive(Serialize)]
struct EqualsOut {
    equal: bool,
    depth: Option<usize>,
}

fn run_table(cmd: TableCmd, emit: &Emit) -> Result<i32> {
    match cmd {
        TableCmd::Validate { file } => {
            let j: TableJson = read_json(&file)?;
            let t = Table::from_json(&j)?;
            let rep = t.validate();
            let ok = rep.is_valid();
            #[derive(Serialize)]
            struct ValidateOut {
                valid: bool,
                violations: Vec<String>,
                v_measure: String,
                u_measure: String,
            }
            let out = ValidateOut {
                valid: ok,
                violations: rep.violations.clone(),
                v_measure: rep.v_measure.to_string(),
                u_measure: rep.u_measure.to_string(),
            };
            emit.value(&out, format!("{rep}"))?;
            Ok(if ok { 0 } else { 2 })
        }
        TableCmd::Compose { outer, inner } => {
            let a = load_table(&outer)?;
            let b = load_table(&inner)?;
            let c = compose(&a, &b)?;
            emit.value(&c.to_json(), table_text(&c))?;
            Ok(0)
        }
        TableCmd::Invert { file } => {
            let t = load_table(&file)?;
            let inv = invert(&t);
            emit.value(&inv.to_json(), table_text(&inv))?;
            Ok(0)
        }
        TableCmd::Apply { file, word } => {
            let t = load_table(&file)?;
            let parts: Vec<&str> = word.split(',').collect();
            if parts.len() != t.alphabets().len() {
                bail!(
                    "expected {} comma-separated words, got {}",
                    t.alphabets().len(),
                    parts.len()
                );
            }
            let input: Vec<Word> = parts
                .iter()
                .zip(t.alphabets())
                .map(|(s, &k)| Word::parse(s, k))
                .collect::<Result<_, _>>()?;
            let image = apply(&t, &input)?;
            let out: Vec<String> = image.iter().map(|w| w.to_string()).collect();
            emit.value(&out, format!("{}\n", out.join(",")))?;
            Ok(0)
        }
        TableCmd::Equals { left, right, depth } => {
            let a = load_table(&left)?;
            let b = load_table(&right)?;
            let equal = match depth {
                None => equals(&a, &b)?,
                Some(d) => equals_at_depth(&a, &b, d)?,
            };
            let out = EqualsOut { equal, depth };
            emit.value(&out, format!("{}\n", if equal { "equal" } else { "different" }))?;
            Ok(0)
        }
        TableCmd::Reduce { file } => {
            let t = load_table(&file)?;
            let r = reduce(&t)?;
            emit.value(&r.to_json(), table_text(&r))?;
            Ok(0)
        }
        TableCmd::ToBisection { file } => {
            let t = load_table(&file)?;
            let s = table_to_bisection(&t)?;
            emit.value(&s.to_json(), bisection_text(&s))?;
            Ok(0)
        }
    }
}

/// Exhaustive comparison on all word tuples of the given depth in every
/// coordinate. Errors if the depth is smaller than some v-word.
fn equals_at_depth(a: &Table, b: &Table, depth: usize) -> Result<bool> {
    if a.alphabets() != b.alphabets() {
        bail!("tables have different alphabets");
    }
    let mut per_coord: Vec<Vec<Word>> = Vec::new();
    for &k in a.alphabets() {
        if depth == 0 {
            per_coord.push(vec![Word::empty(k)?]);
            continue;
        }
        let words = (0..depth)
            .map(|_| 0..k)
            .multi_cartesian_product()
            .map(|ls| {
                Word::new(k, ls.into_iter().map(|l| l as u8).collect())
                    .expect("letters in range")
            })
            .collect();
        per_coord.push(words);
    }
    for tuple in per_coord.into_iter().multi_cartesian_product() {
        if apply(a, &tuple)? != apply(b, &tuple)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn run_algebra(cmd: AlgebraCmd, emit: &Emit) -> Result<i32> {
    match cmd {
        AlgebraCmd::Convolve { left, right, cocycle } => {
            let (g, f, h) = load_element_pair(&left, &right)?;
            let prod = match cocycle {
                Some(cp) => twisted_convolve(&f, &h, &load_cocycle(&g, &cp)?)?,
                None => convolve(&f, &h)?,
            };
            let out = element_out(&g, &prod);
            emit.value(&out, element_text(&out))?;
            Ok(0)
        }
        AlgebraCmd::Norm { file, p, cocycle } => {
            let (g, coeffs) = load_element(&file)?;
            let f = AlgebraElement::from_coeffs(g.clone(), &coeffs)?;
            let c = cocycle.map(|cp| load_cocycle(&g, &cp)).transpose()?;
            let rep = reduced_norm(&f, p, c.as_ref())?;
            #[derive(Serialize)]
            struct ReducedNormOut {
                value: f64,
                p: f64,
                fiber: String,
                fiber_dim: usize,
                restarts: usize,
                converged: bool,
            }
            let out = ReducedNormOut {
                value: rep.value,
                p,
                fiber: rep.fiber.clone(),
                fiber_dim: rep.fiber_dim,
                restarts: rep.norm.restarts,
                converged: rep.norm.converged,
            };
            let text = format!(
                "reduced norm {:.12} (p = {p}, attained on the fiber of {}, dim {})\n",
                out.value, out.fiber, out.fiber_dim
            );
            emit.value(&out, text)?;
            Ok(0)
        }
        AlgebraCmd::Expect { file } => {
            let (g, coeffs) = load_element(&file)?;
            let f = AlgebraElement::from_coeffs(g.clone(), &coeffs)?;
            let out = element_out(&g, &expectation(&f));
            emit.value(&out, element_text(&out))?;
            Ok(0)
        }
        AlgebraCmd::Lambda { file, unit, p, cocycle } => {
            let (g, coeffs) = load_element(&file)?;
            let f = AlgebraElement::from_coeffs(g.clone(), &coeffs)?;
            let c = cocycle.map(|cp| load_cocycle(&g, &cp)).transpose()?;
            let x = g
                .arrow_by_label(&unit)
                .ok_or_else(|| anyhow!("unknown arrow `{unit}`"))?;
            let rep = lambda_matrix(&f, x, p, c.as_ref())?;
            #[derive(Serialize)]
            struct LambdaOut {
                unit: String,
                p: f64,
                basis: Vec<String>,
                matrix: MatrixJson,
            }
            let out = LambdaOut {
                unit: rep.unit.clone(),
                p,
                basis: rep.basis.clone(),
                matrix: rep.matrix.to_json(),
            };
            let mut text = format!("fiber of {} with basis ({})\n", out.unit, out.basis.join(", "));
            for row in &out.matrix {
                let cells = row
                    .iter()
                    .map(|[re, im]| format!("{re:+.6}{im:+.6}i"))
                    .join("  ");
                let _ = writeln!(text, "  {cells}");
            }
            emit.value(&out, text)?;
            Ok(0)
        }
        AlgebraCmd::Admissible { left, right, beta, p } => {
            let (g, a, b) = load_element_pair(&left, &right)?;
            #[derive(Deserialize)]
            struct BetaJson {
                map: BTreeMap<String, String>,
            }
            let bj: BetaJson = read_json(&beta)?;
            let mut map = BTreeMap::new();
            for (from, to) in &bj.map {
                let x = g
                    .arrow_by_label(from)
                    .ok_or_else(|| anyhow!("unknown unit `{from}`"))?;
                let y = g
                    .arrow_by_label(to)
                    .ok_or_else(|| anyhow!("unknown unit `{to}`"))?;
                map.insert(x, y);
            }
            let beta = PartialUnitMap::new(&g, map)?;
            let rep = verify_admissible_pair(&a, &b, &beta, p)?;
            #[derive(Serialize)]
            struct AdmissibleOut {
                admissible: bool,
                n1_positivity: bool,
                n2_supports: bool,
                r1_intertwine: bool,
                r2_intertwine: bool,
                details: Vec<String>,
            }
            let out = AdmissibleOut {
                admissible: rep.admissible(),
                n1_positivity: rep.n1_positivity,
                n2_supports: rep.n2_supports,
                r1_intertwine: rep.r1_intertwine,
                r2_intertwine: rep.r2_intertwine,
                details: rep.details.clone(),
            };
            let mut text = format!(
                "admissible: {} (N1 {}, N2 {}, R1 {}, R2 {})\n",
                out.admissible, out.n1_positivity, out.n2_supports, out.r1_intertwine, out.r2_intertwine
            );
            for d in &out.details {
                let _ = writeln!(text, "  {d}");
            }
            emit.value(&out, text)?;
            Ok(0)
        }
    }
}

fn load_matrix(path: &Path, p: f64) -> Result<grpdlab::PMatrix> {
    let j: MatrixJson = read_json(path)?;
    Ok(grpdlab::PMatrix::from_json(p, &j)?)
}

fn run_pnorm(cmd: PnormCmd, emit: &Emit) -> Result<i32> {
    match cmd {
        PnormCmd::Norm { file, p, seed, tol } => {
            let a = load_matrix(&file, p)?;
            let rep = p_operator_norm_seeded(&a, seed);
            let image = a.apply(&rep.witness);
            let ratio = vector_p_norm(&image, p) / vector_p_norm(&rep.witness, p);
            #[derive(Serialize)]
            struct NormOut {
                value: f64,
                p: f64,
                witness: Vec<[f64; 2]>,
                restarts: usize,
                converged: bool,
                witness_consistent: bool,
            }
            let out = NormOut {
                value: rep.value,
                p,
                witness: rep.witness.iter().map(|z| [z.re, z.im]).collect(),
                restarts: rep.restarts,
                converged: rep.converged,
                witness_consistent: (ratio - rep.value).abs() <= tol * (1.0 + rep.value),
            };
            let text = format!("norm {:.12} (p = {p})\n", out.value);
            emit.value(&out, text)?;
            Ok(0)
        }
        PnormCmd::Herm { file, p } => {
            let a = load_matrix(&file, p)?;
            let rep = hermitian_test(&a, None);
            #[derive(Serialize)]
            struct HermOut {
                hermitian: bool,
                worst_t: f64,
                worst_norm: f64,
                grid_points_checked: usize,
            }
            let out = HermOut {
                hermitian: rep.hermitian,
                worst_t: rep.worst_t,
                worst_norm: rep.worst_norm,
                grid_points_checked: rep.grid_points_checked,
            };
            let text = format!(
                "hermitian: {} (worst ‖exp(itA)‖ = {:.9} at t = {:.6}, {} grid points)\n",
                out.hermitian, out.worst_norm, out.worst_t, out.grid_points_checked
            );
            emit.value(&out, text)?;
            Ok(0)
        }
        PnormCmd::Mp { left, right, p } => {
            let u = load_matrix(&left, p)?;
            let v = load_matrix(&right, p)?;
            let ok = is_mp_partial_isometry(&u, &v)?;
            #[derive(Serialize)]
            struct MpOut {
                mp_partial_isometry: bool,
            }
            emit.value(
                &MpOut { mp_partial_isometry: ok },
                format!("mp partial isometry: {ok}\n"),
            )?;
            Ok(0)
        }
        PnormCmd::Isometry { file, p, tol } => {
            let a = load_matrix(&file, p)?;
            let rep = is_invertible_isometry(&a);
            let isometry = rep.invertible
                && rep.norm <= 1.0 + tol
                && rep.inverse_norm.is_some_and(|n| n <= 1.0 + tol);
            #[derive(Serialize)]
            struct IsoOut {
                invertible: bool,
                norm: f64,
                inverse_norm: Option<f64>,
                isometry: bool,
                tol: f64,
            }
            let out = IsoOut {
                invertible: rep.invertible,
                norm: rep.norm,
                inverse_norm: rep.inverse_norm,
                isometry,
                tol,
            };
            emit.value(&out, format!("{}\n", rep.diagnostic))?;
            Ok(0)
        }
    }
}

fn run_check(cmd: CheckCmd, emit: &Emit) -> Result<i32> {
    match cmd {
        CheckCmd::Core(a) => {
            let rep = core_diagonal_check(a.n, a.p, a.samples, a.seed)?;
            emit.value(&rep, format!("{rep}"))?;
            Ok(report_exit(&rep))
        }
        CheckCmd::Isometries(a) => {
            let rep = isometry_classification_check(a.n, a.p, a.samples, a.seed)?;
            emit.value(&rep, format!("{rep}"))?;
            Ok(report_exit(&rep))
        }
        CheckCmd::Tfg(a) => {
            let rep = tfg_quotient_check(a.n, a.p, a.samples, a.seed)?;
            emit.value(&rep, format!("{rep}"))?;
            Ok(report_exit(&rep))
        }
        CheckCmd::Af { file, p } => {
            let g = load_groupoid(&file)?;
            let rep = af_embeddability_report(&g, p);
            emit.value(&rep, format!("{rep}"))?;
            Ok(report_exit(&rep))
        }
        CheckCmd::Witness { alphabets } => {
            let ks = parse_alphabets(&alphabets)?;
            let w = non_abelian_witness(&ks)?;
            #[derive(Serialize)]
            struct WitnessOut {
                alphabets: Vec<u32>,
                first: TableJson,
                second: TableJson,
                commutator: TableJson,
                moved_word: Vec<String>,
                image: Vec<String>,
            }
            let out = WitnessOut {
                alphabets: ks,
                first: w.first.to_json(),
                second: w.second.to_json(),
                commutator: w.commutator.to_json(),
                moved_word: w.moved_word.iter().map(|x| x.to_string()).collect(),
                image: w.image.iter().map(|x| x.to_string()).collect(),
            };
            let text = format!(
                "commutator moves ({}) to ({})\n",
                out.moved_word.join(","),
                out.image.join(",")
            );
            emit.value(&out, text)?;
            Ok(0)
        }
    }
}
