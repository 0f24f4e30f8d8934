//! Command-line surface: `burnside`, `crystal check` and `solve`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::burnside::{self, join, BurnsideRing, TableOfMarks};
use crate::config::Config;
use crate::crystal;
use crate::functional::{self, LoopState, ProblemRegistry};
use crate::group::{self, DEFAULT_CAP};
use crate::minimax::{
    self, classify_orbits, geometry_check, mountain_pass, CriticalCandidate, DeformationParams,
    MountainPassConfig, NeighborhoodDeformation,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;
pub const EXIT_GEOMETRY: i32 = 3;
pub const EXIT_INVARIANCE: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;

pub const DEFAULT_SEED: u64 = 20_240_601;
const SERIES_NODES: usize = 256;

#[derive(Debug, Parser)]
#[command(name = "equipass", version, about = "Burnside rings, crystallographic maximality checks and equivariant mountain passes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Burnside-ring computations for a finite permutation group.
    Burnside {
        #[command(subcommand)]
        command: BurnsideCommand,
    },
    /// Maximality checks for `Z^n ⋊ P`.
    Crystal {
        #[command(subcommand)]
        command: CrystalCommand,
    },
    /// Critical points of a periodic problem: a minimum and a mountain pass.
    Solve(SolveArgs),
}

#[derive(Debug, Subcommand)]
pub enum BurnsideCommand {
    /// Print the table of marks.
    Marks { group: PathBuf },
    /// Print the Bartsch element, its marks and whether proper marks vanish.
    Bartsch { group: PathBuf },
    /// Rank and basis of the inverse limit over a diagram.
    Limit { diagram: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum CrystalCommand {
    Check {
        crystal: PathBuf,
        /// Write the diagram of maximal finite subgroups here.
        #[arg(long)]
        emit_diagram: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem configuration (`problem=…`, `T0=…`, …).
    #[arg(long)]
    pub problem: PathBuf,
    /// Solver configuration (`pathpoints=…`, `gtol=…`, …).
    #[arg(long)]
    pub solver: Option<PathBuf>,
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Burnside { command } => cmd_burnside(command, out),
        Command::Crystal { command: CrystalCommand::Check { crystal, emit_diagram } } => {
            cmd_crystal(&crystal, emit_diagram.as_deref(), out)
        }
        Command::Solve(a) => cmd_solve(&a, &args.join(" "), out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INPUT
        }
    }
}

/// `EQUIPASS_CAP`, or the default group-size cap.
pub fn group_cap() -> anyhow::Result<usize> {
    match std::env::var("EQUIPASS_CAP") {
        Ok(v) => v.trim().parse().with_context(|| format!("EQUIPASS_CAP={v:?} is not a positive integer")),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn cmd_burnside(command: BurnsideCommand, out: &mut dyn Write) -> anyhow::Result<i32> {
    let cap = group_cap()?;
    match command {
        BurnsideCommand::Marks { group } => {
            let g = group::parse_group(&read(&group)?, cap).with_context(|| group.display().to_string())?;
            let ring = BurnsideRing::new(Arc::new(g));
            writeln!(out, "# class orders {}", join(&ring.class_orders()))?;
            write!(out, "{}", TableOfMarks::of(ring.group()))?;
            Ok(EXIT_OK)
        }
        BurnsideCommand::Bartsch { group } => {
            let g = group::parse_group(&read(&group)?, cap).with_context(|| group.display().to_string())?;
            let ring = BurnsideRing::new(Arc::new(g));
            let x = ring.bartsch_element();
            let ghost = ring.marks(&x);
            let top = ghost.values.len() - 1;
            let pass = ghost.values[..top].iter().all(|&v| v == 0) && ghost.values[top] == ring.bartsch_top_mark();
            writeln!(out, "# class orders {}", join(&ring.class_orders()))?;
            writeln!(out, "element {}", join(&x.coeffs))?;
            writeln!(out, "ghost {}", join(&ghost.values))?;
            writeln!(out, "verdict={}", verdict(pass))?;
            Ok(if pass { EXIT_OK } else { EXIT_VERDICT })
        }
        BurnsideCommand::Limit { diagram } => {
            let d = burnside::parse_diagram(&read(&diagram)?, cap).with_context(|| diagram.display().to_string())?;
            let lim = burnside::limit_burnside(&d)?;
            writeln!(out, "rank={}", lim.rank)?;
            for row in &lim.basis {
                writeln!(out, "{}", join(row))?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn cmd_crystal(path: &Path, emit_diagram: Option<&Path>, out: &mut dyn Write) -> anyhow::Result<i32> {
    let c = crystal::parse_crystal(&read(path)?, group_cap()?).with_context(|| path.display().to_string())?;
    let report = c.check_condition_m();
    write!(out, "{report}")?;
    if let Some(target) = emit_diagram {
        if !report.free_outside_zero {
            bail!("no diagram: the action is not free outside zero");
        }
        let d = c.finite_subgroup_diagram()?;
        fs::write(target, burnside::format_diagram(&d)).with_context(|| format!("writing {}", target.display()))?;
        writeln!(out, "diagram={}", target.display())?;
    }
    Ok(if report.verdict { EXIT_OK } else { EXIT_VERDICT })
}

/// Solver settings read from the optional solver config.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub path_points: usize,
    pub sweeps: usize,
    pub gtol: f64,
    pub step: f64,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    pub rim_radius: Option<f64>,
    pub rim_level: Option<f64>,
    pub orbit_tol: f64,
    pub invariance_samples: usize,
}

impl SolverSettings {
    pub fn from_config(c: &Config) -> anyhow::Result<Self> {
        let s = SolverSettings {
            path_points: c.get_or("pathpoints", 40)?,
            sweeps: c.get_or("sweeps", 2000)?,
            gtol: c.get_or("gtol", 1e-6)?,
            step: c.get_or("step", 0.5)?,
            delta: c.get("delta")?,
            epsilon: c.get("epsilon")?,
            rim_radius: c.get("rim_radius")?,
            rim_level: c.get("rim_level")?,
            orbit_tol: c.get_or("orbit_tol", 1e-3)?,
            invariance_samples: c.get_or("invariance_samples", 100)?,
        };
        if s.path_points < 2 || !(s.gtol > 0.0) || !(s.step > 0.0) || !(s.orbit_tol > 0.0) {
            bail!("solver config needs pathpoints >= 2 and positive gtol, step, orbit_tol");
        }
        Ok(s)
    }
}

/// `t q_1 … q_n` at evenly spaced times over one period.
pub fn time_series(q: &LoopState, nodes: usize) -> String {
    let n = q.dimension();
    let header: Vec<String> = (1..=n).map(|i| format!("q_{i}")).collect();
    let mut s = format!("# t {}\n", header.join(" "));
    let mut x = vec![0.0; n];
    for j in 0..nodes {
        let t = q.period() * j as f64 / nodes as f64;
        q.value_at(t, &mut x);
        let cols: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&format!("{t:?} {}\n", cols.join(" ")));
    }
    s
}

pub fn candidate_record(c: &CriticalCandidate, file: &str) -> String {
    format!(
        "orbit={} value={:?} gnorm={:?} residual={:?} file={}",
        c.orbit_id, c.value, c.gradient_norm, c.residual, file
    )
}

fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    hex::encode(h.finalize())
}

pub fn cmd_solve(a: &SolveArgs, command_line: &str, out: &mut dyn Write) -> anyhow::Result<i32> {
    let started = chrono::Utc::now();
    let problem_text = read(&a.problem)?;
    let solver_text = match &a.solver {
        Some(path) => read(path)?,
        None => String::new(),
    };
    let problem_cfg = Config::parse(&problem_text).with_context(|| a.problem.display().to_string())?;
    let solver_cfg = Config::parse(&solver_text).context("solver config")?;
    let settings = SolverSettings::from_config(&solver_cfg)?;
    let p = ProblemRegistry::with_builtins().build(&problem_cfg)?;
    let p = p.as_ref();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    functional::validate_problem(p, &mut rng)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;

    let minimum = minimax::find_minimum(p, p.modes(), settings.gtol * 1e-4, &mut rng)?;
    let (base, _) = functional::normalize_to_region(p, &minimum.state);
    let mut far = base.clone();
    far.mean_mut()[0] += p.spatial_periods()[0];
    let mut mp_cfg =
        MountainPassConfig::new(base.clone(), far, settings.rim_radius.unwrap_or_else(|| minimax::default_rim_radius(p)));
    mp_cfg.rim_level = settings.rim_level;
    mp_cfg.path_points = settings.path_points;
    mp_cfg.sweeps = settings.sweeps;
    mp_cfg.gtol = settings.gtol;
    mp_cfg.step = settings.step;

    let geometry = geometry_check(p, &mp_cfg, &mut rng)?;
    writeln!(
        out,
        "geometry base={:?} far={:?} rim_min={:?} {}",
        geometry.base_value,
        geometry.far_value,
        geometry.rim_min,
        verdict(geometry.passed)
    )?;
    if let Some(reason) = &geometry.reason {
        writeln!(out, "geometry: {reason}")?;
        return Ok(EXIT_GEOMETRY);
    }
    let invariance = functional::invariance_check(p, settings.invariance_samples, &mut rng)?;
    writeln!(
        out,
        "invariance samples={} max_relative={:e} {}",
        invariance.samples,
        invariance.max_relative,
        verdict(invariance.passed)
    )?;
    if !invariance.passed {
        return Ok(EXIT_INVARIANCE);
    }

    let mp = mountain_pass(p, &mp_cfg, None)?;
    let mut candidates = vec![CriticalCandidate::new(p, &minimum.state, settings.gtol, "minimum")?, mp.candidate];
    let orbits = classify_orbits(p, &mut candidates, settings.orbit_tol)?;

    let mut artifacts = Vec::new();
    let mut records = String::new();
    for (i, c) in candidates.iter().enumerate() {
        let loop_file = format!("candidate_{i}_{}.loop", c.label);
        let series_file = format!("candidate_{i}_{}.tsv", c.label);
        fs::write(a.out.join(&loop_file), c.state.to_text())?;
        fs::write(a.out.join(&series_file), time_series(&c.state, SERIES_NODES))?;
        let record = candidate_record(c, &loop_file);
        writeln!(out, "{record}")?;
        records.push_str(&record);
        records.push('\n');
        artifacts.push(loop_file);
        artifacts.push(series_file);
    }
    fs::write(a.out.join("candidates.txt"), &records)?;
    artifacts.push("candidates.txt".to_string());

    if let Some(epsilon) = settings.epsilon {
        let delta = settings.delta.unwrap_or_else(|| minimax::default_delta(p));
        let level = candidates.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
        let dp = DeformationParams::new(level, epsilon, delta)?;
        let states = candidates.iter().filter(|c| (c.value - level).abs() <= epsilon).map(|c| c.state.clone()).collect();
        let nd = NeighborhoodDeformation::new(states, delta, dp)?;
        let samples: Vec<LoopState> = mp.path.iter().map(|q| functional::normalize_to_region(p, q).0).collect();
        let r = nd.verify(p, &samples)?;
        writeln!(
            out,
            "deformation level={level:?} epsilon={epsilon:?} delta={delta:?} tested={} pushed_below={} hypothesis_violations={}",
            r.tested, r.pushed_below, r.hypothesis_violations
        )?;
    }

    let converged = candidates.iter().filter(|c| c.converged).count();
    let status = if converged > 0 { "PASS" } else { "FAIL" };
    let summary = format!("candidates={} converged={converged} orbits={orbits} status={status}", candidates.len());
    writeln!(out, "{summary}")?;
    let finished = chrono::Utc::now();
    let mut manifest = format!(
        "command={command_line}\nseed={}\nconfig_digest={}\nstarted={}\nfinished={}\n",
        a.seed,
        sha256_hex(&[problem_text.as_bytes(), solver_text.as_bytes()]),
        started.to_rfc3339(),
        finished.to_rfc3339()
    );
    for f in &artifacts {
        manifest.push_str(&format!("artifact={f}\n"));
    }
    manifest.push_str(&format!("summary={summary}\n"));
    fs::write(a.out.join("manifest.txt"), manifest)?;
    Ok(if converged > 0 { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

/// Parsed `candidates.txt` line.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRecord {
    pub orbit: usize,
    pub value: f64,
    pub gnorm: f64,
    pub residual: f64,
    pub file: String,
}

pub fn parse_candidate_record(line: &str) -> anyhow::Result<CandidateRecord> {
    let mut rec = CandidateRecord { orbit: 0, value: 0.0, gnorm: 0.0, residual: 0.0, file: String::new() };
    let mut seen = 0;
    for field in line.split_whitespace() {
        let (k, v) = field.split_once('=').with_context(|| format!("bad field {field:?}"))?;
        match k {
            "orbit" => rec.orbit = v.parse()?,
            "value" => rec.value = v.parse()?,
            "gnorm" => rec.gnorm = v.parse()?,
            "residual" => rec.residual = v.parse()?,
            "file" => rec.file = v.to_string(),
            _ => bail!("unknown field {k:?}"),
        }
        seen += 1;
    }
    if seen != 5 {
        bail!("expected 5 fields in {line:?}");
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_round_trip() {
        let line = "orbit=1 value=-12.566370614359172 gnorm=1e-12 residual=3.2e-14 file=a.loop";
        let r = parse_candidate_record(line).unwrap();
        assert_eq!(r.orbit, 1);
        assert_eq!(r.value, -12.566370614359172);
        assert_eq!(r.file, "a.loop");
        assert!(parse_candidate_record("orbit=1").is_err());
    }

    #[test]
    fn series_header_and_rows() {
        let q = LoopState::constant(2.0, 1, &[0.5, 1.5]);
        let s = time_series(&q, 4);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# t q_1 q_2");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[2], "0.5 0.5 1.5");
    }
}
