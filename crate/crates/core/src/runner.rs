//! The run driver: wires the simulator and the kernel into the four-step
//! decision loop, writes the per-cycle JSON Lines log, the feature log and
//! the run summary, and replays captured feature logs through the kernel
//! alone.
//!
//! Per cycle: perceive → ingest → representation pipeline → classify and
//! interpret → (deciding policy only) signature, retrieval, recommendation
//! → step the world under the chosen actions. Outcomes of executed
//! decisions are scored against total fieriness once the horizon elapses
//! and fed back into the case weights.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::characterization::{CharacterizationError, CharacterizationReport};
use crate::config::{ConfigError, KernelConfig};
use crate::fsf::{Fsf, ParseError};
use crate::kernel::Kernel;
use crate::prediction::{
    compute_signature, nearest_fire_actions, outcome_score, recommend, ActionTemplate, CaseBase,
    CaseBaseError, Recommendation,
};
use crate::records::{CharacterizationRecord, RecommendationRecord, SnapshotRecord};
use crate::representation::RepresentationSnapshot;
use crate::scenario::{Scenario, ScenarioError};
use crate::sim::{Action, Metrics, SimError, World};

pub const EVENTS_FILE: &str = "events.jsonl";
pub const FSF_LOG_FILE: &str = "fsf.log";
pub const SUMMARY_FILE: &str = "summary.json";

/// Seed used when generating the bundled default case base.
const DEFAULT_CASEBASE_SEED: u64 = 1;
/// Cycle whose signature is captured for each seeded case.
const DEFAULT_CASEBASE_CYCLE: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Brigades hold position; pure observation.
    None,
    /// Every brigade chases its nearest known fire.
    Baseline,
    /// Actions come from case-based recommendations.
    Dss,
}

impl Policy {
    pub fn label(self) -> &'static str {
        match self {
            Policy::None => "none",
            Policy::Baseline => "baseline",
            Policy::Dss => "dss",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario_path: PathBuf,
    pub seed: u64,
    pub cycles: u64,
    pub policy: Policy,
    pub casebase_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub kernel: KernelConfig,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    /// Final simulator metrics; absent for kernel-only replays.
    pub final_metrics: Option<Metrics>,
    pub per_cycle_log_path: String,
    pub recommendations_issued: u64,
    pub cases_updated: u64,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    CaseBase(#[from] CaseBaseError),
    #[error("policy dss requires --casebase")]
    MissingCasebase,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path} line {line}: {source}")]
    ReplayParse {
        path: String,
        line: usize,
        source: ParseError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Kernel(#[from] CharacterizationError),
}

impl RunError {
    /// Process exit code convention: 2 for malformed inputs, 3 for case
    /// base problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Scenario(_)
            | RunError::ReplayParse { .. }
            | RunError::Config(_)
            | RunError::MissingCasebase => 2,
            RunError::CaseBase(_) => 3,
            _ => 1,
        }
    }
}

/// Everything produced by one driver cycle.
#[derive(Debug, Clone)]
pub struct CycleOutput {
    pub cycle: u64,
    pub fsf_lines: Vec<String>,
    pub snapshot: RepresentationSnapshot,
    pub report: CharacterizationReport,
    pub recommendation: Option<Recommendation>,
}

struct PendingOutcome {
    decision_cycle: u64,
    fieriness_before: u64,
    case_ids: Vec<u64>,
}

/// One closed-loop run over a world. `step` advances a full cycle; callers
/// that only want the files use [`run_scenario`].
pub struct RunDriver {
    world: World,
    kernel: Kernel,
    policy: Policy,
    kernel_cfg: KernelConfig,
    casebase: Option<CaseBase>,
    pending: Vec<PendingOutcome>,
    recommendations_issued: u64,
    cases_updated: u64,
}

impl RunDriver {
    pub fn new(
        scenario: &Scenario,
        seed: u64,
        policy: Policy,
        kernel_cfg: KernelConfig,
        casebase: Option<CaseBase>,
    ) -> Result<Self, RunError> {
        if policy == Policy::Dss && casebase.is_none() {
            return Err(RunError::MissingCasebase);
        }
        Ok(Self {
            world: World::from_scenario(scenario, seed)?,
            kernel: Kernel::new(&kernel_cfg),
            policy,
            kernel_cfg,
            casebase,
            pending: Vec::new(),
            recommendations_issued: 0,
            cases_updated: 0,
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn casebase(&self) -> Option<&CaseBase> {
        self.casebase.as_ref()
    }

    pub fn recommendations_issued(&self) -> u64 {
        self.recommendations_issued
    }

    pub fn cases_updated(&self) -> u64 {
        self.cases_updated
    }

    pub fn step(&mut self) -> Result<CycleOutput, RunError> {
        let cycle = self.world.cycle();
        let fieriness_now = self.world.metrics().fieriness_total;

        // Score decisions whose horizon ends this cycle before retrieving
        // again, so learning reaches the very next decision.
        if let Some(base) = self.casebase.as_mut() {
            let horizon = self.kernel_cfg.prediction.horizon;
            let alpha = self.kernel_cfg.prediction.alpha;
            let mut matured = Vec::new();
            self.pending.retain(|p| {
                if p.decision_cycle + horizon == cycle {
                    matured.push((p.fieriness_before, p.case_ids.clone()));
                    false
                } else {
                    true
                }
            });
            for (before, case_ids) in matured {
                let score = outcome_score(before, fieriness_now);
                self.cases_updated += base.apply_outcome(&case_ids, score, alpha);
            }
        }

        let fsfs = self.world.perceive();
        let fsf_lines: Vec<String> = fsfs.iter().map(Fsf::to_line).collect();
        let (snapshot, report) = self.kernel.cycle(fsfs, cycle)?;

        let (recommendation, actions): (Option<Recommendation>, Vec<Action>) = match self.policy {
            Policy::None => (None, Vec::new()),
            Policy::Baseline => (None, nearest_fire_actions(&snapshot)),
            Policy::Dss => {
                let base = self.casebase.as_ref().expect("dss policy has a case base");
                let signature = compute_signature(&snapshot, &report.groups);
                let ranked = base.retrieve(&signature, self.kernel_cfg.prediction.k);
                let rec = recommend(&ranked, &snapshot);
                if !rec.support.is_empty() {
                    self.pending.push(PendingOutcome {
                        decision_cycle: cycle,
                        fieriness_before: fieriness_now,
                        case_ids: rec.support.iter().map(|s| s.case_id).collect(),
                    });
                }
                self.recommendations_issued += 1;
                let actions = rec.actions.clone();
                (Some(rec), actions)
            }
        };

        self.world.step(&actions)?;

        Ok(CycleOutput {
            cycle,
            fsf_lines,
            snapshot,
            report,
            recommendation,
        })
    }
}

/// Run a scenario end to end, writing `events.jsonl`, `fsf.log` and
/// `summary.json` into the output directory. For the deciding policy the
/// case base is created from the seeded default when missing and persisted
/// back at the end of the run.
pub fn run_scenario(cfg: &RunConfig) -> Result<RunReport, RunError> {
    let scenario = Scenario::load(&cfg.scenario_path)?;
    let casebase = match cfg.policy {
        Policy::Dss => {
            let path = cfg.casebase_path.as_ref().ok_or(RunError::MissingCasebase)?;
            if !path.exists() {
                default_case_base().save(path)?;
            }
            Some(CaseBase::load(path)?)
        }
        _ => None,
    };
    let mut driver = RunDriver::new(&scenario, cfg.seed, cfg.policy, cfg.kernel.clone(), casebase)?;

    fs::create_dir_all(&cfg.out_dir)?;
    let mut events = BufWriter::new(File::create(cfg.out_dir.join(EVENTS_FILE))?);
    let mut fsf_log = BufWriter::new(File::create(cfg.out_dir.join(FSF_LOG_FILE))?);

    for _ in 0..cfg.cycles {
        let out = driver.step()?;
        for line in &out.fsf_lines {
            writeln!(fsf_log, "{line}")?;
        }
        write_cycle_records(&mut events, &out)?;
    }
    events.flush()?;
    fsf_log.flush()?;

    if cfg.policy == Policy::Dss {
        let path = cfg.casebase_path.as_ref().expect("checked above");
        driver
            .casebase()
            .expect("dss policy has a case base")
            .save(path)?;
    }

    let report = RunReport {
        final_metrics: Some(driver.world().metrics()),
        per_cycle_log_path: EVENTS_FILE.to_string(),
        recommendations_issued: driver.recommendations_issued(),
        cases_updated: driver.cases_updated(),
    };
    write_summary(&cfg.out_dir, &report)?;
    Ok(report)
}

fn write_cycle_records<W: Write>(writer: &mut W, out: &CycleOutput) -> std::io::Result<()> {
    let snapshot = SnapshotRecord::from(&out.snapshot);
    let characterization = CharacterizationRecord::from(&out.report);
    let recommendation = RecommendationRecord::new(out.cycle, out.recommendation.as_ref());
    writeln!(writer, "{}", serde_json::to_string(&snapshot).unwrap())?;
    writeln!(writer, "{}", serde_json::to_string(&characterization).unwrap())?;
    writeln!(writer, "{}", serde_json::to_string(&recommendation).unwrap())?;
    Ok(())
}

fn write_summary(out_dir: &Path, report: &RunReport) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(report).unwrap();
    text.push('\n');
    fs::write(out_dir.join(SUMMARY_FILE), text)
}

/// Replay a captured feature log through the kernel layers alone. Features
/// are grouped into cycles by their `time` qualifier; the kernel then runs
/// every cycle from 0 through the highest time seen. Recommendation
/// records are written null.
pub fn replay_log(
    log_path: &Path,
    out_dir: &Path,
    kernel_cfg: &KernelConfig,
) -> Result<RunReport, RunError> {
    let text = fs::read_to_string(log_path)?;
    let mut by_cycle: BTreeMap<u64, Vec<Fsf>> = BTreeMap::new();
    for (index, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fsf = if trimmed.starts_with('{') {
            Fsf::from_json_line(trimmed)
        } else {
            Fsf::parse(trimmed)
        }
        .map_err(|source| RunError::ReplayParse {
            path: log_path.display().to_string(),
            line: index + 1,
            source,
        })?;
        by_cycle.entry(fsf.time()).or_default().push(fsf);
    }

    fs::create_dir_all(out_dir)?;
    let mut events = BufWriter::new(File::create(out_dir.join(EVENTS_FILE))?);

    if let Some((&max_cycle, _)) = by_cycle.iter().next_back() {
        let mut kernel = Kernel::new(kernel_cfg);
        for cycle in 0..=max_cycle {
            let batch = by_cycle.remove(&cycle).unwrap_or_default();
            let (snapshot, report) = kernel.cycle(batch, cycle)?;
            let out = CycleOutput {
                cycle,
                fsf_lines: Vec::new(),
                snapshot,
                report,
                recommendation: None,
            };
            write_cycle_records(&mut events, &out)?;
        }
    }
    events.flush()?;

    let report = RunReport {
        final_metrics: None,
        per_cycle_log_path: EVENTS_FILE.to_string(),
        recommendations_issued: 0,
        cases_updated: 0,
    };
    write_summary(out_dir, &report)?;
    Ok(report)
}

const BUNDLED_CLUSTER: &str = include_str!("../../../scenarios/cluster.json");
const BUNDLED_SCATTERED: &str = include_str!("../../../scenarios/scattered.json");
const BUNDLED_REGROUP: &str = include_str!("../../../scenarios/regroup.json");
const BUNDLED_QUIET: &str = include_str!("../../../scenarios/quiet.json");

/// The seeded default case base: four cases whose signatures are captured
/// by running the four bundled situation archetypes for six cycles under
/// the hold policy and taking the cycle-5 signature. All weights start at
/// 0.5.
pub fn default_case_base() -> CaseBase {
    let specs: [(&str, ActionTemplate, &[&str]); 4] = [
        (
            BUNDLED_CLUSTER,
            ActionTemplate::AttackStrongest,
            &[
                "dense fire cluster reinforces itself and spreads to adjacent buildings",
                "unchecked, the block burns out within tens of cycles",
            ],
        ),
        (
            BUNDLED_SCATTERED,
            ActionTemplate::AttackNearest,
            &[
                "isolated small fires burn independently",
                "each fire is cheap to extinguish while young",
            ],
        ),
        (
            BUNDLED_REGROUP,
            ActionTemplate::Regroup,
            &[
                "brigades outnumbered by surrounding fires",
                "dispersed effort extinguishes nothing",
            ],
        ),
        (
            BUNDLED_QUIET,
            ActionTemplate::Hold,
            &["no incidents in view", "movement wastes readiness"],
        ),
    ];
    let mut base = CaseBase::new();
    for (scenario_json, template, consequences) in specs {
        let scenario = Scenario::from_json(scenario_json).expect("bundled scenario is valid");
        let mut driver = RunDriver::new(
            &scenario,
            DEFAULT_CASEBASE_SEED,
            Policy::None,
            KernelConfig::new(),
            None,
        )
        .expect("hold policy needs no case base");
        let mut signature = None;
        for _ in 0..=DEFAULT_CASEBASE_CYCLE {
            let out = driver.step().expect("bundled scenario steps cleanly");
            if out.cycle == DEFAULT_CASEBASE_CYCLE {
                signature = Some(compute_signature(&out.snapshot, &out.report.groups));
            }
        }
        base.add(
            signature.expect("capture cycle reached"),
            consequences.iter().map(|s| s.to_string()).collect(),
            template,
            0.5,
        );
    }
    base
}

/// Write the seeded default case base to `path`.
pub fn init_case_base(path: &Path) -> Result<(), RunError> {
    default_case_base().save(path)?;
    Ok(())
}

/// One line per case: id, template, weight, consequences.
pub fn list_case_base(path: &Path) -> Result<String, RunError> {
    let base = CaseBase::load(path)?;
    let mut out = String::new();
    for case in base.cases() {
        out.push_str(&format!(
            "{} {} {:.2} {}\n",
            case.id,
            case.template.label(),
            case.weight,
            case.consequences.join("; ")
        ));
    }
    Ok(out)
}
