//! Command-line front end.
//!
//! Decisions and findings go to stdout, diagnostics and traces to stderr.
//! Exit codes: 0 success, 1 usage or input error, 2 findings or failed
//! verification.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::admin::{payload_digest, transition, AdminAction, Blocktree, LifecycleState};
use crate::analysis::{self, AnalysisOptions, ArmStatus, Equivalence, KnowledgeMode, Reachability};
use crate::ast::{Policy, PolicyDocument};
use crate::circuit::{collect_atoms_into, compile_policy, deserialize_circuit, serialize_circuit, AtomTable, DualCircuit, RailAssignment};
use crate::decision::Decision;
use crate::delegation::{ActorId, CompositionOp, DelegationChain, KeyedHash, KeyedHashSigner, Signer};
use crate::parser;
use crate::runtime::{enforce, evaluate, AccessRequest, DecisionTrace, Pdp, PipRegistry};

const CIRCUIT_HEADER: &str = "frostc 1";

#[derive(Parser, Debug)]
#[command(name = "frost", version, about = "FROST policy toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a policy file.
    Check { file: PathBuf },
    /// Compile one policy to a circuit file.
    Compile {
        file: PathBuf,
        #[arg(long)]
        policy: String,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Decide a request against a policy file or a compiled circuit.
    Eval(EvalArgs),
    /// Run a static check on a policy.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        policy: String,
        /// dead-arms | reach=DECISION | conflict-free | equiv=OTHER
        #[arg(long)]
        check: String,
        #[arg(long, default_value = "partial")]
        mode: KnowledgeMode,
        #[arg(long, default_value_t = analysis::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Delegation chain workflows.
    #[command(subcommand)]
    Chain(ChainCommand),
    /// Lifecycle and blocktree administration.
    #[command(subcommand)]
    Admin(AdminCommand),
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// `.frost` source or circuit file.
    file: PathBuf,
    /// Policy to evaluate; required for source files.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    request: PathBuf,
    /// Print atom values and the enforcement outcome to stderr.
    #[arg(long)]
    trace: bool,
    /// Install through a decision point checked against this blocktree.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Blocktree policy id; defaults to --policy.
    #[arg(long = "policy-id")]
    policy_id: Option<String>,
    /// Lifecycle state of the installed policy; required with --tree.
    #[arg(long)]
    lifecycle: Option<String>,
}

#[derive(Subcommand, Debug)]
enum ChainCommand {
    /// Create a chain with the owner's root link.
    Init {
        chain: PathBuf,
        #[arg(long)]
        owner: String,
        /// Owner key, hex.
        #[arg(long)]
        key: String,
        #[arg(long)]
        asset: String,
        /// priority | join | named:TEMPLATE
        #[arg(long, default_value = "priority")]
        op: String,
        /// Policy definitions for the chain document.
        #[arg(long)]
        policies: PathBuf,
        /// Owner policy name.
        #[arg(long)]
        policy: String,
    },
    /// Append a link issued by the current tail.
    Extend {
        chain: PathBuf,
        /// Issuer key, hex; signs the link.
        #[arg(long = "issuer-key", conflicts_with = "sig", required_unless_present = "sig")]
        issuer_key: Option<String>,
        /// Precomputed signature, base64.
        #[arg(long)]
        sig: Option<String>,
        #[arg(long)]
        delegate: String,
        #[arg(long = "delegate-key")]
        delegate_key: String,
        #[arg(long)]
        policy: String,
        /// Additional policy definitions submitted with the link.
        #[arg(long)]
        policies: Option<PathBuf>,
    },
    /// Check ordering and signatures.
    Verify { chain: PathBuf },
    /// Write the folded policy as `.frost` text.
    Compose {
        chain: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        #[arg(long, default_value = "composed")]
        name: String,
    },
}

#[derive(Subcommand, Debug)]
enum AdminCommand {
    /// Append a payload version to a blocktree file (created if missing).
    Log {
        tree: PathBuf,
        #[arg(long = "policy-id")]
        policy_id: String,
        /// File whose bytes are logged, usually a compiled circuit.
        #[arg(long)]
        payload: PathBuf,
        #[arg(long)]
        timestamp: i64,
    },
    /// Recompute every node and report corrupt ones.
    Verify { tree: PathBuf },
    /// Apply one lifecycle action.
    Step {
        #[arg(long)]
        state: String,
        #[arg(long)]
        action: String,
    },
}

/// Outcome of a subcommand: exit code, stdout text, stderr text.
struct Output {
    code: i32,
    out: String,
    err: String,
}

impl Output {
    fn ok(out: impl Into<String>) -> Self {
        Output {
            code: 0,
            out: out.into(),
            err: String::new(),
        }
    }

    fn findings(out: impl Into<String>) -> Self {
        Output {
            code: 2,
            out: out.into(),
            err: String::new(),
        }
    }
}

/// Input or usage failure, exit code 1.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<Output, Failure>;

/// Runs the CLI with process stdout/stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

/// Runs the CLI writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Check { file } => check(&file),
        Command::Compile { file, policy, output } => compile(&file, &policy, &output),
        Command::Eval(args) => eval(&args),
        Command::Analyze {
            file,
            policy,
            check,
            mode,
            budget,
        } => analyze(&file, &policy, &check, mode, AnalysisOptions { budget }),
        Command::Chain(cmd) => chain(cmd),
        Command::Admin(cmd) => admin(cmd),
    };
    match result {
        Ok(o) => {
            let _ = out.write_all(o.out.as_bytes());
            let _ = err.write_all(o.err.as_bytes());
            o.code
        }
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_doc(path: &Path) -> Result<PolicyDocument, Failure> {
    let src = read(path)?;
    let doc = parser::parse(&src).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    if let Err(errors) = parser::validate_document(&doc) {
        let lines: Vec<String> = errors.iter().map(|e| format!("{}: {e}", path.display())).collect();
        return Err(Failure(lines.join("\nerror: ")));
    }
    Ok(doc)
}

fn policy<'d>(doc: &'d PolicyDocument, name: &str) -> Result<&'d Policy, Failure> {
    doc.get(name)
        .ok_or_else(|| Failure(format!("no policy named `{name}`")))
}

fn check(file: &Path) -> CmdResult {
    let doc = load_doc(file)?;
    let n = doc.definitions.len();
    Ok(Output::ok(format!("ok: {n} {}\n", if n == 1 { "policy" } else { "policies" })))
}

fn compile(file: &Path, name: &str, output: &Path) -> CmdResult {
    let doc = load_doc(file)?;
    let c = compile_policy(policy(&doc, name)?, &doc)?;
    write(output, &serialize_circuit(&c))?;
    Ok(Output::ok(format!(
        "compiled `{name}`: {} atoms, {} gates -> {}\n",
        c.table().len(),
        c.gates().len(),
        output.display()
    )))
}

fn load_circuit(args: &EvalArgs) -> Result<DualCircuit, Failure> {
    let text = read(&args.file)?;
    if text.starts_with(CIRCUIT_HEADER) {
        return deserialize_circuit(&text).map_err(|e| Failure(format!("{}: {e}", args.file.display())));
    }
    let name = args
        .policy
        .as_deref()
        .ok_or_else(|| Failure("--policy is required for policy source files".into()))?;
    let doc = load_doc(&args.file)?;
    Ok(compile_policy(policy(&doc, name)?, &doc)?)
}

fn eval(args: &EvalArgs) -> CmdResult {
    let circuit = load_circuit(args)?;
    let request = AccessRequest::from_json(&read(&args.request)?)?;
    let trace = match &args.tree {
        None => evaluate(&circuit, &request, &PipRegistry::new())?,
        Some(tree_path) => {
            let tree = Blocktree::from_text(&read(tree_path)?)?;
            let policy_id = args
                .policy_id
                .as_deref()
                .or(args.policy.as_deref())
                .ok_or_else(|| Failure("--policy-id is required with --tree".into()))?;
            let lifecycle: LifecycleState = args
                .lifecycle
                .as_deref()
                .ok_or_else(|| Failure("--lifecycle is required with --tree".into()))?
                .parse()?;
            let pdp = Pdp::default();
            pdp.install_policy(policy_id, circuit, policy_id, &tree, lifecycle)?;
            pdp.decide(policy_id, &request)?
        }
    };
    let mut o = Output::ok(format!("{}\n", trace.decision));
    if args.trace {
        o.err = format_trace(&trace);
    }
    Ok(o)
}

fn format_trace(trace: &DecisionTrace) -> String {
    let mut s = String::new();
    for (atom, k) in &trace.atoms {
        s.push_str(&format!("atom {atom} = {}\n", k.as_str()));
    }
    s.push_str(&format!("decision: {}\n", trace.decision));
    s.push_str(&format!("pep: {}\n", enforce(trace.decision)));
    s.push_str(&format!("elapsed: {:?}\n", trace.elapsed));
    s
}

fn format_witness(table: &AtomTable, rails: &RailAssignment) -> String {
    let mut s = String::new();
    for (atom, rail) in table.atoms().iter().zip(rails.rails()) {
        let value = rail.kleene().map_or("invalid", |k| k.as_str());
        s.push_str(&format!("  {atom} = {value}\n"));
    }
    s
}

fn analyze(file: &Path, name: &str, check: &str, mode: KnowledgeMode, opts: AnalysisOptions) -> CmdResult {
    let doc = load_doc(file)?;
    let p = policy(&doc, name)?;
    if check == "dead-arms" {
        let arms = analysis::dead_arms(p, &doc, mode, opts)?;
        let mut out = String::new();
        let mut inconclusive = Vec::new();
        for (k, status) in arms.iter().enumerate() {
            match status {
                ArmStatus::Dead => out.push_str(&format!("arm-{}-dead\n", k + 1)),
                ArmStatus::BudgetExceeded => inconclusive.push(k + 1),
                ArmStatus::Live(_) => {}
            }
        }
        if !out.is_empty() {
            return Ok(Output::findings(out));
        }
        if !inconclusive.is_empty() {
            return Err(Failure(format!("solver budget exceeded on arms {inconclusive:?}")));
        }
        return Ok(Output::ok("no dead arms\n"));
    }
    if check == "conflict-free" {
        let c = compile_policy(p, &doc)?;
        return Ok(match analysis::reachable(&c, Decision::Conflict, KnowledgeMode::Partial, opts)? {
            Reachability::Unreachable => Output::ok("conflict-free\n"),
            Reachability::Witness(rails) => {
                Output::findings(format!("conflict reachable\n{}", format_witness(c.table(), &rails)))
            }
        });
    }
    if let Some(d) = check.strip_prefix("reach=") {
        let d: Decision = d.parse()?;
        let c = compile_policy(p, &doc)?;
        return Ok(match analysis::reachable(&c, d, mode, opts)? {
            Reachability::Unreachable => Output::ok(format!("unreachable {d}\n")),
            Reachability::Witness(rails) => {
                Output::findings(format!("reachable {d}\n{}", format_witness(c.table(), &rails)))
            }
        });
    }
    if let Some(other) = check.strip_prefix("equiv=") {
        let q = policy(&doc, other)?;
        return Ok(match analysis::equivalent(p, q, &doc, mode, opts)? {
            Equivalence::Equivalent => Output::ok("equivalent\n"),
            Equivalence::Counterexample { rails, left, right } => {
                let mut table = AtomTable::new();
                collect_atoms_into(&mut table, p, &doc)?;
                collect_atoms_into(&mut table, q, &doc)?;
                Output::findings(format!(
                    "not equivalent: {name} = {left}, {other} = {right}\n{}",
                    format_witness(&table, &rails)
                ))
            }
        });
    }
    Err(Failure(format!(
        "unknown check `{check}` (expected dead-arms, reach=DECISION, conflict-free or equiv=NAME)"
    )))
}

fn key(hex_text: &str) -> Result<Vec<u8>, Failure> {
    hex::decode(hex_text).map_err(|e| Failure(format!("bad hex key: {e}")))
}

fn load_chain(path: &Path) -> Result<DelegationChain, Failure> {
    DelegationChain::from_json(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn parse_op(op: &str) -> Result<CompositionOp, Failure> {
    match op {
        "priority" => Ok(CompositionOp::Priority),
        "join" => Ok(CompositionOp::Join),
        _ => match op.strip_prefix("named:") {
            Some(t) if !t.is_empty() => Ok(CompositionOp::Named(t.to_string())),
            _ => Err(Failure(format!("unknown operator `{op}` (expected priority, join or named:TEMPLATE)"))),
        },
    }
}

fn chain(cmd: ChainCommand) -> CmdResult {
    match cmd {
        ChainCommand::Init {
            chain,
            owner,
            key: owner_key,
            asset,
            op,
            policies,
            policy,
        } => {
            let op = parse_op(&op)?;
            let doc = parser::parse(&read(&policies)?)?;
            let secret = key(&owner_key)?;
            let owner = ActorId::new(owner, secret.clone())?;
            let c = DelegationChain::init(owner, asset, op, &policy, doc, &KeyedHashSigner::new(secret))?;
            write(&chain, &c.to_json())?;
            Ok(Output::ok(format!("chain created with 1 link -> {}\n", chain.display())))
        }
        ChainCommand::Extend {
            chain,
            issuer_key,
            sig,
            delegate,
            delegate_key,
            policy,
            policies,
        } => {
            let mut c = load_chain(&chain)?;
            if let Some(path) = policies {
                c = c.submit_policies(&parser::parse(&read(&path)?)?)?;
            }
            let delegate = ActorId::new(delegate, key(&delegate_key)?)?;
            let issuer = c.tail().clone();
            let signature = match (issuer_key, sig) {
                (Some(k), _) => KeyedHashSigner::new(key(&k)?).sign(&c.next_link_message(&delegate, &policy)),
                (None, Some(s)) => {
                    use base64::Engine as _;
                    base64::engine::general_purpose::STANDARD
                        .decode(s)
                        .map_err(|e| Failure(format!("bad signature: {e}")))?
                }
                (None, None) => unreachable!("clap requires one of --issuer-key and --sig"),
            };
            let c = c.extend(issuer, delegate, &policy, signature, &KeyedHash)?;
            write(&chain, &c.to_json())?;
            Ok(Output::ok(format!("chain extended to {} links\n", c.links.len())))
        }
        ChainCommand::Verify { chain } => {
            let c = load_chain(&chain)?;
            Ok(match c.verify(&KeyedHash) {
                Ok(()) => Output::ok(format!("ok: {} links\n", c.links.len())),
                Err(k) => Output::findings(format!("link {k} fails verification\n")),
            })
        }
        ChainCommand::Compose { chain, output, name } => {
            let c = load_chain(&chain)?;
            if let Err(k) = c.verify(&KeyedHash) {
                return Ok(Output::findings(format!("link {k} fails verification\n")));
            }
            let composed = c.compose(&KeyedHash)?;
            let mut doc = c.document.clone();
            if let CompositionOp::Named(t) = &c.op {
                doc.definitions.retain(|d| &d.name != t);
            }
            if doc.get(&name).is_some() {
                return Err(Failure(format!("`{name}` is already defined in the chain; pick another --name")));
            }
            let text = parser::pretty_print(&doc.with(&name, composed));
            match output {
                Some(path) => {
                    write(&path, &text)?;
                    Ok(Output::ok(format!("composed `{name}` -> {}\n", path.display())))
                }
                None => Ok(Output::ok(text)),
            }
        }
    }
}

fn admin(cmd: AdminCommand) -> CmdResult {
    match cmd {
        AdminCommand::Log {
            tree,
            policy_id,
            payload,
            timestamp,
        } => {
            let mut t = if tree.exists() {
                Blocktree::from_text(&read(&tree)?)?
            } else {
                Blocktree::new()
            };
            let bytes = std::fs::read(&payload).map_err(|e| Failure(format!("{}: {e}", payload.display())))?;
            let node = t.append_version(&policy_id, payload_digest(&bytes), timestamp)?;
            write(&tree, &t.to_text())?;
            Ok(Output::ok(format!("{} {} v{}\n", hex::encode(node.id), node.policy_id, node.version)))
        }
        AdminCommand::Verify { tree } => {
            let t = Blocktree::from_text(&read(&tree)?)?;
            let bad = t.verify();
            if bad.is_empty() {
                return Ok(Output::ok(format!("ok: {} nodes\n", t.len())));
            }
            Ok(Output::findings(
                bad.iter().map(|d| format!("corrupt {}\n", hex::encode(d))).collect::<String>(),
            ))
        }
        AdminCommand::Step { state, action } => {
            let state: LifecycleState = state.parse()?;
            let action: AdminAction = action.parse()?;
            match transition(state, action) {
                Ok(next) => Ok(Output::ok(format!("{next}\n"))),
                Err(e) => Ok(Output {
                    code: 2,
                    out: "rejected\n".into(),
                    err: format!("{e}\n"),
                }),
            }
        }
    }
}
