//! The certificate dependency graph.
//!
//! A node runs only when every dependency passed. Nodes in one topological level run concurrently.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use indexmap::IndexMap;
use rug::Rational;
use serde::Serialize;

use crate::approximant::{
    boundary_mismatch, calr_fn, certify_d2_positivity, certify_mismatch, residual, DomainId, Junction,
};
use crate::certificate::{first_failure, BallJson, Check, CheckJson, ContractionCertificate, Status};
use crate::config::Config;
use crate::contraction::{
    d3_endpoint_pointwise, e01_d3, e01_weighted_at_r, e02_checks, e0_d2, e0_d3, e0_d4, fixed_point_d2, fixed_point_d3,
    fixed_point_d4, handoff, paper_delta, pc,
};
use crate::d1_certificates::{certify_d1_contraction, certify_w0_norms, w0_laplace};
use crate::error::{Error, Result};
use crate::exact_scalars::{decimal, q, rational_string, Ball};
use crate::greens::{
    certify_pu_positive, d2_energy_bounds, d3_e02_bounds, d3_qt_bounds, d4_series_bounds, d4_values_at_r,
    wronskian_certify, GreensBoundSet,
};
use crate::grid_bounds::sup_bound;
use crate::par;
use crate::pieces::{big_l, gamma, l0, r};
use crate::pole_certificate::{enclose_pole, PoleEnclosure};

#[derive(Clone, Debug, Default)]
pub struct NodeOutput {
    pub checks: Vec<Check>,
    /// Named enclosures read by dependants and the report.
    pub values: BTreeMap<String, Ball>,
    pub contraction: Option<ContractionCertificate>,
    pub pole: Option<PoleEnclosure>,
    pub notes: Vec<String>,
}

impl NodeOutput {
    fn checks(checks: Vec<Check>) -> NodeOutput {
        NodeOutput { checks, ..Default::default() }
    }

    fn value(mut self, k: &str, v: Ball) -> NodeOutput {
        self.values.insert(k.to_string(), v);
        self
    }

    fn note(mut self, n: impl Into<String>) -> NodeOutput {
        self.notes.push(n.into());
        self
    }

    pub fn get(&self, k: &str) -> Result<&Ball> {
        self.values.get(k).ok_or_else(|| Error::Domain(format!("missing value {k}")))
    }
}

pub type NodeFn = fn(&Config, &Inputs) -> Result<NodeOutput>;

#[derive(Clone)]
pub struct Node {
    pub id: &'static str,
    pub deps: Vec<&'static str>,
    pub run: NodeFn,
}

/// Outputs of a node's dependencies.
pub struct Inputs<'a> {
    map: BTreeMap<&'a str, &'a NodeOutput>,
}

impl<'a> Inputs<'a> {
    pub fn get(&self, id: &str) -> Result<&'a NodeOutput> {
        self.map.get(id).copied().ok_or_else(|| Error::Domain(format!("{id} is not a dependency")))
    }
}

#[derive(Clone, Debug)]
pub struct NodeResult {
    pub id: String,
    pub status: Status,
    /// Outcome of the node's own computation, independent of its ancestors.
    pub own: Option<Status>,
    pub output: Option<NodeOutput>,
    pub error: Option<String>,
    pub precision_exhausted: bool,
    /// Earliest failing or disabled ancestor when `status` is an unverified dependency.
    pub blocked_by: Option<String>,
    pub seconds: f64,
    /// Working precision of the final attempt.
    pub bits: u32,
}

pub struct Dag {
    nodes: Vec<Node>,
    index: BTreeMap<&'static str, usize>,
    levels: Vec<Vec<usize>>,
}

impl Dag {
    pub fn new(nodes: Vec<Node>) -> Result<Dag> {
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(Error::Domain(format!("duplicate node {}", n.id)));
            }
        }
        let mut level = vec![usize::MAX; nodes.len()];
        let mut remaining: BTreeSet<usize> = (0..nodes.len()).collect();
        let mut levels = Vec::new();
        while !remaining.is_empty() {
            let mut this = Vec::new();
            for &i in &remaining {
                let mut ready = true;
                for d in &nodes[i].deps {
                    let j = *index.get(d).ok_or_else(|| Error::Domain(format!("{} depends on unknown {d}", nodes[i].id)))?;
                    if level[j] >= levels.len() {
                        ready = false;
                    }
                }
                if ready {
                    this.push(i);
                }
            }
            if this.is_empty() {
                return Err(Error::Domain("dependency cycle".into()));
            }
            for &i in &this {
                level[i] = levels.len();
                remaining.remove(&i);
            }
            levels.push(this);
        }
        Ok(Dag { nodes, index, levels })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn levels(&self) -> Vec<Vec<&'static str>> {
        self.levels.iter().map(|l| l.iter().map(|&i| self.nodes[i].id).collect()).collect()
    }

    /// All transitive dependants of `id`.
    pub fn descendants(&self, id: &str) -> BTreeSet<&'static str> {
        let mut out = BTreeSet::new();
        let mut frontier = vec![id.to_string()];
        while let Some(cur) = frontier.pop() {
            for n in &self.nodes {
                if n.deps.iter().any(|d| *d == cur) && out.insert(n.id) {
                    frontier.push(n.id.to_string());
                }
            }
        }
        out
    }

    /// All transitive dependencies of the given nodes, plus the nodes themselves.
    pub fn ancestors_of(&self, targets: &[&str]) -> BTreeSet<&'static str> {
        let mut out = BTreeSet::new();
        let mut frontier: Vec<&str> = targets.to_vec();
        while let Some(cur) = frontier.pop() {
            if let Some(&i) = self.index.get(cur) {
                if out.insert(self.nodes[i].id) {
                    frontier.extend(self.nodes[i].deps.iter().copied());
                }
            }
        }
        out
    }

    pub fn evaluate(&self, cfg: &Config) -> Evaluation {
        self.evaluate_subset(cfg, None)
    }

    /// Evaluates only `targets` and their ancestors when given.
    pub fn evaluate_subset(&self, cfg: &Config, targets: Option<&[&str]>) -> Evaluation {
        let wanted = targets.map(|t| self.ancestors_of(t));
        let mut results: Vec<Option<NodeResult>> = vec![None; self.nodes.len()];
        for level in &self.levels {
            let todo: Vec<usize> =
                level.iter().copied().filter(|&i| wanted.as_ref().is_none_or(|w| w.contains(self.nodes[i].id))).collect();
            let done = par::map(&todo, |&i| self.run_node(i, cfg, &results));
            for (i, r) in todo.into_iter().zip(done) {
                results[i] = Some(r);
            }
        }
        let mut ev = Evaluation { results: IndexMap::new(), deps: BTreeMap::new() };
        for (i, r) in results.into_iter().enumerate() {
            if let Some(r) = r {
                ev.deps.insert(self.nodes[i].id.to_string(), self.nodes[i].deps.iter().map(|d| d.to_string()).collect());
                ev.results.insert(r.id.clone(), r);
            }
        }
        ev
    }

    fn run_node(&self, i: usize, cfg: &Config, done: &[Option<NodeResult>]) -> NodeResult {
        let node = &self.nodes[i];
        let mut res = NodeResult {
            id: node.id.to_string(),
            status: Status::Pass,
            own: None,
            output: None,
            error: None,
            precision_exhausted: false,
            blocked_by: None,
            seconds: 0.0,
            bits: cfg.prec,
        };
        if cfg.disabled.contains(node.id) {
            res.status = Status::Disabled;
            return res;
        }
        let mut map = BTreeMap::new();
        for d in &node.deps {
            let dr = done[self.index[d]].as_ref().expect("dependency evaluated in an earlier level");
            if dr.status != Status::Pass {
                res.status = Status::UnverifiedDependency;
                res.blocked_by = Some(dr.blocked_by.clone().unwrap_or_else(|| dr.id.clone()));
                return res;
            }
            map.insert(*d, dr.output.as_ref().expect("passing node has output"));
        }
        let t = Instant::now();
        let inputs = Inputs { map };
        let mut c = cfg.clone();
        let mut prev: Option<Attempt> = None;
        loop {
            let a = Attempt::from((node.run)(&c, &inputs));
            res.bits = c.prec;
            let settled = match (&a, &prev) {
                (Attempt::Passed(_) | Attempt::Fatal(_), _) => true,
                (_, Some(p)) => a.same_failure(p),
                (_, None) => false,
            };
            if settled || c.prec * 2 > cfg.max_prec {
                res.precision_exhausted = !settled || matches!(&a, Attempt::Fatal(Error::PrecisionExhausted { .. }));
                a.record(&mut res);
                if res.precision_exhausted && !settled {
                    let why = res.error.take().unwrap_or_default();
                    res.error = Some(format!("precision exhausted at {} bits: {why}", c.prec));
                }
                break;
            }
            log::debug!("{} failed at {} bits, retrying", node.id, c.prec);
            prev = Some(a);
            c.prec *= 2;
        }
        if res.bits != cfg.prec {
            if let Some(o) = res.output.as_mut() {
                o.notes.push(format!("escalated to {} bits", res.bits));
            }
        }
        res.seconds = t.elapsed().as_secs_f64();
        res.own = Some(res.status.clone());
        log::info!("{} {:?} in {:.2}s", node.id, res.status, res.seconds);
        res
    }
}

/// One run of a node at a fixed precision.
enum Attempt {
    Passed(NodeOutput),
    /// Some check failed; may be a precision artefact.
    Failed(NodeOutput),
    /// Error that more bits could plausibly cure.
    Retryable(Error),
    Fatal(Error),
}

impl From<Result<NodeOutput>> for Attempt {
    fn from(r: Result<NodeOutput>) -> Attempt {
        match r {
            Ok(o) if o.checks.iter().all(|c| c.pass) => Attempt::Passed(o),
            Ok(o) => Attempt::Failed(o),
            Err(e @ (Error::Domain(_) | Error::PrecisionOverflow(_) | Error::SingularSystem(_) | Error::CertificateFailed(_))) => {
                Attempt::Retryable(e)
            }
            Err(e) => Attempt::Fatal(e),
        }
    }
}

/// Failing checks whose computed upper ends agree to 1e-6 relative are taken as converged.
fn converged(a: &Ball, b: &Ball) -> bool {
    let (x, y) = (a.upper().to_f64(), b.upper().to_f64());
    x.is_finite() && y.is_finite() && (x - y).abs() <= 1e-6 * x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
}

impl Attempt {
    /// Whether doubling the precision left the failure unchanged.
    fn same_failure(&self, prev: &Attempt) -> bool {
        match (self, prev) {
            (Attempt::Failed(a), Attempt::Failed(b)) => {
                a.checks.len() == b.checks.len()
                    && a.checks.iter().zip(&b.checks).all(|(x, y)| x.pass == y.pass && (x.pass || converged(&x.computed, &y.computed)))
            }
            (Attempt::Retryable(a), Attempt::Retryable(b)) => a.to_string() == b.to_string(),
            _ => false,
        }
    }

    fn record(self, res: &mut NodeResult) {
        match self {
            Attempt::Passed(o) => {
                res.status = Status::Pass;
                res.output = Some(o);
            }
            Attempt::Failed(o) => {
                res.status = Status::Fail;
                res.error = first_failure(&o.checks);
                res.output = Some(o);
            }
            Attempt::Retryable(e) | Attempt::Fatal(e) => {
                res.status = Status::Fail;
                res.error = Some(e.to_string());
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub results: IndexMap<String, NodeResult>,
    deps: BTreeMap<String, Vec<String>>,
}

impl Evaluation {
    pub fn status(&self, id: &str) -> Option<Status> {
        self.results.get(id).map(|r| r.status.clone())
    }

    pub fn output(&self, id: &str) -> Option<&NodeOutput> {
        self.results.get(id).and_then(|r| r.output.as_ref())
    }

    pub fn passed(&self) -> bool {
        self.results.values().all(|r| r.status == Status::Pass)
    }

    pub fn precision_exhausted(&self) -> bool {
        self.results.values().any(|r| r.precision_exhausted)
    }

    /// Statuses after disabling `disabled`, reusing the stored node outcomes.
    pub fn restatus(&self, disabled: &BTreeSet<String>) -> BTreeMap<String, (Status, Option<String>)> {
        let mut out: BTreeMap<String, (Status, Option<String>)> = BTreeMap::new();
        for (id, r) in &self.results {
            let st = if disabled.contains(id) {
                (Status::Disabled, None)
            } else if let Some((bad, (_, by))) = self.deps[id]
                .iter()
                .filter_map(|d| out.get(d).map(|s| (d, s)))
                .find(|(_, (s, _))| *s != Status::Pass)
            {
                (Status::UnverifiedDependency, Some(by.clone().unwrap_or_else(|| bad.clone())))
            } else {
                match &r.own {
                    Some(s) => (s.clone(), None),
                    None => (r.status.clone(), r.blocked_by.clone()),
                }
            };
            out.insert(id.clone(), st);
        }
        out
    }

    pub fn ledger(&self) -> BoundLedger {
        let mut entries = IndexMap::new();
        for (id, r) in &self.results {
            if let Some(o) = &r.output {
                for c in &o.checks {
                    entries.insert(
                        format!("{id}: {}", c.name),
                        LedgerEntry { node: id.clone(), check: c.clone(), status: c.status() },
                    );
                }
            }
        }
        BoundLedger { entries }
    }
}

#[derive(Clone, Debug)]
pub struct LedgerEntry {
    /// Node that produced the check.
    pub node: String,
    pub check: Check,
    pub status: Status,
}

#[derive(Clone, Debug, Default)]
pub struct BoundLedger {
    pub entries: IndexMap<String, LedgerEntry>,
}

#[derive(Serialize)]
pub struct LedgerEntryJson {
    pub node: String,
    #[serde(flatten)]
    pub check: CheckJson,
}

impl BoundLedger {
    pub fn failed(&self) -> Vec<&str> {
        self.entries.iter().filter(|(_, e)| e.status != Status::Pass).map(|(k, _)| k.as_str()).collect()
    }

    pub fn to_json(&self) -> Vec<LedgerEntryJson> {
        self.entries
            .values()
            .map(|e| LedgerEntryJson { node: e.node.clone(), check: e.check.to_json() })
            .collect()
    }
}

pub fn contraction_json(c: &ContractionCertificate) -> serde_json::Value {
    serde_json::json!({
        "domain": c.domain,
        "norm": c.norm,
        "delta": rational_string(&c.delta),
        "ball_map": BallJson::from(&c.ball_map),
        "contraction_factor": BallJson::from(&c.contraction_factor),
        "E_bound": BallJson::from(&c.e_bound),
        "E_prime_bound": BallJson::from(&c.e_prime_bound),
    })
}

fn published_greens(domain: DomainId, vals: [&str; 4], prec: u32) -> GreensBoundSet {
    GreensBoundSet {
        domain,
        g1: pc(vals[0], prec),
        g2: pc(vals[1], prec),
        g1p: pc(vals[2], prec),
        g2p: pc(vals[3], prec),
        extras: BTreeMap::new(),
        checks: Vec::new(),
    }
}

pub fn d2_published(prec: u32) -> GreensBoundSet {
    published_greens(DomainId::D2, ["3.775", "1.114", "3.391", "1"], prec)
}

pub fn d4_published(prec: u32) -> GreensBoundSet {
    published_greens(DomainId::D4, ["0.249", "3.32", "1.48", "13.7"], prec)
}

fn with_contraction(c: ContractionCertificate) -> NodeOutput {
    NodeOutput {
        checks: c.checks.clone(),
        values: [("E".to_string(), c.e_bound.clone()), ("E'".to_string(), c.e_prime_bound.clone())].into(),
        contraction: Some(c),
        ..Default::default()
    }
}

fn n_w0(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let p = cfg.prec;
    let v = w0_laplace(&Ball::from_rational(&big_l(), p), &cfg.tail_s)?;
    let tol = decimal("1e-11");
    let mut checks = vec![
        Check::near("w0(L) = -1.17414e-7", v.w0.clone(), decimal("-1.17414e-7"), tol.clone()),
        Check::near("w0'(L) = 2.03367e-7", v.w0_prime.clone(), decimal("2.03367e-7"), tol.clone()),
        Check::le("radius of w0(L) <= 1e-11", Ball::from_endpoints(v.w0.rad(), v.w0.rad(), p), tol.clone()),
        Check::le("radius of w0'(L) <= 1e-11", Ball::from_endpoints(v.w0_prime.rad(), v.w0_prime.rad(), p), tol),
    ];
    checks.extend(certify_w0_norms(p)?.checks);
    Ok(NodeOutput::checks(checks)
        .value("w0(L)", v.w0)
        .value("w0'(L)", v.w0_prime)
        .note(format!("Laplace cutoff {} with {} panels", rational_string(&v.cutoff), v.panels)))
}

fn n_d1(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    Ok(with_contraction(certify_d1_contraction(cfg.prec)?))
}

fn n_jumps(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let c = certify_mismatch(cfg.prec)?;
    let (a, b) = boundary_mismatch(Junction::L, cfg.prec)?;
    let (c2, d2) = boundary_mismatch(Junction::X0PlusR, cfg.prec)?;
    Ok(NodeOutput::checks(c.checks).value("dy(L)", a).value("dy'(L)", b).value("dy(x0+r)", c2).value("dy'(x0+r)", d2))
}

fn n_d2_pos(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let (a, b) = certify_d2_positivity(cfg.grid_n_d2, cfg.prec)?;
    Ok(NodeOutput::checks(vec![
        Check::gt("y0 > 0 on D2", a.min_lower.clone(), q(0, 1)).with_note(format!("grid n = {}", a.n)),
        Check::gt("y0' > 0 on D2", b.min_lower.clone(), q(0, 1)).with_note(format!("grid n = {}", b.n)),
    ]))
}

fn n_d2_res(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let f = calr_fn()?;
    let n = cfg.grid_n_d2;
    let fine = sup_bound(&f, &l0(), &big_l(), n, cfg.prec)?;
    let coarse = sup_bound(&f, &l0(), &big_l(), (n / 2).max(1), cfg.prec)?;
    let ratio = coarse.bound.div_ball(&fine.bound)?;
    Ok(NodeOutput::checks(vec![
        Check::le("D2 ||calR|| <= 3.75e-9", fine.bound.clone(), decimal("3.75e-9")).with_note(format!("grid n = {n}")),
        Check::le("D2 ||calR|| at n/2 within 15% of n", ratio, decimal("1.15")),
    ])
    .value("calR", fine.bound)
    .value("calR_coarse", coarse.bound))
}

fn n_d2_greens(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let g = d2_energy_bounds(&cfg.gamma0, cfg.prec)?;
    let alt = d2_energy_bounds(&q(-3, 10), cfg.prec)?;
    Ok(NodeOutput::checks(g.checks.clone())
        .value("G1", g.g1)
        .value("G2", g.g2)
        .value("G1'", g.g1p)
        .value("G2'", g.g2p)
        .note(format!(
            "gamma0 = -3/10 gives ||G1|| <= {}, ||G2|| <= {}",
            alt.g1.upper_decimal(6),
            alt.g2.upper_decimal(6)
        )))
}

fn n_d2_handoff(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let p = cfg.prec;
    let (a, b) = handoff(
        &pc("5.625e-10", p),
        &pc("2.12e-9", p),
        (&pc("5e-14", p), &pc("7.5e-14", p)),
        Junction::L,
        None,
        p,
    )?;
    Ok(NodeOutput::checks(vec![
        Check::le("alpha1 <= 5.63e-10", a.clone(), decimal("5.63e-10")),
        Check::le("beta1 <= 2.13e-9", b.clone(), decimal("2.13e-9")),
    ])
    .value("alpha", a)
    .value("beta", b))
}

fn n_d2_e0(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let p = cfg.prec;
    let e = e0_d2(&d2_published(p), &pc("3.75e-9", p), &pc("5.63e-10", p), &pc("2.13e-9", p), p);
    Ok(NodeOutput::checks(e.checks).value("E0", e.e0).value("E0'", e.e0p))
}

fn n_d2_fp(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let p = cfg.prec;
    let delta = paper_delta("D2").unwrap();
    Ok(with_contraction(fixed_point_d2(&d2_published(p), &pc("1.745e-7", p), &pc("1.605e-7", p), &delta, p)))
}

fn n_pu(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    Ok(NodeOutput::checks(certify_pu_positive(cfg.prec).checks))
}

fn n_d3_qt(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let b = d3_qt_bounds(cfg.grid_n_d3, cfg.prec)?;
    Ok(NodeOutput::checks(b.checks)
        .value("Q", b.q_bound)
        .value("T", b.t_bound)
        .value("K1", b.k1)
        .value("K2", b.k2)
        .value("Q(r)", b.q_at_r)
        .value("T(r)", b.t_at_r))
}

fn n_d3_e02(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let b = d3_e02_bounds(cfg.grid_n_d3, cfg.prec)?;
    Ok(NodeOutput::checks(e02_checks(&b.weighted, &b.deriv))
        .value("E02", b.weighted)
        .value("E02'", b.deriv)
        .value("E02(r)", b.weighted_at_r))
}

fn n_d3_handoff(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let p = cfg.prec;
    let z = Ball::zero(p);
    let (a, b) = handoff(&pc("1.75e-7", p), &pc("1.61e-7", p), (&z, &z), Junction::L0, None, p)?;
    Ok(NodeOutput::checks(vec![
        Check::le("alpha2 <= 9.22e-9", a.clone(), decimal("9.22e-9")),
        Check::le("beta2 <= 9.76e-7", b.clone(), decimal("9.76e-7")),
    ])
    .value("alpha", a)
    .value("beta", b))
}

fn n_d3_e0(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let p = cfg.prec;
    let (w, wp, mut checks) = e01_d3(&pc("9.22e-9", p), &pc("9.76e-7", p), p)?;
    let e = e0_d3(&pc("2.03e-6", p), &pc("1.2245e-5", p), &pc("2.3e-9", p), &pc("3.8e-8", p));
    checks.extend(e.checks);
    Ok(NodeOutput::checks(checks).value("E01", w).value("E01'", wp).value("E0", e.e0).value("E0'", e.e0p))
}

fn n_d3_fp(cfg: &Config, inp: &Inputs) -> Result<NodeOutput> {
    let p = cfg.prec;
    let qt = inp.get("D3.QT")?;
    let delta = paper_delta("D3").unwrap();
    let c = fixed_point_d3(
        &pc("0.49", p),
        qt.get("T")?,
        &pc("6.3", p),
        &pc("12.3", p),
        &pc("2.04e-6", p),
        &pc("1.23e-5", p),
        &delta,
        p,
    );
    Ok(with_contraction(c))
}

fn n_d4_res(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let res = residual(DomainId::D4)?;
    let s = res.poly.abs_sum_on_circle(&r());
    let lo = res.poly.min_exp().unwrap_or(18);
    let hi = res.poly.max_exp().unwrap_or(38);
    let b = Ball::from_rational(&s, cfg.prec);
    Ok(NodeOutput::checks(vec![
        Check::exact("D4 residual powers within 18..38", lo >= 18 && hi <= 38, Rational::from(lo)),
        Check::le("D4 sum |R_j| r^j <= 1.311e-6", b.clone(), decimal("1.311e-6")),
    ])
    .value("R", b))
}

fn n_d4_greens(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let p = cfg.prec;
    let g = d4_series_bounds(p)?;
    let w = wronskian_certify(60, p)?;
    let v = d4_values_at_r(60, p)?;
    let mut checks = g.checks.clone();
    checks.extend(w.checks);
    let [a, b, c, d] = v;
    Ok(NodeOutput::checks(checks)
        .value("G1(r)", a)
        .value("G1'(r)", b)
        .value("G2(r)", c)
        .value("G2'(r)", d)
        .value("Wronskian tail", Ball::from_rational(&w.tail, p)))
}

fn n_d4_handoff(cfg: &Config, inp: &Inputs) -> Result<NodeOutput> {
    let p = cfg.prec;
    let qt = inp.get("D3.QT")?;
    let e02 = inp.get("D3.E02")?;
    let gr = inp.get("D4.greens")?;
    let g = [gr.get("G1(r)")?.clone(), gr.get("G1'(r)")?.clone(), gr.get("G2(r)")?.clone(), gr.get("G2'(r)")?.clone()];
    let jumps = (pc("4e-10", p), pc("7e-8", p));
    let e01r = e01_weighted_at_r(&pc("9.22e-9", p), &pc("9.76e-7", p), p)?;
    let e_r = d3_endpoint_pointwise(&e01r, e02.get("E02(r)")?, qt.get("Q(r)")?, qt.get("T(r)")?, &pc("4.01e-6", p), p)?;
    let (a, b) = handoff(&e_r, &pc("3.76e-5", p), (&jumps.0, &jumps.1), Junction::X0PlusR, Some(&g), p)?;
    let (a_sup, b_sup) = handoff(&pc("1.26e-5", p), &pc("3.76e-5", p), (&jumps.0, &jumps.1), Junction::X0PlusR, Some(&g), p)?;
    Ok(NodeOutput::checks(vec![
        Check::le("alpha3 <= 3.82e-5", a.clone(), decimal("3.82e-5")).with_note(format!(
            "|E(x0+r)| taken pointwise ({}); with the sup-norm value 1.26e-5 alpha3 is {}",
            e_r.upper_decimal(6),
            a_sup.upper_decimal(6)
        )),
        Check::le("beta3 <= 3.76e-6", b.clone(), decimal("3.76e-6")),
    ])
    .value("|E(x0+r)|", e_r)
    .value("alpha", a)
    .value("beta", b)
    .value("alpha (sup route)", a_sup)
    .value("beta (sup route)", b_sup))
}

fn n_d4_e0(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let p = cfg.prec;
    let e = e0_d4(&d4_published(p), &pc("1.311e-6", p), &pc("3.82e-5", p), &pc("3.76e-6", p), p);
    Ok(NodeOutput::checks(e.checks).value("E0", e.e0).value("E0'", e.e0p))
}

fn n_d4_fp(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let p = cfg.prec;
    let delta = paper_delta("D4").unwrap();
    Ok(with_contraction(fixed_point_d4(&d4_published(p), &pc("2.34e-5", p), &pc("1.15e-4", p), &delta, p)))
}

fn n_theorem(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let p = cfg.prec;
    let rg = Ball::from_rational(&r(), p).pow_rational(&Rational::from(-gamma()))?;
    let d3_sup = &pc("4.01e-6", p) * &rg;
    // the per-domain sup bounds are exact published rationals, so their maxima are decided exactly
    let e = ["5.625e-10", "1.75e-7", "1.26e-5", "2.35e-5"].iter().map(|s| decimal(s)).max().unwrap();
    let ep = ["2.12e-9", "1.61e-7", "3.76e-5", "1.16e-4"].iter().map(|s| decimal(s)).max().unwrap();
    Ok(NodeOutput::checks(vec![
        Check::le("D3 endpoint 4.01e-6 r^{-16/5} <= 1.26e-5", d3_sup.clone(), decimal("1.26e-5")),
        Check::exact("global ||E|| = max over domains <= 2.35e-5", e <= decimal("2.35e-5"), e.clone()),
        Check::exact("global ||E'|| = max over domains <= 1.16e-4", ep <= decimal("1.16e-4"), ep.clone()),
    ])
    .value("D3 sup |E|", d3_sup)
    .value("E", Ball::from_rational(&e, p))
    .value("E'", Ball::from_rational(&ep, p)))
}

fn n_pole(cfg: &Config, _: &Inputs) -> Result<NodeOutput> {
    let enc = enclose_pole(&pc("2.35e-5", cfg.prec))?;
    Ok(NodeOutput { checks: enc.checks.clone(), pole: Some(enc), ..Default::default() })
}

fn node(id: &'static str, deps: &[&'static str], run: NodeFn) -> Node {
    Node { id, deps: deps.to_vec(), run }
}

/// The full chain from `w0` to the pole enclosure.
pub fn certificate_dag() -> Dag {
    Dag::new(vec![
        node("D1.w0", &[], n_w0),
        node("D1.contraction", &["D1.w0"], n_d1),
        node("jumps", &[], n_jumps),
        node("D2.positivity", &[], n_d2_pos),
        node("D2.residual", &[], n_d2_res),
        node("D2.greens", &["D2.positivity"], n_d2_greens),
        node("D2.handoff", &["D1.contraction", "jumps"], n_d2_handoff),
        node("D2.E0", &["D2.greens", "D2.residual", "D2.handoff"], n_d2_e0),
        node("D2.fixed_point", &["D2.E0"], n_d2_fp),
        node("D3.pu_positive", &[], n_pu),
        node("D3.QT", &["D3.pu_positive"], n_d3_qt),
        node("D3.E02", &[], n_d3_e02),
        node("D3.handoff", &["D2.fixed_point"], n_d3_handoff),
        node("D3.E0", &["D3.handoff", "D3.E02"], n_d3_e0),
        node("D3.fixed_point", &["D3.E0", "D3.QT"], n_d3_fp),
        node("D4.residual", &[], n_d4_res),
        node("D4.greens", &[], n_d4_greens),
        node("D4.handoff", &["D3.fixed_point", "D3.QT", "D3.E02", "jumps", "D4.greens"], n_d4_handoff),
        node("D4.E0", &["D4.handoff", "D4.greens", "D4.residual"], n_d4_e0),
        node("D4.fixed_point", &["D4.E0"], n_d4_fp),
        node("theorem", &["D1.contraction", "D2.fixed_point", "D3.fixed_point", "D4.fixed_point"], n_theorem),
        node("pole", &["D4.fixed_point"], n_pole),
    ])
    .expect("static graph is acyclic")
}

/// Runs the whole graph and returns the ledger of every certified inequality.
pub fn assemble_theorem(cfg: &Config) -> (Evaluation, BoundLedger) {
    let ev = certificate_dag().evaluate(cfg);
    let l = ev.ledger();
    (ev, l)
}
