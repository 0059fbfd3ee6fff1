//! One function per subcommand, each producing a [`Report`].

use zeroclass::classify::{
    certify_ideal, classify, default_pool, endorelation_search, CertificateOrigin, ClassifyOptions, IdealCertificate,
    IdealVerdict, Verdict,
};
use zeroclass::closure::{DEFAULT_CONGRUENCE_GUARD, DEFAULT_SUBSET_GUARD};
use zeroclass::commute::{
    abelian_from_connector, diagram_variety, huq_commute, leftsplit_commute, pt_kernel_reflection_instance,
    smith_commute, AbelianOutcome, ConnectorResult, ConnectorStatus, LeftSplitSpanPair, Obstruction,
};
use zeroclass::free::{maltsev_term, FreeBounds, MaltsevOutcome};
use zeroclass::ideal_terms::TermBounds;
use zeroclass::span::{
    construct_leftsplit_from_ideal, construct_t, normalisation, zero_class, zero_class_via_pullback, Relation,
};
use zeroclass::workspace::{parse_pairs, Workspace};
use zeroclass::{
    generate_congruence, list_congruences, list_subuniverses, quotient, AlgebraRef, Congruence, Elem, ElemSet, Error,
    FiniteAlgebra, Homomorphism, Result, Subuniverse, Variety,
};

use crate::artifact::{seed_vars, AlgebraSpec, Artifact, InstanceSpec, VarietySpec};
use crate::report::Report;

#[derive(Clone, Debug)]
pub struct Settings {
    pub bounds: TermBounds,
    /// `default`, a comma-separated list of algebra names, or both
    /// (`default,B`).
    pub pool: Option<String>,
    pub budget: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            bounds: TermBounds::default(),
            pool: None,
            budget: zeroclass::commute::DEFAULT_EXTENSION_BUDGET,
        }
    }
}

pub struct Ctx<'a> {
    pub ws: &'a Workspace,
    pub settings: Settings,
}

pub fn fmt_set(a: &FiniteAlgebra, s: &ElemSet) -> String {
    a.display_set(s)
}

pub fn fmt_pairs(x: &FiniteAlgebra, y: &FiniteAlgebra, pairs: &[(Elem, Elem)]) -> String {
    let parts: Vec<String> = pairs
        .iter()
        .map(|&(a, b)| format!("({},{})", x.element_name(a), y.element_name(b)))
        .collect();
    format!("{{{}}}", parts.join(","))
}

pub fn fmt_blocks(theta: &Congruence) -> String {
    let a = theta.parent();
    theta
        .blocks()
        .iter()
        .map(|b| a.display_set(b))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn fmt_tables(a: &FiniteAlgebra) -> String {
    a.signature()
        .ops()
        .iter()
        .enumerate()
        .map(|(i, op)| {
            let cells: Vec<String> = a.table(i).iter().map(|&v| a.element_name(v)).collect();
            format!("{}: {}", op.name, cells.join(" "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn fmt_map(h: &Homomorphism) -> String {
    let cells: Vec<String> = h.map().iter().map(|&v| h.cod().element_name(v)).collect();
    format!("[{}]", cells.join(" "))
}

fn describe_variety(ws: &Workspace, expr: &str, v: &Variety) -> String {
    match v {
        Variety::GeneratedBy(algs) => {
            let names: Vec<&str> = algs.iter().map(|a| ws.algebra_name(a).unwrap_or("?")).collect();
            let full = format!("V({})", names.join(","));
            if full == expr {
                full
            } else {
                format!("{expr} = {full}")
            }
        }
        Variety::Presented(_) => format!("{expr} = {}", v.describe()),
    }
}

impl Ctx<'_> {
    fn variety_or_default(&self, alg: &str, expr: Option<&str>) -> Result<(String, Variety)> {
        let expr = expr.map(str::to_string).unwrap_or_else(|| format!("V({alg})"));
        let v = self.ws.variety(&expr)?;
        Ok((describe_variety(self.ws, &expr, &v), v))
    }

    fn pool(&self, a: &AlgebraRef, v: &Variety) -> Result<Option<Vec<AlgebraRef>>> {
        let Some(spec) = &self.settings.pool else {
            return Ok(None);
        };
        let mut pool = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "default" {
                pool.extend(default_pool(a, v)?);
            } else {
                pool.push(self.ws.algebra(part)?.clone());
            }
        }
        Ok(Some(pool))
    }

    fn options(&self, a: &AlgebraRef, v: &Variety) -> Result<ClassifyOptions> {
        Ok(ClassifyOptions {
            bounds: self.settings.bounds,
            pool: self.pool(a, v)?,
        })
    }
}

pub fn subalgebras(ctx: &Ctx, alg: &str) -> Result<Report> {
    let a = ctx.ws.algebra(alg)?;
    let subs = list_subuniverses(a, DEFAULT_SUBSET_GUARD)?;
    let mut r = Report::new(format!("subalgebras {alg}"));
    r.put("algebra", alg).put("count", subs.len());
    for (i, s) in subs.iter().enumerate() {
        r.put(format!("subuniverse.{}", i + 1), fmt_set(a, s.members()));
        r.artifact(Artifact::Subuniverse {
            algebra: AlgebraSpec::of(a),
            set: s.members().clone(),
        });
    }
    Ok(r)
}

pub fn congruences(ctx: &Ctx, alg: &str) -> Result<Report> {
    let a = ctx.ws.algebra(alg)?;
    let list = list_congruences(a, DEFAULT_CONGRUENCE_GUARD)?;
    let mut r = Report::new(format!("congruences {alg}"));
    r.put("algebra", alg).put("count", list.len());
    for (i, theta) in list.iter().enumerate() {
        r.put(format!("congruence.{}", i + 1), fmt_blocks(theta));
        r.put(
            format!("congruence.{}.zero_block", i + 1),
            fmt_set(a, &theta.zero_block()),
        );
    }
    Ok(r)
}

/// `zero-class` and `normalise`: both routes and the normalisation agree.
pub fn zero_class_report(ctx: &Ctx, alg: &str, rel: &str, normalise: bool) -> Result<Report> {
    ctx.ws.algebra(alg)?;
    let rel = ctx.ws.relation(rel, Some(alg))?;
    let span = rel.to_span()?;
    let direct = zero_class(&span)?;
    let via = zero_class_via_pullback(&span)?;
    let norm = normalisation(&span)?;
    let agree = direct.subset.members() == via.subset.members() && direct.subset.members() == norm.members();
    if !agree {
        return Err(Error::Invariant("zero-class and normalisation differ".into()));
    }
    let (x, y) = (rel.source(), rel.target());
    let title = if normalise { "normalise" } else { "zero-class" };
    let mut r = Report::new(format!("{title} {alg}"));
    r.put("relation", fmt_pairs(x, y, rel.pairs()));
    if normalise {
        r.put("normalisation", fmt_set(y, norm.members()));
        r.put("zero_class", fmt_set(y, direct.subset.members()));
    } else {
        r.put("zero_class", fmt_set(y, direct.subset.members()));
        r.put("via_pullback", fmt_set(y, via.subset.members()));
        r.put("normalisation", fmt_set(y, norm.members()));
    }
    r.flag("agree", agree);
    r.artifact(Artifact::ZeroClass {
        source: AlgebraSpec::of(x),
        target: AlgebraSpec::of(y),
        pairs: rel.pairs().to_vec(),
        zero_class: direct.subset.members().clone(),
    });
    Ok(r)
}

fn put_certificate(r: &mut Report, a: &AlgebraRef, set: &ElemSet, c: &IdealCertificate) {
    let origin = match &c.origin {
        CertificateOrigin::Clot => "clot".to_string(),
        CertificateOrigin::Pool(i) => format!("pool entry {i}"),
        CertificateOrigin::ClotImage { pool_index, .. } => format!("clot image from pool entry {pool_index}"),
    };
    r.put("ideal.certificate.origin", origin);
    r.put("ideal.certificate.b.size", c.b.size());
    r.put("ideal.certificate.b.tables", fmt_tables(&c.b));
    r.put("ideal.certificate.relation", fmt_pairs(&c.b, a, c.relation.pairs()));
    r.artifact(Artifact::IdealCertificate {
        algebra: AlgebraSpec::of(a),
        set: set.clone(),
        b: AlgebraSpec::of(&c.b),
        pairs: c.relation.pairs().to_vec(),
    });
}

pub fn verdict_report(r: &mut Report, v: &Verdict, variety: &Variety) {
    let a = &v.algebra;
    let spec = AlgebraSpec::of(a);
    r.put("subset", fmt_set(a, &v.subset));
    r.flag("subuniverse", v.is_subuniverse());
    if let Some(e) = &v.escape {
        r.put("subuniverse.escape", e.describe(a));
        r.artifact(Artifact::Escape {
            algebra: spec.clone(),
            set: v.subset.clone(),
            op: e.op,
            args: e.args.clone(),
            value: e.value,
        });
    } else {
        r.artifact(Artifact::Subuniverse {
            algebra: spec.clone(),
            set: v.subset.clone(),
        });
    }
    if let Some(n) = &v.normal {
        r.flag("normal", n.holds);
        r.put("normal.congruence", fmt_blocks(&n.congruence));
        r.artifact(Artifact::NormalClosure {
            algebra: spec.clone(),
            set: v.subset.clone(),
            blocks: n.congruence.blocks(),
        });
    }
    if let Some(k) = &v.kernel {
        r.flag("kernel", k.holds);
        r.put("kernel.quotient_size", k.quotient.algebra.size());
    }
    if let Some(c) = &v.clot {
        r.flag("clot", c.holds);
        r.put("clot.closure", fmt_set(a, &c.closure));
        match &c.witness {
            Some(w) => {
                r.put("clot.witness", w.describe(a));
                r.artifact(Artifact::ClotWitness {
                    algebra: spec.clone(),
                    set: v.subset.clone(),
                    instance: InstanceSpec::of(w, a),
                });
            }
            None => {
                r.artifact(Artifact::Clot {
                    algebra: spec.clone(),
                    set: v.subset.clone(),
                });
            }
        }
    }
    r.put("ideal", v.ideal.label());
    match &v.ideal {
        IdealVerdict::NotASubuniverse => {}
        IdealVerdict::Certified(c) => put_certificate(r, a, &v.subset, c),
        IdealVerdict::Refuted { witness, .. } => {
            let names = witness.variable_names();
            r.put("ideal.witness", witness.describe(a));
            r.put(
                "ideal.identity",
                format!("{} = 0", witness.vanishing_side().display(a.signature(), &names)),
            );
            r.artifact(Artifact::IdealWitness {
                algebra: spec.clone(),
                set: v.subset.clone(),
                variety: VarietySpec::of(variety),
                instance: InstanceSpec::of(witness, a),
            });
        }
        IdealVerdict::Unknown { pool_size } => {
            r.put("ideal.pool_size", pool_size);
            r.unknown = true;
        }
    }
    if let Some(s) = &v.refutation {
        r.put("ideal.search.configurations", s.configurations);
        r.put("ideal.search.terms", s.terms);
        r.put("ideal.search.ideal_terms", s.ideal_terms);
        r.put("ideal.search.depth", s.deepest_round);
        r.flag("ideal.search.exhaustive", s.exhaustive);
    }
}

pub fn classify_cmd(ctx: &Ctx, alg: &str, subset: &str, variety: Option<&str>) -> Result<Report> {
    let a = ctx.ws.algebra(alg)?;
    let set = ctx.ws.subset(alg, subset)?;
    let (vname, v) = ctx.variety_or_default(alg, variety)?;
    let v = v.adapt(a.signature())?;
    let verdict = classify(a, &set, &v, &ctx.options(a, &v)?)?;
    let mut r = Report::new(format!("classify {alg} {subset}"));
    r.put("algebra", alg).put("variety", vname);
    verdict_report(&mut r, &verdict, &v);
    Ok(r)
}

pub fn endorelation_cmd(ctx: &Ctx, alg: &str, subset: &str) -> Result<Report> {
    let a = ctx.ws.algebra(alg)?;
    let set = ctx.ws.subset(alg, subset)?;
    let rep = endorelation_search(a, &set)?;
    let mut r = Report::new(format!("endorelation-search {alg} {subset}"));
    r.put("algebra", alg).put("subset", fmt_set(a, &set));
    r.put("candidates", rep.candidates);
    r.put("closed", rep.closed);
    r.put("closed_surjective", rep.surjective);
    r.put("certificates", rep.matching.len());
    for (i, m) in rep.matching.iter().enumerate() {
        r.put(format!("certificate.{}", i + 1), fmt_pairs(a, a, m.pairs()));
    }
    r.artifact(Artifact::Endorelations {
        algebra: AlgebraSpec::of(a),
        set,
        candidates: rep.candidates,
        closed: rep.closed,
        matching: rep.matching.iter().map(|m| m.pairs().to_vec()).collect(),
    });
    Ok(r)
}

pub fn certify_cmd(ctx: &Ctx, alg: &str, subset: &str, variety: Option<&str>) -> Result<Report> {
    let a = ctx.ws.algebra(alg)?;
    let set = ctx.ws.subset(alg, subset)?;
    let (vname, v) = ctx.variety_or_default(alg, variety)?;
    let v = v.adapt(a.signature())?;
    let mut r = Report::new(format!("certify {alg} {subset}"));
    r.put("algebra", alg)
        .put("variety", vname)
        .put("subset", fmt_set(a, &set));
    if let Some(e) = zeroclass::algebra::closure_escape(a, &set) {
        r.put("ideal", "not-a-subuniverse")
            .put("subuniverse.escape", e.describe(a));
        return Ok(r);
    }
    let pool = match ctx.pool(a, &v)? {
        Some(p) => p,
        None => default_pool(a, &v)?,
    };
    let out = certify_ideal(a, &set, &v, &pool)?;
    r.put("pool_size", out.pool_size);
    r.put("pool_skipped", out.skipped.len());
    match &out.certificate {
        Some(c) => {
            r.put("ideal", "certified");
            put_certificate(&mut r, a, &set, c);
        }
        None => {
            r.put("ideal", "unknown");
            r.unknown = true;
        }
    }
    Ok(r)
}

pub fn construct_leftsplit_cmd(ctx: &Ctx, alg: &str, clot: &str, quotient_pairs: &str) -> Result<Report> {
    let a = ctx.ws.algebra(alg)?;
    let k = Subuniverse::new(a.clone(), ctx.ws.subset(alg, clot)?)?;
    let pairs = if quotient_pairs.trim_start().starts_with('{') {
        parse_pairs(a, a, quotient_pairs).map_err(Error::NotACongruence)?
    } else {
        ctx.ws.relation(quotient_pairs, Some(alg))?.pairs().to_vec()
    };
    let theta = generate_congruence(a, &pairs);
    let q = quotient(a, &theta)?;
    let split = construct_leftsplit_from_ideal(&k, &q.projection)?;
    let y = q.algebra.clone();
    let zc = split.relation.zero_class_set();
    let mut r = Report::new(format!("construct-leftsplit {alg} {clot}"));
    r.put("algebra", alg).put("clot", fmt_set(a, k.members()));
    r.put("quotient.congruence", fmt_blocks(&theta));
    r.put("quotient.size", y.size());
    r.put("relation", fmt_pairs(a, &y, split.relation.pairs()));
    r.put("section", format!("{:?}", split.section.map()));
    r.flag("surjective", split.relation.is_surjective());
    r.put("zero_class", fmt_set(&y, &zc));
    r.put("image_of_clot", fmt_set(&y, &q.projection.image_of(k.members())));
    r.artifact(Artifact::LeftSplit {
        source: AlgebraSpec::of(a),
        target: AlgebraSpec::of(&y),
        pairs: split.relation.pairs().to_vec(),
        section: split.section.map().to_vec(),
        zero_class: zc,
    });
    Ok(r)
}

pub fn construct_t_cmd(ctx: &Ctx, rel: &str) -> Result<Report> {
    let relation = ctx.ws.relation(rel, None)?;
    let t = construct_t(&relation)?;
    let (x, y) = (relation.source(), relation.target());
    let kernel: Vec<(Elem, Elem)> = t.kernel.members().iter().map(|i| relation.pairs()[i]).collect();
    let mut r = Report::new(format!("construct-T {rel}"));
    r.put("relation", fmt_pairs(x, y, relation.pairs()));
    r.put("apex.size", t.apex.size());
    r.put("t.size", t.t.len());
    r.flag("t.reflexive", t.t.is_reflexive());
    r.put("kernel", fmt_pairs(x, y, &kernel));
    let clot = zeroclass::span::clot_relation(&t.apex, t.kernel.members());
    r.flag("kernel.clot", &clot.zero_class_set() == t.kernel.members());
    r.put("image", fmt_set(y, &t.image));
    r.put("zero_class", fmt_set(y, &relation.zero_class_set()));
    r.artifact(Artifact::TConstruction {
        source: AlgebraSpec::of(x),
        target: AlgebraSpec::of(y),
        pairs: relation.pairs().to_vec(),
        kernel,
        image: t.image.clone(),
    });
    Ok(r)
}

/// Adds the connector verdict of `res` with keys under `prefix`.
pub fn connector_report(r: &mut Report, prefix: &str, res: &ConnectorResult, d: &AlgebraRef) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    r.put(key("status"), res.label());
    if let Some(beta) = &res.beta {
        r.put(key("beta"), fmt_map(beta));
    }
    let Some((domain, points)) = &res.domain else {
        if let ConnectorStatus::NoneExists(Obstruction::BetaMismatch { b, via_r, via_s }) = &res.status {
            r.put(
                key("obstruction"),
                format!(
                    "α r and γ s differ at element {b}: {} and {}",
                    d.element_name(*via_r),
                    d.element_name(*via_s)
                ),
            );
        }
        return;
    };
    match &res.status {
        ConnectorStatus::Found(c) => {
            let cells: Vec<String> = points
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| format!("({x},{y})->{}", d.element_name(c.map.apply(i))))
                .collect();
            r.put(key("connector"), cells.join(" "));
            r.flag(key("determined_by_generation"), c.determined_by_generation);
            r.put(key("solutions"), c.solutions);
            r.artifact(Artifact::Connector {
                domain: AlgebraSpec::of(domain),
                codomain: AlgebraSpec::of(d),
                map: c.map.map().to_vec(),
                constraints: res.seeds.clone(),
            });
        }
        ConnectorStatus::NoneExists(Obstruction::Conflict {
            point,
            first,
            second,
            derivations,
        }) => {
            r.put(
                key("obstruction"),
                format!(
                    "({},{}) is sent to both {} and {}",
                    point.0,
                    point.1,
                    d.element_name(*first),
                    d.element_name(*second)
                ),
            );
            let sig = domain.signature();
            r.put(key("derivation.1"), derivations.0.display(sig, &res.seed_names));
            r.put(key("derivation.2"), derivations.1.display(sig, &res.seed_names));
            let vars = seed_vars(res.seeds.len());
            r.artifact(Artifact::ConnectorConflict {
                domain: AlgebraSpec::of(domain),
                codomain: AlgebraSpec::of(d),
                seeds: res.seeds.clone(),
                derivations: (derivations.0.to_prefix(sig, &vars), derivations.1.to_prefix(sig, &vars)),
            });
        }
        ConnectorStatus::NoneExists(Obstruction::NoExtension { assigned, total, nodes }) => {
            r.put(
                key("obstruction"),
                format!("no homomorphic completion of {assigned} forced values out of {total}"),
            );
            r.put(key("nodes"), nodes);
        }
        ConnectorStatus::NoneExists(Obstruction::BetaMismatch { .. }) => {}
        ConnectorStatus::Unknown { assigned, total, nodes } => {
            r.put(key("forced"), format!("{assigned} of {total}"));
            r.put(key("nodes"), nodes);
            r.unknown = true;
        }
    }
}

pub fn commute_huq_cmd(ctx: &Ctx, alpha: &str, gamma: &str) -> Result<Report> {
    let a = ctx.ws.hom(alpha)?;
    let g = ctx.ws.hom(gamma)?;
    let res = huq_commute(a, g, ctx.settings.budget)?;
    let mut r = Report::new(format!("commute-huq {alpha} {gamma}"));
    r.put("alpha", fmt_map(a)).put("gamma", fmt_map(g));
    connector_report(&mut r, "", &res, a.cod());
    Ok(r)
}

pub fn commute_smith_cmd(ctx: &Ctx, alg: &str, rel_r: &str, rel_s: &str) -> Result<Report> {
    let a = ctx.ws.algebra(alg)?;
    let reflexive = |expr: &str| -> Result<Relation> {
        if !expr.trim_start().starts_with('{') {
            return ctx.ws.relation(expr, Some(alg));
        }
        let mut pairs = parse_pairs(a, a, expr).map_err(Error::NotClosed)?;
        pairs.extend(a.elements().map(|x| (x, x)));
        Relation::generated(a.clone(), a.clone(), pairs)
    };
    let rr = reflexive(rel_r)?;
    let ss = reflexive(rel_s)?;
    let res = smith_commute(&rr, &ss, ctx.settings.budget)?;
    let mut r = Report::new(format!("commute-smith {alg} {rel_r} {rel_s}"));
    r.put("r", fmt_pairs(a, a, rr.pairs()))
        .put("s", fmt_pairs(a, a, ss.pairs()));
    connector_report(&mut r, "", &res, a);
    Ok(r)
}

fn span_pair(ctx: &Ctx, names: &[&str]) -> Result<LeftSplitSpanPair> {
    let h = |n: &str| ctx.ws.hom(n).cloned();
    LeftSplitSpanPair::new(
        h(names[0])?,
        h(names[1])?,
        h(names[2])?,
        h(names[3])?,
        h(names[4])?,
        h(names[5])?,
    )
}

pub fn commute_leftsplit_cmd(ctx: &Ctx, names: &[&str]) -> Result<Report> {
    let p = span_pair(ctx, names)?;
    let res = leftsplit_commute(&p, ctx.settings.budget)?;
    let mut r = Report::new(format!("commute-leftsplit {}", names.join(" ")));
    connector_report(&mut r, "", &res, p.d());
    Ok(r)
}

pub fn maltsev_cmd(ctx: &Ctx, variety: &str) -> Result<Report> {
    let v = ctx.ws.variety(variety)?;
    let out = maltsev_term(&v, &FreeBounds::default())?;
    let mut r = Report::new(format!("maltsev {variety}"));
    r.put("variety", describe_variety(ctx.ws, variety, &v));
    let names = ["x".to_string(), "y".to_string(), "z".to_string()];
    match out {
        MaltsevOutcome::Found { term, explored } => {
            r.put("maltsev", "found");
            r.put("term", term.display(v.signature(), &names));
            r.put("explored", explored);
            let Variety::GeneratedBy(algs) = &v else {
                unreachable!("free algebras need generators")
            };
            r.artifact(Artifact::MaltsevTerm {
                generators: algs.iter().map(|a| AlgebraSpec::of(a)).collect(),
                term: term.to_prefix(v.signature(), &names),
            });
        }
        MaltsevOutcome::NoneExists { free_size } => {
            r.put("maltsev", "none");
            r.put("free_size", free_size);
        }
        MaltsevOutcome::Unknown { explored, reason } => {
            r.put("maltsev", "unknown");
            r.put("explored", explored).put("reason", reason);
            r.unknown = true;
        }
    }
    Ok(r)
}

pub fn abelianize_cmd(ctx: &Ctx, alg: &str) -> Result<Report> {
    let a = ctx.ws.algebra(alg)?;
    let mut r = Report::new(format!("abelianize {alg}"));
    r.put("algebra", alg);
    match abelian_from_connector(a, ctx.settings.budget)? {
        AbelianOutcome::Structure(s) => {
            let n = a.size();
            r.put("abelian", "yes");
            let rows: Vec<String> = (0..n)
                .map(|x| {
                    (0..n)
                        .map(|y| a.element_name(s.add[x * n + y]))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            r.put("add", rows.join(" / "));
            r.put(
                "neg",
                s.neg.iter().map(|&x| a.element_name(x)).collect::<Vec<_>>().join(" "),
            );
            r.artifact(Artifact::Abelian {
                algebra: AlgebraSpec::of(a),
                add: s.add,
                neg: s.neg,
            });
        }
        AbelianOutcome::NoConnector(status) => {
            r.put("abelian", "no");
            let label = match status {
                ConnectorStatus::NoneExists(_) => "none",
                ConnectorStatus::Unknown { .. } => {
                    r.unknown = true;
                    "unknown"
                }
                ConnectorStatus::Found(_) => "found",
            };
            r.put("connector", label);
        }
        AbelianOutcome::AxiomFailure(msg) => {
            return Err(Error::Invariant(format!(
                "connector of (∇,∇) is not an abelian group: {msg}"
            )));
        }
    }
    Ok(r)
}

pub fn pt_instance_cmd(ctx: &Ctx, spec: &str, variety: Option<&str>) -> Result<Report> {
    let names: Vec<&str> = spec.split(',').map(str::trim).collect();
    if names.len() != 6 {
        return Err(Error::MalformedDiagram(format!(
            "expected six maps f,r,alpha,g,s,gamma, got {}",
            names.len()
        )));
    }
    let p = span_pair(ctx, &names)?;
    let v = match variety {
        Some(e) => ctx.ws.variety(e)?,
        None => diagram_variety(&p)?,
    };
    let options = ClassifyOptions {
        bounds: ctx.settings.bounds,
        pool: None,
    };
    let rep = pt_kernel_reflection_instance(&p, &v, &options, ctx.settings.budget)?;
    let mut r = Report::new(format!("pt-instance {spec}"));
    connector_report(&mut r, "spans", &rep.spans, p.d());
    r.put("kernel.f", fmt_set(p.f.dom(), &rep.kernel_f));
    r.put("kernel.g", fmt_set(p.g.dom(), &rep.kernel_g));
    connector_report(&mut r, "kernels", &rep.kernels, p.d());
    for (side, verdict) in [("image.left", &rep.image_left), ("image.right", &rep.image_right)] {
        r.put(side, fmt_set(&verdict.algebra, &verdict.subset));
        r.put(format!("{side}.ideal"), verdict.ideal.label());
        r.flag(format!("{side}.clot"), verdict.is_clot());
        if matches!(verdict.ideal, IdealVerdict::Unknown { .. }) {
            r.unknown = true;
        }
    }
    r.flag("ideal_proper", rep.ideal_proper());
    r.flag("reflection_fails", rep.reflection_fails());
    Ok(r)
}

/// Runs the three checks on the shipped three-element example and compares
/// them with the expected outcome.
pub fn verify_example(settings: &Settings) -> Result<Report> {
    let ws = Workspace::parse(zeroclass::fixtures::EXAMPLE_WORKSPACE)?;
    let ctx = Ctx {
        ws: &ws,
        settings: Settings {
            pool: None,
            ..settings.clone()
        },
    };
    let mut r = classify_cmd(&ctx, "A", "C", Some("V"))?;
    r.absorb(endorelation_cmd(&ctx, "A", "C")?);
    r.absorb(certify_cmd(&ctx, "A", "C", Some("V"))?);
    let expect = [
        ("subuniverse", "yes"),
        ("normal", "no"),
        ("clot", "no"),
        ("clot.witness", "s(x1,y1) at s(a,1) = a"),
        ("candidates", "512"),
        ("certificates", "0"),
        ("ideal", "certified"),
        ("ideal.certificate.b.size", "2"),
    ];
    let mut failures = Vec::new();
    for (k, want) in expect {
        if r.get(k) != Some(want) {
            failures.push(format!("{k}: expected {want}, got {:?}", r.get(k)));
        }
    }
    if !failures.is_empty() {
        return Err(Error::Invariant(failures.join("; ")));
    }
    let mut summary = Report::new("summary");
    summary.put(
        "result",
        "C is a subalgebra and an ideal, but neither normal nor a clot",
    );
    r.absorb(summary);
    Ok(r)
}
