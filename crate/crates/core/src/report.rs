//! Versioned JSON reports. Everything in a report is a function of the input
//! algebra and the search budget, so equal inputs give byte-identical output.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::field::Field;
use crate::filtration::Analysis;
use crate::fmb::{abelian_basis, height_one_generators, quadratic_obstruction, Certificate, FoundRoute, SearchBudget};
use crate::format::render_algebra;

pub const SCHEMA: &str = "resfmb-report/1";

/// SHA-256 of the canonical rendering of the input algebra.
pub fn input_digest<F: Field>(analysis: &Analysis<F>) -> String {
    hex::encode(Sha256::digest(render_algebra(&analysis.input).as_bytes()))
}

fn certificate_json<F: Field>(analysis: &Analysis<F>, cert: &Certificate<F>) -> Value {
    let names = analysis.adapted.names();
    let f = analysis.env.field();
    let mut out = Map::new();
    out.insert("kind".into(), json!(cert.kind()));
    out.insert("summary".into(), json!(cert.summary(analysis)));
    let evidence = match cert {
        Certificate::FoundBasis { route, .. } => {
            let route = match route {
                FoundRoute::CyclicDecomposition { exponents } => {
                    json!({ "route": "cyclic_decomposition", "exponents": exponents })
                }
                FoundRoute::Search { nodes } => json!({ "route": "search", "nodes": nodes }),
            };
            json!({ "basis": cert.rendered_basis(analysis), "construction": route })
        }
        Certificate::NoCyclicDecomposition { x, y, z, ratio } => json!({
            "x": names[*x],
            "y": names[*y],
            "z": names[*z],
            "ratio": f.format(ratio),
            "ratio_has_pth_root": false,
        }),
        Certificate::QuadraticObstruction { generators, .. } => json!({
            "generators": generators.iter().map(|g| analysis.render(g)).collect::<Vec<_>>(),
        }),
        Certificate::OddClassTwo { report } => json!({
            "witness": report.witness.map(|(r, s)| [names[r].clone(), names[s].clone()]),
            "identity_holds": report.identity_holds,
        }),
        Certificate::Exhausted { nodes, budget, digest } => json!({
            "nodes": nodes,
            "budget": budget,
            "trace_digest": digest,
        }),
        Certificate::Inconclusive { reason, nodes } => json!({ "reason": reason, "nodes": nodes }),
    };
    out.insert("evidence".into(), evidence);
    Value::Object(out)
}

/// The full report for an analysed algebra and the certificate decided for it.
pub fn build<F: Field>(analysis: &Analysis<F>, cert: &Certificate<F>, budget: &SearchBudget) -> Value {
    let input = &analysis.input;
    let s = &analysis.structure;
    let fd = &analysis.filtration;
    let dims = |v: &[crate::linalg::Subspace<F>]| v.iter().map(|x| x.dim()).collect::<Vec<_>>();
    let heights: Vec<Value> = fd
        .adapted
        .as_ref()
        .map(|b| {
            b.vectors
                .iter()
                .zip(&b.names)
                .zip(&b.heights)
                .map(|((v, n), h)| json!({ "name": n, "element": input.render(v), "height": h }))
                .collect()
        })
        .unwrap_or_default();

    let mut out = Map::new();
    out.insert("schema".into(), json!(SCHEMA));
    out.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
    out.insert("input_digest".into(), json!(input_digest(analysis)));
    out.insert(
        "algebra".into(),
        json!({
            "field": input.field().name(),
            "dim": input.dim(),
            "names": input.names(),
        }),
    );
    out.insert(
        "structure".into(),
        json!({
            "abelian": s.is_abelian,
            "nilpotency_class": s.nilpotency_class,
            "p_nilpotent": s.is_p_nilpotent,
            "powerful": s.is_powerful,
            "minimal_generators": s.minimal_generators.iter().map(|g| input.render(g)).collect::<Vec<_>>(),
        }),
    );
    out.insert(
        "filtration".into(),
        json!({
            "lower_central_dims": dims(&fd.lower_central),
            "dimension_subalgebra_dims": dims(&fd.dim_subalgebras),
            "omega_dims": dims(&analysis.omega),
            "layer_dims": analysis.layer_dims(),
            "heights": heights,
        }),
    );
    if s.is_abelian && input.field().elements().is_some() {
        if let Ok((_, dec)) = abelian_basis(analysis) {
            out.insert(
                "decomposition".into(),
                json!({
                    "generators": dec.generators.iter().map(|g| analysis.adapted.render(g)).collect::<Vec<_>>(),
                    "exponents": dec.exponents,
                }),
            );
        }
    }
    if s.is_powerful && !s.is_abelian {
        // recorded whether or not the conditions hold, so that powerful
        // algebras failing them are visible
        let gens = height_one_generators(analysis);
        if let Ok(q) = quadratic_obstruction(analysis, &gens) {
            out.insert(
                "quadratic_conditions".into(),
                json!({
                    "commutators_outside_omega3": q.commutators_outside,
                    "products_inside_omega3": q.products_inside,
                    "meet_dim": q.meet_dim,
                    "all_hold": q.holds(),
                    "first_failure": q.failure(),
                }),
            );
        }
    }
    out.insert("search_budget".into(), json!(budget.max_nodes));
    out.insert("certificate".into(), certificate_json(analysis, cert));
    Value::Object(out)
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_string(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialise");
    s.push('\n');
    s
}
