//! Graphviz rendering. Each complex is a cluster, each strand a chain of
//! domain nodes (bold edges, 5' to 3'), and each bond a dashed edge.

use std::fmt::Write;

use strandc_core::compiler::DsdSystem;
use strandc_core::dsd::Complex;

fn node(complex: &str, strand: usize, domain: usize) -> String {
    format!("\"{complex}:{strand}:{domain}\"")
}

fn render_complex(out: &mut String, name: &str, c: &Complex) {
    let _ = writeln!(out, "  subgraph \"cluster_{name}\" {{");
    let _ = writeln!(out, "    label=\"{name}\";");
    for (si, s) in c.strands.iter().enumerate() {
        let _ = writeln!(out, "    subgraph \"cluster_{name}_{si}\" {{");
        let _ = writeln!(out, "      label=\"{} ({})\";", s.name, s.role.name());
        for (di, d) in s.domains.iter().enumerate() {
            let _ = writeln!(out, "      {} [label=\"{d}\"];", node(name, si, di));
        }
        for di in 1..s.domains.len() {
            let _ = writeln!(
                out,
                "      {} -- {} [style=bold];",
                node(name, si, di - 1),
                node(name, si, di)
            );
        }
        let _ = writeln!(out, "    }}");
    }
    for b in &c.bonds {
        let _ = writeln!(
            out,
            "    {} -- {} [style=dashed];",
            node(name, b.a.strand, b.a.domain),
            node(name, b.b.strand, b.b.domain)
        );
    }
    let _ = writeln!(out, "  }}");
}

pub fn render(sys: &DsdSystem) -> String {
    let mut out = String::from("graph strandc {\n");
    if !sys.gadgets.is_empty() {
        out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    }
    for g in &sys.gadgets {
        render_complex(&mut out, &format!("g1_r{}", g.reaction), &g.input_gate);
        render_complex(&mut out, &format!("g2_r{}", g.reaction), &g.output_gate);
    }
    out.push_str("}\n");
    out
}
