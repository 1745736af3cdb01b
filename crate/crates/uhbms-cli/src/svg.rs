//! Static SVG drawings of the fundamental parallelograms and one winding
//! orbit on the torus square.

use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use quick_xml::events::Event;
use quick_xml::Reader;
use uhbms::invariant_functions::FundamentalRegion;
use uhbms::little_groups::LittleGroupSpec;

/// Render `region` over the square `[0, 2π)²` together with the orbit of
/// the one-parameter part of `spec`, folded onto the torus.
pub fn region_svg(region: &FundamentalRegion, spec: &LittleGroupSpec, scale: f64, orbit_points: usize) -> String {
    let verts: Vec<(f64, f64)> = region.vertices().iter().map(|p| p.to_f64()).collect();
    let xs = verts.iter().map(|v| v.0).chain([0.0, TAU]);
    let ys = verts.iter().map(|v| v.1).chain([0.0, TAU]);
    let (x0, x1) = xs.fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(x), b.max(x)));
    let (y0, y1) = ys.fold((f64::MAX, f64::MIN), |(a, b), y| (a.min(y), b.max(y)));
    let pad = 0.25 * PI;
    let k = scale / PI;
    let (w, h) = ((x1 - x0 + 2.0 * pad) * k, (y1 - y0 + 2.0 * pad) * k);
    // SVG y grows downwards.
    let px = |x: f64| (x - x0 + pad) * k;
    let py = |y: f64| (y1 - y + pad) * k;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#);
    let _ = writeln!(s, "<title>{} case {} region</title>", spec.label(), region.case.index());
    let _ = writeln!(
        s,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#888" stroke-dasharray="4 3"/>"##,
        px(0.0),
        py(TAU),
        TAU * k,
        TAU * k
    );
    let pts: Vec<String> = verts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
    let _ = writeln!(s, r##"<polygon points="{}" fill="#4a90d9" fill-opacity="0.25" stroke="#1f4e8c"/>"##, pts.join(" "));
    for (name, &(x, y)) in ["O", "Γ", "B", "A"].iter().zip(&verts) {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">{name}</text>"#, px(x) + 3.0, py(y) - 3.0);
    }

    // Orbit θ ↦ (2aθ, 2bθ) mod 2π, split where it wraps.
    let (a, b) = spec.slopes();
    let mut path = String::new();
    let mut last: Option<(f64, f64)> = None;
    for i in 0..=orbit_points {
        let th = PI * i as f64 / orbit_points as f64;
        let (r, q) = ((2.0 * a as f64 * th).rem_euclid(TAU), (2.0 * b as f64 * th).rem_euclid(TAU));
        let jump = last.is_none_or(|(lr, lq)| (r - lr).abs() > PI || (q - lq).abs() > PI);
        let _ = write!(path, "{}{:.2} {:.2} ", if jump { "M" } else { "L" }, px(r), py(q));
        last = Some((r, q));
    }
    let _ = writeln!(s, r##"<path d="{}" fill="none" stroke="#c0392b" stroke-width="1"/>"##, path.trim_end());
    s.push_str("</svg>\n");
    s
}

/// True when `text` parses as XML with a single `svg` root element.
pub fn well_formed(text: &str) -> bool {
    let mut reader = Reader::from_str(text);
    let mut depth = 0usize;
    let mut roots = 0;
    let mut root_ok = true;
    loop {
        match reader.read_event() {
            Ok(Event::Start(e)) => {
                if depth == 0 {
                    roots += 1;
                    root_ok &= e.name().as_ref() == b"svg";
                }
                depth += 1;
            }
            Ok(Event::End(_)) => match depth.checked_sub(1) {
                Some(d) => depth = d,
                None => return false,
            },
            Ok(Event::Empty(_)) if depth == 0 => return false,
            Ok(Event::Eof) => break,
            Err(_) => return false,
            _ => {}
        }
    }
    depth == 0 && roots == 1 && root_ok
}
