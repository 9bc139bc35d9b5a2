//! Minimal SVG scenes for domains of `R^{1,1}`: the boundary, chains and triangles.
//!
//! Time points up the page; the spatial coordinate runs to the right.

use std::fmt::Write;

use lorentz_metrics::domains::{ray_exit, DomainOracle};
use lorentz_metrics::{Endpoint, Event, Sign, Vector};

/// A polyline with a stroke colour.
#[derive(Clone, Debug)]
pub struct Stroke {
    pub points: Vec<Event>,
    pub color: &'static str,
    pub closed: bool,
}

/// Everything drawn in one file.
#[derive(Clone, Debug, Default)]
pub struct Scene {
    pub strokes: Vec<Stroke>,
    pub dots: Vec<Event>,
}

impl Scene {
    pub fn is_empty(&self) -> bool {
        self.strokes.is_empty() && self.dots.is_empty()
    }

    pub fn stroke(&mut self, points: Vec<Event>, color: &'static str) {
        self.strokes.push(Stroke {
            points,
            color,
            closed: false,
        });
    }
}

/// Boundary of a 1+1 domain traced by rays from its center, clipped to its
/// sampling box for unbounded directions.
pub fn boundary_polyline(omega: &dyn DomainOracle, rays: usize) -> Vec<Event> {
    let c = omega.center();
    let (lo, hi) = omega.sampling_box();
    let reach = (hi.t() - lo.t()).abs().max((hi[1] - lo[1]).abs());
    (0..rays)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / rays as f64;
            let v = Vector::from_slice(&[a.sin(), a.cos()]);
            match ray_exit(omega, &c, &v, Sign::Future) {
                Ok(Endpoint::Finite(e)) if (e.t() - c.t()).hypot(e[1] - c[1]) <= reach => e,
                _ => Event::new(c.t() + reach * a.sin(), &[c[1] + reach * a.cos()]),
            }
        })
        .collect()
}

/// Renders a 1+1 scene; higher dimensions are rejected by the caller.
pub fn render(scene: &Scene) -> String {
    let all = scene.strokes.iter().flat_map(|s| s.points.iter()).chain(&scene.dots);
    let (mut t0, mut t1, mut p0, mut p1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for e in all {
        t0 = t0.min(e.t());
        t1 = t1.max(e.t());
        p0 = p0.min(e[1]);
        p1 = p1.max(e[1]);
    }
    if !t0.is_finite() {
        (t0, t1, p0, p1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (t1 - t0).max(p1 - p0).max(1e-9);
    let size = 800.0;
    let pad = 20.0;
    let scale = (size - 2.0 * pad) / span;
    let map = |e: &Event| (pad + (e[1] - p0) * scale, size - pad - (e.t() - t0) * scale);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for s in &scene.strokes {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|e| {
                let (x, y) = map(e);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let tag = if s.closed { "polygon" } else { "polyline" };
        let _ = writeln!(
            out,
            r#"<{tag} points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            pts.join(" "),
            s.color
        );
    }
    for d in &scene.dots {
        let (x, y) = map(d);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="black"/>"#);
    }
    out.push_str("</svg>\n");
    out
}

/// Adds the closed boundary of `omega` to the scene.
pub fn add_boundary(scene: &mut Scene, omega: &dyn DomainOracle) {
    scene.strokes.push(Stroke {
        points: boundary_polyline(omega, 720),
        color: "#555555",
        closed: true,
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use lorentz_metrics::SpecialDomain;

    #[test]
    fn diamond_scene_renders() {
        let d = SpecialDomain::Diamond {
            a: Event::new(-1.0, &[0.0]),
            b: Event::new(1.0, &[0.0]),
        };
        let mut s = Scene::default();
        add_boundary(&mut s, &d);
        s.dots.push(Event::new(0.0, &[0.0]));
        let svg = render(&s);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polygon"));
        assert!(svg.contains("<circle"));
        // every traced boundary point lies on the diamond's boundary |p| = 1 - |t|
        for e in boundary_polyline(&d, 64) {
            assert!((e[1].abs() + e.t().abs() - 1.0).abs() < 1e-6);
        }
    }
}
