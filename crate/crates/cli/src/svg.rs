//! Region plots: shaded convex bodies with axes, as standalone SVG.

use boxnef::opt;
use boxnef::positivity::SSet;
use boxnef::region::ConvexRegion;
use boxnef::scalar::Scalar;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

struct Frame {
    scale: f64,
    max: f64,
}

impl Frame {
    fn new(max: f64) -> Self {
        Frame { scale: (SIZE - 2.0 * MARGIN) / max, max }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + v * self.scale
    }

    fn y(&self, v: f64) -> f64 {
        SIZE - MARGIN - v * self.scale
    }
}

fn path_from(points: &[[f64; 2]], frame: &Frame) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        d.push_str(&format!("{}{:.4},{:.4} ", cmd, frame.x(p[0]), frame.y(p[1])));
    }
    d.push('Z');
    d
}

fn document(body: &str, frame: &Frame, title: &str) -> String {
    let axis_end = SIZE - MARGIN / 2.0;
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" ",
            "viewBox=\"0 0 {s} {s}\" data-max=\"{max}\">\n",
            "<title>{title}</title>\n",
            "<rect width=\"{s}\" height=\"{s}\" fill=\"white\"/>\n",
            "{body}",
            "<line x1=\"{m}\" y1=\"{o}\" x2=\"{e}\" y2=\"{o}\" stroke=\"black\"/>\n",
            "<line x1=\"{m}\" y1=\"{o}\" x2=\"{m}\" y2=\"{m2}\" stroke=\"black\"/>\n",
            "<text x=\"{e}\" y=\"{o2}\" font-size=\"12\">{max}</text>\n",
            "</svg>\n"
        ),
        s = SIZE,
        title = title,
        body = body,
        m = MARGIN,
        o = SIZE - MARGIN,
        e = axis_end,
        m2 = MARGIN / 2.0,
        o2 = SIZE - MARGIN + 14.0,
        max = frame.max,
    )
}

/// Boundary of a bounded 2D region by support sweep; conic arcs come out as
/// dense polylines, straight facets collapse to their vertices.
pub fn region_boundary(region: &ConvexRegion, samples: usize) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for k in 0..samples {
        let th = std::f64::consts::TAU * k as f64 / samples as f64;
        let obj = [Scalar::approx(th.cos()), Scalar::approx(th.sin())];
        if let Ok(out) = opt::maximize_linear(region, &obj, 1e-9) {
            if let opt::OptOutcome::Optimal { witness, .. } = out {
                let p = [witness[0].to_f64(), witness[1].to_f64()];
                if pts.last().map_or(true, |q| (q[0] - p[0]).abs() + (q[1] - p[1]).abs() > 1e-9) {
                    pts.push(p);
                }
            }
        }
    }
    pts
}

/// Plot of a bounded region (nef box).
pub fn plot_region(region: &ConvexRegion, title: &str) -> String {
    let boundary = region_boundary(region, 512);
    let max = boundary
        .iter()
        .flat_map(|p| [p[0], p[1]])
        .fold(1.0_f64, f64::max)
        * 1.15;
    let frame = Frame::new(max);
    let body = format!(
        "<path d=\"{}\" fill=\"#b0c4de\" stroke=\"#333\" stroke-width=\"1\"/>\n",
        path_from(&boundary, &frame)
    );
    document(&body, &frame, title)
}

/// Plot of a scaled exponent body: bounded-part lower chain extended by the
/// recession rays, clipped to the viewing square.
pub fn plot_sset(body: &SSet, t: f64, view: f64, title: &str) -> String {
    let frame = Frame::new(view);
    // Lower-left chain: support points of the bounded part in downward
    // directions, scaled by t.
    let mut chain: Vec<[f64; 2]> = Vec::new();
    let mut bounded = body.region.clone();
    bounded.recession = None;
    for k in 0..=256 {
        let th = std::f64::consts::FRAC_PI_2 * k as f64 / 256.0;
        // Inward-normal directions from pointing down to pointing left.
        let obj = [Scalar::approx(th.sin()), Scalar::approx(th.cos())];
        if let Ok(opt::OptOutcome::Optimal { witness, .. }) =
            opt::minimize_linear(&bounded, &obj, 1e-9)
        {
            let p = [witness[0].to_f64() * t, witness[1].to_f64() * t];
            if chain.last().map_or(true, |q| (q[0] - p[0]).abs() + (q[1] - p[1]).abs() > 1e-9) {
                chain.push(p);
            }
        }
    }
    // Close along the viewing box: bottom recession ray, the chain from its
    // anchor up to the left anchor, then the left ray and the box corner.
    let mut poly: Vec<[f64; 2]> = Vec::new();
    if let Some(first) = chain.first() {
        poly.push([view, first[1]]);
    }
    poly.extend(chain.iter().copied());
    if let Some(last) = chain.last() {
        poly.push([last[0], view]);
    }
    poly.push([view, view]);
    let svg_body = format!(
        "<path d=\"{}\" fill=\"#c8d8b0\" stroke=\"#333\" stroke-width=\"1\"/>\n",
        path_from(&poly, &frame)
    );
    document(&svg_body, &frame, title)
}

/// Extract the polygon back out of an emitted SVG (first path element).
pub fn parse_polygon(svg: &str) -> Vec<[f64; 2]> {
    let Some(start) = svg.find("<path d=\"") else {
        return Vec::new();
    };
    let rest = &svg[start + 9..];
    let Some(end) = rest.find('"') else {
        return Vec::new();
    };
    let d = &rest[..end];
    let mut out = Vec::new();
    for chunk in d.split_whitespace() {
        let chunk = chunk.trim_start_matches(['M', 'L']);
        if chunk == "Z" || chunk.is_empty() {
            continue;
        }
        let mut it = chunk.split(',');
        if let (Some(a), Some(b)) = (it.next(), it.next()) {
            if let (Ok(x), Ok(y)) = (a.parse::<f64>(), b.parse::<f64>()) {
                out.push([x, y]);
            }
        }
    }
    out
}

/// Frame maximum recorded in the SVG root, for inverting coordinates.
pub fn parse_max(svg: &str) -> Option<f64> {
    let start = svg.find("data-max=\"")? + 10;
    let rest = &svg[start..];
    let end = rest.find('"')?;
    rest[..end].parse().ok()
}

/// Map SVG pixel coordinates back to region coordinates for a given frame
/// maximum (the inverse of the plotting transform).
pub fn pixel_to_coord(p: [f64; 2], max: f64) -> [f64; 2] {
    let scale = (SIZE - 2.0 * MARGIN) / max;
    [(p[0] - MARGIN) / scale, (SIZE - MARGIN - p[1]) / scale]
}

/// Ray-crossing point-in-polygon test.
pub fn point_in_polygon(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}
