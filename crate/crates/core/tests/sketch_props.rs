mod common;

use common::*;
use proptest::prelude::*;
use sketchmotion::geometry::{CubicBezier, GlobalTransform, Point2};
use sketchmotion::sketch::*;
use sketchmotion::Error;

fn point() -> impl Strategy<Value = Point2> {
    (-500.0f64..500.0, -500.0f64..500.0).prop_map(|(x, y)| Point2::new(x, y))
}

fn sketch() -> impl Strategy<Value = SketchFrame> {
    prop::collection::vec(prop::array::uniform4(point()).prop_map(bez), 1..6)
        .prop_map(|s| SketchFrame::new(s).unwrap())
}

fn max_point_error(a: &SketchFrame, b: &SketchFrame) -> f64 {
    assert_eq!(a.point_count(), b.point_count());
    a.points()
        .iter()
        .zip(b.points())
        .map(|(p, q)| p.distance(q))
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn svg_round_trip_is_idempotent(s in sketch()) {
        let once = normalize_to_canvas(&s);
        let again = parse_svg(&frame_to_svg(&once)).unwrap();
        prop_assert!(max_point_error(&once, &again) <= 1e-6);
        let raw = parse_svg_raw(&frame_to_svg(&s)).unwrap();
        prop_assert_eq!(raw, s);
    }

    #[test]
    fn translation_equivariance(
        s in sketch(),
        shift in point(),
        steps in prop::collection::vec((point(), point()), 1..5),
    ) {
        let transforms: Vec<GlobalTransform> =
            steps.iter().map(|(t, _)| GlobalTransform::translation(*t * 0.1)).collect();
        let m = s.point_count();
        let offsets = LocalOffsets {
            intervals: steps.iter().map(|(_, d)| vec![*d * 0.01; m]).collect(),
        };
        for mode in [CompositionMode::Recurrent, CompositionMode::Anchored] {
            let base = compose_video(&s, &transforms, &offsets, mode).unwrap();
            let moved = compose_video(&s.map_points(|p| p + shift), &transforms, &offsets, mode).unwrap();
            for (fa, fb) in base.frames().iter().zip(moved.frames()) {
                let shifted = fa.map_points(|p| p + shift);
                prop_assert!(max_point_error(&shifted, fb) < 1e-9);
            }
        }
    }

    #[test]
    fn identity_composition_is_exact(s in sketch(), n in 2usize..8) {
        let m = s.point_count();
        let video = compose_video(
            &s,
            &vec![GlobalTransform::IDENTITY; n - 1],
            &LocalOffsets::zeros(n - 1, m),
            CompositionMode::Recurrent,
        ).unwrap();
        prop_assert!(video.frames().iter().all(|f| *f == s));
    }
}

#[test]
fn parse_examples() {
    let doc = |d: &str| format!(r#"<svg xmlns="http://www.w3.org/2000/svg"><path d="{d}"/></svg>"#);
    let expected = [
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(2.0, 0.0),
        Point2::new(3.0, 0.0),
    ];
    let curve = parse_svg_raw(&doc("M 0 0 C 1 0 2 0 3 0")).unwrap();
    assert_eq!(curve.strokes()[0].control, expected);
    let line = parse_svg_raw(&doc("M 0 0 L 3 0")).unwrap();
    assert_eq!(line.strokes()[0].control, expected);

    // Normalization keeps aspect ratio and centers the bounding box.
    let n = parse_svg(&doc("M 0 0 C 1 0 2 0 3 0")).unwrap();
    let pts = n.points();
    assert!((pts[0].x - 12.8).abs() < 1e-9 && (pts[3].x - 243.2).abs() < 1e-9);
    assert!(pts.iter().all(|p| (p.y - 128.0).abs() < 1e-12));

    let closed = parse_svg_raw(&doc("M 0 0 L 3 0 L 3 3 Z")).unwrap();
    assert_eq!(closed.stroke_count(), 3);
    assert_eq!(closed.strokes()[2].control[3], Point2::ZERO);

    assert!(matches!(
        parse_svg(r#"<svg xmlns="http://www.w3.org/2000/svg"><rect/></svg>"#),
        Err(Error::EmptySketch)
    ));
    assert!(matches!(
        parse_svg(&doc("M 0 0 Q 1 1 2 0")),
        Err(Error::UnsupportedCommand('Q'))
    ));
    assert!(matches!(
        parse_svg(&doc("M 0 0 A 1 1 0 0 1 2 0")),
        Err(Error::UnsupportedCommand('A'))
    ));
    assert!(matches!(parse_svg("<svg"), Err(Error::MalformedSvg(_))));
}

#[test]
fn centroid_examples() {
    let single = |c: [Point2; 4]| SketchFrame::new(vec![bez(c)]).unwrap();
    assert_eq!(frame_centroid(&single([Point2::ZERO; 4])), Point2::ZERO);
    let line = single([
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(2.0, 0.0),
        Point2::new(3.0, 0.0),
    ]);
    assert_eq!(frame_centroid(&line), Point2::new(1.5, 0.0));
    let left = CubicBezier::line(Point2::new(1.0, 0.0), Point2::new(3.0, 4.0));
    let right = left.map(|p| Point2::new(10.0 - p.x, p.y));
    let pair = SketchFrame::new(vec![left, right]).unwrap();
    assert!((frame_centroid(&pair).x - 5.0).abs() < 1e-12);
}
