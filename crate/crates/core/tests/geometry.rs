use handoff_core::layout::{crossed_switch_line, nearest_floor, switch_lines_for, ApDescriptor, ApLayout, SwitchLine};
use handoff_core::Vec3;
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -20.0..20.0f64
}

fn point() -> impl Strategy<Value = Vec3> {
    (coord(), coord(), 0.0..4.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn layout(n: usize) -> impl Strategy<Value = ApLayout> {
    prop::collection::vec(point(), 2..=n).prop_filter_map("distinct floor positions", |pts| {
        for i in 0..pts.len() {
            for j in 0..i {
                if pts[i].floor().dist(pts[j].floor()) < 0.5 {
                    return None;
                }
            }
        }
        let aps = pts
            .iter()
            .enumerate()
            .map(|(i, &p)| ApDescriptor::ceiling(i, Vec3::new(p.x, p.y, 3.0), 90.0, 9.0))
            .collect();
        ApLayout::new(aps).ok()
    })
}

proptest! {
    #[test]
    fn bisector_points_are_equidistant(a in point(), b in point(), s in -10.0..10.0f64) {
        let (pa, pb) = (ApDescriptor::ceiling(0, a, 90.0, 9.0), ApDescriptor::ceiling(1, b, 90.0, 9.0));
        prop_assume!(a.floor().dist(b.floor()) > 1e-3);
        let line = SwitchLine::between(&pa, &pb).unwrap();
        let along = Vec3::new(-line.normal.y, line.normal.x, 0.0);
        let q = line.point + along * s;
        let (da, db) = (q.floor().dist(a.floor()), q.floor().dist(b.floor()));
        prop_assert!((da - db).abs() < 1e-9 * (1.0 + da));
        prop_assert!(line.signed_distance(a) < 0.0 && line.signed_distance(b) > 0.0);
    }

    #[test]
    fn crossing_is_a_sign_change(a in point(), b in point(), p in point(), q in point()) {
        prop_assume!(a.floor().dist(b.floor()) > 1e-3);
        let line = SwitchLine::between(&ApDescriptor::ceiling(0, a, 90.0, 9.0), &ApDescriptor::ceiling(1, b, 90.0, 9.0)).unwrap();
        let crossed = crossed_switch_line(&line, p, q);
        prop_assert_eq!(crossed, line.signed_distance(p) < 0.0 && line.signed_distance(q) >= 0.0);
        // the reverse step never counts as crossing this line
        if crossed {
            prop_assert!(!crossed_switch_line(&line, q, p));
        }
    }

    #[test]
    fn switch_lines_are_translation_equivariant(l in layout(7), shift in point(), p in point(), q in point()) {
        let shifted = ApLayout::new(
            l.aps().iter().map(|a| ApDescriptor { position: a.position + shift.floor(), ..a.clone() }).collect(),
        ).unwrap();
        for id in 0..l.len() {
            let a = switch_lines_for(&l, id).unwrap();
            let b = switch_lines_for(&shifted, id).unwrap();
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert_eq!(x.neighbor, y.neighbor);
                let (dx, dy) = (x.signed_distance(p), y.signed_distance(p + shift.floor()));
                prop_assert!((dx - dy).abs() < 1e-9 * (1.0 + dx.abs()));
                prop_assert_eq!(crossed_switch_line(x, p, q), crossed_switch_line(y, p + shift.floor(), q + shift.floor()));
            }
        }
    }

    /// A point is inside the current cell exactly when it is on the current
    /// side of every switch line.
    #[test]
    fn cell_membership_matches_switch_lines(l in layout(7), p in point()) {
        let pts = l.positions();
        let cell = nearest_floor(&pts, p);
        for id in 0..l.len() {
            let lines = switch_lines_for(&l, id).unwrap();
            let inside = lines.iter().all(|s| s.signed_distance(p) < 0.0);
            let margin = lines.iter().map(|s| s.signed_distance(p).abs()).fold(f64::INFINITY, f64::min);
            if margin > 1e-9 {
                prop_assert_eq!(inside, cell == id, "ap {} cell {}", id, cell);
            }
        }
    }
}

/// Neighbour sets against a rasterised Voronoi diagram: two cells are
/// adjacent when some pixel of one touches a pixel of the other.
#[test]
fn neighbors_match_rasterised_voronoi() {
    let layouts = [
        ApLayout::grid(3, 2, 10.0, 15.0, 3.0, 125.0, 9.0).unwrap(),
        ApLayout::grid(3, 3, 12.0, 12.0, 3.0, 125.0, 9.0).unwrap(),
        ApLayout::new(
            [(1.0, 1.0), (6.0, 2.0), (3.5, 7.0), (9.0, 8.5), (2.0, 11.0)]
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| ApDescriptor::ceiling(i, Vec3::new(x, y, 3.0), 90.0, 9.0))
                .collect(),
        )
        .unwrap(),
    ];
    for l in &layouts {
        let pts = l.positions();
        let n = pts.len();
        let (lo, hi, res) = (-30.0, 45.0, 0.05);
        let m = ((hi - lo) / res) as usize;
        let cell = |i: usize, j: usize| {
            nearest_floor(
                &pts,
                Vec3::new(lo + (i as f64 + 0.5) * res, lo + (j as f64 + 0.5) * res, 0.0),
            )
        };
        let mut adj = vec![vec![false; n]; n];
        let mut prev_row: Vec<usize> = (0..m).map(|j| cell(0, j)).collect();
        for i in 1..m {
            let row: Vec<usize> = (0..m).map(|j| cell(i, j)).collect();
            for j in 0..m {
                let a = row[j];
                for b in [prev_row[j], if j > 0 { row[j - 1] } else { a }] {
                    if a != b {
                        adj[a][b] = true;
                        adj[b][a] = true;
                    }
                }
            }
            prev_row = row;
        }
        for (id, row) in adj.iter().enumerate() {
            let expect: Vec<usize> = (0..n).filter(|&j| row[j]).collect();
            assert_eq!(l.neighbors(id).unwrap(), expect, "ap {id}");
        }
    }
}
