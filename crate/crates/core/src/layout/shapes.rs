//! Closed-form member placement for each structure kind.
//!
//! Every function works in the structure's local frame (member 0 at the
//! origin unless stated otherwise) and applies the anchor last.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{LocalPose, Pose};

use super::{EdgePolicy, LayoutConfig, Orientation, Placement, PlannedEdge};

fn place(local: &[LocalPose], anchor: &Pose) -> Vec<Pose> {
    local.iter().map(|l| anchor.compose(l)).collect()
}

fn chain(n: usize) -> Vec<PlannedEdge> {
    (1..n).map(|i| PlannedEdge::visible(i - 1, i)).collect()
}

pub fn layout_linear_linear(n: usize, anchor: &Pose, cfg: &LayoutConfig) -> Placement {
    let local: Vec<_> = (0..n)
        .map(|i| LocalPose::at(i as f64 * cfg.step_x(), 0.0))
        .collect();
    Placement {
        poses: place(&local, anchor),
        folded: vec![false; n],
        edges: chain(n),
        policy: EdgePolicy::Replace,
    }
}

/// Row and column of member `i` in a grid of `n` members with `count` rows
/// (horizontal, row-major fill) or `count` columns (vertical, column-major).
pub fn grid_cell(i: usize, n: usize, count: usize, orientation: Orientation) -> (usize, usize) {
    let per_line = n.div_ceil(count.max(1)).max(1);
    match orientation {
        Orientation::Horizontal => (i / per_line, i % per_line),
        Orientation::Vertical => (i % per_line, i / per_line),
    }
}

/// Multi-row (horizontal) or multi-column (vertical) grid. The execution
/// chain follows member order, so each line's last member links to the next
/// line's first member; the router takes that wrap edge around the outside.
pub fn layout_grid(
    n: usize,
    count: usize,
    orientation: Orientation,
    anchor: &Pose,
    cfg: &LayoutConfig,
) -> Result<Placement> {
    if count < 2 || count > n {
        return Err(Error::Param(format!(
            "grid needs between 2 and {n} lines, got {count}"
        )));
    }
    let local: Vec<_> = (0..n)
        .map(|i| {
            let (r, c) = grid_cell(i, n, count, orientation);
            LocalPose::at(c as f64 * cfg.step_x(), -(r as f64) * cfg.step_y())
        })
        .collect();
    Ok(Placement {
        poses: place(&local, anchor),
        folded: vec![false; n],
        edges: chain(n),
        policy: EdgePolicy::Replace,
    })
}

/// Splits members `1..n` into contiguous branches starting at each root.
pub fn tree_branches(n: usize, roots: &[usize]) -> Vec<Vec<usize>> {
    roots
        .iter()
        .enumerate()
        .map(|(k, &start)| {
            let end = roots.get(k + 1).copied().unwrap_or(n);
            (start..end).collect()
        })
        .collect()
}

/// Parent at the origin, one linear run per branch. Members between the
/// parent and the first root form a trunk continuing straight on from the
/// parent, and the branches fan out from the trunk's last member.
/// Horizontal trees fan the runs out vertically with the first branch on
/// top; vertical trees hang the runs downwards with the first branch
/// leftmost.
pub fn layout_parallel_tree(
    n: usize,
    roots: &[usize],
    orientation: Orientation,
    anchor: &Pose,
    cfg: &LayoutConfig,
) -> Result<Placement> {
    if roots.is_empty() {
        return Err(Error::Param("a tree needs at least one branch root".into()));
    }
    if roots[0] == 0 {
        return Err(Error::Param(
            "the first member is the parent, not a branch root".into(),
        ));
    }
    if roots.windows(2).any(|w| w[0] >= w[1]) || roots[roots.len() - 1] >= n {
        return Err(Error::Param(
            "branch roots must be increasing member positions".into(),
        ));
    }
    let at = |along: f64, offset: f64| match orientation {
        Orientation::Horizontal => LocalPose::at(along * cfg.step_x(), -offset * cfg.step_y()),
        Orientation::Vertical => LocalPose::at(offset * cfg.step_x(), -along * cfg.step_y()),
    };
    let fork = roots[0] - 1;
    let branches = tree_branches(n, roots);
    let spread = (branches.len() as f64 - 1.0) / 2.0;
    let mut local = vec![LocalPose::default(); n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for (m, pose) in local.iter_mut().enumerate().take(fork + 1).skip(1) {
        *pose = at(m as f64, 0.0);
        edges.push(PlannedEdge::visible(m - 1, m));
    }
    for (k, branch) in branches.iter().enumerate() {
        let offset = k as f64 - spread;
        for (j, &m) in branch.iter().enumerate() {
            local[m] = at((fork + j + 1) as f64, offset);
        }
        edges.push(PlannedEdge::visible(fork, branch[0]));
        edges.extend(branch.windows(2).map(|w| PlannedEdge::visible(w[0], w[1])));
    }
    Ok(Placement {
        poses: place(&local, anchor),
        folded: vec![false; n],
        edges,
        policy: EdgePolicy::Replace,
    })
}

/// Circle radius for `n` members: neighbours sit one cell-diagonal pitch
/// apart along the circumference, never tighter than the configured minimum.
pub fn loop_radius(n: usize, cfg: &LayoutConfig) -> f64 {
    let pitch = cfg.step_x().hypot(cfg.step_y());
    cfg.min_circle_radius.max(n as f64 * pitch / (2.0 * PI))
}

/// Members clockwise from the top of a circle in the structure plane; the
/// anchor is the circle center. The edge set is a single cycle.
pub fn layout_loop_circle(n: usize, anchor: &Pose, cfg: &LayoutConfig) -> Result<Placement> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "a loop needs at least 2 members, got {n}"
        )));
    }
    let r = loop_radius(n, cfg);
    let local: Vec<_> = (0..n)
        .map(|i| {
            let theta = PI / 2.0 - 2.0 * PI * i as f64 / n as f64;
            LocalPose::at(r * theta.cos(), r * theta.sin())
        })
        .collect();
    let edges = (0..n)
        .map(|i| PlannedEdge::visible(i, (i + 1) % n))
        .collect();
    Ok(Placement {
        poses: place(&local, anchor),
        folded: vec![false; n],
        edges,
        policy: EdgePolicy::Replace,
    })
}

/// Groups member indices by key, groups ordered by first appearance.
pub fn cluster_partition(keys: &[String]) -> Vec<(String, Vec<usize>)> {
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    for (i, k) in keys.iter().enumerate() {
        match groups.iter_mut().find(|(g, _)| g == k) {
            Some((_, v)) => v.push(i),
            None => groups.push((k.clone(), vec![i])),
        }
    }
    groups
}

/// Each cluster becomes a small row-major grid with ⌈√size⌉ rows; clusters
/// sit side by side, separated by `cluster_gap`. No edges are planned and
/// every existing edge among the members is hidden.
pub fn layout_cluster(keys: &[String], anchor: &Pose, cfg: &LayoutConfig) -> Placement {
    let n = keys.len();
    let mut local = vec![LocalPose::default(); n];
    let mut x0 = 0.0;
    for (_, members) in cluster_partition(keys) {
        let size = members.len();
        let rows = (size as f64).sqrt().ceil() as usize;
        let cols = size.div_ceil(rows);
        for (j, &m) in members.iter().enumerate() {
            let (r, c) = (j / cols, j % cols);
            local[m] = LocalPose::at(x0 + c as f64 * cfg.step_x(), -(r as f64) * cfg.step_y());
        }
        x0 += cols as f64 * cfg.step_x() - cfg.gap + cfg.cluster_gap;
    }
    Placement {
        poses: place(&local, anchor),
        folded: vec![false; n],
        edges: Vec::new(),
        policy: EdgePolicy::HideAll,
    }
}

/// Kept members form a linear run; every maximal run of non-kept members
/// collapses into bars stacked under the kept member before it (under the
/// anchor for a leading run). The execution chain is untouched.
pub fn layout_skip_fold(keep: &[bool], anchor: &Pose, cfg: &LayoutConfig) -> Placement {
    let n = keep.len();
    let mut local = vec![LocalPose::default(); n];
    let mut folded = vec![false; n];
    let mut column = 0usize;
    let mut kept_seen = 0usize;
    let mut stack = Vec::<usize>::new();
    for i in 0..n {
        if keep[i] {
            column = kept_seen;
            kept_seen += 1;
            local[i] = LocalPose::at(column as f64 * cfg.step_x(), 0.0);
        } else {
            if stack.len() <= column {
                stack.resize(column + 1, 0);
            }
            let j = stack[column];
            stack[column] += 1;
            folded[i] = true;
            let y = -cfg.cell_height / 2.0 - (j as f64 + 0.5) * cfg.fold_bar_height;
            local[i] = LocalPose::at(column as f64 * cfg.step_x(), y);
        }
    }
    Placement {
        poses: place(&local, anchor),
        folded,
        edges: chain(n),
        policy: EdgePolicy::Replace,
    }
}

/// Head at the anchor; the rest stacked behind it in member order, each one
/// `pile_offset` further down and away. Edges among pile members are hidden.
pub fn layout_skip_pile(
    n: usize,
    head: usize,
    anchor: &Pose,
    cfg: &LayoutConfig,
) -> Result<Placement> {
    if head >= n {
        return Err(Error::Param("pile head is not a member".into()));
    }
    let [dy, ddepth] = cfg.pile_offset;
    let mut local = vec![LocalPose::default(); n];
    let order = std::iter::once(head).chain((0..n).filter(|i| *i != head));
    for (j, m) in order.enumerate() {
        local[m] = LocalPose {
            x: 0.0,
            y: j as f64 * dy,
            depth: j as f64 * ddepth,
            yaw: 0.0,
        };
    }
    let edges = (1..n)
        .map(|i| PlannedEdge {
            from: i - 1,
            to: i,
            visible: false,
            is_skip: false,
        })
        .collect();
    Ok(Placement {
        poses: place(&local, anchor),
        folded: vec![false; n],
        edges,
        policy: EdgePolicy::Replace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    const TOL: f64 = 1e-9;

    fn cfg() -> LayoutConfig {
        LayoutConfig::default()
    }

    fn xy(p: &Pose) -> (f64, f64, f64) {
        (p.position.x, p.position.y, p.position.z)
    }

    fn close(a: (f64, f64, f64), b: (f64, f64, f64)) -> bool {
        (a.0 - b.0).abs() < TOL && (a.1 - b.1).abs() < TOL && (a.2 - b.2).abs() < TOL
    }

    #[test]
    fn linear_spacing() {
        let p = layout_linear_linear(3, &Pose::identity(), &cfg());
        let xs: Vec<f64> = p.poses.iter().map(|p| p.position.x).collect();
        for (x, want) in xs.iter().zip([0.0, 0.45, 0.90]) {
            assert!((x - want).abs() < TOL);
        }
        assert_eq!(p.edges.len(), 2);
        let single = layout_linear_linear(1, &Pose::identity(), &cfg());
        assert!(single.edges.is_empty());
        assert!(close(xy(&single.poses[0]), (0.0, 0.0, 0.0)));
    }

    #[test]
    fn linear_rotated_anchor_keeps_spacing() {
        let anchor = Pose::new(Point::origin(), PI / 2.0);
        let p = layout_linear_linear(3, &anchor, &cfg());
        for w in p.poses.windows(2) {
            assert!(((w[1].position - w[0].position).norm() - 0.45).abs() < TOL);
        }
        // viewer-right at yaw π/2 is −z
        assert!(close(xy(&p.poses[1]), (0.0, 0.0, -0.45)));
    }

    #[test]
    fn grid_row_major_example() {
        let p = layout_grid(6, 2, Orientation::Horizontal, &Pose::identity(), &cfg()).unwrap();
        let rows: Vec<usize> = (0..6)
            .map(|i| grid_cell(i, 6, 2, Orientation::Horizontal).0)
            .collect();
        assert_eq!(rows, vec![0, 0, 0, 1, 1, 1]);
        assert!(close(xy(&p.poses[4]), (0.45, -0.35, 0.0)));
        assert!(p.edges.contains(&PlannedEdge::visible(2, 3)));
    }

    #[test]
    fn grid_column_major_example() {
        let cells: Vec<_> = (0..4)
            .map(|i| grid_cell(i, 4, 2, Orientation::Vertical))
            .collect();
        assert_eq!(cells, vec![(0, 0), (1, 0), (0, 1), (1, 1)]);
    }

    #[test]
    fn grid_rejects_bad_count() {
        assert!(layout_grid(3, 4, Orientation::Horizontal, &Pose::identity(), &cfg()).is_err());
        assert!(layout_grid(3, 1, Orientation::Horizontal, &Pose::identity(), &cfg()).is_err());
    }

    #[test]
    fn tree_example() {
        let p = layout_parallel_tree(
            5,
            &[1, 3],
            Orientation::Horizontal,
            &Pose::identity(),
            &cfg(),
        )
        .unwrap();
        let edges: Vec<(usize, usize)> = p.edges.iter().map(|e| (e.from, e.to)).collect();
        assert_eq!(edges, vec![(0, 1), (1, 2), (0, 3), (3, 4)]);
        assert!(close(xy(&p.poses[1]), (0.45, 0.175, 0.0)));
        assert!(close(xy(&p.poses[3]), (0.45, -0.175, 0.0)));
        assert!(close(xy(&p.poses[0]), (0.0, 0.0, 0.0)));
    }

    #[test]
    fn single_branch_tree_matches_linear() {
        let t = layout_parallel_tree(2, &[1], Orientation::Horizontal, &Pose::identity(), &cfg())
            .unwrap();
        let l = layout_linear_linear(2, &Pose::identity(), &cfg());
        assert_eq!(t.poses, l.poses);
    }

    #[test]
    fn tree_parent_as_root_rejected() {
        assert!(
            layout_parallel_tree(3, &[0], Orientation::Horizontal, &Pose::identity(), &cfg())
                .is_err()
        );
    }

    #[test]
    fn loop_four_members() {
        let p = layout_loop_circle(4, &Pose::identity(), &cfg()).unwrap();
        let want = [(0.0, 0.5), (0.5, 0.0), (0.0, -0.5), (-0.5, 0.0)];
        for (pose, (x, y)) in p.poses.iter().zip(want) {
            assert!(close(xy(pose), (x, y, 0.0)), "{pose:?}");
        }
        assert_eq!(p.edges.len(), 4);
        assert!(layout_loop_circle(1, &Pose::identity(), &cfg()).is_err());
    }

    #[test]
    fn loop_closing_edge() {
        let p = layout_loop_circle(8, &Pose::identity(), &cfg()).unwrap();
        assert_eq!(p.edges.len(), 8);
        assert!(p.edges.contains(&PlannedEdge::visible(7, 0)));
    }

    #[test]
    fn cluster_first_appearance_order() {
        let keys: Vec<String> = ["A", "A", "B", "untagged"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let parts = cluster_partition(&keys);
        let sizes: Vec<(String, usize)> = parts.iter().map(|(k, v)| (k.clone(), v.len())).collect();
        assert_eq!(
            sizes,
            vec![("A".into(), 2), ("B".into(), 1), ("untagged".into(), 1)]
        );
    }

    #[test]
    fn single_cluster_equals_grid() {
        let keys = vec!["code".to_string(); 6];
        let c = layout_cluster(&keys, &Pose::identity(), &cfg());
        let g = layout_grid(6, 3, Orientation::Horizontal, &Pose::identity(), &cfg()).unwrap();
        assert_eq!(c.poses, g.poses);
        assert!(c.edges.is_empty());
        assert_eq!(c.policy, EdgePolicy::HideAll);
    }

    #[test]
    fn fold_example() {
        let keep = [true, false, false, false, true];
        let p = layout_skip_fold(&keep, &Pose::identity(), &cfg());
        assert_eq!(p.folded, vec![false, true, true, true, false]);
        assert!((p.poses[0].position.x).abs() < TOL);
        assert!((p.poses[4].position.x - 0.45).abs() < TOL);
        for i in 1..4 {
            assert!(p.poses[i].position.x.abs() < TOL);
        }
        // bars touch each other and the kept cell above them
        let bottom = p.poses[3].position.y - 0.025;
        assert!((0.15 - bottom - (0.3 + 3.0 * 0.05)).abs() < TOL);
        assert_eq!(p.edges.len(), 4);
    }

    #[test]
    fn fold_keep_all_is_linear() {
        let p = layout_skip_fold(&[true; 4], &Pose::identity(), &cfg());
        assert_eq!(
            p.poses,
            layout_linear_linear(4, &Pose::identity(), &cfg()).poses
        );
    }

    #[test]
    fn pile_offsets() {
        let p = layout_skip_pile(3, 0, &Pose::identity(), &cfg()).unwrap();
        // depth grows away from the viewer: −z at yaw 0
        assert!(close(xy(&p.poses[1]), (0.0, -0.02, -0.01)));
        assert!(close(xy(&p.poses[2]), (0.0, -0.04, -0.02)));
        assert!(p.poses.iter().all(|q| q.position.x == 0.0));
        assert!(p.edges.iter().all(|e| !e.visible));
        let one = layout_skip_pile(1, 0, &Pose::identity(), &cfg()).unwrap();
        assert!(close(xy(&one.poses[0]), (0.0, 0.0, 0.0)));
    }
}
