//! Planar geometry and the per-round k-means division.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        euclidean(*self, *other)
    }
}

pub fn euclidean(p: Point2D, q: Point2D) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

fn sq_dist(p: Point2D, q: Point2D) -> f64 {
    let (dx, dy) = (p.x - q.x, p.y - q.y);
    dx * dx + dy * dy
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("k must be between 1 and the number of points ({points}), got {k}")]
    InvalidK { k: usize, points: usize },
    #[error("node {0} is not assigned in this layout")]
    NotAssigned(NodeId),
}

pub const MAX_ITERATIONS: usize = 100;

/// Independent seedings per call; the lowest final SSE is kept.
pub const RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterLayout {
    pub k: usize,
    /// Node ids in ascending order.
    pub ids: Vec<NodeId>,
    /// Cluster index per entry of `ids`.
    pub assignment: Vec<usize>,
    pub centers: Vec<Point2D>,
    pub iterations: usize,
    /// Within-cluster SSE after each center update.
    pub sse_history: Vec<f64>,
}

impl ClusterLayout {
    pub fn cluster_of(&self, id: NodeId) -> Option<usize> {
        self.ids.binary_search(&id).ok().map(|i| self.assignment[i])
    }

    pub fn members(&self, cluster: usize) -> impl Iterator<Item = NodeId> + '_ {
        self.ids
            .iter()
            .zip(&self.assignment)
            .filter(move |(_, c)| **c == cluster)
            .map(|(id, _)| *id)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn sse(&self) -> f64 {
        self.sse_history.last().copied().unwrap_or(0.0)
    }
}

/// Distance from a node to the center of its own cluster.
pub fn centrality(id: NodeId, position: Point2D, layout: &ClusterLayout) -> Result<f64, ClusterError> {
    let c = layout.cluster_of(id).ok_or(ClusterError::NotAssigned(id))?;
    Ok(euclidean(position, layout.centers[c]))
}

/// Within-cluster sum of squared distances for an arbitrary labelling.
pub fn within_sse(points: &[Point2D], labels: &[usize], k: usize) -> f64 {
    let centers = means(points, labels, k, &vec![Point2D::default(); k]);
    points
        .iter()
        .zip(labels)
        .map(|(p, &c)| sq_dist(*p, centers[c]))
        .sum()
}

fn means(points: &[Point2D], labels: &[usize], k: usize, fallback: &[Point2D]) -> Vec<Point2D> {
    let mut acc = vec![(0.0, 0.0, 0usize); k];
    for (p, &c) in points.iter().zip(labels) {
        acc[c].0 += p.x;
        acc[c].1 += p.y;
        acc[c].2 += 1;
    }
    acc.iter()
        .zip(fallback)
        .map(|(&(sx, sy, n), f)| {
            if n == 0 {
                *f
            } else {
                Point2D::new(sx / n as f64, sy / n as f64)
            }
        })
        .collect()
}

fn nearest(p: Point2D, centers: &[Point2D]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centers.iter().enumerate() {
        let d = sq_dist(p, *c);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// k-means++ seeding over points in ascending-id order.
fn seed_centers<R: Rng + ?Sized>(points: &[Point2D], k: usize, rng: &mut R) -> Vec<Point2D> {
    let mut chosen = vec![rng.random_range(0..points.len())];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(*p, points[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            // every point coincides with a chosen center
            let free: Vec<usize> = (0..points.len()).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (w, p) in d2.iter_mut().zip(points) {
            *w = w.min(sq_dist(*p, points[next]));
        }
    }
    chosen.into_iter().map(|i| points[i]).collect()
}

/// Moves the point farthest from its center into each empty cluster, taking
/// only from clusters that keep at least one member.
fn repair_empty(points: &[Point2D], labels: &mut [usize], centers: &mut [Point2D]) {
    let k = centers.len();
    loop {
        let mut sizes = vec![0usize; k];
        for &c in labels.iter() {
            sizes[c] += 1;
        }
        let Some(empty) = sizes.iter().position(|&n| n == 0) else {
            return;
        };
        let mut donor = None;
        let mut far = -1.0;
        for (i, (p, &c)) in points.iter().zip(labels.iter()).enumerate() {
            let d = sq_dist(*p, centers[c]);
            if sizes[c] > 1 && d > far {
                far = d;
                donor = Some(i);
            }
        }
        let donor = donor.expect("k <= n leaves a cluster with two or more members");
        labels[donor] = empty;
        centers[empty] = points[donor];
    }
}

/// Lloyd's algorithm with k-means++ seeding, restarted [`RESTARTS`] times.
/// Points are processed in ascending id order so the result does not depend
/// on input order.
pub fn kmeans<R: Rng + ?Sized>(
    points: &[(NodeId, Point2D)],
    k: usize,
    rng: &mut R,
) -> Result<ClusterLayout, ClusterError> {
    kmeans_restarts(points, k, RESTARTS, rng)
}

/// Like [`kmeans`] with an explicit number of seedings (at least one).
/// Ties in final SSE keep the earliest run.
pub fn kmeans_restarts<R: Rng + ?Sized>(
    points: &[(NodeId, Point2D)],
    k: usize,
    restarts: usize,
    rng: &mut R,
) -> Result<ClusterLayout, ClusterError> {
    if k == 0 || k > points.len() {
        return Err(ClusterError::InvalidK {
            k,
            points: points.len(),
        });
    }
    let mut sorted = points.to_vec();
    sorted.sort_by_key(|(id, _)| *id);
    let ids: Vec<NodeId> = sorted.iter().map(|(id, _)| *id).collect();
    let pts: Vec<Point2D> = sorted.iter().map(|(_, p)| *p).collect();

    let mut best: Option<ClusterLayout> = None;
    for _ in 0..restarts.max(1) {
        let run = lloyd(&ids, &pts, k, rng);
        if best.as_ref().is_none_or(|b| run.sse() < b.sse()) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn lloyd<R: Rng + ?Sized>(ids: &[NodeId], pts: &[Point2D], k: usize, rng: &mut R) -> ClusterLayout {
    let mut centers = seed_centers(pts, k, rng);
    let mut labels: Vec<usize> = Vec::new();
    let mut sse_history = Vec::new();
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let mut next: Vec<usize> = pts.iter().map(|p| nearest(*p, &centers)).collect();
        repair_empty(pts, &mut next, &mut centers);
        if next == labels {
            break;
        }
        labels = next;
        centers = means(pts, &labels, k, &centers);
        iterations += 1;
        sse_history.push(
            pts.iter()
                .zip(&labels)
                .map(|(p, &c)| sq_dist(*p, centers[c]))
                .sum(),
        );
    }
    ClusterLayout {
        k,
        ids: ids.to_vec(),
        assignment: labels,
        centers,
        iterations,
        sse_history,
    }
}
