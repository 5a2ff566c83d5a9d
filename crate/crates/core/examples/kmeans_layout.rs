//! Partitions a deployment with k-means and prints cluster sizes, centers
//! and the SSE trace of the Lloyd iterations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wsn_fuzzy::geometry::kmeans;
use wsn_fuzzy::SimConfig;

fn main() {
    let cfg = SimConfig::default();
    let net = cfg.build_network().unwrap();
    let points: Vec<_> = net.nodes.iter().map(|n| (n.id, n.position)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let layout = kmeans(&points, cfg.clusters, &mut rng).unwrap();

    println!("k = {}, converged after {} iterations", layout.k, layout.iterations);
    for (c, (center, size)) in layout.centers.iter().zip(layout.sizes()).enumerate() {
        println!("cluster {c}: {size:>3} nodes around ({:6.2}, {:6.2})", center.x, center.y);
    }
    let trace: Vec<String> = layout.sse_history.iter().map(|s| format!("{s:.1}")).collect();
    println!("SSE per iteration: {}", trace.join(" -> "));
}
