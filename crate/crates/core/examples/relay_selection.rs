//! Relay choice for a far cluster head given four candidate heads with
//! almost equal energy at different hop distances.

use wsn_fuzzy::geometry::Point2D;
use wsn_fuzzy::protocol::fuzzy::{select_relays, HeadInfo};
use wsn_fuzzy::rules::{FuzzyParams, FuzzySystem};
use wsn_fuzzy::RadioParams;

fn main() {
    let system = FuzzySystem::new(&FuzzyParams::default(), 1.5).unwrap();
    let bs = Point2D::new(5.0, 95.0);
    // source head beyond d0 from the BS; candidates placed at the given hop
    // distances on the straight line towards the BS, all within d0 of it
    let source = Point2D::new(95.0, 20.0);
    let toward_bs = {
        let (dx, dy) = (bs.x - source.x, bs.y - source.y);
        let n = dx.hypot(dy);
        (dx / n, dy / n)
    };
    let candidates = [(1, 1.4965, 83.1566), (2, 1.4965, 47.8956), (3, 1.4972, 44.4752), (4, 1.4957, 50.3652)];
    let mut heads = vec![HeadInfo { id: 0, energy: 1.2, position: source }];
    for (id, energy, hop) in candidates {
        let position = Point2D::new(source.x + toward_bs.0 * hop, source.y + toward_bs.1 * hop);
        heads.push(HeadInfo { id, energy, position });
    }

    let sel = select_relays(&heads, bs, &system, &RadioParams::default()).unwrap();
    println!("{:>4} {:>10} {:>10} {:>8}", "head", "energy J", "hop m", "score");
    for s in sel.scores.iter().filter(|s| s.source == 0) {
        let e = heads.iter().find(|h| h.id == s.candidate).unwrap().energy;
        println!("{:>4} {:>10.4} {:>10.4} {:>8.3}", s.candidate, e, s.distance, s.score);
    }
    println!("head 0 relays through head {}", sel.map[&0]);
}
