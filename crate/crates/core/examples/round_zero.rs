//! The first fuzzy round on the reference deployment: clusters, elected
//! heads with their rule-base inputs, and relay assignments.

use wsn_fuzzy::network::formation_cost;
use wsn_fuzzy::protocol::fuzzy::relay_path;
use wsn_fuzzy::protocol::FuzzyProtocol;
use wsn_fuzzy::rules::FuzzySystem;
use wsn_fuzzy::SimConfig;

fn main() {
    let cfg = SimConfig::default();
    let mut net = cfg.build_network().unwrap();
    formation_cost(&mut net);
    net.take_round_debits();

    let system = FuzzySystem::new(&cfg.fuzzy, cfg.heterogeneity.energies.max()).unwrap();
    let protocol = FuzzyProtocol::new(system, cfg.clusters, cfg.compression_ratio);
    let mut rng = cfg.protocol_rng();
    let plan = protocol.plan_round(&net, &mut rng).unwrap();
    let d0 = net.radio.d0();

    for (c, head) in plan.heads.iter().enumerate() {
        let Some(head) = *head else { continue };
        let e = plan.election.iter().find(|e| e.id == head).unwrap();
        let path = relay_path(head, &plan.relays.map);
        println!(
            "cluster {c}: {:>2} nodes, head {head:>2} ({}) battery {:.3} J, centrality {:5.1} m, to BS {:5.1} m, score {:5.2}{}",
            plan.layout.sizes()[c],
            net.nodes[head as usize].class.name(),
            e.battery,
            e.centrality,
            e.dist_bs,
            e.score,
            if path.is_empty() { String::new() } else { format!(", relays via {path:?}") },
        );
    }

    let out = protocol.execute_plan(&plan, &mut net);
    let spent = net.take_round_debits();
    println!("\nd0 = {d0:.3} m, round energy {:.4} J", spent.total());
    for (cat, j) in spent.iter().filter(|(_, j)| *j > 0.0) {
        println!("  {:<14}{j:.5} J", cat.name());
    }
    println!("relays used: {:?}", out.relays);
}
