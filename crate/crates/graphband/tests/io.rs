use std::fs;

use graphband::config::{ExperimentConfig, GraphName};
use graphband::experiment::{graph_source, pool_rng, run_experiment};
use graphband::io::{load_edge_list, load_pool, save_pool, POOL_INDEX};
use graphband::Error;
use graphband_core::graph::{build_pool, gen_random, gen_star, FeedbackGraph, GraphKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Two cycles of sizes 4 and 12 with scattered ids.
fn write_two_components(path: &std::path::Path) {
    let mut text = String::from("# two rings\n");
    for i in 0..4 {
        text += &format!("{} {}\n", 1000 + i, 1000 + (i + 1) % 4);
    }
    for i in 0..12 {
        text += &format!("{}\t{}\n", 7 * i, 7 * ((i + 1) % 12));
    }
    fs::write(path, text).unwrap();
}

#[test]
fn edge_list_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.txt");
    write_two_components(&p);
    let e = load_edge_list(&p).unwrap();
    assert_eq!((e.node_count, e.edges.len()), (16, 16));
    let mut sizes = e.component_sizes();
    sizes.sort_unstable();
    sizes.dedup();
    assert_eq!(sizes, vec![4, 12]);

    assert!(matches!(load_edge_list(dir.path().join("missing.txt")), Err(Error::Io { .. })));
    fs::write(&p, "").unwrap();
    assert!(matches!(load_edge_list(&p), Err(Error::Core(_))));
}

#[test]
fn pool_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pool: Vec<FeedbackGraph> = (0..5).map(|_| gen_random(9, 0.2, &mut rng).unwrap()).collect();
    pool.push(gen_star(9).unwrap());
    pool.push(FeedbackGraph::from_directed_edges(9, [(0, 1), (4, 2)]).unwrap());
    let dir = tempfile::tempdir().unwrap();
    save_pool(dir.path(), &pool).unwrap();
    assert_eq!(load_pool(dir.path()).unwrap(), pool);
    let index = fs::read_to_string(dir.path().join(POOL_INDEX)).unwrap();
    assert_eq!(index.lines().next(), Some("subgraph_000.txt 9"));
}

#[test]
fn pool_errors_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join(POOL_INDEX), "a.txt 3\n").unwrap();
    fs::write(dir.path().join("a.txt"), "0 1\n1 5\n").unwrap();
    match load_pool(dir.path()) {
        Err(Error::Parse { path, line: 2, .. }) => assert!(path.ends_with("a.txt")),
        other => panic!("{other:?}"),
    }
    fs::write(dir.path().join(POOL_INDEX), "a.txt\n").unwrap();
    assert!(matches!(load_pool(dir.path()), Err(Error::Parse { line: 1, .. })));
    fs::write(dir.path().join(POOL_INDEX), "# nothing\n").unwrap();
    assert!(load_pool(dir.path()).is_err());
}

#[test]
fn pools_from_edges_and_from_disk_agree() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.txt");
    write_two_components(&edges);
    let cfg = ExperimentConfig {
        horizon: 32,
        repeats: 2,
        d: 3,
        class_size: 5,
        action_count: 6,
        graph: GraphName::Pool,
        edges: Some(edges.clone()),
        pool_size: 4,
        seed: 11,
        ..ExperimentConfig::default()
    };
    let GraphKind::Pool(direct) = graph_source(&cfg).unwrap().kind else { panic!() };
    assert_eq!(direct.len(), 4);
    assert!(direct.iter().all(|g| g.node_count() == 6));

    let list = load_edge_list(&edges).unwrap();
    let GraphKind::Pool(built) = build_pool(&list, 4, 6, &mut pool_rng(11)).unwrap().kind else { panic!() };
    assert_eq!(built, direct);
    let saved = dir.path().join("pool");
    save_pool(&saved, &built).unwrap();
    let from_disk = ExperimentConfig { edges: None, pool_dir: Some(saved), ..cfg.clone() };
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&from_disk).unwrap();
    assert_eq!(a.outcomes[0].curves, b.outcomes[0].curves);
    assert_eq!(a.label, "Flixster");

    let too_big = ExperimentConfig { action_count: 13, ..cfg };
    assert!(graph_source(&too_big).is_err());
}
