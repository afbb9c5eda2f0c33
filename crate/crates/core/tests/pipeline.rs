use seqclust::harness::{generate, GeneratorClass, GeneratorSpec};
use seqclust::incremental::{run_stream, AlgorithmKind, Ordering};
use seqclust::metricspace::{format_space, parse_space, SpaceFormat};
use seqclust::structures::{
    compute_cores, induce_clustering, is_nice, is_perfect, is_refinement, CenterSet, Clustering,
};

#[test]
fn generated_files_round_trip() {
    let inst = generate(&GeneratorSpec::new(GeneratorClass::Nice, 4, 50, 3, 8)).unwrap();
    let text = format_space(&inst.space, SpaceFormat::Coordinates).unwrap();
    let back = parse_space(&text, SpaceFormat::Coordinates, false).unwrap();
    assert_eq!(back, inst.space);
    assert_eq!(Clustering::parse(&inst.planted.to_text()).unwrap(), inst.planted);
    let matrix = format_space(&inst.space, SpaceFormat::Matrix).unwrap();
    let m = parse_space(&matrix, SpaceFormat::Matrix, true).unwrap();
    assert!(is_nice(&m, &inst.planted));
}

#[test]
fn seq_nn_detects_perfect_clusterings_across_dimensions() {
    for dim in [1, 3, 8] {
        let inst = generate(&GeneratorSpec::new(GeneratorClass::Perfect, 4, 80, dim, dim as u64)).unwrap();
        assert!(is_perfect(&inst.space, &inst.planted));
        for s in 0..10 {
            let mut alg = AlgorithmKind::SeqNearestNeighbour.build(4, 0).unwrap();
            let rec = run_stream(alg.as_mut(), &inst.space, &Ordering::random(80, s), 0).unwrap();
            let induced = induce_clustering(&inst.space, &rec.final_centers).unwrap();
            assert!(induced.clustering.same_partition(&inst.planted));
        }
    }
}

#[test]
fn every_algorithm_respects_its_bound() {
    let inst = generate(&GeneratorSpec::new(GeneratorClass::Nice, 3, 40, 2, 21)).unwrap();
    for kind in AlgorithmKind::ALL {
        let mut alg = kind.build(3, 4).unwrap();
        let rec = run_stream(alg.as_mut(), &inst.space, &Ordering::random(40, 9), 1).unwrap();
        assert_eq!(rec.snapshots.len(), 40);
        assert!(rec.snapshots.iter().all(|s| s.centers.len() <= alg.bound()), "{kind}");
    }
}

#[test]
fn extra_centers_final_model_refines_nice_clustering() {
    for seed in 0..20 {
        let inst = generate(&GeneratorSpec::new(GeneratorClass::Nice, 3, 30, 2, 100 + seed)).unwrap();
        let mut alg = AlgorithmKind::ExtraCenters.build(3, 0).unwrap();
        let rec = run_stream(alg.as_mut(), &inst.space, &Ordering::random(30, seed), 0).unwrap();
        let items = rec.final_centers.items().unwrap();
        let mut seen = [false; 3];
        for &c in items {
            seen[inst.planted.label(c)] = true;
        }
        assert!(seen.iter().all(|&s| s));
        let induced = induce_clustering(&inst.space, &rec.final_centers).unwrap();
        assert!(is_refinement(&induced.clustering, &inst.planted).unwrap());
    }
}

#[test]
fn core_points_attract_their_whole_cluster() {
    let inst = generate(&GeneratorSpec::new(GeneratorClass::Core, 3, 45, 2, 13).with_beta(0.2)).unwrap();
    let cores = compute_cores(&inst.space, &inst.planted);
    // One core point per cluster induces exactly the planted clustering.
    let reps: Vec<usize> = cores.cores.iter().map(|c| c[0]).collect();
    let induced = induce_clustering(&inst.space, &CenterSet::Items(reps)).unwrap();
    assert!(induced.clustering.same_partition(&inst.planted));
    assert!(!is_nice(&inst.space, &inst.planted));
}
