use proptest::prelude::*;

use planar_sep::engine::{replay, solve_with, SolveOptions};
use planar_sep::format::{parse_instance, serialize_instance};
use planar_sep::gen::{
    random_instance, random_stacked_triangulation, sparsify, AssignmentMode, InstanceParams,
};
use planar_sep::lists::{check_instance, verify_coloring};
use planar_sep::oracle::palette_bijection;

fn strict() -> SolveOptions {
    SolveOptions {
        check_subinstances: true,
        strict: true,
        base_threshold: 6,
    }
}

fn mode() -> impl Strategy<Value = AssignmentMode> {
    prop_oneof![
        Just(AssignmentMode::PrivateMerge),
        Just(AssignmentMode::Palette)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangulations_are_maximal(n in 3usize..60, seed: u64) {
        let g = random_stacked_triangulation(n, seed).unwrap();
        prop_assert!(g.validate().is_ok());
        prop_assert_eq!(g.edge_count(), 3 * n - 6);
        prop_assert!(g.trace_faces().iter().all(|f| f.len() == 3));
    }

    #[test]
    fn deletions_keep_the_embedding(n in 4usize..40, m in 0usize..30, seed: u64) {
        let g = random_stacked_triangulation(n, seed).unwrap();
        let h = sparsify(&g, m.min(g.edge_count() - n + 1), seed ^ 1).unwrap();
        prop_assert!(h.validate().is_ok());
        prop_assert!(h.is_connected());
        let faces = h.trace_faces().len();
        prop_assert_eq!(h.vertex_count() + faces, h.edge_count() + 2);
        for v in h.vertices().take(3) {
            prop_assert!(h.delete_vertex(v).unwrap().validate().is_ok());
        }
    }

    #[test]
    fn generated_instances_are_valid(n in 5usize..30, m in 0usize..10, mode in mode(), seed: u64) {
        let inst = random_instance(InstanceParams { n, sparsify: m % (2 * n - 4), mode }, seed).unwrap();
        prop_assert!(check_instance(&inst).is_empty());
        let text = serialize_instance(&inst);
        prop_assert_eq!(serialize_instance(&parse_instance(&text).unwrap()), text);
    }

    #[test]
    fn engine_colorings_verify_and_replay(n in 5usize..30, m in 0usize..10, mode in mode(), seed: u64) {
        let inst = random_instance(InstanceParams { n, sparsify: m % (2 * n - 4), mode }, seed).unwrap();
        let (phi, trace) = solve_with(&inst, &strict()).unwrap();
        prop_assert!(verify_coloring(&inst.graph, &inst.lists, &phi));
        prop_assert_eq!(trace.fallbacks(), 0);
        prop_assert_eq!(replay(&inst, &trace).unwrap(), phi);
    }

    #[test]
    fn colorings_survive_palette_bijections(n in 5usize..25, seed: u64, sigma_seed: u64) {
        let inst = random_instance(InstanceParams { n, sparsify: 0, mode: AssignmentMode::Palette }, seed).unwrap();
        let (phi, _) = solve_with(&inst, &strict()).unwrap();
        let sigma = palette_bijection(&inst.lists, sigma_seed);
        prop_assert!(verify_coloring(&inst.graph, &inst.lists.recolor(&sigma), &phi.recolor(&sigma)));
    }
}
