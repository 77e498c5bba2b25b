use std::sync::OnceLock;

use fsi_core::fem::{distribute_dofs, DofMap, ElementPair};
use fsi_core::mesh::{build_fsi2_mesh, Mesh, Subdomain};
use fsi_core::partition::{dof_ownership, imbalance, partition_mesh, PartitionStrategy};
use proptest::prelude::*;

fn level1() -> &'static (Mesh, DofMap) {
    static CASE: OnceLock<(Mesh, DofMap)> = OnceLock::new();
    CASE.get_or_init(|| {
        let mesh = build_fsi2_mesh(1).unwrap();
        let dofmap = distribute_dofs(&mesh, ElementPair::new(2, 2)).unwrap();
        (mesh, dofmap)
    })
}

fn strategy() -> impl Strategy<Value = PartitionStrategy> {
    prop_oneof![
        Just(PartitionStrategy::Shared),
        Just(PartitionStrategy::Split),
        Just(PartitionStrategy::Default),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ownership_partitions_cells_and_dofs(n in 1usize..=6, s in strategy()) {
        let (mesh, dofmap) = level1();
        let p = partition_mesh(mesh, n, s).unwrap();
        let cells: usize = (0..n).map(|r| p.owned_cells(r).len()).sum();
        prop_assert_eq!(cells, mesh.n_cells());
        prop_assert!((0..n).all(|r| !p.owned_cells(r).is_empty()));

        let own = dof_ownership(&p, dofmap);
        let mut count = vec![0u8; dofmap.n_dofs()];
        for list in &own.owned {
            for &d in list {
                count[d] += 1;
            }
        }
        prop_assert!(count.iter().all(|&c| c == 1));
        for (r, list) in own.owned.iter().enumerate() {
            for d in list {
                prop_assert!(own.relevant[r].binary_search(d).is_ok());
            }
        }
        let rep = imbalance(mesh, &p, dofmap);
        prop_assert_eq!(rep.dofs_per_rank.iter().sum::<usize>(), dofmap.n_dofs());
        prop_assert!(rep.ratio >= 1.0 - 1e-12);
    }

    #[test]
    fn ghosts_are_exactly_the_vertex_neighbors(n in 1usize..=5, s in strategy()) {
        let (mesh, _) = level1();
        let p = partition_mesh(mesh, n, s).unwrap();
        for rank in 0..n {
            let owned = p.owned_cells(rank);
            let expected: Vec<usize> = (0..mesh.n_cells())
                .filter(|&c| p.owner[c] != rank)
                .filter(|&c| {
                    owned.iter().any(|&o| mesh.cell_vertices(c).iter().any(|v| mesh.cell_vertices(o).contains(v)))
                })
                .collect();
            prop_assert_eq!(&p.ghosts[rank], &expected);
        }
    }

    #[test]
    fn split_ranks_are_pure(n in 2usize..=6) {
        let (mesh, _) = level1();
        let p = partition_mesh(mesh, n, PartitionStrategy::Split).unwrap();
        for rank in 0..n {
            let subs: Vec<Subdomain> = p.owned_cells(rank).iter().map(|&c| mesh.subdomain(c)).collect();
            prop_assert!(subs.iter().all(|&s| s == subs[0]));
        }
    }
}

#[test]
fn single_rank_strategies_agree() {
    let (mesh, _) = level1();
    let parts: Vec<Vec<usize>> = [PartitionStrategy::Shared, PartitionStrategy::Split, PartitionStrategy::Default]
        .iter()
        .map(|&s| partition_mesh(mesh, 1, s).unwrap().owner)
        .collect();
    assert_eq!(parts[0], parts[1]);
    assert_eq!(parts[1], parts[2]);
}

#[test]
fn shared_ranks_hold_both_subdomains() {
    let (mesh, _) = level1();
    let p = partition_mesh(mesh, 4, PartitionStrategy::Shared).unwrap();
    for rank in 0..4 {
        let cells = p.owned_cells(rank);
        assert!(cells.iter().any(|&c| mesh.subdomain(c) == Subdomain::Fluid));
        assert!(cells.iter().any(|&c| mesh.subdomain(c) == Subdomain::Solid));
    }
}
