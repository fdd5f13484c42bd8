use dispersat::cnf::{brute_opt, enumerate_solutions, parse_dimacs};
use dispersat::dispersion::{gonzalez_min, sum_disperse, ExactOracle, Flavor, PpzSumOracle};
use dispersat::fwht::exact_diameter;
use dispersat::ppz::OracleConfig;
use dispersat::subset::{diverse_min, Graph, HittingSetSystem};
use dispersat::{Assignment, DispersionObjective, WeightConstraint};

const TEXT: &str = "c small instance\np cnf 6 4\n1 2 -3 0\n-1 4 0\n3 5 6 0\n-2 -6 0\n";

#[test]
fn diameter_is_invariant_under_rotation() {
    let f = parse_dimacs(TEXT).unwrap();
    let (a, b) = exact_diameter(&f).unwrap();
    for i in [0u64, 5, 42, 63] {
        let z = Assignment::from_index(6, i);
        let (c, d) = exact_diameter(&f.rotate(&z).unwrap()).unwrap();
        assert_eq!(a.distance(&b), c.distance(&d));
    }
}

#[test]
fn drivers_return_solutions_of_the_parsed_formula() {
    let f = parse_dimacs(TEXT).unwrap();
    let run = gonzalez_min(&f, 4, &mut ExactOracle::new(&f, Flavor::Min).unwrap()).unwrap();
    assert_eq!(run.solutions.len(), 4);
    let cfg = OracleConfig::seeded(3).with_effort(0.25);
    let run = sum_disperse(&f, 4, &mut PpzSumOracle::new(&f, cfg, true)).unwrap();
    let omega = enumerate_solutions(&f).unwrap();
    assert!(run.solutions.members().iter().all(|z| omega.contains(z)));
    assert!(run.solutions.is_distinct());
    let opt = brute_opt(&f, 4, DispersionObjective::SumPdDistinct, WeightConstraint::None).unwrap();
    assert!(run.solutions.members().len() == 4 && opt.value > 0);
}

#[test]
fn diverse_vertex_covers_of_a_cycle() {
    let g = Graph::parse("5 5\n1 2\n2 3\n3 4\n4 5\n5 1\n").unwrap();
    let run = diverse_min(&HittingSetSystem::vertex_cover(&g), 3, 0.5, &OracleConfig::seeded(1)).unwrap();
    assert_eq!(run.solutions.len(), 3);
    for z in run.solutions.members() {
        assert!(g.edges().iter().all(|&(u, v)| z.get(u) || z.get(v)));
        // the minimum cover of C5 has 3 vertices, so the cap is ⌊1.5·3⌋
        assert!(z.weight() <= 4);
    }
}
