//! Reference environments embedded in the library.

use crate::environment::Environment;

pub const TRAVEL_JOINT: &str = include_str!("../fixtures/travel_joint.json");
pub const TRAVEL_FOREST: &str = include_str!("../fixtures/travel_forest.json");
pub const TRAVEL_VIRTUAL: &str = include_str!("../fixtures/travel_virtual.json");
pub const COMPONENTS: &str = include_str!("../fixtures/components.json");
pub const TIE_NODES: &str = include_str!("../fixtures/tie_nodes.json");
pub const TIE_EDGES: &str = include_str!("../fixtures/tie_edges.json");
pub const BACKLINK_1: &str = include_str!("../fixtures/backlink_1.json");
pub const BACKLINK_2: &str = include_str!("../fixtures/backlink_2.json");
pub const BACKLINK_3: &str = include_str!("../fixtures/backlink_3.json");
pub const TEN_PAGES: &str = include_str!("../fixtures/ten_pages.json");

/// Every embedded environment by name.
pub const ALL: [(&str, &str); 10] = [
    ("travel_joint", TRAVEL_JOINT),
    ("travel_forest", TRAVEL_FOREST),
    ("travel_virtual", TRAVEL_VIRTUAL),
    ("components", COMPONENTS),
    ("tie_nodes", TIE_NODES),
    ("tie_edges", TIE_EDGES),
    ("backlink_1", BACKLINK_1),
    ("backlink_2", BACKLINK_2),
    ("backlink_3", BACKLINK_3),
    ("ten_pages", TEN_PAGES),
];

/// Directed links among four pages, column = source page: a 4-cycle
/// 1 -> 4 -> 3 -> 2 -> 1 plus an extra link 2 -> 4.
pub const CYCLE_LINKS: [[u64; 4]; 4] = [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 1, 0, 0]];

pub fn cycle_links() -> Vec<Vec<u64>> {
    CYCLE_LINKS.iter().map(|r| r.to_vec()).collect()
}

pub fn by_name(name: &str) -> Option<Environment> {
    ALL.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Environment::from_json(text).expect("embedded fixture is valid"))
}

macro_rules! loaders {
    ($($name:ident => $text:ident),* $(,)?) => {
        $(pub fn $name() -> Environment {
            Environment::from_json($text).expect("embedded fixture is valid")
        })*
    };
}

loaders! {
    travel_joint => TRAVEL_JOINT,
    travel_forest => TRAVEL_FOREST,
    travel_virtual => TRAVEL_VIRTUAL,
    components => COMPONENTS,
    tie_nodes => TIE_NODES,
    tie_edges => TIE_EDGES,
    backlink_1 => BACKLINK_1,
    backlink_2 => BACKLINK_2,
    backlink_3 => BACKLINK_3,
    ten_pages => TEN_PAGES,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_loads_and_is_canonical() {
        for (name, text) in ALL {
            let env = by_name(name).unwrap();
            assert_eq!(env.to_json(), text, "{name} is not in canonical form");
        }
        assert!(by_name("nope").is_none());
    }
}
