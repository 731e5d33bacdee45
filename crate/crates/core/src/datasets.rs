//! Bundled datasets.

use crate::graph::Graph;
use crate::partition::Partition;
use crate::real::Real;

/// Zachary's karate club: 34 members, 78 unweighted friendship ties
/// (Zachary 1977). Node names are the customary 1-based member numbers;
/// node "1" is the instructor, node "34" the club president.
pub const KARATE_EDGES: &str = "\
# members 1..34 declared first so indices match member numbers
1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n11\n12\n13\n14\n15\n16\n17\n\
18\n19\n20\n21\n22\n23\n24\n25\n26\n27\n28\n29\n30\n31\n32\n33\n34\n\
1 2\n1 3\n1 4\n1 5\n1 6\n1 7\n1 8\n1 9\n1 11\n1 12\n1 13\n1 14\n1 18\n1 20\n1 22\n1 32\n\
2 3\n2 4\n2 8\n2 14\n2 18\n2 20\n2 22\n2 31\n\
3 4\n3 8\n3 9\n3 10\n3 14\n3 28\n3 29\n3 33\n\
4 8\n4 13\n4 14\n\
5 7\n5 11\n\
6 7\n6 11\n6 17\n\
7 17\n\
9 31\n9 33\n9 34\n\
10 34\n\
14 34\n\
15 33\n15 34\n\
16 33\n16 34\n\
19 33\n19 34\n\
20 34\n\
21 33\n21 34\n\
23 33\n23 34\n\
24 26\n24 28\n24 30\n24 33\n24 34\n\
25 26\n25 28\n25 32\n\
26 32\n\
27 30\n27 34\n\
28 34\n\
29 32\n29 34\n\
30 33\n30 34\n\
31 33\n31 34\n\
32 33\n32 34\n\
33 34\n";

/// Index of the instructor (node "1") in [`karate`].
pub const KARATE_INSTRUCTOR: usize = 0;
/// Index of the president (node "34") in [`karate`].
pub const KARATE_PRESIDENT: usize = 33;

pub fn karate<T: Real>() -> Graph<T> {
    crate::io::parse_edge_list(KARATE_EDGES).expect("bundled karate data is valid")
}

/// The two factions after the club's split: cell 0 joined the instructor
/// (18 members), cell 1 stayed with the president (16 members).
pub fn karate_factions() -> Partition {
    // members who followed the instructor, by 1-based number
    const INSTRUCTOR_SIDE: [usize; 18] =
        [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 17, 18, 20, 22];
    let cell_of: Vec<usize> = (1..=34)
        .map(|member| usize::from(!INSTRUCTOR_SIDE.contains(&member)))
        .collect();
    Partition::new(cell_of).expect("bundled faction labels are valid")
}
