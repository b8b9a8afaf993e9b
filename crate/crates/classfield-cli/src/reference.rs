//! Published reference data for discriminant −200 at level 3.

pub const DISC: i64 = -200;
pub const LEVEL: i64 = 3;

/// The six reduced forms of discriminant −200.
pub const REDUCED_FORMS: [(i64, i64, i64); 6] = [(1, 0, 50), (2, 0, 25), (3, -2, 17), (3, 2, 17), (6, -4, 9), (6, 4, 9)];

/// Class representatives, labelled 1 to 12.
pub const CLASS_FORMS: [(i64, i64, i64); 12] = [
    (1, 0, 50),
    (2, 0, 25),
    (17, 2, 3),
    (17, -2, 3),
    (11, -8, 6),
    (11, 8, 6),
    (50, 0, 1),
    (25, 0, 2),
    (22, -36, 17),
    (22, 36, 17),
    (25, 30, 11),
    (25, -30, 11),
];

/// Multiplication table on the labels of [`CLASS_FORMS`].
pub const TABLE: [[usize; 12]; 12] = [
    [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
    [2, 1, 12, 11, 10, 9, 8, 7, 6, 5, 4, 3],
    [3, 12, 11, 1, 8, 10, 9, 6, 5, 7, 2, 4],
    [4, 11, 1, 12, 9, 8, 10, 5, 7, 6, 3, 2],
    [5, 10, 8, 9, 12, 1, 11, 4, 2, 3, 6, 7],
    [6, 9, 10, 8, 1, 11, 12, 3, 4, 2, 7, 5],
    [7, 8, 9, 10, 11, 12, 1, 2, 3, 4, 5, 6],
    [8, 7, 6, 5, 4, 3, 2, 1, 12, 11, 10, 9],
    [9, 6, 5, 7, 2, 4, 3, 12, 11, 1, 8, 10],
    [10, 5, 7, 6, 3, 2, 4, 11, 1, 12, 9, 8],
    [11, 4, 2, 3, 6, 7, 5, 10, 8, 9, 12, 1],
    [12, 3, 4, 2, 7, 5, 6, 9, 10, 8, 1, 11],
];

pub const INVARIANT_FACTORS: [u64; 2] = [2, 6];

/// Minimal polynomial of `g_{O,3}(C₀)`, highest degree first.
pub const POLYNOMIAL: [&str; 13] = [
    "1",
    "-19732842623587344380",
    "85622274889372918445313749346",
    "583422788794106041510392970996250100",
    "2412956602599045666947505580865471555967855",
    "4622030004758636935674310042187173142345125210120",
    "5159683938264742220691719229969015883694331066838711900",
    "202375300752001975403428909178152428797277946213173155269640",
    "2017771307025673942770713882875344826204880202806909292959103855",
    "-2883328681523953153105049905288236082276160171409937896788594572300",
    "4487601627619641192200184812721309459195966653602482165478526149968226",
    "-19833699482405442556441925074783039534555541722620",
    "1",
];

/// Discriminants and levels used for cross-checks between the two group models.
pub const BATTERY_DISCS: [i64; 6] = [-15, -20, -24, -56, -71, -200];
pub const BATTERY_LEVELS: [i64; 4] = [1, 2, 3, 4];
