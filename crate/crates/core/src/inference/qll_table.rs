//! Simulated qLL-S critical values; regenerate with the
//! `qll_critical_values` example (100000 draws, T = 500, seed 20240917).

/// `(k_z, [q_0.90, q_0.95, q_0.99])` for one included instrument.
pub const QLL_CRITICAL_VALUES: &[(usize, [f64; 3])] = &[
    (2, [14.1272, 15.7235, 19.2461]),
    (3, [20.6389, 22.5489, 26.5476]),
    (4, [27.0447, 29.1726, 33.7183]),
    (5, [33.2261, 35.6112, 40.6111]),
    (6, [39.3691, 41.8999, 47.1535]),
    (7, [45.4154, 48.1897, 53.7663]),
    (8, [51.4824, 54.3372, 60.1210]),
    (9, [57.4751, 60.4955, 66.6936]),
    (10, [63.3592, 66.4934, 72.7921]),
    (11, [69.3036, 72.6335, 79.2741]),
    (12, [75.2414, 78.7548, 85.6857]),
    (13, [81.1432, 84.8098, 91.8934]),
    (14, [86.9667, 90.5988, 97.8678]),
    (15, [92.9323, 96.7281, 104.2925]),
    (16, [98.6899, 102.6505, 110.4796]),
];
