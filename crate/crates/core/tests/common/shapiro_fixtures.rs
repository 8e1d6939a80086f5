// Frozen reference values for the statistical routines. Inputs are fixed
// vectors (rounded to 6 decimal places); expected W and p values come from
// an established statistical implementation and are pinned at 1e-4.

pub struct ShapiroFixture {
    pub name: &'static str,
    pub sample: &'static [f64],
    pub w: f64,
    pub p: f64,
}

pub const SHAPIRO_FIXTURES: &[ShapiroFixture] = &[
    ShapiroFixture { name: "n3_small", sample: &[2.1, -0.7, 0.3], w: 0.9735099337748346, p: 0.6877667027774272 },
    ShapiroFixture { name: "n5_mixed", sample: &[0.47, -1.21, 3.85, 0.02, -0.66], w: 0.840733701657885, p: 0.16696017136282587 },
    ShapiroFixture { name: "n7_skewed", sample: &[1.996238, 0.807698, 1.1033, 0.11697, 2.392584, 2.579442, 0.565543], w: 0.924318119892119, p: 0.5036777336052112 },
    ShapiroFixture { name: "n11_normal", sample: &[4.702177, 1.768453, 2.581346, 5.298936, 6.158459, 4.395754, 8.724199, 4.776155, 2.531405, 5.464404, 2.746146], w: 0.9342878716664709, p: 0.45583780658748285 },
    ShapiroFixture { name: "n12_normal", sample: &[0.23434, 1.315572, 0.126526, 1.190495, -0.375338, 0.909861, -0.404857, 1.627022, 0.832006, -0.251519, -0.391224, 0.445739], w: 0.9144596512001582, p: 0.243265691304223 },
    ShapiroFixture { name: "n20_lognormal", sample: &[2.040148, 0.390724, 0.921291, 0.374384, 0.680639, 2.839132, 1.314628, 2.036741, 0.599287, 0.656059, 3.10736, 0.623636, 1.591794, 2.633087, 0.48845, 2.490397, 4.949512, 1.648178, 2.956861, 0.466246], w: 0.8785942517557251, p: 0.016693534222324218 },
    ShapiroFixture { name: "n30_uniform", sample: &[5.988252, 0.394587, 5.868394, 6.011923, -1.641937, -0.488201, 4.702853, -0.881092, 0.734384, 2.517019, 2.76882, 4.245112, 2.474907, 6.407258, -0.964833, 4.231423, 1.721614, -0.633938, 6.066386, 0.427089, 3.270274, 5.518795, 3.429778, -2.624883, 2.978478, 5.956969, 6.730403, 2.719709, -1.220126, 6.125269], w: 0.9258540445188165, p: 0.038148264910352295 },
    ShapiroFixture { name: "n50_normal", sample: &[9.968479, 10.027365, 9.94316, 10.417656, 10.386338, 10.508785, 10.259429, 10.065561, 9.877078, 9.882674, 10.74991, 9.821651, 10.117559, 9.756173, 9.681366, 9.878415, 9.631017, 10.574057, 9.79015, 10.555502, 10.002689, 10.36342, 10.176406, 9.543808, 10.162083, 8.916884, 9.569501, 9.77095, 10.226509, 9.903695, 10.718239, 10.305938, 10.86851, 10.359258, 9.834914, 10.475683, 9.097686, 9.472023, 9.4516, 10.427258, 10.603218, 10.163337, 11.029982, 9.596719, 9.027773, 9.75027, 10.664783, 11.505549, 9.752393, 9.955043], w: 0.987542368393194, p: 0.8729005401750818 },
    ShapiroFixture { name: "n100_normal", sample: &[0.190846, 0.833877, 0.469766, 1.359377, -0.213793, 0.404228, 2.306603, 0.039103, -0.708039, 0.738954, -1.281243, 0.579394, 0.569717, 0.828489, 2.013894, 1.187013, -1.139788, -0.851522, -0.781613, 0.266257, -0.561565, 0.174028, 1.14644, -0.058392, -0.525282, 0.36855, 1.785518, 1.161422, -1.585304, -1.550409, -1.269521, -1.343041, -0.659887, -0.51419, 0.540446, -0.183497, 1.741576, -0.512133, 0.17037, -2.290239, -1.202554, 2.018011, 0.848374, -0.533057, 0.176779, -0.977681, -1.176397, -0.970284, -0.13968, 1.054476, -1.095296, -0.076661, -1.067845, 0.310129, 1.215209, -2.019834, 0.444608, -0.472303, -1.686491, -1.538279, 0.666342, 1.988781, -1.433799, -1.746146, -0.312364, 0.164311, -1.224491, 0.494902, -1.337123, -0.050501, -0.054657, -1.531553, 0.701924, -0.291078, 0.929076, 0.473261, 0.16821, -1.198492, 0.608296, -0.271923, -0.155063, -0.209687, 1.412306, 2.131454, 1.33433, 0.396049, 0.396227, 1.414153, -1.527644, -2.263233, 0.220046, 0.063392, -1.355478, 0.568321, 0.480885, -0.739475, -0.736188, -3.525685, -0.377524, 2.790224], w: 0.9923132235896676, p: 0.8434283169761285 },
    ShapiroFixture { name: "n35_bimodal", sample: &[-2.423663, -1.562608, -2.439595, -1.331717, -1.523247, -2.271247, -2.153836, -1.84873, -2.256381, -2.349054, -1.953974, -1.375888, -1.85205, -1.726703, -1.900975, -1.917055, -2.206116, 1.770359, 1.578357, 1.410545, 2.285208, 1.353826, 1.581687, 2.323503, 2.805797, 2.703074, 2.047766, 1.941468, 1.979058, 2.01258, 1.808255, 1.654688, 2.248297, 2.218953, 2.502334], w: 0.7950276888893137, p: 1.6326523859287935e-05 },
];
