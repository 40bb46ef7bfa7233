// Perturbs the canonical generators, smooths them back to an exact
// representation and prints what moved.

#include "qcwb/qcwb.hpp"

#include <cstdio>

int main(int argc, char** argv) {
	using namespace qcwb;
	const double size = argc > 1 ? std::atof(argv[1]) : 1e-3;
	Rng rng(1);
	const QcTriple t = perturbed_canonical(8, size, rng);
	std::printf("input: dim %zu, perturbation %.1e, max low-level residual %.3e\n", t.dim(), size,
	            low_level_residuals(t).max());
	try {
		const AutoThetaResult a = auto_theta(t, 0.1);
		const SmoothingReport& r = a.result.report;
		std::printf("theta %.4g after %d attempt(s), ramp width %.3e\n", r.theta, a.attempts, r.ramp_width);
		std::printf("spectrum of s: [%.4f, %.4f], smallest |eigenvalue| %.3e\n", r.s_spectrum.min, r.s_spectrum.max,
		            r.s_spectrum.smallest_abs);
		std::printf("|T2^2 - T2| = %.3e, |P - T2| = %.3e\n", r.intermediate_defect, r.projection_displacement);
		std::printf("output residual %.3e, distances h %.3e, x %.3e, k %.3e, |hk| %.3e\n", r.output_residuals.max(), r.dist_h,
		            r.dist_x, r.dist_k, op_norm(a.result.exact.h * a.result.exact.k));
		std::printf("success: %s\n", r.success ? "yes" : "no");
		return r.success ? 0 : 1;
	} catch (const NoWorkableTheta& e) {
		std::printf("no workable theta: %s\n", e.what());
		return 1;
	}
}
