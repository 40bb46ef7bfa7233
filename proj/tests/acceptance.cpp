// Acceptance run: one PASS/FAIL line per criterion, each with its runtime bound.

#include "qcwb/qcwb.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace qcwb;

namespace {

struct Outcome {
	bool passed = false;
	std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double bound_s, const std::function<Outcome()>& body) {
	const auto start = std::chrono::steady_clock::now();
	Outcome o;
	try {
		o = body();
	} catch (const std::exception& e) {
		o = {false, std::string("unexpected exception: ") + e.what()};
	}
	const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
	const bool in_time = secs < bound_s;
	const bool ok = o.passed && in_time;
	if (!ok) ++failures;
	std::printf("%s [%d] %s (%.3f s, bound %.0f s%s): %s\n", ok ? "PASS" : "FAIL", id, name, secs, bound_s,
	            in_time ? "" : ", over time", o.detail.c_str());
	std::fflush(stdout);
}

template <class... A>
std::string fmt(const char* f, A... a) {
	char buf[512];
	std::snprintf(buf, sizeof buf, f, a...);
	return buf;
}

// Canonical generators (m = 8) plus a fixed-direction perturbation rescaled so
// that the largest low-level residual is `target`.
QcTriple perturbed_to_residual(double target, Rng& rng) {
	const QcTriple base = canonical_generators(8);
	const Matrix dh = with_norm(random_hermitian(16, rng), 1.0);
	const Matrix dk = with_norm(random_hermitian(16, rng), 1.0);
	const Matrix dx = with_norm(random_gaussian(16, rng), 1.0);
	auto at = [&](double s) {
		QcTriple t = base;
		t.h += s * dh;
		t.k += s * dk;
		t.x += s * dx;
		return t;
	};
	double lo = 0.0, hi = 1e-2;
	while (low_level_residuals(at(hi)).max() < target) hi *= 2.0;
	for (int i = 0; i < 60; ++i) {
		const double mid = 0.5 * (lo + hi);
		(low_level_residuals(at(mid)).max() < target ? lo : hi) = mid;
	}
	return at(hi);
}

double scalar_displacement(const std::vector<double>& spectrum) {
	double d = 0.0;
	for (double l : spectrum) d = std::max(d, std::abs((l >= 0.5 ? 1.0 : 0.0) - l));
	return d;
}

} // namespace

int main() {
	criterion(1, "canonical-generator exactness", 1.0, [] {
		const std::size_t m = 32;
		const QcTriple g = canonical_generators(m);
		const double low = low_level_residuals(g).max();
		const Matrix t = t_matrix(g);
		const double proj = (t * t - t).max_abs() + (t - t.adjoint()).max_abs();
		// Per fiber, T11 = diag(1 - t, 1) and T22 = diag(0, t).
		double oracle = 0.0;
		for (std::size_t i = 1; i <= m; ++i) {
			const double ti = static_cast<double>(i) / static_cast<double>(m);
			oracle += (1.0 - ti) + 1.0 + 0.0 + ti;
		}
		const double tr = t.trace().real();
		const bool ok = low <= 1e-12 && proj <= 1e-12 && std::abs(tr - oracle) <= 1e-9 && std::abs(oracle - 2.0 * m) < 1e-12;
		return Outcome{ok, fmt("max low-level residual %.2e, |T^2 - T| %.2e, tr T = %.12g (oracle %.12g)", low, proj, tr, oracle)};
	});

	criterion(2, "relation-presentation equivalence", 30.0, [] {
		Rng rng(2002);
		int false_orderings = 0;
		double worst_high = 0.0, worst_low = 0.0;
		for (int i = 0; i < 500; ++i) {
			const EquivalenceRatios r = equivalence_ratios(random_contraction_triple(3, rng));
			worst_high = std::max(worst_high, r.ratio_high);
			worst_low = std::max(worst_low, r.ratio_low);
			if (r.ratio_high > 1.0 + 1e-12 || r.ratio_low > 1.0 + 1e-12) ++false_orderings;
		}
		return Outcome{false_orderings == 0, fmt("500 triples, false orderings %d, worst |T^2-T|/(5 sum L) = %.4f, "
		                                         "worst max L/(|T^2-T| + |T - T^*| + |hk|) = %.4f",
		                                         false_orderings, worst_high, worst_low)};
	});

	criterion(3, "smoothing", 60.0, [] {
		int successes = 0;
		bool all_bounds = true;
		double worst_res = 0.0, worst_dist = 0.0, worst_defect = 0.0;
		for (int seed = 0; seed < 50; ++seed) {
			Rng rng(3000 + seed);
			const QcTriple t = perturbed_to_residual(1e-3, rng);
			try {
				const AutoThetaResult a = auto_theta(t, 0.1);
				const SmoothingReport& rep = a.result.report;
				if (!rep.success) continue;
				++successes;
				worst_res = std::max(worst_res, rep.output_residuals.max());
				worst_dist = std::max(worst_dist, rep.max_distance());
				worst_defect = std::max(worst_defect, rep.intermediate_defect);
				all_bounds = all_bounds && rep.output_residuals.max() <= 1e-10 && rep.max_distance() <= 0.1 &&
				             rep.intermediate_defect <= 0.05 + 1e-6;
			} catch (const Error&) {
			}
		}
		return Outcome{successes >= 49 && all_bounds,
		               fmt("%d/50 succeeded; worst output residual %.2e, distance %.2e, |T2^2 - T2| %.2e", successes,
		                   worst_res, worst_dist, worst_defect)};
	});

	criterion(4, "near-projection", 10.0, [] {
		Rng rng(4004);
		double worst_idem = 0.0, worst_excess = -INFINITY;
		for (int i = 0; i < 200; ++i) {
			std::vector<double> spec(6);
			for (double& l : spec) l = uniform(rng) < 0.5 ? uniform(rng, 0.0, 0.2) : uniform(rng, 0.8, 1.0);
			const Matrix p = random_hermitian_with_spectrum(spec, rng);
			const Matrix q = nearest_projection(p);
			worst_idem = std::max(worst_idem, std::max((q * q - q).max_abs(), (q - q.adjoint()).max_abs()));
			worst_excess = std::max(worst_excess, op_norm(q - p) - scalar_displacement(spec));
		}
		int mismatches = 0, thrown = 0;
		for (int i = 0; i < 200; ++i) {
			std::vector<double> spec(4);
			for (double& l : spec) l = uniform(rng, -0.5, 1.5);
			double eta = 0.0;
			for (double l : spec) eta = std::max(eta, std::abs(l * l - l));
			if (std::abs(eta - 0.25) < 1e-9) continue;
			bool threw = false;
			try {
				nearest_projection(random_hermitian_with_spectrum(spec, rng));
			} catch (const Error& e) {
				threw = e.kind() == ErrorKind::GapTooSmall;
			}
			thrown += threw;
			if (threw != (eta >= 0.25)) ++mismatches;
		}
		return Outcome{worst_idem <= 1e-12 && worst_excess <= 1e-10 && mismatches == 0,
		               fmt("idempotency %.2e, distance minus scalar oracle %.2e; GapTooSmall %d/200, mismatches %d",
		                   worst_idem, worst_excess, thrown, mismatches)};
	});

	criterion(5, "boundary map", 30.0, [] {
		BoundaryOptions opt;
		opt.grid = 64;
		const BoundaryResult e = boundary_map(scenarios::eval_at_one(), opt);
		const long z = boundary_map(scenarios::zero(), opt).winding;
		const long d = boundary_map(scenarios::doubled(), opt).winding;
		BoundaryOptions fine = opt;
		fine.grid = 128;
		const long e128 = boundary_map(scenarios::eval_at_one(), fine).winding;
		BoundaryOptions cos = opt;
		cos.y_lift = cosine_y;
		const long ecos = boundary_map(scenarios::eval_at_one(), cos).winding;
		const bool ok = std::abs(e.winding) == 1 && e.unitarity_defect <= 1e-8 && e.endpoint_defect <= 1e-8 && z == 0 &&
		                d == 2 * e.winding && e128 == e.winding && ecos == e.winding;
		return Outcome{ok, fmt("eval-at-one winding %ld (sign %+ld, counterclockwise positive), unitarity %.2e, endpoint "
		                       "%.2e; zero %ld; doubled %ld; m=128 %ld; cosine y-lift %ld",
		                       e.winding, e.winding, e.unitarity_defect, e.endpoint_defect, z, d, e128, ecos)};
	});

	criterion(6, "exact lift versus obstruction", 10.0, [] {
		const ExactLift lift = exact_projection_lift(scenarios::matched_endpoints(), {64, 2});
		bool obstructed = false;
		try {
			exact_projection_lift(scenarios::eval_at_one(), {64, 2});
		} catch (const Error& e) {
			obstructed = e.kind() == ErrorKind::NoSpectralGap;
		}
		const long w = boundary_map(scenarios::eval_at_one()).winding;
		return Outcome{lift.max_residual <= 1e-10 && obstructed && w != 0,
		               fmt("matched-endpoints residual %.2e (gap %.3f); eval-at-one %s with winding %ld", lift.max_residual,
		                   lift.min_gap, obstructed ? "raises NoSpectralGap" : "lifts", w)};
	});

	criterion(7, "corner homotopy, linking and corner ideals", 30.0, [] {
		Rng rng(7007);
		std::vector<double> hs{0.9, 0.4, 0.0, 0.0, 0.0, 0.0}, ks{0.0, 0.0, 0.7, 0.3, 1.0, 0.0};
		const Matrix u = random_unitary(6, rng);
		const CornerSystem sys = make_corner_system(hermitian_part(u * Matrix::diag(hs) * u.adjoint()),
		                                            hermitian_part(u * Matrix::diag(ks) * u.adjoint()));
		double worst_theta = 0.0;
		for (double s : {0.0, 0.25, 0.37, 0.75, 1.0}) {
			const auto r = theta_is_homomorphism(sys, s, 50, rng);
			worst_theta = std::max({worst_theta, r.multiplicative, r.adjoint});
		}
		double worst_endpoint = 0.0;
		for (int i = 0; i < 50; ++i) {
			const Corners c = random_corners(sys, rng);
			Matrix e0(12), e1(12);
			e0.set_block(0, 0, c.x11 + c.x12 + c.x21 + c.x22);
			e1.set_block(0, 0, c.x11);
			e1.set_block(0, 6, c.x12);
			e1.set_block(6, 0, c.x21);
			e1.set_block(6, 6, c.x22);
			worst_endpoint = std::max({worst_endpoint, (homotopy_theta(sys, c, 0.0) - e0).max_abs(),
			                           (homotopy_theta(sys, c, 1.0) - e1).max_abs()});
		}
		double worst_rho = 0.0;
		for (int i = 0; i < 50; ++i) {
			const LinkingElement e{cplx(uniform(rng), uniform(rng)), cplx(uniform(rng), uniform(rng)), random_corners(sys, rng)};
			const LinkingElement f{cplx(uniform(rng), uniform(rng)), cplx(uniform(rng), uniform(rng)), random_corners(sys, rng)};
			const auto [a, b] = rho(sys, linking_product(e, f));
			worst_rho = std::max({worst_rho, std::abs(a - e.alpha * f.alpha), std::abs(b - e.beta * f.beta)});
		}
		const BlockAlgebra alg{{2, 3}};
		double worst_gap = 0.0;
		bool all_equal = true;
		for (int i = 0; i < 100; ++i) {
			auto pos = [&](std::size_t n) {
				const Matrix g = random_gaussian(n, rng);
				return hermitian_part(g * g.adjoint());
			};
			const Matrix h = direct_sum(pos(2), pos(3)), k = direct_sum(pos(2), pos(3));
			const auto cmp = corner_ideal_equality(h, k, alg, {false, true});
			worst_gap = std::max(worst_gap, cmp.gap);
			all_equal = all_equal && cmp.equal;
		}
		const bool ok = worst_theta <= 1e-10 && worst_endpoint <= 1e-12 && worst_rho <= 1e-12 && worst_gap <= 1e-10 && all_equal;
		return Outcome{ok, fmt("theta residual %.2e, endpoint formulas %.2e, rho %.2e, corner-ideal gap %.2e", worst_theta,
		                       worst_endpoint, worst_rho, worst_gap)};
	});

	criterion(8, "relation language", 60.0, [] {
		const rel::RelationSet rs = rel::parse(io::read_text(QCWB_DATA_DIR "/qc_relations.rel"));
		double worst_agree = 0.0;
		for (std::size_t m : {1u, 8u, 32u}) {
			const QcTriple g = canonical_generators(m);
			const auto a = rel::residuals(rs, rel::env_of(g));
			const auto b = low_level_residuals(g);
			for (std::size_t i = 0; i < b.size(); ++i)
				worst_agree = std::max(worst_agree, std::abs(a.entries()[i].second - b.entries()[i].second));
		}
		Rng rng(8008);
		const auto rows = rel::delta_eps_sweep(rs, rel::parse_expr("x'*x - (h - h*h)", rs),
		                                       rel::perturbation_sampler(rs, rel::env_of(canonical_generators(4)), {"h", "k"}),
		                                       {1e-2, 1e-3, 1e-4, 1e-5}, 20, rng);
		bool monotone = true;
		std::ostringstream table;
		for (std::size_t i = 0; i < rows.size(); ++i) {
			if (i > 0 && rows[i].max_consequence > rows[i - 1].max_consequence) monotone = false;
			table << (i ? ", " : "") << fmt("%.0e -> %.3e", rows[i].delta, rows[i].max_consequence);
		}
		return Outcome{worst_agree <= 1e-13 && monotone && rows.size() == 4,
		               fmt("agreement with model %.2e; sweep ", worst_agree) + table.str()};
	});

	std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
	return failures ? 1 : 0;
}
