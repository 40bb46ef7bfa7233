#pragma once

// Randomized property suite behind `qcwb check`. Each item records the worst
// value observed against its bound.

#include "boundary.hpp"
#include "functions.hpp"
#include "linalg.hpp"
#include "qc_model.hpp"
#include "random.hpp"
#include "relations.hpp"
#include "smoothing.hpp"
#include "structures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace qcwb {

struct CheckItem {
	std::string label;
	double value = 0.0;
	double bound = 0.0;
	bool passed = false;
	std::string error; // set when the check threw
};

struct CheckConfig {
	std::uint64_t seed = 1;
	int trials = 100;
	std::size_t grid = 32;
	ToleranceProfile tol{};
};

/// Equivalence ratios for one triple: ratio_high = |T^2 - T| /
/// (5 sum of low-level residuals), ratio_low = max low-level residual /
/// (|T^2 - T| + |T^* - T| + |hk|). Both are <= 1 when |h|, |x|, |k| <= 1.
struct EquivalenceRatios {
	double ratio_high = 0.0;
	double ratio_low = 0.0;
};

inline EquivalenceRatios equivalence_ratios(const QcTriple& t, const ToleranceProfile& tol = {}) {
	const ResidualReport lo = low_level_residuals(t, tol);
	const ResidualReport hi = high_level_residuals(t, tol);
	auto ratio = [](double num, double den) {
		if (den > 0.0) return num / den;
		return num > 0.0 ? INFINITY : 0.0;
	};
	return {ratio(hi.at(labels::idempotent), 5.0 * lo.sum()), ratio(lo.max(), hi.sum())};
}

inline QcTriple random_contraction_triple(std::size_t n, Rng& rng) {
	return {with_norm(random_gaussian(n, rng), uniform(rng)), with_norm(random_gaussian(n, rng), uniform(rng)),
	        with_norm(random_gaussian(n, rng), uniform(rng))};
}

/// Canonical generators plus a Hermitian perturbation of h, k and a general
/// perturbation of x, each of norm `size`.
inline QcTriple perturbed_canonical(std::size_t m, double size, Rng& rng) {
	QcTriple t = canonical_generators(m);
	const std::size_t n = t.dim();
	t.h += with_norm(random_hermitian(n, rng), size);
	t.k += with_norm(random_hermitian(n, rng), size);
	t.x += with_norm(random_gaussian(n, rng), size);
	return t;
}

class CheckSuite {
public:
	explicit CheckSuite(CheckConfig cfg) : cfg_(cfg), rng_(cfg.seed) {}

	const std::vector<CheckItem>& run() {
		items_.clear();
		const auto& tol = cfg_.tol;
		Rng& rng = rng_;

		add("eig.reconstruction", 1e-12, [&] {
			double worst = 0.0;
			for (int i = 0; i < cfg_.trials / 10 + 1; ++i) {
				const Matrix h = random_hermitian(8, rng);
				const EigenSystem es = herm_eig(h, tol);
				worst = std::max(worst, op_norm(es.synthesize(es.eigenvalues) - h, tol) / std::max(1.0, op_norm(h, tol)));
			}
			return worst;
		});
		add("func_calc.multiplicative", 1e-10, [&] {
			double worst = 0.0;
			for (int i = 0; i < cfg_.trials / 10 + 1; ++i) {
				const Matrix h = with_norm(random_hermitian(6, rng), 1.0);
				auto f = [](double t) { return t * t - 0.5 * t; };
				auto g = [](double t) { return t * t * t + 1.0; };
				const Matrix lhs = func_calc(h, [&](double t) { return f(t) * g(t); }, tol);
				worst = std::max(worst, op_norm(lhs - func_calc(h, f, tol) * func_calc(h, g, tol), tol));
			}
			return worst;
		});
		add("unitary_exp.unitary", 1e-11, [&] {
			double worst = 0.0;
			for (int i = 0; i < cfg_.trials / 10 + 1; ++i) {
				const Matrix u = unitary_exp(random_hermitian(6, rng), tol);
				worst = std::max(worst, op_norm(u * u.adjoint() - Matrix::identity(6), tol));
			}
			return worst;
		});
		add("nearest_projection.exact", 1e-12, [&] {
			double worst = 0.0;
			for (int i = 0; i < cfg_.trials / 10 + 1; ++i) {
				std::vector<double> spec(6);
				for (auto& l : spec) l = uniform(rng) < 0.5 ? uniform(rng, 0.0, 0.2) : uniform(rng, 0.8, 1.0);
				const Matrix p = nearest_projection(random_hermitian_with_spectrum(spec, rng), tol);
				worst = std::max(worst, std::max((p * p - p).max_abs(), (p - p.adjoint()).max_abs()));
			}
			return worst;
		});

		const QcTriple gen = canonical_generators(cfg_.grid);
		add("canonical.low_level", 1e-12, [&] { return low_level_residuals(gen, tol).max(); });
		add("canonical.high_level", 1e-12, [&] { return high_level_residuals(gen, tol).max(); });
		add("canonical.trace", 1e-9, [&] {
			return std::abs(t_matrix(gen).trace() - cplx(2.0 * static_cast<double>(cfg_.grid)));
		});
		add("canonical.positivity", 1e-12, [&] { return positivity_defect(gen); });
		add("equivalence.high_from_low", 1.0, [&] {
			double worst = 0.0;
			for (int i = 0; i < cfg_.trials; ++i) worst = std::max(worst, equivalence_ratios(random_contraction_triple(3, rng), tol).ratio_high);
			return worst;
		});
		add("equivalence.low_from_high", 1.0, [&] {
			double worst = 0.0;
			for (int i = 0; i < cfg_.trials; ++i) worst = std::max(worst, equivalence_ratios(random_contraction_triple(3, rng), tol).ratio_low);
			return worst;
		});
		add("p_relations.corner_inequality", 1e-10, [&] {
			double worst = 0.0;
			for (int i = 0; i < cfg_.trials / 10 + 1; ++i) {
				const QcTriple t = conjugate(canonical_generators(4), random_unitary(8, rng));
				const Matrix d = hermitian_part(t.x.adjoint() * t.x - (t.h - t.h * t.h));
				worst = std::max(worst, herm_eig(d, tol).max());
			}
			return worst;
		});
		add("factor_x.reconstruction", 1e-9, [&] {
			double worst = 0.0;
			for (int i = 0; i < cfg_.trials / 10 + 1; ++i) {
				QcTriple t = conjugate(canonical_generators(3), random_unitary(6, rng));
				t.h = hermitian_part(t.h);
				t.k = hermitian_part(t.k);
				const Matrix k8 = frac_power(t.k, 0.125, tol), h8 = frac_power(t.h, 0.125, tol);
				t.x = with_norm(k8 * random_gaussian(6, rng) * h8, 0.25);
				worst = std::max(worst, factor_x(t, tol).reconstruction);
			}
			return worst;
		});

		const CornerSystem sys = random_corner_system(6, rng);
		for (double s : {0.0, 0.25, 0.37, 0.75, 1.0}) {
			const std::string tag = "theta[" + format_s(s) + "]";
			add(tag + ".homomorphism", 1e-10, [&] {
				const auto r = theta_is_homomorphism(sys, s, 20, rng, tol);
				return std::max(r.multiplicative, r.adjoint);
			});
			add(tag + ".isometry", 1e-10, [&] { return theta_is_homomorphism(sys, s, 10, rng, tol).isometry; });
		}
		add("theta.endpoints", 1e-14, [&] {
			const Corners c = random_corners(sys, rng);
			const std::size_t n = sys.dim();
			Matrix e0(2 * n), e1(2 * n);
			e0.set_block(0, 0, c.sum());
			e1.set_block(0, 0, c.x11);
			e1.set_block(0, n, c.x12);
			e1.set_block(n, 0, c.x21);
			e1.set_block(n, n, c.x22);
			return std::max((homotopy_theta(sys, c, 0.0, tol) - e0).max_abs(), (homotopy_theta(sys, c, 1.0, tol) - e1).max_abs());
		});
		add("rho.multiplicative", 1e-12, [&] {
			double worst = 0.0;
			for (int i = 0; i < cfg_.trials / 10 + 1; ++i) {
				const LinkingElement e{cplx(uniform(rng), uniform(rng)), cplx(uniform(rng), uniform(rng)), random_corners(sys, rng)};
				const LinkingElement f{cplx(uniform(rng), uniform(rng)), cplx(uniform(rng), uniform(rng)), random_corners(sys, rng)};
				const auto [a, b] = rho(sys, linking_product(e, f), tol);
				const auto [ea, eb] = rho(sys, e, tol);
				const auto [fa, fb] = rho(sys, f, tol);
				worst = std::max({worst, std::abs(a - ea * fa), std::abs(b - eb * fb)});
			}
			return worst;
		});
		add("corner_ideal.equality", 1e-10, [&] {
			const BlockAlgebra alg{{2, 3}};
			double worst = 0.0;
			for (int i = 0; i < cfg_.trials; ++i) {
				const Matrix h = direct_sum(random_positive(2, rng), random_positive(3, rng));
				const Matrix k = direct_sum(random_positive(2, rng), random_positive(3, rng));
				const auto cmp = corner_ideal_equality(h, k, alg, {false, true}, 1e-10, tol);
				worst = std::max(worst, cmp.equal ? cmp.gap : INFINITY);
			}
			return worst;
		});

		add("cutoff.gplus_bound", 0.0, [&] {
			const RealFunction g = make_gplus(0.05);
			double worst = -INFINITY;
			for (int i = 0; i <= 10000; ++i) {
				const double t = i / 10000.0;
				worst = std::max({worst, (t - 0.025) - g(t), g(t) - t});
			}
			return std::max(worst, 0.0);
		});
		add("cutoff.qplus_bound", 0.025, [&] {
			const RealFunction q = make_qplus(0.05, 0.05 * 0.05 / 4.0);
			double worst = 0.0;
			for (int i = 0; i <= 10000; ++i) {
				const double t = i / 10000.0;
				worst = std::max(worst, std::sqrt(std::max(t - t * t, 0.0)) * (1.0 - q(t) * q(t)));
			}
			return worst;
		});
		add("cutoff.support_orthogonality", 1e-12, [&] {
			double worst = 0.0;
			for (int i = 0; i < cfg_.trials / 10 + 1; ++i) {
				const Matrix s = random_hermitian(6, rng);
				worst = std::max(worst, op_norm(func_calc(s, make_gplus(0.1), tol) * func_calc(s, make_gminus(0.1), tol), tol));
			}
			return worst;
		});
		add("smoothing.perturbed_canonical", 1e-10, [&] {
			const QcTriple t = perturbed_canonical(4, 1e-3, rng);
			const auto r = auto_theta(t, 0.1, std::nullopt, tol);
			const auto& out = r.result.exact;
			return std::max({r.result.report.output_residuals.max(), op_norm(out.h * out.k, tol), positivity_defect(out)});
		});

		const rel::RelationSet qc = rel::parse(rel::qc_relations_source);
		add("relations.agree_with_model", 1e-13, [&] {
			double worst = 0.0;
			for (int i = 0; i < cfg_.trials / 10 + 1; ++i) {
				const QcTriple t = perturbed_canonical(3, uniform(rng, 0.0, 0.1), rng);
				const ResidualReport a = rel::residuals(qc, rel::env_of(t), tol);
				const ResidualReport b = low_level_residuals(t, tol);
				for (std::size_t j = 0; j < a.size(); ++j)
					worst = std::max(worst, std::abs(a.entries()[j].second - b.entries()[j].second));
			}
			return worst;
		});

		add("boundary.eval_at_one_winding", 0.0, [&] {
			const BoundaryResult r = boundary_map(scenarios::eval_at_one(), {}, tol);
			return std::abs(std::abs(static_cast<double>(r.winding)) - 1.0);
		});
		add("boundary.zero_winding", 0.0, [&] {
			return std::abs(static_cast<double>(boundary_map(scenarios::zero(), {}, tol).winding));
		});
		return items_;
	}

	bool all_passed() const {
		return std::all_of(items_.begin(), items_.end(), [](const CheckItem& c) { return c.passed; });
	}

	const std::vector<CheckItem>& items() const { return items_; }

	/// |h| > 1, h < 0, and similarly for k, and |x| > 1/2, as one number.
	static double positivity_defect(const QcTriple& t, const ToleranceProfile& tol = {}) {
		const EigenSystem eh = herm_eig(hermitian_part(t.h), tol);
		const EigenSystem ek = herm_eig(hermitian_part(t.k), tol);
		return std::max({0.0, -eh.min(), eh.max() - 1.0, -ek.min(), ek.max() - 1.0, op_norm(t.x, tol) - 0.5});
	}

private:
	void add(std::string label, double bound, const std::function<double()>& f) {
		CheckItem item{std::move(label), 0.0, bound, false, {}};
		try {
			item.value = f();
			item.passed = item.value <= bound;
		} catch (const std::exception& e) {
			item.value = INFINITY;
			item.error = e.what();
		}
		items_.push_back(std::move(item));
	}

	static std::string format_s(double s) {
		char buf[16];
		std::snprintf(buf, sizeof buf, "%g", s);
		return buf;
	}

	static Matrix random_positive(std::size_t n, Rng& rng) {
		const Matrix g = random_gaussian(n, rng);
		return hermitian_part(g * g.adjoint());
	}

	/// h, k with complementary supports of sizes 2 and 3 inside M_n (n >= 5
	/// leaves a kernel shared by both).
	static CornerSystem random_corner_system(std::size_t n, Rng& rng) {
		std::vector<double> hs(n, 0.0), ks(n, 0.0);
		hs[0] = uniform(rng, 0.2, 1.0);
		hs[1] = uniform(rng, 0.2, 1.0);
		ks[2] = uniform(rng, 0.2, 1.0);
		ks[3] = uniform(rng, 0.2, 1.0);
		ks[4] = uniform(rng, 0.2, 1.0);
		const Matrix u = random_unitary(n, rng);
		return make_corner_system(hermitian_part(u * Matrix::diag(hs) * u.adjoint()),
		                          hermitian_part(u * Matrix::diag(ks) * u.adjoint()));
	}

	CheckConfig cfg_;
	Rng rng_;
	std::vector<CheckItem> items_;
};

} // namespace qcwb
