#pragma once

#include "error.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qcwb {

enum class Smoothness { Continuous, Smooth, Step };

/// A scalar function applied to Hermitian matrices through their spectrum.
struct RealFunction {
	std::string name;
	std::function<double(double)> eval;
	Smoothness smoothness = Smoothness::Continuous;
	// f(0) = 0 is required for relation-language use; clamp01 and step_half
	// satisfy it but are not C0 on R\{0}, so they are flagged unital-only.
	bool unital_only = false;
	std::optional<double> theta;
	std::optional<double> ramp_width;

	double operator()(double t) const { return eval(t); }
	bool vanishes_at_zero() const { return eval(0.0) == 0.0; }
};

namespace cutoff {

inline double sigma(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

/// Smooth step: 0 for u <= 0, 1 for u >= 1, C-infinity in between.
inline double smooth_step(double u) {
	if (u <= 0.0) return 0.0;
	if (u >= 1.0) return 1.0;
	const double a = sigma(u);
	const double b = sigma(1.0 - u);
	return a / (a + b);
}

} // namespace cutoff

inline RealFunction positive_part() {
	return {"pos", [](double t) { return t > 0.0 ? t : 0.0; }, Smoothness::Continuous, false, {}, {}};
}

inline RealFunction negative_part() {
	return {"neg", [](double t) { return t < 0.0 ? -t : 0.0; }, Smoothness::Continuous, false, {}, {}};
}

inline RealFunction clamp01() {
	return {"clamp01", [](double t) { return std::max(std::min(t, 1.0), 0.0); }, Smoothness::Continuous, true, {}, {}};
}

/// Spectral step at 1/2: 0 below, 1 at and above.
inline RealFunction step_half() {
	return {"step_half", [](double t) { return t >= 0.5 ? 1.0 : 0.0; }, Smoothness::Step, true, {}, {}};
}

inline RealFunction sqrt0() {
	return {"sqrt0", [](double t) { return std::sqrt(std::max(t, 0.0)); }, Smoothness::Continuous, false, {}, {}};
}

inline RealFunction square() {
	return {"square", [](double t) { return t * t; }, Smoothness::Smooth, false, {}, {}};
}

/// g+ : zero on t <= 0, equal to t from theta/2 on, t * smooth_step in between,
/// so that t - theta/2 <= g+(t) <= t for t >= 0.
inline RealFunction make_gplus(double theta) {
	if (!(theta > 0.0)) throw Error(ErrorKind::ValidationError, "gplus needs theta > 0");
	const double half = theta / 2.0;
	RealFunction f{"gplus",
	               [half](double t) {
		               if (t <= 0.0) return 0.0;
		               if (t >= half) return t;
		               return t * cutoff::smooth_step(t / half);
	               },
	               Smoothness::Smooth, false, theta, {}};
	return f;
}

inline RealFunction make_gminus(double theta) {
	RealFunction g = make_gplus(theta);
	auto plus = g.eval;
	g.name = "gminus";
	g.eval = [plus](double t) { return plus(-t); };
	return g;
}

/// q+ : zero on t <= 0, one from ramp_width on. With ramp_width <= theta^2/4,
/// sqrt(t - t^2) (1 - q+(t)^2) <= theta/2 on [0, 1].
inline RealFunction make_qplus(double theta, double ramp_width) {
	if (!(theta > 0.0) || !(ramp_width > 0.0))
		throw Error(ErrorKind::ValidationError, "qplus needs theta > 0 and ramp_width > 0");
	if (ramp_width > theta * theta / 4.0 * (1.0 + 1e-12))
		throw Error(ErrorKind::ValidationError, "qplus needs ramp_width <= theta^2/4");
	RealFunction f{"qplus",
	               [ramp_width](double t) {
		               if (t <= 0.0) return 0.0;
		               if (t >= ramp_width) return 1.0;
		               return cutoff::smooth_step(t / ramp_width);
	               },
	               Smoothness::Smooth, false, theta, ramp_width};
	return f;
}

inline RealFunction make_qminus(double theta, double ramp_width) {
	RealFunction q = make_qplus(theta, ramp_width);
	auto plus = q.eval;
	q.name = "qminus";
	q.eval = [plus](double t) { return plus(-t); };
	return q;
}

/// Named functions available to the relation language. Immutable once built.
class FunctionRegistry {
public:
	FunctionRegistry() = default;

	void add(RealFunction f) {
		auto name = f.name;
		functions_.insert_or_assign(std::move(name), std::move(f));
	}

	const RealFunction* find(const std::string& name) const {
		auto it = functions_.find(name);
		return it == functions_.end() ? nullptr : &it->second;
	}

	std::vector<std::string> names() const {
		std::vector<std::string> out;
		for (const auto& [name, f] : functions_) out.push_back(name);
		return out;
	}

	/// pos, neg, clamp01, step_half, sqrt0, gplus, gminus, qplus, qminus.
	/// The parametrized cutoffs are instantiated at (theta, ramp_width).
	static std::shared_ptr<const FunctionRegistry> standard(double theta = 0.05,
	                                                        std::optional<double> ramp_width = std::nullopt) {
		const double ramp = ramp_width.value_or(theta * theta / 4.0);
		auto reg = std::make_shared<FunctionRegistry>();
		reg->add(positive_part());
		reg->add(negative_part());
		reg->add(clamp01());
		reg->add(step_half());
		reg->add(sqrt0());
		reg->add(make_gplus(theta));
		reg->add(make_gminus(theta));
		reg->add(make_qplus(theta, ramp));
		reg->add(make_qminus(theta, ramp));
		return reg;
	}

private:
	std::map<std::string, RealFunction> functions_;
};

} // namespace qcwb
