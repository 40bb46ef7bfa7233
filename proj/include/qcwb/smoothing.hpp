#pragma once

// Turns an approximate representation (h, x, k) of qC into an exact one
// nearby, using smooth cutoffs of s = (h + h^* - k - k^*)/2 and a single
// spectral step at 1/2.

#include "error.hpp"
#include "functions.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "qc_model.hpp"
#include "tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace qcwb {

struct SmoothingParams {
	double epsilon = 0.1;
	double theta = 0.05;
	double ramp_width = 0.05 * 0.05 / 4.0;
	double delta = 0.05; // admissible input residual
	ToleranceProfile tol{};

	/// theta^2/4 ramp and delta = epsilon/2.
	static SmoothingParams for_theta(double epsilon, double theta, std::optional<double> delta = std::nullopt) {
		SmoothingParams p;
		p.epsilon = epsilon;
		p.theta = theta;
		p.ramp_width = theta * theta / 4.0;
		p.delta = delta.value_or(epsilon / 2.0);
		return p;
	}

	void validate() const {
		if (!(epsilon > 0.0 && epsilon < 0.25)) throw Error(ErrorKind::ValidationError, "epsilon must lie in (0, 1/4)");
		if (!(theta > 0.0)) throw Error(ErrorKind::ValidationError, "theta must be positive");
		if (!(ramp_width > 0.0) || ramp_width > theta * theta / 4.0 * (1.0 + 1e-12))
			throw Error(ErrorKind::ValidationError, "ramp_width must lie in (0, theta^2/4]");
		if (!(delta > 0.0)) throw Error(ErrorKind::ValidationError, "delta must be positive");
	}
};

struct SpectrumSummary {
	double min = 0.0;
	double max = 0.0;
	double smallest_abs = 0.0;
};

struct SmoothingReport {
	double epsilon = 0.0;
	double theta = 0.0;
	double ramp_width = 0.0;
	double delta = 0.0;
	ResidualReport input_residuals;
	SpectrumSummary s_spectrum;
	double intermediate_defect = 0.0; // |T2^2 - T2|
	double intermediate_distance = 0.0; // max(|h2 - h|, |k2 - k|, |x2 - x|)
	double projection_displacement = 0.0; // |P - T2|
	ResidualReport output_residuals;
	double dist_h = 0.0;
	double dist_k = 0.0;
	double dist_x = 0.0;
	double corner_defect = 0.0; // how far h-bar, k-bar, x-bar leave the pos/neg corners of s
	bool success = false;

	double max_distance() const { return std::max({dist_h, dist_k, dist_x}); }
};

struct SmoothingResult {
	QcTriple exact;
	SmoothingReport report;
};

/// Raised by auto_theta; remembers why the last attempt failed.
class NoWorkableTheta : public Error {
public:
	NoWorkableTheta(const std::string& what, ErrorKind last)
		: Error(ErrorKind::NoWorkableTheta, what), last_(last) {}

	ErrorKind last_failure() const noexcept { return last_; }

private:
	ErrorKind last_;
};

inline SmoothingResult smooth_representation(const QcTriple& t, const SmoothingParams& p) {
	p.validate();
	t.check_dims();
	const ToleranceProfile& tol = p.tol;

	SmoothingReport rep;
	rep.epsilon = p.epsilon;
	rep.theta = p.theta;
	rep.ramp_width = p.ramp_width;
	rep.delta = p.delta;

	const double nh = op_norm(t.h, tol), nx = op_norm(t.x, tol), nk = op_norm(t.k, tol);
	if (nh > 2.0 || nx > 2.0 || nk > 2.0)
		throw Error(ErrorKind::ResidualTooLarge, "generator norm exceeds 2");
	rep.input_residuals = low_level_residuals(t, tol);
	if (rep.input_residuals.max() > p.delta)
		throw Error(ErrorKind::ResidualTooLarge,
		            "input residual " + std::to_string(rep.input_residuals.max()) + " > delta " + std::to_string(p.delta));

	const EigenSystem es = herm_eig(hermitian_part(t.h - t.k), tol);
	rep.s_spectrum.min = es.min();
	rep.s_spectrum.max = es.max();
	rep.s_spectrum.smallest_abs = es.eigenvalues.empty() ? 0.0 : std::abs(es.eigenvalues.front());
	for (double l : es.eigenvalues) rep.s_spectrum.smallest_abs = std::min(rep.s_spectrum.smallest_abs, std::abs(l));

	const RealFunction gp = make_gplus(p.theta), gm = make_gminus(p.theta);
	const RealFunction qp = make_qplus(p.theta, p.ramp_width), qm = make_qminus(p.theta, p.ramp_width);
	QcTriple t2;
	t2.h = hermitian_part(es.apply(gp));
	t2.k = hermitian_part(es.apply(gm));
	t2.x = es.apply(qm) * t.x * es.apply(qp);
	rep.intermediate_distance = std::max({op_norm(t2.h - t.h, tol), op_norm(t2.k - t.k, tol), op_norm(t2.x - t.x, tol)});

	const Matrix tm2 = hermitian_part(t_matrix(t2));
	const EigenSystem es2 = herm_eig(tm2, tol);
	rep.intermediate_defect = idempotency_defect(es2);
	if (rep.intermediate_defect >= 0.25)
		throw Error(ErrorKind::SpectralGapFailure,
		            "|T2^2 - T2| = " + std::to_string(rep.intermediate_defect) + " >= 1/4");

	const Matrix proj = hermitian_part(es2.apply(step_half()));
	rep.projection_displacement = op_norm(proj - tm2, tol);
	QcTriple out = components_of(proj);
	out.h = hermitian_part(out.h);
	out.k = hermitian_part(out.k);

	rep.output_residuals = low_level_residuals(out, tol);
	rep.dist_h = op_norm(out.h - t.h, tol);
	rep.dist_k = op_norm(out.k - t.k, tol);
	rep.dist_x = op_norm(out.x - t.x, tol);

	const Matrix ph = es.apply([](double l) { return l > 0.0 ? 1.0 : 0.0; });
	const Matrix pk = es.apply([](double l) { return l < 0.0 ? 1.0 : 0.0; });
	rep.corner_defect = std::max({op_norm(out.h - ph * out.h * ph, tol), op_norm(out.k - pk * out.k * pk, tol),
	                              op_norm(out.x - pk * out.x * ph, tol)});

	rep.success = rep.output_residuals.max() <= tol.exact_residual && rep.max_distance() <= p.epsilon &&
	              rep.intermediate_defect <= p.epsilon / 2.0 + 1e-6;
	return {std::move(out), std::move(rep)};
}

struct AutoThetaResult {
	SmoothingParams params;
	SmoothingResult result;
	int attempts = 0;
};

/// Halves theta from epsilon/2 until smoothing succeeds; NoWorkableTheta once
/// theta drops below 1e-6 or the input itself is inadmissible.
inline AutoThetaResult auto_theta(const QcTriple& t, double epsilon, std::optional<double> delta = std::nullopt,
                                  const ToleranceProfile& tol = {}) {
	ErrorKind last = ErrorKind::SpectralGapFailure;
	std::string last_what = "no attempt";
	int attempts = 0;
	for (double theta = epsilon / 2.0; theta >= 1e-6; theta /= 2.0) {
		SmoothingParams p = SmoothingParams::for_theta(epsilon, theta, delta);
		p.tol = tol;
		++attempts;
		try {
			SmoothingResult r = smooth_representation(t, p);
			if (r.report.success) return {p, std::move(r), attempts};
			last = ErrorKind::SpectralGapFailure;
			last_what = "distance " + std::to_string(r.report.max_distance()) + ", |T2^2 - T2| " +
			            std::to_string(r.report.intermediate_defect) + ", output residual " +
			            std::to_string(r.report.output_residuals.max());
		} catch (const Error& e) {
			if (e.kind() != ErrorKind::SpectralGapFailure && e.kind() != ErrorKind::ResidualTooLarge) throw;
			last = e.kind();
			last_what = e.what();
			if (e.kind() == ErrorKind::ResidualTooLarge) break; // independent of theta
		}
	}
	throw NoWorkableTheta("no theta >= 1e-6 works after " + std::to_string(attempts) + " attempts (last: " + last_what + ")",
	                      last);
}

} // namespace qcwb
