#pragma once

// Exponential map for the extension 0 -> I -> C([0,1], M_n) -> M_n + M_n -> 0,
// discretized on a uniform grid. A representation of qC in the quotient is
// lifted, turned into a unitary u in 1 + I, and classified by the winding
// number of det u.

#include "error.hpp"
#include "functions.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "qc_model.hpp"
#include "structures.hpp"
#include "tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace qcwb {

/// Uniform grid t_i = i/m, i = 0..m, with fibers M_n.
struct IntervalModel {
	std::size_t grid = 64;
	std::size_t fiber_dim = 2;

	std::size_t points() const { return grid + 1; }
	double t(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(grid); }

	void validate() const {
		if (grid == 0) throw Error(ErrorKind::ValidationError, "grid size must be positive");
		if (fiber_dim == 0) throw Error(ErrorKind::ValidationError, "fiber dimension must be positive");
	}
};

/// An element of A: the values f(t_0), ..., f(t_m).
struct GridFunction {
	std::size_t grid = 0;
	std::size_t fiber_dim = 0;
	std::vector<Matrix> values;

	GridFunction() = default;
	GridFunction(std::size_t m, std::size_t n) : grid(m), fiber_dim(n), values(m + 1, Matrix(n)) {}

	static GridFunction constant(std::size_t m, const Matrix& v) {
		GridFunction f(m, v.dim());
		std::fill(f.values.begin(), f.values.end(), v);
		return f;
	}

	const Matrix& front() const { return values.front(); }
	const Matrix& back() const { return values.back(); }

	void validate() const {
		if (values.size() != grid + 1)
			throw Error(ErrorKind::DimMismatch, "grid function has " + std::to_string(values.size()) + " values, expected " +
			                                       std::to_string(grid + 1));
		for (const auto& v : values) {
			if (v.dim() != fiber_dim) throw Error(ErrorKind::DimMismatch, "grid function fibers differ in size");
			if (!v.is_finite()) throw Error(ErrorKind::MalformedInput, "grid function has non-finite entries");
		}
	}

	/// max_i |f(t_{i+1}) - f(t_i)| / dt.
	double lipschitz_estimate(const ToleranceProfile& tol = {}) const {
		double l = 0.0;
		for (std::size_t i = 0; i + 1 < values.size(); ++i)
			l = std::max(l, op_norm(values[i + 1] - values[i], tol) * static_cast<double>(grid));
		return l;
	}

	template <class F>
	GridFunction map(F&& f) const {
		GridFunction out;
		out.grid = grid;
		out.values.reserve(values.size());
		for (const auto& v : values) out.values.push_back(f(v));
		out.fiber_dim = out.values.empty() ? 0 : out.values.front().dim();
		return out;
	}
};

/// An element of the quotient B = M_n + M_n.
struct BPair {
	Matrix at0;
	Matrix at1;
};

/// pi: endpoint evaluation.
inline BPair endpoint_values(const GridFunction& f) { return {f.front(), f.back()}; }

/// A representation of qC in B, one triple per endpoint.
struct BRep {
	QcTriple at0;
	QcTriple at1;

	std::size_t fiber_dim() const { return at0.dim(); }

	void validate() const {
		at0.check_dims();
		at1.check_dims();
		if (at0.dim() != at1.dim()) throw Error(ErrorKind::DimMismatch, "endpoint triples differ in size");
	}
};

inline BRep direct_sum(const BRep& a, const BRep& b) { return {direct_sum(a.at0, b.at0), direct_sum(a.at1, b.at1)}; }

/// Orthogonal positive contractions lift to orthogonal positive contractions:
/// interpolate c = h - k linearly and split it into positive and negative parts.
inline std::pair<GridFunction, GridFunction> lift_orthogonal_positive(const BPair& hb, const BPair& kb,
                                                                      const IntervalModel& model,
                                                                      const ToleranceProfile& tol = {}) {
	model.validate();
	for (const auto* p : {&hb.at0, &hb.at1, &kb.at0, &kb.at1})
		if (p->dim() != model.fiber_dim) throw Error(ErrorKind::DimMismatch, "B element does not match fiber dimension");
	for (const auto& [h, k] : {std::pair{&hb.at0, &kb.at0}, std::pair{&hb.at1, &kb.at1}}) {
		const double d = op_norm(*h * *k, tol);
		if (d > tol.orthogonality) throw Error(ErrorKind::NotOrthogonal, "|hk| = " + std::to_string(d) + " in B");
	}
	const Matrix c0 = hermitian_part(hb.at0 - kb.at0);
	const Matrix c1 = hermitian_part(hb.at1 - kb.at1);
	GridFunction h(model.grid, model.fiber_dim), k(model.grid, model.fiber_dim);
	for (std::size_t i = 0; i <= model.grid; ++i) {
		const double t = model.t(i);
		const EigenSystem es = herm_eig((1.0 - t) * c0 + t * c1, tol);
		h.values[i] = hermitian_part(es.apply(positive_part()));
		k.values[i] = hermitian_part(es.apply(negative_part()));
	}
	return {std::move(h), std::move(k)};
}

/// y(t) from the endpoint factors y0, y1.
using YInterpolation = std::function<Matrix(double t, const Matrix& y0, const Matrix& y1)>;

inline Matrix linear_y(double t, const Matrix& y0, const Matrix& y1) { return (1.0 - t) * y0 + t * y1; }

inline Matrix cosine_y(double t, const Matrix& y0, const Matrix& y1) {
	const double w = (1.0 - std::cos(std::numbers::pi * t)) / 2.0;
	return (1.0 - w) * y0 + w * y1;
}

struct LiftResult {
	GridFunction h, k, x, y;
	GridFunction t;       // T(h, x, k)
	GridFunction t_prime; // clamp01(T)
	double endpoint_defect = 0.0; // max_e |T'(e) - T(phi_e)|
	double rho_defect = 0.0;      // max_t |rho(T'(t)) - (1, 0)|
	double corner_defect = 0.0;   // how far T' leaves the linking algebra of (h, k)
};

/// Lifts an exact representation in B to T' = clamp01(T(h, x, k)) over the grid.
inline LiftResult lift_T(const BRep& phi, const IntervalModel& model, const YInterpolation& y_lift = linear_y,
                         const ToleranceProfile& tol = {}) {
	phi.validate();
	model.validate();
	if (phi.fiber_dim() != model.fiber_dim) throw Error(ErrorKind::DimMismatch, "representation does not match fiber dimension");
	for (const auto* e : {&phi.at0, &phi.at1}) {
		const double r = low_level_residuals(*e, tol).max();
		if (r > tol.exact_residual)
			throw Error(ErrorKind::LiftResidual, "representation in B is not exact, residual " + std::to_string(r));
	}
	const std::size_t n = model.fiber_dim;
	LiftResult out;
	std::tie(out.h, out.k) = lift_orthogonal_positive({phi.at0.h, phi.at1.h}, {phi.at0.k, phi.at1.k}, model, tol);
	const Matrix y0 = factor_x(phi.at0, tol).y;
	const Matrix y1 = factor_x(phi.at1, tol).y;
	out.x = GridFunction(model.grid, n);
	out.y = GridFunction(model.grid, n);
	out.t = GridFunction(model.grid, 2 * n);
	out.t_prime = GridFunction(model.grid, 2 * n);
	const RealFunction clamp = clamp01();
	for (std::size_t i = 0; i <= model.grid; ++i) {
		const double t = model.t(i);
		out.y.values[i] = i == 0 ? y0 : i == model.grid ? y1 : y_lift(t, y0, y1);
		const Matrix k8 = frac_power(out.k.values[i], 0.125, tol);
		const Matrix h8 = frac_power(out.h.values[i], 0.125, tol);
		out.x.values[i] = k8 * out.y.values[i] * h8;
		const QcTriple fiber{out.h.values[i], out.x.values[i], out.k.values[i]};
		out.t.values[i] = hermitian_part(t_matrix(fiber));
		out.t_prime.values[i] = hermitian_part(func_calc(out.t.values[i], clamp, tol));

		const CornerSystem sys = make_corner_system(fiber.h, fiber.k, tol);
		const LinkingElement le = linking_from_block_matrix(sys, out.t_prime.values[i]);
		out.corner_defect = std::max(out.corner_defect, support_defect(sys, le.x));
		out.rho_defect = std::max(out.rho_defect, std::abs(le.alpha - 1.0) + std::abs(le.beta));
	}
	out.endpoint_defect = std::max(op_norm(out.t_prime.front() - t_matrix(phi.at0), tol),
	                               op_norm(out.t_prime.back() - t_matrix(phi.at1), tol));
	if (out.endpoint_defect > tol.endpoint)
		throw Error(ErrorKind::LiftResidual, "lift misses the endpoints by " + std::to_string(out.endpoint_defect));
	return out;
}

struct WindingData {
	double turns = 0.0;          // accumulated phase / 2 pi
	double max_phase_step = 0.0; // radians
};

/// Accumulated arg(det f(t_{i+1}) / det f(t_i)) over the grid, counterclockwise positive.
inline WindingData det_winding(const GridFunction& f) {
	WindingData w;
	cplx prev = determinant(f.values.front());
	for (std::size_t i = 1; i < f.values.size(); ++i) {
		const cplx cur = determinant(f.values[i]);
		if (std::abs(prev) == 0.0 || std::abs(cur) == 0.0)
			throw Error(ErrorKind::WindingIllConditioned, "determinant vanishes on the grid");
		const double step = std::arg(cur / prev);
		w.max_phase_step = std::max(w.max_phase_step, std::abs(step));
		w.turns += step;
		prev = cur;
	}
	w.turns /= 2.0 * std::numbers::pi;
	return w;
}

struct BoundaryResult {
	GridFunction u;         // unitary in 1 + I, dim n
	GridFunction u_prime;   // exp(2 pi i T'), dim 2n
	long winding = 0;
	double winding_real = 0.0;
	double unitarity_defect = 0.0;
	double endpoint_defect = 0.0;
	double max_phase_step = 0.0;
	double det_u_prime_turns = 0.0; // winding of det U', an independent phase accumulation
	std::size_t grid = 0;
};

/// U' = exp(2 pi i T'), u = -1 + U11 + U12 + U21 + U22, winding of det u.
inline BoundaryResult boundary_unitary(const GridFunction& t_prime, const ToleranceProfile& tol = {}) {
	t_prime.validate();
	if (t_prime.fiber_dim % 2 != 0) throw Error(ErrorKind::DimMismatch, "T' must have even fiber size");
	const std::size_t n = t_prime.fiber_dim / 2;
	const Matrix id = Matrix::identity(n);
	const Matrix id2 = Matrix::identity(2 * n);
	BoundaryResult r;
	r.grid = t_prime.grid;
	r.u_prime = t_prime.map([&](const Matrix& t) { return unitary_exp(t, tol); });
	const double pre = std::max(op_norm(r.u_prime.front() - id2, tol), op_norm(r.u_prime.back() - id2, tol));
	if (pre > tol.unitary)
		throw Error(ErrorKind::EndpointDefect, "exp(2 pi i T') differs from 1 at an endpoint by " + std::to_string(pre));
	r.u = r.u_prime.map([&](const Matrix& w) {
		return w.block(0, 0, n) + w.block(0, n, n) + w.block(n, 0, n) + w.block(n, n, n) - id;
	});
	for (const auto& v : r.u.values) r.unitarity_defect = std::max(r.unitarity_defect, op_norm(v.adjoint() * v - id, tol));
	r.endpoint_defect = std::max(op_norm(r.u.front() - id, tol), op_norm(r.u.back() - id, tol));
	if (r.endpoint_defect > tol.unitary)
		throw Error(ErrorKind::EndpointDefect, "u differs from 1 at an endpoint by " + std::to_string(r.endpoint_defect));

	const WindingData w = det_winding(r.u);
	r.max_phase_step = w.max_phase_step;
	if (w.max_phase_step >= std::numbers::pi / 2.0)
		throw Error(ErrorKind::WindingIllConditioned,
		            "phase step " + std::to_string(w.max_phase_step) + " >= pi/2; refine the grid");
	r.winding_real = w.turns;
	r.winding = std::lround(w.turns);
	if (std::abs(w.turns - static_cast<double>(r.winding)) > 0.1)
		throw Error(ErrorKind::WindingIllConditioned, "accumulated phase " + std::to_string(w.turns) + " is not near an integer");
	r.det_u_prime_turns = det_winding(r.u_prime).turns;
	return r;
}

struct BoundaryOptions {
	std::size_t grid = 64;
	YInterpolation y_lift = linear_y;
	bool refine = true;          // double the grid while phase steps are >= pi/4
	std::size_t max_grid = 4096;
};

/// lift_T followed by boundary_unitary, refining the grid as configured.
inline BoundaryResult boundary_map(const BRep& phi, const BoundaryOptions& opt = {}, const ToleranceProfile& tol = {}) {
	std::size_t m = opt.grid;
	while (true) {
		const IntervalModel model{m, phi.fiber_dim()};
		const LiftResult lift = lift_T(phi, model, opt.y_lift, tol);
		if (!opt.refine || 2 * m > opt.max_grid) return boundary_unitary(lift.t_prime, tol);
		const WindingData probe = det_winding(lift.t_prime.map([&](const Matrix& t) {
			const std::size_t n = t.dim() / 2;
			const Matrix w = unitary_exp(t, tol);
			return w.block(0, 0, n) + w.block(0, n, n) + w.block(n, 0, n) + w.block(n, n, n) - Matrix::identity(n);
		}));
		if (probe.max_phase_step < std::numbers::pi / 4.0) return boundary_unitary(lift.t_prime, tol);
		m *= 2;
	}
}

struct CollapseResult {
	GridFunction w0; // theta_0 picture: diag(u, 1)
	GridFunction w1; // theta_1 picture: U'
	double unitarity_defect = 0.0;
	long winding_u = 0;       // det winding of the (1,1) block of w0
	long winding_u_prime = 0; // det winding of w1
};

/// Both ends of the path s -> 1 + theta_s(U' - 1) between diag(u, 1) and U'.
inline CollapseResult homotopy_collapse(const GridFunction& u_prime, const GridFunction& h, const GridFunction& k,
                                        const ToleranceProfile& tol = {}) {
	u_prime.validate();
	const std::size_t n = u_prime.fiber_dim / 2;
	if (h.values.size() != u_prime.values.size() || k.values.size() != u_prime.values.size() || h.fiber_dim != n)
		throw Error(ErrorKind::DimMismatch, "corner data does not match U'");
	const Matrix id = Matrix::identity(n);
	const Matrix id2 = Matrix::identity(2 * n);
	CollapseResult r;
	r.w0 = GridFunction(u_prime.grid, 2 * n);
	r.w1 = GridFunction(u_prime.grid, 2 * n);
	GridFunction u11(u_prime.grid, n);
	for (std::size_t i = 0; i < u_prime.values.size(); ++i) {
		const Matrix& w = u_prime.values[i];
		const CornerSystem sys = make_corner_system(h.values[i], k.values[i], tol);
		const Corners c{w.block(0, 0, n) - id, w.block(0, n, n), w.block(n, 0, n), w.block(n, n, n) - id};
		r.w0.values[i] = id2 + homotopy_theta(sys, c, 0.0, tol);
		r.w1.values[i] = id2 + homotopy_theta(sys, c, 1.0, tol);
		u11.values[i] = r.w0.values[i].block(0, 0, n);
		for (const auto* m : {&r.w0.values[i], &r.w1.values[i]})
			r.unitarity_defect = std::max(r.unitarity_defect, op_norm(m->adjoint() * *m - id2, tol));
	}
	r.winding_u = std::lround(det_winding(u11).turns);
	r.winding_u_prime = std::lround(det_winding(r.w1).turns);
	return r;
}

/// Components of a fiberwise exact lift.
struct ExactLift {
	GridFunction h, x, k;
	double max_residual = 0.0;
	double endpoint_defect = 0.0;
	double min_gap = 0.0; // min over fibers of distance from spec(T) to 1/2

	QcTriple fiber(std::size_t i) const { return {h.values[i], x.values[i], k.values[i]}; }
};

/// With a hole in the spectrum of T around 1/2, f_{1/2}(T) is a projection
/// whose components lift phi exactly.
inline ExactLift exact_projection_lift(const BRep& phi, const IntervalModel& model, const YInterpolation& y_lift = linear_y,
                                       const ToleranceProfile& tol = {}) {
	const LiftResult lift = lift_T(phi, model, y_lift, tol);
	const std::size_t n = model.fiber_dim;
	ExactLift out;
	out.h = GridFunction(model.grid, n);
	out.x = GridFunction(model.grid, n);
	out.k = GridFunction(model.grid, n);
	out.min_gap = 0.5;
	for (std::size_t i = 0; i <= model.grid; ++i) {
		const EigenSystem es = herm_eig(lift.t.values[i], tol);
		for (double l : es.eigenvalues) out.min_gap = std::min(out.min_gap, std::abs(l - 0.5));
		if (out.min_gap < tol.spectral_gap)
			throw Error(ErrorKind::NoSpectralGap, "spectrum of T within " + std::to_string(out.min_gap) + " of 1/2 at t = " +
			                                          std::to_string(model.t(i)));
		QcTriple c = components_of(hermitian_part(es.apply(step_half())));
		out.h.values[i] = hermitian_part(c.h);
		out.x.values[i] = c.x;
		out.k.values[i] = hermitian_part(c.k);
		out.max_residual = std::max(out.max_residual, low_level_residuals(out.fiber(i), tol).max());
	}
	auto triple_gap = [&](const QcTriple& a, const QcTriple& b) {
		return std::max({op_norm(a.h - b.h, tol), op_norm(a.x - b.x, tol), op_norm(a.k - b.k, tol)});
	};
	out.endpoint_defect = std::max(triple_gap(out.fiber(0), phi.at0), triple_gap(out.fiber(model.grid), phi.at1));
	if (out.max_residual > tol.exact_residual || out.endpoint_defect > tol.endpoint)
		throw Error(ErrorKind::LiftResidual, "exact lift residual " + std::to_string(out.max_residual) + ", endpoint defect " +
		                                         std::to_string(out.endpoint_defect));
	return out;
}

// ---------------------------------------------------------------------------
// Builtin representations of qC in B.

namespace scenarios {

/// Evaluation at 1 composed with the first coordinate: the generator sits at
/// t = 0 as (h, x, k) = (e11, 0, 0) and the t = 1 component is zero, so
/// T(t) = diag(t, 1, 0, 0) and u(t) = diag(e^{2 pi i t}, 1).
inline BRep eval_at_one() {
	BRep r{QcTriple::zero(2), QcTriple::zero(2)};
	r.at0.h(0, 0) = 1.0;
	return r;
}

/// (e11, 0, e22) at t = 0, zero at t = 1. Its K_0 class vanishes.
inline BRep eval_at_one_diag() {
	BRep r{QcTriple::zero(2), QcTriple::zero(2)};
	r.at0.h(0, 0) = 1.0;
	r.at0.k(1, 1) = 1.0;
	return r;
}

inline BRep zero(std::size_t n = 2) { return {QcTriple::zero(n), QcTriple::zero(n)}; }

inline BRep doubled() { return direct_sum(eval_at_one(), eval_at_one()); }

/// The canonical fiber at t = 1/2 at both endpoints.
inline BRep matched_endpoints() { return {canonical_fiber(0.5), canonical_fiber(0.5)}; }

/// The canonical fiber at t = 1 at both endpoints.
inline BRep trivial() { return {canonical_fiber(1.0), canonical_fiber(1.0)}; }

inline std::vector<std::string> names() {
	return {"eval-at-one", "eval-at-one-diag", "zero", "doubled", "matched-endpoints", "trivial"};
}

inline BRep by_name(const std::string& name) {
	if (name == "eval-at-one") return eval_at_one();
	if (name == "eval-at-one-diag") return eval_at_one_diag();
	if (name == "zero") return zero();
	if (name == "doubled") return doubled();
	if (name == "matched-endpoints") return matched_endpoints();
	if (name == "trivial") return trivial();
	throw Error(ErrorKind::MalformedInput, "unknown scenario '" + name + "'");
}

} // namespace scenarios

} // namespace qcwb
