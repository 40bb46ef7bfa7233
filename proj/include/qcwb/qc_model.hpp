#pragma once

#include "error.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace qcwb {

/// Generators (h, x, k) of qC / P realized as same-size matrices. The unit of
/// the unitization is the identity matrix.
struct QcTriple {
	Matrix h;
	Matrix x;
	Matrix k;

	std::size_t dim() const { return h.dim(); }

	void check_dims() const {
		if (x.dim() != h.dim() || k.dim() != h.dim())
			throw Error(ErrorKind::DimMismatch, "QcTriple components differ in size");
	}

	static QcTriple zero(std::size_t n) { return {Matrix(n), Matrix(n), Matrix(n)}; }

	friend bool operator==(const QcTriple&, const QcTriple&) = default;
};

inline QcTriple direct_sum(const QcTriple& a, const QcTriple& b) {
	return {direct_sum(a.h, b.h), direct_sum(a.x, b.x), direct_sum(a.k, b.k)};
}

/// u t u^* componentwise.
inline QcTriple conjugate(const QcTriple& t, const Matrix& u) {
	const Matrix ua = u.adjoint();
	return {u * t.h * ua, u * t.x * ua, u * t.k * ua};
}

/// Ordered label -> operator-norm residual map.
class ResidualReport {
public:
	void add(std::string label, double value) { entries_.emplace_back(std::move(label), value); }

	const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }

	double at(const std::string& label) const {
		for (const auto& [l, v] : entries_)
			if (l == label) return v;
		throw Error(ErrorKind::ValidationError, "no residual labelled " + label);
	}

	double max() const {
		double m = 0.0;
		for (const auto& e : entries_) m = std::max(m, e.second);
		return m;
	}

	double sum() const {
		double s = 0.0;
		for (const auto& e : entries_) s += e.second;
		return s;
	}

	std::size_t size() const { return entries_.size(); }

private:
	std::vector<std::pair<std::string, double>> entries_;
};

namespace labels {
inline constexpr const char* h_relation = "h*h+x*x-h";
inline constexpr const char* k_relation = "k*k+xx*-k";
inline constexpr const char* intertwine = "kx-xh";
inline constexpr const char* orthogonal = "hk";
inline constexpr const char* idempotent = "T^2-T";
inline constexpr const char* selfadjoint = "T*-T";
inline constexpr const char* lower = "T>=0";
inline constexpr const char* upper = "T<=1";
} // namespace labels

/// T(h, x, k) = [[1 - h, x^*], [x, k]].
inline Matrix t_matrix(const QcTriple& t) {
	t.check_dims();
	const std::size_t n = t.dim();
	return block2x2(Matrix::identity(n) - t.h, t.x.adjoint(), t.x, t.k);
}

/// Inverse of t_matrix on the block level: reads (h, x, k) off a 2n x 2n matrix.
inline QcTriple components_of(const Matrix& t) {
	if (t.dim() % 2 != 0) throw Error(ErrorKind::DimMismatch, "T-matrix must have even size");
	const std::size_t n = t.dim() / 2;
	return {Matrix::identity(n) - t.block(0, 0, n), t.block(n, 0, n), t.block(n, n, n)};
}

inline ResidualReport low_level_residuals(const QcTriple& t, const ToleranceProfile& tol = {}) {
	t.check_dims();
	const Matrix ha = t.h.adjoint();
	const Matrix xa = t.x.adjoint();
	const Matrix ka = t.k.adjoint();
	ResidualReport r;
	r.add(labels::h_relation, op_norm(ha * t.h + xa * t.x - t.h, tol));
	r.add(labels::k_relation, op_norm(ka * t.k + t.x * xa - t.k, tol));
	r.add(labels::intertwine, op_norm(t.k * t.x - t.x * t.h, tol));
	r.add(labels::orthogonal, op_norm(t.h * t.k, tol));
	return r;
}

inline ResidualReport high_level_residuals(const QcTriple& t, const ToleranceProfile& tol = {}) {
	const Matrix tm = t_matrix(t);
	ResidualReport r;
	r.add(labels::orthogonal, op_norm(t.h * t.k, tol));
	r.add(labels::idempotent, op_norm(tm * tm - tm, tol));
	r.add(labels::selfadjoint, op_norm(tm.adjoint() - tm, tol));
	return r;
}

/// Residuals for hk = 0 and 0 <= T <= 1.
inline ResidualReport p_residuals(const QcTriple& t, const ToleranceProfile& tol = {}) {
	const EigenSystem es = herm_eig(t_matrix(t), tol);
	ResidualReport r;
	r.add(labels::orthogonal, op_norm(t.h * t.k, tol));
	r.add(labels::lower, std::max(0.0, -es.min()));
	r.add(labels::upper, std::max(0.0, es.max() - 1.0));
	return r;
}

/// Canonical generators sampled on the grid t_i = i/m, i = 1..m, as a
/// block-diagonal triple of size 2m: each 2x2 fiber is
/// h = t e11, k = t e22, x = sqrt(t - t^2) e21.
inline QcTriple canonical_generators(std::size_t m) {
	if (m == 0) throw Error(ErrorKind::DimMismatch, "grid size must be positive");
	QcTriple g = QcTriple::zero(2 * m);
	for (std::size_t i = 1; i <= m; ++i) {
		const double t = static_cast<double>(i) / static_cast<double>(m);
		const std::size_t o = 2 * (i - 1);
		g.h(o, o) = t;
		g.k(o + 1, o + 1) = t;
		g.x(o + 1, o) = std::sqrt(std::max(t - t * t, 0.0));
	}
	return g;
}

/// The single 2x2 fiber of the canonical generators at t in (0, 1].
inline QcTriple canonical_fiber(double t) {
	QcTriple g = QcTriple::zero(2);
	g.h(0, 0) = t;
	g.k(1, 1) = t;
	g.x(1, 0) = std::sqrt(std::max(t - t * t, 0.0));
	return g;
}

struct Factorization {
	Matrix y;
	double reconstruction = 0.0; // |k^(1/8) y h^(1/8) - x|
	double norm = 0.0;           // |y|
};

/// Solves x = k^(1/8) y h^(1/8) for the minimum-norm y. Throws
/// FactorizationResidualTooLarge when x is not supported in the k-h corner.
inline Factorization factor_x(const QcTriple& t, const ToleranceProfile& tol = {}) {
	t.check_dims();
	const Matrix k8 = frac_power(hermitian_part(t.k), 0.125, tol);
	const Matrix h8 = frac_power(hermitian_part(t.h), 0.125, tol);
	Factorization f;
	f.y = pseudo_solve(k8, h8, t.x, tol);
	f.reconstruction = op_norm(k8 * f.y * h8 - t.x, tol);
	f.norm = op_norm(f.y, tol);
	const double bound = tol.factor_residual * std::max(1.0, op_norm(t.x, tol));
	if (f.reconstruction > bound)
		throw Error(ErrorKind::FactorizationResidualTooLarge,
		            "|k^(1/8) y h^(1/8) - x| = " + std::to_string(f.reconstruction));
	return f;
}

} // namespace qcwb
