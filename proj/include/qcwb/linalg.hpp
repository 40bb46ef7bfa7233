#pragma once

#include "error.hpp"
#include "functions.hpp"
#include "matrix.hpp"
#include "tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

namespace qcwb {

/// Spectral data of a Hermitian matrix: H = basis * diag(eigenvalues) * basis^*.
struct EigenSystem {
	std::vector<double> eigenvalues; // ascending
	Matrix basis;                    // unitary, eigenvectors in columns

	double min() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
	double max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }

	template <class F>
	Matrix apply(F&& f) const {
		const std::size_t n = basis.dim();
		std::vector<double> fv(n);
		for (std::size_t i = 0; i < n; ++i) fv[i] = f(eigenvalues[i]);
		return synthesize(fv);
	}

	/// basis * diag(values) * basis^*, values may be complex.
	template <class V>
	Matrix synthesize(const std::vector<V>& values) const {
		const std::size_t n = basis.dim();
		Matrix r(n);
		for (std::size_t l = 0; l < n; ++l) {
			const cplx v = values[l];
			if (v == cplx(0.0)) continue;
			for (std::size_t i = 0; i < n; ++i) {
				const cplx bil = basis(i, l) * v;
				if (bil == cplx(0.0)) continue;
				for (std::size_t j = 0; j < n; ++j) r(i, j) += bil * std::conj(basis(j, l));
			}
		}
		return r;
	}
};

namespace detail {

inline void check_hermitian(const Matrix& h, const ToleranceProfile& tol) {
	const double scale = std::max(1.0, h.frobenius());
	double defect = 0.0;
	for (std::size_t i = 0; i < h.dim(); ++i)
		for (std::size_t j = i; j < h.dim(); ++j) defect += 2.0 * std::norm(h(i, j) - std::conj(h(j, i)));
	if (std::sqrt(defect) > tol.hermitian * scale)
		throw Error(ErrorKind::NotHermitian, "Hermitian defect " + std::to_string(std::sqrt(defect)));
}

inline double off_diagonal_mass(const Matrix& a) {
	double s = 0.0;
	for (std::size_t i = 0; i < a.dim(); ++i)
		for (std::size_t j = 0; j < a.dim(); ++j)
			if (i != j) s += std::norm(a(i, j));
	return std::sqrt(s);
}

} // namespace detail

/// Cyclic complex Jacobi. Throws NotHermitian / NoConvergence.
inline EigenSystem herm_eig(const Matrix& h, const ToleranceProfile& tol = {}) {
	detail::check_hermitian(h, tol);
	const std::size_t n = h.dim();
	Matrix a = hermitian_part(h);
	Matrix v = Matrix::identity(n);
	const double stop = tol.eig_offdiag * a.frobenius();

	int sweep = 0;
	while (detail::off_diagonal_mass(a) > stop) {
		if (++sweep > tol.eig_sweeps)
			throw Error(ErrorKind::NoConvergence, "Jacobi exceeded " + std::to_string(tol.eig_sweeps) + " sweeps");
		for (std::size_t p = 0; p + 1 < n; ++p) {
			for (std::size_t q = p + 1; q < n; ++q) {
				const cplx apq = a(p, q);
				const double mag = std::abs(apq);
				if (mag == 0.0) continue;
				const double app = a(p, p).real();
				const double aqq = a(q, q).real();
				// Phase e^{-i phi} on column q makes the (p,q) entry real, then a
				// real symmetric rotation finishes the 2x2 problem.
				const cplx phase = std::conj(apq) / mag;
				const double theta = (aqq - app) / (2.0 * mag);
				const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
				const double c = 1.0 / std::sqrt(t * t + 1.0);
				const double s = t * c;
				const cplx gpp = c;
				const cplx gpq = s;
				const cplx gqp = -s * phase;
				const cplx gqq = c * phase;

				for (std::size_t r = 0; r < n; ++r) {
					const cplx arp = a(r, p);
					const cplx arq = a(r, q);
					a(r, p) = arp * gpp + arq * gqp;
					a(r, q) = arp * gpq + arq * gqq;
				}
				for (std::size_t r = 0; r < n; ++r) {
					const cplx apr = a(p, r);
					const cplx aqr = a(q, r);
					a(p, r) = std::conj(gpp) * apr + std::conj(gqp) * aqr;
					a(q, r) = std::conj(gpq) * apr + std::conj(gqq) * aqr;
				}
				a(p, q) = 0.0;
				a(q, p) = 0.0;
				a(p, p) = a(p, p).real();
				a(q, q) = a(q, q).real();
				for (std::size_t r = 0; r < n; ++r) {
					const cplx vrp = v(r, p);
					const cplx vrq = v(r, q);
					v(r, p) = vrp * gpp + vrq * gqp;
					v(r, q) = vrp * gpq + vrq * gqq;
				}
			}
		}
	}

	std::vector<std::size_t> order(n);
	std::iota(order.begin(), order.end(), 0);
	std::stable_sort(order.begin(), order.end(),
	                 [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
	EigenSystem es;
	es.eigenvalues.resize(n);
	es.basis = Matrix(n);
	for (std::size_t k = 0; k < n; ++k) {
		es.eigenvalues[k] = a(order[k], order[k]).real();
		for (std::size_t r = 0; r < n; ++r) es.basis(r, k) = v(r, order[k]);
	}
	return es;
}

/// f(H) through the spectral decomposition.
template <class F>
	requires std::invocable<const F&, double>
inline Matrix func_calc(const Matrix& h, const F& f, const ToleranceProfile& tol = {}) {
	return herm_eig(h, tol).apply(f);
}

/// exp(2 pi i T) for Hermitian T.
inline Matrix unitary_exp(const Matrix& t, const ToleranceProfile& tol = {}) {
	const EigenSystem es = herm_eig(t, tol);
	std::vector<cplx> phases(es.eigenvalues.size());
	for (std::size_t i = 0; i < phases.size(); ++i)
		phases[i] = std::polar(1.0, 2.0 * std::numbers::pi * es.eigenvalues[i]);
	return es.synthesize(phases);
}

/// Largest singular value.
inline double op_norm(const Matrix& m, const ToleranceProfile& tol = {}) {
	if (m.dim() == 0) return 0.0;
	const double scale = m.max_abs();
	if (scale == 0.0) return 0.0;
	// Scaling keeps M^*M away from under/overflow.
	const Matrix ms = (1.0 / scale) * m;
	const EigenSystem es = herm_eig(ms.adjoint() * ms, tol);
	return scale * std::sqrt(std::max(es.max(), 0.0));
}

/// H^p for positive semidefinite H; eigenvalues in [-negative_clamp, 0) are
/// treated as 0.
inline Matrix frac_power(const Matrix& h, double p, const ToleranceProfile& tol = {}) {
	if (!(p > 0.0)) throw Error(ErrorKind::NotPositive, "frac_power exponent must be positive");
	const EigenSystem es = herm_eig(h, tol);
	if (es.min() < -tol.negative_clamp)
		throw Error(ErrorKind::NotPositive, "lambda_min = " + std::to_string(es.min()));
	// Eigenvalues at rounding level are zero; small powers would inflate them.
	double top = 0.0;
	for (double l : es.eigenvalues) top = std::max(top, std::abs(l));
	const double floor = 100.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(h.dim()) * top;
	return es.apply([p, floor](double l) { return l > floor ? std::pow(l, p) : 0.0; });
}

/// |p^2 - p| for Hermitian p, from its spectrum.
inline double idempotency_defect(const EigenSystem& es) {
	double eta = 0.0;
	for (double l : es.eigenvalues) eta = std::max(eta, std::abs(l * l - l));
	return eta;
}

/// step_half(p): the spectral projection of p onto [1/2, inf). Requires
/// |p^2 - p| < 1/4, i.e. 1/2 is not in the spectrum. The distance to p is the
/// largest scalar displacement (1 - sqrt(1 - 4 eta)) / 2 <= 2 eta.
inline Matrix nearest_projection(const Matrix& p, const ToleranceProfile& tol = {}) {
	const EigenSystem es = herm_eig(p, tol);
	const double eta = idempotency_defect(es);
	if (eta >= 0.25)
		throw Error(ErrorKind::GapTooSmall, "|p^2 - p| = " + std::to_string(eta) + " >= 1/4");
	return hermitian_part(es.apply(step_half()));
}

namespace detail {

/// Moore-Penrose inverse. Hermitian input uses its own spectrum; anything else
/// goes through the Hermitian dilation [[0, A], [A^*, 0]], whose pseudo-inverse
/// carries A^+ in its lower left block.
inline Matrix pseudo_inverse(const Matrix& a, const ToleranceProfile& tol) {
	const double defect = (a - a.adjoint()).max_abs();
	if (defect <= 1e-14 * std::max(1.0, a.max_abs())) {
		const EigenSystem es = herm_eig(a, tol);
		double top = 0.0;
		for (double l : es.eigenvalues) top = std::max(top, std::abs(l));
		const double cut = tol.pinv * top;
		return es.apply([cut](double l) { return std::abs(l) > cut && l != 0.0 ? 1.0 / l : 0.0; });
	}
	const std::size_t n = a.dim();
	Matrix dil(2 * n);
	dil.set_block(0, n, a);
	dil.set_block(n, 0, a.adjoint());
	return pseudo_inverse(hermitian_part(dil), tol).block(n, 0, n);
}

} // namespace detail

/// Minimum-norm Y minimizing |A Y B - X|_F, i.e. Y = A^+ X B^+.
inline Matrix pseudo_solve(const Matrix& a, const Matrix& b, const Matrix& x, const ToleranceProfile& tol = {}) {
	if (a.dim() != x.dim() || b.dim() != x.dim())
		throw Error(ErrorKind::DimMismatch, "pseudo_solve operands differ in size");
	return detail::pseudo_inverse(a, tol) * x * detail::pseudo_inverse(b, tol);
}

/// Spectral projection of a positive element onto eigenvalues above `threshold`.
inline Matrix support_projection(const Matrix& h, double threshold, const ToleranceProfile& tol = {}) {
	return hermitian_part(herm_eig(h, tol).apply([threshold](double l) { return l > threshold ? 1.0 : 0.0; }));
}

inline bool is_projection(const Matrix& p, double tolerance) {
	return (p * p - p).max_abs() <= tolerance && (p - p.adjoint()).max_abs() <= tolerance;
}

} // namespace qcwb
