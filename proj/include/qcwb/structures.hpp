#pragma once

#include "error.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "random.hpp"
#include "tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace qcwb {

/// Orthogonal positive h, k in M_n with their support projections. The
/// corners are X11 = P_h M_n P_h, X12 = P_h M_n P_k, X21 = P_k M_n P_h,
/// X22 = P_k M_n P_k.
struct CornerSystem {
	Matrix h;
	Matrix k;
	Matrix ph;
	Matrix pk;

	std::size_t dim() const { return h.dim(); }
};

inline CornerSystem make_corner_system(const Matrix& h, const Matrix& k, const ToleranceProfile& tol = {}) {
	if (h.dim() != k.dim()) throw Error(ErrorKind::DimMismatch, "corner system h, k differ in size");
	const double hk = op_norm(h * k, tol);
	if (hk > tol.orthogonality) throw Error(ErrorKind::NotOrthogonal, "|hk| = " + std::to_string(hk));
	CornerSystem sys{h, k, support_projection(h, tol.support, tol), support_projection(k, tol.support, tol)};
	const double overlap = op_norm(sys.ph * sys.pk, tol);
	if (overlap > tol.orthogonality)
		throw Error(ErrorKind::NotOrthogonal, "|P_h P_k| = " + std::to_string(overlap));
	return sys;
}

/// An element x11 + x12 + x21 + x22 of the direct sum of corners.
struct Corners {
	Matrix x11;
	Matrix x12;
	Matrix x21;
	Matrix x22;

	Matrix sum() const { return x11 + x12 + x21 + x22; }
};

/// Splits a matrix into its four corner compressions (the part outside the
/// corners is dropped).
inline Corners decompose(const CornerSystem& sys, const Matrix& a) {
	return {sys.ph * a * sys.ph, sys.ph * a * sys.pk, sys.pk * a * sys.ph, sys.pk * a * sys.pk};
}

/// Largest violation of P_i x_ij P_j = x_ij.
inline double support_defect(const CornerSystem& sys, const Corners& c) {
	return std::max({(sys.ph * c.x11 * sys.ph - c.x11).max_abs(), (sys.ph * c.x12 * sys.pk - c.x12).max_abs(),
	                 (sys.pk * c.x21 * sys.ph - c.x21).max_abs(), (sys.pk * c.x22 * sys.pk - c.x22).max_abs()});
}

inline void check_support(const CornerSystem& sys, const Corners& c, const ToleranceProfile& tol) {
	const double scale = std::max({1.0, c.x11.max_abs(), c.x12.max_abs(), c.x21.max_abs(), c.x22.max_abs()});
	const double defect = support_defect(sys, c);
	if (defect > tol.support * scale)
		throw Error(ErrorKind::SupportViolation, "corner support defect " + std::to_string(defect));
}

/// theta_s(x11 + x12 + x21 + x22) = sum_ij x_ij (x) f_ij(s) with
/// w_s = cos(pi s/2) e11 + sin(pi s/2) e21, f11 = w^*w, f12 = w^*, f21 = w,
/// f22 = w w^*. Block (a, b) of the result is sum_ij f_ij(s)[a, b] x_ij.
inline Matrix homotopy_theta(const CornerSystem& sys, const Corners& c, double s, const ToleranceProfile& tol = {}) {
	check_support(sys, c, tol);
	double co = std::cos(std::numbers::pi * s / 2.0);
	double si = std::sin(std::numbers::pi * s / 2.0);
	if (s == 0.0) co = 1.0, si = 0.0;
	if (s == 1.0) co = 0.0, si = 1.0;
	// w = [[co, 0], [si, 0]]
	const double f11[2][2] = {{1.0, 0.0}, {0.0, 0.0}};
	const double f12[2][2] = {{co, si}, {0.0, 0.0}};
	const double f21[2][2] = {{co, 0.0}, {si, 0.0}};
	const double f22[2][2] = {{co * co, co * si}, {co * si, si * si}};
	const std::size_t n = sys.dim();
	Matrix out(2 * n);
	for (int a = 0; a < 2; ++a)
		for (int b = 0; b < 2; ++b) {
			Matrix blk = f11[a][b] * c.x11 + f12[a][b] * c.x12 + f21[a][b] * c.x21 + f22[a][b] * c.x22;
			out.set_block(a * n, b * n, blk);
		}
	return out;
}

inline Matrix homotopy_theta(const CornerSystem& sys, const Matrix& a, double s, const ToleranceProfile& tol = {}) {
	return homotopy_theta(sys, decompose(sys, a), s, tol);
}

/// Random element of the corner sum: each corner is a compressed Gaussian.
inline Corners random_corners(const CornerSystem& sys, Rng& rng) {
	const std::size_t n = sys.dim();
	return decompose(sys, random_gaussian(n, rng));
}

struct HomomorphismResidual {
	double multiplicative = 0.0;
	double adjoint = 0.0;
	double isometry = 0.0; // max | |theta(a)| - |a| | / |a|
};

/// Max over random corner elements a, b of |theta(ab) - theta(a)theta(b)| and
/// |theta(a^*) - theta(a)^*|, relative to |a||b| and |a|.
inline HomomorphismResidual theta_is_homomorphism(const CornerSystem& sys, double s, int trials, Rng& rng,
                                                  const ToleranceProfile& tol = {}) {
	HomomorphismResidual r;
	for (int i = 0; i < trials; ++i) {
		const Corners a = random_corners(sys, rng);
		const Corners b = random_corners(sys, rng);
		const Matrix sa = a.sum();
		const Matrix sb = b.sum();
		const double na = std::max(op_norm(sa, tol), 1e-300);
		const double nb = std::max(op_norm(sb, tol), 1e-300);
		const Matrix ta = homotopy_theta(sys, a, s, tol);
		const Matrix tb = homotopy_theta(sys, b, s, tol);
		const Matrix tab = homotopy_theta(sys, decompose(sys, sa * sb), s, tol);
		r.multiplicative = std::max(r.multiplicative, op_norm(tab - ta * tb, tol) / (na * nb));
		const Matrix tadj = homotopy_theta(sys, decompose(sys, sa.adjoint()), s, tol);
		r.adjoint = std::max(r.adjoint, op_norm(tadj - ta.adjoint(), tol) / na);
		r.isometry = std::max(r.isometry, std::abs(op_norm(ta, tol) - na) / na);
	}
	return r;
}

/// An element [[alpha 1 + x11, x12], [x21, beta 1 + x22]] of the linking
/// algebra with units adjoined. The unit 1 is external to M_n.
struct LinkingElement {
	cplx alpha = 0.0;
	cplx beta = 0.0;
	Corners x;
};

inline LinkingElement linking_identity(std::size_t n) {
	return {1.0, 1.0, {Matrix(n), Matrix(n), Matrix(n), Matrix(n)}};
}

/// Product computed in the abstract algebra: scalars multiply, the corners
/// pick up the cross terms.
inline LinkingElement linking_product(const LinkingElement& e, const LinkingElement& f) {
	const Corners& a = e.x;
	const Corners& b = f.x;
	LinkingElement r;
	r.alpha = e.alpha * f.alpha;
	r.beta = e.beta * f.beta;
	r.x.x11 = e.alpha * b.x11 + f.alpha * a.x11 + a.x11 * b.x11 + a.x12 * b.x21;
	r.x.x12 = e.alpha * b.x12 + f.beta * a.x12 + a.x11 * b.x12 + a.x12 * b.x22;
	r.x.x21 = e.beta * b.x21 + f.alpha * a.x21 + a.x21 * b.x11 + a.x22 * b.x21;
	r.x.x22 = e.beta * b.x22 + f.beta * a.x22 + a.x21 * b.x12 + a.x22 * b.x22;
	return r;
}

inline LinkingElement linking_adjoint(const LinkingElement& e) {
	return {std::conj(e.alpha), std::conj(e.beta),
	        {e.x.x11.adjoint(), e.x.x21.adjoint(), e.x.x12.adjoint(), e.x.x22.adjoint()}};
}

/// Faithful matrix picture of M_2 of the unitization: a + lambda 1 is realized
/// as diag(a + lambda I_n, lambda), so the result has size 2(n + 1).
inline Matrix unitized_matrix(const LinkingElement& e) {
	const std::size_t n = e.x.x11.dim();
	const std::size_t m = n + 1;
	Matrix out(2 * m);
	auto put = [&](std::size_t bi, std::size_t bj, const Matrix& a, cplx lambda) {
		Matrix blk(m);
		blk.set_block(0, 0, a + lambda * Matrix::identity(n));
		blk(n, n) = lambda;
		out.set_block(bi * m, bj * m, blk);
	};
	put(0, 0, e.x.x11, e.alpha);
	put(0, 1, e.x.x12, 0.0);
	put(1, 0, e.x.x21, 0.0);
	put(1, 1, e.x.x22, e.beta);
	return out;
}

/// Inverse of unitized_matrix. Off-diagonal scalar slots are dropped; they
/// vanish on the linking algebra.
inline LinkingElement from_unitized_matrix(const Matrix& m2) {
	const std::size_t m = m2.dim() / 2;
	const std::size_t n = m - 1;
	auto take = [&](std::size_t bi, std::size_t bj, cplx& lambda) {
		const Matrix blk = m2.block(bi * m, bj * m, m);
		lambda = blk(n, n);
		return blk.block(0, 0, n) - lambda * Matrix::identity(n);
	};
	LinkingElement e;
	cplx z12 = 0.0, z21 = 0.0;
	e.x.x11 = take(0, 0, e.alpha);
	e.x.x12 = take(0, 1, z12);
	e.x.x21 = take(1, 0, z21);
	e.x.x22 = take(1, 1, e.beta);
	return e;
}

/// The character rho(e) = (alpha, beta) onto C + C.
inline std::pair<cplx, cplx> rho(const CornerSystem& sys, const LinkingElement& e, const ToleranceProfile& tol = {}) {
	check_support(sys, e.x, tol);
	return {e.alpha, e.beta};
}

/// Reads a 2n x 2n matrix whose (1,1) block acts on the unit, i.e. the
/// convention 1 = I_n, as a linking element with scalar parts taken from the
/// complements of the supports. Used on T-matrices, where P_h, P_k are proper.
inline LinkingElement linking_from_block_matrix(const CornerSystem& sys, const Matrix& t) {
	const std::size_t n = sys.dim();
	const Matrix id = Matrix::identity(n);
	const Matrix qh = id - sys.ph;
	const Matrix qk = id - sys.pk;
	auto scalar_on = [&](const Matrix& blk, const Matrix& q) -> cplx {
		const double r = q.trace().real();
		if (r < 0.5) return 0.0;
		return (q * blk * q).trace() / r;
	};
	const Matrix t11 = t.block(0, 0, n);
	const Matrix t22 = t.block(n, n, n);
	LinkingElement e;
	e.alpha = scalar_on(t11, qh);
	e.beta = scalar_on(t22, qk);
	e.x.x11 = t11 - e.alpha * id;
	e.x.x12 = t.block(0, n, n);
	e.x.x21 = t.block(n, 0, n);
	e.x.x22 = t22 - e.beta * id;
	return e;
}

// ---------------------------------------------------------------------------
// I cap closure(kAh) versus closure(kIh) in a block-diagonal algebra.

/// A = M_{n1} + ... + M_{nr}, embedded block-diagonally in M_{sum n}.
struct BlockAlgebra {
	std::vector<std::size_t> block_sizes;

	std::size_t ambient_dim() const {
		std::size_t n = 0;
		for (auto b : block_sizes) n += b;
		return n;
	}

	std::size_t vector_dim() const {
		std::size_t d = 0;
		for (auto b : block_sizes) d += b * b;
		return d;
	}

	std::size_t offset(std::size_t block) const {
		std::size_t o = 0;
		for (std::size_t i = 0; i < block; ++i) o += block_sizes[i];
		return o;
	}

	/// Coordinates of a block-diagonal matrix (entries outside the blocks are ignored).
	std::vector<cplx> vectorize(const Matrix& a) const {
		std::vector<cplx> v;
		v.reserve(vector_dim());
		for (std::size_t b = 0; b < block_sizes.size(); ++b) {
			const std::size_t o = offset(b);
			for (std::size_t i = 0; i < block_sizes[b]; ++i)
				for (std::size_t j = 0; j < block_sizes[b]; ++j) v.push_back(a(o + i, o + j));
		}
		return v;
	}

	/// Matrix units e_ij of each block, in vectorize order.
	std::vector<Matrix> basis() const {
		std::vector<Matrix> out;
		const std::size_t n = ambient_dim();
		for (std::size_t b = 0; b < block_sizes.size(); ++b) {
			const std::size_t o = offset(b);
			for (std::size_t i = 0; i < block_sizes[b]; ++i)
				for (std::size_t j = 0; j < block_sizes[b]; ++j) out.push_back(Matrix::unit(n, o + i, o + j));
		}
		return out;
	}

	std::vector<std::size_t> basis_block_index() const {
		std::vector<std::size_t> idx;
		for (std::size_t b = 0; b < block_sizes.size(); ++b)
			for (std::size_t i = 0; i < block_sizes[b] * block_sizes[b]; ++i) idx.push_back(b);
		return idx;
	}

	bool is_block_diagonal(const Matrix& a, double tolerance) const {
		const std::size_t n = ambient_dim();
		if (a.dim() != n) return false;
		std::vector<std::size_t> owner(n);
		for (std::size_t b = 0; b < block_sizes.size(); ++b)
			for (std::size_t i = 0; i < block_sizes[b]; ++i) owner[offset(b) + i] = b;
		for (std::size_t i = 0; i < n; ++i)
			for (std::size_t j = 0; j < n; ++j)
				if (owner[i] != owner[j] && std::abs(a(i, j)) > tolerance) return false;
		return true;
	}
};

namespace detail {

using Vec = std::vector<cplx>;

inline cplx dot(const Vec& a, const Vec& b) {
	cplx s = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
	return s;
}

inline double vnorm(const Vec& a) { return std::sqrt(std::abs(dot(a, a))); }

/// Orthonormal basis of span(vectors) by pivoted modified Gram-Schmidt with
/// reorthogonalization; stops once the largest remaining residual drops
/// below rel_tol times the largest input norm.
inline std::vector<Vec> orthonormal_basis(std::vector<Vec> vectors, double rel_tol) {
	std::vector<Vec> q;
	double scale = 0.0;
	for (const auto& v : vectors) scale = std::max(scale, vnorm(v));
	if (scale == 0.0) return q;
	while (!vectors.empty()) {
		std::size_t best = 0;
		double best_norm = -1.0;
		for (std::size_t i = 0; i < vectors.size(); ++i) {
			const double nv = vnorm(vectors[i]);
			if (nv > best_norm) best_norm = nv, best = i;
		}
		if (best_norm <= rel_tol * scale) break;
		Vec v = vectors[best];
		vectors.erase(vectors.begin() + static_cast<std::ptrdiff_t>(best));
		for (int pass = 0; pass < 2; ++pass)
			for (const auto& e : q) {
				const cplx c = dot(e, v);
				for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * e[i];
			}
		const double nv = vnorm(v);
		if (nv <= rel_tol * scale) continue;
		for (auto& z : v) z /= nv;
		for (auto& w : vectors) {
			const cplx c = dot(v, w);
			for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * v[i];
		}
		q.push_back(std::move(v));
	}
	return q;
}

/// Orthogonal projector Q Q^* onto span(basis), as a d x d matrix.
inline Matrix projector(const std::vector<Vec>& basis, std::size_t d) {
	Matrix p(d);
	for (const auto& e : basis)
		for (std::size_t i = 0; i < d; ++i)
			for (std::size_t j = 0; j < d; ++j) p(i, j) += e[i] * std::conj(e[j]);
	return p;
}

} // namespace detail

struct SubspaceComparison {
	bool equal = false;
	double gap = 0.0;        // |Q_lhs - Q_rhs|
	std::size_t lhs_dim = 0; // dim (I cap kAh)
	std::size_t rhs_dim = 0; // dim kIh
};

/// Compares I cap kAh with kIh, where I is the sum of the blocks flagged in
/// `ideal_mask`. Both sides are column spans of the map a -> k a h.
inline SubspaceComparison corner_ideal_equality(const Matrix& h, const Matrix& k, const BlockAlgebra& alg,
                                                const std::vector<bool>& ideal_mask, double threshold = 1e-10,
                                                const ToleranceProfile& tol = {}) {
	if (ideal_mask.size() != alg.block_sizes.size())
		throw Error(ErrorKind::DimMismatch, "ideal mask does not match block count");
	if (!alg.is_block_diagonal(h, 1e-12) || !alg.is_block_diagonal(k, 1e-12))
		throw Error(ErrorKind::DimMismatch, "h and k must lie in the block-diagonal algebra");
	const std::size_t d = alg.vector_dim();
	const auto basis = alg.basis();
	const auto owner = alg.basis_block_index();

	std::vector<detail::Vec> image_all, image_ideal;
	for (std::size_t i = 0; i < basis.size(); ++i) {
		auto v = alg.vectorize(k * basis[i] * h);
		if (ideal_mask[owner[i]]) image_ideal.push_back(v);
		image_all.push_back(std::move(v));
	}
	const auto w = detail::orthonormal_basis(image_all, threshold);
	const auto rhs = detail::orthonormal_basis(image_ideal, threshold);

	// I cap W: vectors of W annihilated by the projection onto the complement of I.
	std::vector<bool> in_ideal(d);
	{
		std::size_t c = 0;
		for (std::size_t b = 0; b < alg.block_sizes.size(); ++b)
			for (std::size_t i = 0; i < alg.block_sizes[b] * alg.block_sizes[b]; ++i) in_ideal[c++] = ideal_mask[b];
	}
	std::vector<detail::Vec> lhs;
	if (!w.empty()) {
		const std::size_t r = w.size();
		Matrix gram(r); // (Q^* (1 - P_I) Q)
		for (std::size_t a = 0; a < r; ++a)
			for (std::size_t b = 0; b < r; ++b) {
				cplx s = 0.0;
				for (std::size_t i = 0; i < d; ++i)
					if (!in_ideal[i]) s += std::conj(w[a][i]) * w[b][i];
				gram(a, b) = s;
			}
		const EigenSystem es = herm_eig(gram, tol);
		for (std::size_t c = 0; c < r; ++c) {
			if (es.eigenvalues[c] > 1e-12) continue;
			detail::Vec v(d);
			for (std::size_t a = 0; a < r; ++a)
				for (std::size_t i = 0; i < d; ++i) v[i] += es.basis(a, c) * w[a][i];
			lhs.push_back(std::move(v));
		}
		lhs = detail::orthonormal_basis(lhs, threshold);
	}

	SubspaceComparison out;
	out.lhs_dim = lhs.size();
	out.rhs_dim = rhs.size();
	out.gap = op_norm(detail::projector(lhs, d) - detail::projector(rhs, d), tol);
	out.equal = out.lhs_dim == out.rhs_dim && out.gap <= 1e-8;
	return out;
}

} // namespace qcwb
